//! The square complex built from a presentation and a square complex `X`.
//!
//! The 1-skeleton of the presentation complex (one vertex, one loop per
//! generator) has each loop subdivided into `k = |γ|` edges. For the
//! relator `r_j` of length `ℓ_j`, a copy of `X` scaled by `ℓ_j` is glued on
//! by a cylinder of `k·ℓ_j` squares: the bottom runs along `r_j` in word
//! order from the base vertex, the top along the subdivided `γ` in loop
//! order from its first vertex, and rung `t` joins the `t`-th points.
//!
//! Names: `r` and `r<i>p<s>` for vertices on generator loop `i`, `r<i>e<s>`
//! for its edges, `x<j>…` for cells of copy `j` (see
//! [`SquareComplex::subdivide`]) and `c<j>e<t>` for rungs.

use std::collections::VecDeque;

use super::{scale_into, DirEdge, EdgeLoop, Pi1, SquareComplex};
use crate::error::{Error, Result};
use crate::presentations::FinitePresentation;
use crate::quotients::count_homs;
use crate::words::Word;

/// Which part of the construction a cell belongs to. Indices are relator
/// positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Base,
    Cylinder(usize),
    Copy(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub vertices: Vec<Origin>,
    pub edges: Vec<Origin>,
    pub squares: Vec<Origin>,
    /// Vertex of copy `j` where its `γ` starts.
    pub copy_bases: Vec<usize>,
}

impl Provenance {
    fn extend(&mut self, c: &SquareComplex, origin: Origin) {
        self.vertices.resize(c.vertex_count(), origin);
        self.edges.resize(c.edge_count(), origin);
        self.squares.resize(c.square_count(), origin);
    }
}

#[derive(Clone, Debug)]
pub struct SquaredPresentation {
    pub complex: SquareComplex,
    pub provenance: Provenance,
    /// Length of `γ`.
    pub scale: usize,
    pub relator_lengths: Vec<usize>,
}

impl SquaredPresentation {
    /// `Σ ℓ_j²·#squares(X) + Σ k·ℓ_j`.
    pub fn expected_squares(&self, x: &SquareComplex) -> usize {
        self.relator_lengths
            .iter()
            .map(|&l| l * l * x.square_count() + self.scale * l)
            .sum()
    }

    /// `(1 − n) + m·χ(X)`.
    pub fn expected_euler_characteristic(&self, generators: usize, x: &SquareComplex) -> i64 {
        1 - generators as i64 + self.relator_lengths.len() as i64 * x.euler_characteristic()
    }
}

pub fn build_s_of_p(
    p: &FinitePresentation,
    x: &SquareComplex,
    gamma: &EdgeLoop,
) -> Result<SquaredPresentation> {
    if !gamma.is_locally_geodesic() {
        return Err(Error::Precondition(format!(
            "{} is not a local geodesic",
            x.path_names(gamma.edges())
        )));
    }
    for r in p.relators() {
        if r.is_empty() || !r.is_cyclically_reduced() {
            return Err(Error::Precondition(format!("relator `{r}` is not cyclically reduced")));
        }
    }
    let k = gamma.len();
    let mut c = SquareComplex::new();
    let mut prov = Provenance {
        vertices: Vec::new(),
        edges: Vec::new(),
        squares: Vec::new(),
        copy_bases: Vec::new(),
    };

    let base = c.add_vertex("r")?;
    let mut loops: Vec<Vec<DirEdge>> = Vec::with_capacity(p.generator_count());
    for i in 0..p.generator_count() {
        let mut points = vec![base];
        for s in 1..k {
            points.push(c.add_vertex(&format!("r{i}p{s}"))?);
        }
        points.push(base);
        let mut edges = Vec::with_capacity(k);
        for s in 0..k {
            edges.push(c.add_edge(&format!("r{i}e{s}"), points[s], points[s + 1])?);
        }
        loops.push(edges);
    }
    prov.extend(&c, Origin::Base);

    for (j, r) in p.relators().iter().enumerate() {
        let mut rho = Vec::with_capacity(k * r.len());
        for l in r.letters() {
            let i = p.alphabet().index_of(&l.generator).expect("relator over the alphabet");
            if l.inverse {
                rho.extend(loops[i].iter().rev().map(|d| d.reverse()));
            } else {
                rho.extend(&loops[i]);
            }
        }
        let map = scale_into(x, r.len(), &format!("x{j}"), &mut c)?;
        prov.extend(&c, Origin::Copy(j));
        let top = map.path(gamma.edges());
        prov.copy_bases.push(c.src(top[0]));

        let n = rho.len();
        let mut rungs = Vec::with_capacity(n);
        for t in 0..n {
            rungs.push(c.add_edge(&format!("c{j}e{t}"), c.src(rho[t]), c.src(top[t]))?);
        }
        for t in 0..n {
            c.add_square([rho[t], rungs[(t + 1) % n], top[t].reverse(), rungs[t].reverse()])?;
        }
        prov.extend(&c, Origin::Cylinder(j));
    }
    Ok(SquaredPresentation {
        complex: c,
        provenance: prov,
        scale: k,
        relator_lengths: p.relators().iter().map(Word::len).collect(),
    })
}

/// Generators of the fundamental group of copy `j`, as loops at its base
/// vertex: one per edge of the copy outside a breadth-first tree of it.
fn copy_loops(s: &SquaredPresentation, j: usize) -> Vec<Vec<DirEdge>> {
    let c = &s.complex;
    let inside = |d: DirEdge| s.provenance.edges[d.edge()] == Origin::Copy(j);
    let mut ends = vec![Vec::new(); c.vertex_count()];
    for e in 0..c.edge_count() {
        for d in [DirEdge::forward(e), DirEdge::backward(e)] {
            if inside(d) {
                ends[c.src(d)].push(d);
            }
        }
    }
    let root = s.provenance.copy_bases[j];
    let mut parent: Vec<Option<Option<DirEdge>>> = vec![None; c.vertex_count()];
    parent[root] = Some(None);
    let mut queue = VecDeque::from([root]);
    let mut tree = vec![false; c.edge_count()];
    while let Some(v) = queue.pop_front() {
        for &d in &ends[v] {
            let w = c.dst(d);
            if parent[w].is_none() {
                parent[w] = Some(Some(d));
                tree[d.edge()] = true;
                queue.push_back(w);
            }
        }
    }
    let path_to = |mut v: usize| {
        let mut path = Vec::new();
        while let Some(Some(d)) = parent[v] {
            path.push(d);
            v = c.src(d);
        }
        path.reverse();
        path
    };
    let mut loops = Vec::new();
    for e in 0..c.edge_count() {
        let d = DirEdge::forward(e);
        if !inside(d) || tree[e] {
            continue;
        }
        let mut path = path_to(c.src(d));
        path.push(d);
        path.extend(path_to(c.dst(d)).iter().rev().map(|d| d.reverse()));
        loops.push(path);
    }
    loops
}

/// Homomorphisms from the fundamental group of the built complex into the
/// symmetric group of degree `n` that kill the fundamental group of every
/// copy of `X`.
pub fn homs_killing_copies(s: &SquaredPresentation, n: usize) -> Result<u64> {
    let pi1 = Pi1::new(&s.complex)?;
    let mut extra: Vec<Word> = Vec::new();
    for j in 0..s.provenance.copy_bases.len() {
        for path in copy_loops(s, j) {
            let w = pi1.loop_word(&s.complex, &path);
            if !w.is_identity() {
                extra.push(w);
            }
        }
    }
    count_homs(pi1.presentation(), n, &extra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::abelianization;
    use crate::quotients::{search_homs, SearchMode};
    use crate::squarecx::{check_link_condition, pi1_presentation};

    fn torus_and_gamma() -> (SquareComplex, EdgeLoop) {
        let x = SquareComplex::torus();
        let gamma = EdgeLoop::parse(&x, "a a").unwrap();
        (x, gamma)
    }

    #[test]
    fn torus_relator_gives_nonpositive_curvature() {
        let (x, gamma) = torus_and_gamma();
        let p = FinitePresentation::from_strs(&["a", "b"], &["a b a^-1 b^-1"]).unwrap();
        let s = build_s_of_p(&p, &x, &gamma).unwrap();
        assert!(check_link_condition(&s.complex).holds());
        assert_eq!(s.complex.square_count(), s.expected_squares(&x));
        assert_eq!(s.complex.square_count(), 16 + 8);
        assert_eq!(s.complex.euler_characteristic(), s.expected_euler_characteristic(2, &x));
        assert_eq!(s.complex.euler_characteristic(), -1);
    }

    #[test]
    fn provenance_covers_every_cell() {
        let (x, gamma) = torus_and_gamma();
        let p = FinitePresentation::from_strs(&["a"], &["a^2", "a^3"]).unwrap();
        let s = build_s_of_p(&p, &x, &gamma).unwrap();
        let prov = &s.provenance;
        assert_eq!(prov.squares.len(), s.complex.square_count());
        let count = |o: Origin| prov.squares.iter().filter(|&&x| x == o).count();
        assert_eq!(count(Origin::Copy(0)), 4);
        assert_eq!(count(Origin::Copy(1)), 9);
        assert_eq!(count(Origin::Cylinder(0)), 4);
        assert_eq!(count(Origin::Cylinder(1)), 6);
        assert_eq!(count(Origin::Base), 0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = SquareComplex::torus();
        let p = FinitePresentation::from_strs(&["a"], &["a"]).unwrap();
        let bent = EdgeLoop::parse(&x, "a b").unwrap();
        assert!(matches!(build_s_of_p(&p, &x, &bent), Err(Error::Precondition(_))));
        let q = FinitePresentation::from_strs(&["a", "b"], &["b a b^-1"]).unwrap();
        let gamma = EdgeLoop::parse(&x, "a").unwrap();
        assert!(matches!(build_s_of_p(&q, &x, &gamma), Err(Error::Precondition(_))));
    }

    #[test]
    fn killing_copies_recovers_the_group() {
        let (x, gamma) = torus_and_gamma();
        let p = FinitePresentation::from_strs(&["a"], &["a^2"]).unwrap();
        let s = build_s_of_p(&p, &x, &gamma).unwrap();
        for n in 1..=3 {
            let direct = search_homs(&p, n, SearchMode::All).unwrap().len() as u64;
            assert_eq!(homs_killing_copies(&s, n).unwrap(), direct);
        }
    }

    #[test]
    fn trivial_relator_complex() {
        let (x, gamma) = torus_and_gamma();
        let p = FinitePresentation::from_strs(&["a"], &["a"]).unwrap();
        let s = build_s_of_p(&p, &x, &gamma).unwrap();
        for n in 1..=3 {
            assert_eq!(homs_killing_copies(&s, n).unwrap(), 1);
        }
        // ⟨a, x, y | [x, y], a = x²⟩
        assert_eq!(abelianization(&pi1_presentation(&s.complex).unwrap()).betti, 2);
    }
}
