use std::collections::HashMap;

use super::{rank, Edge, GraphImmersion, LabeledGraph};
use crate::error::{Error, Result};

/// Fibre product of two immersions over the same base.
///
/// Vertices are pairs `(y₁, y₂)` with equal images, numbered in
/// lexicographic order; edges are pairs of equally labelled edges,
/// numbered lexicographically by `(e₁, e₂)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibreProduct {
    pub graph: LabeledGraph,
    pub vertex_pairs: Vec<(usize, usize)>,
    pub edge_pairs: Vec<(usize, usize)>,
    pub components: Vec<FibreComponent>,
    /// Component index of each vertex.
    pub component_of: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibreComponent {
    pub vertices: usize,
    pub edges: usize,
    pub rank: i64,
    pub is_tree: bool,
    /// Contains a vertex `(y, y)`; only set when both factors are the same
    /// immersion.
    pub is_diagonal: bool,
    pub least_vertex: usize,
}

pub fn fibre_product(a: &GraphImmersion, b: &GraphImmersion) -> Result<FibreProduct> {
    if a.base() != b.base() {
        return Err(Error::BaseMismatch);
    }
    Ok(fibre_product_with(a, b, a == b))
}

pub(crate) fn fibre_product_with(a: &GraphImmersion, b: &GraphImmersion, same: bool) -> FibreProduct {
    let (ga, gb) = (a.domain(), b.domain());
    let nb = gb.vertex_count();
    let mut by_image: HashMap<usize, Vec<usize>> = HashMap::new();
    for (v, &img) in b.vertex_map().iter().enumerate() {
        by_image.entry(img).or_default().push(v);
    }
    let mut id = vec![u32::MAX; ga.vertex_count() * nb];
    let mut vertex_pairs = Vec::new();
    for (v1, img) in a.vertex_map().iter().enumerate() {
        if let Some(vs) = by_image.get(img) {
            for &v2 in vs {
                id[v1 * nb + v2] = vertex_pairs.len() as u32;
                vertex_pairs.push((v1, v2));
            }
        }
    }
    let mut by_label: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, e) in gb.edges().iter().enumerate() {
        by_label.entry(e.label).or_default().push(i);
    }
    let mut edges = Vec::new();
    let mut edge_pairs = Vec::new();
    for (i, e1) in ga.edges().iter().enumerate() {
        if let Some(es) = by_label.get(&e1.label) {
            for &j in es {
                let e2 = gb.edges()[j];
                edges.push(Edge {
                    src: id[e1.src * nb + e2.src] as usize,
                    dst: id[e1.dst * nb + e2.dst] as usize,
                    label: e1.label,
                });
                edge_pairs.push((i, j));
            }
        }
    }
    let graph = LabeledGraph {
        vertex_count: vertex_pairs.len(),
        edges,
        basepoint: None,
    };
    let (_, component_of) = graph.components();
    let ranks = rank(&graph);
    let mut components: Vec<FibreComponent> = ranks
        .iter()
        .map(|r| FibreComponent {
            vertices: r.vertices,
            edges: r.edges,
            rank: r.rank,
            is_tree: r.rank == 0,
            is_diagonal: false,
            least_vertex: usize::MAX,
        })
        .collect();
    for (v, &c) in component_of.iter().enumerate() {
        let comp = &mut components[c];
        comp.least_vertex = comp.least_vertex.min(v);
        let (y1, y2) = vertex_pairs[v];
        if same && y1 == y2 {
            comp.is_diagonal = true;
        }
    }
    FibreProduct {
        graph,
        vertex_pairs,
        edge_pairs,
        components,
        component_of,
    }
}

impl FibreProduct {
    /// Breadth-first tree inside component `c` rooted at its least vertex,
    /// plus the lowest-numbered edge outside that tree (if any).
    pub(crate) fn loop_in_component(&self, c: usize) -> Option<(usize, Vec<(usize, bool)>)> {
        let root = self.components[c].least_vertex;
        let adj = self.graph.adjacency();
        let paths = adj.tree_paths(root);
        // tree edges: those used to first reach a vertex
        let mut tree = vec![false; self.graph.edge_count()];
        let mut reached = vec![false; self.graph.vertex_count()];
        reached[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let mut steps = adj.steps(v).to_vec();
            steps.sort_by_key(|s| (s.edge, !s.forward));
            for s in steps {
                if !reached[s.target] {
                    reached[s.target] = true;
                    tree[s.edge] = true;
                    queue.push_back(s.target);
                }
            }
        }
        let e = (0..self.graph.edge_count())
            .find(|&e| !tree[e] && self.component_of[self.graph.edges()[e].src] == c)?;
        let edge = self.graph.edges()[e];
        let mut path = paths[edge.src].clone()?;
        path.push((edge.label, false));
        let back = paths[edge.dst].clone()?;
        path.extend(back.iter().rev().map(|&(l, inv)| (l, !inv)));
        Some((root, path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stallings::{graph_of_subgroup, BaseGraph};
    use crate::words::Word;
    use std::sync::Arc;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn square_subgroup_against_itself() {
        let x = Arc::new(BaseGraph::rose_from_names(&["a", "b"]).unwrap());
        let y = graph_of_subgroup(&x, &[w("a^2")]).unwrap();
        let p = fibre_product(&y, &y).unwrap();
        assert_eq!(p.graph.vertex_count(), 4);
        assert_eq!(p.graph.edge_count(), 4);
        assert_eq!(p.components.len(), 2);
        assert!(p.components.iter().all(|c| c.rank == 1));
        assert_eq!(p.components.iter().filter(|c| c.is_diagonal).count(), 1);
    }

    #[test]
    fn different_bases_are_rejected() {
        let x = Arc::new(BaseGraph::rose_from_names(&["a", "b"]).unwrap());
        let z = Arc::new(BaseGraph::rose_from_names(&["a", "c"]).unwrap());
        let y1 = graph_of_subgroup(&x, &[w("a")]).unwrap();
        let y2 = graph_of_subgroup(&z, &[w("a")]).unwrap();
        assert_eq!(fibre_product(&y1, &y2), Err(Error::BaseMismatch));
    }

    #[test]
    fn loop_word_is_closed() {
        let x = Arc::new(BaseGraph::rose_from_names(&["a", "b"]).unwrap());
        let y = graph_of_subgroup(&x, &[w("a^2")]).unwrap();
        let p = fibre_product(&y, &y).unwrap();
        for c in 0..p.components.len() {
            let (_, path) = p.loop_in_component(c).unwrap();
            assert_eq!(x.word_of(&path), w("a^2"));
        }
    }
}
