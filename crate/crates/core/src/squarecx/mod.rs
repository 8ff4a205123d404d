//! Combinatorial square complexes.
//!
//! Edges are stored once, with an orientation; a [`DirEdge`] is an edge
//! together with a direction, and the reverse of edge `a` is written `a-`.
//! Squares are closed edge paths of length four, stored as the least of
//! their eight rotations and reflections.
//!
//! The link of a vertex has one node per edge end at the vertex (the
//! directed edges leaving it) and one arc per square corner there. A
//! complex satisfies the link condition when every link is a simple graph
//! of girth at least four.

mod build;
pub mod format;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::presentations::FinitePresentation;
use crate::words::{is_valid_name, Generator, Letter, Word};

pub use build::{build_s_of_p, homs_killing_copies, Origin, Provenance, SquaredPresentation};

/// An edge with a direction: `2e` runs along edge `e`, `2e + 1` against it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirEdge(u32);

impl DirEdge {
    pub fn forward(edge: usize) -> Self {
        DirEdge(2 * edge as u32)
    }

    pub fn backward(edge: usize) -> Self {
        DirEdge(2 * edge as u32 + 1)
    }

    pub fn edge(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_reversed(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn reverse(self) -> Self {
        DirEdge(self.0 ^ 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct EdgeRecord {
    name: String,
    src: usize,
    dst: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SquareComplex {
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
    squares: Vec<[DirEdge; 4]>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

/// Least of the eight dihedral images of a boundary word.
fn canonical(b: [DirEdge; 4]) -> [DirEdge; 4] {
    let reflected = [b[3].reverse(), b[2].reverse(), b[1].reverse(), b[0].reverse()];
    let mut best = b;
    for w in [b, reflected] {
        for r in 0..4 {
            let rot = [w[r], w[(r + 1) % 4], w[(r + 2) % 4], w[(r + 3) % 4]];
            best = best.min(rot);
        }
    }
    best
}

impl SquareComplex {
    pub fn new() -> Self {
        SquareComplex::default()
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<usize> {
        if !is_valid_name(name) {
            return Err(Error::InvalidName(name.to_string()));
        }
        if self.vertex_index.contains_key(name) {
            return Err(Error::InvalidComplex(format!("duplicate vertex `{name}`")));
        }
        self.vertices.push(name.to_string());
        self.vertex_index.insert(name.to_string(), self.vertices.len() - 1);
        Ok(self.vertices.len() - 1)
    }

    pub fn add_edge(&mut self, name: &str, src: usize, dst: usize) -> Result<DirEdge> {
        if !is_valid_name(name) {
            return Err(Error::InvalidName(name.to_string()));
        }
        if self.edge_index.contains_key(name) {
            return Err(Error::InvalidComplex(format!("duplicate edge `{name}`")));
        }
        if src >= self.vertices.len() || dst >= self.vertices.len() {
            return Err(Error::InvalidComplex(format!("edge `{name}` has an unknown endpoint")));
        }
        self.edges.push(EdgeRecord {
            name: name.to_string(),
            src,
            dst,
        });
        self.edge_index.insert(name.to_string(), self.edges.len() - 1);
        Ok(DirEdge::forward(self.edges.len() - 1))
    }

    /// Adds a square with the given boundary path; returns its index.
    pub fn add_square(&mut self, boundary: [DirEdge; 4]) -> Result<usize> {
        if boundary.iter().any(|d| d.edge() >= self.edges.len()) {
            return Err(Error::InvalidComplex("square uses an unknown edge".into()));
        }
        for i in 0..4 {
            if self.dst(boundary[i]) != self.src(boundary[(i + 1) % 4]) {
                return Err(Error::InvalidComplex(format!(
                    "square boundary {} is not a closed path",
                    self.path_names(&boundary)
                )));
            }
        }
        self.squares.push(canonical(boundary));
        Ok(self.squares.len() - 1)
    }

    /// One vertex, edges `a` and `b`, one square `a b a- b-`.
    pub fn torus() -> Self {
        let mut c = SquareComplex::new();
        let v = c.add_vertex("v").expect("valid name");
        let a = c.add_edge("a", v, v).expect("valid edge");
        let b = c.add_edge("b", v, v).expect("valid edge");
        c.add_square([a, b, a.reverse(), b.reverse()])
            .expect("closed boundary");
        c
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn square_count(&self) -> usize {
        self.squares.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edges[e].name
    }

    /// `a` or `a-`.
    pub fn dir_name(&self, d: DirEdge) -> String {
        let name = &self.edges[d.edge()].name;
        if d.is_reversed() {
            format!("{name}-")
        } else {
            name.clone()
        }
    }

    pub fn path_names(&self, path: &[DirEdge]) -> String {
        path.iter()
            .map(|&d| self.dir_name(d))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Resolves `a` or `a-`.
    pub fn dir_edge(&self, token: &str) -> Option<DirEdge> {
        match token.strip_suffix('-') {
            Some(name) => self.edge_index.get(name).map(|&e| DirEdge::backward(e)),
            None => self.edge_index.get(token).map(|&e| DirEdge::forward(e)),
        }
    }

    pub fn src(&self, d: DirEdge) -> usize {
        let e = &self.edges[d.edge()];
        if d.is_reversed() {
            e.dst
        } else {
            e.src
        }
    }

    pub fn dst(&self, d: DirEdge) -> usize {
        self.src(d.reverse())
    }

    pub fn squares(&self) -> &[[DirEdge; 4]] {
        &self.squares
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.squares.len() as i64
    }

    /// Directed edges leaving each vertex, in edge order.
    fn ends(&self) -> Vec<Vec<DirEdge>> {
        let mut ends = vec![Vec::new(); self.vertices.len()];
        for e in 0..self.edges.len() {
            for d in [DirEdge::forward(e), DirEdge::backward(e)] {
                ends[self.src(d)].push(d);
            }
        }
        ends
    }

    pub fn is_connected(&self) -> bool {
        self.vertices.is_empty() || self.bfs_tree(0).iter().all(|p| p.is_some())
    }

    /// Breadth-first spanning tree from `root`: for each reached vertex,
    /// the directed edge it was reached by (`root` maps to `None` inside
    /// `Some`).
    fn bfs_tree(&self, root: usize) -> Vec<Option<Option<DirEdge>>> {
        let ends = self.ends();
        let mut parent = vec![None; self.vertices.len()];
        parent[root] = Some(None);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &d in &ends[v] {
                let w = self.dst(d);
                if parent[w].is_none() {
                    parent[w] = Some(Some(d));
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// Subdivides every edge into `l` edges and every square into an
    /// `l × l` grid. Names are regenerated: `v<i>` for old vertex `i`,
    /// `e<i>q<s>` for points inside edge `i`, `e<i>p<s>` for its pieces,
    /// and `s<q>…` for cells inside square `q`.
    pub fn subdivide(&self, l: usize) -> Result<SquareComplex> {
        let mut out = SquareComplex::new();
        scale_into(self, l, "", &mut out)?;
        Ok(out)
    }
}

/// Where the cells of a scaled copy landed.
pub(crate) struct ScaleMap {
    /// Pieces of each edge, in its forward direction.
    pub pieces: Vec<Vec<DirEdge>>,
}

impl ScaleMap {
    /// The `i`-th piece along the directed edge `d`.
    pub fn piece(&self, d: DirEdge, i: usize) -> DirEdge {
        let p = &self.pieces[d.edge()];
        if d.is_reversed() {
            p[p.len() - 1 - i].reverse()
        } else {
            p[i]
        }
    }

    pub fn path(&self, path: &[DirEdge]) -> Vec<DirEdge> {
        path.iter()
            .flat_map(|&d| (0..self.pieces[d.edge()].len()).map(move |i| self.piece(d, i)))
            .collect()
    }
}

/// Appends `x` scaled by `l` to `out`, prefixing every new name.
pub(crate) fn scale_into(
    x: &SquareComplex,
    l: usize,
    prefix: &str,
    out: &mut SquareComplex,
) -> Result<ScaleMap> {
    if l == 0 {
        return Err(Error::Precondition("scale factor must be positive".into()));
    }
    let mut vertex = Vec::with_capacity(x.vertex_count());
    for i in 0..x.vertex_count() {
        vertex.push(out.add_vertex(&format!("{prefix}v{i}"))?);
    }
    let mut pieces = Vec::with_capacity(x.edge_count());
    for (i, e) in x.edges.iter().enumerate() {
        let mut points = vec![vertex[e.src]];
        for s in 1..l {
            points.push(out.add_vertex(&format!("{prefix}e{i}q{s}"))?);
        }
        points.push(vertex[e.dst]);
        let mut row = Vec::with_capacity(l);
        for s in 0..l {
            row.push(out.add_edge(&format!("{prefix}e{i}p{s}"), points[s], points[s + 1])?);
        }
        pieces.push(row);
    }
    let map = ScaleMap { pieces };

    for (q, sq) in x.squares.iter().enumerate() {
        let [d1, d2, d3, d4] = *sq;
        // grid point (i, j): bottom runs along d1, right up d2, top back
        // along d3, left down d4
        let mut point = vec![vec![usize::MAX; l + 1]; l + 1];
        for s in 0..=l {
            let along = |d: DirEdge, s: usize| -> usize {
                if s == l {
                    out.dst(map.piece(d, l - 1))
                } else {
                    out.src(map.piece(d, s))
                }
            };
            point[s][0] = along(d1, s);
            point[l][s] = along(d2, s);
            point[l - s][l] = along(d3, s);
            point[0][l - s] = along(d4, s);
        }
        for (i, column) in point.iter_mut().enumerate().take(l).skip(1) {
            for (j, slot) in column.iter_mut().enumerate().take(l).skip(1) {
                *slot = out.add_vertex(&format!("{prefix}s{q}p{i}_{j}"))?;
            }
        }
        // horizontal (i, j) → (i + 1, j), vertical (i, j) → (i, j + 1)
        let mut horizontal = vec![vec![DirEdge(0); l + 1]; l];
        let mut vertical = vec![vec![DirEdge(0); l]; l + 1];
        for i in 0..l {
            horizontal[i][0] = map.piece(d1, i);
            horizontal[i][l] = map.piece(d3, l - 1 - i).reverse();
            for j in 1..l {
                horizontal[i][j] =
                    out.add_edge(&format!("{prefix}s{q}h{i}_{j}"), point[i][j], point[i + 1][j])?;
            }
        }
        for j in 0..l {
            vertical[l][j] = map.piece(d2, j);
            vertical[0][j] = map.piece(d4, l - 1 - j).reverse();
            for (i, column) in vertical.iter_mut().enumerate().take(l).skip(1) {
                column[j] = out.add_edge(&format!("{prefix}s{q}u{i}_{j}"), point[i][j], point[i][j + 1])?;
            }
        }
        for i in 0..l {
            for j in 0..l {
                out.add_square([
                    horizontal[i][j],
                    vertical[i + 1][j],
                    horizontal[i][j + 1].reverse(),
                    vertical[i][j].reverse(),
                ])?;
            }
        }
    }
    Ok(map)
}

/// The link of one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkGraph {
    pub vertex: usize,
    /// Edge ends at the vertex.
    pub nodes: Vec<DirEdge>,
    /// Arcs between node indices, one per square corner.
    pub arcs: Vec<(usize, usize)>,
    /// `(square, corner)` behind each arc.
    pub corners: Vec<(usize, usize)>,
}

impl LinkGraph {
    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.arcs {
            adj[a].push(b);
            if a != b {
                adj[b].push(a);
            }
        }
        adj
    }

    pub fn node_of(&self, d: DirEdge) -> Option<usize> {
        self.nodes.iter().position(|&x| x == d)
    }

    /// Arc distance between two nodes; `None` if unreachable.
    pub fn distance(&self, from: usize, to: usize) -> Option<usize> {
        let adj = self.neighbours();
        let mut dist = vec![usize::MAX; self.nodes.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                return Some(dist[u]);
            }
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Length of a shortest cycle, found by a breadth-first search from
    /// every node. Loops count as length 1 and parallel arcs as length 2.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut seen = HashMap::new();
        for &(a, b) in &self.arcs {
            if a == b {
                return Some(1);
            }
            if seen.insert((a.min(b), a.max(b)), ()).is_some() {
                best = Some(2);
            }
        }
        if best.is_some() {
            return best;
        }
        let adj = self.neighbours();
        for s in 0..self.nodes.len() {
            let mut dist = vec![usize::MAX; self.nodes.len()];
            let mut parent = vec![usize::MAX; self.nodes.len()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        let len = dist[u] + dist[w] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }
}

pub fn link(c: &SquareComplex, v: usize) -> Result<LinkGraph> {
    if v >= c.vertex_count() {
        return Err(Error::Precondition(format!("no vertex {v}")));
    }
    let nodes: Vec<DirEdge> = c.ends().swap_remove(v);
    let index: HashMap<DirEdge, usize> = nodes.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let mut arcs = Vec::new();
    let mut corners = Vec::new();
    for (q, sq) in c.squares.iter().enumerate() {
        for i in 0..4 {
            let incoming = sq[i];
            let outgoing = sq[(i + 1) % 4];
            if c.dst(incoming) != v {
                continue;
            }
            arcs.push((index[&incoming.reverse()], index[&outgoing]));
            corners.push((q, (i + 1) % 4));
        }
    }
    Ok(LinkGraph {
        vertex: v,
        nodes,
        arcs,
        corners,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinkViolation {
    Loop { vertex: String, end: String },
    MultipleArcs { vertex: String, ends: (String, String) },
    ShortCycle { vertex: String, length: usize },
}

impl fmt::Display for LinkViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkViolation::Loop { vertex, end } => write!(f, "link of {vertex}: loop at {end}"),
            LinkViolation::MultipleArcs { vertex, ends } => {
                write!(f, "link of {vertex}: several arcs between {} and {}", ends.0, ends.1)
            }
            LinkViolation::ShortCycle { vertex, length } => {
                write!(f, "link of {vertex}: cycle of length {length}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkReport {
    pub violations: Vec<LinkViolation>,
}

impl LinkReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn violations_at(c: &SquareComplex, v: usize) -> Vec<LinkViolation> {
    let lk = link(c, v).expect("vertex in range");
    let vertex = c.vertex_name(v).to_string();
    let mut out = Vec::new();
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for &(a, b) in &lk.arcs {
        if a == b {
            out.push(LinkViolation::Loop {
                vertex: vertex.clone(),
                end: c.dir_name(lk.nodes[a]),
            });
        } else {
            *counts.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut multiple: Vec<(usize, usize)> = counts
        .into_iter()
        .filter(|&(_, k)| k > 1)
        .map(|(pair, _)| pair)
        .collect();
    multiple.sort_unstable();
    for (a, b) in multiple {
        out.push(LinkViolation::MultipleArcs {
            vertex: vertex.clone(),
            ends: (c.dir_name(lk.nodes[a]), c.dir_name(lk.nodes[b])),
        });
    }
    if out.is_empty() {
        if let Some(length) = lk.girth().filter(|&g| g < 4) {
            out.push(LinkViolation::ShortCycle { vertex, length });
        }
    }
    out
}

/// Checks every link for loops, parallel arcs and cycles shorter than
/// four. Violations are listed in vertex order.
pub fn check_link_condition(c: &SquareComplex) -> LinkReport {
    let violations = (0..c.vertex_count())
        .into_par_iter()
        .map(|v| violations_at(c, v))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    LinkReport { violations }
}

/// A closed edge path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLoop {
    edges: Vec<DirEdge>,
    locally_geodesic: bool,
}

impl EdgeLoop {
    /// Validates that the edges form a closed path and records whether it
    /// is locally geodesic: at every corner, including the one at the
    /// base, the incoming and outgoing ends are at least two arcs apart
    /// in the link.
    pub fn new(c: &SquareComplex, edges: Vec<DirEdge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Precondition("empty edge loop".into()));
        }
        let k = edges.len();
        for i in 0..k {
            if edges[i].edge() >= c.edge_count() {
                return Err(Error::InvalidComplex("loop uses an unknown edge".into()));
            }
        }
        for i in 0..k {
            if c.dst(edges[i]) != c.src(edges[(i + 1) % k]) {
                return Err(Error::Precondition(format!(
                    "{} is not a closed edge path",
                    c.path_names(&edges)
                )));
            }
        }
        let mut links: HashMap<usize, LinkGraph> = HashMap::new();
        let mut locally_geodesic = true;
        for i in 0..k {
            let (incoming, outgoing) = (edges[i], edges[(i + 1) % k]);
            if outgoing == incoming.reverse() {
                locally_geodesic = false;
                break;
            }
            let v = c.dst(incoming);
            let lk = links.entry(v).or_insert_with(|| link(c, v).expect("vertex in range"));
            let a = lk.node_of(incoming.reverse()).expect("end at vertex");
            let b = lk.node_of(outgoing).expect("end at vertex");
            if lk.distance(a, b).is_some_and(|d| d < 2) {
                locally_geodesic = false;
                break;
            }
        }
        Ok(EdgeLoop {
            edges,
            locally_geodesic,
        })
    }

    /// Whitespace-separated edge names, `a-` for reverses.
    pub fn parse(c: &SquareComplex, text: &str) -> Result<Self> {
        let edges = text
            .split_whitespace()
            .map(|t| {
                c.dir_edge(t)
                    .ok_or_else(|| Error::InvalidComplex(format!("unknown edge `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        EdgeLoop::new(c, edges)
    }

    pub fn edges(&self) -> &[DirEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_locally_geodesic(&self) -> bool {
        self.locally_geodesic
    }
}

/// Spanning tree data behind [`pi1_presentation`], kept so that edge paths
/// can be rewritten as words.
pub struct Pi1 {
    presentation: FinitePresentation,
    parent: Vec<Option<DirEdge>>,
    generator_of: Vec<Option<Generator>>,
}

impl Pi1 {
    /// Breadth-first tree from vertex 0; generators are the edges off the
    /// tree, relators the square boundaries.
    pub fn new(c: &SquareComplex) -> Result<Self> {
        if c.vertex_count() == 0 {
            return Err(Error::InvalidComplex("no vertices".into()));
        }
        let tree = c.bfs_tree(0);
        if tree.iter().any(Option::is_none) {
            return Err(Error::Disconnected);
        }
        let parent: Vec<Option<DirEdge>> = tree.into_iter().map(|p| p.expect("reached")).collect();
        let mut in_tree = vec![false; c.edge_count()];
        for d in parent.iter().flatten() {
            in_tree[d.edge()] = true;
        }
        let mut generators = Vec::new();
        let mut generator_of = vec![None; c.edge_count()];
        for e in 0..c.edge_count() {
            if !in_tree[e] {
                let g = Generator::new(c.edge_name(e))?;
                generator_of[e] = Some(g.clone());
                generators.push(g);
            }
        }
        let mut pi1 = Pi1 {
            presentation: FinitePresentation::free(&[])?,
            parent,
            generator_of,
        };
        let relators: Vec<Word> = c.squares.iter().map(|sq| pi1.path_word(sq)).collect();
        pi1.presentation = FinitePresentation::new(generators, relators)?;
        Ok(pi1)
    }

    pub fn presentation(&self) -> &FinitePresentation {
        &self.presentation
    }

    /// Tree path from vertex 0 to `v`.
    pub fn tree_path(&self, c: &SquareComplex, mut v: usize) -> Vec<DirEdge> {
        let mut path = Vec::new();
        while let Some(d) = self.parent[v] {
            path.push(d);
            v = c.src(d);
        }
        path.reverse();
        path
    }

    /// Word read along a path, tree edges contributing nothing.
    pub fn path_word(&self, path: &[DirEdge]) -> Word {
        Word::from_letters(path.iter().filter_map(|d| {
            self.generator_of[d.edge()].clone().map(|g| {
                if d.is_reversed() {
                    Letter::inverted(g)
                } else {
                    Letter::plain(g)
                }
            })
        }))
    }

    /// The element of a closed path based anywhere, conjugated back to
    /// vertex 0 along the tree.
    pub fn loop_word(&self, c: &SquareComplex, path: &[DirEdge]) -> Word {
        let Some(&first) = path.first() else {
            return Word::identity();
        };
        let to = self.tree_path(c, c.src(first));
        let back: Vec<DirEdge> = to.iter().rev().map(|d| d.reverse()).collect();
        let full: Vec<DirEdge> = to.iter().chain(path).chain(&back).copied().collect();
        self.path_word(&full)
    }
}

pub fn pi1_presentation(c: &SquareComplex) -> Result<FinitePresentation> {
    Ok(Pi1::new(c)?.presentation)
}
