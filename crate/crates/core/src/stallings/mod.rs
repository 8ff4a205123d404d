//! Subgroup graphs over finite base graphs.
//!
//! A subgroup of `π₁(X)` is represented by an immersion `Y → X` of finite
//! graphs. Words are read along base edges by name; an edge of `Y` carries
//! the index of the base edge it maps to. Folding turns any label-preserving
//! map into an immersion, and core trimming removes hanging trees (the
//! basepoint is always kept so membership stays evaluable).
//!
//! Output numbering is canonical: vertices of a folded graph are numbered
//! by the least original vertex they absorbed, edges likewise, and
//! components by their least vertex.

mod fibre;
pub mod format;
mod kernel;
mod malnormal;

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{Generator, Letter, Word};

pub use fibre::{fibre_product, FibreComponent, FibreProduct};
pub use kernel::{u_word, v_word, KernelImage, KernelRewriting};
pub use malnormal::{
    is_malnormal, malnormal_family_check, translate_family_check, ActionElement, FamilyReport,
    MalnormalWitness, PairSummary, RelabelingAction, TranslateReport,
};

/// Base graph `X`. Its edges are named; the names are the letters words
/// are written in, and an edge labels itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGraph {
    vertex_names: Vec<String>,
    edges: Vec<BaseEdge>,
    basepoint: Option<usize>,
    index: HashMap<Generator, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseEdge {
    pub name: Generator,
    pub src: usize,
    pub dst: usize,
}

impl BaseGraph {
    pub fn new(
        vertex_names: Vec<String>,
        edges: Vec<BaseEdge>,
        basepoint: Option<usize>,
    ) -> Result<Self> {
        let n = vertex_names.len();
        let mut index = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if e.src >= n || e.dst >= n {
                return Err(Error::InvalidGraph(format!("edge {} has a bad endpoint", e.name)));
            }
            if index.insert(e.name.clone(), i).is_some() {
                return Err(Error::DuplicateGenerator(e.name.to_string()));
            }
        }
        if basepoint.is_some_and(|b| b >= n) {
            return Err(Error::InvalidGraph("basepoint out of range".into()));
        }
        Ok(BaseGraph {
            vertex_names,
            edges,
            basepoint,
            index,
        })
    }

    /// One vertex `v` (the basepoint) with a loop per name.
    pub fn rose(names: &[Generator]) -> Result<Self> {
        let edges = names
            .iter()
            .map(|g| BaseEdge {
                name: g.clone(),
                src: 0,
                dst: 0,
            })
            .collect();
        BaseGraph::new(vec!["v".into()], edges, Some(0))
    }

    pub fn rose_from_names(names: &[&str]) -> Result<Self> {
        let gens = names
            .iter()
            .map(|n| Generator::new(n))
            .collect::<Result<Vec<_>>>()?;
        BaseGraph::rose(&gens)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[BaseEdge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &BaseEdge {
        &self.edges[i]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_index(&self, name: &Generator) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    pub fn is_rose(&self) -> bool {
        self.vertex_names.len() == 1
    }

    /// Converts a word to a sequence of `(edge, inverse)` steps.
    pub fn steps(&self, w: &Word) -> Result<Vec<(usize, bool)>> {
        w.letters()
            .iter()
            .map(|l| {
                self.edge_index(&l.generator)
                    .map(|e| (e, l.inverse))
                    .ok_or_else(|| Error::AlphabetMismatch(l.generator.to_string()))
            })
            .collect()
    }

    /// Reads `(edge, inverse)` steps back as a word.
    pub fn word_of(&self, steps: &[(usize, bool)]) -> Word {
        Word::from_letters(steps.iter().map(|&(e, inv)| Letter {
            generator: self.edges[e].name.clone(),
            inverse: inv,
        }))
    }
}

/// Edge of a labeled graph; `label` indexes an edge of the base graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LabeledGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    basepoint: Option<usize>,
}

impl LabeledGraph {
    pub fn new(vertex_count: usize, edges: Vec<Edge>, basepoint: Option<usize>) -> Result<Self> {
        if edges.iter().any(|e| e.src >= vertex_count || e.dst >= vertex_count) {
            return Err(Error::InvalidGraph("edge endpoint out of range".into()));
        }
        if basepoint.is_some_and(|b| b >= vertex_count) {
            return Err(Error::InvalidGraph("basepoint out of range".into()));
        }
        Ok(LabeledGraph {
            vertex_count,
            edges,
            basepoint,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    /// Component index of every vertex, components numbered by least vertex.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut uf = UnionFind::new(self.vertex_count);
        for e in &self.edges {
            uf.union(e.src, e.dst);
        }
        let mut number = vec![usize::MAX; self.vertex_count];
        let mut comp = vec![0; self.vertex_count];
        let mut count = 0;
        for v in 0..self.vertex_count {
            let r = uf.find(v);
            if number[r] == usize::MAX {
                number[r] = count;
                count += 1;
            }
            comp[v] = number[r];
        }
        (count, comp)
    }

    pub fn adjacency(&self) -> Adjacency {
        let mut out = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.src].push(Step {
                label: e.label,
                forward: true,
                target: e.dst,
                edge: i,
            });
            out[e.dst].push(Step {
                label: e.label,
                forward: false,
                target: e.src,
                edge: i,
            });
        }
        Adjacency { out }
    }
}

/// Per-component size and rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentRank {
    pub vertices: usize,
    pub edges: usize,
    pub rank: i64,
}

/// `E − V + 1` for each connected component, in component order.
pub fn rank(graph: &LabeledGraph) -> Vec<ComponentRank> {
    let (count, comp) = graph.components();
    let mut out = vec![
        ComponentRank {
            vertices: 0,
            edges: 0,
            rank: 0
        };
        count
    ];
    for &c in &comp {
        out[c].vertices += 1;
    }
    for e in graph.edges() {
        out[comp[e.src]].edges += 1;
    }
    for c in &mut out {
        c.rank = c.edges as i64 - c.vertices as i64 + 1;
    }
    out
}

/// One traversal option out of a vertex.
#[derive(Clone, Copy, Debug)]
pub struct Step {
    pub label: usize,
    pub forward: bool,
    pub target: usize,
    pub edge: usize,
}

#[derive(Clone, Debug)]
pub struct Adjacency {
    out: Vec<Vec<Step>>,
}

impl Adjacency {
    pub fn steps(&self, v: usize) -> &[Step] {
        &self.out[v]
    }

    pub fn follow(&self, v: usize, label: usize, forward: bool) -> Option<usize> {
        self.out[v]
            .iter()
            .find(|s| s.label == label && s.forward == forward)
            .map(|s| s.target)
    }

    /// Breadth-first tree from `root`: for each reached vertex, the path of
    /// `(label, inverse)` steps from the root. Edges are tried in id order.
    pub fn tree_paths(&self, root: usize) -> Vec<Option<Vec<(usize, bool)>>> {
        let mut paths: Vec<Option<Vec<(usize, bool)>>> = vec![None; self.out.len()];
        paths[root] = Some(Vec::new());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let mut steps: Vec<Step> = self.out[v].clone();
            steps.sort_by_key(|s| (s.edge, !s.forward));
            for s in steps {
                if paths[s.target].is_none() {
                    let mut p = paths[v].clone().unwrap_or_default();
                    p.push((s.label, !s.forward));
                    paths[s.target] = Some(p);
                    queue.push_back(s.target);
                }
            }
        }
        paths
    }
}

/// A label-preserving map from a labeled graph to a base graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMap {
    domain: LabeledGraph,
    base: Arc<BaseGraph>,
    vertex_map: Vec<usize>,
}

impl GraphMap {
    pub fn new(domain: LabeledGraph, base: Arc<BaseGraph>, vertex_map: Vec<usize>) -> Result<Self> {
        if vertex_map.len() != domain.vertex_count() {
            return Err(Error::LengthMismatch {
                expected: domain.vertex_count(),
                found: vertex_map.len(),
            });
        }
        if vertex_map.iter().any(|&v| v >= base.vertex_count()) {
            return Err(Error::InvalidGraph("vertex map leaves the base".into()));
        }
        for e in domain.edges() {
            if e.label >= base.edge_count() {
                return Err(Error::InvalidGraph(format!("label {} not in base", e.label)));
            }
            let b = base.edge(e.label);
            if vertex_map[e.src] != b.src || vertex_map[e.dst] != b.dst {
                return Err(Error::InvalidGraph(format!(
                    "edge labelled {} does not cover its base edge",
                    b.name
                )));
            }
        }
        if let (Some(d), Some(b)) = (domain.basepoint(), base.basepoint()) {
            if vertex_map[d] != b {
                return Err(Error::InvalidGraph("basepoints do not correspond".into()));
            }
        }
        Ok(GraphMap {
            domain,
            base,
            vertex_map,
        })
    }

    pub fn domain(&self) -> &LabeledGraph {
        &self.domain
    }

    pub fn base(&self) -> &Arc<BaseGraph> {
        &self.base
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    /// First pair of edges violating the immersion condition.
    pub fn immersion_violation(&self) -> Option<(usize, usize)> {
        let mut seen: HashMap<(usize, usize, bool), usize> = HashMap::new();
        for (i, e) in self.domain.edges().iter().enumerate() {
            for key in [(e.src, e.label, true), (e.dst, e.label, false)] {
                if let Some(&j) = seen.get(&key) {
                    return Some((j, i));
                }
                seen.insert(key, i);
            }
        }
        None
    }
}

/// A graph map satisfying the immersion condition: no two edges with the
/// same label leave, or enter, a common vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphImmersion {
    map: GraphMap,
}

impl GraphImmersion {
    pub fn new(map: GraphMap) -> Result<Self> {
        match map.immersion_violation() {
            Some((a, b)) => Err(Error::InvalidGraph(format!(
                "edges {a} and {b} share a label at a common vertex"
            ))),
            None => Ok(GraphImmersion { map }),
        }
    }

    pub fn domain(&self) -> &LabeledGraph {
        &self.map.domain
    }

    pub fn base(&self) -> &Arc<BaseGraph> {
        &self.map.base
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.map.vertex_map
    }

    pub fn as_map(&self) -> &GraphMap {
        &self.map
    }

    pub fn rank(&self) -> Vec<ComponentRank> {
        rank(self.domain())
    }

    /// Rank of the component through the basepoint.
    pub fn basepoint_rank(&self) -> Option<i64> {
        let b = self.domain().basepoint()?;
        let (_, comp) = self.domain().components();
        Some(self.rank()[comp[b]].rank)
    }

    /// Words read along tree paths from the basepoint to each vertex.
    pub fn vertex_words(&self) -> Result<Vec<Option<Word>>> {
        let b = self.domain().basepoint().ok_or(Error::MissingBasepoint)?;
        Ok(self
            .domain()
            .adjacency()
            .tree_paths(b)
            .into_iter()
            .map(|p| p.map(|p| self.base().word_of(&p)))
            .collect())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Joins two classes; the smaller root survives. Returns `(root, absorbed)`.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[gone] = keep;
        Some((keep, gone))
    }
}

/// Number of identifications made by [`fold`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FoldStats {
    pub folds: usize,
}

/// Folds a label-preserving map into an immersion.
pub fn fold(map: &GraphMap) -> GraphImmersion {
    fold_with_stats(map).0
}

pub fn fold_with_stats(map: &GraphMap) -> (GraphImmersion, FoldStats) {
    let g = map.domain();
    let n = g.vertex_count();
    let edges = g.edges();
    let mut uf = UnionFind::new(n);
    let mut alive = vec![true; edges.len()];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        incident[e.src].push(i);
        if e.dst != e.src {
            incident[e.dst].push(i);
        }
    }
    let mut stack: Vec<usize> = (0..n).rev().collect();
    let mut stats = FoldStats::default();
    let mut seen: HashMap<(usize, bool), usize> = HashMap::new();
    'outer: while let Some(v) = stack.pop() {
        if uf.find(v) != v {
            continue;
        }
        seen.clear();
        incident[v].retain(|&e| alive[e]);
        incident[v].sort_unstable();
        incident[v].dedup();
        let list = incident[v].clone();
        for e in list {
            let (s, d) = (uf.find(edges[e].src), uf.find(edges[e].dst));
            for (forward, here, there) in [(true, s, d), (false, d, s)] {
                if here != v {
                    continue;
                }
                let key = (edges[e].label, forward);
                match seen.get(&key) {
                    None => {
                        seen.insert(key, e);
                    }
                    Some(&other) => {
                        let (keep, drop) = (other.min(e), other.max(e));
                        let other_end = if forward {
                            uf.find(edges[other].dst)
                        } else {
                            uf.find(edges[other].src)
                        };
                        alive[drop] = false;
                        stats.folds += 1;
                        let _ = keep;
                        if let Some((root, gone)) = uf.union(there, other_end) {
                            let moved = std::mem::take(&mut incident[gone]);
                            incident[root].extend(moved);
                            stack.push(root);
                        }
                        stack.push(v);
                        continue 'outer;
                    }
                }
            }
        }
    }
    // canonical renumbering
    let mut new_id = vec![usize::MAX; n];
    let mut count = 0;
    for v in 0..n {
        if uf.find(v) == v {
            new_id[v] = count;
            count += 1;
        }
    }
    let mut vertex_map = vec![0; count];
    for v in 0..n {
        if uf.find(v) == v {
            vertex_map[new_id[v]] = map.vertex_map()[v];
        }
    }
    let mut out_edges = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        if alive[i] {
            out_edges.push(Edge {
                src: new_id[uf.find(e.src)],
                dst: new_id[uf.find(e.dst)],
                label: e.label,
            });
        }
    }
    let basepoint = g.basepoint().map(|b| new_id[uf.find(b)]);
    let domain = LabeledGraph {
        vertex_count: count,
        edges: out_edges,
        basepoint,
    };
    let imm = GraphImmersion {
        map: GraphMap {
            domain,
            base: map.base().clone(),
            vertex_map,
        },
    };
    debug_assert!(imm.as_map().immersion_violation().is_none());
    (imm, stats)
}

/// Removes hanging trees. The basepoint (if any) is never removed.
pub fn core(imm: &GraphImmersion) -> GraphImmersion {
    let g = imm.domain();
    let n = g.vertex_count();
    let mut degree = vec![0usize; n];
    for e in g.edges() {
        degree[e.src] += 1;
        degree[e.dst] += 1;
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in g.edges().iter().enumerate() {
        incident[e.src].push(i);
        if e.dst != e.src {
            incident[e.dst].push(i);
        }
    }
    let mut vertex_alive = vec![true; n];
    let mut edge_alive = vec![true; g.edge_count()];
    let keep = g.basepoint();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| degree[v] <= 1 && Some(v) != keep).collect();
    while let Some(v) = queue.pop_front() {
        if !vertex_alive[v] || degree[v] > 1 || Some(v) == keep {
            continue;
        }
        vertex_alive[v] = false;
        for &e in &incident[v] {
            if edge_alive[e] {
                edge_alive[e] = false;
                let ed = g.edges()[e];
                let other = if ed.src == v { ed.dst } else { ed.src };
                degree[v] -= 1;
                degree[other] -= 1;
                if degree[other] <= 1 && Some(other) != keep && vertex_alive[other] {
                    queue.push_back(other);
                }
            }
        }
    }
    let mut new_id = vec![usize::MAX; n];
    let mut vertex_map = Vec::new();
    for v in 0..n {
        if vertex_alive[v] {
            new_id[v] = vertex_map.len();
            vertex_map.push(imm.vertex_map()[v]);
        }
    }
    let edges = g
        .edges()
        .iter()
        .zip(&edge_alive)
        .filter(|(_, &a)| a)
        .map(|(e, _)| Edge {
            src: new_id[e.src],
            dst: new_id[e.dst],
            label: e.label,
        })
        .collect();
    GraphImmersion {
        map: GraphMap {
            domain: LabeledGraph {
                vertex_count: vertex_map.len(),
                edges,
                basepoint: keep.map(|b| new_id[b]),
            },
            base: imm.base().clone(),
            vertex_map,
        },
    }
}

/// Wedge of subdivided circles reading the generators, before folding.
pub fn wedge_of_words(base: &Arc<BaseGraph>, generators: &[Word]) -> Result<GraphMap> {
    let root = base.basepoint().ok_or(Error::MissingBasepoint)?;
    let mut vertex_map = vec![root];
    let mut edges = Vec::new();
    for w in generators {
        let steps = base.steps(w)?;
        let mut at_base = root;
        let mut at_domain = 0;
        for (k, &(e, inv)) in steps.iter().enumerate() {
            let be = base.edge(e);
            let (from, to) = if inv { (be.dst, be.src) } else { (be.src, be.dst) };
            if from != at_base {
                return Err(Error::NotALoop(w.to_string()));
            }
            let next_domain = if k + 1 == steps.len() {
                if to != root {
                    return Err(Error::NotALoop(w.to_string()));
                }
                0
            } else {
                vertex_map.push(to);
                vertex_map.len() - 1
            };
            let (src, dst) = if inv {
                (next_domain, at_domain)
            } else {
                (at_domain, next_domain)
            };
            edges.push(Edge { src, dst, label: e });
            at_base = to;
            at_domain = next_domain;
        }
    }
    let domain = LabeledGraph::new(vertex_map.len(), edges, Some(0))?;
    GraphMap::new(domain, base.clone(), vertex_map)
}

/// Core immersion of the subgroup generated by `generators`.
pub fn graph_of_subgroup(base: &Arc<BaseGraph>, generators: &[Word]) -> Result<GraphImmersion> {
    Ok(core(&fold(&wedge_of_words(base, generators)?)))
}

/// Whether `word` reads a closed loop at the domain basepoint.
pub fn membership(imm: &GraphImmersion, word: &Word) -> Result<bool> {
    let base = imm.base();
    base.basepoint().ok_or(Error::MissingBasepoint)?;
    let start = imm.domain().basepoint().ok_or(Error::MissingBasepoint)?;
    let steps = base.steps(word)?;
    let adj = imm.domain().adjacency();
    let mut v = start;
    for (e, inv) in steps {
        match adj.follow(v, e, !inv) {
            Some(t) => v = t,
            None => return Ok(false),
        }
    }
    Ok(v == start)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn rose(names: &[&str]) -> Arc<BaseGraph> {
        Arc::new(BaseGraph::rose_from_names(names).unwrap())
    }

    #[test]
    fn cyclic_subgroup_is_one_loop() {
        let x = rose(&["a", "b"]);
        let y = graph_of_subgroup(&x, &[w("a")]).unwrap();
        assert_eq!(y.domain().vertex_count(), 1);
        assert_eq!(y.domain().edge_count(), 1);
        assert_eq!(y.basepoint_rank(), Some(1));
    }

    #[test]
    fn full_rose() {
        let x = rose(&["a", "b"]);
        let y = graph_of_subgroup(&x, &[w("a"), w("b")]).unwrap();
        assert_eq!(y.domain().vertex_count(), 1);
        assert_eq!(y.basepoint_rank(), Some(2));
    }

    #[test]
    fn fold_fixed_point_and_single_fold() {
        let x = rose(&["a", "b"]);
        let y = graph_of_subgroup(&x, &[w("a b a^-1")]).unwrap();
        let again = fold(y.as_map());
        assert_eq!(again, y);

        let two_loops = LabeledGraph::new(
            1,
            vec![
                Edge { src: 0, dst: 0, label: 0 },
                Edge { src: 0, dst: 0, label: 0 },
            ],
            Some(0),
        )
        .unwrap();
        let m = GraphMap::new(two_loops, x.clone(), vec![0]).unwrap();
        let (f, stats) = fold_with_stats(&m);
        assert_eq!(f.domain().edge_count(), 1);
        assert_eq!(stats.folds, 1);
    }

    #[test]
    fn tripod_from_shared_prefix() {
        // paths a b and a c from the basepoint share their first edge
        let x = rose(&["a", "b", "c"]);
        let path = LabeledGraph::new(
            5,
            vec![
                Edge { src: 0, dst: 1, label: 0 },
                Edge { src: 1, dst: 2, label: 1 },
                Edge { src: 0, dst: 3, label: 0 },
                Edge { src: 3, dst: 4, label: 2 },
            ],
            Some(0),
        )
        .unwrap();
        let m = GraphMap::new(path, x, vec![0; 5]).unwrap();
        let f = fold(&m);
        assert_eq!(f.domain().edge_count(), 3);
        assert_eq!(f.domain().vertex_count(), 4);
        assert_eq!(rank(f.domain())[0].rank, 0);
        assert_eq!(core(&f).domain().vertex_count(), 1);
    }

    #[test]
    fn rank_examples() {
        let single = LabeledGraph::new(1, vec![], None).unwrap();
        assert_eq!(rank(&single)[0].rank, 0);
        let petals: Vec<_> = (0..5).map(|i| Edge { src: 0, dst: 0, label: i }).collect();
        let flower = LabeledGraph::new(1, petals, None).unwrap();
        assert_eq!(rank(&flower)[0].rank, 5);
    }

    #[test]
    fn membership_examples() {
        let x = rose(&["a", "b"]);
        let ya = graph_of_subgroup(&x, &[w("a")]).unwrap();
        assert!(membership(&ya, &w("a^3")).unwrap());
        assert!(!membership(&ya, &w("b")).unwrap());
        let y = graph_of_subgroup(&x, &[w("a b"), w("b a")]).unwrap();
        assert!(membership(&y, &w("a b a b")).unwrap());
        assert!(!membership(&y, &w("a")).unwrap());
        assert!(membership(&y, &Word::identity()).unwrap());
    }

    #[test]
    fn non_loop_is_rejected() {
        let base = Arc::new(
            BaseGraph::new(
                vec!["p".into(), "q".into()],
                vec![
                    BaseEdge { name: Generator::new("s").unwrap(), src: 0, dst: 1 },
                    BaseEdge { name: Generator::new("t").unwrap(), src: 1, dst: 0 },
                ],
                Some(0),
            )
            .unwrap(),
        );
        assert!(matches!(graph_of_subgroup(&base, &[w("s")]), Err(Error::NotALoop(_))));
        assert!(matches!(graph_of_subgroup(&base, &[w("t")]), Err(Error::NotALoop(_))));
        let y = graph_of_subgroup(&base, &[w("s t")]).unwrap();
        assert_eq!(y.basepoint_rank(), Some(1));
        assert_eq!(y.domain().vertex_count(), 2);
    }

    #[test]
    fn core_keeps_degree_one_basepoint() {
        let x = rose(&["a", "b"]);
        let y = graph_of_subgroup(&x, &[w("b a b^-1")]).unwrap();
        assert_eq!(y.domain().basepoint(), Some(0));
        assert_eq!(y.domain().vertex_count(), 2);
        assert_eq!(y.domain().edge_count(), 2);
    }

    #[test]
    fn missing_basepoint_is_a_configuration_error() {
        let base = Arc::new(
            BaseGraph::new(
                vec!["v".into()],
                vec![BaseEdge { name: Generator::new("a").unwrap(), src: 0, dst: 0 }],
                None,
            )
            .unwrap(),
        );
        let domain = LabeledGraph::new(1, vec![Edge { src: 0, dst: 0, label: 0 }], Some(0)).unwrap();
        let imm = GraphImmersion::new(GraphMap::new(domain, base, vec![0]).unwrap()).unwrap();
        assert_eq!(membership(&imm, &w("a")), Err(Error::MissingBasepoint));
    }
}
