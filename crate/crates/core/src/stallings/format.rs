//! Line-based text format for base graphs and graph maps.
//!
//! ```text
//! base
//! vertex v
//! edge a v v
//! basepoint v
//! ```
//!
//! ```text
//! graph
//! base rose.base
//! vertex 0
//! vertex 1
//! edge 0 0 1 a
//! edge 1 1 0 b
//! basepoint 0
//! vmap 0 v
//! vmap 1 v
//! ```
//!
//! Blank lines and `#` comments are ignored. `vmap` lines may be omitted
//! when the base has a single vertex.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{BaseEdge, BaseGraph, Edge, GraphImmersion, GraphMap, LabeledGraph};
use crate::error::{Error, Result};
use crate::words::Generator;

pub(crate) fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

pub(crate) struct Line<'a> {
    pub number: usize,
    pub fields: Vec<(usize, &'a str)>,
}

pub(crate) fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let mut fields = Vec::new();
        let mut start = None;
        for (pos, ch) in content.char_indices() {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    fields.push((s + 1, &content[s..pos]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            fields.push((s + 1, &content[s..]));
        }
        (!fields.is_empty()).then_some(Line {
            number: i + 1,
            fields,
        })
    })
}

pub(crate) fn expect_arity(l: &Line, n: &[usize]) -> Result<()> {
    if n.contains(&l.fields.len()) {
        Ok(())
    } else {
        Err(err(
            l.number,
            l.fields[0].0,
            format!("`{}` takes {} fields", l.fields[0].1, n[0] - 1),
        ))
    }
}

fn header<'a>(it: &mut impl Iterator<Item = Line<'a>>, want: &str) -> Result<()> {
    match it.next() {
        Some(l) if l.fields[0].1 == want && l.fields.len() == 1 => Ok(()),
        Some(l) => Err(err(l.number, l.fields[0].0, format!("expected `{want}` header"))),
        None => Err(err(1, 1, format!("expected `{want}` header"))),
    }
}

pub fn parse_base(text: &str) -> Result<BaseGraph> {
    let mut it = lines(text);
    header(&mut it, "base")?;
    let mut vertices: Vec<String> = Vec::new();
    let mut vindex: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut basepoint = None;
    for l in it {
        let resolve = |col: usize, name: &str, vindex: &HashMap<String, usize>| {
            vindex
                .get(name)
                .copied()
                .ok_or_else(|| err(l.number, col, format!("unknown vertex `{name}`")))
        };
        match l.fields[0].1 {
            "vertex" => {
                expect_arity(&l, &[2])?;
                let (col, name) = l.fields[1];
                if vindex.insert(name.to_string(), vertices.len()).is_some() {
                    return Err(err(l.number, col, format!("duplicate vertex `{name}`")));
                }
                vertices.push(name.to_string());
            }
            "edge" => {
                expect_arity(&l, &[4])?;
                let (col, name) = l.fields[1];
                let g = Generator::new(name).map_err(|e| err(l.number, col, e.to_string()))?;
                let src = resolve(l.fields[2].0, l.fields[2].1, &vindex)?;
                let dst = resolve(l.fields[3].0, l.fields[3].1, &vindex)?;
                edges.push(BaseEdge { name: g, src, dst });
            }
            "basepoint" => {
                expect_arity(&l, &[2])?;
                basepoint = Some(resolve(l.fields[1].0, l.fields[1].1, &vindex)?);
            }
            other => {
                return Err(err(l.number, l.fields[0].0, format!("unknown directive `{other}`")))
            }
        }
    }
    BaseGraph::new(vertices, edges, basepoint)
}

/// A graph file before it is attached to its base.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphFile {
    /// Path given on the `base` line, if any.
    pub base_ref: Option<String>,
    vertices: Vec<String>,
    edges: Vec<(usize, String, usize, usize, String)>,
    basepoint: Option<usize>,
    vmap: Vec<(usize, usize, String)>,
    emap: Vec<(usize, usize, String)>,
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut it = lines(text);
    header(&mut it, "graph")?;
    let mut f = GraphFile::default();
    let mut vindex: HashMap<String, usize> = HashMap::new();
    let mut eindex: HashMap<String, usize> = HashMap::new();
    for l in it {
        let resolve = |k: usize, vindex: &HashMap<String, usize>| {
            let (col, name) = l.fields[k];
            vindex
                .get(name)
                .copied()
                .ok_or_else(|| err(l.number, col, format!("unknown vertex `{name}`")))
        };
        match l.fields[0].1 {
            "base" => {
                expect_arity(&l, &[2])?;
                f.base_ref = Some(l.fields[1].1.to_string());
            }
            "vertex" => {
                expect_arity(&l, &[2])?;
                let (col, name) = l.fields[1];
                if vindex.insert(name.to_string(), f.vertices.len()).is_some() {
                    return Err(err(l.number, col, format!("duplicate vertex `{name}`")));
                }
                f.vertices.push(name.to_string());
            }
            "edge" => {
                expect_arity(&l, &[5])?;
                let (col, name) = l.fields[1];
                if eindex.insert(name.to_string(), f.edges.len()).is_some() {
                    return Err(err(l.number, col, format!("duplicate edge `{name}`")));
                }
                let src = resolve(2, &vindex)?;
                let dst = resolve(3, &vindex)?;
                f.edges
                    .push((l.number, name.to_string(), src, dst, l.fields[4].1.to_string()));
            }
            "basepoint" => {
                expect_arity(&l, &[2])?;
                f.basepoint = Some(resolve(1, &vindex)?);
            }
            "vmap" => {
                expect_arity(&l, &[3])?;
                let v = resolve(1, &vindex)?;
                f.vmap.push((l.number, v, l.fields[2].1.to_string()));
            }
            "emap" => {
                expect_arity(&l, &[3])?;
                let (col, name) = l.fields[1];
                let e = *eindex
                    .get(name)
                    .ok_or_else(|| err(l.number, col, format!("unknown edge `{name}`")))?;
                f.emap.push((l.number, e, l.fields[2].1.to_string()));
            }
            other => {
                return Err(err(l.number, l.fields[0].0, format!("unknown directive `{other}`")))
            }
        }
    }
    Ok(f)
}

impl GraphFile {
    /// Attaches the graph to `base`, checking labels and vertex images.
    pub fn bind(&self, base: Arc<BaseGraph>) -> Result<GraphMap> {
        let label_of = |line: usize, name: &str| -> Result<usize> {
            let g = Generator::new(name).map_err(|e| err(line, 1, e.to_string()))?;
            base.edge_index(&g)
                .ok_or_else(|| err(line, 1, format!("label `{name}` is not a base edge")))
        };
        let mut edges = Vec::new();
        for (line, _, src, dst, label) in &self.edges {
            edges.push(Edge {
                src: *src,
                dst: *dst,
                label: label_of(*line, label)?,
            });
        }
        for (line, e, label) in &self.emap {
            if label_of(*line, label)? != edges[*e].label {
                return Err(err(*line, 1, "emap disagrees with the edge label"));
            }
        }
        let mut vertex_map = vec![None; self.vertices.len()];
        for (line, v, target) in &self.vmap {
            let t = base
                .vertex_index(target)
                .ok_or_else(|| err(*line, 1, format!("unknown base vertex `{target}`")))?;
            vertex_map[*v] = Some(t);
        }
        // unmapped vertices: single-vertex base, or forced by an edge
        let mut vm = Vec::with_capacity(vertex_map.len());
        for (v, m) in vertex_map.iter().enumerate() {
            let forced = m.or_else(|| {
                edges.iter().find_map(|e| {
                    if e.src == v {
                        Some(base.edge(e.label).src)
                    } else if e.dst == v {
                        Some(base.edge(e.label).dst)
                    } else {
                        None
                    }
                })
            });
            match forced.or(if base.is_rose() { Some(0) } else { None }) {
                Some(t) => vm.push(t),
                None => {
                    return Err(Error::InvalidGraph(format!(
                        "vertex `{}` has no image",
                        self.vertices[v]
                    )))
                }
            }
        }
        let domain = LabeledGraph::new(self.vertices.len(), edges, self.basepoint)?;
        GraphMap::new(domain, base, vm)
    }
}

pub fn write_base(base: &BaseGraph) -> String {
    let mut s = String::from("base\n");
    for v in 0..base.vertex_count() {
        let _ = writeln!(s, "vertex {}", base.vertex_name(v));
    }
    for e in base.edges() {
        let _ = writeln!(
            s,
            "edge {} {} {}",
            e.name,
            base.vertex_name(e.src),
            base.vertex_name(e.dst)
        );
    }
    if let Some(b) = base.basepoint() {
        let _ = writeln!(s, "basepoint {}", base.vertex_name(b));
    }
    s
}

pub fn write_graph(y: &GraphImmersion, base_ref: Option<&str>) -> String {
    let mut s = String::from("graph\n");
    if let Some(r) = base_ref {
        let _ = writeln!(s, "base {r}");
    }
    let g = y.domain();
    for v in 0..g.vertex_count() {
        let _ = writeln!(s, "vertex {v}");
    }
    for (i, e) in g.edges().iter().enumerate() {
        let _ = writeln!(s, "edge {i} {} {} {}", e.src, e.dst, y.base().edge(e.label).name);
    }
    if let Some(b) = g.basepoint() {
        let _ = writeln!(s, "basepoint {b}");
    }
    for (v, &t) in y.vertex_map().iter().enumerate() {
        let _ = writeln!(s, "vmap {v} {}", y.base().vertex_name(t));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stallings::{fold, graph_of_subgroup};
    use crate::words::Word;

    #[test]
    fn round_trip() {
        let base = Arc::new(BaseGraph::rose_from_names(&["a", "b"]).unwrap());
        assert_eq!(parse_base(&write_base(&base)).unwrap(), *base);
        let y = graph_of_subgroup(&base, &[Word::parse("a b a^-1").unwrap()]).unwrap();
        let text = write_graph(&y, Some("x.base"));
        let f = parse_graph(&text).unwrap();
        assert_eq!(f.base_ref.as_deref(), Some("x.base"));
        let m = f.bind(base).unwrap();
        assert_eq!(fold(&m), y);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_graph("graph\nvertex 0\nedge 0 0 9 a\n").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 3,
                column: 10,
                message: "unknown vertex `9`".into()
            }
        );
        assert!(matches!(parse_base("graph\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn unknown_label() {
        let base = Arc::new(BaseGraph::rose_from_names(&["a"]).unwrap());
        let f = parse_graph("graph\nvertex 0\nedge 0 0 0 z\n").unwrap();
        assert!(matches!(f.bind(base), Err(Error::Parse { line: 3, .. })));
    }
}
