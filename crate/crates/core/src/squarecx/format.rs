//! Line-based text format for square complexes.
//!
//! ```text
//! vertex v
//! edge a v v
//! edge b v v
//! square a b a- b-
//! ```
//!
//! `a-` is the reverse of edge `a`. Blank lines and `#` comments are
//! ignored.

use std::fmt::Write as _;

use super::SquareComplex;
use crate::error::{Error, Result};
use crate::stallings::format::{err, expect_arity, lines};

fn located(line: usize, column: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => err(line, column, other.to_string()),
    }
}

pub fn parse_complex(text: &str) -> Result<SquareComplex> {
    let mut c = SquareComplex::new();
    for l in lines(text) {
        let (col, keyword) = l.fields[0];
        match keyword {
            "vertex" => {
                expect_arity(&l, &[2])?;
                let (col, name) = l.fields[1];
                c.add_vertex(name).map_err(|e| located(l.number, col, e))?;
            }
            "edge" => {
                expect_arity(&l, &[4])?;
                let (col, name) = l.fields[1];
                let mut ends = [0; 2];
                for (slot, &(vc, v)) in ends.iter_mut().zip(&l.fields[2..4]) {
                    *slot = c
                        .vertex(v)
                        .ok_or_else(|| err(l.number, vc, format!("unknown vertex `{v}`")))?;
                }
                c.add_edge(name, ends[0], ends[1])
                    .map_err(|e| located(l.number, col, e))?;
            }
            "square" => {
                expect_arity(&l, &[5])?;
                let mut boundary = Vec::with_capacity(4);
                for &(ec, token) in &l.fields[1..] {
                    boundary.push(
                        c.dir_edge(token)
                            .ok_or_else(|| err(l.number, ec, format!("unknown edge `{token}`")))?,
                    );
                }
                let boundary = [boundary[0], boundary[1], boundary[2], boundary[3]];
                c.add_square(boundary).map_err(|e| located(l.number, col, e))?;
            }
            other => return Err(err(l.number, col, format!("unknown keyword `{other}`"))),
        }
    }
    Ok(c)
}

pub fn write_complex(c: &SquareComplex) -> String {
    let mut out = String::new();
    for v in 0..c.vertex_count() {
        writeln!(out, "vertex {}", c.vertex_name(v)).expect("write to string");
    }
    for e in 0..c.edge_count() {
        let r = &c.edges[e];
        writeln!(
            out,
            "edge {} {} {}",
            r.name,
            c.vertex_name(r.src),
            c.vertex_name(r.dst)
        )
        .expect("write to string");
    }
    for sq in c.squares() {
        writeln!(out, "square {}", c.path_names(sq)).expect("write to string");
    }
    out
}
