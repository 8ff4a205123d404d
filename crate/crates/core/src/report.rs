//! Run reports: a fixed status vocabulary and a line-oriented rendering
//! with a stable field order.
//!
//! ```text
//! command: probe
//! input presentation: sha256:…
//! input word: sha256:…
//! status: inconclusive
//! generators: 30
//! …
//! elapsed_ms: 15012
//! ```
//!
//! A search that finds nothing only ever reports `inconclusive`.

use std::fmt;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use crate::encoder::{encode, SelectionBudget};
use crate::error::Result;
use crate::presentations::FinitePresentation;
use crate::quotients::{has_nontrivial_quotient_upto, SearchBudget, SearchReport, SearchStatus};
use crate::words::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Certified,
    Refuted,
    Witness,
    Inconclusive,
    Error,
}

impl Status {
    /// `0` for certified or witness, `2` for inconclusive, `1` otherwise.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Certified | Status::Witness => 0,
            Status::Inconclusive => 2,
            Status::Refuted | Status::Error => 1,
        }
    }
}

impl From<SearchStatus> for Status {
    fn from(s: SearchStatus) -> Self {
        match s {
            SearchStatus::Witness => Status::Witness,
            SearchStatus::Inconclusive => Status::Inconclusive,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Certified => "certified",
            Status::Refuted => "refuted",
            Status::Witness => "witness",
            Status::Inconclusive => "inconclusive",
            Status::Error => "error",
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub command: String,
    /// `(label, sha256 of the input text)`.
    pub inputs: Vec<(String, String)>,
    pub status: Status,
    /// Command-specific lines, rendered in insertion order.
    pub details: Vec<(String, String)>,
    pub artifacts: Vec<String>,
    pub elapsed: Duration,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Vec::new(),
            status: Status::Error,
            details: Vec::new(),
            artifacts: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn input(&mut self, label: &str, text: &str) -> &mut Self {
        self.inputs
            .push((label.to_string(), sha256_hex(text.as_bytes())));
        self
    }

    pub fn detail(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.details.push((key.to_string(), value.to_string()));
        self
    }

    pub fn artifact(&mut self, path: &str) -> &mut Self {
        self.artifacts.push(path.to_string());
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "command: {}", self.command)?;
        for (label, digest) in &self.inputs {
            writeln!(f, "input {label}: sha256:{digest}")?;
        }
        writeln!(f, "status: {}", self.status)?;
        for (key, value) in &self.details {
            writeln!(f, "{key}: {value}")?;
        }
        for path in &self.artifacts {
            writeln!(f, "artifact: {path}")?;
        }
        writeln!(f, "elapsed_ms: {}", self.elapsed.as_millis())
    }
}

fn probe(
    p: &FinitePresentation,
    w: &Word,
    modulus: u32,
    selection: &SelectionBudget,
    search: &SearchBudget,
    report: &mut RunReport,
) -> Result<SearchReport> {
    let trace = encode(p, w, modulus, selection)?;
    let pw = trace.final_presentation()?;
    report
        .detail("modulus", modulus)
        .detail("encoded generators", pw.generator_count())
        .detail("encoded relators", pw.relator_count())
        .detail("encoded abelianization", &trace.final_stage().abelianization)
        .detail("trace digest", trace.digest());
    has_nontrivial_quotient_upto(&pw, search)
}

/// Encodes `(p, w)` and searches the result for a nontrivial quotient in
/// the symmetric groups of degree up to the budget's. The status is
/// `witness` if one turns up and `inconclusive` otherwise; errors are
/// reported with status `error`.
pub fn run_encode_and_probe(
    p: &FinitePresentation,
    w: &Word,
    modulus: u32,
    selection: &SelectionBudget,
    search: &SearchBudget,
) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport::new("probe");
    report
        .input("presentation", &p.to_text())
        .input("word", &w.to_string());
    match probe(p, w, modulus, selection, search, &mut report) {
        Ok(found) => {
            report.status = found.status().into();
            report
                .detail("max degree", found.max_degree)
                .detail("nodes", found.total_nodes())
                .detail("search", found.summary());
        }
        Err(e) => {
            report.status = Status::Error;
            report.detail("error", e);
        }
    }
    report.elapsed = start.elapsed();
    report
}
