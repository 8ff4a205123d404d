//! Homomorphisms from finite presentations into symmetric groups.
//!
//! A search over degree `n` fills in permutation tables point by point,
//! forcing entries through relator scans and backtracking on conflict.
//! Searches that stop at the first hit fix the first generator in
//! branching order to one permutation per conjugacy class (`[n]`, …, `[1ⁿ]`), fan those out over
//! worker threads, and report the hit of the earliest class; the result
//! does not depend on scheduling.
//!
//! Finding nothing within a budget never proves anything. Reports label
//! that outcome "inconclusive".

mod engine;
mod perm;

use std::collections::HashSet;
use std::fmt;
use std::sync::atomic::Ordering;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::presentations::FinitePresentation;
use crate::words::{is_independent, Generator, Independence, Word};
use engine::{Compiled, Engine, Flow, Limits};
pub use perm::{class_representatives, partitions, Permutation, MAX_DEGREE};

/// A homomorphism given by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationAssignment {
    degree: usize,
    generators: Vec<Generator>,
    images: Vec<Permutation>,
}

impl PermutationAssignment {
    pub fn new(generators: Vec<Generator>, images: Vec<Permutation>) -> Result<Self> {
        if generators.len() != images.len() {
            return Err(Error::LengthMismatch {
                expected: generators.len(),
                found: images.len(),
            });
        }
        let degree = images.first().map_or(0, Permutation::degree);
        if images.iter().any(|p| p.degree() != degree) {
            return Err(Error::Precondition("images of different degrees".into()));
        }
        Ok(PermutationAssignment {
            degree,
            generators,
            images,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn images(&self) -> &[Permutation] {
        &self.images
    }

    pub fn image(&self, g: &Generator) -> Option<&Permutation> {
        self.generators
            .iter()
            .position(|x| x == g)
            .map(|i| &self.images[i])
    }

    pub fn evaluate(&self, w: &Word) -> Result<Permutation> {
        let mut out = Permutation::identity(self.degree);
        for l in w.letters() {
            let p = self
                .image(&l.generator)
                .ok_or_else(|| Error::AlphabetMismatch(l.generator.to_string()))?;
            out = if l.inverse {
                out.then(&p.inverse())
            } else {
                out.then(p)
            };
        }
        Ok(out)
    }

    /// Every generator maps to the identity.
    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(Permutation::is_identity)
    }

    pub fn satisfies(&self, p: &FinitePresentation) -> Result<bool> {
        for r in p.relators() {
            if !self.evaluate(r)?.is_identity() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for PermutationAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .generators
            .iter()
            .zip(&self.images)
            .map(|(g, p)| format!("{g} -> {p}"))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Target orders `κ·eᵢ` for a tuple of elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderSpec {
    targets: Vec<Word>,
    kappa: u64,
    exponents: Vec<u64>,
}

impl OrderSpec {
    pub fn new(targets: Vec<Word>, kappa: u64, exponents: Vec<u64>) -> Result<Self> {
        if targets.len() < 2 {
            return Err(Error::InvalidOrderSpec("need at least two targets".into()));
        }
        if targets.len() != exponents.len() {
            return Err(Error::InvalidOrderSpec(format!(
                "{} targets but {} exponents",
                targets.len(),
                exponents.len()
            )));
        }
        if kappa == 0 || exponents.contains(&0) {
            return Err(Error::InvalidOrderSpec("κ and exponents must be positive".into()));
        }
        Ok(OrderSpec {
            targets,
            kappa,
            exponents,
        })
    }

    pub fn targets(&self) -> &[Word] {
        &self.targets
    }

    pub fn kappa(&self) -> u64 {
        self.kappa
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderReport {
    /// Order of each target's image.
    pub orders: Vec<u64>,
    /// `(i, j, |⟨q(γᵢ)⟩ ∩ ⟨q(γⱼ)⟩|)` for `i < j`.
    pub intersections: Vec<(usize, usize, usize)>,
    pub orders_match: bool,
    pub intersections_trivial: bool,
}

impl OrderReport {
    pub fn holds(&self) -> bool {
        self.orders_match && self.intersections_trivial
    }
}

pub fn element_order(q: &PermutationAssignment, w: &Word) -> Result<u64> {
    Ok(q.evaluate(w)?.order())
}

pub fn verify_order_spec(q: &PermutationAssignment, spec: &OrderSpec) -> Result<OrderReport> {
    let images = spec
        .targets
        .iter()
        .map(|w| q.evaluate(w))
        .collect::<Result<Vec<_>>>()?;
    let orders: Vec<u64> = images.iter().map(Permutation::order).collect();
    let orders_match = orders
        .iter()
        .zip(&spec.exponents)
        .all(|(&o, &e)| o == spec.kappa * e);
    let subgroups: Vec<HashSet<Permutation>> = images
        .iter()
        .map(|x| x.cyclic_subgroup().into_iter().collect())
        .collect();
    let mut intersections = Vec::new();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            intersections.push((i, j, subgroups[i].intersection(&subgroups[j]).count()));
        }
    }
    let intersections_trivial = intersections.iter().all(|&(_, _, k)| k == 1);
    Ok(OrderReport {
        orders,
        intersections,
        orders_match,
        intersections_trivial,
    })
}

/// Bounds on a search. Finding nothing within them is inconclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_degree: usize,
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
    /// Fan out over worker threads (results are identical either way).
    pub parallel: bool,
}

impl SearchBudget {
    pub const DEFAULT_NODES: u64 = 200_000_000;

    pub fn new(max_degree: usize, max_nodes: u64) -> Result<Self> {
        if max_degree == 0 || max_nodes == 0 {
            return Err(Error::Precondition("budget bounds must be positive".into()));
        }
        if max_degree > MAX_DEGREE {
            return Err(Error::Precondition(format!("degree above {MAX_DEGREE}")));
        }
        Ok(SearchBudget {
            max_degree,
            max_nodes,
            time_limit: None,
            parallel: true,
        })
    }

    pub fn degree(max_degree: usize) -> Result<Self> {
        SearchBudget::new(max_degree, Self::DEFAULT_NODES)
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeStats {
    pub degree: usize,
    pub nodes: u64,
    /// The degree was searched to completion.
    pub complete: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Witness,
    Inconclusive,
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStatus::Witness => "witness",
            SearchStatus::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub max_degree: usize,
    pub degrees: Vec<DegreeStats>,
    pub witness: Option<PermutationAssignment>,
    pub budget_exhausted: bool,
}

impl SearchReport {
    pub fn status(&self) -> SearchStatus {
        if self.witness.is_some() {
            SearchStatus::Witness
        } else {
            SearchStatus::Inconclusive
        }
    }

    pub fn total_nodes(&self) -> u64 {
        self.degrees.iter().map(|d| d.nodes).sum()
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        match &self.witness {
            Some(q) => format!("witness at degree {}: {q}", q.degree()),
            None if self.budget_exhausted => format!(
                "inconclusive: budget exhausted before finishing degree {}; no conclusion can be drawn",
                self.degrees.last().map_or(0, |d| d.degree)
            ),
            None => format!(
                "inconclusive: no witness up to degree {}; this does not show that none exists",
                self.max_degree
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    All,
    FirstNontrivial,
}

fn compile(p: &FinitePresentation, extra: &[Word]) -> Result<Compiled> {
    let alphabet = p.alphabet();
    let mut relators = Vec::new();
    for r in p.relators().iter().chain(extra) {
        let (_, core) = r.cyclic_reduction();
        if core.is_identity() {
            continue;
        }
        let codes = core
            .letters()
            .iter()
            .map(|l| {
                alphabet
                    .index_of(&l.generator)
                    .map(|g| 2 * g as u32 + u32::from(l.inverse))
                    .ok_or_else(|| Error::AlphabetMismatch(l.generator.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        relators.push(codes);
    }
    Ok(Compiled::new(p.generator_count(), relators))
}

fn assignment(p: &FinitePresentation, perms: &[Permutation], n: usize) -> PermutationAssignment {
    PermutationAssignment {
        degree: n,
        generators: p.generators().to_vec(),
        images: perms.to_vec(),
    }
}

/// Every hom into the symmetric group of degree `n`, passed to `visit` in
/// search order. Returns false if the visitor stopped early.
fn for_each_hom(
    c: &Compiled,
    n: usize,
    limits: &Limits,
    visit: &mut dyn FnMut(&[Permutation]) -> Flow,
) -> bool {
    let Some(mut e) = Engine::new(c, n, 0) else {
        return true;
    };
    let flow = e.run(limits, visit);
    e.flush(limits);
    matches!(flow, Flow::Continue) && !e.aborted()
}

/// First hom (in class-representative order) accepted by `accept`.
fn first_hom(
    c: &Compiled,
    n: usize,
    limits: &Limits,
    parallel: bool,
    accept: &(dyn Fn(&[Permutation]) -> bool + Sync),
) -> Option<Vec<Permutation>> {
    if c.gens == 0 {
        let mut found = None;
        for_each_hom(c, n, limits, &mut |perms| {
            if accept(perms) {
                found = Some(perms.to_vec());
                Flow::Stop
            } else {
                Flow::Continue
            }
        });
        return found;
    }
    let reps = class_representatives(n);
    let task = |(idx, rep): (usize, &Permutation)| -> Option<Vec<Permutation>> {
        if limits.best.load(Ordering::Relaxed) < idx {
            return None;
        }
        let mut e = Engine::new(c, n, idx)?;
        if !e.assign(c.order[0], rep) {
            return None;
        }
        let mut found = None;
        e.run(limits, &mut |perms| {
            if accept(perms) {
                found = Some(perms.to_vec());
                limits.best.fetch_min(idx, Ordering::Relaxed);
                Flow::Stop
            } else {
                Flow::Continue
            }
        });
        e.flush(limits);
        found
    };
    let results: Vec<Option<Vec<Permutation>>> = if parallel {
        reps.par_iter().enumerate().map(task).collect()
    } else {
        reps.iter().enumerate().map(task).collect()
    };
    results.into_iter().flatten().next()
}

/// Homs into the symmetric group of degree `n`. `All` returns every one
/// (sorted by generator images); `FirstNontrivial` returns at most one.
pub fn search_homs(p: &FinitePresentation, n: usize, mode: SearchMode) -> Result<Vec<PermutationAssignment>> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::Precondition(format!("degree must be in 1..={MAX_DEGREE}")));
    }
    let c = compile(p, &[])?;
    let limits = Limits::new(None, None);
    let out = match mode {
        SearchMode::All => {
            let mut all = Vec::new();
            for_each_hom(&c, n, &limits, &mut |perms| {
                all.push(perms.to_vec());
                Flow::Continue
            });
            all.sort();
            all
        }
        SearchMode::FirstNontrivial => {
            first_hom(&c, n, &limits, true, &|perms| perms.iter().any(|x| !x.is_identity()))
                .into_iter()
                .collect()
        }
    };
    let homs: Vec<PermutationAssignment> = out.iter().map(|x| assignment(p, x, n)).collect();
    debug_assert!(homs.iter().all(|q| q.satisfies(p).unwrap_or(false)));
    Ok(homs)
}

/// Number of homs into the symmetric group of degree `n` that also kill
/// every word in `extra`.
pub fn count_homs(p: &FinitePresentation, n: usize, extra: &[Word]) -> Result<u64> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::Precondition(format!("degree must be in 1..={MAX_DEGREE}")));
    }
    let c = compile(p, extra)?;
    let limits = Limits::new(None, None);
    let mut count = 0u64;
    for_each_hom(&c, n, &limits, &mut |_| {
        count += 1;
        Flow::Continue
    });
    Ok(count)
}

fn budgeted_search(
    p: &FinitePresentation,
    degrees: std::ops::RangeInclusive<usize>,
    budget: &SearchBudget,
    accept: &(dyn Fn(&PermutationAssignment) -> bool + Sync),
) -> Result<SearchReport> {
    let c = compile(p, &[])?;
    let deadline = budget.time_limit.map(|t| Instant::now() + t);
    let limits = Limits::new(Some(budget.max_nodes), deadline);
    let mut report = SearchReport {
        max_degree: budget.max_degree,
        degrees: Vec::new(),
        witness: None,
        budget_exhausted: false,
    };
    for n in degrees {
        let before = limits.nodes.load(Ordering::Relaxed);
        limits.best.store(usize::MAX, Ordering::Relaxed);
        let hit = first_hom(&c, n, &limits, budget.parallel, &|perms| {
            accept(&assignment(p, perms, n))
        });
        let exhausted = limits.exhausted.load(Ordering::Relaxed);
        report.degrees.push(DegreeStats {
            degree: n,
            nodes: limits.nodes.load(Ordering::Relaxed) - before,
            complete: hit.is_none() && !exhausted,
        });
        if let Some(perms) = hit {
            report.witness = Some(assignment(p, &perms, n));
            break;
        }
        if exhausted {
            report.budget_exhausted = true;
            break;
        }
    }
    Ok(report)
}

/// Looks for a hom under which `w` is not the identity, degrees
/// `2..=max_degree`.
pub fn word_survives_upto(p: &FinitePresentation, w: &Word, budget: &SearchBudget) -> Result<SearchReport> {
    p.alphabet().check(w)?;
    budgeted_search(p, 2..=budget.max_degree, budget, &|q| {
        q.evaluate(w).map(|x| !x.is_identity()).unwrap_or(false)
    })
}

/// Looks for a hom with non-trivial image, degrees `2..=max_degree`.
pub fn has_nontrivial_quotient_upto(p: &FinitePresentation, budget: &SearchBudget) -> Result<SearchReport> {
    budgeted_search(p, 2..=budget.max_degree, budget, &|q| !q.is_trivial())
}

/// Looks for a hom meeting an order specification, degrees `1..=max_degree`.
pub fn search_order_targeted(
    p: &FinitePresentation,
    spec: &OrderSpec,
    budget: &SearchBudget,
) -> Result<SearchReport> {
    for t in spec.targets() {
        p.alphabet().check(t)?;
    }
    if p.relators().is_empty() {
        if let Independence::Dependent { first, second } = is_independent(spec.targets())? {
            return Err(Error::DependentTargets { first, second });
        }
    }
    budgeted_search(p, 1..=budget.max_degree, budget, &|q| {
        verify_order_spec(q, spec).map(|r| r.holds()).unwrap_or(false)
    })
}

/// `⌈59n/60⌉`: a lower bound on the number of generators of the profinite
/// completion of an `n`-fold free product of copies of any group whose
/// profinite completion is non-trivial.
pub fn grushko_lower_bound(n: u64) -> u64 {
    (59 * n).div_ceil(60)
}
