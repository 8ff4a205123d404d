//! Backtracking over partial permutation tables with relator scanning.
//!
//! The table holds, for every generator, its partial forward and inverse
//! maps on `{0..n}`. Each new entry triggers a scan of every cyclic
//! rotation of every relator that starts with that letter at that point.
//! A scan that closes up checks consistency; a scan with a single missing
//! letter forces it.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::Instant;

use super::perm::Permutation;

const NONE: u8 = u8::MAX;

/// Relators as letter codes `2g` (forward) and `2g + 1` (inverse), plus
/// an index of where each letter occurs and the order in which generators
/// are branched on.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub gens: usize,
    relators: Vec<Vec<u32>>,
    occurrences: Vec<Vec<(u32, u32)>>,
    conjugations: Vec<Conjugation>,
    pub order: Vec<usize>,
}

/// A relator that reads `x^±1 U x^∓1 V` cyclically, with `x` absent from
/// `U` and `V`. Any solution makes `U` and `V` conjugate, so their cycle
/// types must agree once both are known, long before `x` is pinned down.
#[derive(Clone, Debug)]
struct Conjugation {
    x: usize,
    u: Vec<u32>,
    v: Vec<u32>,
    others: Vec<usize>,
}

fn conjugations(relators: &[Vec<u32>]) -> Vec<Conjugation> {
    let mut out = Vec::new();
    for rel in relators {
        let len = rel.len();
        let mut gens: Vec<usize> = rel.iter().map(|&c| c as usize / 2).collect();
        gens.sort_unstable();
        gens.dedup();
        for &x in &gens {
            let at: Vec<usize> = (0..len).filter(|&k| rel[k] as usize / 2 == x).collect();
            let [i, j] = at[..] else { continue };
            if rel[i] == rel[j] {
                continue;
            }
            let others: Vec<usize> = gens.iter().copied().filter(|&g| g != x).collect();
            if others.is_empty() {
                continue;
            }
            out.push(Conjugation {
                x,
                u: rel[i + 1..j].to_vec(),
                v: rel[j + 1..].iter().chain(&rel[..i]).copied().collect(),
                others,
            });
        }
    }
    out
}

impl Compiled {
    pub fn new(gens: usize, relators: Vec<Vec<u32>>) -> Self {
        let mut occurrences = vec![Vec::new(); 2 * gens];
        for (r, rel) in relators.iter().enumerate() {
            for (k, &code) in rel.iter().enumerate() {
                occurrences[code as usize].push((r as u32, k as u32));
            }
        }
        let order = branching_order(gens, &relators);
        Compiled {
            gens,
            conjugations: conjugations(&relators),
            relators,
            occurrences,
            order,
        }
    }
}

/// Generators closed under "forced by a relator": once every other letter
/// of a relator is known, a generator occurring there exactly once is
/// determined by propagation and never needs to be branched on.
fn closure(known: &mut [bool], counts: &[Vec<(usize, usize)>]) -> Vec<usize> {
    let mut added = Vec::new();
    loop {
        let mut progress = false;
        for rel in counts {
            let unknown: Vec<&(usize, usize)> = rel.iter().filter(|(g, _)| !known[*g]).collect();
            if let [(g, 1)] = unknown[..] {
                known[*g] = true;
                added.push(*g);
                progress = true;
            }
        }
        if !progress {
            return added;
        }
    }
}

/// Static order: repeatedly branch on the generator that forces the most
/// others (ties: more relator occurrences, then lower index), then append
/// everything it forces.
fn branching_order(gens: usize, relators: &[Vec<u32>]) -> Vec<usize> {
    let counts: Vec<Vec<(usize, usize)>> = relators
        .iter()
        .map(|rel| {
            let mut c: Vec<(usize, usize)> = Vec::new();
            for &code in rel {
                let g = code as usize / 2;
                match c.iter_mut().find(|(x, _)| *x == g) {
                    Some(e) => e.1 += 1,
                    None => c.push((g, 1)),
                }
            }
            c
        })
        .collect();
    let mut occurrences = vec![0usize; gens];
    for rel in relators {
        for &code in rel {
            occurrences[code as usize / 2] += 1;
        }
    }
    let mut known = vec![false; gens];
    let mut order = Vec::with_capacity(gens);
    while order.len() < gens {
        let mut best: Option<(usize, usize, usize)> = None;
        for g in (0..gens).filter(|&g| !known[g]) {
            let mut trial = known.clone();
            trial[g] = true;
            let forced = closure(&mut trial, &counts).len();
            let key = (forced, occurrences[g], g);
            let better = match best {
                None => true,
                Some((f, o, b)) => (forced, occurrences[g]) > (f, o) || ((forced, occurrences[g]) == (f, o) && g < b),
            };
            if better {
                best = Some(key);
            }
        }
        let (_, _, g) = best.expect("an unknown generator remains");
        known[g] = true;
        order.push(g);
        order.extend(closure(&mut known, &counts));
    }
    order
}

/// Shared limits for one search; checked by every worker.
pub(crate) struct Limits {
    pub max_nodes: Option<u64>,
    pub deadline: Option<Instant>,
    pub nodes: AtomicU64,
    pub exhausted: AtomicBool,
    /// Smallest task index that has already produced a result.
    pub best: AtomicUsize,
}

impl Limits {
    pub fn new(max_nodes: Option<u64>, deadline: Option<Instant>) -> Self {
        Limits {
            max_nodes,
            deadline,
            nodes: AtomicU64::new(0),
            exhausted: AtomicBool::new(false),
            best: AtomicUsize::new(usize::MAX),
        }
    }
}

pub(crate) enum Flow {
    Continue,
    Stop,
}

pub(crate) struct Engine<'a> {
    c: &'a Compiled,
    n: usize,
    table: Vec<u8>,
    /// Number of defined points per generator.
    defined: Vec<usize>,
    trail: Vec<(u32, u8)>,
    queue: Vec<(u32, u8)>,
    local_nodes: u64,
    task: usize,
    aborted: bool,
}

impl<'a> Engine<'a> {
    /// Empty table; `None` if some relator is already unsatisfiable.
    pub fn new(c: &'a Compiled, n: usize, task: usize) -> Option<Self> {
        let mut e = Engine {
            c,
            n,
            table: vec![NONE; 2 * c.gens * n],
            defined: vec![0; c.gens],
            trail: Vec::new(),
            queue: Vec::new(),
            local_nodes: 0,
            task,
            aborted: false,
        };
        for r in 0..c.relators.len() {
            for p in 0..n {
                if !e.scan(r, 0, p as u8) {
                    return None;
                }
            }
        }
        e.process().then_some(e)
    }

    #[inline]
    fn get(&self, code: u32, p: u8) -> u8 {
        self.table[code as usize * self.n + p as usize]
    }

    /// Records `p^g = q`; false on conflict.
    fn define(&mut self, g: u32, p: u8, q: u8) -> bool {
        let fwd = self.get(2 * g, p);
        if fwd != NONE {
            return fwd == q;
        }
        if self.get(2 * g + 1, q) != NONE {
            return false;
        }
        let n = self.n;
        self.table[2 * g as usize * n + p as usize] = q;
        self.table[(2 * g as usize + 1) * n + q as usize] = p;
        self.defined[g as usize] += 1;
        self.trail.push((g, p));
        self.queue.push((g, p));
        true
    }

    fn define_letter(&mut self, code: u32, from: u8, to: u8) -> bool {
        if code & 1 == 0 {
            self.define(code / 2, from, to)
        } else {
            self.define(code / 2, to, from)
        }
    }

    /// Scans the rotation of relator `r` starting at letter `k` from `start`.
    fn scan(&mut self, r: usize, k: usize, start: u8) -> bool {
        let rel = &self.c.relators[r];
        let len = rel.len();
        let mut f = start;
        let mut i = 0;
        while i < len {
            let x = self.get(rel[(k + i) % len], f);
            if x == NONE {
                break;
            }
            f = x;
            i += 1;
        }
        if i == len {
            return f == start;
        }
        let mut b = start;
        let mut j = len;
        while j > i {
            let x = self.get(rel[(k + j - 1) % len] ^ 1, b);
            if x == NONE {
                break;
            }
            b = x;
            j -= 1;
        }
        if j == i {
            f == b
        } else if j == i + 1 {
            let code = rel[(k + i) % len];
            self.define_letter(code, f, b)
        } else {
            true
        }
    }

    fn process(&mut self) -> bool {
        while let Some((g, p)) = self.queue.pop() {
            let q = self.get(2 * g, p);
            let c = self.c;
            for &(r, k) in &c.occurrences[2 * g as usize] {
                if !self.scan(r as usize, k as usize, p) {
                    self.queue.clear();
                    return false;
                }
            }
            for &(r, k) in &c.occurrences[2 * g as usize + 1] {
                if !self.scan(r as usize, k as usize, q) {
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        let n = self.n;
        while self.trail.len() > mark {
            let (g, p) = self.trail.pop().unwrap();
            let q = self.table[2 * g as usize * n + p as usize];
            self.table[2 * g as usize * n + p as usize] = NONE;
            self.table[(2 * g as usize + 1) * n + q as usize] = NONE;
            self.defined[g as usize] -= 1;
        }
    }

    /// Fixes the whole image of generator `g`; false on conflict.
    pub fn assign(&mut self, g: usize, perm: &Permutation) -> bool {
        for p in 0..self.n {
            if !self.define(g as u32, p as u8, perm.images()[p]) {
                self.queue.clear();
                return false;
            }
        }
        self.process()
    }

    pub fn aborted(&self) -> bool {
        self.aborted
    }

    fn tick(&mut self, limits: &Limits) -> bool {
        self.local_nodes += 1;
        if self.local_nodes & 0xff == 0 {
            let total = limits.nodes.fetch_add(0x100, Ordering::Relaxed) + 0x100;
            if limits.max_nodes.is_some_and(|m| total > m)
                || limits.deadline.is_some_and(|d| Instant::now() > d)
            {
                limits.exhausted.store(true, Ordering::Relaxed);
            }
        }
        if limits.exhausted.load(Ordering::Relaxed) || limits.best.load(Ordering::Relaxed) < self.task
        {
            self.aborted = true;
        }
        !self.aborted
    }

    /// Flushes the node count not yet added to the shared counter.
    pub fn flush(&self, limits: &Limits) {
        limits
            .nodes
            .fetch_add(self.local_nodes & 0xff, Ordering::Relaxed);
    }

    fn cycle_type(&self, word: &[u32], counts: &mut [u32]) {
        let n = self.n;
        let mut image = [0u8; 256];
        for (p, slot) in image.iter_mut().enumerate().take(n) {
            let mut f = p as u8;
            for &code in word {
                f = self.get(code, f);
            }
            *slot = f;
        }
        let mut seen = [false; 256];
        for p in 0..n {
            if seen[p] {
                continue;
            }
            let mut len = 0;
            let mut q = p;
            while !seen[q] {
                seen[q] = true;
                q = image[q] as usize;
                len += 1;
            }
            counts[len] += 1;
        }
    }

    /// Cycle types agree for every conjugation relator whose other
    /// generators are complete.
    fn conjugations_agree(&self) -> bool {
        let n = self.n;
        let mut cu = vec![0u32; n + 1];
        let mut cv = vec![0u32; n + 1];
        for c in &self.c.conjugations {
            if self.defined[c.x] == n || c.others.iter().any(|&g| self.defined[g] < n) {
                continue;
            }
            cu.fill(0);
            cv.fill(0);
            self.cycle_type(&c.u, &mut cu);
            self.cycle_type(&c.v, &mut cv);
            if cu != cv {
                return false;
            }
        }
        true
    }

    fn next_entry(&self) -> Option<(u32, u8)> {
        // a partially defined generator with fewest gaps goes first;
        // otherwise the first incomplete one in branching order
        let mut partial: Option<(usize, usize)> = None;
        let mut fresh: Option<usize> = None;
        for &g in &self.c.order {
            let missing = self.n - self.defined[g];
            if missing == 0 {
                continue;
            }
            if missing < self.n {
                if partial.is_none_or(|(m, _)| missing < m) {
                    partial = Some((missing, g));
                }
            } else if fresh.is_none() {
                fresh = Some(g);
            }
        }
        let g = partial.map(|(_, g)| g).or(fresh)?;
        let row = &self.table[2 * g * self.n..(2 * g + 1) * self.n];
        let p = row.iter().position(|&x| x == NONE)?;
        Some((g as u32, p as u8))
    }

    /// Depth-first search; `visit` sees each complete table (forward maps
    /// of all generators) and decides whether to go on.
    pub fn run(&mut self, limits: &Limits, visit: &mut dyn FnMut(&[Permutation]) -> Flow) -> Flow {
        if !self.conjugations_agree() {
            return Flow::Continue;
        }
        let Some((g, p)) = self.next_entry() else {
            let perms: Vec<Permutation> = (0..self.c.gens)
                .map(|g| {
                    Permutation::from_raw(
                        self.table[2 * g * self.n..(2 * g + 1) * self.n].to_vec(),
                    )
                })
                .collect();
            return visit(&perms);
        };
        for q in 0..self.n as u8 {
            if self.get(2 * g + 1, q) != NONE {
                continue;
            }
            if !self.tick(limits) {
                return Flow::Stop;
            }
            let mark = self.trail.len();
            if self.define(g, p, q) && self.process() {
                if let Flow::Stop = self.run(limits, visit) {
                    self.undo(mark);
                    return Flow::Stop;
                }
            }
            self.queue.clear();
            self.undo(mark);
        }
        Flow::Continue
    }
}
