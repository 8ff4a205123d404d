//! From a presentation `⟨A | R⟩` and a word `w` to a presentation of a
//! group `G_w` whose finite quotients detect whether `w` survives in the
//! profinite completion of `⟨A | R⟩`.
//!
//! Stages, each kept in the trace:
//! 1. `P†`: `2m+1` copies of the input, re-generated by
//!    `x_i_j = a_ij·w_{j+m+1}·w_{i+j}` and `y_j = w_j` (indices mod `2m+1`
//!    in `1..=2m+1`); `w† = y_1`.
//! 2. `P′`: adjoin `a'_0`, re-generate by `a'_i = a†_i·a'_0`;
//!    `w′ = [w†, a'_0]`.
//! 3. `P₁`: conjugators `b_i` with `(w′)^{b_i} = a'_i`; `P₂ = P₁ * ⟨t⟩`.
//! 4. `P_w`: two copies of `P₂` glued by `c_i = b'_i`, `b_i = c'_i`, where
//!    the `c_i` are certified malnormal words in `t` and `w′`.

mod select;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::presentations::{
    abelianization, add_conjugation_relators, free_power, tietze_change_generators,
    AbelianInvariants, FinitePresentation, TietzeChange,
};
use crate::words::{commutator, conjugate, Generator, Word};
pub use select::{
    select_malnormal_words, MalnormalCertificate, PairRecord, Selection, SelectionBudget,
    MIN_MODULUS,
};

pub const DEFAULT_MODULUS: u32 = 7;

/// `base`, with primes appended until it avoids `taken`.
fn fresh(base: &str, taken: &HashSet<Generator>) -> Generator {
    let mut name = base.to_string();
    loop {
        let g = Generator::new(&name).expect("generated names are valid");
        if !taken.contains(&g) {
            return g;
        }
        name.push('\'');
    }
}

fn gen(name: &str) -> Generator {
    Generator::new(name).expect("generated names are valid")
}

/// Stage 1. Returns `(P†, w†)`; `P†` has `(m+1)(2m+1)` generators
/// `x_1_1 … x_m_{2m+1}, y_1 … y_{2m+1}` and `(2m+1)(|R|+1)` relators.
pub fn step_injective_generators(p: &FinitePresentation, w: &Word) -> Result<(FinitePresentation, Word)> {
    p.alphabet().check(w)?;
    if w.is_identity() {
        return Err(Error::Degenerate("w is the empty word".into()));
    }
    let m = p.generator_count();
    let k = 2 * m + 1;
    let power = free_power(p, k)?;
    let copy = |j: usize, i: usize| power.generators()[(j - 1) * m + i].clone();
    let wrap = |j: usize| (j - 1) % k + 1;
    let copy_of_w = |j: usize| {
        let map: HashMap<Generator, Generator> = p
            .generators()
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), copy(j, i)))
            .collect();
        w.rename(&map)
    };

    // adjoin y_j = w_j under temporary names, then switch generating sets
    let mut taken: HashSet<Generator> = power.generators().iter().cloned().collect();
    let temp: Vec<Generator> = (1..=k)
        .map(|j| {
            let g = fresh(&format!("y_{j}"), &taken);
            taken.insert(g.clone());
            g
        })
        .collect();
    let mut defs: Vec<(Generator, Word)> = power
        .generators()
        .iter()
        .map(|g| (g.clone(), Word::generator(g)))
        .collect();
    defs.extend((1..=k).map(|j| (temp[j - 1].clone(), copy_of_w(j))));
    let stage_a = tietze_change_generators(
        &power,
        &TietzeChange {
            definitions: defs,
            inverses: power
                .generators()
                .iter()
                .map(|g| (g.clone(), Word::generator(g)))
                .collect(),
        },
    )?;

    let y = |j: usize| gen(&format!("y_{j}"));
    let t = |j: usize| Word::generator(&temp[j - 1]);
    let mut definitions = Vec::new();
    let mut inverses = Vec::new();
    for i in 1..=m {
        for j in 1..=k {
            let x = gen(&format!("x_{i}_{j}"));
            let a = Word::generator(&copy(j, i - 1));
            let (p1, p2) = (wrap(j + m + 1), wrap(i + j));
            definitions.push((x.clone(), a.concat(&t(p1)).concat(&t(p2))));
            let back = Word::generator(&x)
                .concat(&Word::generator(&y(p2)).inverse())
                .concat(&Word::generator(&y(p1)).inverse());
            inverses.push((copy(j, i - 1), back));
        }
    }
    for j in 1..=k {
        definitions.push((y(j), t(j)));
        inverses.push((temp[j - 1].clone(), Word::generator(&y(j))));
    }
    let dagger = tietze_change_generators(
        &stage_a,
        &TietzeChange {
            definitions,
            inverses,
        },
    )?;
    Ok((dagger, Word::generator(&y(1))))
}

/// Stage 2. Adjoins `a'_0` and re-generates by `a'_i = a_i·a'_0`; returns
/// `(P′, [w, a'_0])` with generators ordered `a'_0, a'_1, …`.
pub fn step_order_control(p: &FinitePresentation, w: &Word) -> Result<(FinitePresentation, Word)> {
    p.alphabet().check(w)?;
    let taken: HashSet<Generator> = p.generators().iter().cloned().collect();
    let names: Vec<Generator> = (0..=p.generator_count())
        .map(|i| fresh(&format!("a'_{i}"), &taken))
        .collect();
    let a0 = names[0].clone();
    let mut gens = p.generators().to_vec();
    gens.push(a0.clone());
    let widened = FinitePresentation::new(gens, p.relators().to_vec())?;
    let a0w = Word::generator(&a0);
    let mut definitions = vec![(a0.clone(), a0w.clone())];
    let mut inverses = vec![(a0.clone(), a0w.clone())];
    for (i, g) in p.generators().iter().enumerate() {
        let new = &names[i + 1];
        definitions.push((new.clone(), Word::generator(g).concat(&a0w)));
        inverses.push((g.clone(), Word::generator(new).concat(&a0w.inverse())));
    }
    let change = TietzeChange {
        definitions,
        inverses,
    };
    let out = tietze_change_generators(&widened, &change)?;
    let w_prime = commutator(&change.rewrite(w), &a0w);
    Ok((out, w_prime))
}

/// Stage 3. Adds `b_0 … b_m` (one per generator of `p`, in order) with
/// relators `(w)^{b_i} a_i⁻¹`. Returns the presentation and the `b_i`.
pub fn step_conjugators(p: &FinitePresentation, w: &Word) -> Result<(FinitePresentation, Vec<Generator>)> {
    let mut taken: HashSet<Generator> = p.generators().iter().cloned().collect();
    let letters: Vec<Generator> = (0..p.generator_count())
        .map(|i| {
            let g = fresh(&format!("b_{i}"), &taken);
            taken.insert(g.clone());
            g
        })
        .collect();
    let targets: Vec<Word> = p.generators().iter().map(Word::generator).collect();
    Ok((add_conjugation_relators(p, w, &targets, &letters)?, letters))
}

/// `p * ⟨s⟩` for a fresh letter named after `name`.
pub fn add_stable_letter(p: &FinitePresentation, name: &str) -> Result<(FinitePresentation, Generator)> {
    let taken: HashSet<Generator> = p.generators().iter().cloned().collect();
    let s = fresh(name, &taken);
    let mut gens = p.generators().to_vec();
    gens.push(s.clone());
    Ok((FinitePresentation::new(gens, p.relators().to_vec())?, s))
}

/// Stage 4. Doubles `p` (second copy primed) and adds `cᵢ (b'ᵢ)⁻¹` for all
/// `i`, then `bᵢ (c'ᵢ)⁻¹` for all `i`.
pub fn assemble_gw(p: &FinitePresentation, b: &[Generator], c: &[Word]) -> Result<FinitePresentation> {
    if b.len() != c.len() {
        return Err(Error::LengthMismatch {
            expected: b.len(),
            found: c.len(),
        });
    }
    for x in c {
        p.alphabet().check(x)?;
    }
    for g in b {
        if !p.alphabet().contains(g) {
            return Err(Error::AlphabetMismatch(g.to_string()));
        }
    }
    let mut taken: HashSet<Generator> = p.generators().iter().cloned().collect();
    let mut prime = HashMap::new();
    for g in p.generators() {
        let q = fresh(&format!("{g}'"), &taken);
        taken.insert(q.clone());
        prime.insert(g.clone(), q);
    }
    let mut gens = p.generators().to_vec();
    gens.extend(p.generators().iter().map(|g| prime[g].clone()));
    let mut rels = p.relators().to_vec();
    rels.extend(p.relators().iter().map(|r| r.rename(&prime)));
    for (ci, bi) in c.iter().zip(b) {
        rels.push(ci.concat(&Word::generator(&prime[bi]).inverse()));
    }
    for (ci, bi) in c.iter().zip(b) {
        rels.push(Word::generator(bi).concat(&ci.rename(&prime).inverse()));
    }
    FinitePresentation::new(gens, rels)
}

/// `(w^s)^{j+1} · w · (w^s)^{-1-j}`
pub fn discrete_word(w: &Word, stable: &Generator, j: usize) -> Word {
    let ws = conjugate(w, &Word::generator(stable));
    let k = j as i64 + 1;
    ws.pow(k).concat(w).concat(&ws.pow(-k))
}

/// `⟨x | x⟩`
pub fn trivial_presentation() -> FinitePresentation {
    FinitePresentation::from_strs(&["x"], &["x"]).expect("fixed presentation")
}

/// One stage of the pipeline as recorded in a trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub generators: usize,
    pub relators: usize,
    pub word: Option<String>,
    pub abelianization: AbelianInvariants,
    pub presentation: String,
}

impl StageRecord {
    fn new(stage: &str, p: &FinitePresentation, w: Option<&Word>) -> Self {
        StageRecord {
            stage: stage.to_string(),
            generators: p.generator_count(),
            relators: p.relator_count(),
            word: w.map(Word::to_string),
            abelianization: abelianization(p),
            presentation: p.to_text(),
        }
    }

    pub fn parse_presentation(&self) -> Result<FinitePresentation> {
        FinitePresentation::parse(&self.presentation)
    }
}

/// Every intermediate object of an encoding run, serializable as JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingTrace {
    pub variant: String,
    pub modulus: u32,
    pub input: StageRecord,
    /// The input word was freely trivial and the pipeline was skipped.
    pub short_circuit: bool,
    pub stages: Vec<StageRecord>,
    pub conjugators: Vec<String>,
    pub stable_letter: Option<String>,
    pub u: Option<String>,
    pub v: Option<String>,
    /// `c₀ … c_{m+1}` in the letters `u`, `v`.
    pub tuple_uv: Vec<String>,
    /// `c₀ … c_{m+1}` in the generators of `P₂`.
    pub tuple: Vec<String>,
    pub certificate: Option<MalnormalCertificate>,
    pub candidates_examined: u64,
}

pub const STAGE_DAGGER: &str = "injective-generators";
pub const STAGE_ORDER: &str = "order-control";
pub const STAGE_CONJUGATORS: &str = "conjugators";
pub const STAGE_STABLE: &str = "stable-letter";
pub const STAGE_FINAL: &str = "final";

impl EncodingTrace {
    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.stage == name)
    }

    pub fn final_stage(&self) -> &StageRecord {
        self.stages.last().expect("a trace always has a final stage")
    }

    pub fn final_presentation(&self) -> Result<FinitePresentation> {
        self.final_stage().parse_presentation()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// SHA-256 of the JSON form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// Re-runs the certificate checks from the recorded tuple.
    pub fn revalidate(&self) -> Result<bool> {
        match &self.certificate {
            Some(c) => c.revalidate(),
            None => Ok(self.short_circuit || self.variant == "discrete"),
        }
    }
}

fn short_circuit_trace(variant: &str, modulus: u32, p: &FinitePresentation, w: &Word) -> EncodingTrace {
    EncodingTrace {
        variant: variant.into(),
        modulus,
        input: StageRecord::new("input", p, Some(w)),
        short_circuit: true,
        stages: vec![StageRecord::new(STAGE_FINAL, &trivial_presentation(), None)],
        conjugators: Vec::new(),
        stable_letter: None,
        u: None,
        v: None,
        tuple_uv: Vec::new(),
        tuple: Vec::new(),
        certificate: None,
        candidates_examined: 0,
    }
}

/// Runs all four stages. Deterministic: equal inputs give equal traces.
pub fn encode(
    p: &FinitePresentation,
    w: &Word,
    modulus: u32,
    budget: &SelectionBudget,
) -> Result<EncodingTrace> {
    p.alphabet().check(w)?;
    if modulus < MIN_MODULUS {
        return Err(Error::Threshold(modulus));
    }
    if w.is_identity() {
        return Ok(short_circuit_trace("standard", modulus, p, w));
    }
    let (dagger, w_dagger) = step_injective_generators(p, w)?;
    let (prime, w_prime) = step_order_control(&dagger, &w_dagger)?;
    let (p1, b) = step_conjugators(&prime, &w_prime)?;
    let (p2, t) = add_stable_letter(&p1, "t")?;
    // b_0 … b_m and t: m + 2 letters
    let selection = select_malnormal_words(b.len() - 1, modulus, budget)?;
    let subst = HashMap::from([
        (gen("t"), Word::generator(&t)),
        (gen("w"), w_prime.clone()),
    ]);
    let c: Vec<Word> = selection.tuple.iter().map(|x| x.substitute(&subst)).collect();
    let mut letters = b.clone();
    letters.push(t.clone());
    let pw = assemble_gw(&p2, &letters, &c)?;
    Ok(EncodingTrace {
        variant: "standard".into(),
        modulus,
        input: StageRecord::new("input", p, Some(w)),
        short_circuit: false,
        stages: vec![
            StageRecord::new(STAGE_DAGGER, &dagger, Some(&w_dagger)),
            StageRecord::new(STAGE_ORDER, &prime, Some(&w_prime)),
            StageRecord::new(STAGE_CONJUGATORS, &p1, None),
            StageRecord::new(STAGE_STABLE, &p2, None),
            StageRecord::new(STAGE_FINAL, &pw, None),
        ],
        conjugators: b.iter().map(|g| g.to_string()).collect(),
        stable_letter: Some(t.to_string()),
        u: Some(selection.u.to_string()),
        v: Some(selection.v.to_string()),
        tuple_uv: selection.tuple_uv.iter().map(Word::to_string).collect(),
        tuple: c.iter().map(Word::to_string).collect(),
        certificate: Some(selection.certificate),
        candidates_examined: selection.examined,
    })
}

/// The discrete-group variant: order control on the input itself,
/// conjugators, a stable letter `s`, and `cⱼ = (w^s)^{j+1} w (w^s)^{-1-j}`.
pub fn encode_discrete_trace(p: &FinitePresentation, w: &Word) -> Result<EncodingTrace> {
    p.alphabet().check(w)?;
    if w.is_identity() {
        return Ok(short_circuit_trace("discrete", 0, p, w));
    }
    let (prime, w_prime) = step_order_control(p, w)?;
    let (p1, b) = step_conjugators(&prime, &w_prime)?;
    let (p2, s) = add_stable_letter(&p1, &format!("b_{}", b.len()))?;
    let mut letters = b.clone();
    letters.push(s.clone());
    let c: Vec<Word> = (0..letters.len()).map(|j| discrete_word(&w_prime, &s, j)).collect();
    let gw = assemble_gw(&p2, &letters, &c)?;
    Ok(EncodingTrace {
        variant: "discrete".into(),
        modulus: 0,
        input: StageRecord::new("input", p, Some(w)),
        short_circuit: false,
        stages: vec![
            StageRecord::new(STAGE_ORDER, &prime, Some(&w_prime)),
            StageRecord::new(STAGE_CONJUGATORS, &p1, None),
            StageRecord::new(STAGE_STABLE, &p2, None),
            StageRecord::new(STAGE_FINAL, &gw, None),
        ],
        conjugators: b.iter().map(|g| g.to_string()).collect(),
        stable_letter: Some(s.to_string()),
        u: None,
        v: None,
        tuple_uv: Vec::new(),
        tuple: c.iter().map(Word::to_string).collect(),
        certificate: None,
        candidates_examined: 0,
    })
}

pub fn encode_discrete(p: &FinitePresentation, w: &Word) -> Result<FinitePresentation> {
    encode_discrete_trace(p, w)?.final_presentation()
}
