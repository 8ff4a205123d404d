//! Finite presentations, free products, Tietze changes of generators and
//! abelianization.

pub mod snf;

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Generator, Word};

/// `⟨generators | relators⟩`. Relators are freely reduced; identity
/// relators are dropped on construction, duplicates kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePresentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl FinitePresentation {
    pub fn new(generators: Vec<Generator>, relators: Vec<Word>) -> Result<Self> {
        let alphabet = Alphabet::new(generators)?;
        for r in &relators {
            alphabet.check(r)?;
        }
        Ok(FinitePresentation {
            alphabet,
            relators: relators.into_iter().filter(|r| !r.is_identity()).collect(),
        })
    }

    /// Free group on the given names.
    pub fn free(names: &[&str]) -> Result<Self> {
        Ok(FinitePresentation {
            alphabet: Alphabet::from_names(names)?,
            relators: Vec::new(),
        })
    }

    /// Builds a presentation from names and relator strings in the word grammar.
    pub fn from_strs(names: &[&str], relators: &[&str]) -> Result<Self> {
        let alphabet = Alphabet::from_names(names)?;
        let rels = relators
            .iter()
            .map(|r| alphabet.parse_word(r))
            .collect::<Result<Vec<_>>>()?;
        FinitePresentation::new(alphabet.generators().to_vec(), rels)
    }

    pub fn generators(&self) -> &[Generator] {
        self.alphabet.generators()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.alphabet.get(name)
    }

    /// Applies an injective renaming to generators and relators.
    pub fn renamed(&self, map: &HashMap<Generator, Generator>) -> Result<Self> {
        let gens = self
            .generators()
            .iter()
            .map(|g| map.get(g).unwrap_or(g).clone())
            .collect();
        let rels = self.relators.iter().map(|r| r.rename(map)).collect();
        FinitePresentation::new(gens, rels)
    }

    /// Text form: `gens: a b` then one `rel: <word>` line per relator.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Reads the text form. Blank lines and `#` comments are skipped; the
    /// first remaining line must be `gens:`. Errors carry 1-based line and
    /// column.
    pub fn parse(text: &str) -> Result<Self> {
        let parse_err = |line: usize, column: usize, message: String| Error::Parse {
            line,
            column,
            message,
        };
        let mut alphabet: Option<Alphabet> = None;
        let mut rels = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let body_start = content.len() - content.trim_start().len();
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("gens:") {
                if alphabet.is_some() {
                    return Err(parse_err(line, body_start + 1, "second `gens:` line".into()));
                }
                let offset = body_start + "gens:".len();
                let mut gens = Vec::new();
                for (at, name) in crate::words::token_offsets(rest) {
                    let column = offset + at + 1;
                    let g = Generator::new(name)
                        .map_err(|_| parse_err(line, column, format!("bad generator name `{name}`")))?;
                    if gens.contains(&g) {
                        return Err(parse_err(line, column, format!("duplicate generator `{name}`")));
                    }
                    gens.push(g);
                }
                alphabet = Some(Alphabet::new(gens)?);
            } else if let Some(rest) = trimmed.strip_prefix("rel:") {
                let Some(alphabet) = &alphabet else {
                    return Err(parse_err(line, body_start + 1, "`rel:` before `gens:`".into()));
                };
                let offset = body_start + "rel:".len();
                let word = Word::parse(rest).map_err(|e| match e {
                    Error::Parse { column, message, .. } => parse_err(line, offset + column, message),
                    other => other,
                })?;
                for (at, token) in crate::words::token_offsets(rest) {
                    let name = token.split('^').next().unwrap_or(token);
                    if name != "1" && alphabet.get(name).is_none() {
                        return Err(parse_err(
                            line,
                            offset + at + 1,
                            format!("unknown generator `{name}`"),
                        ));
                    }
                }
                rels.push(word);
            } else {
                return Err(parse_err(line, body_start + 1, "expected `gens:` or `rel:`".into()));
            }
        }
        let alphabet = alphabet.ok_or_else(|| parse_err(1, 1, "missing `gens:` line".into()))?;
        FinitePresentation::new(alphabet.generators().to_vec(), rels)
    }
}

impl fmt::Display for FinitePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens:")?;
        for g in self.generators() {
            write!(f, " {g}")?;
        }
        writeln!(f)?;
        for r in &self.relators {
            writeln!(f, "rel: {r}")?;
        }
        Ok(())
    }
}

/// First homology: `Z^betti ⊕ ⊕ Z/dᵢ` with `d₁ | d₂ | …`, each `dᵢ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianInvariants {
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }

    /// From the invariant factors of a relation matrix on `columns` generators.
    pub fn from_invariant_factors(columns: usize, factors: &[BigInt]) -> Self {
        AbelianInvariants {
            betti: columns - factors.len(),
            torsion: factors.iter().filter(|d| !d.is_one()).cloned().collect(),
        }
    }

    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion
            .iter()
            .map(|d| u64::try_from(d).unwrap_or(u64::MAX))
            .collect()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.betti > 0 {
            parts.push(format!("Z^{}", self.betti));
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `base_k`, made fresh against `taken` by appending primes if needed.
fn copy_name(base: &Generator, copy: usize, taken: &HashSet<Generator>) -> Generator {
    let mut name = format!("{}_{}", base.name(), copy);
    loop {
        let g = Generator::new(&name).expect("suffixing keeps names valid");
        if !taken.contains(&g) {
            return g;
        }
        name.push('\'');
    }
}

/// Appends the generators of `q`, suffixed `_copy`, to `gens`/`rels`.
fn append_copy(
    gens: &mut Vec<Generator>,
    rels: &mut Vec<Word>,
    q: &FinitePresentation,
    copy: usize,
) {
    let mut taken: HashSet<Generator> = gens.iter().cloned().collect();
    taken.extend(q.generators().iter().cloned());
    let mut map = HashMap::new();
    for g in q.generators() {
        let fresh = copy_name(g, copy, &taken);
        taken.insert(fresh.clone());
        map.insert(g.clone(), fresh.clone());
        gens.push(fresh);
    }
    rels.extend(q.relators().iter().map(|r| r.rename(&map)));
}

/// `p * q`; the generators of `q` are renamed with suffix `_2`.
pub fn free_product(p: &FinitePresentation, q: &FinitePresentation) -> FinitePresentation {
    let mut gens = p.generators().to_vec();
    let mut rels = p.relators().to_vec();
    append_copy(&mut gens, &mut rels, q, 2);
    FinitePresentation::new(gens, rels).expect("copy names are fresh")
}

/// `n`-fold free product; copy `k ≥ 2` carries suffix `_k`, copy 1 keeps
/// the original names.
pub fn free_power(p: &FinitePresentation, n: usize) -> Result<FinitePresentation> {
    if n == 0 {
        return Err(Error::Degenerate("free power with n = 0".into()));
    }
    let mut gens = p.generators().to_vec();
    let mut rels = p.relators().to_vec();
    for k in 2..=n {
        append_copy(&mut gens, &mut rels, p, k);
    }
    FinitePresentation::new(gens, rels)
}

/// Adjoins stable letters `bᵢ` with relators `bᵢ⁻¹ w bᵢ targetᵢ⁻¹`.
pub fn add_conjugation_relators(
    p: &FinitePresentation,
    w: &Word,
    targets: &[Word],
    stable_letters: &[Generator],
) -> Result<FinitePresentation> {
    if targets.len() != stable_letters.len() {
        return Err(Error::LengthMismatch {
            expected: stable_letters.len(),
            found: targets.len(),
        });
    }
    p.alphabet().check(w)?;
    for t in targets {
        p.alphabet().check(t)?;
    }
    let mut gens = p.generators().to_vec();
    let mut seen: HashSet<Generator> = gens.iter().cloned().collect();
    for b in stable_letters {
        if !seen.insert(b.clone()) {
            return Err(Error::NameCollision(b.to_string()));
        }
        gens.push(b.clone());
    }
    let mut rels = p.relators().to_vec();
    for (b, target) in stable_letters.iter().zip(targets) {
        let bw = Word::generator(b);
        rels.push(crate::words::conjugate(w, &bw).concat(&target.inverse()));
    }
    FinitePresentation::new(gens, rels)
}

/// A change of generators: each new generator is defined as a word in the
/// old ones, and each old generator is expressed back in the new ones.
#[derive(Clone, Debug)]
pub struct TietzeChange {
    pub definitions: Vec<(Generator, Word)>,
    pub inverses: Vec<(Generator, Word)>,
}

impl TietzeChange {
    /// Rewrites a word in the old generators into the new ones.
    pub fn rewrite(&self, w: &Word) -> Word {
        let map: HashMap<Generator, Word> = self.inverses.iter().cloned().collect();
        w.substitute(&map)
    }
}

/// Tietze move to a new generating set. The substitution is verified: every
/// old generator, expressed in the new generators and expanded back through
/// the definitions, must freely reduce to itself.
pub fn tietze_change_generators(
    p: &FinitePresentation,
    change: &TietzeChange,
) -> Result<FinitePresentation> {
    let new_alphabet = Alphabet::new(change.definitions.iter().map(|(g, _)| g.clone()).collect())?;
    for (_, def) in &change.definitions {
        p.alphabet().check(def)?;
    }
    let inverse_map: HashMap<Generator, Word> = change.inverses.iter().cloned().collect();
    for g in p.generators() {
        match inverse_map.get(g) {
            Some(w) => new_alphabet.check(w)?,
            None => return Err(Error::InvalidSubstitution(g.to_string())),
        }
    }
    let definition_map: HashMap<Generator, Word> = change.definitions.iter().cloned().collect();
    for g in p.generators() {
        let back = inverse_map[g].substitute(&definition_map);
        if back != Word::generator(g) {
            return Err(Error::InvalidSubstitution(g.to_string()));
        }
    }
    let mut rels: Vec<Word> = p.relators().iter().map(|r| r.substitute(&inverse_map)).collect();
    for (g, def) in &change.definitions {
        rels.push(Word::generator(g).concat(&def.substitute(&inverse_map).inverse()));
    }
    FinitePresentation::new(new_alphabet.generators().to_vec(), rels)
}

/// Relator × generator exponent-sum matrix.
pub fn exponent_matrix(p: &FinitePresentation) -> Vec<Vec<BigInt>> {
    p.relators()
        .iter()
        .map(|r| {
            p.generators()
                .iter()
                .map(|g| BigInt::from(r.exponent_sum(g)))
                .collect()
        })
        .collect()
}

pub fn abelianization(p: &FinitePresentation) -> AbelianInvariants {
    let factors = snf::invariant_factors(&exponent_matrix(p));
    AbelianInvariants::from_invariant_factors(p.generator_count(), &factors)
}
