//! Free-group words over named alphabets.
//!
//! A [`Word`] is always stored freely reduced. Letters are ordered by
//! generator name and then by sign, with the plain letter before its
//! inverse; every canonical form in the crate (cyclic words, shortlex
//! enumeration, tie-breaks) derives from that order.
//!
//! Text form: whitespace-separated tokens `name`, `name^-1` or `name^k`;
//! the identity is written `1`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A named free generator. Names match `[A-Za-z][A-Za-z0-9_']*`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(Arc<str>);

impl Generator {
    pub fn new(name: &str) -> Result<Self> {
        if is_valid_name(name) {
            Ok(Generator(Arc::from(name)))
        } else {
            Err(Error::InvalidName(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// A signed generator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn plain(generator: Generator) -> Self {
        Letter {
            generator,
            inverse: false,
        }
    }

    pub fn inverted(generator: Generator) -> Self {
        Letter {
            generator,
            inverse: true,
        }
    }

    pub fn inverse(&self) -> Letter {
        Letter {
            generator: self.generator.clone(),
            inverse: !self.inverse,
        }
    }

    pub fn cancels(&self, other: &Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }

    pub fn sign(&self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.generator)
        } else {
            write!(f, "{}", self.generator)
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A freely reduced word. Ordered shortlex.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Freely reduces an arbitrary letter sequence. No alphabet check; see
    /// [`reduce`] for the checked variant.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|last| last.cancels(&l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn generator(g: &Generator) -> Self {
        Word {
            letters: vec![Letter::plain(g.clone())],
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).cloned())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn exponent_sum(&self, g: &Generator) -> i64 {
        self.letters
            .iter()
            .filter(|l| &l.generator == g)
            .map(Letter::sign)
            .sum()
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.letters.iter().map(|l| l.generator.clone()).collect()
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) => self.letters.len() == 1 || !a.cancels(b),
            _ => true,
        }
    }

    /// Returns `(conjugator, core)` with `self = conjugator · core · conjugator⁻¹`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut i = 0;
        let mut j = l.len();
        while j - i >= 2 && l[i].cancels(&l[j - 1]) {
            i += 1;
            j -= 1;
        }
        (
            Word {
                letters: l[..i].to_vec(),
            },
            Word {
                letters: l[i..j].to_vec(),
            },
        )
    }

    /// Replaces each generator by a word. Generators missing from the map
    /// are kept as they are.
    pub fn substitute(&self, map: &HashMap<Generator, Word>) -> Word {
        Word::from_letters(self.letters.iter().flat_map(|l| {
            let image = match map.get(&l.generator) {
                Some(w) if l.inverse => w.inverse(),
                Some(w) => w.clone(),
                None => Word {
                    letters: vec![l.clone()],
                },
            };
            image.letters
        }))
    }

    /// Renames generators; unmapped generators are kept.
    pub fn rename(&self, map: &HashMap<Generator, Generator>) -> Word {
        Word {
            letters: self
                .letters
                .iter()
                .map(|l| Letter {
                    generator: map.get(&l.generator).unwrap_or(&l.generator).clone(),
                    inverse: l.inverse,
                })
                .collect(),
        }
    }

    /// Parses the token grammar described in the module docs.
    pub fn parse(text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for (offset, token) in token_offsets(text) {
            let column = offset + 1;
            if token == "1" {
                continue;
            }
            let (name, exponent) = match token.split_once('^') {
                Some((name, exp)) => {
                    let k: i64 = exp.parse().map_err(|_| Error::Parse {
                        line: 1,
                        column,
                        message: format!("bad exponent in `{token}`"),
                    })?;
                    if k == 0 {
                        return Err(Error::Parse {
                            line: 1,
                            column,
                            message: format!("zero exponent in `{token}`"),
                        });
                    }
                    (name, k)
                }
                None => (token, 1),
            };
            let g = Generator::new(name).map_err(|_| Error::Parse {
                line: 1,
                column,
                message: format!("bad generator name `{name}`"),
            })?;
            let letter = Letter {
                generator: g,
                inverse: exponent < 0,
            };
            for _ in 0..exponent.unsigned_abs() {
                letters.push(letter.clone());
            }
        }
        Ok(Word::from_letters(letters))
    }
}

pub(crate) fn token_offsets(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out.into_iter()
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// An ordered set of generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    generators: Vec<Generator>,
    index: HashMap<Generator, usize>,
}

impl Alphabet {
    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        let mut index = HashMap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.clone(), i).is_some() {
                return Err(Error::DuplicateGenerator(g.to_string()));
            }
        }
        Ok(Alphabet { generators, index })
    }

    pub fn from_names(names: &[&str]) -> Result<Self> {
        Alphabet::new(
            names
                .iter()
                .map(|n| Generator::new(n))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, g: &Generator) -> bool {
        self.index.contains_key(g)
    }

    pub fn index_of(&self, g: &Generator) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn get(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name() == name)
    }

    /// Fails on the first letter outside the alphabet.
    pub fn check(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|l| !self.contains(&l.generator)) {
            Some(l) => Err(Error::AlphabetMismatch(l.generator.to_string())),
            None => Ok(()),
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let w = Word::parse(text)?;
        self.check(&w)?;
        Ok(w)
    }
}

/// Free reduction with an alphabet check.
pub fn reduce<I: IntoIterator<Item = Letter>>(alphabet: &Alphabet, letters: I) -> Result<Word> {
    let letters: Vec<Letter> = letters.into_iter().collect();
    if let Some(l) = letters.iter().find(|l| !alphabet.contains(&l.generator)) {
        return Err(Error::AlphabetMismatch(l.generator.to_string()));
    }
    Ok(Word::from_letters(letters))
}

/// `x y x⁻¹ y⁻¹`.
pub fn commutator(x: &Word, y: &Word) -> Word {
    Word::from_letters(
        x.letters()
            .iter()
            .cloned()
            .chain(y.letters().iter().cloned())
            .chain(x.inverse().letters)
            .chain(y.inverse().letters),
    )
}

/// `by⁻¹ · x · by`, i.e. `x^by`.
pub fn conjugate(x: &Word, by: &Word) -> Word {
    Word::from_letters(
        by.inverse()
            .letters
            .into_iter()
            .chain(x.letters().iter().cloned())
            .chain(by.letters().iter().cloned()),
    )
}

/// A conjugacy class of the free group, held as the least rotation of a
/// cyclically reduced representative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CyclicWord {
    representative: Word,
}

impl CyclicWord {
    pub fn new(w: &Word) -> Self {
        let (_, core) = w.cyclic_reduction();
        let n = core.len();
        if n == 0 {
            return CyclicWord {
                representative: core,
            };
        }
        let l = core.letters();
        let best = (0..n)
            .min_by(|&i, &j| {
                l[i..]
                    .iter()
                    .chain(&l[..i])
                    .cmp(l[j..].iter().chain(&l[..j]))
            })
            .unwrap_or(0);
        CyclicWord {
            representative: Word {
                letters: l[best..].iter().chain(&l[..best]).cloned().collect(),
            },
        }
    }

    pub fn word(&self) -> &Word {
        &self.representative
    }

    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::new(&self.representative.inverse())
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.representative)
    }
}

pub fn is_conjugate(x: &Word, y: &Word) -> bool {
    CyclicWord::new(x) == CyclicWord::new(y)
}

/// Primitive root of a non-identity word: `(p, k)` with the cyclic
/// reduction of `x` equal to `pᵏ` up to rotation, `k` maximal.
pub fn root(x: &Word) -> Result<(CyclicWord, u32)> {
    if x.is_identity() {
        return Err(Error::Degenerate("root of the identity".into()));
    }
    let (_, core) = x.cyclic_reduction();
    let l = core.letters();
    let n = l.len();
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| l[i] == l[i - d]) {
            let p = Word {
                letters: l[..d].to_vec(),
            };
            return Ok((CyclicWord::new(&p), (n / d) as u32));
        }
    }
    unreachable!("d = n always divides")
}

/// Outcome of an independence test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Independence {
    Independent,
    /// Zero-based positions of the first dependent pair found.
    Dependent { first: usize, second: usize },
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent)
    }
}

/// Pairwise independence in a free group: no non-zero power of one entry
/// is conjugate to a non-zero power of another. Two non-identity words
/// fail this exactly when their roots agree up to conjugacy and inversion.
pub fn is_independent(tuple: &[Word]) -> Result<Independence> {
    let roots = tuple
        .iter()
        .map(|w| root(w).map(|(p, _)| p))
        .collect::<Result<Vec<_>>>()?;
    let inverses: Vec<CyclicWord> = roots.iter().map(CyclicWord::inverse).collect();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if roots[i] == roots[j] || roots[i] == inverses[j] {
                return Ok(Independence::Dependent {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(Independence::Independent)
}
