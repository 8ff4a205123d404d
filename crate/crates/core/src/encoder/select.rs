//! Search for tuples of words in `⟨u, v⟩` generating a malnormal subgroup.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stallings::{
    graph_of_subgroup, is_malnormal, malnormal_family_check, translate_family_check, u_word,
    v_word, BaseGraph, FamilyReport, GraphImmersion, KernelRewriting,
};
use crate::words::{Generator, Letter, Word};

/// Smallest modulus accepted by [`select_malnormal_words`].
pub const MIN_MODULUS: u32 = 7;

/// Limits for [`select_malnormal_words`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionBudget {
    /// Longest word length tried.
    pub max_word_length: usize,
    /// Candidate extensions examined at one word length before moving on
    /// to the next.
    pub per_length: u64,
    /// Candidate extensions examined in total before giving up.
    pub max_candidates: u64,
}

impl Default for SelectionBudget {
    fn default() -> Self {
        SelectionBudget {
            max_word_length: 10,
            per_length: 20_000,
            max_candidates: 1_000_000,
        }
    }
}

/// Fibre-product summary for one pair of a checked family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub first: usize,
    pub second: usize,
    pub components: usize,
    pub vertices: usize,
    pub edges: usize,
    pub cyclic_components: usize,
    pub diagonal_components: usize,
}

fn pair_records(r: &FamilyReport) -> Vec<PairRecord> {
    r.pairs
        .iter()
        .map(|p| PairRecord {
            first: p.first,
            second: p.second,
            components: p.components.len(),
            vertices: p.components.iter().map(|c| c.vertices).sum(),
            edges: p.components.iter().map(|c| c.edges).sum(),
            cyclic_components: p.components.iter().filter(|c| !c.is_tree).count(),
            diagonal_components: p.components.iter().filter(|c| c.is_diagonal).count(),
        })
        .collect()
}

/// Everything needed to re-check a selected tuple.
///
/// `(a)` the tuple freely generates a subgroup of rank `tuple.len()` of
/// `F(u, v)`; `(b)` that subgroup is malnormal there; `(c)` `⟨t, u, v⟩`
/// rewritten into the kernel of `⟨t, w | w^N⟩ → Z/N` has all `N` rotation
/// translates forming a malnormal family; `(d)` the same holds directly
/// for `⟨t, c₀, …⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MalnormalCertificate {
    pub modulus: u32,
    /// Words in the letters `u`, `v`.
    pub tuple: Vec<String>,
    pub rank: i64,
    pub malnormal_in_uv: bool,
    pub base_rank: i64,
    pub base_certified: bool,
    pub base_pairs: Vec<PairRecord>,
    pub combined_rank: i64,
    pub combined_certified: bool,
    pub combined_pairs: Vec<PairRecord>,
}

impl MalnormalCertificate {
    pub fn is_valid(&self) -> bool {
        self.rank == self.tuple.len() as i64
            && self.malnormal_in_uv
            && self.base_rank == 3
            && self.base_certified
            && self.combined_rank == self.tuple.len() as i64 + 1
            && self.combined_certified
    }

    /// Recomputes the certificate from its tuple and modulus.
    pub fn revalidate(&self) -> Result<bool> {
        let letters = Letters::new();
        let tuple = self
            .tuple
            .iter()
            .map(|s| Word::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let fresh = certify(&letters, self.modulus, &tuple)?;
        Ok(fresh.is_valid() && &fresh == self)
    }
}

/// A selected tuple and its certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub u: Word,
    pub v: Word,
    /// `c₀ … c_{m+1}` in the letters `u`, `v`.
    pub tuple_uv: Vec<Word>,
    /// The same words in the letters `t`, `w`.
    pub tuple: Vec<Word>,
    pub certificate: MalnormalCertificate,
    pub examined: u64,
}

struct Letters {
    t: Generator,
    w: Generator,
    u: Generator,
    v: Generator,
}

impl Letters {
    fn new() -> Self {
        let g = |s: &str| Generator::new(s).expect("fixed names are valid");
        Letters {
            t: g("t"),
            w: g("w"),
            u: g("u"),
            v: g("v"),
        }
    }

    fn uv_base(&self) -> Arc<BaseGraph> {
        Arc::new(BaseGraph::rose(&[self.u.clone(), self.v.clone()]).expect("two names"))
    }

    fn expand(&self, x: &Word) -> Word {
        let map = HashMap::from([
            (self.u.clone(), u_word(&self.t, &self.w)),
            (self.v.clone(), v_word(&self.t, &self.w)),
        ]);
        x.substitute(&map)
    }
}

fn translate_check(
    letters: &Letters,
    modulus: u32,
    words: &[Word],
) -> Result<(i64, bool, Vec<PairRecord>)> {
    let rw = KernelRewriting::new(modulus, letters.t.clone(), letters.w.clone())?;
    let base = Arc::new(rw.base());
    let y = rw.subgroup_graph(&base, words)?;
    let rank = y.basepoint_rank().unwrap_or(0);
    let act = rw.rotation(&base)?;
    let report = translate_family_check(&base, &y, act.elements())?;
    Ok((rank, report.certified(), pair_records(&report.family)))
}

fn certify(letters: &Letters, modulus: u32, tuple: &[Word]) -> Result<MalnormalCertificate> {
    let uv = letters.uv_base();
    let y = graph_of_subgroup(&uv, tuple)?;
    let rank = y.basepoint_rank().unwrap_or(0);
    let malnormal_in_uv = malnormal_family_check(std::slice::from_ref(&y))?.certified();
    let t = Word::generator(&letters.t);
    let base_words = [
        t.clone(),
        u_word(&letters.t, &letters.w),
        v_word(&letters.t, &letters.w),
    ];
    let (base_rank, base_certified, base_pairs) = translate_check(letters, modulus, &base_words)?;
    let mut combined = vec![t];
    combined.extend(tuple.iter().map(|c| letters.expand(c)));
    let (combined_rank, combined_certified, combined_pairs) =
        translate_check(letters, modulus, &combined)?;
    Ok(MalnormalCertificate {
        modulus,
        tuple: tuple.iter().map(Word::to_string).collect(),
        rank,
        malnormal_in_uv,
        base_rank,
        base_certified,
        base_pairs,
        combined_rank,
        combined_certified,
        combined_pairs,
    })
}

/// Every vertex of the core has all four half-edges: the subgroup has
/// finite index in `F(u, v)`.
fn is_finite_cover(y: &GraphImmersion) -> bool {
    let mut degree = vec![0usize; y.domain().vertex_count()];
    for e in y.domain().edges() {
        degree[e.src] += 1;
        degree[e.dst] += 1;
    }
    degree.iter().all(|&d| d == 4)
}

/// Reduced words in `u, v` of length exactly `len`, in lexicographic order.
fn word_pool(letters: &Letters, len: usize) -> Vec<Word> {
    let alphabet = [
        Letter::plain(letters.u.clone()),
        Letter::inverted(letters.u.clone()),
        Letter::plain(letters.v.clone()),
        Letter::inverted(letters.v.clone()),
    ];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for l in &alphabet {
                if w.last().is_some_and(|x| x.cancels(l)) {
                    continue;
                }
                let mut x = w.clone();
                x.push(l.clone());
                next.push(x);
            }
        }
        layer = next;
    }
    layer
        .into_iter()
        .map(Word::from_letters)
        .collect()
}

struct Search<'a> {
    letters: &'a Letters,
    uv: Arc<BaseGraph>,
    pool: Vec<Word>,
    target: usize,
    modulus: u32,
    examined: u64,
    limit: u64,
}

impl Search<'_> {
    /// Depth-first over strictly increasing index tuples. Every prefix must
    /// already be a free basis of a malnormal subgroup: a basis subset of a
    /// malnormal free subgroup spans a free factor of it, which is again
    /// malnormal, so nothing is lost by pruning. A proper prefix must also
    /// have infinite index, since a malnormal subgroup of finite index is
    /// the whole (rank two) group.
    fn extend(&mut self, prefix: &mut Vec<usize>, start: usize) -> Result<Option<MalnormalCertificate>> {
        if prefix.len() == self.target {
            let tuple: Vec<Word> = prefix.iter().map(|&i| self.pool[i].clone()).collect();
            let cert = certify(self.letters, self.modulus, &tuple)?;
            return Ok(cert.is_valid().then_some(cert));
        }
        let remaining = self.target - prefix.len();
        for i in start..self.pool.len() + 1 - remaining {
            if self.examined >= self.limit {
                return Ok(None);
            }
            self.examined += 1;
            prefix.push(i);
            let words: Vec<Word> = prefix.iter().map(|&k| self.pool[k].clone()).collect();
            let y = graph_of_subgroup(&self.uv, &words)?;
            let extendable = prefix.len() == self.target || !is_finite_cover(&y);
            if extendable && y.basepoint_rank() == Some(prefix.len() as i64) && is_malnormal(&y) {
                if let Some(cert) = self.extend(prefix, i + 1)? {
                    return Ok(Some(cert));
                }
            }
            prefix.pop();
        }
        Ok(None)
    }
}

/// Finds `m + 2` words in `u = t^w (t^{w²})⁻¹`, `v = t^w (t^{w⁻¹})⁻¹`
/// freely generating a malnormal subgroup of `⟨u, v⟩`, certified as
/// described on [`MalnormalCertificate`].
///
/// Tuples consist of distinct reduced words of one common length. Lengths
/// are tried in increasing order, each with an allowance of
/// `per_length` candidate extensions; within a length, tuples are tried in
/// lexicographic order. The first certified tuple wins.
pub fn select_malnormal_words(m: usize, modulus: u32, budget: &SelectionBudget) -> Result<Selection> {
    if modulus < MIN_MODULUS {
        return Err(Error::Threshold(modulus));
    }
    let letters = Letters::new();
    let target = m + 2;
    let mut examined = 0u64;
    for len in 1..=budget.max_word_length {
        let allowance = budget.per_length.min(budget.max_candidates - examined);
        if allowance == 0 {
            break;
        }
        let mut search = Search {
            letters: &letters,
            uv: letters.uv_base(),
            pool: word_pool(&letters, len),
            target,
            modulus,
            examined: 0,
            limit: allowance,
        };
        if search.pool.len() < target {
            continue;
        }
        let found = search.extend(&mut Vec::with_capacity(target), 0)?;
        examined += search.examined;
        if let Some(certificate) = found {
            let tuple_uv: Vec<Word> = certificate
                .tuple
                .iter()
                .map(|s| Word::parse(s))
                .collect::<Result<_>>()?;
            let tuple = tuple_uv.iter().map(|c| letters.expand(c)).collect();
            return Ok(Selection {
                u: u_word(&letters.t, &letters.w),
                v: v_word(&letters.t, &letters.w),
                tuple_uv,
                tuple,
                certificate,
                examined,
            });
        }
    }
    Err(Error::BudgetExhausted { examined })
}
