use std::sync::Arc;

use super::{graph_of_subgroup, BaseGraph, GraphImmersion, RelabelingAction};
use crate::error::{Error, Result};
use crate::words::{conjugate, Generator, Letter, Word};

/// Result of rewriting a word of `⟨α, β | β^N⟩` into the kernel of the
/// map to `Z/N` sending `α ↦ 0`, `β ↦ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelImage {
    /// Word in the free basis `e_c = β^c α β^-c`, `0 ≤ c < N`.
    Member(Word),
    /// The word maps to this non-zero residue.
    Outside { beta_exponent: u32 },
}

/// Reidemeister–Schreier rewriting for `Z * Z/N` with coset
/// representatives `β^c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelRewriting {
    modulus: u32,
    alpha: Generator,
    beta: Generator,
    edges: Vec<Generator>,
}

impl KernelRewriting {
    pub fn new(modulus: u32, alpha: Generator, beta: Generator) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Degenerate("modulus must be positive".into()));
        }
        if alpha == beta {
            return Err(Error::DuplicateGenerator(alpha.to_string()));
        }
        let edges = (0..modulus)
            .map(|c| Generator::new(&format!("e{c}")))
            .collect::<Result<_>>()?;
        Ok(KernelRewriting {
            modulus,
            alpha,
            beta,
            edges,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn alpha(&self) -> &Generator {
        &self.alpha
    }

    pub fn beta(&self) -> &Generator {
        &self.beta
    }

    /// Name of the basis element `e_c`.
    pub fn edge_name(&self, c: u32) -> &Generator {
        &self.edges[(c % self.modulus) as usize]
    }

    /// Rose with one edge per basis element, in order `e0 … e{N-1}`.
    pub fn base(&self) -> BaseGraph {
        BaseGraph::rose(&self.edges).expect("distinct edge names")
    }

    /// Deck action of `Z/N`: `e_c ↦ e_{c+1}`.
    pub fn rotation(&self, base: &BaseGraph) -> Result<RelabelingAction> {
        RelabelingAction::cyclic_rotation(base)
    }

    pub fn rewrite(&self, w: &Word) -> Result<KernelImage> {
        let n = i64::from(self.modulus);
        let mut c: i64 = 0;
        let mut out = Vec::new();
        for l in w.letters() {
            if l.generator == self.beta {
                c += if l.inverse { -1 } else { 1 };
            } else if l.generator == self.alpha {
                out.push(Letter {
                    generator: self.edges[c.rem_euclid(n) as usize].clone(),
                    inverse: l.inverse,
                });
            } else {
                return Err(Error::AlphabetMismatch(l.generator.to_string()));
            }
        }
        let r = c.rem_euclid(n) as u32;
        if r != 0 {
            return Ok(KernelImage::Outside { beta_exponent: r });
        }
        Ok(KernelImage::Member(Word::from_letters(out)))
    }

    /// Rewrites words that must lie in the kernel.
    pub fn rewrite_member(&self, w: &Word) -> Result<Word> {
        match self.rewrite(w)? {
            KernelImage::Member(x) => Ok(x),
            KernelImage::Outside { beta_exponent } => Err(Error::Precondition(format!(
                "`{w}` maps to {beta_exponent} mod {}",
                self.modulus
            ))),
        }
    }

    /// Core immersion of the subgroup generated by kernel words.
    pub fn subgroup_graph(&self, base: &Arc<BaseGraph>, words: &[Word]) -> Result<GraphImmersion> {
        let images = words
            .iter()
            .map(|w| self.rewrite_member(w))
            .collect::<Result<Vec<_>>>()?;
        graph_of_subgroup(base, &images)
    }
}

/// `α^β (α^{β²})⁻¹`
pub fn u_word(alpha: &Generator, beta: &Generator) -> Word {
    let a = Word::generator(alpha);
    let b = Word::generator(beta);
    conjugate(&a, &b).concat(&conjugate(&a, &b.pow(2)).inverse())
}

/// `α^β (α^{β⁻¹})⁻¹`
pub fn v_word(alpha: &Generator, beta: &Generator) -> Word {
    let a = Word::generator(alpha);
    let b = Word::generator(beta);
    conjugate(&a, &b).concat(&conjugate(&a, &b.inverse()).inverse())
}
