use std::collections::HashMap;

use rayon::prelude::*;

use super::fibre::{fibre_product_with, FibreComponent};
use super::{BaseGraph, GraphImmersion, GraphMap, LabeledGraph};
use crate::error::{Error, Result};
use crate::words::Word;

/// Components of one fibre product `Yᵢ × Yⱼ` (with `i ≤ j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSummary {
    pub first: usize,
    pub second: usize,
    pub components: Vec<FibreComponent>,
}

/// A non-trivial intersection `Hᵢ ∩ Hⱼ^g`: `element` lies in `Hᵢ`, and
/// `conjugator⁻¹ · h · conjugator = element` for some `h ∈ Hⱼ`. When
/// `first == second` the conjugator is outside `Hᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MalnormalWitness {
    pub first: usize,
    pub second: usize,
    pub component: usize,
    pub rank: i64,
    pub element: Word,
    pub conjugator: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub pairs: Vec<PairSummary>,
    pub witness: Option<MalnormalWitness>,
}

impl FamilyReport {
    pub fn certified(&self) -> bool {
        self.witness.is_none()
    }
}

fn check_pair(
    family: &[GraphImmersion],
    i: usize,
    j: usize,
) -> Result<(PairSummary, Option<MalnormalWitness>)> {
    let (a, b) = (&family[i], &family[j]);
    let p = fibre_product_with(a, b, i == j);
    let bad = p
        .components
        .iter()
        .position(|c| !c.is_tree && !c.is_diagonal);
    let witness = match bad {
        None => None,
        Some(c) => {
            let (root, path) = p
                .loop_in_component(c)
                .expect("non-tree component has a cycle");
            let base = a.base();
            let ell = base.word_of(&path);
            let (y1, y2) = p.vertex_pairs[root];
            let w1 = a.vertex_words()?;
            let w2 = b.vertex_words()?;
            let (p1, p2) = match (&w1[y1], &w2[y2]) {
                (Some(p1), Some(p2)) => (p1.clone(), p2.clone()),
                _ => return Err(Error::InvalidGraph("immersion is not connected".into())),
            };
            Some(MalnormalWitness {
                first: i,
                second: j,
                component: c,
                rank: p.components[c].rank,
                element: p1.concat(&ell).concat(&p1.inverse()),
                conjugator: p2.concat(&p1.inverse()),
            })
        }
    };
    Ok((
        PairSummary {
            first: i,
            second: j,
            components: p.components,
        },
        witness,
    ))
}

/// Checks that `{Hᵢ}` is a malnormal family: every component of every
/// `Yᵢ × Yⱼ` is a tree, except the diagonal component when `i = j`.
/// Pairs are examined concurrently and reported in `(i, j)` order.
pub fn malnormal_family_check(family: &[GraphImmersion]) -> Result<FamilyReport> {
    if let Some(first) = family.first() {
        if family.iter().any(|y| y.base() != first.base()) {
            return Err(Error::BaseMismatch);
        }
        if family.iter().any(|y| y.domain().basepoint().is_none()) {
            return Err(Error::MissingBasepoint);
        }
    }
    let pairs: Vec<(usize, usize)> = (0..family.len())
        .flat_map(|i| (i..family.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<_> = pairs
        .par_iter()
        .map(|&(i, j)| check_pair(family, i, j))
        .collect::<Result<_>>()?;
    let mut witness = None;
    let mut summaries = Vec::with_capacity(results.len());
    for (s, w) in results {
        if witness.is_none() {
            witness = w;
        }
        summaries.push(s);
    }
    Ok(FamilyReport {
        pairs: summaries,
        witness,
    })
}

/// Fast single-subgroup test: no off-diagonal component of `Y × Y` has a
/// cycle.
pub fn is_malnormal(y: &GraphImmersion) -> bool {
    fibre_product_with(y, y, true)
        .components
        .iter()
        .all(|c| c.is_tree || c.is_diagonal)
}

/// An automorphism of a base graph, given by where it sends each edge and
/// each vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionElement {
    pub edge_perm: Vec<usize>,
    pub vertex_perm: Vec<usize>,
}

impl ActionElement {
    pub fn identity(base: &BaseGraph) -> Self {
        ActionElement {
            edge_perm: (0..base.edge_count()).collect(),
            vertex_perm: (0..base.vertex_count()).collect(),
        }
    }

    pub fn validate(&self, base: &BaseGraph) -> Result<()> {
        let bij = |p: &[usize], n: usize| {
            let mut seen = vec![false; n];
            p.len() == n && p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
        };
        if !bij(&self.edge_perm, base.edge_count()) || !bij(&self.vertex_perm, base.vertex_count()) {
            return Err(Error::InvalidAction("not a bijection".into()));
        }
        for (i, e) in base.edges().iter().enumerate() {
            let f = base.edge(self.edge_perm[i]);
            if f.src != self.vertex_perm[e.src] || f.dst != self.vertex_perm[e.dst] {
                return Err(Error::InvalidAction(format!(
                    "edge {} is not carried to an edge with matching ends",
                    e.name
                )));
            }
        }
        Ok(())
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &ActionElement) -> ActionElement {
        ActionElement {
            edge_perm: other.edge_perm.iter().map(|&e| self.edge_perm[e]).collect(),
            vertex_perm: other.vertex_perm.iter().map(|&v| self.vertex_perm[v]).collect(),
        }
    }

    /// Relabels an immersion: edges and vertex images are pushed forward.
    pub fn apply(&self, y: &GraphImmersion) -> GraphImmersion {
        let g = y.domain();
        let edges = g
            .edges()
            .iter()
            .map(|e| super::Edge {
                label: self.edge_perm[e.label],
                ..*e
            })
            .collect();
        let domain = LabeledGraph {
            vertex_count: g.vertex_count(),
            edges,
            basepoint: g.basepoint(),
        };
        GraphImmersion {
            map: GraphMap {
                domain,
                base: y.base().clone(),
                vertex_map: y.vertex_map().iter().map(|&v| self.vertex_perm[v]).collect(),
            },
        }
    }
}

/// A finite group of base-graph automorphisms, stored as its full element
/// list (identity first, then in order of discovery from the generators).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelabelingAction {
    elements: Vec<ActionElement>,
}

impl RelabelingAction {
    pub fn generated_by(base: &BaseGraph, generators: &[ActionElement]) -> Result<Self> {
        for g in generators {
            g.validate(base)?;
        }
        let id = ActionElement::identity(base);
        let mut elements = vec![id.clone()];
        let mut seen: HashMap<ActionElement, ()> = HashMap::from([(id, ())]);
        let mut k = 0;
        while k < elements.len() {
            for g in generators {
                let next = g.compose(&elements[k]);
                if !seen.contains_key(&next) {
                    seen.insert(next.clone(), ());
                    elements.push(next);
                }
            }
            k += 1;
        }
        Ok(RelabelingAction { elements })
    }

    /// On a rose with edges `e₀ … e_{N-1}` (in that order), the rotation
    /// `e_c ↦ e_{c+1 mod N}` generates `Z/N`. Element `k` is the shift by `k`.
    pub fn cyclic_rotation(base: &BaseGraph) -> Result<Self> {
        if !base.is_rose() {
            return Err(Error::InvalidAction("rotation needs a rose".into()));
        }
        let n = base.edge_count();
        let shift = ActionElement {
            edge_perm: (0..n).map(|e| (e + 1) % n.max(1)).collect(),
            vertex_perm: vec![0],
        };
        RelabelingAction::generated_by(base, &[shift])
    }

    pub fn elements(&self) -> &[ActionElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslateReport {
    pub translates: usize,
    pub family: FamilyReport,
}

impl TranslateReport {
    pub fn certified(&self) -> bool {
        self.family.certified()
    }

    /// What a certificate yields in the quotient: malnormality if it is
    /// torsion-free, almost malnormality otherwise.
    pub fn conclusion(&self, torsion_free: bool) -> Option<&'static str> {
        match (self.certified(), torsion_free) {
            (false, _) => None,
            (true, true) => Some("malnormal"),
            (true, false) => Some("almost malnormal"),
        }
    }
}

/// Malnormal family check on the translates `g · Y` for each given
/// automorphism `g` (coset representatives of the acting group modulo the
/// setwise stabiliser are enough).
pub fn translate_family_check(
    base: &BaseGraph,
    subgroup: &GraphImmersion,
    translates: &[ActionElement],
) -> Result<TranslateReport> {
    if subgroup.base().as_ref() != base {
        return Err(Error::BaseMismatch);
    }
    for g in translates {
        g.validate(base)?;
    }
    let family: Vec<GraphImmersion> = translates.iter().map(|g| g.apply(subgroup)).collect();
    Ok(TranslateReport {
        translates: family.len(),
        family: malnormal_family_check(&family)?,
    })
}
