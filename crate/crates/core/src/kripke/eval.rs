use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::Model;
use crate::formula::Formula;

/// Bottom-up evaluator that memoizes the extension (set of satisfying worlds)
/// of every formula it has seen.
pub struct Evaluator<'m> {
    model: &'m Model,
    cache: HashMap<Formula, FixedBitSet>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Model) -> Evaluator<'m> {
        Evaluator {
            model,
            cache: HashMap::new(),
        }
    }

    pub fn holds(&mut self, x: usize, phi: &Formula) -> bool {
        self.extension(phi).contains(x)
    }

    /// `{x : M, x ⊨ φ}`.
    pub fn extension(&mut self, phi: &Formula) -> &FixedBitSet {
        if !self.cache.contains_key(phi) {
            let ext = self.compute(phi);
            self.cache.insert(phi.clone(), ext);
        }
        &self.cache[phi]
    }

    fn compute(&mut self, phi: &Formula) -> FixedBitSet {
        let n = self.model.frame().len();
        match phi {
            Formula::Atom(p) => {
                let mut out = FixedBitSet::with_capacity(n);
                if let Some(set) = self.model.valuation().get(&**p) {
                    out.union_with(set);
                }
                out
            }
            Formula::Bottom => FixedBitSet::with_capacity(n),
            Formula::Not(f) => {
                let mut out = self.extension(f).clone();
                out.toggle_range(..);
                out
            }
            Formula::And(a, b) => {
                let mut out = self.extension(a).clone();
                out.intersect_with(self.extension(b));
                out
            }
            Formula::Box(f) => {
                let inner = self.extension(f).clone();
                let rel = self.model.frame().rel();
                let mut out = FixedBitSet::with_capacity(n);
                for x in 0..n {
                    if rel.successors(x).is_subset(&inner) {
                        out.insert(x);
                    }
                }
                out
            }
        }
    }
}
