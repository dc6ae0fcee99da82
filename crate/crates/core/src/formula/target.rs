use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{box_minus, sf_neg, Formula, FormulaSet};

/// Shape of a member of `SF¬(Φ)` with children given as universe indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaNode {
    Atom(Arc<str>),
    Bottom,
    Not(usize),
    And(usize, usize),
    Box(usize),
}

/// The formula `Φ` under test together with its closure sets.
///
/// Every member of `SF¬(Φ)` gets a dense index (ordered by size, then
/// structurally), so labels elsewhere are bitsets over this universe.
///
/// The depth-stratified family is
/// `SF¬_0 = SF¬(Φ)` and `SF¬_{i+1} = SF¬(□⁻(SF¬_i))`: the formulas boxed at
/// level `i`, closed under subformulas and single negation. The closure step
/// is what keeps each level closed under the boolean cases of the truth lemma;
/// [`TargetFormula::sf_neg_i_unclosed`] gives the bare `{φ : □φ ∈ SF¬_i}`
/// variant for comparison.
#[derive(Clone, Debug)]
pub struct TargetFormula {
    phi: Formula,
    depth: usize,
    sf_neg: FormulaSet,
    universe: Vec<Formula>,
    index: HashMap<Formula, usize>,
    nodes: Vec<FormulaNode>,
    complement: Vec<Option<usize>>,
    levels: Vec<FixedBitSet>,
    basic: Vec<Vec<usize>>,
    atoms: Vec<(Arc<str>, usize)>,
    root: usize,
}

impl TargetFormula {
    pub fn new(phi: Formula) -> TargetFormula {
        let depth = phi.modal_depth();
        let sf_neg_set = sf_neg(&std::iter::once(phi.clone()).collect());

        let mut universe: Vec<Formula> = sf_neg_set.iter().cloned().collect();
        universe.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
        let index: HashMap<Formula, usize> = universe
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();

        let nodes: Vec<FormulaNode> = universe
            .iter()
            .map(|f| match f {
                Formula::Atom(p) => FormulaNode::Atom(p.clone()),
                Formula::Bottom => FormulaNode::Bottom,
                Formula::Not(c) => FormulaNode::Not(index[&**c]),
                Formula::And(a, b) => FormulaNode::And(index[&**a], index[&**b]),
                Formula::Box(c) => FormulaNode::Box(index[&**c]),
            })
            .collect();
        let complement = universe
            .iter()
            .map(|f| index.get(&Formula::not(f.clone())).copied())
            .collect();

        let n = universe.len();
        let mut levels = Vec::with_capacity(depth + 1);
        let mut current = sf_neg_set.clone();
        for _ in 0..=depth {
            let mut bits = FixedBitSet::with_capacity(n);
            for f in &current {
                bits.insert(index[f]);
            }
            levels.push(bits);
            current = sf_neg(&box_minus(&current));
        }
        debug_assert!(current.is_empty());

        let basic = levels
            .iter()
            .map(|bits| {
                bits.ones()
                    .filter(|&i| matches!(nodes[i], FormulaNode::Atom(_) | FormulaNode::Box(_)))
                    .collect()
            })
            .collect();
        let atoms = nodes
            .iter()
            .enumerate()
            .filter_map(|(i, node)| match node {
                FormulaNode::Atom(p) => Some((p.clone(), i)),
                _ => None,
            })
            .collect();
        let root = index[&phi];

        TargetFormula {
            phi,
            depth,
            sf_neg: sf_neg_set,
            universe,
            index,
            nodes,
            complement,
            levels,
            basic,
            atoms,
            root,
        }
    }

    pub fn phi(&self) -> &Formula {
        &self.phi
    }

    /// `d(Φ)`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `SF¬(Φ)`.
    pub fn sf_neg(&self) -> &FormulaSet {
        &self.sf_neg
    }

    /// `SF¬_i(Φ)`; empty for `i > d(Φ)`.
    pub fn sf_neg_i(&self, i: usize) -> FormulaSet {
        match self.levels.get(i) {
            Some(bits) => bits.ones().map(|j| self.universe[j].clone()).collect(),
            None => FormulaSet::new(),
        }
    }

    /// The level sets without the closure step:
    /// `{φ ∈ SF¬(Φ) : □φ ∈ level_{i-1}}`.
    pub fn sf_neg_i_unclosed(&self, i: usize) -> FormulaSet {
        let mut current = self.sf_neg.clone();
        for _ in 0..i {
            current = self
                .sf_neg
                .iter()
                .filter(|f| current.contains(&Formula::boxed((*f).clone())))
                .cloned()
                .collect();
        }
        current
    }

    /// Bitset form of `SF¬_i(Φ)`, `None` above `d(Φ)`.
    pub fn level(&self, i: usize) -> Option<&FixedBitSet> {
        self.levels.get(i)
    }

    /// Atoms and `□`-formulas of `SF¬_i(Φ)`: the members whose truth is not
    /// fixed by the others propositionally.
    pub fn basic(&self, i: usize) -> &[usize] {
        self.basic.get(i).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn universe(&self) -> &[Formula] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn node(&self, i: usize) -> &FormulaNode {
        &self.nodes[i]
    }

    /// Index of `¬φ` for the member at `i`, if that negation is in `SF¬(Φ)`.
    pub fn complement(&self, i: usize) -> Option<usize> {
        self.complement[i]
    }

    /// Atoms of `SF¬(Φ)` with their universe indices.
    pub fn atoms(&self) -> &[(Arc<str>, usize)] {
        &self.atoms
    }

    /// Universe index of `Φ`.
    pub fn root_index(&self) -> usize {
        self.root
    }

    /// Evaluates every member of `SF¬_i(Φ)` once the basic members of that
    /// level are fixed by `basic_true`; returns the true ones.
    pub fn complete_type(&self, i: usize, basic_true: &FixedBitSet) -> FixedBitSet {
        let n = self.len();
        let mut out = FixedBitSet::with_capacity(n);
        let Some(level) = self.levels.get(i) else {
            return out;
        };
        // Universe order is by size, so children are evaluated first.
        let mut value = vec![false; n];
        for j in level.ones() {
            value[j] = match &self.nodes[j] {
                FormulaNode::Atom(_) | FormulaNode::Box(_) => basic_true.contains(j),
                FormulaNode::Bottom => false,
                FormulaNode::Not(c) => !value[*c],
                FormulaNode::And(a, b) => value[*a] && value[*b],
            };
            if value[j] {
                out.insert(j);
            }
        }
        out
    }
}
