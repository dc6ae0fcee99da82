//! Labeled tableau for `K` plus quasi-density, with path-signature blocking.
//!
//! Branches carry labeled formulas `σ : φ` and accessibility assertions
//! `σ R τ`. The propositional rules, the `□` and `¬□` rules and the structural
//! rule for each density pair `(k, l)` are applied by [`Branch::expand`] and
//! [`Branch::apply_structural`]; [`saturate`] drives them depth-first with
//! chronological backtracking over branching rules.
//!
//! With [`Blocking::PathSignature`] every label's type over `SF¬_{Δ(σ)}(Φ)` is
//! fixed by an analytic cut on atoms and boxes. A new label whose type equals
//! a settled sibling's (so its path signature is already present) is merged
//! into that sibling, and every path position deeper than `d(Φ)` is the
//! single sink label, which carries a self-loop. Distinct settled labels thus
//! have distinct path signatures, and the number of labels is bounded by the
//! number of signatures plus one.

mod branch;

use std::sync::Arc;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::formula::{FormulaSet, TargetFormula};
use crate::kripke::{Frame, KLSpec, Model, PointedModel, Relation};

pub use branch::{Branch, Justification, Label, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("no rule applies to the branch")]
    NoApplicableRule,
    #[error("world limit exceeded ({worlds} labels)")]
    ResourceLimit { worlds: usize },
    #[error("pair ({k},{l}) is not in the KL set")]
    UnknownPair { k: usize, l: usize },
    #[error("chain does not follow the branch's edges or has the wrong length")]
    InvalidChain,
    #[error("formula `{0}` is not in SF¬(Φ)")]
    ForeignFormula(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Blocking {
    /// Plain rule application; only terminates when no structural rule fires.
    None,
    PathSignature,
}

/// How structural-rule instances are scheduled. The density pairs are served
/// round-robin, each instance once, after all other rules are exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StructuralFairness {
    #[default]
    RoundRobin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableauConfig {
    pub max_worlds: usize,
    pub max_steps: usize,
    pub blocking: Blocking,
    pub structural_fairness: StructuralFairness,
    pub time_budget: Option<Duration>,
}

impl Default for TableauConfig {
    fn default() -> Self {
        TableauConfig {
            max_worlds: 512,
            max_steps: 2_000_000,
            blocking: Blocking::PathSignature,
            structural_fairness: StructuralFairness::RoundRobin,
            time_budget: None,
        }
    }
}

/// Which budget ran out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResourceKind {
    Steps(usize),
    Worlds(usize),
    Time(Duration),
}

/// The pointed model read off an open saturated branch, with each world's
/// label.
#[derive(Debug, Clone)]
pub struct CanonicalPrefix {
    pub model: PointedModel,
    pub labels: Vec<FormulaSet>,
    /// Creation depth of each world (the sink reports `d(Φ) + 1`).
    pub depths: Vec<usize>,
    pub sink: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum SaturationResult {
    Open(CanonicalPrefix),
    Closed,
    ResourceLimit(ResourceKind),
}

impl SaturationResult {
    pub fn is_open(&self) -> bool {
        matches!(self, SaturationResult::Open(_))
    }
}

/// Runs the tableau from `s : Φ`. Returns the first open saturated branch,
/// `Closed` when every branch closes, or `ResourceLimit` when a budget ran
/// out before either could be established.
pub fn saturate(target: &TargetFormula, kl: &KLSpec, config: &TableauConfig) -> SaturationResult {
    saturate_traced(target, kl, config, &mut |_| {})
}

/// [`saturate`], reporting each rule application as one line:
/// `<rule> <label>[ -> <label>] [<formula>]`, prefixed with the branch depth.
pub fn saturate_traced(
    target: &TargetFormula,
    kl: &KLSpec,
    config: &TableauConfig,
    trace: &mut dyn FnMut(&str),
) -> SaturationResult {
    let start = Instant::now();
    let target = Arc::new(target.clone());
    let kl_arc = Arc::new(kl.clone());
    let mut stack = vec![Branch::new(target.clone(), kl_arc, config)];
    let mut steps = 0usize;
    let mut limited: Option<ResourceKind> = None;

    'branches: while let Some(mut branch) = stack.pop() {
        loop {
            if branch.is_closed() {
                trace(&format!("[{}] closed", stack.len()));
                continue 'branches;
            }
            steps += 1;
            if steps > config.max_steps {
                return SaturationResult::ResourceLimit(ResourceKind::Steps(config.max_steps));
            }
            if let Some(budget) = config.time_budget {
                if steps.is_multiple_of(256) && start.elapsed() > budget {
                    return SaturationResult::ResourceLimit(ResourceKind::Time(budget));
                }
            }
            let before = branch.log().len();
            let next = match branch.expand(config) {
                Ok(mut out) => {
                    let first = out.remove(0);
                    while let Some(alt) = out.pop() {
                        stack.push(alt);
                    }
                    first
                }
                Err(TableauError::NoApplicableRule) => match branch.next_structural() {
                    Some((chain, pair)) => match branch.apply_structural(&chain, pair, config) {
                        Ok(b) => b,
                        Err(TableauError::ResourceLimit { worlds }) => {
                            limited = Some(ResourceKind::Worlds(worlds));
                            continue 'branches;
                        }
                        Err(e) => unreachable!("structural rule on its own instance: {e}"),
                    },
                    None => {
                        trace(&format!("[{}] open", stack.len()));
                        return SaturationResult::Open(extract_prefix(&branch));
                    }
                },
                Err(TableauError::ResourceLimit { worlds }) => {
                    limited = Some(ResourceKind::Worlds(worlds));
                    continue 'branches;
                }
                Err(e) => unreachable!("expand only fails with a limit: {e}"),
            };
            for j in &next.log()[before..] {
                trace(&format!("[{}] {}", stack.len(), describe(&next, j)));
            }
            branch = next;
        }
    }
    match limited {
        Some(kind) => SaturationResult::ResourceLimit(kind),
        None => SaturationResult::Closed,
    }
}

fn describe(b: &Branch, j: &Justification) -> String {
    let mut s = format!("{} {}", j.rule, j.label);
    if let Some(o) = j.other {
        s.push_str(&format!(" -> {o}"));
    }
    if let Some(f) = j.formula {
        s.push_str(&format!(" {}", b.target().universe()[f]));
    }
    s
}

/// Reads the pointed model off a branch: one world per live label (named
/// `w<label>`, the sink `sink`), the branch's edges, and an atom true exactly
/// where the label carries it.
pub fn extract_prefix(branch: &Branch) -> CanonicalPrefix {
    let live: Vec<Label> = branch.live().collect();
    let mut pos = vec![usize::MAX; live.iter().max().map_or(0, |m| m + 1)];
    for (i, &w) in live.iter().enumerate() {
        pos[w] = i;
    }
    let names: Vec<String> = live
        .iter()
        .map(|&w| {
            if branch.is_sink(w) {
                "sink".to_string()
            } else {
                format!("w{w}")
            }
        })
        .collect();
    let rel = Relation::from_pairs(
        live.len(),
        branch.edges().iter().map(|&(a, b)| (pos[a], pos[b])),
    );
    let target = branch.target();
    let mut valuation = std::collections::BTreeMap::new();
    for (atom, idx) in target.atoms() {
        let mut set = FixedBitSet::with_capacity(live.len());
        for (i, &w) in live.iter().enumerate() {
            if branch.label_bits(w).contains(*idx) {
                set.insert(i);
            }
        }
        valuation.insert(atom.to_string(), set);
    }
    let model = Model::new(Frame::new(names, rel), valuation);
    let root = pos[branch.root()];
    CanonicalPrefix {
        model: PointedModel::new(model, root).expect("root label is live"),
        labels: live.iter().map(|&w| branch.labels_of(w)).collect(),
        depths: live.iter().map(|&w| branch.depth(w)).collect(),
        sink: branch.sink().map(|s| pos[s]),
    }
}
