use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{Blocking, TableauConfig, TableauError};
use crate::formula::{Formula, FormulaNode, FormulaSet, TargetFormula};
use crate::kripke::{KLSpec, Relation};

pub type Label = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    NotNot,
    And,
    Or,
    Box,
    Diamond,
    Cut,
    Settle,
    Merge,
    Structural,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::NotNot => "not-not",
            Rule::And => "and",
            Rule::Or => "or",
            Rule::Box => "box",
            Rule::Diamond => "diamond",
            Rule::Cut => "cut",
            Rule::Settle => "settle",
            Rule::Merge => "merge",
            Rule::Structural => "structural",
        };
        f.write_str(s)
    }
}

/// One log entry: which rule fired, on which label(s), with which formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Justification {
    pub rule: Rule,
    pub label: Label,
    pub other: Option<Label>,
    pub formula: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    /// Created but its type is not fixed yet, or not yet compared with twins.
    Fresh,
    Settled,
    Merged(Label),
    Sink,
}

#[derive(Clone, Debug)]
struct World {
    label: FixedBitSet,
    depth: usize,
    parent: Option<Label>,
    status: Status,
    diamonds_done: FixedBitSet,
}

/// A tableau branch: labeled formulas, accessibility assertions between
/// labels, the fresh-label counter (the world vector's length) and the log.
#[derive(Clone)]
pub struct Branch {
    target: Arc<TargetFormula>,
    kl: Arc<KLSpec>,
    blocking: Blocking,
    worlds: Vec<World>,
    edges: BTreeSet<(Label, Label)>,
    processed: BTreeSet<(usize, Label, Label)>,
    sink: Option<Label>,
    structural_cursor: usize,
    log: Vec<Justification>,
}

impl fmt::Debug for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_map();
        for w in self.live() {
            let label: Vec<String> = self.labels_of(w).iter().map(|x| x.to_string()).collect();
            d.entry(&w, &label);
        }
        d.finish()?;
        write!(f, " edges={:?}", self.edges)
    }
}

impl Branch {
    /// The initial branch `s : Φ`.
    pub fn new(target: Arc<TargetFormula>, kl: Arc<KLSpec>, config: &TableauConfig) -> Branch {
        let mut b = Branch {
            target,
            kl,
            blocking: config.blocking,
            worlds: Vec::new(),
            edges: BTreeSet::new(),
            processed: BTreeSet::new(),
            sink: None,
            structural_cursor: 0,
            log: Vec::new(),
        };
        let root = b.push_world(0, None);
        let phi = b.target.root_index();
        b.worlds[root].label.insert(phi);
        b
    }

    pub fn target(&self) -> &TargetFormula {
        &self.target
    }

    pub fn kl(&self) -> &KLSpec {
        &self.kl
    }

    pub fn root(&self) -> Label {
        0
    }

    /// Adds a labeled formula; the formula must belong to `SF¬(Φ)`.
    pub fn add_formula(&mut self, label: Label, f: &Formula) -> Result<(), TableauError> {
        let i = self
            .target
            .index_of(f)
            .ok_or_else(|| TableauError::ForeignFormula(f.to_string()))?;
        self.worlds[label].label.insert(i);
        Ok(())
    }

    /// Adds a new label as a successor of `parent`.
    pub fn add_successor(&mut self, parent: Label) -> Label {
        let depth = self.worlds[parent].depth + 1;
        let w = self.push_world(depth, Some(parent));
        self.edges.insert((parent, w));
        w
    }

    pub fn add_edge(&mut self, a: Label, b: Label) {
        self.edges.insert((a, b));
    }

    /// Labels still present (not merged away), in creation order.
    pub fn live(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.worlds.len()).filter(|&w| !matches!(self.worlds[w].status, Status::Merged(_)))
    }

    pub fn live_count(&self) -> usize {
        self.live().count()
    }

    pub fn labels_of(&self, w: Label) -> FormulaSet {
        self.worlds[w]
            .label
            .ones()
            .map(|i| self.target.universe()[i].clone())
            .collect()
    }

    pub fn label_bits(&self, w: Label) -> &FixedBitSet {
        &self.worlds[w].label
    }

    pub fn edges(&self) -> &BTreeSet<(Label, Label)> {
        &self.edges
    }

    pub fn depth(&self, w: Label) -> usize {
        self.worlds[w].depth
    }

    pub fn sink(&self) -> Option<Label> {
        self.sink
    }

    pub fn is_sink(&self, w: Label) -> bool {
        self.sink == Some(w)
    }

    pub fn log(&self) -> &[Justification] {
        &self.log
    }

    /// Where a merged label went; identity for live labels.
    pub fn resolve(&self, mut w: Label) -> Label {
        while let Status::Merged(to) = self.worlds[w].status {
            w = to;
        }
        w
    }

    /// The accessibility assertions as a relation over all label indices.
    pub fn relation(&self) -> Relation {
        Relation::from_pairs(self.worlds.len(), self.edges.iter().copied())
    }

    fn push_world(&mut self, depth: usize, parent: Option<Label>) -> Label {
        let n = self.target.len();
        let status = match self.blocking {
            Blocking::None => Status::Settled,
            Blocking::PathSignature => Status::Fresh,
        };
        self.worlds.push(World {
            label: FixedBitSet::with_capacity(n),
            depth,
            parent,
            status,
            diamonds_done: FixedBitSet::with_capacity(n),
        });
        self.worlds.len() - 1
    }

    fn sink_label(&mut self) -> Label {
        if let Some(s) = self.sink {
            return s;
        }
        let depth = self.target.depth() + 1;
        let s = self.push_world(depth, None);
        self.worlds[s].status = Status::Sink;
        self.edges.insert((s, s));
        self.sink = Some(s);
        s
    }

    fn record(&mut self, rule: Rule, label: Label, other: Option<Label>, formula: Option<usize>) {
        self.log.push(Justification {
            rule,
            label,
            other,
            formula,
        });
    }

    fn check_world_limit(&self, config: &TableauConfig) -> Result<(), TableauError> {
        let live = self.live_count();
        if live > config.max_worlds {
            return Err(TableauError::ResourceLimit { worlds: live });
        }
        Ok(())
    }

    /// True iff some label carries `⊥` or both `φ` and `¬φ`.
    pub fn is_closed(&self) -> bool {
        self.live().any(|w| self.contradiction_at(w).is_some())
    }

    fn contradiction_at(&self, w: Label) -> Option<usize> {
        let label = &self.worlds[w].label;
        label.ones().find(|&i| {
            matches!(self.target.node(i), FormulaNode::Bottom)
                || self.target.complement(i).is_some_and(|c| label.contains(c))
        })
    }

    /// Applies one rule instance. Priority: `□`, `¬¬`, `∧`, `∨`, then (with
    /// path-signature blocking) the analytic cut and the settle/merge step,
    /// then `¬□`. Within a rule, labels and formulas are scanned in index
    /// order; every instance is finite, so each eventually fires.
    pub fn expand(&self, config: &TableauConfig) -> Result<Vec<Branch>, TableauError> {
        if let Some(b) = self.try_box() {
            return Ok(vec![b]);
        }
        if let Some(b) = self.try_local_linear() {
            return Ok(vec![b]);
        }
        if let Some(bs) = self.try_or() {
            return Ok(bs);
        }
        if self.blocking == Blocking::PathSignature {
            if let Some(bs) = self.try_cut() {
                return Ok(bs);
            }
            if let Some(b) = self.try_settle_or_merge() {
                return Ok(vec![b]);
            }
        }
        if let Some(b) = self.try_diamond(config)? {
            return Ok(vec![b]);
        }
        Err(TableauError::NoApplicableRule)
    }

    fn try_box(&self) -> Option<Branch> {
        for &(s, t) in &self.edges {
            if self.is_sink(t) {
                continue;
            }
            let missing = self.worlds[s].label.ones().find_map(|i| match self.target.node(i) {
                FormulaNode::Box(c) if !self.worlds[t].label.contains(*c) => Some(*c),
                _ => None,
            });
            if let Some(c) = missing {
                let mut b = self.clone();
                b.worlds[t].label.insert(c);
                b.record(Rule::Box, s, Some(t), Some(c));
                return Some(b);
            }
        }
        None
    }

    fn try_local_linear(&self) -> Option<Branch> {
        for w in self.live() {
            let label = &self.worlds[w].label;
            for i in label.ones() {
                match self.target.node(i) {
                    FormulaNode::Not(c) => {
                        if let FormulaNode::Not(inner) = self.target.node(*c) {
                            if !label.contains(*inner) {
                                let mut b = self.clone();
                                b.worlds[w].label.insert(*inner);
                                b.record(Rule::NotNot, w, None, Some(i));
                                return Some(b);
                            }
                        }
                    }
                    FormulaNode::And(l, r) if !label.contains(*l) || !label.contains(*r) => {
                        let mut b = self.clone();
                        b.worlds[w].label.insert(*l);
                        b.worlds[w].label.insert(*r);
                        b.record(Rule::And, w, None, Some(i));
                        return Some(b);
                    }
                    _ => {}
                }
            }
        }
        None
    }

    fn try_or(&self) -> Option<Vec<Branch>> {
        for w in self.live() {
            let label = &self.worlds[w].label;
            for i in label.ones() {
                let FormulaNode::Not(c) = self.target.node(i) else {
                    continue;
                };
                let FormulaNode::And(l, r) = self.target.node(*c) else {
                    continue;
                };
                let nl = self.target.complement(*l).expect("negated conjunct in SF¬");
                let nr = self.target.complement(*r).expect("negated conjunct in SF¬");
                if label.contains(nl) || label.contains(nr) {
                    continue;
                }
                let mut left = self.clone();
                left.worlds[w].label.insert(nl);
                left.record(Rule::Or, w, None, Some(i));
                let mut right = self.clone();
                right.worlds[w].label.insert(nr);
                right.record(Rule::Or, w, None, Some(i));
                return Some(vec![left, right]);
            }
        }
        None
    }

    /// Decides one atom or `□`-formula of the label's level that is still
    /// open, branching on it and on its negation.
    fn try_cut(&self) -> Option<Vec<Branch>> {
        for w in self.live() {
            if self.worlds[w].status == Status::Sink {
                continue;
            }
            let label = &self.worlds[w].label;
            let depth = self.worlds[w].depth;
            let undecided = self.target.basic(depth).iter().copied().find(|&i| {
                let neg = self.target.complement(i).expect("basic member has a negation");
                !label.contains(i) && !label.contains(neg)
            });
            if let Some(i) = undecided {
                let neg = self.target.complement(i).unwrap();
                let mut yes = self.clone();
                yes.worlds[w].label.insert(i);
                yes.record(Rule::Cut, w, None, Some(i));
                let mut no = self.clone();
                no.worlds[w].label.insert(neg);
                no.record(Rule::Cut, w, None, Some(neg));
                return Some(vec![yes, no]);
            }
        }
        None
    }

    /// The truth set of the label's level, read off its decided basic members.
    pub fn world_type(&self, w: Label) -> FixedBitSet {
        let depth = self.worlds[w].depth;
        self.target.complete_type(depth, &self.worlds[w].label)
    }

    /// Settles the oldest fresh label whose parent is settled: if a settled
    /// sibling with the same type exists the two have the same path signature
    /// and the fresh label is merged into it.
    fn try_settle_or_merge(&self) -> Option<Branch> {
        let w = self.live().find(|&w| {
            self.worlds[w].status == Status::Fresh
                && self.worlds[w]
                    .parent
                    .is_none_or(|p| self.worlds[p].status == Status::Settled)
        })?;
        let ty = self.world_type(w);
        let parent = self.worlds[w].parent;
        let twin = parent.and_then(|p| {
            self.live().find(|&v| {
                v != w
                    && self.worlds[v].status == Status::Settled
                    && self.worlds[v].parent == Some(p)
                    && self.world_type(v) == ty
            })
        });
        let mut b = self.clone();
        match twin {
            None => {
                b.worlds[w].status = Status::Settled;
                b.record(Rule::Settle, w, None, None);
            }
            Some(v) => {
                b.merge(w, v);
                b.record(Rule::Merge, w, Some(v), None);
            }
        }
        Some(b)
    }

    fn merge(&mut self, from: Label, into: Label) {
        let moved = std::mem::take(&mut self.worlds[from].label);
        self.worlds[into].label.union_with(&moved);
        self.worlds[from].status = Status::Merged(into);
        let redirect = |x: Label| if x == from { into } else { x };
        self.edges = self
            .edges
            .iter()
            .map(|&(a, b)| (redirect(a), redirect(b)))
            .collect();
        for world in &mut self.worlds {
            if world.parent == Some(from) {
                world.parent = Some(into);
            }
        }
    }

    fn try_diamond(&self, config: &TableauConfig) -> Result<Option<Branch>, TableauError> {
        for w in self.live() {
            if self.worlds[w].status != Status::Settled {
                continue;
            }
            let world = &self.worlds[w];
            for i in world.label.ones() {
                if world.diamonds_done.contains(i) {
                    continue;
                }
                let FormulaNode::Not(c) = self.target.node(i) else {
                    continue;
                };
                let FormulaNode::Box(body) = self.target.node(*c) else {
                    continue;
                };
                let neg_body = self.target.complement(*body).expect("¬φ in SF¬");
                let mut b = self.clone();
                b.worlds[w].diamonds_done.insert(i);
                let t = b.add_successor(w);
                b.worlds[t].label.insert(neg_body);
                b.record(Rule::Diamond, w, Some(t), Some(i));
                b.check_world_limit(config)?;
                return Ok(Some(b));
            }
        }
        Ok(None)
    }

    /// The next structural instance: a chain `σ0 R … R σk` for some pair
    /// `(k, l)` whose endpoints are not yet joined by an `l`-step path.
    /// Pairs are visited round-robin starting after the last one served.
    pub fn next_structural(&self) -> Option<(Vec<Label>, (usize, usize))> {
        let pairs = self.kl.pairs();
        let rel = self.relation();
        let powers = rel.powers_up_to(self.kl.max_l());
        for off in 0..pairs.len() {
            let idx = (self.structural_cursor + off) % pairs.len();
            let (k, l) = pairs[idx];
            for x in self.live() {
                for y in powers[k].successors(x).ones() {
                    if powers[l].contains(x, y) || self.processed.contains(&(idx, x, y)) {
                        continue;
                    }
                    let chain = walk(&rel, &powers, x, y, k);
                    return Some((chain, (k, l)));
                }
            }
        }
        None
    }

    /// Adds a fresh `l`-step path between the endpoints of a `k`-step chain.
    /// With path-signature blocking, intermediates deeper than `d(Φ)` are the
    /// shared sink.
    pub fn apply_structural(
        &self,
        chain: &[Label],
        pair: (usize, usize),
        config: &TableauConfig,
    ) -> Result<Branch, TableauError> {
        let (k, l) = pair;
        let idx = self
            .kl
            .pairs()
            .iter()
            .position(|&p| p == pair)
            .ok_or(TableauError::UnknownPair { k, l })?;
        if chain.len() != k + 1 || chain.windows(2).any(|e| !self.edges.contains(&(e[0], e[1]))) {
            return Err(TableauError::InvalidChain);
        }
        let (first, last) = (chain[0], chain[k]);
        let mut b = self.clone();
        if !b.processed.insert((idx, first, last)) {
            return Ok(b);
        }
        b.structural_cursor = (idx + 1) % self.kl.pairs().len();
        let base = self.worlds[first].depth;
        let mut prev = first;
        for j in 1..l {
            let depth = base + j;
            let next = if b.blocking == Blocking::PathSignature && depth > b.target.depth() {
                b.sink_label()
            } else {
                b.push_world(depth, Some(prev))
            };
            b.edges.insert((prev, next));
            prev = next;
        }
        b.edges.insert((prev, last));
        b.record(Rule::Structural, first, Some(last), None);
        b.check_world_limit(config)?;
        Ok(b)
    }
}

/// Reconstructs a `k`-step walk from `x` to `y`, smallest labels first.
fn walk(rel: &Relation, powers: &[Relation], x: Label, y: Label, k: usize) -> Vec<Label> {
    let mut chain = vec![x];
    let mut cur = x;
    for i in 1..=k {
        let next = rel
            .successors(cur)
            .ones()
            .find(|&n| powers[k - i].contains(n, y))
            .expect("walk exists when (x, y) is in R^k");
        chain.push(next);
        cur = next;
    }
    chain
}
