//! Brute-force ground truth: exhaustive search for small models and
//! enumeration of formula corpora.
//!
//! Search order: by world count, then by frame, then by valuation. A frame on
//! `n` worlds is the bitmask with bit `i·n + j` set for each edge `(i, j)`,
//! and frames are visited in increasing mask order. A valuation is the mask
//! with bit `a·n + w` set when the `a`-th atom (in sorted order) holds at
//! `w`, also visited in increasing order. The root is world 0.
//!
//! Only frames whose worlds are all reachable from the root are visited, and
//! of each isomorphism class (permutations fixing the root) only the frame
//! with the least mask. Satisfaction at the root depends only on the part
//! generated by the root, and that part of a KL-frame is again a KL-frame, so
//! this loses no model size.

mod corpus;
mod frames;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::formula::{Formula, FormulaNode, TargetFormula};
use crate::kripke::{Frame, KLSpec, Model, PointedModel, Relation};

pub use corpus::{generate_corpus, CorpusError, CorpusNodes, CORPUS_LIMIT};
pub use frames::{rooted_frames, RootedFrame};

/// Largest world count the search accepts.
pub const MAX_SEARCH_WORLDS: usize = 5;

/// Largest `atoms · worlds`, so one frame has at most `2^20` valuations.
pub const MAX_VALUATION_BITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBound {
    pub max_worlds: usize,
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound { max_worlds: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    Found(PointedModel),
    NoneUpTo(usize),
}

impl SearchResult {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchResult::Found(_))
    }
}

/// Where the first model sits in the search order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub worlds: usize,
    pub frame_mask: u64,
    pub valuation: u64,
}

/// World count actually searched for a bound and an atom count: at most
/// [`MAX_SEARCH_WORLDS`], and small enough for [`MAX_VALUATION_BITS`].
pub fn effective_worlds(bound: SearchBound, atoms: usize) -> usize {
    let by_atoms = MAX_VALUATION_BITS.checked_div(atoms).unwrap_or(usize::MAX);
    bound.max_worlds.min(MAX_SEARCH_WORLDS).min(by_atoms)
}

/// Searches the pointed models over the atoms of `phi` with at most
/// [`effective_worlds`] worlds and returns the first KL-frame model of `phi`
/// at its root. `NoneUpTo(n)` reports the world count actually covered.
pub fn enumerate_models(phi: &Formula, kl: &KLSpec, bound: SearchBound) -> SearchResult {
    let target = TargetFormula::new(phi.clone());
    let atoms: Vec<String> = target.atoms().iter().map(|(a, _)| a.to_string()).collect();
    let nodes = NodeList::from_target(&target);
    let max = effective_worlds(bound, atoms.len());
    for n in 1..=max {
        let frames = rooted_frames(n, kl);
        if let Some(w) = first_witness(&nodes, target.root_index(), atoms.len(), n, &frames) {
            return SearchResult::Found(witness_model(&w, &atoms));
        }
    }
    SearchResult::NoneUpTo(max)
}

/// Builds the pointed model a witness describes, worlds named `w0…`.
pub fn witness_model(w: &Witness, atoms: &[String]) -> PointedModel {
    let n = w.worlds;
    let rel = Relation::from_pairs(
        n,
        (0..n * n).filter(|b| w.frame_mask >> b & 1 == 1).map(|b| (b / n, b % n)),
    );
    let mut valuation = BTreeMap::new();
    for (a, atom) in atoms.iter().enumerate() {
        let mut set = FixedBitSet::with_capacity(n);
        for x in 0..n {
            if w.valuation >> (a * n + x) & 1 == 1 {
                set.insert(x);
            }
        }
        valuation.insert(atom.clone(), set);
    }
    let names = (0..n).map(|i| format!("w{i}")).collect();
    PointedModel::new(Model::new(Frame::new(names, rel), valuation), 0).expect("world 0 exists")
}

/// A formula DAG in evaluation order: children precede parents; atoms refer
/// to positions in a sorted atom list.
#[derive(Debug, Clone)]
pub struct NodeList {
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Atom(usize),
    Bottom,
    Not(usize),
    And(usize, usize),
    Box(usize),
}

impl NodeList {
    fn from_target(target: &TargetFormula) -> NodeList {
        let atom_pos: BTreeMap<&str, usize> = target
            .atoms()
            .iter()
            .enumerate()
            .map(|(i, (a, _))| (&**a, i))
            .collect();
        let nodes = (0..target.len())
            .map(|i| match target.node(i) {
                FormulaNode::Atom(p) => Node::Atom(atom_pos[&**p]),
                FormulaNode::Bottom => Node::Bottom,
                FormulaNode::Not(c) => Node::Not(*c),
                FormulaNode::And(a, b) => Node::And(*a, *b),
                FormulaNode::Box(c) => Node::Box(*c),
            })
            .collect();
        NodeList { nodes }
    }
}

/// Truth of every node at every world under every valuation of `atoms`
/// atoms, one bit per valuation. Layout: `[node][world][word]`.
pub struct BitEval {
    worlds: usize,
    words: usize,
    atom_patterns: Vec<Vec<u64>>,
    values: Vec<u64>,
}

impl BitEval {
    pub fn new(atoms: usize, worlds: usize) -> BitEval {
        let bits = 1usize << (atoms * worlds);
        let words = bits.div_ceil(64);
        let mut atom_patterns = Vec::with_capacity(atoms * worlds);
        for a in 0..atoms {
            for x in 0..worlds {
                let shift = a * worlds + x;
                let mut pat = vec![0u64; words];
                for v in 0..bits {
                    if v >> shift & 1 == 1 {
                        pat[v / 64] |= 1 << (v % 64);
                    }
                }
                atom_patterns.push(pat);
            }
        }
        BitEval {
            worlds,
            words,
            atom_patterns,
            values: Vec::new(),
        }
    }

    fn live_mask(&self, word: usize) -> u64 {
        let bits = 1usize << (self.atom_patterns.len());
        if bits >= (word + 1) * 64 {
            u64::MAX
        } else {
            (1u64 << (bits - word * 64)) - 1
        }
    }

    fn slot(&self, node: usize, world: usize) -> usize {
        (node * self.worlds + world) * self.words
    }

    /// Evaluates all nodes on one frame.
    pub fn run(&mut self, nodes: &[Node], succ: &[Vec<usize>]) {
        let (n, w) = (self.worlds, self.words);
        self.values.clear();
        self.values.resize(nodes.len() * n * w, 0);
        for (i, node) in nodes.iter().enumerate() {
            for (x, ys) in succ.iter().enumerate().take(n) {
                let out = self.slot(i, x);
                for k in 0..w {
                    let v = match *node {
                        Node::Atom(a) => self.atom_patterns[a * n + x][k],
                        Node::Bottom => 0,
                        Node::Not(c) => !self.values[self.slot(c, x) + k] & self.live_mask(k),
                        Node::And(a, b) => self.values[self.slot(a, x) + k] & self.values[self.slot(b, x) + k],
                        Node::Box(c) => {
                            let mut acc = self.live_mask(k);
                            for &y in ys {
                                acc &= self.values[self.slot(c, y) + k];
                            }
                            acc
                        }
                    };
                    self.values[out + k] = v;
                }
            }
        }
    }

    /// Least valuation making `node` true at world 0, if any.
    pub fn first_at_root(&self, node: usize) -> Option<u64> {
        let base = self.slot(node, 0);
        (0..self.words).find_map(|k| {
            let v = self.values[base + k];
            (v != 0).then(|| (k * 64) as u64 + u64::from(v.trailing_zeros()))
        })
    }
}

fn first_witness(
    nodes: &NodeList,
    root: usize,
    atoms: usize,
    n: usize,
    frames: &[RootedFrame],
) -> Option<Witness> {
    let mut eval = BitEval::new(atoms, n);
    for fr in frames {
        eval.run(&nodes.nodes, &fr.succ);
        if let Some(v) = eval.first_at_root(root) {
            return Some(Witness {
                worlds: n,
                frame_mask: fr.mask,
                valuation: v,
            });
        }
    }
    None
}

/// First witnesses for a whole corpus at once. World count and frame agree
/// with [`enumerate_models`] on the same formula and bound; the valuation
/// ranges over the corpus atoms, so `witness_model(w, &corpus.atoms)` is a
/// model of the formula.
pub fn corpus_witnesses(corpus: &CorpusNodes, kl: &KLSpec, bound: SearchBound) -> Vec<Option<Witness>> {
    let mut out: Vec<Option<Witness>> = vec![None; corpus.len()];
    let max = effective_worlds(bound, corpus.atoms.len());
    for n in 1..=max {
        let frames = rooted_frames(n, kl);
        let mut eval = BitEval::new(corpus.atoms.len(), n);
        for fr in &frames {
            if out.iter().all(Option::is_some) {
                break;
            }
            eval.run(&corpus.nodes.nodes, &fr.succ);
            for (i, slot) in out.iter_mut().enumerate() {
                if slot.is_none() {
                    if let Some(v) = eval.first_at_root(i) {
                        *slot = Some(Witness {
                            worlds: n,
                            frame_mask: fr.mask,
                            valuation: v,
                        });
                    }
                }
            }
        }
    }
    out
}
