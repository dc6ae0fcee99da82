use std::sync::Arc;

use thiserror::Error;

use super::{Node, NodeList};
use crate::formula::Formula;

/// Most formulas [`generate_corpus`] will produce.
pub const CORPUS_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("corpus exceeds {CORPUS_LIMIT} formulas at size {size}")]
    TooLarge { size: usize },
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
}

/// A corpus with its formulas as a shared DAG: `nodes.nodes[i]` is the shape
/// of `formulas[i]`, atoms indexing into `atoms`.
#[derive(Debug, Clone)]
pub struct CorpusNodes {
    pub atoms: Vec<String>,
    pub formulas: Vec<Formula>,
    pub nodes: NodeList,
}

impl CorpusNodes {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Every formula over `atoms` in primitive form with modal depth at most
    /// `max_depth` and size at most `max_size`. Order: by size; within a
    /// size, atoms (in the given order) and `⊥`, then negations, then
    /// conjunctions by left operand, then boxes, each following the order of
    /// the operands. No formula occurs twice.
    pub fn generate(atoms: &[&str], max_depth: usize, max_size: usize) -> Result<CorpusNodes, CorpusError> {
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return Err(CorpusError::DuplicateAtom(a.to_string()));
            }
        }
        let mut b = Builder::default();
        // by_size[s] = index range of size-s formulas.
        let mut by_size: Vec<std::ops::Range<usize>> = Vec::new();
        by_size.push(0..0);
        for size in 1..=max_size {
            let start = b.formulas.len();
            if size == 1 {
                for (i, a) in atoms.iter().enumerate() {
                    b.push(Formula::Atom(Arc::from(*a)), Node::Atom(i), 0, size)?;
                }
                b.push(Formula::Bottom, Node::Bottom, 0, size)?;
            } else {
                for c in by_size[size - 1].clone() {
                    let f = Formula::not(b.formulas[c].clone());
                    b.push(f, Node::Not(c), b.depth[c], size)?;
                }
                for ls in 1..size - 1 {
                    let rs = size - 1 - ls;
                    for l in by_size[ls].clone() {
                        for r in by_size[rs].clone() {
                            let f = Formula::and(b.formulas[l].clone(), b.formulas[r].clone());
                            b.push(f, Node::And(l, r), b.depth[l].max(b.depth[r]), size)?;
                        }
                    }
                }
                for c in by_size[size - 1].clone() {
                    if b.depth[c] < max_depth {
                        let f = Formula::boxed(b.formulas[c].clone());
                        b.push(f, Node::Box(c), b.depth[c] + 1, size)?;
                    }
                }
            }
            by_size.push(start..b.formulas.len());
        }
        Ok(CorpusNodes {
            atoms: atoms.iter().map(|a| a.to_string()).collect(),
            formulas: b.formulas,
            nodes: NodeList { nodes: b.nodes },
        })
    }
}

#[derive(Default)]
struct Builder {
    formulas: Vec<Formula>,
    nodes: Vec<Node>,
    depth: Vec<usize>,
}

impl Builder {
    fn push(&mut self, f: Formula, n: Node, d: usize, size: usize) -> Result<(), CorpusError> {
        if self.formulas.len() >= CORPUS_LIMIT {
            return Err(CorpusError::TooLarge { size });
        }
        self.formulas.push(f);
        self.nodes.push(n);
        self.depth.push(d);
        Ok(())
    }
}

/// The formulas of [`CorpusNodes::generate`].
pub fn generate_corpus(atoms: &[&str], max_depth: usize, max_size: usize) -> Result<Vec<Formula>, CorpusError> {
    CorpusNodes::generate(atoms, max_depth, max_size).map(|c| c.formulas)
}
