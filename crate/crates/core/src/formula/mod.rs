//! Modal formulas over atoms, `⊥`, `¬`, `∧` and `□`.
//!
//! Derived connectives (`⊤`, `∨`, `→`, `◇`) only exist as constructors; they
//! are desugared immediately, so two formulas compare equal exactly when their
//! primitive trees do.

mod parse;
mod target;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parse::{parse, ParseError};
pub use target::{FormulaNode, TargetFormula};

/// A modal formula in primitive form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Atom(Arc<str>),
    Bottom,
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Box(Arc<Formula>),
}

/// A finite set of formulas, read as the conjunction of its members.
pub type FormulaSet = BTreeSet<Formula>;

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    pub fn bottom() -> Formula {
        Formula::Bottom
    }

    pub fn top() -> Formula {
        Formula::not(Formula::Bottom)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    /// `a ∨ b`, stored as `¬(¬a ∧ ¬b)`.
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `a → b`, stored as `¬(a ∧ ¬b)`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Arc::new(f))
    }

    /// `◇f`, stored as `¬□¬f`.
    pub fn diamond(f: Formula) -> Formula {
        Formula::not(Formula::boxed(Formula::not(f)))
    }

    /// Maximum nesting of `□`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Box(f) => 1 + f.modal_depth(),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 1,
            Formula::Not(f) | Formula::Box(f) => 1 + f.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// The child of a `¬`, if this is a negation.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Not(f) => Some(f),
            _ => None,
        }
    }

    /// Atoms occurring anywhere in the formula, sorted by name.
    pub fn atoms(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Bottom => {}
            Formula::Not(f) | Formula::Box(f) => f.collect_atoms(out),
            Formula::And(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::And(..) => 1,
            _ => 2,
        }
    }
}

/// Prints in the concrete ASCII syntax accepted by [`parse`]. `¬□¬φ` is shown
/// as `<>φ` and `¬⊥` as `true`; both read back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Bottom => write!(f, "false"),
            Formula::Not(inner) => match &**inner {
                Formula::Bottom => write!(f, "true"),
                Formula::Box(b) => match &**b {
                    Formula::Not(body) => {
                        write!(f, "<>")?;
                        write_operand(f, body, 2)
                    }
                    _ => {
                        write!(f, "~")?;
                        write_operand(f, inner, 2)
                    }
                },
                _ => {
                    write!(f, "~")?;
                    write_operand(f, inner, 2)
                }
            },
            Formula::And(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " & ")?;
                // `&` is left-associative, so a conjunction on the right needs parens.
                write_operand(f, b, 2)
            }
            Formula::Box(inner) => {
                write!(f, "[]")?;
                write_operand(f, inner, 2)
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, child: &Formula, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Modal depth of a set: the maximum over its members, 0 when empty.
pub fn modal_depth_set(s: &FormulaSet) -> usize {
    s.iter().map(Formula::modal_depth).max().unwrap_or(0)
}

/// Sum of member sizes.
pub fn size_set(s: &FormulaSet) -> usize {
    s.iter().map(Formula::size).sum()
}

/// `{φ : □φ ∈ s}`.
pub fn box_minus(s: &FormulaSet) -> FormulaSet {
    s.iter()
        .filter_map(|f| match f {
            Formula::Box(inner) => Some((**inner).clone()),
            _ => None,
        })
        .collect()
}

/// Least superset of `s` closed under the subformula rules: conjunct
/// projection, negated conjunct projection, `¬`-stripping, `□`-stripping and
/// `¬□φ ⇒ ¬φ`.
pub fn sf_closure(s: &FormulaSet) -> FormulaSet {
    let mut out = FormulaSet::new();
    let mut todo: Vec<Formula> = s.iter().cloned().collect();
    while let Some(f) = todo.pop() {
        if out.contains(&f) {
            continue;
        }
        match &f {
            Formula::And(a, b) => {
                todo.push((**a).clone());
                todo.push((**b).clone());
            }
            Formula::Box(a) => todo.push((**a).clone()),
            Formula::Not(inner) => {
                todo.push((**inner).clone());
                match &**inner {
                    Formula::And(a, b) => {
                        todo.push(Formula::Not(a.clone()));
                        todo.push(Formula::Not(b.clone()));
                    }
                    Formula::Box(a) => todo.push(Formula::Not(a.clone())),
                    _ => {}
                }
            }
            Formula::Atom(_) | Formula::Bottom => {}
        }
        out.insert(f);
    }
    out
}

/// `SF(s) ∪ {¬φ : φ ∈ SF(s)}`.
pub fn sf_neg(s: &FormulaSet) -> FormulaSet {
    let closed = sf_closure(s);
    let negs: Vec<Formula> = closed.iter().map(|f| Formula::not(f.clone())).collect();
    let mut out = closed;
    out.extend(negs);
    out
}
