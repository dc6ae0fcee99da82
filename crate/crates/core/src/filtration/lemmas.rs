//! Executable forms of the properties the path-filtrated model satisfies.
//! Each check returns the first counterexample it finds.

use std::fmt;

use super::{FiltratedModel, Labelling};
use crate::formula::TargetFormula;
use crate::kripke::{Evaluator, PointedModel, Relation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub property: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.property, self.detail)
    }
}

impl std::error::Error for Violation {}

fn fail(property: &'static str, detail: String) -> Result<(), Violation> {
    Err(Violation { property, detail })
}

/// If `x ∼ y` and `r(x) ≠ ∅` then `Δ(x) = Δ(y)` and `r(x) = r(y)`.
pub fn note_a(lab: &Labelling, fm: &FiltratedModel) -> Result<(), Violation> {
    for class in &fm.classes {
        let x = class.members[0];
        if lab.restricted(x).is_clear() {
            continue;
        }
        for &y in &class.members[1..] {
            if lab.depth(x) != lab.depth(y) || lab.restricted(x) != lab.restricted(y) {
                return fail("note (a)", format!("worlds {x} and {y} in class {}", class.name));
            }
        }
    }
    Ok(())
}

/// Equal signatures give classwise-equal ancestors along the two paths.
pub fn note_b(lab: &Labelling, fm: &FiltratedModel) -> Result<(), Violation> {
    for class in fm.classes.iter().filter(|c| !c.is_sink()) {
        let base: Vec<usize> = lab.path(class.members[0]).iter().map(|&w| fm.class_of[w]).collect();
        for &y in &class.members[1..] {
            let other: Vec<usize> = lab.path(y).iter().map(|&w| fm.class_of[w]).collect();
            if base != other {
                return fail("note (b)", format!("ancestors of {y} in class {}", class.name));
            }
        }
    }
    Ok(())
}

/// If `Δ(y) ≤ d(Φ)`, `y ∼ y′` and `x R y` then `x′ R y′` for some `x′ ∼ x`.
pub fn exist_pred(pm: &PointedModel, lab: &Labelling, fm: &FiltratedModel) -> Result<(), Violation> {
    let rel = pm.frame().rel();
    for (x, y) in rel.pairs() {
        if lab.is_sink(y) {
            continue;
        }
        let cx = fm.class_of[x];
        for &y2 in &fm.classes[fm.class_of[y]].members {
            let found = fm.classes[cx].members.iter().any(|&x2| rel.contains(x2, y2));
            if !found {
                return fail("exist-pred", format!("edge {x}->{y}, no predecessor of {y2} in [{x}]"));
            }
        }
    }
    Ok(())
}

/// If `([x0], [xk]) ∈ R̃^k` through classes other than `[∅]`, then some
/// members are joined in `R^k`. Checked for `1 ≤ k ≤ max_k`.
pub fn exists_path(pm: &PointedModel, fm: &FiltratedModel, max_k: usize) -> Result<(), Violation> {
    let sink = fm.sink();
    let m = fm.classes.len();
    let tilde = Relation::from_pairs(
        m,
        fm.model
            .frame()
            .rel()
            .pairs()
            .filter(|&(a, b)| Some(a) != sink && Some(b) != sink),
    );
    let tilde_powers = tilde.powers_up_to(max_k);
    let powers = pm.frame().rel().powers_up_to(max_k);
    for k in 1..=max_k {
        // Image of R^k on classes.
        let mut image = Relation::empty(m);
        for (a, b) in powers[k].pairs() {
            image.insert(fm.class_of[a], fm.class_of[b]);
        }
        for (a, b) in tilde_powers[k].pairs() {
            if !image.contains(a, b) {
                return fail(
                    "exists-path",
                    format!("k={k}: {} to {}", fm.classes[a].name, fm.classes[b].name),
                );
            }
        }
    }
    Ok(())
}

/// If `([x], [y]) ∈ R̃` then `□⁻(r(x′)) ⊆ r(y′)` for all members.
pub fn universal_property(
    target: &TargetFormula,
    lab: &Labelling,
    fm: &FiltratedModel,
) -> Result<(), Violation> {
    for (a, b) in fm.model.frame().rel().pairs() {
        for &x in &fm.classes[a].members {
            let boxed = box_bodies(target, lab, x);
            for &y in &fm.classes[b].members {
                if let Some(i) = boxed.iter().find(|&&i| !lab.restricted(y).contains(i)) {
                    return fail(
                        "universal property",
                        format!("{} boxed at {x}, missing at {y}", target.universe()[*i]),
                    );
                }
            }
        }
    }
    Ok(())
}

fn box_bodies(target: &TargetFormula, lab: &Labelling, x: usize) -> Vec<usize> {
    lab.restricted(x)
        .ones()
        .filter_map(|i| match target.node(i) {
            crate::formula::FormulaNode::Box(c) => Some(*c),
            _ => None,
        })
        .collect()
}

/// For every world `x` with `Δ(x) ≤ d(Φ)` and every `φ ∈ SF¬_{Δ(x)}(Φ)`:
/// `M, x ⊨ φ` iff `M̃, [x] ⊨ φ`.
pub fn truth_lemma(target: &TargetFormula, lab: &Labelling, fm: &FiltratedModel) -> Result<(), Violation> {
    let mut eval = Evaluator::new(fm.model.model());
    for (i, f) in target.universe().iter().enumerate() {
        let ext = eval.extension(f).clone();
        for x in 0..lab.len() {
            let Some(level) = target.level(lab.depth(x)) else {
                continue;
            };
            if level.contains(i) && lab.truth(x).contains(i) != ext.contains(fm.class_of[x]) {
                return fail("truth lemma", format!("{f} at world {x}"));
            }
        }
    }
    Ok(())
}

/// `Σ_{i=0..d} (2^n)^i + 1` with `n = |SF¬(Φ)|` and `d = d(Φ)`, saturating
/// at `u128::MAX`: one class per label sequence along a path of length at
/// most `d` from the fixed root, plus the sink.
pub fn size_bound(target: &TargetFormula) -> u128 {
    let n = target.len() as u32;
    let per_level = if n >= 128 { u128::MAX } else { 1u128 << n };
    let mut total: u128 = 1;
    let mut term: u128 = 1;
    for _ in 0..=target.depth() {
        total = total.saturating_add(term);
        term = term.saturating_mul(per_level);
    }
    total
}

/// Runs every check above on one model.
pub fn check_all(
    pm: &PointedModel,
    target: &TargetFormula,
    lab: &Labelling,
    fm: &FiltratedModel,
) -> Result<(), Violation> {
    note_a(lab, fm)?;
    note_b(lab, fm)?;
    exist_pred(pm, lab, fm)?;
    exists_path(pm, fm, 3)?;
    universal_property(target, lab, fm)?;
    truth_lemma(target, lab, fm)?;
    if fm.classes.len() as u128 > size_bound(target) {
        return fail("size bound", format!("{} classes", fm.classes.len()));
    }
    Ok(())
}
