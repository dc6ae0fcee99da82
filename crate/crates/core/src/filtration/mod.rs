//! Path-filtration: worlds are identified by the restricted labels along
//! their unique shortest path from the root, and every world deeper than
//! `d(Φ)` falls into a single sink class `[∅]` carrying a self-loop.
//!
//! Only unique shortest paths up to depth `d(Φ)` are required of the input;
//! the model may contain cycles (tableau prefixes do, at the sink and at
//! merged labels).

pub mod lemmas;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use fixedbitset::FixedBitSet;
use sha2::{Digest, Sha256};

use crate::formula::{FormulaSet, TargetFormula};
use crate::kripke::{Evaluator, Frame, KripkeError, Model, PointedModel, Relation};

/// `r(λ(x))`, or the sink case for `Δ(x) > d(Φ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathSignature {
    Sink,
    Path(Vec<FormulaSet>),
}

/// `x ∼ y`.
pub fn equiv(a: &PathSignature, b: &PathSignature) -> bool {
    a == b
}

/// Per-world depth, BFS parent, truth set over `SF¬(Φ)` and restricted
/// label `r(x)`, all as universe-index bitsets.
#[derive(Debug, Clone)]
pub struct Labelling {
    depth: Vec<usize>,
    parent: Vec<Option<usize>>,
    truth: Vec<FixedBitSet>,
    restricted: Vec<FixedBitSet>,
    max_depth: usize,
}

impl Labelling {
    /// Fails on a world unreachable from the root, or on a world of depth at
    /// most `d(Φ)` with two shortest paths.
    pub fn new(pm: &PointedModel, target: &TargetFormula) -> Result<Labelling, KripkeError> {
        let frame = pm.frame();
        let n = frame.len();
        let sp = pm.shortest_paths();
        let d = target.depth();
        let mut depth = Vec::with_capacity(n);
        for x in 0..n {
            let dx = sp
                .depth(x)
                .ok_or_else(|| KripkeError::Unreachable(frame.name(x).to_string()))?;
            if dx <= d && !sp.is_unique(x) {
                return Err(KripkeError::AmbiguousShortestPath(frame.name(x).to_string()));
            }
            depth.push(dx);
        }
        let mut eval = Evaluator::new(pm.model());
        let mut truth = vec![FixedBitSet::with_capacity(target.len()); n];
        for (i, f) in target.universe().iter().enumerate() {
            for x in eval.extension(f).ones() {
                truth[x].insert(i);
            }
        }
        let restricted = (0..n)
            .map(|x| {
                let mut r = truth[x].clone();
                match target.level(depth[x]) {
                    Some(level) => r.intersect_with(level),
                    None => r.clear(),
                }
                r
            })
            .collect();
        Ok(Labelling {
            parent: (0..n).map(|x| sp.parent(x)).collect(),
            depth,
            truth,
            restricted,
            max_depth: d,
        })
    }

    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    /// `Δ(x)`.
    pub fn depth(&self, x: usize) -> usize {
        self.depth[x]
    }

    /// `r(x)` as universe indices.
    pub fn restricted(&self, x: usize) -> &FixedBitSet {
        &self.restricted[x]
    }

    /// All members of `SF¬(Φ)` true at `x`.
    pub fn truth(&self, x: usize) -> &FixedBitSet {
        &self.truth[x]
    }

    pub fn is_sink(&self, x: usize) -> bool {
        self.depth[x] > self.max_depth
    }

    /// `λ(x)`; only defined for non-sink worlds.
    pub fn path(&self, x: usize) -> Vec<usize> {
        let mut path = vec![x];
        let mut cur = x;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// `r(λ(x))` as bitsets, `None` for sink worlds.
    pub fn signature_key(&self, x: usize) -> Option<Vec<FixedBitSet>> {
        if self.is_sink(x) {
            return None;
        }
        Some(self.path(x).into_iter().map(|w| self.restricted[w].clone()).collect())
    }
}

fn to_set(target: &TargetFormula, bits: &FixedBitSet) -> FormulaSet {
    bits.ones().map(|i| target.universe()[i].clone()).collect()
}

/// `r(x) = {φ ∈ SF¬_{Δ(x)}(Φ) : M, x ⊨ φ}`.
pub fn restrict(pm: &PointedModel, target: &TargetFormula, x: usize) -> Result<FormulaSet, KripkeError> {
    let lab = Labelling::new(pm, target)?;
    Ok(to_set(target, lab.restricted(x)))
}

/// `r(λ(x))`, or [`PathSignature::Sink`] when `Δ(x) > d(Φ)`.
pub fn path_signature(
    pm: &PointedModel,
    target: &TargetFormula,
    x: usize,
) -> Result<PathSignature, KripkeError> {
    let lab = Labelling::new(pm, target)?;
    Ok(signature_of(&lab, target, x))
}

fn signature_of(lab: &Labelling, target: &TargetFormula, x: usize) -> PathSignature {
    match lab.signature_key(x) {
        None => PathSignature::Sink,
        Some(key) => PathSignature::Path(key.iter().map(|b| to_set(target, b)).collect()),
    }
}

/// One `∼`-class: its world name in the filtrated model, its signature and
/// the original worlds it contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivClass {
    pub name: String,
    pub signature: PathSignature,
    pub members: Vec<usize>,
}

impl EquivClass {
    pub fn is_sink(&self) -> bool {
        self.signature == PathSignature::Sink
    }
}

/// `(W̃, R̃, Ṽ)` rooted at `[s]`, with `class_of[x] = [x]`.
#[derive(Debug, Clone)]
pub struct FiltratedModel {
    pub model: PointedModel,
    pub classes: Vec<EquivClass>,
    pub class_of: Vec<usize>,
}

impl FiltratedModel {
    pub fn sink(&self) -> Option<usize> {
        self.classes.iter().position(EquivClass::is_sink)
    }
}

/// Builds the path-filtrated model. Classes are ordered by their first
/// member in world order, so the root's class is first when the root is
/// world 0. `R̃` is the image of `R` plus `([∅], [∅])` when the sink class is
/// inhabited; `Ṽ(p)` holds the classes whose members all satisfy `p`, for
/// the atoms of `Φ`.
pub fn build_filtrated(pm: &PointedModel, target: &TargetFormula) -> Result<FiltratedModel, KripkeError> {
    let lab = Labelling::new(pm, target)?;
    Ok(build_from_labelling(pm, target, &lab))
}

pub(crate) fn build_from_labelling(
    pm: &PointedModel,
    target: &TargetFormula,
    lab: &Labelling,
) -> FiltratedModel {
    let n = lab.len();
    let mut key_to_class: HashMap<Option<Vec<FixedBitSet>>, usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(n);
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..n {
        let next = members.len();
        let c = *key_to_class.entry(lab.signature_key(x)).or_insert(next);
        if c == next {
            members.push(Vec::new());
            reps.push(x);
        }
        members[c].push(x);
        class_of.push(c);
    }
    let m = members.len();

    let mut rel = Relation::empty(m);
    for (a, b) in pm.frame().rel().pairs() {
        rel.insert(class_of[a], class_of[b]);
    }
    let signatures: Vec<PathSignature> = reps.iter().map(|&x| signature_of(lab, target, x)).collect();
    if let Some(s) = signatures.iter().position(|s| *s == PathSignature::Sink) {
        rel.insert(s, s);
    }

    let mut valuation = BTreeMap::new();
    for (atom, idx) in target.atoms() {
        let mut set = FixedBitSet::with_capacity(m);
        for (c, ms) in members.iter().enumerate() {
            if ms.iter().all(|&x| lab.truth(x).contains(*idx)) {
                set.insert(c);
            }
        }
        valuation.insert(atom.to_string(), set);
    }

    let names = class_names(&signatures);
    let classes = names
        .iter()
        .zip(signatures)
        .zip(members)
        .map(|((name, signature), members)| EquivClass {
            name: name.clone(),
            signature,
            members,
        })
        .collect();
    let model = Model::new(Frame::new(names, rel), valuation);
    let root = class_of[pm.root()];
    FiltratedModel {
        model: PointedModel::new(model, root).expect("root class exists"),
        classes,
        class_of,
    }
}

/// Canonical text of a signature: one `{…}` per path position, formulas in
/// set order, positions separated by `/`.
pub fn canonical_text(sig: &PathSignature) -> String {
    match sig {
        PathSignature::Sink => "sink".to_string(),
        PathSignature::Path(labels) => {
            let mut out = String::new();
            for (i, label) in labels.iter().enumerate() {
                if i > 0 {
                    out.push('/');
                }
                out.push('{');
                for (j, f) in label.iter().enumerate() {
                    if j > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "{f}");
                }
                out.push('}');
            }
            out
        }
    }
}

/// `c` plus the leading hex digits of the SHA-256 of the canonical text;
/// twelve digits, lengthened until names are distinct. The sink is `sink`.
fn class_names(signatures: &[PathSignature]) -> Vec<String> {
    let digests: Vec<Option<String>> = signatures
        .iter()
        .map(|s| match s {
            PathSignature::Sink => None,
            sig => {
                let hash = Sha256::digest(canonical_text(sig).as_bytes());
                Some(hash.iter().map(|b| format!("{b:02x}")).collect())
            }
        })
        .collect();
    let mut len = 12;
    loop {
        let names: Vec<String> = digests
            .iter()
            .map(|d| match d {
                None => "sink".to_string(),
                Some(h) => format!("c{}", &h[..len]),
            })
            .collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() == names.len() || len == 64 {
            return names;
        }
        len += 4;
    }
}
