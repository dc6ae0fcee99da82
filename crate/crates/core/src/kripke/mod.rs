//! Finite Kripke frames and models, relation powers, the KL-density check and
//! the satisfaction relation.

mod dot;
mod eval;
mod json;
mod relation;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::formula::Formula;

pub use dot::to_dot;
pub use eval::Evaluator;
pub use json::ModelJson;
pub use relation::Relation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("world `{0}` declared twice")]
    DuplicateWorld(String),
    #[error("model has no worlds")]
    NoWorlds,
    #[error("world `{0}` is not reachable from the root")]
    Unreachable(String),
    #[error("world `{0}` has more than one shortest path from the root")]
    AmbiguousShortestPath(String),
    #[error("invalid model JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KlSpecError {
    #[error("KL set is empty")]
    Empty,
    #[error("pair ({k},{l}) violates 1 <= k < l")]
    NotQuasiDense { k: usize, l: usize },
    #[error("pair ({k},{l}) listed twice")]
    Duplicate { k: usize, l: usize },
    #[error("malformed pair `{0}`, expected k:l")]
    Malformed(String),
}

/// The density pairs `(k, l)`, `1 ≤ k < l`, each demanding `R^k ⊆ R^l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KLSpec {
    pairs: Vec<(usize, usize)>,
}

impl KLSpec {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<KLSpec, KlSpecError> {
        if pairs.is_empty() {
            return Err(KlSpecError::Empty);
        }
        for (i, &(k, l)) in pairs.iter().enumerate() {
            if k < 1 || k >= l {
                return Err(KlSpecError::NotQuasiDense { k, l });
            }
            if pairs[..i].contains(&(k, l)) {
                return Err(KlSpecError::Duplicate { k, l });
            }
        }
        Ok(KLSpec { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn max_l(&self) -> usize {
        self.pairs.iter().map(|&(_, l)| l).max().unwrap_or(0)
    }
}

/// Parses the `k:l,k:l` syntax.
impl FromStr for KLSpec {
    type Err = KlSpecError;

    fn from_str(s: &str) -> Result<KLSpec, KlSpecError> {
        let mut pairs = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let (k, l) = part
                .split_once(':')
                .ok_or_else(|| KlSpecError::Malformed(part.to_string()))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| KlSpecError::Malformed(part.to_string()))?;
            let l: usize = l
                .trim()
                .parse()
                .map_err(|_| KlSpecError::Malformed(part.to_string()))?;
            pairs.push((k, l));
        }
        KLSpec::new(pairs)
    }
}

impl fmt::Display for KLSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, l)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}:{l}")?;
        }
        Ok(())
    }
}

/// Named worlds and an accessibility relation over their indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    worlds: Vec<String>,
    rel: Relation,
}

impl Frame {
    pub fn new(worlds: Vec<String>, rel: Relation) -> Frame {
        assert_eq!(worlds.len(), rel.size(), "relation size must match world count");
        Frame { worlds, rel }
    }

    /// Builds a frame from world names and named edges.
    pub fn from_names<S: AsRef<str>>(worlds: &[S], edges: &[(S, S)]) -> Result<Frame, KripkeError> {
        let names: Vec<String> = worlds.iter().map(|w| w.as_ref().to_string()).collect();
        let index = name_index(&names)?;
        let lookup = |w: &str| {
            index
                .get(w)
                .copied()
                .ok_or_else(|| KripkeError::UnknownWorld(w.to_string()))
        };
        let mut rel = Relation::empty(names.len());
        for (a, b) in edges {
            rel.insert(lookup(a.as_ref())?, lookup(b.as_ref())?);
        }
        Ok(Frame { worlds: names, rel })
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn name(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn world(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn rel(&self) -> &Relation {
        &self.rel
    }
}

fn name_index(names: &[String]) -> Result<HashMap<&str, usize>, KripkeError> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.as_str(), i).is_some() {
            return Err(KripkeError::DuplicateWorld(n.clone()));
        }
    }
    Ok(index)
}

/// A frame plus a valuation from atom names to world sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    frame: Frame,
    valuation: BTreeMap<String, FixedBitSet>,
}

impl Model {
    pub fn new(frame: Frame, valuation: BTreeMap<String, FixedBitSet>) -> Model {
        let n = frame.len();
        let valuation = valuation
            .into_iter()
            .map(|(p, mut set)| {
                set.grow(n);
                (p, set)
            })
            .collect();
        Model { frame, valuation }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn valuation(&self) -> &BTreeMap<String, FixedBitSet> {
        &self.valuation
    }

    /// Worlds where `atom` holds; atoms absent from the valuation hold nowhere.
    pub fn holds(&self, atom: &str, w: usize) -> bool {
        self.valuation.get(atom).is_some_and(|s| s.contains(w))
    }
}

/// A model with a distinguished root world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    model: Model,
    root: usize,
}

impl PointedModel {
    pub fn new(model: Model, root: usize) -> Result<PointedModel, KripkeError> {
        if model.frame.is_empty() {
            return Err(KripkeError::NoWorlds);
        }
        if root >= model.frame.len() {
            return Err(KripkeError::UnknownWorld(format!("#{root}")));
        }
        Ok(PointedModel { model, root })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn frame(&self) -> &Frame {
        &self.model.frame
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Breadth-first shortest-path data from the root.
    pub fn shortest_paths(&self) -> ShortestPaths {
        ShortestPaths::compute(self.frame().rel(), self.root)
    }

    /// Worlds not reachable from the root.
    pub fn unreachable(&self) -> Vec<usize> {
        let sp = self.shortest_paths();
        (0..self.frame().len()).filter(|&w| sp.dist[w].is_none()).collect()
    }
}

/// Shortest-path distances, path counts (saturating at 2) and BFS parents.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    dist: Vec<Option<usize>>,
    count: Vec<u8>,
    parent: Vec<Option<usize>>,
}

impl ShortestPaths {
    fn compute(rel: &Relation, root: usize) -> ShortestPaths {
        let n = rel.size();
        let mut dist = vec![None; n];
        let mut count = vec![0u8; n];
        let mut parent = vec![None; n];
        dist[root] = Some(0);
        count[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for y in rel.successors(x).ones() {
                match dist[y] {
                    None => {
                        dist[y] = Some(dx + 1);
                        count[y] = count[x];
                        parent[y] = Some(x);
                        queue.push_back(y);
                    }
                    Some(dy) if dy == dx + 1 => {
                        count[y] = count[y].saturating_add(count[x]).min(2);
                    }
                    _ => {}
                }
            }
        }
        ShortestPaths { dist, count, parent }
    }

    pub fn depth(&self, x: usize) -> Option<usize> {
        self.dist[x]
    }

    /// True when `x` is reachable through exactly one shortest path.
    pub fn is_unique(&self, x: usize) -> bool {
        self.count[x] == 1
    }

    /// Predecessor of `x` on a shortest path, `None` for the root.
    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    /// The unique shortest path `(s, …, x)`, checked for uniqueness.
    pub fn path(&self, frame: &Frame, x: usize) -> Result<Vec<usize>, KripkeError> {
        if self.dist[x].is_none() {
            return Err(KripkeError::Unreachable(frame.name(x).to_string()));
        }
        if self.count[x] != 1 {
            return Err(KripkeError::AmbiguousShortestPath(frame.name(x).to_string()));
        }
        let mut path = vec![x];
        let mut cur = x;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(path)
    }
}

/// `R^n`, with `R^0` the identity on the worlds.
pub fn compose_power(frame: &Frame, n: usize) -> Relation {
    frame.rel.power(n)
}

/// Whether `R^k ⊆ R^l` holds for every pair of `kl`.
pub fn is_kl_frame(frame: &Frame, kl: &KLSpec) -> bool {
    let powers = frame.rel.powers_up_to(kl.max_l());
    kl.pairs()
        .iter()
        .all(|&(k, l)| powers[k].is_subset(&powers[l]))
}

/// Whether the relation has no directed cycle; a self-loop counts as one.
pub fn is_acyclic(frame: &Frame) -> bool {
    // Kahn's algorithm.
    let n = frame.len();
    let mut indeg = vec![0usize; n];
    for (_, b) in frame.rel.pairs() {
        indeg[b] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&w| indeg[w] == 0).collect();
    let mut seen = 0;
    while let Some(w) = stack.pop() {
        seen += 1;
        for v in frame.rel.successors(w).ones() {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                stack.push(v);
            }
        }
    }
    seen == n
}

/// `Δ(x)`: length of a shortest path from the root to `x`.
pub fn depth_delta(pm: &PointedModel, x: usize) -> Result<usize, KripkeError> {
    pm.shortest_paths()
        .depth(x)
        .ok_or_else(|| KripkeError::Unreachable(pm.frame().name(x).to_string()))
}

/// `λ(x)`: the unique shortest path from the root to `x`. Inputs where two
/// distinct shortest paths exist are rejected rather than tie-broken.
pub fn shortest_path(pm: &PointedModel, x: usize) -> Result<Vec<usize>, KripkeError> {
    pm.shortest_paths().path(pm.frame(), x)
}

/// `M, x ⊨ φ`.
pub fn satisfies(model: &Model, x: usize, phi: &Formula) -> bool {
    Evaluator::new(model).holds(x, phi)
}

/// Outcome of independently checking a claimed model of `Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub kl_frame_ok: bool,
    pub root_satisfies_phi: bool,
}

impl CertificateReport {
    pub fn ok(&self) -> bool {
        self.kl_frame_ok && self.root_satisfies_phi
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kl_frame_ok={} root_satisfies_phi={} ok={}",
            self.kl_frame_ok,
            self.root_satisfies_phi,
            self.ok()
        )
    }
}

/// Checks that the frame is KL-dense and that the root satisfies `phi`.
pub fn check_model(pm: &PointedModel, phi: &Formula, kl: &KLSpec) -> CertificateReport {
    CertificateReport {
        kl_frame_ok: is_kl_frame(pm.frame(), kl),
        root_satisfies_phi: satisfies(pm.model(), pm.root(), phi),
    }
}
