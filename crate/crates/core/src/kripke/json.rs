use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{Frame, KripkeError, Model, PointedModel, Relation};

/// The model interchange document.
///
/// Serialization is canonical: worlds keep model order, edges are sorted by
/// source then target index, atoms are sorted, and each atom's worlds follow
/// model order. Reading and re-writing a canonical document reproduces it
/// byte for byte.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub worlds: Vec<String>,
    pub root: String,
    pub edges: Vec<[String; 2]>,
    pub valuation: BTreeMap<String, Vec<String>>,
}

impl ModelJson {
    pub fn from_model(pm: &PointedModel) -> ModelJson {
        let frame = pm.frame();
        let edges = frame
            .rel()
            .pairs()
            .map(|(a, b)| [frame.name(a).to_string(), frame.name(b).to_string()])
            .collect();
        let valuation = pm
            .model()
            .valuation()
            .iter()
            .map(|(p, set)| (p.clone(), set.ones().map(|w| frame.name(w).to_string()).collect()))
            .collect();
        ModelJson {
            worlds: frame.worlds().to_vec(),
            root: frame.name(pm.root()).to_string(),
            edges,
            valuation,
        }
    }

    pub fn into_model(self) -> Result<PointedModel, KripkeError> {
        let n = self.worlds.len();
        let frame = Frame::from_names(&self.worlds, &[])?;
        let lookup = |w: &str| {
            frame
                .world(w)
                .ok_or_else(|| KripkeError::UnknownWorld(w.to_string()))
        };
        let mut rel = Relation::empty(n);
        for [a, b] in &self.edges {
            rel.insert(lookup(a)?, lookup(b)?);
        }
        let mut valuation = BTreeMap::new();
        for (p, ws) in &self.valuation {
            let mut set = FixedBitSet::with_capacity(n);
            for w in ws {
                set.insert(lookup(w)?);
            }
            valuation.insert(p.clone(), set);
        }
        let root = lookup(&self.root)?;
        let frame = Frame::new(self.worlds, rel);
        PointedModel::new(Model::new(frame, valuation), root)
    }

    pub fn to_string_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model JSON serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<ModelJson, KripkeError> {
        serde_json::from_str(text).map_err(|e| KripkeError::Json(e.to_string()))
    }
}

impl PointedModel {
    pub fn to_json(&self) -> String {
        ModelJson::from_model(self).to_string_pretty()
    }

    pub fn from_json(text: &str) -> Result<PointedModel, KripkeError> {
        ModelJson::parse(text)?.into_model()
    }
}
