//! JSON documents describing models and probability intervals.

use serde::{Deserialize, Serialize};

use crate::algebra::{BaseProbability, Partition};
use crate::error::{Error, Result};
use crate::intervals::ProbabilityInterval;
use crate::nlmodel::{NLModel, NLParams, Orientation};
use crate::rational::Rational;

/// A rational written as `"p/q"`, a decimal string, or a JSON integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Integer(i64),
}

impl RationalText {
    fn parse(&self, field: &str) -> Result<Rational> {
        match self {
            RationalText::Integer(n) => Ok(Rational::from_integer(*n)),
            RationalText::Text(s) => {
                s.trim().parse().map_err(|source| Error::Field { field: field.to_string(), source })
            }
        }
    }
}

impl From<&Rational> for RationalText {
    fn from(r: &Rational) -> Self {
        RationalText::Text(r.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub atoms: Vec<String>,
    pub p0: Vec<RationalText>,
    pub a: RationalText,
    pub b: RationalText,
    #[serde(default = "default_orientation")]
    pub orientation: Orientation,
}

fn default_orientation() -> Orientation {
    Orientation::Lower
}

fn parse_list(items: &[RationalText], field: &str) -> Result<Vec<Rational>> {
    items.iter().enumerate().map(|(i, r)| r.parse(&format!("{field}[{i}]"))).collect()
}

fn partition(atoms: &[String]) -> Result<Partition> {
    Partition::new(atoms.iter().cloned()).map_err(|e| Error::Document { field: "atoms".into(), message: e.to_string() })
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document { field: "document".into(), message: e.to_string() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("documents serialize")
    }

    pub fn to_model(&self) -> Result<NLModel> {
        let partition = partition(&self.atoms)?;
        if self.p0.len() != self.atoms.len() {
            return Err(Error::Document {
                field: "p0".into(),
                message: format!("{} weights for {} atoms", self.p0.len(), self.atoms.len()),
            });
        }
        let weights = parse_list(&self.p0, "p0")?;
        let p0 = BaseProbability::new(partition, weights)
            .map_err(|e| Error::Document { field: "p0".into(), message: e.to_string() })?;
        let a = self.a.parse("a")?;
        let b = self.b.parse("b")?;
        Ok(NLModel::new(p0, NLParams::new(a, b, self.orientation)))
    }

    pub fn from_model(model: &NLModel) -> Self {
        ModelDocument {
            atoms: model.partition().labels().to_vec(),
            p0: model.p0().weights().iter().map(RationalText::from).collect(),
            a: (&model.params().a).into(),
            b: (&model.params().b).into(),
            orientation: model.orientation(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalDocument {
    pub atoms: Vec<String>,
    pub l: Vec<RationalText>,
    pub u: Vec<RationalText>,
}

impl IntervalDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document { field: "document".into(), message: e.to_string() })
    }

    pub fn to_interval(&self) -> Result<ProbabilityInterval> {
        let partition = partition(&self.atoms)?;
        let l = parse_list(&self.l, "l")?;
        let u = parse_list(&self.u, "u")?;
        ProbabilityInterval::new(partition, l, u)
    }

    pub fn from_interval(interval: &ProbabilityInterval) -> Self {
        IntervalDocument {
            atoms: interval.partition().labels().to_vec(),
            l: interval.lower_bounds().iter().map(RationalText::from).collect(),
            u: interval.upper_bounds().iter().map(RationalText::from).collect(),
        }
    }
}
