//! JSON instance and result files.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces every cost and weight bit for bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::contract::{Instance, ModeSpec};
use crate::error::FormatError;
use crate::forge::Family;
use crate::reward::{RewardFunction, RewardKind};
use crate::solvers::SolveReport;

pub const FORMAT_VERSION: &str = "1";

fn check_version(version: &str) -> Result<(), FormatError> {
    if version == FORMAT_VERSION {
        Ok(())
    } else {
        Err(FormatError::Invalid(format!(
            "unsupported version '{version}', expected '{FORMAT_VERSION}'"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Element {
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RewardDescriptor {
    Additive {
        weights: Vec<f64>,
    },
    Coverage {
        elements: Vec<Element>,
        covers: Vec<Vec<usize>>,
    },
    CappedAdditive {
        weights: Vec<f64>,
        cap: f64,
    },
    Explicit {
        n: usize,
        table: Vec<f64>,
    },
    SymmetricTwoClass {
        f_a: f64,
        f_b: f64,
        count_b: usize,
    },
}

impl From<&RewardFunction> for RewardDescriptor {
    fn from(f: &RewardFunction) -> Self {
        match f.kind().clone() {
            RewardKind::Additive { weights } => RewardDescriptor::Additive { weights },
            RewardKind::Coverage {
                element_weights,
                covers,
            } => RewardDescriptor::Coverage {
                elements: element_weights
                    .into_iter()
                    .map(|weight| Element { weight })
                    .collect(),
                covers,
            },
            RewardKind::CappedAdditive { weights, cap } => {
                RewardDescriptor::CappedAdditive { weights, cap }
            }
            RewardKind::Explicit { table } => RewardDescriptor::Explicit { n: f.n(), table },
            RewardKind::SymmetricTwoClass { f_a, f_b, count_b } => {
                RewardDescriptor::SymmetricTwoClass { f_a, f_b, count_b }
            }
        }
    }
}

impl RewardDescriptor {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(self) -> Result<RewardFunction, FormatError> {
        Ok(match self {
            RewardDescriptor::Additive { weights } => RewardFunction::additive(weights)?,
            RewardDescriptor::Coverage { elements, covers } => {
                RewardFunction::coverage(elements.into_iter().map(|e| e.weight).collect(), covers)?
            }
            RewardDescriptor::CappedAdditive { weights, cap } => {
                RewardFunction::capped_additive(weights, cap)?
            }
            RewardDescriptor::Explicit { n, table } => RewardFunction::explicit(n, table)?,
            RewardDescriptor::SymmetricTwoClass { f_a, f_b, count_b } => {
                RewardFunction::symmetric_two_class(f_a, f_b, count_b)?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: String,
    pub n: usize,
    pub costs: Vec<f64>,
    pub reward: RewardDescriptor,
    /// Free-form; generated files record `family`, `params` and `seed`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, Value>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            version: FORMAT_VERSION.to_string(),
            n: inst.n(),
            costs: inst.costs().to_vec(),
            reward: inst.reward().into(),
            metadata: BTreeMap::new(),
        }
    }

    /// Instance file with metadata naming the family that produced it.
    pub fn from_family(family: &Family, inst: &Instance) -> Self {
        let mut file = Self::from_instance(inst);
        file.metadata
            .insert("family".into(), Value::from(family.name()));
        file.metadata.insert(
            "params".into(),
            serde_json::to_value(family.params()).expect("numeric map serializes"),
        );
        if let Some(seed) = family.seed() {
            file.metadata.insert("seed".into(), Value::from(seed));
        }
        file
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance file serializes")
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        check_version(&self.version)?;
        if self.costs.len() != self.n {
            return Err(FormatError::Invalid(format!(
                "n = {} but {} costs given",
                self.n,
                self.costs.len()
            )));
        }
        let reward = self.reward.clone().build()?;
        if reward.n() != self.n {
            return Err(FormatError::Invalid(format!(
                "n = {} but the reward function covers {} agents",
                self.n,
                reward.n()
            )));
        }
        Ok(Instance::new(self.costs.clone(), reward)?)
    }

    /// The generating family, when the metadata names a known one.
    pub fn family(&self) -> Option<Family> {
        let name = self.metadata.get("family")?.as_str()?;
        let params: BTreeMap<String, f64> =
            serde_json::from_value(self.metadata.get("params")?.clone()).ok()?;
        let seed = self.metadata.get("seed").and_then(Value::as_u64);
        Family::from_params(name, &params, seed).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecEntry {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl From<ModeSpec> for SpecEntry {
    fn from(spec: ModeSpec) -> Self {
        Self {
            mode: spec.name().to_string(),
            beta: match spec {
                ModeSpec::BetaNd { beta } => Some(beta),
                _ => None,
            },
        }
    }
}

impl SpecEntry {
    pub fn to_mode(&self) -> Result<ModeSpec, FormatError> {
        match (self.mode.as_str(), self.beta) {
            ("unconstrained", None) => Ok(ModeSpec::Unconstrained),
            ("nd", None) => Ok(ModeSpec::Nd),
            ("beta_nd", Some(beta)) => Ok(ModeSpec::beta_nd(beta)?),
            (mode, beta) => Err(FormatError::Invalid(format!(
                "invalid spec: mode '{mode}' with beta {beta:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub version: String,
    pub spec: SpecEntry,
    pub method: String,
    /// Agents exerting effort, ascending.
    pub set: Vec<usize>,
    pub payments: Vec<f64>,
    pub utility: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opt_reference: Option<f64>,
    pub timing_ms: f64,
}

impl ResultFile {
    pub fn from_report(report: &SolveReport, timing_ms: f64) -> Self {
        Self {
            version: FORMAT_VERSION.to_string(),
            spec: report.spec.into(),
            method: report.method.name().to_string(),
            set: report.best.set.to_vec(),
            payments: report.best.payments.payments().to_vec(),
            utility: report.best.utility,
            opt_reference: report.opt_reference,
            timing_ms,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let file: Self = serde_json::from_str(text)?;
        check_version(&file.version)?;
        if file.set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FormatError::Invalid(
                "set must be strictly ascending".into(),
            ));
        }
        file.spec.to_mode()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result file serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{gen_random, GeometricFamilyParams, RandomKind};
    use crate::solvers::brute_force;

    #[test]
    fn descriptor_shapes() {
        let d = RewardDescriptor::from_json(
            r#"{"kind":"coverage","elements":[{"weight":0.5},{"weight":0.25}],"covers":[[0],[0,1]]}"#,
        )
        .unwrap();
        assert_eq!(d.clone().build().unwrap().n(), 2);
        let json = serde_json::to_value(&d).unwrap();
        assert_eq!(json["kind"], "coverage");

        let d =
            RewardDescriptor::from_json(r#"{"kind":"explicit","n":1,"table":[0,0.4]}"#).unwrap();
        assert_eq!(d.build().unwrap().n(), 1);
        let d = RewardDescriptor::from_json(
            r#"{"kind":"symmetric_two_class","f_a":0.5,"f_b":0.1,"count_b":3}"#,
        )
        .unwrap();
        assert_eq!(d.build().unwrap().n(), 4);
        assert!(
            RewardDescriptor::from_json(r#"{"kind":"additive","weights":[0.1],"x":1}"#).is_err()
        );
        assert!(RewardDescriptor::from_json(r#"{"kind":"xos"}"#).is_err());
    }

    #[test]
    fn instance_round_trip_is_exact() {
        for kind in RandomKind::ALL {
            let inst = gen_random(kind, 6, 11, 0.7).unwrap();
            let text = InstanceFile::from_instance(&inst).to_json();
            let back = InstanceFile::from_json(&text)
                .unwrap()
                .to_instance()
                .unwrap();
            assert_eq!(back, inst);
        }
    }

    #[test]
    fn instance_file_consistency_errors() {
        let inst = gen_random(RandomKind::Additive, 3, 1, 0.5).unwrap();
        let mut file = InstanceFile::from_instance(&inst);
        file.n = 4;
        assert!(file.to_instance().is_err());
        let mut file = InstanceFile::from_instance(&inst);
        file.version = "2".into();
        assert!(file.to_instance().is_err());
        let mut file = InstanceFile::from_instance(&inst);
        file.costs[0] = 0.0;
        assert!(matches!(file.to_instance(), Err(FormatError::Contract(_))));
    }

    #[test]
    fn family_metadata_round_trip() {
        let fam = Family::Geometric(GeometricFamilyParams::new(3, 3.0));
        let inst = fam.build().unwrap();
        let file = InstanceFile::from_family(&fam, &inst);
        let back = InstanceFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back.family(), Some(fam));
        assert_eq!(back.metadata["family"], "geometric");
    }

    #[test]
    fn result_file_round_trip() {
        let inst = Family::Geometric(GeometricFamilyParams::new(2, 2.0))
            .build()
            .unwrap();
        let report = brute_force(&inst, ModeSpec::BetaNd { beta: 2.0 }).unwrap();
        let file = ResultFile::from_report(&report, 1.5);
        let back = ResultFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.spec.to_mode().unwrap(), ModeSpec::BetaNd { beta: 2.0 });

        let mut bad = file.clone();
        bad.set = vec![2, 1];
        assert!(ResultFile::from_json(&bad.to_json()).is_err());
        let mut bad = file;
        bad.spec.beta = None;
        assert!(ResultFile::from_json(&bad.to_json()).is_err());
    }
}
