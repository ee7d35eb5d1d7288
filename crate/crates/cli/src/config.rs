use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classes::ClassSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Majcert,
    Realmajcert,
    Winnow,
    L1winnow,
    L2counter,
    Dims,
    Occam,
    QuantumProtocol,
    Equivalence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub suite: SuiteName,
    #[serde(default)]
    pub seed: u64,
    pub parameters: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MajcertParams {
    pub class: ClassSpec,
    #[serde(default = "one")]
    pub instances: usize,
    /// Member index of the target, taken modulo the class size.
    #[serde(default)]
    pub target: usize,
    /// Build two-thirds-margin decompositions instead of plain majorities.
    #[serde(default)]
    pub robust: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealParams {
    pub class: ClassSpec,
    pub eps: f64,
    #[serde(default = "one")]
    pub instances: usize,
    #[serde(default)]
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WinnowParams {
    pub class: ClassSpec,
    pub eps: f64,
    #[serde(default = "one")]
    pub instances: usize,
    /// Size of the random pinned set `Y`.
    #[serde(default)]
    pub pinned: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct L1Params {
    pub class: ClassSpec,
    pub eps: f64,
    #[serde(default = "one")]
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct L2Params {
    pub n: u32,
    #[serde(default = "one")]
    pub instances: usize,
}

fn default_gammas() -> Vec<f64> {
    vec![0.05, 0.1, 0.25, 0.4]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsParams {
    pub class: ClassSpec,
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
    #[serde(default = "one")]
    pub instances: usize,
}

fn default_trials() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OccamParams {
    pub class: ClassSpec,
    pub eps: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "one")]
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceParams {
    pub class: ClassSpec,
    pub k: usize,
    #[serde(default = "one")]
    pub instances: usize,
}

pub const DEMO_CIRCUIT: &str = "qubits=1 accept=0\nX 0 if x1\nH 0 if x0\n";

fn demo_circuit() -> String {
    DEMO_CIRCUIT.to_string()
}
fn demo_bloch() -> [f64; 3] {
    [-0.62, 0.0, -0.62]
}
fn demo_language() -> Vec<u8> {
    vec![1, 0, 1, 1]
}
fn default_eps() -> f64 {
    0.1
}
fn default_states() -> usize {
    40
}
fn default_restarts() -> usize {
    1000
}
fn default_steps() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumParams {
    #[serde(default = "demo_circuit")]
    pub circuit: String,
    /// Bloch vector of the one-qubit honest advice.
    #[serde(default = "demo_bloch")]
    pub advice: [f64; 3],
    /// Language truth table, one 0/1 entry per input.
    #[serde(default = "demo_language")]
    pub language: Vec<u8>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_states")]
    pub sample_states: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Also probe a copy of the protocol with alpha scaled by this factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub broken_alpha_factor: Option<f64>,
    #[serde(default = "one")]
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SuiteParams {
    Majcert(MajcertParams),
    Realmajcert(RealParams),
    Winnow(WinnowParams),
    L1winnow(L1Params),
    L2counter(L2Params),
    Dims(DimsParams),
    Occam(OccamParams),
    QuantumProtocol(QuantumParams),
    Equivalence(EquivalenceParams),
}

fn params<T: DeserializeOwned>(suite: SuiteName, v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).with_context(|| format!("invalid parameters for suite {suite:?}"))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("{name} must be positive, got {v}");
    }
    Ok(())
}

impl SuiteParams {
    pub fn instances(&self) -> usize {
        match self {
            Self::Majcert(p) => p.instances,
            Self::Realmajcert(p) => p.instances,
            Self::Winnow(p) => p.instances,
            Self::L1winnow(p) => p.instances,
            Self::L2counter(p) => p.instances,
            Self::Dims(p) => p.instances,
            Self::Occam(p) => p.instances,
            Self::QuantumProtocol(p) => p.instances,
            Self::Equivalence(p) => p.instances,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<(Self, SuiteParams)> {
        let config: Self = serde_json::from_str(text).context("invalid experiment config")?;
        let params = config.validate()?;
        Ok((config, params))
    }

    /// Check the schema version and the suite-specific parameters.
    pub fn validate(&self) -> Result<SuiteParams> {
        if self.schema != SCHEMA_VERSION {
            bail!("unsupported schema {}, expected {SCHEMA_VERSION}", self.schema);
        }
        let v = &self.parameters;
        let s = self.suite;
        let parsed = match s {
            SuiteName::Majcert => SuiteParams::Majcert(params(s, v)?),
            SuiteName::Realmajcert => {
                let p: RealParams = params(s, v)?;
                positive("eps", p.eps)?;
                SuiteParams::Realmajcert(p)
            }
            SuiteName::Winnow => {
                let p: WinnowParams = params(s, v)?;
                positive("eps", p.eps)?;
                SuiteParams::Winnow(p)
            }
            SuiteName::L1winnow => {
                let p: L1Params = params(s, v)?;
                positive("eps", p.eps)?;
                SuiteParams::L1winnow(p)
            }
            SuiteName::L2counter => SuiteParams::L2counter(params(s, v)?),
            SuiteName::Dims => {
                let p: DimsParams = params(s, v)?;
                for &g in &p.gammas {
                    positive("gamma", g)?;
                }
                SuiteParams::Dims(p)
            }
            SuiteName::Occam => {
                let p: OccamParams = params(s, v)?;
                positive("eps", p.eps)?;
                SuiteParams::Occam(p)
            }
            SuiteName::QuantumProtocol => {
                let p: QuantumParams = params(s, v)?;
                positive("eps", p.eps)?;
                if let Some(f) = p.broken_alpha_factor {
                    positive("broken_alpha_factor", f)?;
                }
                if p.language.iter().any(|&b| b > 1) {
                    bail!("language entries must be 0 or 1");
                }
                SuiteParams::QuantumProtocol(p)
            }
            SuiteName::Equivalence => SuiteParams::Equivalence(params(s, v)?),
        };
        if parsed.instances() == 0 {
            bail!("instances must be at least 1");
        }
        Ok(parsed)
    }
}
