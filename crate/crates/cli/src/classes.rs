use anyhow::{bail, Result};
use majcert_core::generate::{constants_grid, point_functions, random_boolean, random_pconcept};
use majcert_core::quantum::{induced_pconcept, random_states, Circuit};
use majcert_core::winnow::{l2_counterexample, l2_sample};
use majcert_core::{ConceptClass, InputDomain, PConceptClass};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Parameters of a generated class, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClassSpec {
    RandomBoolean {
        n: u32,
        size: usize,
    },
    PointFunctions {
        n: u32,
        count: usize,
    },
    RandomPconcept {
        n: u32,
        size: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        levels: Option<u32>,
    },
    ConstantsGrid {
        n: u32,
        steps: u32,
    },
    L2Family {
        n: u32,
        /// Sample this many members instead of enumerating the family.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample: Option<usize>,
    },
    QuantumInduced {
        n: u32,
        circuit: String,
        qubits: u32,
        states: usize,
    },
}

#[derive(Clone, Debug)]
pub enum GeneratedClass {
    Boolean(ConceptClass),
    Real(PConceptClass),
}

impl GeneratedClass {
    pub fn len(&self) -> usize {
        match self {
            Self::Boolean(s) => s.len(),
            Self::Real(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Real-valued view; Boolean classes embed as 0/1 tables.
    pub fn to_real(&self) -> PConceptClass {
        match self {
            Self::Boolean(s) => PConceptClass::from_boolean(s),
            Self::Real(s) => s.clone(),
        }
    }

    pub fn boolean(&self) -> Result<&ConceptClass> {
        match self {
            Self::Boolean(s) => Ok(s),
            Self::Real(_) => bail!("suite needs a Boolean class"),
        }
    }

    /// SHA-256 over the member tables, hex encoded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        match self {
            Self::Boolean(s) => {
                h.update(b"boolean");
                h.update(s.domain().bits().to_le_bytes());
                for f in s.members() {
                    h.update(f.to_hex().as_bytes());
                    h.update(b"\n");
                }
            }
            Self::Real(s) => {
                h.update(b"real");
                h.update(s.domain().bits().to_le_bytes());
                for f in s.members() {
                    for v in f.values() {
                        h.update(v.to_le_bytes());
                    }
                }
            }
        }
        hex::encode(h.finalize())
    }
}

/// Deterministically build the class described by `spec`.
pub fn generate_class(spec: &ClassSpec, seed: u64) -> Result<GeneratedClass> {
    Ok(match spec {
        ClassSpec::RandomBoolean { n, size } => {
            GeneratedClass::Boolean(random_boolean(InputDomain::new(*n)?, *size, seed)?)
        }
        ClassSpec::PointFunctions { n, count } => {
            GeneratedClass::Boolean(point_functions(InputDomain::new(*n)?, *count, seed)?)
        }
        ClassSpec::RandomPconcept { n, size, levels } => {
            GeneratedClass::Real(random_pconcept(InputDomain::new(*n)?, *size, *levels, seed)?)
        }
        ClassSpec::ConstantsGrid { n, steps } => GeneratedClass::Real(constants_grid(InputDomain::new(*n)?, *steps)?),
        ClassSpec::L2Family { n, sample: None } => GeneratedClass::Real(l2_counterexample(*n)?),
        ClassSpec::L2Family { n, sample: Some(k) } => {
            let members = l2_sample(*n, *k, seed)?;
            GeneratedClass::Real(PConceptClass::new(members.iter().map(|m| m.to_function()))?)
        }
        ClassSpec::QuantumInduced { n, circuit, qubits, states } => {
            let q = Circuit::parse(circuit)?;
            let sample = random_states(*qubits, *states, seed)?;
            GeneratedClass::Real(induced_pconcept(&q, InputDomain::new(*n)?, &sample)?.class)
        }
    })
}
