use crate::concept::InputDomain;
use crate::error::{invalid, Result};
use crate::winnow::{fat_shattering_dim, Dimension};

use super::circuit::Circuit;
use super::protocol::{induced_pconcept, random_states};

/// Measured fat-shattering dimension of a sampled induced class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantumDimReport {
    pub dimension: Dimension,
    /// `p / gamma^2`, the scale of the asymptotic upper bound.
    pub bound: f64,
    pub class_size: usize,
}

/// Largest advice register accepted by [`fat_dim_quantum_check`].
pub const MAX_CHECK_QUBITS: u32 = 2;

pub fn fat_dim_quantum_check(
    q: &Circuit,
    domain: InputDomain,
    advice_qubits: u32,
    gamma: f64,
    samples: usize,
    seed: u64,
) -> Result<QuantumDimReport> {
    if advice_qubits == 0 || advice_qubits > MAX_CHECK_QUBITS {
        return Err(invalid(format!("advice must have 1..={MAX_CHECK_QUBITS} qubits")));
    }
    let states = random_states(advice_qubits, samples, seed)?;
    let induced = induced_pconcept(q, domain, &states)?;
    Ok(QuantumDimReport {
        dimension: fat_shattering_dim(&induced.class, gamma)?,
        bound: advice_qubits as f64 / (gamma * gamma),
        class_size: induced.class.len(),
    })
}
