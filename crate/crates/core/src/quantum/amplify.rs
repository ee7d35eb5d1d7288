use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::concept::InputDomain;
use crate::error::{invalid, Result};

use super::circuit::Circuit;
use super::density::ensure_budget;
use super::protocol::RegisterState;

const SLACK: f64 = 1e-12;

/// One check of a multi-constraint witness test: a two-outcome measurement
/// on a single register and its expected acceptance probability.
#[derive(Clone, Debug)]
pub struct PlusTest {
    pub effect: DMatrix<Complex64>,
    pub r: f64,
}

impl PlusTest {
    pub fn from_circuit(q: &Circuit, x: &[bool], register_qubits: u32, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(invalid(format!("target {r} outside [0,1]")));
        }
        Ok(Self {
            effect: q.effective_povm(x, register_qubits)?,
            r,
        })
    }

    /// One test per input of `domain`, each targeting the honest probability.
    pub fn for_inputs(q: &Circuit, domain: InputDomain, register_qubits: u32, targets: &[f64]) -> Result<Vec<Self>> {
        if targets.len() != domain.size() {
            return Err(invalid("one target per input required"));
        }
        domain
            .inputs()
            .map(|x| Self::from_circuit(q, &domain.bits_of(x), register_qubits, targets[x]))
            .collect()
    }

    fn passes(&self, count: usize, k: usize, q: f64) -> bool {
        (count as f64 / k as f64 - self.r).abs() <= 2.0 / q + SLACK
    }
}

/// Distribution of the number of successes of independent trials.
pub fn poisson_binomial(probs: &[f64]) -> Vec<f64> {
    let mut dist = vec![1.0];
    for &p in probs {
        let mut next = vec![0.0; dist.len() + 1];
        for (c, &w) in dist.iter().enumerate() {
            next[c] += w * (1.0 - p);
            next[c + 1] += w * p;
        }
        dist = next;
    }
    dist
}

fn count_distribution(test: &PlusTest, sigma: &RegisterState) -> Result<Vec<f64>> {
    match sigma {
        RegisterState::Product(regs) => {
            let probs: Vec<f64> = regs.iter().map(|r| r.expectation(&test.effect).clamp(0.0, 1.0)).collect();
            Ok(poisson_binomial(&probs))
        }
        RegisterState::Joint { state, registers } => {
            ensure_budget(state.qubits())?;
            let k = *registers;
            let dim = test.effect.nrows();
            let reject = DMatrix::<Complex64>::identity(dim, dim) - &test.effect;
            let mut dist = vec![0.0; k + 1];
            for pattern in 0usize..1 << k {
                let mut op = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
                for reg in 0..k {
                    let accepted = pattern >> (k - 1 - reg) & 1 == 1;
                    op = op.kronecker(if accepted { &test.effect } else { &reject });
                }
                dist[pattern.count_ones() as usize] += state.expectation(&op);
            }
            Ok(dist)
        }
    }
}

/// Exact probability that running test `i` on each of the `k` registers of
/// `sigma` accepts a fraction within `2/q` of its target.
pub fn qma_plus_amplify(tests: &[PlusTest], q: f64, k: usize, sigma: &RegisterState, i: usize) -> Result<f64> {
    let test = tests.get(i).ok_or_else(|| invalid(format!("test {i} out of range")))?;
    if q.is_nan() || q <= 0.0 {
        return Err(invalid("scale q must be positive"));
    }
    if k == 0 || sigma.registers() != k {
        return Err(invalid(format!("expected {k} registers, got {}", sigma.registers())));
    }
    if sigma.register_qubits() as usize != test.effect.nrows().trailing_zeros() as usize {
        return Err(invalid("register size does not match the test"));
    }
    let dist = count_distribution(test, sigma)?;
    Ok(dist
        .iter()
        .enumerate()
        .filter(|&(c, _)| test.passes(c, k, q))
        .map(|(_, w)| w)
        .sum())
}

/// `1 - exp(-2k/q^2)`.
pub fn chernoff_floor(k: usize, q: f64) -> f64 {
    1.0 - (-2.0 * k as f64 / (q * q)).exp()
}

/// Deviation of the register-averaged acceptance from the target, and the
/// rejection probability of the amplified test. The first never exceeds
/// `2/q` plus the second.
pub fn averaged_deviation(tests: &[PlusTest], q: f64, sigma: &RegisterState, i: usize) -> Result<(f64, f64)> {
    let test = tests.get(i).ok_or_else(|| invalid(format!("test {i} out of range")))?;
    let regs = sigma.reduced_all()?;
    let mean = regs.iter().map(|r| r.expectation(&test.effect)).sum::<f64>() / regs.len() as f64;
    let accept = qma_plus_amplify(tests, q, regs.len(), sigma, i)?;
    Ok(((mean - test.r).abs(), 1.0 - accept))
}
