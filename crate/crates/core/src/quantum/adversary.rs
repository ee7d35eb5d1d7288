use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::rng::{indexed, stream};

use super::circuit::Circuit;
use super::density::DensityMatrix;
use super::protocol::{decision_error_of, deviation_of, povms, AdviceProtocol, RegisterState, ACCEPT_FACTOR};

/// Decision error above which an accepted state counts as a violation.
pub const VIOLATION_THRESHOLD: f64 = 1.0 / 3.0;
const SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdversaryBudget {
    pub restarts: usize,
    pub steps: usize,
    pub initial_step: f64,
    /// Step multiplier applied after each rejected move.
    pub decay: f64,
}

impl Default for AdversaryBudget {
    fn default() -> Self {
        Self {
            restarts: 1000,
            steps: 200,
            initial_step: 0.5,
            decay: 0.97,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdversaryReport {
    pub state: RegisterState,
    pub decision_error: f64,
    pub deviation: f64,
    pub feasible: bool,
    pub violation: bool,
    /// Restart that produced the best state; restart 0 starts from the honest advice.
    pub best_restart: usize,
    pub evaluations: u64,
}

struct Candidate {
    params: Vec<DMatrix<Complex64>>,
    regs: Vec<DensityMatrix>,
    score: f64,
    error: f64,
    deviation: f64,
}

struct Objective<'a> {
    protocol: &'a AdviceProtocol,
    effects: Vec<DMatrix<Complex64>>,
    limit: f64,
}

impl Objective<'_> {
    fn evaluate(&self, params: Vec<DMatrix<Complex64>>) -> Result<Candidate> {
        let regs = params
            .iter()
            .map(DensityMatrix::from_purification)
            .collect::<Result<Vec<_>>>()?;
        let deviation = deviation_of(self.protocol, &self.effects, &regs);
        let error = decision_error_of(self.protocol, &self.effects, &regs);
        let score = if deviation <= self.limit {
            error
        } else {
            -1.0 - (deviation - self.limit)
        };
        Ok(Candidate {
            params,
            regs,
            score,
            error,
            deviation,
        })
    }
}

/// Search the full state space of the registers for an advice state that the
/// validating machine accepts but that decides badly.
///
/// Both machines see only the reduced register states, and every tuple of
/// reduced states is the marginal of a product state, so the search runs over
/// independent purifications per register without loss of generality.
pub fn adversary_search(
    p: &AdviceProtocol,
    q: &Circuit,
    budget: &AdversaryBudget,
    seed: u64,
) -> Result<AdversaryReport> {
    let objective = Objective {
        protocol: p,
        effects: povms(q, p.domain, p.advice_qubits)?,
        limit: ACCEPT_FACTOR * p.alpha + SLACK,
    };
    let dim = 1usize << p.advice_qubits;
    let mut best: Option<(usize, Candidate)> = None;
    let mut evaluations = 0u64;
    for restart in 0..budget.restarts.max(1) {
        let mut rng = indexed(seed, stream::ADVERSARY, restart as u64);
        let start = if restart == 0 {
            p.honest.iter().map(DensityMatrix::purification).collect()
        } else {
            (0..p.registers())
                .map(|_| DMatrix::from_fn(dim, dim, |_, _| gaussian(&mut rng)))
                .collect()
        };
        let mut current = objective.evaluate(start)?;
        evaluations += 1;
        let mut step = budget.initial_step;
        for _ in 0..budget.steps {
            let mut params = current.params.clone();
            let reg = rng.random_range(0..params.len());
            let (i, j) = (rng.random_range(0..dim), rng.random_range(0..dim));
            let delta: f64 = rng.sample::<f64, _>(StandardNormal) * step;
            if rng.random_bool(0.5) {
                params[reg][(i, j)].re += delta;
            } else {
                params[reg][(i, j)].im += delta;
            }
            if params[reg].norm() < 1e-9 {
                continue;
            }
            let next = objective.evaluate(params)?;
            evaluations += 1;
            if next.score >= current.score {
                current = next;
            } else {
                step *= budget.decay;
            }
        }
        if best.as_ref().map_or(true, |(_, b)| current.score > b.score) {
            best = Some((restart, current));
        }
    }
    let (best_restart, best) = best.expect("at least one restart");
    let feasible = best.deviation <= objective.limit;
    Ok(AdversaryReport {
        state: RegisterState::Product(best.regs),
        decision_error: best.error,
        deviation: best.deviation,
        feasible,
        violation: feasible && best.error > VIOLATION_THRESHOLD,
        best_restart,
        evaluations,
    })
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}
