use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use serde::{Deserialize, Serialize};

use crate::concept::{
    pointwise_majority, vote_counts, BooleanFunction, Certificate, ConceptClass, Input,
};
use crate::error::{invalid, Error, Result};
use crate::rng::{indexed, stream};

use super::strategy::{double_oracle_solve, AliceStrategy, DEFAULT_TARGET};

/// Sampling attempts per sample size before escalating.
pub const ATTEMPTS_PER_SIZE: u32 = 64;

/// Smallest odd integer at least `x`.
pub fn smallest_odd_at_least(x: usize) -> usize {
    let x = x.max(1);
    if x % 2 == 1 {
        x
    } else {
        x + 1
    }
}

/// `m` certificates whose isolated members have `target` as pointwise majority.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorityDecomposition {
    pub target: BooleanFunction,
    pub certs: Vec<Certificate>,
    pub funcs: Vec<BooleanFunction>,
    pub m: usize,
    pub seed: u64,
    /// Sampling attempts used, counting the successful one.
    pub attempts: u32,
    pub strategy_value: f64,
    pub strategy_support: usize,
}

impl MajorityDecomposition {
    pub fn max_certificate_size(&self) -> usize {
        self.certs.iter().map(Certificate::size).max().unwrap_or(0)
    }

    /// Re-check isolation of every slot and the majority identity.
    pub fn verify(&self, s: &ConceptClass) -> bool {
        verify_slots(s, &self.certs, &self.funcs)
            && self.m == self.funcs.len()
            && self.m % 2 == 1
            && pointwise_majority(&self.funcs).is_ok_and(|maj| maj == self.target)
    }
}

fn verify_slots(s: &ConceptClass, certs: &[Certificate], funcs: &[BooleanFunction]) -> bool {
    certs.len() == funcs.len()
        && certs
            .iter()
            .zip(funcs)
            .all(|(c, f)| s.is_isolated(c, f).unwrap_or(false))
}

/// Draw sample sets of `m` columns from the strategy until `accept` holds,
/// first at `m0` and then once at `2 m0 + 1`.
fn sample_until(
    strategy: &AliceStrategy,
    m0: usize,
    seed: u64,
    stream_id: u64,
    stage: &'static str,
    mut accept: impl FnMut(&[BooleanFunction]) -> bool,
) -> Result<(Vec<usize>, usize, u32)> {
    let weights = WeightedIndex::new(&strategy.weights)
        .map_err(|e| Error::SolverDefect(format!("strategy weights: {e}")))?;
    let single = strategy.support.len() == 1;
    let sizes = if single { vec![1] } else { vec![m0, 2 * m0 + 1] };
    let mut attempt: u32 = 0;
    for m in sizes {
        for _ in 0..ATTEMPTS_PER_SIZE {
            let mut rng = indexed(seed, stream_id, attempt as u64);
            attempt += 1;
            let picks: Vec<usize> = (0..m).map(|_| weights.sample(&mut rng)).collect();
            let funcs: Vec<BooleanFunction> =
                picks.iter().map(|&j| strategy.support[j].1.clone()).collect();
            if accept(&funcs) {
                return Ok((picks, m, attempt));
            }
        }
    }
    Err(Error::RetriesExhausted {
        stage,
        attempts: attempt as usize,
    })
}

/// Sample a verified majority decomposition of `f_star`.
///
/// The strategy comes from [`double_oracle_solve`]; `m` is the smallest odd
/// integer at least `20 n` (or 1 when the strategy has a single pair).
pub fn majority_certificates(s: &ConceptClass, f_star: &BooleanFunction, seed: u64) -> Result<MajorityDecomposition> {
    let strategy = double_oracle_solve(s, f_star, DEFAULT_TARGET)?;
    majority_from_strategy(s, &strategy, seed)
}

pub fn majority_from_strategy(s: &ConceptClass, strategy: &AliceStrategy, seed: u64) -> Result<MajorityDecomposition> {
    let target = &strategy.target;
    let m0 = smallest_odd_at_least(20 * target.domain().bits() as usize);
    let (picks, m, attempts) = sample_until(strategy, m0, seed, stream::MAJORITY_SAMPLE, "majority sample", |funcs| {
        pointwise_majority(funcs).is_ok_and(|maj| &maj == target)
    })?;
    let dec = MajorityDecomposition {
        target: target.clone(),
        certs: picks.iter().map(|&j| strategy.support[j].0.clone()).collect(),
        funcs: picks.iter().map(|&j| strategy.support[j].1.clone()).collect(),
        m,
        seed,
        attempts,
        strategy_value: strategy.game_value,
        strategy_support: strategy.support.len(),
    };
    if !dec.verify(s) {
        return Err(Error::PostconditionViolated {
            operation: "majority_certificates",
            detail: "sampled decomposition failed re-verification".into(),
        });
    }
    Ok(dec)
}

/// A majority decomposition with `2m/3` versus `m/3` vote margins.
#[derive(Clone, Debug, PartialEq)]
pub struct RobustDecomposition {
    pub target: BooleanFunction,
    pub certs: Vec<Certificate>,
    pub funcs: Vec<BooleanFunction>,
    pub m: usize,
    /// `ceil(2m/3)`: minimum votes where the target is 1.
    pub upper: usize,
    /// `floor(m/3)`: maximum votes where the target is 0.
    pub lower: usize,
    pub seed: u64,
    pub attempts: u32,
}

fn margins_hold(target: &BooleanFunction, funcs: &[BooleanFunction]) -> bool {
    let m = funcs.len();
    let (upper, lower) = ((2 * m).div_ceil(3), m / 3);
    match vote_counts(funcs) {
        Ok(counts) => target.domain().inputs().all(|x| {
            if target.get(x) {
                counts[x] >= upper
            } else {
                counts[x] <= lower
            }
        }),
        Err(_) => false,
    }
}

impl RobustDecomposition {
    /// Validate a hand-built decomposition.
    pub fn new(
        s: &ConceptClass,
        target: BooleanFunction,
        certs: Vec<Certificate>,
        funcs: Vec<BooleanFunction>,
    ) -> Result<Self> {
        if funcs.is_empty() {
            return Err(invalid("decomposition needs at least one slot"));
        }
        s.require_member(&target)?;
        if !verify_slots(s, &certs, &funcs) {
            return Err(invalid("some certificate does not isolate its function"));
        }
        if !margins_hold(&target, &funcs) {
            return Err(invalid("vote margins do not hold"));
        }
        let m = funcs.len();
        Ok(Self {
            target,
            certs,
            funcs,
            m,
            upper: (2 * m).div_ceil(3),
            lower: m / 3,
            seed: 0,
            attempts: 0,
        })
    }

    pub fn verify(&self, s: &ConceptClass) -> bool {
        self.m == self.funcs.len()
            && self.upper == (2 * self.m).div_ceil(3)
            && self.lower == self.m / 3
            && verify_slots(s, &self.certs, &self.funcs)
            && margins_hold(&self.target, &self.funcs)
    }

    /// Votes for 1 at every input.
    pub fn votes(&self) -> Vec<usize> {
        vote_counts(&self.funcs).expect("validated on construction")
    }

    /// `histogram[v]` = number of inputs receiving exactly `v` votes.
    pub fn margin_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.m + 1];
        for v in self.votes() {
            h[v] += 1;
        }
        h
    }

    pub fn max_certificate_size(&self) -> usize {
        self.certs.iter().map(Certificate::size).max().unwrap_or(0)
    }
}

/// Sample a decomposition whose votes clear the `2m/3` / `m/3` margins,
/// with `m` the smallest odd integer at least `60 n`.
pub fn robust_majority_certificates(
    s: &ConceptClass,
    f_star: &BooleanFunction,
    seed: u64,
) -> Result<RobustDecomposition> {
    let strategy = double_oracle_solve(s, f_star, DEFAULT_TARGET)?;
    let m0 = smallest_odd_at_least(60 * f_star.domain().bits() as usize);
    let (picks, m, attempts) = sample_until(&strategy, m0, seed, stream::ROBUST_SAMPLE, "robust sample", |funcs| {
        margins_hold(f_star, funcs)
    })?;
    let dec = RobustDecomposition {
        target: f_star.clone(),
        certs: picks.iter().map(|&j| strategy.support[j].0.clone()).collect(),
        funcs: picks.iter().map(|&j| strategy.support[j].1.clone()).collect(),
        m,
        upper: (2 * m).div_ceil(3),
        lower: m / 3,
        seed,
        attempts,
    };
    if !dec.verify(s) {
        return Err(Error::PostconditionViolated {
            operation: "robust_majority_certificates",
            detail: "sampled decomposition failed re-verification".into(),
        });
    }
    Ok(dec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleOutput {
    Zero,
    One,
    Fail,
}

impl OracleOutput {
    pub fn bit(self) -> Option<bool> {
        match self {
            OracleOutput::Zero => Some(false),
            OracleOutput::One => Some(true),
            OracleOutput::Fail => None,
        }
    }
}

/// Evaluate `x` from untrusted claimed tables: FAIL if any claim breaks its
/// certificate, otherwise the majority vote of the claims at `x`.
pub fn untrusted_oracle_evaluate(
    d: &RobustDecomposition,
    claims: &[BooleanFunction],
    x: Input,
) -> Result<OracleOutput> {
    if claims.len() != d.m {
        return Err(invalid(format!("expected {} claims, got {}", d.m, claims.len())));
    }
    d.target.domain().ensure_contains(x)?;
    for claim in claims {
        d.target.domain().ensure_same(claim.domain())?;
    }
    if claims.iter().zip(&d.certs).any(|(g, c)| !c.is_consistent(g)) {
        return Ok(OracleOutput::Fail);
    }
    let votes = claims.iter().filter(|g| g.get(x)).count();
    Ok(if 2 * votes >= d.m {
        OracleOutput::One
    } else {
        OracleOutput::Zero
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::InputDomain;
    use crate::generate::{point_functions, random_boolean};

    #[test]
    fn odd_rounding() {
        assert_eq!(smallest_odd_at_least(0), 1);
        assert_eq!(smallest_odd_at_least(120), 121);
        assert_eq!(smallest_odd_at_least(121), 121);
    }

    #[test]
    fn singleton_collapses_to_one_slot() {
        let f = BooleanFunction::ones(InputDomain::new(3).unwrap());
        let s = ConceptClass::new([f.clone()]).unwrap();
        let d = majority_certificates(&s, &f, 0).unwrap();
        assert_eq!(d.m, 1);
        assert!(d.certs[0].is_empty());
        let r = robust_majority_certificates(&s, &f, 0).unwrap();
        assert_eq!(r.m, 1);
        assert!(r.verify(&s));
    }

    #[test]
    fn point_class_decomposes() {
        let s = point_functions(InputDomain::new(6).unwrap(), 64, 0).unwrap();
        let zero = s.member(0).clone();
        let d = majority_certificates(&s, &zero, 1).unwrap();
        assert!(d.verify(&s));
        assert_eq!(d.m, 121);
        let r = robust_majority_certificates(&s, &zero, 1).unwrap();
        assert!(r.verify(&s));
        assert_eq!(r.margin_histogram().iter().sum::<usize>(), 64);
    }

    #[test]
    fn random_classes_decompose() {
        for seed in 0..10 {
            let s = random_boolean(InputDomain::new(5).unwrap(), 40, seed).unwrap();
            let f = s.member(seed as usize % 40).clone();
            let d = majority_certificates(&s, &f, seed).unwrap();
            assert_eq!(pointwise_majority(&d.funcs).unwrap(), f);
            for (c, g) in d.certs.iter().zip(&d.funcs) {
                assert!(s.is_isolated(c, g).unwrap());
            }
        }
    }

    #[test]
    fn oracle_fails_on_inconsistent_claims() {
        let s = point_functions(InputDomain::new(4).unwrap(), 16, 0).unwrap();
        let zero = s.member(0).clone();
        let r = robust_majority_certificates(&s, &zero, 3).unwrap();
        let honest = r.funcs.clone();
        for x in 0..16 {
            assert_eq!(untrusted_oracle_evaluate(&r, &honest, x).unwrap(), OracleOutput::Zero);
        }
        let (i, (p, b)) = r
            .certs
            .iter()
            .enumerate()
            .find_map(|(i, c)| c.iter().next().map(|a| (i, a)))
            .expect("some certificate is non-empty");
        let mut bad = honest.clone();
        bad[i].set(p, !b);
        assert_eq!(untrusted_oracle_evaluate(&r, &bad, 0).unwrap(), OracleOutput::Fail);
        assert!(untrusted_oracle_evaluate(&r, &honest[1..], 0).is_err());
    }

    #[test]
    fn manual_robust_decomposition_validated() {
        let d = InputDomain::new(2).unwrap();
        let zero = BooleanFunction::zeros(d);
        let pts: Vec<BooleanFunction> = (0..3).map(|y| BooleanFunction::point(d, y).unwrap()).collect();
        let s = ConceptClass::new([zero.clone(), pts[0].clone(), pts[1].clone(), pts[2].clone()]).unwrap();
        let certs: Vec<Certificate> = (0..3)
            .map(|y| Certificate::from_pairs(d, [(y, true)]).unwrap())
            .collect();
        let r = RobustDecomposition::new(&s, zero.clone(), certs.clone(), pts.clone()).unwrap();
        assert_eq!((r.upper, r.lower), (2, 1));
        assert!(RobustDecomposition::new(&s, pts[0].clone(), certs, pts).is_err());
    }
}
