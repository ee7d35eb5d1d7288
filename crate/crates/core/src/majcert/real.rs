use std::collections::{BTreeSet, HashMap};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;

use crate::concept::{expected_abs, sup_on, Distribution, Input, PConceptClass, RealFunction};
use crate::error::{invalid, Error, Result};
use crate::game::solve_matrix_game;
use crate::rng::{indexed, stream};
use crate::winnow::{epsilon_cover, fat_shattering_dim, safe_winnow};

use super::boolean::ATTEMPTS_PER_SIZE;

const SLACK: f64 = 1e-12;
/// Validation attempts per stage-one sample size.
pub const STAGE_ONE_RETRIES: u32 = 8;
/// Sample-size doublings allowed in stage one.
pub const STAGE_ONE_DOUBLINGS: u32 = 8;

/// Average-of-members decomposition: every choice of `g_i` within `alpha`
/// of `funcs[i]` on `points[i]` averages to within `eps` of the target.
#[derive(Clone, Debug, PartialEq)]
pub struct RealDecomposition {
    pub target: RealFunction,
    pub funcs: Vec<RealFunction>,
    pub points: Vec<BTreeSet<Input>>,
    pub alpha: f64,
    pub eps: f64,
    pub m: usize,
    pub seed: u64,
    /// `max(1, max log2 |cover|)` over the generated columns.
    pub t: f64,
    /// Expected penalty of the final mixed strategy against Bob's best reply.
    pub game_penalty: f64,
    pub strategy_support: usize,
    /// Stage-one sample sizes used by each generated column.
    pub stage_one_sizes: Vec<usize>,
    pub attempts: u32,
}

impl RealDecomposition {
    pub fn max_points(&self) -> usize {
        self.points.iter().map(BTreeSet::len).max().unwrap_or(0)
    }
}

/// Per-input extremes of the slot-averaged admissible members.
#[derive(Clone, Debug, PartialEq)]
pub struct RealBounds {
    pub hi: Vec<f64>,
    pub lo: Vec<f64>,
    /// `max_x max(|f*(x) - hi(x)|, |f*(x) - lo(x)|)`.
    pub worst: f64,
}

fn admissible(s: &PConceptClass, f: &RealFunction, xs: &BTreeSet<Input>, alpha: f64) -> Vec<usize> {
    (0..s.len())
        .filter(|&g| sup_on(f, s.member(g), xs) <= alpha + SLACK)
        .collect()
}

type SlotKey = (Vec<u64>, Vec<Input>);

/// Exact extremal bounds, or `None` if some slot admits no member.
pub fn real_decomposition_bounds(s: &PConceptClass, d: &RealDecomposition) -> Option<RealBounds> {
    let size = s.domain().size();
    let mut hi = vec![0.0; size];
    let mut lo = vec![0.0; size];
    let mut cache: HashMap<SlotKey, (Vec<f64>, Vec<f64>)> = HashMap::new();
    for (f, xs) in d.funcs.iter().zip(&d.points) {
        let key = (
            f.values().iter().map(|v| v.to_bits()).collect(),
            xs.iter().copied().collect(),
        );
        let (shi, slo) = cache.entry(key).or_insert_with(|| {
            let adm = admissible(s, f, xs, d.alpha);
            let mut shi = vec![f64::NEG_INFINITY; size];
            let mut slo = vec![f64::INFINITY; size];
            for &g in &adm {
                for (x, v) in s.member(g).values().iter().enumerate() {
                    shi[x] = shi[x].max(*v);
                    slo[x] = slo[x].min(*v);
                }
            }
            (shi, slo)
        });
        if shi[0] == f64::NEG_INFINITY {
            return None;
        }
        for x in 0..size {
            hi[x] += shi[x];
            lo[x] += slo[x];
        }
    }
    let m = d.funcs.len() as f64;
    let mut worst: f64 = 0.0;
    for x in 0..size {
        hi[x] /= m;
        lo[x] /= m;
        let t = d.target.get(x);
        worst = worst.max((t - hi[x]).abs()).max((t - lo[x]).abs());
    }
    Some(RealBounds { hi, lo, worst })
}

/// True iff every admissible tuple averages to within `eps` of the target.
pub fn verify_real_decomposition(s: &PConceptClass, d: &RealDecomposition) -> bool {
    d.funcs.len() == d.m
        && d.points.len() == d.m
        && d.m > 0
        && real_decomposition_bounds(s, d).is_some_and(|b| b.worst <= d.eps + SLACK)
}

#[derive(Clone, Debug)]
struct Column {
    f: usize,
    points: BTreeSet<Input>,
    log_cover: f64,
    stage_one: usize,
}

struct Generator<'a> {
    s: &'a PConceptClass,
    target: usize,
    beta: f64,
    m0: usize,
    seed: u64,
    calls: u64,
}

impl Generator<'_> {
    /// Stage one: a sample `Y` from `d` on which sup-closeness to the target
    /// implies mean closeness under `d`. Stage two: safe winnowing of the
    /// members close to the target on `Y`.
    fn column(&mut self, d: &Distribution) -> Result<Column> {
        let s = self.s;
        let f_star = s.member(self.target);
        let call = self.calls;
        self.calls += 1;
        let mut size = self.m0;
        let mut attempt: u64 = 0;
        for _ in 0..=STAGE_ONE_DOUBLINGS {
            for _ in 0..STAGE_ONE_RETRIES {
                let mut rng = indexed(self.seed, stream::REAL_STAGE_ONE, (call << 16) | attempt);
                attempt += 1;
                let y: BTreeSet<Input> = d.sample(&mut rng, size).into_iter().collect();
                let close: Vec<usize> = (0..s.len())
                    .filter(|&g| sup_on(f_star, s.member(g), &y) <= self.beta)
                    .collect();
                let valid = close
                    .iter()
                    .all(|&g| expected_abs(f_star, s.member(g), d) <= 11.0 * self.beta + SLACK);
                if !valid {
                    continue;
                }
                let sub = s.subclass(&close)?;
                let cover = epsilon_cover(&sub, 4.0 * self.beta)?;
                let w = safe_winnow(&sub, f_star, &y, 4.0 * self.beta, &cover)?;
                let mut points = y;
                points.extend(w.z.iter().copied());
                return Ok(Column {
                    f: close[w.index],
                    points,
                    log_cover: (cover.len() as f64).log2(),
                    stage_one: size,
                });
            }
            size *= 2;
        }
        Err(Error::RetriesExhausted {
            stage: "real stage-one sample",
            attempts: attempt as usize,
        })
    }
}

fn penalties(s: &PConceptClass, target: &RealFunction, col: &Column, alpha: f64) -> Vec<f64> {
    let adm = admissible(s, s.member(col.f), &col.points, alpha);
    s.domain()
        .inputs()
        .map(|x| {
            adm.iter()
                .map(|&g| (target.get(x) - s.member(g).get(x)).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Build a verified real decomposition of `f_star` within `eps`.
///
/// Columns `(f, X)` are generated against Bob's current optimal input
/// distribution until Alice's mixed strategy keeps the expected penalty at or
/// below `eps / 2`; then `ceil(20 n / eps^2)` slots are sampled from it and
/// verified exactly.
pub fn real_majority_certificates(
    s: &PConceptClass,
    f_star: &RealFunction,
    eps: f64,
    seed: u64,
) -> Result<RealDecomposition> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("eps must lie in (0,1], got {eps}")));
    }
    let target = s.require_member(f_star)?;
    let domain = s.domain();
    let beta = eps / 48.0;
    let fat = fat_shattering_dim(s, beta)?.value();
    let log_term = (1.0 / beta).log2().powi(2).ceil() as usize;
    let mut generator = Generator {
        s,
        target,
        beta,
        m0: 4 * fat * log_term + 8,
        seed,
        calls: 0,
    };

    let mut columns = vec![generator.column(&Distribution::uniform(domain))?];
    let cap = 4 * domain.size() + 32;
    let mut solved = None;
    for _ in 0..cap {
        let t = columns.iter().map(|c| c.log_cover).fold(1.0, f64::max);
        let alpha = 0.4 * beta / t;
        let pen: Vec<Vec<f64>> = columns.iter().map(|c| penalties(s, f_star, c, alpha)).collect();
        let payoff: Vec<Vec<f64>> = domain
            .inputs()
            .map(|x| pen.iter().map(|p| 1.0 - p[x]).collect())
            .collect();
        let eq = solve_matrix_game(&payoff)?;
        let penalty = 1.0 - eq.value;
        if penalty <= eps / 2.0 + SLACK {
            solved = Some((eq.maximizer, penalty, t, alpha));
            break;
        }
        let d = Distribution::normalized(domain, eq.minimizer)?;
        let next = generator.column(&d)?;
        if columns.iter().any(|c| c.f == next.f && c.points == next.points) {
            return Err(Error::SolverDefect(format!(
                "generator repeated a column at penalty {penalty}"
            )));
        }
        columns.push(next);
    }
    let (weights, penalty, t, alpha) = solved.ok_or(Error::RetriesExhausted {
        stage: "real outer game",
        attempts: cap,
    })?;

    let support = weights.iter().filter(|&&w| w > 1e-15).count();
    let m = if support == 1 {
        1
    } else {
        (20.0 * domain.bits() as f64 / (eps * eps)).ceil() as usize
    };
    let picker = WeightedIndex::new(&weights).map_err(|e| Error::SolverDefect(format!("strategy weights: {e}")))?;
    let stage_one_sizes = columns.iter().map(|c| c.stage_one).collect();
    for attempt in 0..ATTEMPTS_PER_SIZE {
        let mut rng = indexed(seed, stream::REAL_SAMPLE, attempt as u64);
        let picks: Vec<usize> = (0..m).map(|_| picker.sample(&mut rng)).collect();
        let dec = RealDecomposition {
            target: f_star.clone(),
            funcs: picks.iter().map(|&j| s.member(columns[j].f).clone()).collect(),
            points: picks.iter().map(|&j| columns[j].points.clone()).collect(),
            alpha,
            eps,
            m,
            seed,
            t,
            game_penalty: penalty,
            strategy_support: support,
            stage_one_sizes: Vec::new(),
            attempts: attempt + 1,
        };
        if verify_real_decomposition(s, &dec) {
            return Ok(RealDecomposition {
                stage_one_sizes,
                ..dec
            });
        }
    }
    Err(Error::RetriesExhausted {
        stage: "real majority sample",
        attempts: ATTEMPTS_PER_SIZE as usize,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OccamReport {
    pub m: usize,
    pub trials: usize,
    pub passes: usize,
}

impl OccamReport {
    pub fn pass_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.passes as f64 / self.trials as f64
        }
    }
}

/// Fraction of sampled `X` (m draws from `d`) for which every member within
/// `eps` of `f` on `X` is within `11 eps` of `f` in mean under `d`.
pub fn occam_check(
    s: &PConceptClass,
    f: &RealFunction,
    d: &Distribution,
    eps: f64,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<OccamReport> {
    s.require_member(f)?;
    s.domain().ensure_same(d.domain())?;
    let mean: Vec<f64> = s.members().iter().map(|h| expected_abs(f, h, d)).collect();
    let mut passes = 0;
    for trial in 0..trials {
        let mut rng = indexed(seed, stream::OCCAM, trial as u64);
        let xs: BTreeSet<Input> = d.sample(&mut rng, m).into_iter().collect();
        let ok = s
            .members()
            .iter()
            .zip(&mean)
            .all(|(h, &e)| sup_on(h, f, &xs) > eps || e <= 11.0 * eps + SLACK);
        passes += ok as usize;
    }
    Ok(OccamReport { m, trials, passes })
}

/// Starting sample size `4 fat_eps(S) ceil(log2(1/eps)^2) + 8`.
pub fn occam_initial_m(s: &PConceptClass, eps: f64) -> Result<usize> {
    let fat = fat_shattering_dim(s, eps)?.value();
    let log_term = (1.0 / eps).log2().max(0.0).powi(2).ceil() as usize;
    Ok(4 * fat * log_term + 8)
}

/// Double `m` from [`occam_initial_m`] until the pass rate reaches 1/2.
pub fn occam_schedule(
    s: &PConceptClass,
    f: &RealFunction,
    d: &Distribution,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<OccamReport> {
    let mut m = occam_initial_m(s, eps)?;
    for _ in 0..=STAGE_ONE_DOUBLINGS {
        let report = occam_check(s, f, d, eps, m, trials, seed)?;
        if report.pass_rate() >= 0.5 {
            return Ok(report);
        }
        m *= 2;
    }
    Err(Error::RetriesExhausted {
        stage: "occam schedule",
        attempts: STAGE_ONE_DOUBLINGS as usize + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::InputDomain;
    use crate::generate::random_pconcept;
    use rand::Rng;

    #[test]
    fn singleton_class() {
        let d = InputDomain::new(2).unwrap();
        let f = RealFunction::constant(d, 0.4).unwrap();
        let s = PConceptClass::new([f.clone()]).unwrap();
        let r = real_majority_certificates(&s, &f, 0.25, 0).unwrap();
        assert_eq!(r.m, 1);
        assert!(verify_real_decomposition(&s, &r));
    }

    #[test]
    fn trivial_full_pin_verifies() {
        let d = InputDomain::new(3).unwrap();
        let s = random_pconcept(d, 10, None, 2).unwrap();
        let dec = RealDecomposition {
            target: s.member(0).clone(),
            funcs: vec![s.member(0).clone()],
            points: vec![d.inputs().collect()],
            alpha: 0.0,
            eps: 0.0,
            m: 1,
            seed: 0,
            t: 1.0,
            game_penalty: 0.0,
            strategy_support: 1,
            stage_one_sizes: vec![],
            attempts: 1,
        };
        assert!(verify_real_decomposition(&s, &dec));
    }

    #[test]
    fn random_classes_decompose_and_alpha_matches() {
        let d = InputDomain::new(3).unwrap();
        for seed in 0..3 {
            let s = random_pconcept(d, 40, None, seed).unwrap();
            let f = s.member(0).clone();
            let r = real_majority_certificates(&s, &f, 0.25, seed).unwrap();
            assert!(verify_real_decomposition(&s, &r));
            assert!((r.alpha - 0.4 * (0.25 / 48.0) / r.t).abs() < 1e-15);
            assert!(r.game_penalty <= 0.125 + 1e-12);
        }
    }

    #[test]
    fn inflated_alpha_is_caught() {
        let d = InputDomain::new(3).unwrap();
        let s = random_pconcept(d, 40, None, 5).unwrap();
        let f = s.member(0).clone();
        let mut r = real_majority_certificates(&s, &f, 0.25, 5).unwrap();
        r.alpha *= 100.0;
        r.alpha = r.alpha.max(1.0);
        assert!(!verify_real_decomposition(&s, &r));
    }

    #[test]
    fn sampled_adversaries_never_beat_extremes() {
        let d = InputDomain::new(3).unwrap();
        let s = random_pconcept(d, 40, None, 8).unwrap();
        let f = s.member(0).clone();
        let mut r = real_majority_certificates(&s, &f, 0.25, 8).unwrap();
        r.alpha *= 20.0;
        let Some(b) = real_decomposition_bounds(&s, &r) else {
            return;
        };
        let slots: Vec<Vec<usize>> = r
            .funcs
            .iter()
            .zip(&r.points)
            .map(|(g, xs)| admissible(&s, g, xs, r.alpha))
            .collect();
        let mut rng = crate::rng::substream(1, 2);
        for _ in 0..200 {
            let picks: Vec<usize> = slots.iter().map(|a| a[rng.random_range(0..a.len())]).collect();
            for x in d.inputs() {
                let avg: f64 = picks.iter().map(|&g| s.member(g).get(x)).sum::<f64>() / r.m as f64;
                assert!(avg <= b.hi[x] + 1e-12 && avg >= b.lo[x] - 1e-12);
            }
        }
    }

    #[test]
    fn occam_degenerate_cases() {
        let d = InputDomain::new(3).unwrap();
        let s = random_pconcept(d, 20, None, 1).unwrap();
        let f = s.member(0).clone();
        let u = Distribution::uniform(d);
        let full = occam_check(&s, &f, &u, 0.05, 64, 20, 0).unwrap();
        assert!(full.pass_rate() > 0.9);
        let empty = occam_check(&s, &f, &u, 0.05, 0, 5, 0).unwrap();
        let expect = s
            .members()
            .iter()
            .all(|h| expected_abs(&f, h, &u) <= 0.55 + 1e-12);
        assert_eq!(empty.passes == 5, expect);
    }
}
