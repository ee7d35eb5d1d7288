use std::collections::HashMap;

use crate::concept::{BooleanFunction, Certificate, ConceptClass, Distribution, Input};
use crate::error::{invalid, Error, Result};
use crate::game::solve_matrix_game;
use crate::winnow::{min_isolating_certificate, weak_certify};

/// Most isolating certificates the full enumeration may produce.
pub const FULL_LP_BUDGET: u64 = 100_000;
/// Most input subsets the full enumeration may scan.
const SUBSET_BUDGET: u64 = 20_000_000;
/// Default stopping value for [`double_oracle_solve`].
pub const DEFAULT_TARGET: f64 = 0.9;
const VALUE_SLACK: f64 = 1e-12;
const WEIGHT_FLOOR: f64 = 1e-15;

/// A mixed strategy over (certificate, isolated member) pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct AliceStrategy {
    pub target: BooleanFunction,
    pub support: Vec<(Certificate, BooleanFunction)>,
    pub weights: Vec<f64>,
    /// `min_x Σ_j w_j [f_j(x) = f*(x)]`, recomputed from the support.
    pub game_value: f64,
    /// Restricted-game value after each solver iteration.
    pub value_history: Vec<f64>,
}

impl AliceStrategy {
    fn build(
        target: &BooleanFunction,
        columns: Vec<(Certificate, BooleanFunction)>,
        weights: &[f64],
        value_history: Vec<f64>,
    ) -> Self {
        let mut support = Vec::new();
        let mut kept = Vec::new();
        for (col, &w) in columns.into_iter().zip(weights) {
            if w > WEIGHT_FLOOR {
                support.push(col);
                kept.push(w);
            }
        }
        let total: f64 = kept.iter().sum();
        for w in kept.iter_mut() {
            *w /= total;
        }
        let mut strategy = Self {
            target: target.clone(),
            support,
            weights: kept,
            game_value: 0.0,
            value_history,
        };
        strategy.game_value = strategy.worst_case_value();
        strategy
    }

    /// Probability that a draw from the strategy agrees with the target at `x`.
    pub fn value_at(&self, x: Input) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .filter(|((_, f), _)| f.get(x) == self.target.get(x))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn worst_case_value(&self) -> f64 {
        self.target
            .domain()
            .inputs()
            .map(|x| self.value_at(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_certificate_size(&self) -> usize {
        self.support.iter().map(|(c, _)| c.size()).max().unwrap_or(0)
    }
}

fn agreement_matrix(target: &BooleanFunction, funcs: &[&BooleanFunction]) -> Vec<Vec<f64>> {
    target
        .domain()
        .inputs()
        .map(|x| {
            funcs
                .iter()
                .map(|f| if f.get(x) == target.get(x) { 1.0 } else { 0.0 })
                .collect()
        })
        .collect()
}

fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    for size in 0..=k.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            visit(&idx)?;
            // Advance to the next lexicographic combination.
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] < n - size + i {
                    idx[i] += 1;
                    for j in i + 1..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if size == 0 || i == usize::MAX {
                break;
            }
        }
    }
    Ok(())
}

fn binomial_sum(n: usize, k: usize) -> u64 {
    let mut total: u64 = 0;
    let mut c: u64 = 1;
    for j in 0..=k.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul((n - j) as u64) / (j as u64 + 1);
    }
    total
}

/// Solve the certificate game over every certificate of at most `k`
/// assignments that isolates some member.
///
/// Columns are deduplicated by the isolated member, since the payoff
/// depends only on it; each keeps the first certificate found (smallest
/// size, then lexicographic point set).
pub fn solve_game_full_lp(s: &ConceptClass, f_star: &BooleanFunction, k: usize) -> Result<AliceStrategy> {
    s.require_member(f_star)?;
    let domain = s.domain();
    if k > 64 {
        return Err(invalid("certificate size bound above 64 is not supported"));
    }
    let subsets = binomial_sum(domain.size(), k);
    if subsets > SUBSET_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "certificate subsets",
            count: subsets,
            limit: SUBSET_BUDGET,
        });
    }
    let mut first: Vec<Option<Certificate>> = vec![None; s.len()];
    let mut isolating: u64 = 0;
    for_each_combination(domain.size(), k, |points| {
        let mut groups: HashMap<u64, (usize, usize)> = HashMap::new();
        for (i, f) in s.members().iter().enumerate() {
            let pattern = points
                .iter()
                .enumerate()
                .fold(0u64, |p, (j, &x)| p | ((f.get(x) as u64) << j));
            groups.entry(pattern).or_insert((i, 0)).1 += 1;
        }
        for &(i, count) in groups.values() {
            if count == 1 {
                isolating += 1;
                if first[i].is_none() {
                    let f = s.member(i);
                    first[i] = Some(Certificate::from_pairs(
                        domain,
                        points.iter().map(|&x| (x, f.get(x))),
                    )?);
                }
            }
        }
        if isolating > FULL_LP_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "isolating certificates",
                count: isolating,
                limit: FULL_LP_BUDGET,
            });
        }
        Ok(())
    })?;

    let columns: Vec<(Certificate, BooleanFunction)> = first
        .into_iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|c| (c, s.member(i).clone())))
        .collect();
    if columns.is_empty() {
        return Err(invalid(format!("no member is isolated by a certificate of size <= {k}")));
    }
    let funcs: Vec<&BooleanFunction> = columns.iter().map(|(_, f)| f).collect();
    let eq = solve_matrix_game(&agreement_matrix(f_star, &funcs))?;
    Ok(AliceStrategy::build(f_star, columns, &eq.maximizer, vec![eq.value]))
}

/// Column generation with [`weak_certify`] as Alice's best-response oracle.
///
/// Each round solves the restricted game, stops once its value reaches
/// `target_value`, and otherwise asks the weak certifier for a pair that
/// does well against Bob's current optimal distribution.
pub fn double_oracle_solve(
    s: &ConceptClass,
    f_star: &BooleanFunction,
    target_value: f64,
) -> Result<AliceStrategy> {
    s.require_member(f_star)?;
    if !(0.0..=1.0).contains(&target_value) {
        return Err(invalid(format!("target value {target_value} outside [0,1]")));
    }
    let domain = s.domain();
    let first = weak_certify(s, f_star, &Distribution::uniform(domain))?;
    let mut members = vec![first.index];
    let mut columns = vec![(first.certificate, first.f)];
    let mut history = Vec::new();
    let cap = 10 * s.len();
    for _ in 0..cap {
        let funcs: Vec<&BooleanFunction> = columns.iter().map(|(_, f)| f).collect();
        let eq = solve_matrix_game(&agreement_matrix(f_star, &funcs))?;
        history.push(eq.value);
        if eq.value >= target_value - VALUE_SLACK {
            return Ok(AliceStrategy::build(f_star, columns, &eq.maximizer, history));
        }
        let d = Distribution::normalized(domain, eq.minimizer)?;
        let next = weak_certify(s, f_star, &d)?;
        if members.contains(&next.index) {
            return Err(Error::SolverDefect(format!(
                "weak certifier repeated member {} at restricted value {}",
                next.index, eq.value
            )));
        }
        members.push(next.index);
        columns.push((next.certificate, next.f));
    }
    Err(Error::SolverDefect(format!(
        "double oracle did not reach {target_value} within {cap} iterations"
    )))
}

/// Column generation with an exact best-response oracle over members
/// isolated by at most `k` assignments, run to convergence. Its value
/// equals [`solve_game_full_lp`]'s for the same `k`.
pub fn double_oracle_bounded(s: &ConceptClass, f_star: &BooleanFunction, k: usize) -> Result<AliceStrategy> {
    s.require_member(f_star)?;
    let domain = s.domain();
    let candidates: Vec<(usize, Certificate)> = (0..s.len())
        .filter_map(|i| min_isolating_certificate(s, i, k).map(|c| (i, c)))
        .collect();
    if candidates.is_empty() {
        return Err(invalid(format!("no member is isolated by a certificate of size <= {k}")));
    }
    let agreement = |i: usize, d: &[f64]| -> f64 {
        let f = s.member(i);
        domain
            .inputs()
            .filter(|&x| f.get(x) == f_star.get(x))
            .map(|x| d[x])
            .sum()
    };
    let uniform = vec![1.0 / domain.size() as f64; domain.size()];
    let start = candidates
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, (i, _))| {
            let v = agreement(*i, &uniform);
            if v > best.1 {
                (j, v)
            } else {
                best
            }
        })
        .0;
    let mut chosen = vec![start];
    let mut history = Vec::new();
    for _ in 0..=candidates.len() {
        let funcs: Vec<&BooleanFunction> = chosen.iter().map(|&j| s.member(candidates[j].0)).collect();
        let eq = solve_matrix_game(&agreement_matrix(f_star, &funcs))?;
        history.push(eq.value);
        let (best, best_value) = candidates
            .iter()
            .enumerate()
            .map(|(j, (i, _))| (j, agreement(*i, &eq.minimizer)))
            .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best_value <= eq.value + VALUE_SLACK || chosen.contains(&best) {
            let columns = chosen
                .iter()
                .map(|&j| (candidates[j].1.clone(), s.member(candidates[j].0).clone()))
                .collect();
            return Ok(AliceStrategy::build(f_star, columns, &eq.maximizer, history));
        }
        chosen.push(best);
    }
    Err(Error::SolverDefect("bounded double oracle did not converge".into()))
}
