//! The family `f(x) = a_x / n` with `Σ a_x = n²`, `0 <= a_x <= n`, and its
//! corruption map, which shows that closeness in L2 on any pinned set leaving
//! a zero of `f` unpinned says nothing about sup-distance.

use std::collections::BTreeSet;

use rand::Rng;

use crate::concept::{Input, InputDomain, PConceptClass, RealFunction};
use crate::error::{invalid, Error, Result};
use crate::generate::MAX_CLASS_SIZE;
use crate::rng::{substream, stream};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L2Member {
    n: u32,
    coefficients: Vec<u32>,
}

impl L2Member {
    pub fn new(n: u32, coefficients: Vec<u32>) -> Result<Self> {
        let domain = family_domain(n)?;
        if coefficients.len() != domain.size() {
            return Err(invalid(format!(
                "expected {} coefficients, got {}",
                domain.size(),
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|&a| a > n) {
            return Err(invalid(format!("coefficients must lie in 0..={n}")));
        }
        let total: u64 = coefficients.iter().map(|&a| a as u64).sum();
        if total != (n as u64) * (n as u64) {
            return Err(invalid(format!("coefficients sum to {total}, expected {}", n * n)));
        }
        Ok(Self { n, coefficients })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coefficients(&self) -> &[u32] {
        &self.coefficients
    }

    pub fn to_function(&self) -> RealFunction {
        let domain = InputDomain::new(self.n).expect("validated");
        let n = self.n as f64;
        RealFunction::new(domain, self.coefficients.iter().map(|&a| a as f64 / n).collect())
            .expect("coefficients are at most n")
    }
}

fn family_domain(n: u32) -> Result<InputDomain> {
    if n < 2 {
        return Err(invalid(format!("the family needs n >= 2, got {n}")));
    }
    let domain = InputDomain::new(n)?;
    domain.ensure_real()?;
    Ok(domain)
}

/// Number of family members, or `None` if it does not fit in `u128`.
fn family_size(n: u32) -> Option<u128> {
    let size = 1usize << n;
    let target = (n * n) as usize;
    // ways[s] = number of prefixes with coefficient sum s.
    let mut ways = vec![0u128; target + 1];
    ways[0] = 1;
    for _ in 0..size {
        let mut next = vec![0u128; target + 1];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for a in 0..=n as usize {
                if s + a > target {
                    break;
                }
                next[s + a] = next[s + a].checked_add(w)?;
            }
        }
        ways = next;
    }
    Some(ways[target])
}

/// Every member of the family, in lexicographic order of coefficient
/// vectors. Fails when the family exceeds the class-size limit.
pub fn l2_family(n: u32) -> Result<Vec<L2Member>> {
    let domain = family_domain(n)?;
    let count = family_size(n).unwrap_or(u128::MAX);
    if count > MAX_CLASS_SIZE as u128 {
        return Err(Error::BudgetExceeded {
            what: "l2 family size",
            count: count.min(u64::MAX as u128) as u64,
            limit: MAX_CLASS_SIZE as u64,
        });
    }
    let size = domain.size();
    let cap = n;
    let target = n * n;
    let mut out = Vec::with_capacity(count as usize);
    let mut coeffs = vec![0u32; size];
    fn fill(pos: usize, remaining: u32, cap: u32, coeffs: &mut Vec<u32>, out: &mut Vec<L2Member>, n: u32) {
        let slots_left = (coeffs.len() - pos) as u32;
        if remaining > slots_left * cap {
            return;
        }
        if pos == coeffs.len() {
            out.push(L2Member {
                n,
                coefficients: coeffs.clone(),
            });
            return;
        }
        for a in 0..=cap.min(remaining) {
            coeffs[pos] = a;
            fill(pos + 1, remaining - a, cap, coeffs, out, n);
        }
        coeffs[pos] = 0;
    }
    fill(0, target, cap, &mut coeffs, &mut out, n);
    Ok(out)
}

/// `count` random members: `n²` unit increments, each placed on a uniformly
/// chosen input that is still below `n`.
pub fn l2_sample(n: u32, count: usize, seed: u64) -> Result<Vec<L2Member>> {
    let domain = family_domain(n)?;
    let mut rng = substream(seed, stream::GENERATE);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut coeffs = vec![0u32; domain.size()];
        let mut open: Vec<Input> = domain.inputs().collect();
        for _ in 0..n * n {
            let k = rng.random_range(0..open.len());
            let x = open[k];
            coeffs[x] += 1;
            if coeffs[x] == n {
                open.swap_remove(k);
            }
        }
        out.push(L2Member {
            n,
            coefficients: coeffs,
        });
    }
    Ok(out)
}

/// The family as a p-concept class (explicit enumeration).
pub fn l2_counterexample(n: u32) -> Result<PConceptClass> {
    PConceptClass::new(l2_family(n)?.iter().map(L2Member::to_function))
}

#[derive(Clone, Debug, PartialEq)]
pub struct L2Corruption {
    pub g: L2Member,
    /// The `n` inputs lowered by `1/n`.
    pub z: Vec<Input>,
    /// The zero of `f` outside `X` raised to 1.
    pub y: Input,
    /// `Σ_{x in X} (a_x - a'_x)^2`; `Δ2(f,g)[X] = sqrt(this) / n`.
    pub squared_gap_on_x: u64,
    /// `max_x |a_x - a'_x|`; `Δ∞(f,g) = this / n`.
    pub max_gap: u32,
}

impl L2Corruption {
    pub fn delta2_on_x(&self) -> f64 {
        (self.squared_gap_on_x as f64).sqrt() / self.g.n as f64
    }

    pub fn delta_inf(&self) -> f64 {
        self.max_gap as f64 / self.g.n as f64
    }
}

/// Corrupt `f` into a family member `g` that agrees with `f` closely in L2
/// on `x_set` yet differs by 1 somewhere.
///
/// `Z` is the first `n` inputs where `f > 0`, `y` the first input outside
/// `x_set` where `f = 0`; `g` raises `y` to 1 and lowers `Z` by `1/n`.
/// Fails when every zero of `f` lies in `x_set`.
pub fn l2_corrupt(f: &L2Member, x_set: &BTreeSet<Input>) -> Result<L2Corruption> {
    let n = f.n;
    let a = &f.coefficients;
    let z: Vec<Input> = (0..a.len()).filter(|&x| a[x] > 0).take(n as usize).collect();
    if z.len() < n as usize {
        return Err(Error::SolverDefect("family member has fewer than n positive inputs".into()));
    }
    let y = (0..a.len())
        .find(|&x| a[x] == 0 && !x_set.contains(&x))
        .ok_or_else(|| invalid("every zero of f lies in the pinned set"))?;
    let mut b = a.clone();
    b[y] = n;
    for &x in &z {
        b[x] -= 1;
    }
    let squared_gap_on_x = x_set
        .iter()
        .filter(|&&x| x < a.len())
        .map(|&x| {
            let d = a[x].abs_diff(b[x]) as u64;
            d * d
        })
        .sum();
    let max_gap = a.iter().zip(&b).map(|(p, q)| p.abs_diff(*q)).max().unwrap_or(0);
    let g = L2Member::new(n, b)?;
    Ok(L2Corruption {
        g,
        z,
        y,
        squared_gap_on_x,
        max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Coefficient of t^(n^2) in (1 + t + ... + t^n)^(2^n) by brute force.
    fn brute_count(n: u32) -> usize {
        let size = 1usize << n;
        let base = n as usize + 1;
        (0..base.pow(size as u32))
            .filter(|&code| {
                let mut c = code;
                let mut s = 0;
                for _ in 0..size {
                    s += c % base;
                    c /= base;
                }
                s == (n * n) as usize
            })
            .count()
    }

    #[test]
    fn n2_family_size() {
        assert_eq!(brute_count(2), 19);
        assert_eq!(l2_family(2).unwrap().len(), 19);
        assert_eq!(family_size(2), Some(19));
        assert_eq!(l2_counterexample(2).unwrap().len(), 19);
    }

    #[test]
    fn n3_family_size_matches_dp() {
        assert_eq!(l2_family(3).unwrap().len() as u128, family_size(3).unwrap());
    }

    #[test]
    fn n4_family_is_too_large_to_enumerate() {
        assert!(matches!(l2_family(4), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn paper_style_example() {
        let f = L2Member::new(2, vec![2, 2, 0, 0]).unwrap();
        let x: BTreeSet<Input> = [0, 1].into_iter().collect();
        let c = l2_corrupt(&f, &x).unwrap();
        assert_eq!(c.y, 2);
        assert_eq!(c.g.coefficients(), &[1, 1, 2, 0]);
        assert_eq!(c.delta_inf(), 1.0);
        assert!(c.delta2_on_x() <= 1.0 / 2f64.sqrt() + 1e-15);
        assert_eq!(c.squared_gap_on_x, 2);
    }

    #[test]
    fn corruption_rejected_without_free_zero() {
        let f = L2Member::new(2, vec![2, 2, 0, 0]).unwrap();
        let x: BTreeSet<Input> = [2, 3].into_iter().collect();
        assert!(l2_corrupt(&f, &x).is_err());
    }

    #[test]
    fn samples_are_members() {
        for m in l2_sample(5, 20, 9).unwrap() {
            assert!(L2Member::new(5, m.coefficients().to_vec()).is_ok());
        }
    }

    #[test]
    fn invalid_members_rejected() {
        assert!(L2Member::new(2, vec![3, 1, 0, 0]).is_err());
        assert!(L2Member::new(2, vec![1, 1, 0, 0]).is_err());
        assert!(L2Member::new(1, vec![1, 0]).is_err());
    }
}
