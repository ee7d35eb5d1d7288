use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::concept::{ConceptClass, Input, InputDomain, PConceptClass};
use crate::error::{invalid, Error, Result};

/// Largest set size the shattering search will certify.
pub const DIMENSION_CAP: usize = 12;

/// Work limit on the number of (set, member) pattern evaluations.
const WORK_LIMIT: u64 = 2_000_000_000;

/// Slack applied to margin comparisons so witnesses built from midpoints of
/// member values are not lost to rounding.
const MARGIN_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Dimension {
    Exact(usize),
    /// A set of the cap size is shattered; larger sets were not searched.
    AtLeast(usize),
}

impl Dimension {
    /// The exact value, or the cap for a capped result.
    pub fn value(self) -> usize {
        match self {
            Dimension::Exact(d) | Dimension::AtLeast(d) => d,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Dimension::Exact(_))
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Exact(d) => write!(f, "{d}"),
            Dimension::AtLeast(d) => write!(f, ">={d}"),
        }
    }
}

/// Per-input member values and candidate witness levels.
struct Labelings {
    /// `values[x][i]`: member `i` at input `x`.
    values: Vec<Vec<f64>>,
    /// `levels[x]`: sorted candidate witness levels at `x`.
    levels: Vec<Vec<f64>>,
    gamma: f64,
    members: usize,
}

struct Search<'a> {
    labels: &'a Labelings,
    work: u64,
}

impl Search<'_> {
    fn charge(&mut self, amount: u64) -> Result<()> {
        self.work += amount;
        if self.work > WORK_LIMIT {
            return Err(Error::BudgetExceeded {
                what: "shattering search",
                count: self.work,
                limit: WORK_LIMIT,
            });
        }
        Ok(())
    }

    /// Witness levels at `x` that put a member of every pattern class on
    /// each side: `[max_p min_p + γ, min_p max_p - γ]`, or `None` if empty.
    fn window(&self, x: Input, classes: usize, decisive: &[(usize, u32)]) -> Option<(f64, f64)> {
        let column = &self.labels.values[x];
        let mut lo = vec![f64::INFINITY; classes];
        let mut hi = vec![f64::NEG_INFINITY; classes];
        for &(i, pat) in decisive {
            let v = column[i];
            let p = pat as usize;
            lo[p] = lo[p].min(v);
            hi[p] = hi[p].max(v);
        }
        let g = self.labels.gamma;
        let low = lo.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) + g;
        let high = hi.iter().fold(f64::INFINITY, |a, &b| a.min(b)) - g;
        (low <= high + 2.0 * MARGIN_SLACK).then_some((low - MARGIN_SLACK, high + MARGIN_SLACK))
    }

    /// Whether some choice of one witness level per input in `set` realizes
    /// every labelling of `set`.
    fn shattered(&mut self, set: &[Input]) -> Result<bool> {
        let decisive: Vec<(usize, u32)> = (0..self.labels.members).map(|i| (i, 0)).collect();
        self.extend(set, 0, &decisive)
    }

    fn extend(&mut self, set: &[Input], depth: usize, decisive: &[(usize, u32)]) -> Result<bool> {
        if depth == set.len() {
            return Ok(true);
        }
        let need = 1usize << (depth + 1);
        if decisive.len() < need {
            return Ok(false);
        }
        let x = set[depth];
        let Some((low, high)) = self.window(x, need / 2, decisive) else {
            return Ok(false);
        };
        let g = self.labels.gamma;
        let column = &self.labels.values[x];
        let mut tried: HashSet<Vec<(usize, u32)>> = HashSet::new();
        for &r in &self.labels.levels[x] {
            if r < low || r > high {
                continue;
            }
            self.charge(decisive.len() as u64 * (set.len() - depth) as u64)?;
            let next: Vec<(usize, u32)> = decisive
                .iter()
                .filter_map(|&(i, pat)| {
                    let v = column[i];
                    if v <= r - g + MARGIN_SLACK {
                        Some((i, pat))
                    } else if v >= r + g - MARGIN_SLACK {
                        Some((i, pat | (1 << depth)))
                    } else {
                        None
                    }
                })
                .collect();
            if !tried.insert(next.clone()) {
                continue;
            }
            let feasible = set[depth + 1..]
                .iter()
                .all(|&y| self.window(y, need, &next).is_some());
            if feasible && self.extend(set, depth + 1, &next)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Largest shattered set, built level by level: shattering is hereditary, so
/// every shattered set extends a shattered set one smaller by an input
/// above its maximum.
fn dimension(domain: InputDomain, labels: &Labelings) -> Result<Dimension> {
    let mut search = Search { labels, work: 0 };
    let mut level: Vec<Vec<Input>> = vec![Vec::new()];
    let mut dim = 0;
    while dim < DIMENSION_CAP {
        if labels.members < 1 << (dim + 1) {
            break;
        }
        let mut next = Vec::new();
        for set in &level {
            let start = set.last().map_or(0, |&m| m + 1);
            for x in start..domain.size() {
                let mut candidate = set.clone();
                candidate.push(x);
                if search.shattered(&candidate)? {
                    next.push(candidate);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
        dim += 1;
    }
    if dim == DIMENSION_CAP {
        Ok(Dimension::AtLeast(DIMENSION_CAP))
    } else {
        Ok(Dimension::Exact(dim))
    }
}

/// VC dimension by exhaustive search, capped at [`DIMENSION_CAP`].
pub fn vc_dim(s: &ConceptClass) -> Result<Dimension> {
    let values = s
        .domain()
        .inputs()
        .map(|x| s.members().iter().map(|f| if f.get(x) { 1.0 } else { 0.0 }).collect())
        .collect();
    dimension(
        s.domain(),
        &Labelings {
            values,
            levels: vec![vec![0.5]; s.domain().size()],
            gamma: 0.5,
            members: s.len(),
        },
    )
}

/// Fat-shattering dimension at margin `gamma` by exhaustive search, capped
/// at [`DIMENSION_CAP`].
///
/// At each input only witness levels `r = (a + b)/2` are tried, where `a` is
/// a member value and `b` the smallest member value at least `a + 2γ`;
/// any other witness level is dominated by one of these.
pub fn fat_shattering_dim(s: &PConceptClass, gamma: f64) -> Result<Dimension> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("margin must be positive, got {gamma}")));
    }
    let values: Vec<Vec<f64>> = s
        .domain()
        .inputs()
        .map(|x| s.members().iter().map(|f| f.get(x)).collect())
        .collect();
    let levels = values
        .iter()
        .map(|column| {
            let mut sorted = column.clone();
            sorted.sort_by(f64::total_cmp);
            sorted.dedup();
            let mut levels = Vec::new();
            for &a in &sorted {
                let Some(&b) = sorted.iter().find(|&&b| b >= a + 2.0 * gamma - MARGIN_SLACK) else {
                    break;
                };
                levels.push(0.5 * (a + b));
            }
            levels
        })
        .collect();
    dimension(
        s.domain(),
        &Labelings {
            values,
            levels,
            gamma,
            members: s.len(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::{BooleanFunction, RealFunction};
    use crate::generate::{random_boolean, random_pconcept};

    fn dom(n: u32) -> InputDomain {
        InputDomain::new(n).unwrap()
    }

    /// Direct VC oracle: try every subset, count realized patterns.
    fn vc_oracle(s: &ConceptClass) -> usize {
        let size = s.domain().size();
        assert!(size <= 16);
        let mut best = 0;
        for mask in 0u32..(1 << size) {
            let set: Vec<usize> = (0..size).filter(|&x| mask & (1 << x) != 0).collect();
            let mut pats: Vec<u32> = s
                .members()
                .iter()
                .map(|f| {
                    set.iter()
                        .enumerate()
                        .fold(0, |p, (j, &x)| p | ((f.get(x) as u32) << j))
                })
                .collect();
            pats.sort_unstable();
            pats.dedup();
            if pats.len() == 1 << set.len() {
                best = best.max(set.len());
            }
        }
        best
    }

    /// Direct fat oracle: every subset, every witness vector drawn from all
    /// midpoints of member-value pairs, every labelling.
    fn fat_oracle(s: &PConceptClass, gamma: f64) -> usize {
        let size = s.domain().size();
        let mids: Vec<Vec<f64>> = (0..size)
            .map(|x| {
                let mut m = Vec::new();
                for f in s.members() {
                    for g in s.members() {
                        m.push(0.5 * (f.get(x) + g.get(x)));
                    }
                }
                m.sort_by(f64::total_cmp);
                m.dedup();
                m
            })
            .collect();
        let mut best = 0;
        for mask in 1u32..(1 << size) {
            let set: Vec<usize> = (0..size).filter(|&x| mask & (1 << x) != 0).collect();
            if set.len() <= best {
                continue;
            }
            let mut idx = vec![0usize; set.len()];
            'witness: loop {
                let ok = (0u32..1 << set.len()).all(|lab| {
                    s.members().iter().any(|f| {
                        set.iter().enumerate().all(|(j, &x)| {
                            let r = mids[x][idx[j]];
                            if lab >> j & 1 == 1 {
                                f.get(x) >= r + gamma - 1e-12
                            } else {
                                f.get(x) <= r - gamma + 1e-12
                            }
                        })
                    })
                });
                if ok {
                    best = set.len();
                    break;
                }
                for j in 0..set.len() {
                    idx[j] += 1;
                    if idx[j] < mids[set[j]].len() {
                        continue 'witness;
                    }
                    idx[j] = 0;
                }
                break;
            }
        }
        best
    }

    #[test]
    fn fat_matches_oracle() {
        let mut nontrivial = 0;
        for seed in 0..12 {
            let s = random_pconcept(dom(2), 6 + seed as usize % 4, Some(5), seed).unwrap();
            for gamma in [0.05, 0.12, 0.2] {
                let got = fat_shattering_dim(&s, gamma).unwrap().value();
                assert_eq!(got, fat_oracle(&s, gamma), "seed {seed} gamma {gamma}");
                nontrivial += (got >= 2) as usize;
            }
        }
        assert!(nontrivial > 0);
    }

    #[test]
    fn singleton_classes_have_dimension_zero() {
        let s = ConceptClass::new([BooleanFunction::ones(dom(3))]).unwrap();
        assert_eq!(vc_dim(&s).unwrap(), Dimension::Exact(0));
        let p = PConceptClass::from_boolean(&s);
        assert_eq!(fat_shattering_dim(&p, 0.1).unwrap(), Dimension::Exact(0));
    }

    #[test]
    fn full_class_on_two_bits() {
        let d = dom(2);
        let s = ConceptClass::new((0..16).map(|t| BooleanFunction::from_fn(d, |x| t >> x & 1 == 1)))
            .unwrap();
        assert_eq!(vc_dim(&s).unwrap(), Dimension::Exact(4));
    }

    #[test]
    fn two_constants() {
        let d = dom(3);
        let s = PConceptClass::new([
            RealFunction::constant(d, 0.0).unwrap(),
            RealFunction::constant(d, 1.0).unwrap(),
        ])
        .unwrap();
        for gamma in [0.1, 0.25, 0.5] {
            assert_eq!(fat_shattering_dim(&s, gamma).unwrap(), Dimension::Exact(1));
        }
        assert_eq!(fat_shattering_dim(&s, 0.6).unwrap(), Dimension::Exact(0));
    }

    #[test]
    fn vc_matches_oracle_and_fat() {
        for seed in 0..30 {
            let size = 2 + (seed as usize * 5) % 30;
            let s = random_boolean(dom(3), size, seed).unwrap();
            let vc = vc_dim(&s).unwrap();
            assert_eq!(vc.value(), vc_oracle(&s), "seed {seed}");
            let p = PConceptClass::from_boolean(&s);
            assert_eq!(fat_shattering_dim(&p, 0.25).unwrap(), vc);
            assert_eq!(fat_shattering_dim(&p, 0.5).unwrap(), vc);
        }
    }

    #[test]
    fn fat_is_antitone() {
        for seed in 0..10 {
            let s = random_pconcept(dom(3), 16, None, seed).unwrap();
            let dims: Vec<usize> = [0.02, 0.05, 0.1, 0.2, 0.3]
                .iter()
                .map(|&g| fat_shattering_dim(&s, g).unwrap().value())
                .collect();
            assert!(dims.windows(2).all(|w| w[0] >= w[1]), "{dims:?}");
        }
    }

    #[test]
    fn cap_is_reported() {
        // Every labelling of the first twelve inputs.
        let d = dom(4);
        let s = ConceptClass::new(
            (0u32..1 << 12).map(|t| BooleanFunction::from_fn(d, |x| x < 12 && t >> x & 1 == 1)),
        )
        .unwrap();
        assert_eq!(vc_dim(&s).unwrap(), Dimension::AtLeast(DIMENSION_CAP));
    }

    #[test]
    fn bad_margin_rejected() {
        let s = random_pconcept(dom(1), 2, None, 0).unwrap();
        assert!(fat_shattering_dim(&s, 0.0).is_err());
    }
}
