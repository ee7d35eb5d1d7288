use crate::concept::{sup_full, PConceptClass};
use crate::error::{invalid, Result};

/// Slack for sup-distance comparisons against a cover radius, absorbing
/// rounding in differences such as `0.3 - 0.2`.
pub(crate) const RADIUS_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CoverResult {
    /// Indices of the cover members in the class they were built from.
    pub indices: Vec<usize>,
    pub cover: PConceptClass,
    pub epsilon: f64,
}

impl CoverResult {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Greedy cover: repeatedly take the member that covers the most uncovered
/// members, lowest index on ties.
pub fn epsilon_cover(s: &PConceptClass, eps: f64) -> Result<CoverResult> {
    if eps.is_nan() || eps < 0.0 {
        return Err(invalid(format!("cover radius must be non-negative, got {eps}")));
    }
    let n = s.len();
    let near: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| sup_full(s.member(i), s.member(j)) <= eps + RADIUS_SLACK)
                .collect()
        })
        .collect();
    let mut covered = vec![false; n];
    let mut remaining = n;
    let mut indices = Vec::new();
    while remaining > 0 {
        let (best, _) = (0..n)
            .map(|i| (i, near[i].iter().filter(|&&j| !covered[j]).count()))
            .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        for &j in &near[best] {
            if !covered[j] {
                covered[j] = true;
                remaining -= 1;
            }
        }
        indices.push(best);
    }
    let cover = s.subclass(&indices)?;
    Ok(CoverResult {
        indices,
        cover,
        epsilon: eps,
    })
}

/// Whether every member of `s` lies within `eps` of some member of `cover`,
/// and every cover member belongs to `s`.
pub fn is_valid_cover(s: &PConceptClass, cover: &PConceptClass, eps: f64) -> bool {
    s.domain() == cover.domain()
        && cover.members().iter().all(|c| s.index_of(c).is_some())
        && s.members().iter().all(|f| {
            cover
                .members()
                .iter()
                .any(|c| sup_full(f, c) <= eps + RADIUS_SLACK)
        })
}
