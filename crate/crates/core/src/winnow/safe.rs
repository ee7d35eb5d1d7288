use std::collections::BTreeSet;

use crate::concept::{sup_full, sup_on, Input, PConceptClass, RealFunction};
use crate::error::{invalid, Error, Result};

use super::cover::{is_valid_cover, CoverResult, RADIUS_SLACK};
use super::trace::{TraceAction, TraceStep};

#[derive(Clone, Debug, PartialEq)]
pub struct SafeWinnowResult {
    pub f: RealFunction,
    /// Index of `f` in the class.
    pub index: usize,
    /// Added inputs, in the order they were found. Disjoint from `Y`.
    pub z: Vec<Input>,
    /// Pinning tolerance `eps / (5 max(log2|cover|, 1))`.
    pub delta: f64,
    pub trace: Vec<TraceStep>,
}

pub(crate) fn check_cover(s: &PConceptClass, cover: &CoverResult, eps: f64) -> Result<()> {
    let consistent = cover.indices.len() == cover.cover.len()
        && cover
            .indices
            .iter()
            .zip(cover.cover.members())
            .all(|(&i, c)| i < s.len() && s.member(i) == c);
    if !consistent || !is_valid_cover(s, &cover.cover, eps) {
        return Err(invalid(format!("cover is not a valid {eps}-cover of the class")));
    }
    Ok(())
}

/// Pin `f_star` approximately on `y` and find a member `f` plus a few extra
/// inputs `Z` such that:
///
/// 1. every member within `delta` of `f` on `Y ∪ Z` is within `3 eps` of
///    `f` everywhere, and
/// 2. `f` is within `eps / 5` of `f_star` on `Y`.
///
/// Starting from `f_star`, each round looks for a surviving member `g` that
/// agrees with the current `f` to within `delta` on the pinned inputs yet
/// differs by more than `3 eps` at some input `z`. The survivors are split
/// at the midpoint of `f(z)` and `g(z)`, keeping the side with fewer cover
/// members, and `f` moves to `g` if it fell on the discarded side.
/// Both conclusions are re-checked over the whole class before returning.
pub fn safe_winnow(
    s: &PConceptClass,
    f_star: &RealFunction,
    y: &BTreeSet<Input>,
    eps: f64,
    cover: &CoverResult,
) -> Result<SafeWinnowResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    let start = s.require_member(f_star)?;
    for &x in y {
        s.domain().ensure_contains(x)?;
    }
    check_cover(s, cover, eps)?;

    let k = (cover.len() as f64).log2();
    let delta = eps / (5.0 * k.max(1.0));
    let mut in_cover = vec![false; s.len()];
    for &i in &cover.indices {
        in_cover[i] = true;
    }

    let mut alive = vec![true; s.len()];
    let mut current = start;
    let mut pinned: Vec<Input> = y.iter().copied().collect();
    let mut z = Vec::new();
    let mut trace = Vec::new();

    loop {
        let f = s.member(current);
        let violation = (0..s.len())
            .filter(|&g| alive[g] && sup_on(f, s.member(g), &pinned) <= delta)
            .find_map(|g| {
                let gf = s.member(g);
                s.domain()
                    .inputs()
                    .find(|&x| (f.get(x) - gf.get(x)).abs() > 3.0 * eps)
                    .map(|x| (g, x))
            });
        let Some((g, zt)) = violation else {
            break;
        };
        if z.len() >= s.domain().size() {
            return Err(Error::SolverDefect("safe winnowing did not terminate".into()));
        }
        z.push(zt);
        pinned.push(zt);

        let v = 0.5 * (f.get(zt) + s.member(g).get(zt));
        let (mut a_cover, mut b_cover) = (0, 0);
        for h in (0..s.len()).filter(|&h| alive[h] && in_cover[h]) {
            if s.member(h).get(zt) < v {
                a_cover += 1;
            } else {
                b_cover += 1;
            }
        }
        let keep_low = a_cover < b_cover;
        for (h, a) in alive.iter_mut().enumerate() {
            if *a && (s.member(h).get(zt) < v) != keep_low {
                *a = false;
            }
        }
        let survivors = if keep_low { a_cover } else { b_cover };
        let step = z.len();
        trace.push(TraceStep {
            step,
            action: TraceAction::Split,
            input: zt,
            cover_survivors: Some(survivors),
            progress: None,
        });
        if !alive[current] {
            current = g;
            trace.push(TraceStep {
                step,
                action: TraceAction::Replace,
                input: zt,
                cover_survivors: Some(survivors),
                progress: None,
            });
        }
    }

    let f = s.member(current);
    let fail = |detail: String| Error::PostconditionViolated {
        operation: "safe_winnow",
        detail,
    };
    if z.len() as f64 > k + 1e-9 {
        return Err(fail(format!("|Z| = {} exceeds log2|cover| = {k}", z.len())));
    }
    let drift = sup_on(f, f_star, y);
    if drift > eps / 5.0 + RADIUS_SLACK {
        return Err(fail(format!("drift {drift} on Y exceeds eps/5")));
    }
    for g in s.members() {
        if sup_on(f, g, &pinned) <= delta && sup_full(f, g) > 3.0 * eps + RADIUS_SLACK {
            return Err(fail("a pinned member is 3eps-far from f".into()));
        }
    }
    Ok(SafeWinnowResult {
        f: f.clone(),
        index: current,
        z,
        delta,
        trace,
    })
}
