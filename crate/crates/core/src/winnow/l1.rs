use crate::concept::{sum_abs_on, sup_full, Input, PConceptClass, RealFunction};
use crate::error::{invalid, Error, Result};

use super::cover::{CoverResult, RADIUS_SLACK};
use super::safe::check_cover;
use super::trace::{TraceAction, TraceStep};

#[derive(Clone, Debug, PartialEq)]
pub struct L1WinnowResult {
    pub f: RealFunction,
    /// Index of `f` in the class.
    pub index: usize,
    /// Pinned inputs, in the order they were added.
    pub x: Vec<Input>,
    /// `M` before the first step and after every step.
    pub progress_log: Vec<f64>,
    pub trace: Vec<TraceStep>,
}

impl L1WinnowResult {
    /// `M_{t+1} / M_t` for every step.
    pub fn ratios(&self) -> Vec<f64> {
        self.progress_log.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

fn shrink_bound(eps: f64) -> f64 {
    0.5 * (1.0 + (-eps).exp()) * (0.4 * eps).exp()
}

/// Largest `eps` for which `(1 + e^{-eps})/2 · e^{0.4 eps} <= 1 - eps/20`,
/// i.e. for which every step of [`l1_winnow`] is guaranteed to shrink the
/// progress measure by the factor `1 - eps/20` (about 0.3985).
pub fn l1_max_epsilon() -> f64 {
    let (mut lo, mut hi) = (1e-6, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if shrink_bound(mid) <= 1.0 - mid / 20.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn progress(s: &PConceptClass, cover: &[usize], f: &RealFunction, xs: &[Input]) -> f64 {
    cover
        .iter()
        .map(|&h| (-sum_abs_on(f, s.member(h), xs)).exp())
        .sum()
}

/// Find a member `f` and inputs `X` such that every member within `0.4 eps`
/// of `f` in L1 distance on `X` is within `2 eps` of `f` everywhere.
///
/// Starts from the first member with `X` empty. While some `g` is L1-close
/// on `X` but `2 eps`-far at an input `y`, `y` is added to `X` and `f`
/// becomes whichever of `f`, `g` has the smaller progress measure
/// `M = Σ_{h in cover} exp(-Δ1(f,h)[X])`. Each step must shrink `M` by a
/// factor below `1 - eps/20`.
pub fn l1_winnow(s: &PConceptClass, eps: f64, cover: &CoverResult) -> Result<L1WinnowResult> {
    let max_eps = l1_max_epsilon();
    if !(eps > 0.0 && eps <= max_eps) {
        return Err(invalid(format!("eps must lie in (0, {max_eps:.4}], got {eps}")));
    }
    check_cover(s, cover, eps)?;
    let fail = |detail: String| Error::PostconditionViolated {
        operation: "l1_winnow",
        detail,
    };

    let mut current = 0;
    let mut xs: Vec<Input> = Vec::new();
    let mut m = progress(s, &cover.indices, s.member(current), &xs);
    let mut progress_log = vec![m];
    let mut trace = Vec::new();
    loop {
        let f = s.member(current);
        let violation = (0..s.len())
            .filter(|&g| sum_abs_on(f, s.member(g), &xs) <= 0.4 * eps)
            .find_map(|g| {
                let gf = s.member(g);
                s.domain()
                    .inputs()
                    .find(|&y| (f.get(y) - gf.get(y)).abs() > 2.0 * eps)
                    .map(|y| (g, y))
            });
        let Some((g, y)) = violation else {
            break;
        };
        if xs.len() >= s.domain().size() {
            return Err(Error::SolverDefect("L1 winnowing did not terminate".into()));
        }
        xs.push(y);
        let m_f = progress(s, &cover.indices, f, &xs);
        let m_g = progress(s, &cover.indices, s.member(g), &xs);
        let action = if m_g < m_f {
            current = g;
            TraceAction::Replace
        } else {
            TraceAction::Add
        };
        let next = m_f.min(m_g);
        let ratio = next / m;
        if ratio >= 1.0 - eps / 20.0 {
            return Err(fail(format!("step {} shrank M only by {ratio}", xs.len())));
        }
        m = next;
        progress_log.push(m);
        trace.push(TraceStep {
            step: xs.len(),
            action,
            input: y,
            cover_survivors: None,
            progress: Some(m),
        });
    }

    let f = s.member(current);
    for g in s.members() {
        if sum_abs_on(f, g, &xs) <= 0.4 * eps && sup_full(f, g) > 2.0 * eps + RADIUS_SLACK {
            return Err(fail("an L1-close member is 2eps-far from f".into()));
        }
    }
    Ok(L1WinnowResult {
        f: f.clone(),
        index: current,
        x: xs,
        progress_log,
        trace,
    })
}
