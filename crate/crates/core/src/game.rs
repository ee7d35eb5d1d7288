//! Exact-pivoting dense simplex for two-player zero-sum matrix games.
//!
//! The column player maximizes. After shifting payoffs to be at least one,
//! the row player's problem `max Σz  s.t.  Aᵀz <= 1, z >= 0` starts from a
//! feasible origin, so a single phase suffices; the column player's optimal
//! strategy is read from the dual prices in the final tableau. Pivoting uses
//! Dantzig's rule and falls back to Bland's rule after a run of degenerate
//! pivots, so results are deterministic.

use crate::error::{invalid, Error, Result};

const PIVOT_TOL: f64 = 1e-12;
const DEGENERATE_RUN: usize = 50;
/// Allowed gap between the two players' guaranteed values.
pub const EQUILIBRIUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Equilibrium {
    /// Value to the column player: `min_r Σ_c A[r][c] p_c`.
    pub value: f64,
    /// Column player's mixed strategy `p`.
    pub maximizer: Vec<f64>,
    /// Row player's mixed strategy `q`.
    pub minimizer: Vec<f64>,
}

fn normalize(v: &mut [f64]) {
    for w in v.iter_mut() {
        if *w < 0.0 {
            *w = 0.0;
        }
    }
    let total: f64 = v.iter().sum();
    for w in v.iter_mut() {
        *w /= total;
    }
}

/// Solve the game with payoff `payoff[r][c]` to the column player.
pub fn solve_matrix_game(payoff: &[Vec<f64>]) -> Result<Equilibrium> {
    let rows = payoff.len();
    let cols = payoff.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(invalid("matrix game needs at least one row and one column"));
    }
    if payoff.iter().any(|r| r.len() != cols) {
        return Err(invalid("ragged payoff matrix"));
    }
    if payoff.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid("payoff entries must be finite"));
    }
    let min = payoff.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;

    // Tableau: one constraint per column, variables z_0..z_rows then slacks.
    let width = rows + cols + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; cols];
    for c in 0..cols {
        for r in 0..rows {
            t[c][r] = payoff[r][c] + shift;
        }
        t[c][rows + c] = 1.0;
        t[c][rhs] = 1.0;
    }
    let mut obj = vec![0.0; width];
    for v in obj.iter_mut().take(rows) {
        *v = -1.0;
    }
    let mut basis: Vec<usize> = (rows..rows + cols).collect();

    let limit = 100 * (rows + cols) + 1000;
    let mut degenerate = 0;
    let mut pivots = 0;
    loop {
        let entering = if degenerate >= DEGENERATE_RUN {
            (0..rhs).find(|&j| obj[j] < -PIVOT_TOL)
        } else {
            (0..rhs)
                .filter(|&j| obj[j] < -PIVOT_TOL)
                .min_by(|&a, &b| obj[a].total_cmp(&obj[b]).then(a.cmp(&b)))
        };
        let Some(j) = entering else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..cols {
            if t[i][j] > PIVOT_TOL {
                let ratio = t[i][rhs] / t[i][j];
                let better = match leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < best - PIVOT_TOL
                            || (ratio <= best + PIVOT_TOL && basis[i] < basis[k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (i, ratio) = leave.ok_or_else(|| Error::SolverDefect("unbounded game LP".into()))?;
        degenerate = if ratio <= PIVOT_TOL { degenerate + 1 } else { 0 };

        let p = t[i][j];
        for v in t[i].iter_mut() {
            *v /= p;
        }
        let pivot_row = t[i].clone();
        for (k, row) in t.iter_mut().enumerate() {
            if k != i {
                let factor = row[j];
                if factor != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= factor * pv;
                    }
                }
            }
        }
        let factor = obj[j];
        for (v, pv) in obj.iter_mut().zip(&pivot_row) {
            *v -= factor * pv;
        }
        basis[i] = j;

        pivots += 1;
        if pivots > limit {
            return Err(Error::SolverDefect(format!("simplex exceeded {limit} pivots")));
        }
    }

    let mut z = vec![0.0; rows];
    for (i, &b) in basis.iter().enumerate() {
        if b < rows {
            z[b] = t[i][rhs];
        }
    }
    let mut y: Vec<f64> = (0..cols).map(|c| obj[rows + c]).collect();
    if z.iter().sum::<f64>() <= 0.0 || y.iter().sum::<f64>() <= 0.0 {
        return Err(Error::SolverDefect("degenerate game LP optimum".into()));
    }
    normalize(&mut z);
    normalize(&mut y);

    let guaranteed = (0..rows)
        .map(|r| (0..cols).map(|c| payoff[r][c] * y[c]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let conceded = (0..cols)
        .map(|c| (0..rows).map(|r| payoff[r][c] * z[r]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    if (conceded - guaranteed).abs() > EQUILIBRIUM_TOL {
        return Err(Error::SolverDefect(format!(
            "equilibrium gap {} between players",
            conceded - guaranteed
        )));
    }
    Ok(Equilibrium {
        value: guaranteed,
        maximizer: y,
        minimizer: z,
    })
}
