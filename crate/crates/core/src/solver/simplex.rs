//! Dense tableau simplex for the packing LP
//!
//! ```text
//! maximize  1ᵀy   subject to   B y ≤ 1,  y ≥ 0
//! ```
//!
//! with every entry of `B` strictly positive. The slack basis is feasible at
//! the start and the feasible region is bounded, so no phase one is needed.
//! The optimal duals `x` solve `minimize 1ᵀx subject to Bᵀx ≥ 1, x ≥ 0`.

use crate::error::{Error, Result};

use super::GameMatrix;

const PIVOT_EPS: f64 = 1e-12;
/// Degenerate pivots in a row before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

pub(crate) struct PackingSolution {
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

pub(crate) fn solve_packing(b: &GameMatrix) -> Result<PackingSolution> {
    let m = b.n_rows();
    let n = b.n_cols();
    let width = n + m + 1;
    let rhs = n + m;
    let mut t = vec![0.0; (m + 1) * width];
    for i in 0..m {
        for j in 0..n {
            t[i * width + j] = b.get(i, j);
        }
        t[i * width + n + i] = 1.0;
        t[i * width + rhs] = 1.0;
    }
    for j in 0..n {
        t[m * width + j] = -1.0;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_pivots = 50 * (m + n) + 1000;
    let mut pivots = 0;
    let mut streak = 0;
    loop {
        let obj = &t[m * width..m * width + rhs];
        let entering = if streak < DEGENERATE_STREAK {
            // Dantzig: most negative reduced cost, lowest index on ties.
            let mut best: Option<(usize, f64)> = None;
            for (j, &r) in obj.iter().enumerate() {
                if r < -PIVOT_EPS && best.is_none_or(|(_, b)| r < b) {
                    best = Some((j, r));
                }
            }
            best.map(|(j, _)| j)
        } else {
            obj.iter().position(|&r| r < -PIVOT_EPS)
        };
        let Some(e) = entering else { break };

        if pivots >= max_pivots {
            return Err(Error::NonConvergence {
                iterations: pivots,
                lower: f64::NAN,
                upper: f64::NAN,
                gap: f64::INFINITY,
            });
        }

        // Ratio test; ties go to the lowest basic variable index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[i * width + e];
            if a > PIVOT_EPS {
                let ratio = t[i * width + rhs] / a;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => ratio < lr - PIVOT_EPS || (ratio <= lr + PIVOT_EPS && basis[i] < basis[li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // B > 0 bounds every column, so some row always qualifies.
        let (r, ratio) = leave.ok_or(Error::NonConvergence {
            iterations: pivots,
            lower: f64::NAN,
            upper: f64::NAN,
            gap: f64::INFINITY,
        })?;
        streak = if ratio <= PIVOT_EPS { streak + 1 } else { 0 };

        pivot(&mut t, width, m, r, e);
        basis[r] = e;
        pivots += 1;
    }

    let mut primal = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            primal[var] = t[i * width + rhs];
        }
    }
    let dual = (0..m).map(|i| t[m * width + n + i]).collect();
    Ok(PackingSolution { primal, dual, objective: t[m * width + rhs], pivots })
}

fn pivot(t: &mut [f64], width: usize, m: usize, r: usize, e: usize) {
    let p = t[r * width + e];
    for v in &mut t[r * width..(r + 1) * width] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = t[r * width..(r + 1) * width].to_vec();
    for i in 0..=m {
        if i == r {
            continue;
        }
        let factor = t[i * width + e];
        if factor == 0.0 {
            continue;
        }
        let row = &mut t[i * width..(i + 1) * width];
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            *v -= factor * pv;
        }
        row[e] = 0.0;
    }
}
