//! Least-squares predictor fitting under polynomial-reproduction constraints.
//!
//! A predictor with `M` taps starting at offset `o` sees even samples at
//! positions `o + i - 1/2` relative to the odd sample it predicts (even grid
//! units). Reproducing polynomials of degree `< N` means
//! `Σ_i p_i t_i^m = δ_{m0}` for `m < N`.

use nalgebra::{DMatrix, DVector};

use super::{LiftingError, Result};

/// Offset that centres `taps` taps around the predicted sample.
pub fn centered_offset(taps: usize) -> isize {
    -(taps.div_ceil(2) as isize - 1)
}

pub fn node_positions(taps: usize, offset: isize) -> Vec<f64> {
    (0..taps).map(|i| (offset + i as isize) as f64 - 0.5).collect()
}

/// Lagrange weights evaluating the interpolant through `nodes` at 0.
pub fn interpolating_weights(nodes: &[f64]) -> Vec<f64> {
    (0..nodes.len())
        .map(|i| {
            nodes
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, tj)| tj / (tj - nodes[i]))
                .product()
        })
        .collect()
}

/// Rows of the predictor design matrix whose taps all fall inside the
/// even sequence, plus the matching odd targets. Row `r` holds
/// `x_even[n + offset + i]` for the `r`-th interior `n`.
pub fn interior_design(
    x_even: &[f64],
    x_odd: &[f64],
    taps: usize,
    offset: isize,
) -> (DMatrix<f64>, DVector<f64>) {
    let ne = x_even.len() as isize;
    let rows: Vec<usize> = (0..x_odd.len())
        .filter(|&n| {
            let s = n as isize + offset;
            s >= 0 && s + taps as isize <= ne
        })
        .collect();
    let design = DMatrix::from_fn(rows.len(), taps, |r, i| {
        x_even[(rows[r] as isize + offset) as usize + i]
    });
    let target = DVector::from_iterator(rows.len(), rows.iter().map(|&n| x_odd[n]));
    (design, target)
}

/// Minimizes `‖x_odd - X p‖²` subject to reproducing polynomials of degree
/// `< n_constraints`.
///
/// Nullspace method: with `Cᵀ = Q R`, the first `N` columns of `Q` give a
/// particular solution and the rest span the feasible directions, so the
/// remaining problem is unconstrained. It is solved as a minimum-norm least
/// squares problem, which stays well defined when the data are themselves
/// polynomial and leave no residual to fit.
pub fn fit_predictor(
    x_odd: &DVector<f64>,
    design: &DMatrix<f64>,
    n_constraints: usize,
    offset: isize,
) -> Result<Vec<f64>> {
    let taps = design.ncols();
    if taps < n_constraints || taps == 0 {
        return Err(LiftingError::InfeasibleConstraints {
            taps,
            constraints: n_constraints,
        });
    }
    if design.nrows() < taps || x_odd.len() != design.nrows() {
        return Err(LiftingError::RankDeficient {
            rows: design.nrows(),
            taps,
        });
    }
    let nodes = node_positions(taps, offset);
    let n = n_constraints;

    // Q of [Cᵀ | I] is a full orthonormal basis whose first n columns span Cᵀ.
    let mut aug = DMatrix::zeros(taps, n + taps);
    for (i, t) in nodes.iter().enumerate() {
        for m in 0..n {
            aug[(i, m)] = t.powi(m as i32);
        }
        aug[(i, n + i)] = 1.0;
    }
    let qr = aug.qr();
    let q = qr.q();
    let r = qr.r();

    // C p = R1ᵀ Q1ᵀ p = e0  =>  p0 = Q1 y with R1ᵀ y = e0
    let mut y = DVector::zeros(n);
    if n > 0 {
        let r1t = r.view((0, 0), (n, n)).transpose();
        let mut e0 = DVector::zeros(n);
        e0[0] = 1.0;
        y = r1t
            .solve_lower_triangular(&e0)
            .filter(|v| v.iter().all(|x| x.is_finite()))
            .ok_or(LiftingError::InfeasibleConstraints {
                taps,
                constraints: n,
            })?;
    }
    let q1 = q.columns(0, n);
    let z = q.columns(n, taps - n);
    let p0 = q1 * &y;
    if n == taps {
        return Ok(p0.iter().copied().collect());
    }

    let reduced = design * z;
    let resid = x_odd - design * &p0;
    let tol = 1e-10 * design.norm().max(f64::MIN_POSITIVE);
    let qv = reduced
        .svd(true, true)
        .solve(&resid, tol)
        .map_err(|_| LiftingError::RankDeficient {
            rows: design.nrows(),
            taps,
        })?;
    let p = p0 + z * qv;
    Ok(p.iter().copied().collect())
}
