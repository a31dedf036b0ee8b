//! Direct positive-semidefiniteness checks used to cross-examine the
//! quadratic-based verdicts.

use nalgebra::{Matrix2, Matrix4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ellipse::{s_matrix, tau_root, FeasibleRectangle};
use crate::error::BoundsError;
use crate::measurement::{DerivedConstants, REL_TOL};

/// `M = [[S, T], [-T, S]]` with `T = [[0, t], [-t, 0]]`, `t^2 = tau`.
pub fn m_matrix(
    consts: &DerivedConstants,
    f: f64,
    x: f64,
    y: f64,
    phase: usize,
) -> Result<Matrix4<f64>, BoundsError> {
    let s = s_matrix(consts, f, x, y, phase);
    let t = tau_root(consts, f, phase)?;
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&s);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&s);
    let tb = Matrix2::new(0.0, t, -t, 0.0);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&tb);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-tb));
    Ok(m)
}

/// Ascending eigenvalues of `M`.
pub fn m_matrix_eigenvalues(
    consts: &DerivedConstants,
    f: f64,
    x: f64,
    y: f64,
    phase: usize,
) -> Result<[f64; 4], BoundsError> {
    let m = m_matrix(consts, f, x, y, phase)?;
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok([ev[0], ev[1], ev[2], ev[3]])
}

/// Whether `M_f^(a)(x, y)` is positive-semidefinite, by full eigensolve.
pub fn m_matrix_psd_oracle(
    consts: &DerivedConstants,
    f: f64,
    x: f64,
    y: f64,
    phase: usize,
) -> Result<bool, BoundsError> {
    let m = m_matrix(consts, f, x, y, phase)?;
    let ev = m_matrix_eigenvalues(consts, f, x, y, phase)?;
    Ok(ev[0] >= -REL_TOL * m.norm())
}

/// Smallest eigenvalue of `[[S, T], [-T, S]]` (or of `S` when `t = 0`),
/// via the equivalent Hermitian 2x2 matrix `S + i t J`.
fn lambda_min(s: &Matrix2<f64>, t: f64) -> f64 {
    let mean = 0.5 * (s[(0, 0)] + s[(1, 1)]);
    let half = 0.5 * (s[(0, 0)] - s[(1, 1)]);
    mean - (half * half + s[(0, 1)] * s[(0, 1)] + t * t).sqrt()
}

/// Outcome of the brute-force search over the feasible rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOracle {
    pub admissible: bool,
    /// Best smallest eigenvalue over the grid (both phases).
    pub margin: f64,
    /// Bound on how much the grid can underestimate the true margin.
    pub resolution: f64,
}

/// Searches an `n x n` grid of the rectangle for a point where both `S`
/// (or both `M`) matrices are positive-semidefinite.
pub fn grid_psd_oracle(
    consts: &DerivedConstants,
    f: f64,
    tilde: bool,
    n: usize,
) -> Result<GridOracle, BoundsError> {
    let rect = FeasibleRectangle::new(consts, f);
    let t = if tilde {
        [tau_root(consts, f, 0)?, tau_root(consts, f, 1)?]
    } else {
        [0.0, 0.0]
    };
    let (x_hi, y_hi) = (rect.x_hi.max(rect.x_lo), rect.y_hi.max(rect.y_lo));
    let hx = (x_hi - rect.x_lo) / (n - 1) as f64;
    let hy = (y_hi - rect.y_lo) / (n - 1) as f64;
    let margin = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = rect.x_lo + i as f64 * hx;
            (0..n)
                .map(|j| {
                    let y = rect.y_lo + j as f64 * hy;
                    let l1 = lambda_min(&s_matrix(consts, f, x, y, 0), t[0]);
                    let l2 = lambda_min(&s_matrix(consts, f, x, y, 1), t[1]);
                    l1.min(l2)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);

    // Lipschitz constants of S in x and y (Frobenius norms of dS/dx, dS/dy).
    let (g, psi) = (consts.gamma, consts.psi);
    let lx = [(2.0 + 2.0 * g * g).sqrt(), (2.0f64).sqrt() * psi[1].abs()];
    let ly = [(2.0f64).sqrt() * psi[0].abs(), (2.0 + 2.0 * g * g).sqrt()];
    let resolution = (0..2)
        .map(|a| 0.5 * (lx[a] * hx + ly[a] * hy))
        .fold(0.0, f64::max);
    let corner = s_matrix(consts, f, rect.x_lo, rect.y_lo, 0).norm()
        + s_matrix(consts, f, rect.x_lo, rect.y_lo, 1).norm();
    Ok(GridOracle {
        admissible: margin >= -REL_TOL * corner,
        margin,
        resolution,
    })
}
