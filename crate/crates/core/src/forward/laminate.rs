use nalgebra::Vector2;
use num_complex::Complex64;

use super::ExactMoments;
use crate::error::ForwardError;
use crate::measurement::{cross_rperp, PhaseConductivities};

/// Moments of a simple laminate with lamination normal `normal` and constant
/// complex field `e_field1` in phase 1.
///
/// The phase-2 field keeps the tangential part of `e_field1` and rescales the
/// normal part so that `sigma2 E2 . n = sigma1 E1 . n`.
pub fn laminate_moments(
    f1: f64,
    cond: &PhaseConductivities,
    e_field1: [Complex64; 2],
    normal: Vector2<f64>,
) -> Result<ExactMoments, ForwardError> {
    if !(f1 > 0.0 && f1 < 1.0) {
        return Err(ForwardError::InvalidLaminate(format!(
            "volume fraction {f1} not in (0, 1)"
        )));
    }
    let len = normal.norm();
    if !(len.is_finite() && len > 0.0) {
        return Err(ForwardError::InvalidLaminate(
            "normal must be nonzero".into(),
        ));
    }
    if e_field1
        .iter()
        .any(|c| !(c.re.is_finite() && c.im.is_finite()))
    {
        return Err(ForwardError::InvalidLaminate("field must be finite".into()));
    }
    let n = normal / len;
    let en = e_field1[0] * n.x + e_field1[1] * n.y;
    let ratio = cond.sigma1() / cond.sigma2();
    let shift = en * (ratio - 1.0);
    let e_field2 = [e_field1[0] + shift * n.x, e_field1[1] + shift * n.y];

    let mut a = [[[0.0; 2]; 2]; 2];
    let mut b12 = [0.0; 2];
    let mut avg = [[Vector2::zeros(); 2]; 2];
    for (ph, (e, frac)) in [(e_field1, f1), (e_field2, 1.0 - f1)]
        .into_iter()
        .enumerate()
    {
        let parts = [
            Vector2::new(e[0].re, e[1].re),
            Vector2::new(e[0].im, e[1].im),
        ];
        for m in 0..2 {
            avg[ph][m] = parts[m] * frac;
            for k in 0..2 {
                a[ph][m][k] = frac * parts[m].dot(&parts[k]);
            }
        }
        b12[ph] = frac * cross_rperp(&parts[0], &parts[1]);
    }
    Ok(ExactMoments::from_phase_moments(cond, f1, a, b12, avg))
}
