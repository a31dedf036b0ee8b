use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{FieldSolution, FourierBC, LayeredDiskGeometry, ModeCoefficients};
use crate::error::ForwardError;
use crate::measurement::PhaseConductivities;

/// Solves the Dirichlet transmission problem mode by mode.
///
/// Unknowns per mode are `a_0` and `(a_l, b_l)` for the outer layers, each
/// expressed in a basis normalised by the layer's outer radius so that the
/// linear system stays well scaled for large `|n|`.
pub fn solve_layered_disk(
    geom: &LayeredDiskGeometry,
    cond: &PhaseConductivities,
    bc: &FourierBC,
) -> Result<FieldSolution, ForwardError> {
    bc.validate()?;
    let modes = bc
        .modes
        .iter()
        .map(|(&n, &c)| solve_mode(geom, cond, n, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FieldSolution {
        geom: geom.clone(),
        cond: *cond,
        modes,
    })
}

/// Basis values `(phi, r dphi/dr)` at radius `r` for the two radial
/// functions of a layer with reference radius `rho`.
fn basis(n: i32, r: f64, rho: f64) -> [(f64, f64); 2] {
    if n == 0 {
        [(1.0, 0.0), ((r / rho).ln(), 1.0)]
    } else {
        let k = n.unsigned_abs() as i32;
        let up = (r / rho).powi(k);
        let down = (r / rho).powi(-k);
        [(up, k as f64 * up), (down, -(k as f64) * down)]
    }
}

fn solve_mode(
    geom: &LayeredDiskGeometry,
    cond: &PhaseConductivities,
    n: i32,
    c: Complex64,
) -> Result<ModeCoefficients, ForwardError> {
    let layers = geom.layers();
    let radii = geom.radii();
    let dim = 2 * layers - 1;
    let zero = Complex64::new(0.0, 0.0);
    let sigma: Vec<Complex64> = (0..layers).map(|l| cond.of(geom.phase_index(l))).collect();
    // Column of the first unknown belonging to layer l.
    let col = |l: usize| if l == 0 { 0 } else { 2 * l - 1 };

    let mut m = DMatrix::from_element(dim, dim, zero);
    let mut rhs = DVector::from_element(dim, zero);
    for i in 0..layers - 1 {
        let r = radii[i];
        let (row_v, row_j) = (2 * i, 2 * i + 1);
        for (l, sign) in [(i, 1.0), (i + 1, -1.0)] {
            let fns = basis(n, r, radii[l]);
            let count = if l == 0 { 1 } else { 2 };
            for (k, (phi, rdphi)) in fns.iter().take(count).enumerate() {
                m[(row_v, col(l) + k)] += Complex64::from(sign * phi);
                m[(row_j, col(l) + k)] += sigma[l] * (sign * rdphi);
            }
        }
    }
    let last = layers - 1;
    let fns = basis(n, radii[last], radii[last]);
    let count = if last == 0 { 1 } else { 2 };
    for (k, (phi, _)) in fns.iter().take(count).enumerate() {
        m[(dim - 1, col(last) + k)] = Complex64::from(*phi);
    }
    rhs[dim - 1] = c;

    let sol = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(ForwardError::SingularTransmission { mode: n })?;
    let resid = (&m * &sol - &rhs).norm();
    if !resid.is_finite() || resid > 1e-10 * (rhs.norm() + m.norm() * sol.norm()) {
        return Err(ForwardError::SingularTransmission { mode: n });
    }

    // Undo the per-layer normalisation.
    let mut a = vec![zero; layers];
    let mut b = vec![zero; layers];
    for l in 0..layers {
        let rho = radii[l];
        let ah = sol[col(l)];
        let bh = if l == 0 { zero } else { sol[col(l) + 1] };
        if n == 0 {
            a[l] = ah - bh * rho.ln();
            b[l] = bh;
        } else {
            let k = n.unsigned_abs() as i32;
            a[l] = ah * rho.powi(-k);
            b[l] = bh * rho.powi(k);
        }
    }
    Ok(ModeCoefficients { n, a, b })
}

/// Core `r < r1` of phase 1 carrying `V = z + k conj(z)^2`, inside a shell of
/// phase 2 reaching out to `r2`.
///
/// The shell potential is `A z + B / conj(z) + C conj(z)^2 + D / z^2`; the
/// coefficients follow from continuity of `V` and `sigma dV/dr` at `r1`.
pub fn coreshell_solution(
    r1: f64,
    r2: f64,
    cond: &PhaseConductivities,
    k: f64,
) -> Result<FieldSolution, ForwardError> {
    if !(r1.is_finite() && r2.is_finite() && 0.0 < r1 && r1 < r2) {
        return Err(ForwardError::InvalidRadii(format!(
            "core-shell needs 0 < R1 < R2, got R1 = {r1}, R2 = {r2}"
        )));
    }
    if !k.is_finite() {
        return Err(ForwardError::InvalidGeometry("k must be finite".into()));
    }
    let geom = LayeredDiskGeometry::new(vec![r1, r2], vec![1, 2])?;
    let (s1, s2) = (cond.sigma1(), cond.sigma2());
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    // z = r e^{i theta}, 1/conj(z) = r^-1 e^{i theta}.
    let a_shell = (s1 + s2) / (2.0 * s2);
    let b_shell = r1 * r1 * (s2 - s1) / (2.0 * s2);
    // conj(z)^2 = r^2 e^{-2 i theta}, 1/z^2 = r^-2 e^{-2 i theta}.
    let c_shell = k * (s1 + s2) / (2.0 * s2);
    let d_shell = k * r1.powi(4) * (s2 - s1) / (2.0 * s2);
    let modes = vec![
        ModeCoefficients {
            n: -2,
            a: vec![Complex64::from(k), c_shell],
            b: vec![zero, d_shell],
        },
        ModeCoefficients {
            n: 1,
            a: vec![one, a_shell],
            b: vec![zero, b_shell],
        },
    ];
    Ok(FieldSolution {
        geom,
        cond: *cond,
        modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cond() -> PhaseConductivities {
        PhaseConductivities::new(Complex64::new(3.0, 8.0), Complex64::new(8.0, 6.0)).unwrap()
    }

    #[test]
    fn two_layer_mode_one_core_factor() {
        let c = cond();
        let geom = LayeredDiskGeometry::new(vec![1.0, 2.0], vec![1, 2]).unwrap();
        let bc = FourierBC::new([(1, Complex64::new(2.0, 0.0))]);
        let sol = solve_layered_disk(&geom, &c, &bc).unwrap();
        // Hand solution: shell A r + B/r with A + B/R1^2 = a0,
        // sigma2 (A - B/R1^2) = sigma1 a0, A R2 + B/R2 = 2.
        let (s1, s2) = (c.sigma1(), c.sigma2());
        let (r1, r2) = (1.0, 2.0);
        let aa = (s1 + s2) / (2.0 * s2);
        let bb = r1 * r1 * (s2 - s1) / (2.0 * s2);
        let a0 = 2.0 / (aa * r2 + bb / r2);
        assert!((sol.modes[0].a[0] - a0).norm() < 1e-13);
        // Relative to the homogeneous phase-2 core (a0 = 1) this is
        // 2 sigma2 / (sigma1 + sigma2) in the thin-core limit.
        let geom = LayeredDiskGeometry::new(vec![1e-4, 1.0], vec![1, 2]).unwrap();
        let sol = solve_layered_disk(&geom, &c, &FourierBC::new([(1, Complex64::new(1.0, 0.0))]))
            .unwrap();
        let expect = 2.0 * s2 / (s1 + s2);
        assert!((sol.modes[0].a[0] - expect).norm() < 1e-7);
    }

    #[test]
    fn homogeneous_disk_is_harmonic_extension() {
        let c = cond();
        let geom = LayeredDiskGeometry::new(vec![3.0], vec![2]).unwrap();
        let bc = FourierBC::new([
            (0, Complex64::new(1.0, 1.0)),
            (2, Complex64::new(0.5, -1.0)),
            (-3, Complex64::new(0.0, 2.0)),
        ]);
        let sol = solve_layered_disk(&geom, &c, &bc).unwrap();
        for m in &sol.modes {
            assert_eq!(m.b[0], Complex64::new(0.0, 0.0));
            let expect = bc.modes[&m.n] / 3f64.powi(m.n.abs());
            assert!((m.a[0] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn transmission_residuals_small() {
        let c = cond();
        let geom =
            LayeredDiskGeometry::new(vec![0.5, 1.1, 2.0, 3.3, 4.0], vec![2, 1, 2, 1, 2]).unwrap();
        let bc =
            FourierBC::new((-6..=6).map(|n| (n, Complex64::new(1.0 / (1 + n * n) as f64, 0.3))));
        let sol = solve_layered_disk(&geom, &c, &bc).unwrap();
        assert!(sol.transmission_residual() < 1e-10);
        let v = sol.potential(4.0, 1.3);
        let direct: Complex64 = bc
            .modes
            .iter()
            .map(|(n, c)| c * Complex64::from_polar(1.0, *n as f64 * 1.3))
            .sum();
        assert!((v - direct).norm() < 1e-12);
    }

    #[test]
    fn coreshell_continuity_and_solver_agreement() {
        let c = cond();
        let sol = coreshell_solution(1.0, 2.0, &c, 0.3).unwrap();
        assert!(sol.transmission_residual() < 1e-14);
        let outer: Vec<(i32, Complex64)> = sol
            .modes
            .iter()
            .map(|m| {
                (
                    m.n,
                    m.a[1] * 2f64.powi(m.n.abs()) + m.b[1] * 2f64.powi(-m.n.abs()),
                )
            })
            .collect();
        let solved = solve_layered_disk(&sol.geom, &c, &FourierBC::new(outer)).unwrap();
        for (m1, m2) in sol.modes.iter().zip(&solved.modes) {
            for l in 0..2 {
                assert!((m1.a[l] - m2.a[l]).norm() < 1e-12);
                assert!((m1.b[l] - m2.b[l]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn coreshell_core_field() {
        let c = cond();
        let flat = coreshell_solution(1.0, 2.0, &c, 0.0).unwrap();
        for (x, y) in [(0.1, 0.2), (-0.5, 0.6), (0.0, -0.9)] {
            let e = flat.field_at(x, y);
            assert!((e[0] + 1.0).norm() < 1e-13);
            assert!((e[1] + Complex64::i()).norm() < 1e-13);
        }
        let bent = coreshell_solution(1.0, 2.0, &c, 0.7).unwrap();
        let (p, q) = (bent.field_at(0.1, 0.2), bent.field_at(-0.5, 0.6));
        assert!((p[0] - q[0]).norm() > 1e-3);
    }

    #[test]
    fn coreshell_rejects_bad_radii() {
        assert!(coreshell_solution(2.0, 1.0, &cond(), 0.0).is_err());
        assert!(coreshell_solution(0.0, 1.0, &cond(), 0.0).is_err());
    }
}
