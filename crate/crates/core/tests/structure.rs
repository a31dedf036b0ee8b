mod common;

use proptest::prelude::*;
use rand::Rng;
use voltbound_core::bounds::{
    compute_bounds, elementary_bounds, ellipse_pmax, ellipse_quadratic, improved_elementary_bounds,
    m_matrix_eigenvalues, m_matrix_psd_oracle, mu_coefficients, s_matrix, tau, FeasibleRectangle,
};
use voltbound_core::forward::{ExactMoments, FieldSolution};
use voltbound_core::measurement::{derive_constants, reduced_system_solve, DerivedConstants};
use voltbound_core::scan::{AdmissibleSet, ScanOptions};

struct Instance {
    sol: FieldSolution,
    exact: ExactMoments,
    consts: DerivedConstants,
}

fn instance(seed: u64) -> Instance {
    let mut rng = common::rng(seed);
    let sol = common::random_layered(&mut rng);
    let exact = sol.exact_moments();
    let consts = derive_constants(&sol.cond, &exact.measurement).unwrap();
    Instance { sol, exact, consts }
}

fn lerp(lo: f64, hi: f64, t: f64) -> f64 {
    lo + (hi - lo) * t
}

fn near_member(set: &AdmissibleSet, f: f64) -> bool {
    set.contains(f)
        || set
            .intervals
            .iter()
            .any(|i| (i.lo - f).abs() < 1e-8 || (i.hi - f).abs() < 1e-8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn line_coefficients_cancel(seed in any::<u64>(), t in 0.0..1.0f64, tilde in any::<bool>()) {
        let inst = instance(seed);
        let (f_el, f_eu) = elementary_bounds(&inst.consts).unwrap();
        let f = lerp(f_el, f_eu, t);
        let (mu, scale) = mu_coefficients(&inst.consts, f, tilde).unwrap();
        for m in &mu[..3] {
            prop_assert!(m.abs() <= 1e-9 * scale, "{mu:?}");
        }
    }

    #[test]
    fn ellipses_touch_rectangle(seed in any::<u64>(), t in 0.01..0.99f64) {
        let inst = instance(seed);
        let c = &inst.consts;
        let (f_el, f_eu) = elementary_bounds(c).unwrap();
        let f = lerp(f_el, f_eu, t);
        let rect = FeasibleRectangle::new(c, f);
        let (x0, x1) = ellipse_quadratic(c, f, 0, false).unwrap().x_extent();
        let (y0, y1) = ellipse_quadratic(c, f, 1, false).unwrap().y_extent();
        let scale = c.eta[0].max(c.eta[1]);
        prop_assert!((x0 - rect.x_lo).abs() <= 1e-9 * scale);
        prop_assert!((x1 - rect.x_hi).abs() <= 1e-9 * scale);
        prop_assert!((y0 - rect.y_lo).abs() <= 1e-9 * scale);
        prop_assert!((y1 - rect.y_hi).abs() <= 1e-9 * scale);
    }

    #[test]
    fn pmax_matches_center_value(seed in any::<u64>(), t in 0.0..1.0f64, phase in 0usize..2) {
        let inst = instance(seed);
        let c = &inst.consts;
        let (f_el, f_eu) = elementary_bounds(c).unwrap();
        let f = lerp(f_el, f_eu, t);
        for tilde in [false, true] {
            let q = ellipse_quadratic(c, f, phase, tilde).unwrap();
            let (cx, cy) = q.center();
            let closed = ellipse_pmax(c, f, phase, tilde).unwrap();
            prop_assert!((q.eval(cx, cy) - closed).abs() <= 1e-9 * q.magnitude(cx, cy));
            // Central differences of a quadratic are exact up to rounding.
            let h = 1e-3 * (cx.abs() + cy.abs() + c.eta[phase]);
            let dx = q.eval(cx + h, cy) - q.eval(cx - h, cy);
            let dy = q.eval(cx, cy + h) - q.eval(cx, cy - h);
            prop_assert!(dx.abs().max(dy.abs()) <= 1e-9 * q.magnitude(cx, cy));
        }
        prop_assert!(ellipse_pmax(c, f_el, 0, false).unwrap().abs() <= 1e-12 * c.eta[0] * c.eta[0]);
        prop_assert!(ellipse_pmax(c, f_eu, 1, false).unwrap().abs() <= 1e-12 * c.eta[1] * c.eta[1]);
    }

    #[test]
    fn quadratic_is_determinant(seed in any::<u64>(), t in 0.0..1.0f64) {
        let inst = instance(seed);
        let c = &inst.consts;
        let (f_el, f_eu) = elementary_bounds(c).unwrap();
        let f = lerp(f_el, f_eu, t);
        let mut rng = common::rng(seed ^ 0x5eed);
        let rect = FeasibleRectangle::new(c, f);
        for phase in 0..2 {
            let q = ellipse_quadratic(c, f, phase, false).unwrap();
            let psi = c.psi[phase];
            prop_assert!((q.discriminant() - psi * psi).abs() <= 1e-10 * psi * psi);
            if phase == 0 {
                prop_assert!((q.a[0] + 1.0 + c.gamma * c.gamma).abs() <= 1e-12 * (1.0 + c.gamma * c.gamma));
            }
            for _ in 0..20 {
                let x = lerp(rect.x_lo, rect.x_hi, rng.random_range(-0.5..1.5));
                let y = lerp(rect.y_lo, rect.y_hi, rng.random_range(-0.5..1.5));
                let s = s_matrix(c, f, x, y, phase);
                prop_assert!((q.eval(x, y) - s.determinant()).abs() <= 1e-10 * q.magnitude(x, y));
                let s0 = s_matrix(c, f, 0.0, 0.0, phase);
                prop_assert!((s.trace() - s0.trace()).abs() <= 1e-12 * s0.norm().max(1.0));
            }
            prop_assert!(tau(c, f, phase).unwrap() >= 0.0);
        }
        prop_assert!(s_matrix(c, f, rect.x_lo, 0.0, 0)[(0, 0)].abs() <= 1e-12 * c.eta[0]);
    }

    #[test]
    fn m_matrix_matches_shifted_quadratic(seed in any::<u64>(), t in 0.0..1.0f64) {
        let inst = instance(seed);
        let c = &inst.consts;
        let (f_el, f_eu) = elementary_bounds(c).unwrap();
        let f = lerp(f_el, f_eu, t);
        let rect = FeasibleRectangle::new(c, f);
        let mut rng = common::rng(seed.wrapping_add(7));
        for _ in 0..20 {
            let x = lerp(rect.x_lo, rect.x_hi, rng.random_range(0.0..1.0));
            let y = lerp(rect.y_lo, rect.y_hi, rng.random_range(0.0..1.0));
            for phase in 0..2 {
                let ev = m_matrix_eigenvalues(c, f, x, y, phase).unwrap();
                let size = ev[3].abs().max(1e-300);
                prop_assert!((ev[0] - ev[1]).abs() <= 1e-9 * size);
                prop_assert!((ev[2] - ev[3]).abs() <= 1e-9 * size);
                let q = ellipse_quadratic(c, f, phase, true).unwrap();
                let p = q.eval(x, y);
                if p.abs() > 1e-7 * q.magnitude(x, y) {
                    prop_assert_eq!(m_matrix_psd_oracle(c, f, x, y, phase).unwrap(), p >= 0.0);
                }
            }
        }
    }

    #[test]
    fn true_moments_are_feasible(seed in any::<u64>()) {
        let inst = instance(seed);
        let (c, e) = (&inst.consts, &inst.exact);
        let f = e.f1;
        let (x, y) = (e.a[0][0][0], e.a[1][0][0]);
        // The reduced system reproduces the remaining moments.
        let r = reduced_system_solve(c, x, y);
        let want = [e.a[0][1][0], e.a[1][1][0], e.a[0][1][1], e.a[1][1][1]];
        let scale = c.eta[0].max(c.eta[1]);
        for (g, w) in r.iter().zip(want) {
            prop_assert!((g - w).abs() <= 1e-9 * scale, "{r:?} vs {want:?}");
        }
        for phase in 0..2 {
            let s = s_matrix(c, f, x, y, phase);
            let ev = s.symmetric_eigen().eigenvalues;
            prop_assert!(ev.min() >= -1e-9 * c.eta[phase]);
            let q = ellipse_quadratic(c, f, phase, true).unwrap();
            prop_assert!(q.eval(x, y) >= -1e-9 * q.magnitude(x, y));
        }
    }

    #[test]
    fn power_system_is_satisfied(seed in any::<u64>(), sx in 0.0..1.0f64, sy in 0.0..1.0f64) {
        let inst = instance(seed);
        let c = &inst.consts;
        let (x, y) = (sx * c.eta[0], sy * c.eta[1]);
        let [a21_1, a21_2, a22_1, a22_2] = reduced_system_solve(c, x, y);
        let a = [
            [[x, a21_1], [a21_1, a22_1]],
            [[y, a21_2], [a21_2, a22_2]],
        ];
        let m = &inst.exact.measurement;
        let mut power = [[0.0; 2]; 2];
        for ph in 0..2 {
            let s = inst.sol.cond.of(ph);
            for k in 0..2 {
                power[k][0] += s.re * a[ph][k][0] - s.im * a[ph][k][1];
                power[k][1] += s.im * a[ph][k][0] + s.re * a[ph][k][1];
            }
        }
        let scale = m.scale();
        for k in 0..2 {
            for l in 0..2 {
                prop_assert!((power[k][l] - m.power[k][l]).abs() <= 1e-9 * scale);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bounds_are_ordered_and_contain_truth(seed in any::<u64>()) {
        let inst = instance(seed);
        let c = &inst.consts;
        let f = inst.exact.f1;
        let opts = ScanOptions { grid_n: 201, ..Default::default() };
        let rep = compute_bounds(c, opts).unwrap();
        let (fl, fu) = (rep.f_tilde_el.unwrap(), rep.f_tilde_eu.unwrap());
        let slack = 1e-9;
        prop_assert!(rep.f_el <= fl + slack && fl <= f + slack && f <= fu + slack && fu <= rep.f_eu + slack);
        prop_assert!(rep.q1.unwrap() <= rep.f_el + slack);
        prop_assert!(rep.f_eu <= rep.q2.unwrap() + slack);
        prop_assert!(near_member(&rep.set_a, f));
        let tilde = rep.set_a_tilde.as_ref().unwrap();
        prop_assert!(near_member(tilde, f));
        for i in &tilde.intervals {
            prop_assert!(i.lo >= fl - slack && i.hi <= fu + slack);
        }
        let imp = improved_elementary_bounds(c, rep.f_el, rep.f_eu).unwrap();
        prop_assert_eq!(imp.f_tilde_el, fl);
    }

    #[test]
    fn refinement_is_monotone(seed in any::<u64>()) {
        let inst = instance(seed);
        let c = &inst.consts;
        let coarse = ScanOptions { grid_n: 101, ..Default::default() };
        let fine = ScanOptions { grid_n: 201, ..Default::default() };
        let a = compute_bounds(c, coarse).unwrap().set_a_tilde.unwrap();
        let b = compute_bounds(c, fine).unwrap().set_a_tilde.unwrap();
        let (lo, hi) = (a.intervals.first().map(|i| i.lo), a.intervals.last().map(|i| i.hi));
        let pitch = match (lo, hi) { (Some(l), Some(h)) => h - l, _ => 0.0 } / 100.0;
        for i in &a.intervals {
            let covered = b.intervals.iter().any(|j| j.lo <= i.lo + coarse.refine_tol && j.hi >= i.hi - coarse.refine_tol);
            prop_assert!(covered || i.width() <= 2.0 * pitch, "{:?} vs {:?}", a.intervals, b.intervals);
        }
    }
}
