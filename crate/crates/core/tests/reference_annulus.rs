mod common;

use std::time::Instant;

use voltbound_core::bounds::{
    branch_selector, compute_bounds, elementary_bounds, improved_elementary_bounds,
    intersection_verdict, Branch,
};
use voltbound_core::forward::boundary_trace;
use voltbound_core::measurement::{derive_constants, phase_field_averages, reduced_system_solve};
use voltbound_core::quadrature::null_lagrangians;
use voltbound_core::scan::{bounds_of, ScanOptions};

#[test]
fn elementary_bounds_bracket_true_fraction() {
    let start = Instant::now();
    let consts = common::annulus_constants();
    let (lo, hi) = elementary_bounds(&consts).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert!((lo - 0.794).abs() <= 1e-3, "{lo}");
    assert!((hi - 0.808).abs() <= 1e-3, "{hi}");
    assert!(lo <= 0.8 && 0.8 <= hi);
}

#[test]
fn improved_bounds_and_quotients() {
    let consts = common::annulus_constants();
    let (lo, hi) = elementary_bounds(&consts).unwrap();
    let imp = improved_elementary_bounds(&consts, lo, hi).unwrap();
    assert!((imp.f_tilde_el - 0.798).abs() <= 1e-3);
    assert!((imp.f_tilde_eu - 0.802).abs() <= 1e-3);
    assert!((imp.q1.unwrap() - 0.776).abs() <= 1e-3);
    assert!((imp.q2.unwrap() - 0.828).abs() <= 1e-3);
    assert!(imp.q1.unwrap() <= lo && imp.q2.unwrap() >= hi);
}

#[test]
fn branch_matches_argmax() {
    let consts = common::annulus_constants();
    let (lo, hi) = elementary_bounds(&consts).unwrap();
    let imp = improved_elementary_bounds(&consts, lo, hi).unwrap();
    for (phase, bound) in [(0, lo), (1, hi)] {
        let [qp, qm] = imp.quotients[phase];
        let expect = if qp.unwrap() >= qm.unwrap() {
            Branch::Plus
        } else {
            Branch::Minus
        };
        assert_eq!(branch_selector(&consts, phase, bound).unwrap(), expect);
    }
}

#[test]
fn ellipse_scan_recovers_elementary_interval() {
    let consts = common::annulus_constants();
    let opts = ScanOptions::default();
    let report = compute_bounds(&consts, opts).unwrap();
    let b = bounds_of(&report.set_a).unwrap();
    assert!(!b.disconnected);
    assert!((b.inf - report.f_el).abs() <= opts.refine_tol);
    assert!((b.sup - report.f_eu).abs() <= opts.refine_tol);
}

#[test]
fn tilde_scan_interval() {
    let consts = common::annulus_constants();
    let start = Instant::now();
    let report = compute_bounds(&consts, ScanOptions::default()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 10.0);
    let set = report.set_a_tilde.unwrap();
    assert_eq!(set.intervals.len(), 1);
    let b = bounds_of(&set).unwrap();
    assert!((b.inf - 0.7987).abs() <= 5e-4, "{}", b.inf);
    assert!((b.sup - 0.8012).abs() <= 5e-4, "{}", b.sup);
    assert!(set.contains(0.8));
    assert!(b.inf >= report.f_tilde_el.unwrap() && b.sup <= report.f_tilde_eu.unwrap());
}

#[test]
fn verdict_outside_tilde_window_is_inadmissible() {
    let consts = common::annulus_constants();
    let v = intersection_verdict(&consts, 0.7984, true).unwrap();
    assert!(!v.admissible);
    let v = intersection_verdict(&consts, 0.8, true).unwrap();
    assert!(v.admissible);
    assert!(intersection_verdict(&consts, 0.5, false).is_err());
}

#[test]
fn trace_refinement_is_stable() {
    let sol = common::annulus();
    let bounds = |n| {
        let m = null_lagrangians(&boundary_trace(&sol, n).unwrap()).unwrap();
        let k = derive_constants(&sol.cond, &m).unwrap();
        let (lo, hi) = elementary_bounds(&k).unwrap();
        let imp = improved_elementary_bounds(&k, lo, hi).unwrap();
        [lo, hi, imp.f_tilde_el, imp.f_tilde_eu]
    };
    let (a, b) = (bounds(2048), bounds(4096));
    for i in 0..4 {
        assert!((a[i] - b[i]).abs() <= 1e-10);
    }
}

#[test]
fn phase_averages_and_reduced_system_match_volume_moments() {
    let sol = common::annulus();
    let exact = sol.exact_moments();
    let consts = common::annulus_constants();
    let scale = exact.measurement.scale();
    let avgs = phase_field_averages(&sol.cond, &exact.measurement).unwrap();
    for ph in 0..2 {
        assert!((avgs[ph].e1 - exact.avg_e_phase[ph][0]).norm() <= 1e-12 * scale);
        assert!((avgs[ph].e2 - exact.avg_e_phase[ph][1]).norm() <= 1e-12 * scale);
        assert!((consts.eta[ph] - exact.eta(ph)).abs() <= 1e-8 * scale);
        assert!((consts.b12.unwrap()[ph] - exact.b12[ph]).abs() <= 1e-8 * scale);
    }
    let exact_consts = derive_constants(&sol.cond, &exact.measurement).unwrap();
    let out = reduced_system_solve(&exact_consts, exact.a[0][0][0], exact.a[1][0][0]);
    let truth = [
        exact.a[0][1][0],
        exact.a[1][1][0],
        exact.a[0][1][1],
        exact.a[1][1][1],
    ];
    for k in 0..4 {
        assert!(
            (out[k] - truth[k]).abs() <= 1e-9 * truth[k].abs().max(scale),
            "{k}"
        );
    }
}
