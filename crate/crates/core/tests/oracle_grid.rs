mod common;

use voltbound_core::bounds::{
    elementary_bounds, grid_psd_oracle, improved_elementary_bounds, intersection_verdict,
};
use voltbound_core::measurement::derive_constants;

#[test]
fn verdicts_agree_with_grid_search() {
    let mut rng = common::rng(404);
    let mut checked = 0;
    for _ in 0..20 {
        let sol = common::random_layered(&mut rng);
        let consts = derive_constants(&sol.cond, &sol.exact_moments().measurement).unwrap();
        let (f_el, f_eu) = elementary_bounds(&consts).unwrap();
        let imp = improved_elementary_bounds(&consts, f_el, f_eu).unwrap();
        for (tilde, lo, hi) in [(false, f_el, f_eu), (true, imp.f_tilde_el, imp.f_tilde_eu)] {
            for k in 0..=8 {
                let f = lo + (hi - lo) * k as f64 / 8.0;
                let v = intersection_verdict(&consts, f, tilde).unwrap();
                let g = grid_psd_oracle(&consts, f, tilde, 200).unwrap();
                if v.admissible != g.admissible {
                    assert!(
                        g.margin.abs() <= 10.0 * g.resolution,
                        "f = {f}, tilde = {tilde}: {v:?} vs {g:?}"
                    );
                }
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 20 * 2 * 9);
}
