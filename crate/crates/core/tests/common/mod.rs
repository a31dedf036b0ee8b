#![allow(dead_code)]

use nalgebra::Vector2;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use voltbound_core::forward::{
    boundary_trace, solve_layered_disk, FieldSolution, FourierBC, LayeredDiskGeometry,
};
use voltbound_core::measurement::{derive_constants, DerivedConstants, PhaseConductivities};
use voltbound_core::quadrature::null_lagrangians;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Core and outer ring of phase 1 around a phase-2 annulus, radii 2, 3, 5.
pub fn annulus() -> FieldSolution {
    let cond = PhaseConductivities::new(c(3.0, 8.0), c(8.0, 6.0)).unwrap();
    let geom = LayeredDiskGeometry::new(vec![2.0, 3.0, 5.0], vec![1, 2, 1]).unwrap();
    let u = [c(-2.0, 1.0), c(0.6, -1.4)];
    solve_layered_disk(&geom, &cond, &FourierBC::affine(u, 5.0)).unwrap()
}

pub fn annulus_constants() -> DerivedConstants {
    let sol = annulus();
    let trace = boundary_trace(&sol, 2048).unwrap();
    let meas = null_lagrangians(&trace).unwrap();
    derive_constants(&sol.cond, &meas).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Conductivities with positive real parts and `beta` bounded away from 0.
pub fn random_conductivities(rng: &mut StdRng) -> PhaseConductivities {
    loop {
        let s1 = c(rng.random_range(0.2..10.0), rng.random_range(-10.0..10.0));
        let s2 = c(rng.random_range(0.2..10.0), rng.random_range(-10.0..10.0));
        let cond = PhaseConductivities::new(s1, s2).unwrap();
        let m = (s1.norm_sqr() - s2.norm_sqr()).abs() / s1.norm_sqr().max(s2.norm_sqr());
        if cond.beta().abs() > 0.05 * s1.norm() * s2.norm() && m > 0.05 {
            return cond;
        }
    }
}

/// Random layered disk with 2 to 5 layers, both phases present, and a
/// boundary condition with a few low modes.
pub fn random_layered(rng: &mut StdRng) -> FieldSolution {
    let cond = random_conductivities(rng);
    let layers = rng.random_range(2..=5);
    let mut radii = Vec::new();
    let mut r = 0.0;
    for _ in 0..layers {
        r += rng.random_range(0.3..1.5);
        radii.push(r);
    }
    let mut phases: Vec<u8> = (0..layers).map(|l| (l % 2) as u8 + 1).collect();
    if rng.random_bool(0.5) {
        phases.iter_mut().for_each(|p| *p = 3 - *p);
    }
    let geom = LayeredDiskGeometry::new(radii, phases).unwrap();
    let outer = geom.outer_radius();
    let mut modes = Vec::new();
    let u = [
        c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
        c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
    ];
    modes.extend(FourierBC::affine(u, outer).modes);
    for n in [-3, -2, 0, 2, 3] {
        if rng.random_bool(0.4) {
            let amp = outer * 0.3;
            modes.push((
                n,
                c(
                    amp * rng.random_range(-1.0..1.0),
                    amp * rng.random_range(-1.0..1.0),
                ),
            ));
        }
    }
    solve_layered_disk(&geom, &cond, &FourierBC::new(modes)).unwrap()
}

pub fn random_unit(rng: &mut StdRng) -> Vector2<f64> {
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    Vector2::new(t.cos(), t.sin())
}
