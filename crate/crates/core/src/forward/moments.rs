use std::f64::consts::PI;

use nalgebra::Vector2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FieldSolution, LayeredDiskGeometry};
use crate::measurement::{BoundaryMeasurement, PhaseConductivities};

/// `c r^p e^{i m theta}`.
#[derive(Debug, Clone, Copy)]
struct Term {
    c: Complex64,
    p: i32,
    m: i32,
}

/// Per-phase volume moments and the global averages they imply.
///
/// All averages are normalised by the total area `|Omega|`, so the phase-1
/// moments of a vanishing phase-1 region tend to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub f1: f64,
    /// `a[phase][m][n] = <chi E_m . E_n>`.
    pub a: [[[f64; 2]; 2]; 2],
    /// `<chi E_1 . Rperp E_2>` per phase.
    pub b12: [f64; 2],
    /// `<chi E_m>` per phase.
    pub avg_e_phase: [[Vector2<f64>; 2]; 2],
    pub measurement: BoundaryMeasurement,
}

impl ExactMoments {
    /// Assembles the global measurement from phase moments. The current in
    /// phase `a` is `J = sigma E`, i.e. `J_1 = s_r E_1 - s_i E_2` and
    /// `J_2 = s_i E_1 + s_r E_2`.
    pub fn from_phase_moments(
        cond: &PhaseConductivities,
        f1: f64,
        a: [[[f64; 2]; 2]; 2],
        b12: [f64; 2],
        avg_e_phase: [[Vector2<f64>; 2]; 2],
    ) -> Self {
        let mut avg_e = [Vector2::zeros(); 2];
        let mut avg_j = [Vector2::zeros(); 2];
        let mut power = [[0.0; 2]; 2];
        let (mut rot_e, mut rot_j) = (0.0, 0.0);
        for ph in 0..2 {
            let s = cond.of(ph);
            let e = avg_e_phase[ph];
            let am = a[ph];
            avg_e[0] += e[0];
            avg_e[1] += e[1];
            avg_j[0] += s.re * e[0] - s.im * e[1];
            avg_j[1] += s.im * e[0] + s.re * e[1];
            for (k, row) in power.iter_mut().enumerate() {
                row[0] += s.re * am[k][0] - s.im * am[k][1];
                row[1] += s.im * am[k][0] + s.re * am[k][1];
            }
            rot_e += b12[ph];
            rot_j += s.norm_sqr() * b12[ph];
        }
        Self {
            f1,
            a,
            b12,
            avg_e_phase,
            measurement: BoundaryMeasurement {
                avg_e,
                avg_j,
                power,
                rot_e,
                rot_j,
                rot_available: true,
            },
        }
    }

    /// `A_11 + A_22` of a phase.
    pub fn eta(&self, phase: usize) -> f64 {
        self.a[phase][0][0] + self.a[phase][1][1]
    }
}

/// Gradient of `c r^p e^{imθ} = c z^α conj(z)^β` with `α = (p+m)/2`,
/// `β = (p-m)/2`, using `d/dx = d/dz + d/dzbar`, `d/dy = i (d/dz - d/dzbar)`.
fn gradient(t: Term, out_x: &mut Vec<Term>, out_y: &mut Vec<Term>) {
    let alpha = (t.p + t.m) as f64 / 2.0;
    let beta = (t.p - t.m) as f64 / 2.0;
    let i = Complex64::i();
    if alpha != 0.0 {
        let c = t.c * alpha;
        out_x.push(Term {
            c,
            p: t.p - 1,
            m: t.m - 1,
        });
        out_y.push(Term {
            c: c * i,
            p: t.p - 1,
            m: t.m - 1,
        });
    }
    if beta != 0.0 {
        let c = t.c * beta;
        out_x.push(Term {
            c,
            p: t.p - 1,
            m: t.m + 1,
        });
        out_y.push(Term {
            c: -c * i,
            p: t.p - 1,
            m: t.m + 1,
        });
    }
}

/// `E = -grad V` in one layer, as complex `(E_x, E_y)` term lists.
fn layer_field(sol: &FieldSolution, layer: usize) -> [Vec<Term>; 2] {
    let zero = Complex64::new(0.0, 0.0);
    let (mut gx, mut gy) = (Vec::new(), Vec::new());
    for mode in &sol.modes {
        let (a, b) = (mode.a[layer], mode.b[layer]);
        if mode.n == 0 {
            if b != zero {
                // grad ln r = (1/2)(1/z + 1/zbar, i/z - i/zbar).
                let h = b / 2.0;
                let i = Complex64::i();
                gx.push(Term { c: h, p: -1, m: -1 });
                gx.push(Term { c: h, p: -1, m: 1 });
                gy.push(Term {
                    c: h * i,
                    p: -1,
                    m: -1,
                });
                gy.push(Term {
                    c: -h * i,
                    p: -1,
                    m: 1,
                });
            }
        } else {
            let k = mode.n.abs();
            if a != zero {
                gradient(
                    Term {
                        c: a,
                        p: k,
                        m: mode.n,
                    },
                    &mut gx,
                    &mut gy,
                );
            }
            if b != zero {
                gradient(
                    Term {
                        c: b,
                        p: -k,
                        m: mode.n,
                    },
                    &mut gx,
                    &mut gy,
                );
            }
        }
    }
    let neg = |v: Vec<Term>| v.into_iter().map(|t| Term { c: -t.c, ..t }).collect();
    [neg(gx), neg(gy)]
}

/// Real (`part = 0`) or imaginary (`part = 1`) part of a term list, still in
/// the `r^p e^{imθ}` basis.
fn real_part(terms: &[Term], part: usize) -> Vec<Term> {
    let scale = if part == 0 {
        Complex64::new(0.5, 0.0)
    } else {
        Complex64::new(0.0, -0.5)
    };
    terms
        .iter()
        .flat_map(|t| {
            let w = t.c * scale;
            [
                Term { c: w, ..*t },
                Term {
                    c: w.conj(),
                    p: t.p,
                    m: -t.m,
                },
            ]
        })
        .collect()
}

fn radial_integral(q: i32, r0: f64, r1: f64) -> f64 {
    if q == -1 {
        (r1 / r0).ln()
    } else {
        let e = q + 1;
        (r1.powi(e) - if r0 == 0.0 { 0.0 } else { r0.powi(e) }) / e as f64
    }
}

/// `∫∫ F r dr dθ` over the annulus.
fn integrate(f: &[Term], r0: f64, r1: f64) -> f64 {
    f.iter()
        .filter(|t| t.m == 0)
        .map(|t| t.c.re * 2.0 * PI * radial_integral(t.p + 1, r0, r1))
        .sum()
}

/// `∫∫ F G r dr dθ` over the annulus.
fn integrate_product(f: &[Term], g: &[Term], r0: f64, r1: f64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for s in f {
        for t in g.iter().filter(|t| t.m + s.m == 0) {
            acc += s.c * t.c * radial_integral(s.p + t.p + 1, r0, r1);
        }
    }
    2.0 * PI * acc.re
}

/// Per-phase volume moments of a layered-disk solution in closed form.
pub fn exact_moments(sol: &FieldSolution, geom: &LayeredDiskGeometry) -> ExactMoments {
    let area = geom.area();
    let mut a = [[[0.0; 2]; 2]; 2];
    let mut b12 = [0.0; 2];
    let mut avg = [[Vector2::zeros(); 2]; 2];
    for layer in 0..geom.layers() {
        let ph = geom.phase_index(layer);
        let (r0, r1) = (geom.inner_radius(layer), geom.radii()[layer]);
        let [ex, ey] = layer_field(sol, layer);
        // fields[part][component]
        let fields = [
            [real_part(&ex, 0), real_part(&ey, 0)],
            [real_part(&ex, 1), real_part(&ey, 1)],
        ];
        for m in 0..2 {
            avg[ph][m] += Vector2::new(
                integrate(&fields[m][0], r0, r1),
                integrate(&fields[m][1], r0, r1),
            ) / area;
            for n in m..2 {
                let v = (integrate_product(&fields[m][0], &fields[n][0], r0, r1)
                    + integrate_product(&fields[m][1], &fields[n][1], r0, r1))
                    / area;
                a[ph][m][n] += v;
                if n != m {
                    a[ph][n][m] += v;
                }
            }
        }
        b12[ph] += (integrate_product(&fields[0][0], &fields[1][1], r0, r1)
            - integrate_product(&fields[0][1], &fields[1][0], r0, r1))
            / area;
    }
    ExactMoments::from_phase_moments(&sol.cond, geom.volume_fraction(), a, b12, avg)
}

/// Brute-force polar midpoint rule for the same moments; used in tests.
#[cfg(test)]
pub(crate) fn midpoint_moments(sol: &FieldSolution, nr: usize, nt: usize) -> ExactMoments {
    let geom = &sol.geom;
    let area = geom.area();
    let mut a = [[[0.0; 2]; 2]; 2];
    let mut b12 = [0.0; 2];
    let mut avg = [[Vector2::zeros(); 2]; 2];
    for layer in 0..geom.layers() {
        let ph = geom.phase_index(layer);
        let (r0, r1) = (geom.inner_radius(layer), geom.radii()[layer]);
        let dr = (r1 - r0) / nr as f64;
        let dt = 2.0 * PI / nt as f64;
        for i in 0..nr {
            let r = r0 + (i as f64 + 0.5) * dr;
            for j in 0..nt {
                let th = (j as f64 + 0.5) * dt;
                let e = sol.field_at(r * th.cos(), r * th.sin());
                let parts = [
                    Vector2::new(e[0].re, e[1].re),
                    Vector2::new(e[0].im, e[1].im),
                ];
                let w = r * dr * dt / area;
                for m in 0..2 {
                    avg[ph][m] += parts[m] * w;
                    for n in 0..2 {
                        a[ph][m][n] += parts[m].dot(&parts[n]) * w;
                    }
                }
                b12[ph] += crate::measurement::cross_rperp(&parts[0], &parts[1]) * w;
            }
        }
    }
    ExactMoments::from_phase_moments(&sol.cond, geom.volume_fraction(), a, b12, avg)
}
