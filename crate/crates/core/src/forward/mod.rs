//! Exact two-dimensional forward solutions.
//!
//! Every geometry here is a disk split into concentric homogeneous layers.
//! In each layer the potential is a finite Fourier series
//! `V = sum_n (a r^|n| + b r^-|n|) e^{i n theta}` (with `{1, ln r}` for
//! `n = 0`), so fields, boundary traces and per-phase volume moments are all
//! available in closed form.

mod laminate;
mod moments;
mod solver;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ForwardError;
use crate::measurement::PhaseConductivities;
use crate::quadrature::BoundaryTrace;

pub use laminate::laminate_moments;
pub use moments::{exact_moments, ExactMoments};
pub use solver::{coreshell_solution, solve_layered_disk};

/// Concentric layers; layer `l` occupies `radii[l-1] < r < radii[l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredDiskGeometry {
    radii: Vec<f64>,
    layer_phase: Vec<u8>,
}

impl LayeredDiskGeometry {
    pub fn new(radii: Vec<f64>, layer_phase: Vec<u8>) -> Result<Self, ForwardError> {
        if radii.is_empty() {
            return Err(ForwardError::InvalidGeometry("no layers".into()));
        }
        if radii.len() != layer_phase.len() {
            return Err(ForwardError::InvalidGeometry(format!(
                "{} radii but {} phase labels",
                radii.len(),
                layer_phase.len()
            )));
        }
        if radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
            return Err(ForwardError::InvalidRadii("radii must be positive".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ForwardError::InvalidRadii(
                "radii must be strictly increasing".into(),
            ));
        }
        if let Some(p) = layer_phase.iter().find(|p| **p != 1 && **p != 2) {
            return Err(ForwardError::InvalidGeometry(format!(
                "phase label {p} is not 1 or 2"
            )));
        }
        Ok(Self { radii, layer_phase })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn layer_phase(&self) -> &[u8] {
        &self.layer_phase
    }

    pub fn layers(&self) -> usize {
        self.radii.len()
    }

    pub fn outer_radius(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    pub fn inner_radius(&self, layer: usize) -> f64 {
        if layer == 0 {
            0.0
        } else {
            self.radii[layer - 1]
        }
    }

    /// Zero-based phase index of a layer.
    pub fn phase_index(&self, layer: usize) -> usize {
        self.layer_phase[layer] as usize - 1
    }

    /// Layer containing radius `r` (points on an interface go inward).
    pub fn layer_of(&self, r: f64) -> Option<usize> {
        self.radii.iter().position(|&rl| r <= rl)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.outer_radius().powi(2)
    }

    /// Area fraction of phase 1.
    pub fn volume_fraction(&self) -> f64 {
        let total = self.outer_radius().powi(2);
        (0..self.layers())
            .filter(|&l| self.layer_phase[l] == 1)
            .map(|l| self.radii[l].powi(2) - self.inner_radius(l).powi(2))
            .sum::<f64>()
            / total
    }
}

/// Dirichlet data `V0(R, theta) = sum_n c_n e^{i n theta}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FourierBC {
    pub modes: BTreeMap<i32, Complex64>,
}

impl FourierBC {
    pub fn new(modes: impl IntoIterator<Item = (i32, Complex64)>) -> Self {
        let mut out = BTreeMap::new();
        for (n, c) in modes {
            *out.entry(n).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Self { modes: out }
    }

    /// `V0 = u . x` on the circle of radius `radius`.
    pub fn affine(u: [Complex64; 2], radius: f64) -> Self {
        let i = Complex64::i();
        Self::new([
            (1, radius * (u[0] - i * u[1]) / 2.0),
            (-1, radius * (u[0] + i * u[1]) / 2.0),
        ])
    }

    pub fn validate(&self) -> Result<(), ForwardError> {
        if self.modes.is_empty() {
            return Err(ForwardError::EmptyBoundaryCondition);
        }
        if self
            .modes
            .values()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(ForwardError::InvalidGeometry(
                "boundary coefficients must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Coefficients of one Fourier mode across all layers. `b[0]` is always 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub n: i32,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

/// Piecewise-harmonic potential on a layered disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSolution {
    pub geom: LayeredDiskGeometry,
    pub cond: PhaseConductivities,
    pub modes: Vec<ModeCoefficients>,
}

impl FieldSolution {
    pub fn layer_sigma(&self, layer: usize) -> Complex64 {
        self.cond.of(self.geom.phase_index(layer))
    }

    /// `(V, r dV/dr)` of a single mode in a given layer.
    fn mode_values(&self, mode: &ModeCoefficients, layer: usize, r: f64) -> (Complex64, Complex64) {
        let (a, b) = (mode.a[layer], mode.b[layer]);
        if mode.n == 0 {
            let log = if b == Complex64::new(0.0, 0.0) {
                0.0
            } else {
                r.ln()
            };
            (a + b * log, b)
        } else {
            let k = mode.n.unsigned_abs() as i32;
            let up = r.powi(k);
            let down = if b == Complex64::new(0.0, 0.0) {
                0.0
            } else {
                r.powi(-k)
            };
            (a * up + b * down, (a * up - b * down) * k as f64)
        }
    }

    /// Potential at polar point `(r, theta)`.
    pub fn potential(&self, r: f64, theta: f64) -> Complex64 {
        let layer = self.geom.layer_of(r).unwrap_or(self.geom.layers() - 1);
        self.modes
            .iter()
            .map(|m| {
                self.mode_values(m, layer, r).0 * Complex64::from_polar(1.0, m.n as f64 * theta)
            })
            .sum()
    }

    /// Complex field `E = -grad V` at a Cartesian point inside the disk.
    pub fn field_at(&self, x: f64, y: f64) -> [Complex64; 2] {
        let r = x.hypot(y);
        let theta = y.atan2(x);
        let layer = self.geom.layer_of(r).unwrap_or(self.geom.layers() - 1);
        let zero = Complex64::new(0.0, 0.0);
        if r == 0.0 {
            // Only |n| = 1 modes have a nonzero gradient at the origin.
            let (mut ex, mut ey) = (zero, zero);
            for m in self.modes.iter().filter(|m| m.n.abs() == 1) {
                let s = m.n as f64;
                ex -= m.a[0];
                ey -= m.a[0] * Complex64::i() * s;
            }
            return [ex, ey];
        }
        let (mut dr, mut dt) = (zero, zero);
        for m in &self.modes {
            let e = Complex64::from_polar(1.0, m.n as f64 * theta);
            let (v, rdv) = self.mode_values(m, layer, r);
            dr += rdv * e / r;
            dt += v * e * Complex64::new(0.0, m.n as f64) / r;
        }
        let (c, s) = (theta.cos(), theta.sin());
        [-(dr * c - dt * s), -(dr * s + dt * c)]
    }

    /// Largest relative jump of `V` or `sigma dV/dr` across any interface.
    pub fn transmission_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for l in 0..self.geom.layers().saturating_sub(1) {
            let r = self.geom.radii()[l];
            let (s_in, s_out) = (self.layer_sigma(l), self.layer_sigma(l + 1));
            for m in &self.modes {
                let (v_in, f_in) = self.mode_values(m, l, r);
                let (v_out, f_out) = self.mode_values(m, l + 1, r);
                let scale = v_in.norm().max(v_out.norm()).max(f64::MIN_POSITIVE);
                worst = worst.max((v_in - v_out).norm() / scale);
                let (j_in, j_out) = (s_in * f_in, s_out * f_out);
                let scale = j_in.norm().max(j_out.norm()).max(f64::MIN_POSITIVE);
                worst = worst.max((j_in - j_out).norm() / scale);
            }
        }
        worst
    }

    pub fn exact_moments(&self) -> ExactMoments {
        exact_moments(self, &self.geom)
    }
}

/// Samples `V` and `sigma dV/dn` at `n_nodes` equispaced angles on the outer
/// circle, counterclockwise from `theta = 0`.
pub fn boundary_trace(sol: &FieldSolution, n_nodes: usize) -> Result<BoundaryTrace, ForwardError> {
    if n_nodes < 16 || n_nodes % 2 != 0 {
        return Err(ForwardError::InvalidNodeCount(n_nodes));
    }
    let big_r = sol.geom.outer_radius();
    let outer = sol.geom.layers() - 1;
    let sigma = sol.layer_sigma(outer);
    let radial: Vec<(i32, Complex64, Complex64)> = sol
        .modes
        .iter()
        .map(|m| {
            let (v, rdv) = sol.mode_values(m, outer, big_r);
            (m.n, v, sigma * rdv / big_r)
        })
        .collect();
    let mut v = Vec::with_capacity(n_nodes);
    let mut flux = Vec::with_capacity(n_nodes);
    for j in 0..n_nodes {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / n_nodes as f64;
        let (mut vs, mut fs) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for &(n, vn, fnn) in &radial {
            let e = Complex64::from_polar(1.0, n as f64 * theta);
            vs += vn * e;
            fs += fnn * e;
        }
        v.push(vs);
        flux.push(fs);
    }
    Ok(BoundaryTrace::new(big_r, v, flux).expect("forward trace is well formed"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> (LayeredDiskGeometry, PhaseConductivities, FourierBC) {
        let cond =
            PhaseConductivities::new(Complex64::new(3.0, 8.0), Complex64::new(8.0, 6.0)).unwrap();
        let geom = LayeredDiskGeometry::new(vec![2.0, 3.0, 5.0], vec![1, 2, 1]).unwrap();
        let u = [Complex64::new(-2.0, 1.0), Complex64::new(0.6, -1.4)];
        (geom, cond, FourierBC::affine(u, 5.0))
    }

    #[test]
    fn geometry_validation() {
        assert!(LayeredDiskGeometry::new(vec![], vec![]).is_err());
        assert!(LayeredDiskGeometry::new(vec![2.0, 1.0], vec![1, 2]).is_err());
        assert!(LayeredDiskGeometry::new(vec![1.0, 2.0], vec![1, 3]).is_err());
        assert!(LayeredDiskGeometry::new(vec![-1.0], vec![1]).is_err());
        assert!(LayeredDiskGeometry::new(vec![1.0, 2.0], vec![1]).is_err());
    }

    #[test]
    fn fig3_volume_fraction() {
        let (geom, _, _) = fig3();
        assert!((geom.volume_fraction() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn affine_trace_matches_u_dot_x() {
        let u = [Complex64::new(-2.0, 1.0), Complex64::new(0.6, -1.4)];
        let bc = FourierBC::affine(u, 5.0);
        for theta in [0.0, 0.7, 2.0, 4.5] {
            let v: Complex64 = bc
                .modes
                .iter()
                .map(|(n, c)| c * Complex64::from_polar(1.0, *n as f64 * theta))
                .sum();
            let direct = u[0] * 5.0 * f64::cos(theta) + u[1] * 5.0 * f64::sin(theta);
            assert!((v - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn field_matches_finite_differences() {
        let (geom, cond, bc) = fig3();
        let sol = solve_layered_disk(&geom, &cond, &bc).unwrap();
        let h = 1e-6;
        for (x, y) in [(0.5, 0.3), (-1.2, 2.1), (3.0, -2.5), (0.0, 4.5)] {
            let r = f64::hypot(x, y);
            let th = |x: f64, y: f64| y.atan2(x);
            let vx = (sol.potential(f64::hypot(x + h, y), th(x + h, y))
                - sol.potential(f64::hypot(x - h, y), th(x - h, y)))
                / (2.0 * h);
            let vy = (sol.potential(f64::hypot(x, y + h), th(x, y + h))
                - sol.potential(f64::hypot(x, y - h), th(x, y - h)))
                / (2.0 * h);
            let e = sol.field_at(x, y);
            assert!((e[0] + vx).norm() < 1e-6 * (1.0 + r), "{x} {y}");
            assert!((e[1] + vy).norm() < 1e-6 * (1.0 + r), "{x} {y}");
        }
    }

    #[test]
    fn homogeneous_flux_trace() {
        let cond =
            PhaseConductivities::new(Complex64::new(2.0, 1.0), Complex64::new(1.0, 0.0)).unwrap();
        let geom = LayeredDiskGeometry::new(vec![1.5], vec![1]).unwrap();
        let c1 = Complex64::new(0.3, -0.2);
        let sol = solve_layered_disk(&geom, &cond, &FourierBC::new([(1, c1)])).unwrap();
        let tr = boundary_trace(&sol, 32).unwrap();
        for (j, f) in tr.sigma_dvdn().iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / 32.0;
            let expect = cond.sigma1() * c1 / 1.5 * Complex64::from_polar(1.0, theta);
            assert!((f - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn trace_node_count_checked() {
        let (geom, cond, bc) = fig3();
        let sol = solve_layered_disk(&geom, &cond, &bc).unwrap();
        assert_eq!(
            boundary_trace(&sol, 15).unwrap_err(),
            ForwardError::InvalidNodeCount(15)
        );
        assert!(boundary_trace(&sol, 8).is_err());
    }
}
