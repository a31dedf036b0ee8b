//! Null Lagrangians from a sampled boundary trace on a circle.
//!
//! Integrals use the periodic trapezoid rule, which is exact for
//! trigonometric polynomials below the Nyquist frequency. Samples are taken
//! counterclockwise starting at `theta = 0`.

use std::f64::consts::PI;

use nalgebra::Vector2;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::QuadratureError;
use crate::measurement::BoundaryMeasurement;

/// Relative tolerance on the net boundary current.
pub const CONSERVATION_TOL: f64 = 1e-8;

/// Below this node count the tangential derivative uses central differences.
const SPECTRAL_MIN_NODES: usize = 64;

/// Voltage and `sigma dV/dn` sampled at `N` equispaced angles.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    radius: f64,
    v: Vec<Complex64>,
    sigma_dvdn: Vec<Complex64>,
}

impl BoundaryTrace {
    pub fn new(
        radius: f64,
        v: Vec<Complex64>,
        sigma_dvdn: Vec<Complex64>,
    ) -> Result<Self, QuadratureError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(QuadratureError::InvalidRadius(radius));
        }
        if v.len() != sigma_dvdn.len() {
            return Err(QuadratureError::LengthMismatch);
        }
        if v.len() < 16 || v.len() % 2 != 0 {
            return Err(QuadratureError::InvalidNodeCount(v.len()));
        }
        let finite = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        if !v.iter().chain(sigma_dvdn.iter()).all(finite) {
            return Err(QuadratureError::Format("non-finite sample".into()));
        }
        Ok(Self {
            radius,
            v,
            sigma_dvdn,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.len() as f64
    }

    pub fn v(&self) -> &[Complex64] {
        &self.v
    }

    pub fn sigma_dvdn(&self) -> &[Complex64] {
        &self.sigma_dvdn
    }

    /// `J . n = -sigma dV/dn`, split into the parts `J_1 . n`, `J_2 . n`.
    pub fn normal_current(&self) -> [Vec<f64>; 2] {
        [
            self.sigma_dvdn.iter().map(|c| -c.re).collect(),
            self.sigma_dvdn.iter().map(|c| -c.im).collect(),
        ]
    }

    fn voltage_parts(&self) -> [Vec<f64>; 2] {
        [
            self.v.iter().map(|c| c.re).collect(),
            self.v.iter().map(|c| c.im).collect(),
        ]
    }

    /// Same trace traversed clockwise; used to exercise orientation checks.
    pub fn reversed(&self) -> Self {
        let n = self.len();
        let idx = |j: usize| (n - j) % n;
        Self {
            radius: self.radius,
            v: (0..n).map(|j| self.v[idx(j)]).collect(),
            sigma_dvdn: (0..n).map(|j| self.sigma_dvdn[idx(j)]).collect(),
        }
    }
}

/// On-disk trace format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub theta_count: usize,
    pub radius: f64,
    #[serde(rename = "V_re")]
    pub v_re: Vec<f64>,
    #[serde(rename = "V_im")]
    pub v_im: Vec<f64>,
    #[serde(rename = "sdVdn_re")]
    pub sdvdn_re: Vec<f64>,
    #[serde(rename = "sdVdn_im")]
    pub sdvdn_im: Vec<f64>,
}

impl TraceDocument {
    pub fn new(trace: &BoundaryTrace) -> Self {
        Self {
            theta_count: trace.len(),
            radius: trace.radius,
            v_re: trace.v.iter().map(|c| c.re).collect(),
            v_im: trace.v.iter().map(|c| c.im).collect(),
            sdvdn_re: trace.sigma_dvdn.iter().map(|c| c.re).collect(),
            sdvdn_im: trace.sigma_dvdn.iter().map(|c| c.im).collect(),
        }
    }

    pub fn trace(&self) -> Result<BoundaryTrace, QuadratureError> {
        let n = self.theta_count;
        if [&self.v_re, &self.v_im, &self.sdvdn_re, &self.sdvdn_im]
            .iter()
            .any(|a| a.len() != n)
        {
            return Err(QuadratureError::LengthMismatch);
        }
        let join = |re: &[f64], im: &[f64]| {
            re.iter()
                .zip(im)
                .map(|(a, b)| Complex64::new(*a, *b))
                .collect()
        };
        BoundaryTrace::new(
            self.radius,
            join(&self.v_re, &self.v_im),
            join(&self.sdvdn_re, &self.sdvdn_im),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, QuadratureError> {
        serde_json::from_str(text).map_err(|e| QuadratureError::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

/// Fourier coefficients `g_k` of real samples, with `g(θ_j) = Σ g_k e^{ikθ_j}`.
fn spectrum(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.iter_mut().for_each(|c| *c /= n as f64);
    buf
}

fn synthesize(mut coeffs: Vec<Complex64>) -> Vec<f64> {
    let n = coeffs.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut coeffs);
    coeffs.into_iter().map(|c| c.re).collect()
}

/// Signed wavenumber of FFT bin `k`; the Nyquist bin maps to `None`.
fn wavenumber(k: usize, n: usize) -> Option<f64> {
    match k.cmp(&(n / 2)) {
        std::cmp::Ordering::Less => Some(k as f64),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(k as f64 - n as f64),
    }
}

/// `d/dθ` of periodic samples.
fn angular_derivative(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    if n < SPECTRAL_MIN_NODES {
        let h = 2.0 * PI / n as f64;
        return (0..n)
            .map(|j| (samples[(j + 1) % n] - samples[(j + n - 1) % n]) / (2.0 * h))
            .collect();
    }
    let mut g = spectrum(samples);
    for (k, c) in g.iter_mut().enumerate() {
        *c = match wavenumber(k, n) {
            Some(w) => *c * Complex64::new(0.0, w),
            None => Complex64::new(0.0, 0.0),
        };
    }
    synthesize(g)
}

fn trapezoid(values: impl Iterator<Item = f64>, n: usize, radius: f64) -> f64 {
    values.sum::<f64>() * 2.0 * PI * radius / n as f64
}

fn check_conservation(trace: &BoundaryTrace, jn: &[Vec<f64>; 2]) -> Result<(), QuadratureError> {
    let n = trace.len();
    for part in jn {
        let net = trapezoid(part.iter().copied(), n, trace.radius);
        let scale = trapezoid(part.iter().map(|x| x.abs()), n, trace.radius);
        let tol = CONSERVATION_TOL * scale;
        if net.abs() > tol {
            return Err(QuadratureError::NonConservative { net, tol });
        }
    }
    Ok(())
}

/// Antiderivative in arc length of `J_l . n`, measured from node `start`.
pub fn stream_function_from(
    trace: &BoundaryTrace,
    l: usize,
    start: usize,
) -> Result<Vec<f64>, QuadratureError> {
    let jn = trace.normal_current();
    check_conservation(trace, &jn)?;
    let n = trace.len();
    let mut g = spectrum(&jn[l]);
    // Mean is removed: conservation makes it round-off, and keeping it
    // would break periodicity of the antiderivative.
    g[0] = Complex64::new(0.0, 0.0);
    for (k, c) in g.iter_mut().enumerate() {
        *c = match wavenumber(k, n) {
            Some(w) if w != 0.0 => *c * trace.radius / Complex64::new(0.0, w),
            _ => Complex64::new(0.0, 0.0),
        };
    }
    let phi = synthesize(g);
    let base = phi[start % n];
    Ok(phi.into_iter().map(|p| p - base).collect())
}

/// Stream function `Φ_l(θ) = ∫_{θ_0}^{θ} (J_l . n) ds` with `l` in `{0, 1}`
/// (real and imaginary parts), starting at node 0.
pub fn stream_function(trace: &BoundaryTrace, l: usize) -> Result<Vec<f64>, QuadratureError> {
    assert!(l < 2, "part index must be 0 or 1");
    stream_function_from(trace, l, 0)
}

/// `<J_1 . Rperp J_2>` using a stream function anchored at node `start`.
pub fn rotational_current_from(
    trace: &BoundaryTrace,
    start: usize,
) -> Result<f64, QuadratureError> {
    let jn = trace.normal_current();
    let phi = stream_function_from(trace, 1, start)?;
    let n = trace.len();
    Ok(-trapezoid(jn[0].iter().zip(&phi).map(|(a, b)| a * b), n, trace.radius) / trace.area())
}

/// All null-Lagrangian averages of a trace.
pub fn null_lagrangians(trace: &BoundaryTrace) -> Result<BoundaryMeasurement, QuadratureError> {
    let n = trace.len();
    let r = trace.radius;
    let area = trace.area();
    let jn = trace.normal_current();
    check_conservation(trace, &jn)?;
    let vp = trace.voltage_parts();
    let (cos, sin): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|j| trace.theta(j).sin_cos())
        .map(|(s, c)| (c, s))
        .unzip();
    let integ = |f: &dyn Fn(usize) -> f64| trapezoid((0..n).map(f), n, r) / area;

    let mut avg_e = [Vector2::zeros(); 2];
    let mut avg_j = [Vector2::zeros(); 2];
    let mut power = [[0.0; 2]; 2];
    for k in 0..2 {
        avg_e[k] = Vector2::new(
            -integ(&|j| vp[k][j] * cos[j]),
            -integ(&|j| vp[k][j] * sin[j]),
        );
        avg_j[k] = Vector2::new(
            integ(&|j| r * cos[j] * jn[k][j]),
            integ(&|j| r * sin[j] * jn[k][j]),
        );
    }
    for (k, row) in power.iter_mut().enumerate() {
        for (l, p) in row.iter_mut().enumerate() {
            *p = -integ(&|j| vp[k][j] * jn[l][j]);
        }
    }
    // ds = R dθ, so V_1 (dV_2/dt) ds = V_1 (dV_2/dθ) dθ.
    let dv2 = angular_derivative(&vp[1]);
    let rot_e =
        vp[0].iter().zip(&dv2).map(|(a, b)| a * b).sum::<f64>() * 2.0 * PI / n as f64 / area;
    let rot_j = rotational_current_from(trace, 0)?;
    Ok(BoundaryMeasurement {
        avg_e,
        avg_j,
        power,
        rot_e,
        rot_j,
        rot_available: true,
    })
}

/// Rejects a trace whose `<E>` matches a reference only after mirroring
/// `theta -> -theta`, the signature of clockwise sampling.
pub fn check_orientation(
    trace: &BoundaryTrace,
    reference_avg_e: &[Vector2<f64>; 2],
) -> Result<(), QuadratureError> {
    let m = null_lagrangians(trace)?;
    let mirror = |v: &Vector2<f64>| Vector2::new(v.x, -v.y);
    let direct: f64 = (0..2)
        .map(|k| (m.avg_e[k] - reference_avg_e[k]).norm())
        .sum();
    let flipped: f64 = (0..2)
        .map(|k| (mirror(&m.avg_e[k]) - reference_avg_e[k]).norm())
        .sum();
    if flipped < direct {
        Err(QuadratureError::Clockwise)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_field_trace(
        sigma: Complex64,
        u: [Complex64; 2],
        r: f64,
        n: usize,
    ) -> BoundaryTrace {
        let mut v = Vec::new();
        let mut f = Vec::new();
        for j in 0..n {
            let th = 2.0 * PI * j as f64 / n as f64;
            v.push(u[0] * r * th.cos() + u[1] * r * th.sin());
            f.push(sigma * (u[0] * th.cos() + u[1] * th.sin()));
        }
        BoundaryTrace::new(r, v, f).unwrap()
    }

    #[test]
    fn constant_field_averages() {
        let s = Complex64::new(2.0, -1.0);
        let u = [Complex64::new(1.0, 0.5), Complex64::new(-0.3, 2.0)];
        for n in [16, 32, 128] {
            let m = null_lagrangians(&constant_field_trace(s, u, 1.7, n)).unwrap();
            let e = [-u[0], -u[1]];
            let j = [-s * u[0], -s * u[1]];
            let expect = crate::measurement::composite_measurement(e, j);
            assert!((m.avg_e[0] - expect.avg_e[0]).norm() < 1e-13);
            assert!((m.avg_j[1] - expect.avg_j[1]).norm() < 1e-13);
            for k in 0..2 {
                for l in 0..2 {
                    assert!((m.power[k][l] - expect.power[k][l]).abs() < 1e-12);
                }
            }
            if n >= SPECTRAL_MIN_NODES {
                assert!((m.rot_e - expect.rot_e).abs() < 1e-12, "{n}");
            }
            assert!((m.rot_j - expect.rot_j).abs() < 1e-12, "{n}");
        }
    }

    #[test]
    fn central_difference_fallback_is_second_order() {
        let s = Complex64::new(2.0, -1.0);
        let u = [Complex64::new(1.0, 0.5), Complex64::new(-0.3, 2.0)];
        let exact = u[0].re * u[1].im - u[1].re * u[0].im;
        let err = |n| {
            (null_lagrangians(&constant_field_trace(s, u, 1.0, n))
                .unwrap()
                .rot_e
                - exact)
                .abs()
        };
        let (e16, e32) = (err(16), err(32));
        assert!(e32 < e16 / 3.5 && e16 < 0.1);
    }

    #[test]
    fn stream_function_of_uniform_current() {
        let c = 1.3;
        let r = 2.0;
        // J = c x-hat, so J . n = c cos θ and Φ = c R sin θ.
        let n = 64;
        let v = vec![Complex64::new(0.0, 0.0); n];
        let f: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(0.0, -c * (2.0 * PI * j as f64 / n as f64).cos()))
            .collect();
        let tr = BoundaryTrace::new(r, v, f).unwrap();
        let phi = stream_function(&tr, 1).unwrap();
        for (j, p) in phi.iter().enumerate() {
            assert!((p - c * r * tr.theta(j).sin()).abs() < 1e-13);
        }
        let zero = stream_function(&tr, 0).unwrap();
        assert!(zero.iter().all(|p| p.abs() < 1e-15));
    }

    #[test]
    fn non_conservative_rejected() {
        let n = 32;
        let v = vec![Complex64::new(0.0, 0.0); n];
        let f = vec![Complex64::new(1.0, 0.0); n];
        let tr = BoundaryTrace::new(1.0, v, f).unwrap();
        assert!(matches!(
            null_lagrangians(&tr),
            Err(QuadratureError::NonConservative { .. })
        ));
    }

    #[test]
    fn malformed_traces() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(
            BoundaryTrace::new(1.0, vec![z; 15], vec![z; 15]),
            Err(QuadratureError::InvalidNodeCount(15))
        );
        assert_eq!(
            BoundaryTrace::new(1.0, vec![z; 16], vec![z; 18]),
            Err(QuadratureError::LengthMismatch)
        );
        assert_eq!(
            BoundaryTrace::new(-1.0, vec![z; 16], vec![z; 16]),
            Err(QuadratureError::InvalidRadius(-1.0))
        );
    }

    #[test]
    fn reversal_flips_rotational_terms() {
        let s = Complex64::new(2.0, -1.0);
        let u = [Complex64::new(1.0, 0.5), Complex64::new(-0.3, 2.0)];
        let tr = constant_field_trace(s, u, 1.0, 128);
        let fwd = null_lagrangians(&tr).unwrap();
        let rev = null_lagrangians(&tr.reversed()).unwrap();
        assert!((fwd.rot_e + rev.rot_e).abs() < 1e-12);
        assert!((fwd.rot_j + rev.rot_j).abs() < 1e-12);
        for k in 0..2 {
            for l in 0..2 {
                assert!((fwd.power[k][l] - rev.power[k][l]).abs() < 1e-12);
            }
        }
        assert!(check_orientation(&tr, &fwd.avg_e).is_ok());
        assert_eq!(
            check_orientation(&tr.reversed(), &fwd.avg_e),
            Err(QuadratureError::Clockwise)
        );
    }

    #[test]
    fn document_round_trip() {
        let s = Complex64::new(2.0, -1.0);
        let u = [Complex64::new(1.0 / 3.0, 0.5), Complex64::new(-0.3, 2.0)];
        let tr = constant_field_trace(s, u, 1.0, 16);
        let doc = TraceDocument::new(&tr);
        let back = TraceDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back.trace().unwrap(), tr);
    }
}
