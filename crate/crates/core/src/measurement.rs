//! Measurement data model and the splitting-method algebra.
//!
//! A single boundary measurement, once reduced to averages, is thirteen real
//! numbers: the real and imaginary parts of `<E>` and `<J>`, the four powers
//! `<E_k . J_l>`, and in two dimensions the rotational averages
//! `<E_1 . Rperp E_2>` and `<J_1 . Rperp J_2>`. Together with the two phase
//! conductivities these determine every constant the bounds consume.
//!
//! Index conventions: `k, l, m` in `{0, 1}` stand for the real (0) and
//! imaginary (1) parts of a complex field; phases are indexed 0 and 1.

use nalgebra::Vector2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::MeasurementError;

/// Relative tolerance used for every exact-arithmetic "= 0" test.
pub const REL_TOL: f64 = 1e-9;

/// Clockwise quarter turn: `Rperp (a, b) = (b, -a)`.
pub fn rperp(v: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(v.y, -v.x)
}

/// `u . Rperp v`.
pub fn cross_rperp(u: &Vector2<f64>, v: &Vector2<f64>) -> f64 {
    u.x * v.y - u.y * v.x
}

/// The two complex phase conductivities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseConductivities {
    sigma: [Complex64; 2],
}

impl PhaseConductivities {
    /// Validates `Re > 0`, finiteness, and distinctness. `beta` is checked
    /// later by [`derive_constants`], which is where it matters.
    pub fn new(sigma1: Complex64, sigma2: Complex64) -> Result<Self, MeasurementError> {
        for (i, s) in [sigma1, sigma2].iter().enumerate() {
            if !(s.re.is_finite() && s.im.is_finite()) {
                return Err(MeasurementError::InvalidConductivity(format!(
                    "sigma{} = {s} is not finite",
                    i + 1
                )));
            }
            if s.re <= 0.0 {
                return Err(MeasurementError::InvalidConductivity(format!(
                    "sigma{} = {s} must have positive real part",
                    i + 1
                )));
            }
        }
        if sigma1 == sigma2 {
            return Err(MeasurementError::EqualConductivities);
        }
        Ok(Self {
            sigma: [sigma1, sigma2],
        })
    }

    pub fn sigma1(&self) -> Complex64 {
        self.sigma[0]
    }

    pub fn sigma2(&self) -> Complex64 {
        self.sigma[1]
    }

    /// Conductivity of phase `phase` (0 or 1).
    pub fn of(&self, phase: usize) -> Complex64 {
        self.sigma[phase]
    }

    pub fn beta(&self) -> f64 {
        let [s1, s2] = self.sigma;
        s1.re * s2.im - s1.im * s2.re
    }

    /// `|beta|` is compared against `REL_TOL |sigma1| |sigma2|`.
    pub fn beta_is_zero(&self) -> bool {
        self.beta().abs() <= REL_TOL * self.sigma[0].norm() * self.sigma[1].norm()
    }

    pub fn moduli_equal(&self) -> bool {
        let (m1, m2) = (self.sigma[0].norm_sqr(), self.sigma[1].norm_sqr());
        (m1 - m2).abs() <= REL_TOL * m1.max(m2)
    }
}

/// Boundary-derived averages of one measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMeasurement {
    /// `<E_1>`, `<E_2>` (real and imaginary parts of `<E>`).
    pub avg_e: [Vector2<f64>; 2],
    /// `<J_1>`, `<J_2>`.
    pub avg_j: [Vector2<f64>; 2],
    /// `power[k][l] = <E_k . J_l>`.
    pub power: [[f64; 2]; 2],
    /// `<E_1 . Rperp E_2>`.
    pub rot_e: f64,
    /// `<J_1 . Rperp J_2>`.
    pub rot_j: f64,
    /// False for 3-D data, where the rotational averages do not exist.
    pub rot_available: bool,
}

impl BoundaryMeasurement {
    /// `<E>` as a complex 2-vector.
    pub fn avg_e_complex(&self) -> [Complex64; 2] {
        to_complex(&self.avg_e)
    }

    pub fn avg_j_complex(&self) -> [Complex64; 2] {
        to_complex(&self.avg_j)
    }

    pub fn validate(&self) -> Result<(), MeasurementError> {
        let vecs = self.avg_e.iter().chain(self.avg_j.iter());
        if vecs.flat_map(|v| v.iter()).any(|x| !x.is_finite()) {
            return Err(MeasurementError::NonFinite("field averages"));
        }
        if self.power.iter().flatten().any(|x| !x.is_finite()) {
            return Err(MeasurementError::NonFinite("power"));
        }
        if self.rot_available && !(self.rot_e.is_finite() && self.rot_j.is_finite()) {
            return Err(MeasurementError::NonFinite("rotational averages"));
        }
        Ok(())
    }

    /// Largest absolute entry, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        let mut s = self
            .power
            .iter()
            .flatten()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        if self.rot_available {
            s = s.max(self.rot_e.abs()).max(self.rot_j.abs());
        }
        s
    }
}

fn to_complex(parts: &[Vector2<f64>; 2]) -> [Complex64; 2] {
    [
        Complex64::new(parts[0].x, parts[1].x),
        Complex64::new(parts[0].y, parts[1].y),
    ]
}

fn from_complex(v: &[Complex64; 2]) -> [Vector2<f64>; 2] {
    [
        Vector2::new(v[0].re, v[1].re),
        Vector2::new(v[0].im, v[1].im),
    ]
}

/// `<E_1^(a)>` and `<E_2^(a)>` for one phase, with the derived combinations
/// the bounds need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseAverages {
    pub e1: Vector2<f64>,
    pub e2: Vector2<f64>,
}

impl PhaseAverages {
    /// `||<E_1>||^2 + ||<E_2>||^2`.
    pub fn norm_sum(&self) -> f64 {
        self.e1.norm_squared() + self.e2.norm_squared()
    }

    /// `<E_1> . <E_2>`.
    pub fn dot(&self) -> f64 {
        self.e1.dot(&self.e2)
    }

    /// `<E_1> . Rperp <E_2>`.
    pub fn cross(&self) -> f64 {
        cross_rperp(&self.e1, &self.e2)
    }

    /// `<v_+> = <E_1> + Rperp <E_2>`.
    pub fn v_plus(&self) -> Vector2<f64> {
        self.e1 + rperp(&self.e2)
    }

    /// `<v_-> = <E_1> - Rperp <E_2>`.
    pub fn v_minus(&self) -> Vector2<f64> {
        self.e1 - rperp(&self.e2)
    }
}

/// Why the rotational constants are or are not present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotStatus {
    Available,
    NotMeasured,
    EqualModuli,
}

/// Constants derived from one measurement and the phase conductivities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub cond: PhaseConductivities,
    pub beta: f64,
    pub gamma: f64,
    pub psi: [f64; 2],
    pub xi: [f64; 2],
    pub eta: [f64; 2],
    /// `B_12^(a) = <E_1^(a) . Rperp E_2^(a)>`, when recoverable.
    pub b12: Option<[f64; 2]>,
    pub rot_status: RotStatus,
    pub phase: [PhaseAverages; 2],
    pub warnings: Vec<String>,
}

impl DerivedConstants {
    /// `|sigma^(a)|^2` for both phases.
    pub fn modulus_sqr(&self) -> [f64; 2] {
        [self.cond.sigma1().norm_sqr(), self.cond.sigma2().norm_sqr()]
    }

    /// `<||v_+||^2>` and `<||v_-||^2>` for a phase, i.e. `eta +- 2 B_12`.
    pub fn v_energy(&self, phase: usize) -> Option<[f64; 2]> {
        self.b12.map(|b| {
            [
                self.eta[phase] + 2.0 * b[phase],
                self.eta[phase] - 2.0 * b[phase],
            ]
        })
    }
}

/// Splits `<E>` into the per-phase averages `<E^(1)>`, `<E^(2)>`, returned as
/// `[phase][part]` real 2-vectors.
pub fn phase_field_averages(
    cond: &PhaseConductivities,
    meas: &BoundaryMeasurement,
) -> Result<[PhaseAverages; 2], MeasurementError> {
    let (s1, s2) = (cond.sigma1(), cond.sigma2());
    let denom = s2 - s1;
    if denom.norm() <= f64::EPSILON * s1.norm().max(s2.norm()) {
        return Err(MeasurementError::EqualConductivities);
    }
    let e = meas.avg_e_complex();
    let j = meas.avg_j_complex();
    let e_1 = [(s2 * e[0] - j[0]) / denom, (s2 * e[1] - j[1]) / denom];
    let e_2 = [(-s1 * e[0] + j[0]) / denom, (-s1 * e[1] + j[1]) / denom];
    let [a1, b1] = from_complex(&e_1);
    let [a2, b2] = from_complex(&e_2);
    Ok([
        PhaseAverages { e1: a1, e2: b1 },
        PhaseAverages { e1: a2, e2: b2 },
    ])
}

/// Evaluates the constants `beta, gamma, psi, xi, eta`, the per-phase field
/// averages, and `B_12` when the rotational data allows it.
pub fn derive_constants(
    cond: &PhaseConductivities,
    meas: &BoundaryMeasurement,
) -> Result<DerivedConstants, MeasurementError> {
    meas.validate()?;
    let beta = cond.beta();
    if cond.beta_is_zero() {
        return Err(MeasurementError::BetaZero(beta));
    }
    let (s1, s2) = (cond.sigma1(), cond.sigma2());
    let [[p11, p12], [p21, p22]] = meas.power;

    let gamma = (s1.re * s2.re + s1.im * s2.im) / beta;
    let psi = [s2.norm_sqr() / beta, s1.norm_sqr() / beta];
    let xi = [
        (s2.im * p12 + s2.re * p11) / beta,
        (s1.im * p12 + s1.re * p11) / beta,
    ];
    let eta = [
        (s2.re * (p21 - p12) + s2.im * (p11 + p22)) / beta,
        (s1.re * (p12 - p21) - s1.im * (p11 + p22)) / beta,
    ];
    let eta_scale = [
        (s2.re.abs() * (p21.abs() + p12.abs()) + s2.im.abs() * (p11.abs() + p22.abs()))
            / beta.abs(),
        (s1.re.abs() * (p21.abs() + p12.abs()) + s1.im.abs() * (p11.abs() + p22.abs()))
            / beta.abs(),
    ];
    for a in 0..2 {
        // Nonnegative for genuine data; anything at or below round-off means
        // the field vanishes in that phase (or the data is inconsistent).
        if eta[a] <= REL_TOL * eta_scale[a] {
            return Err(MeasurementError::EtaDegenerate {
                phase: a + 1,
                value: eta[a],
            });
        }
    }

    let phase = phase_field_averages(cond, meas)?;

    let mut warnings = Vec::new();
    let (b12, rot_status) = if !meas.rot_available {
        (None, RotStatus::NotMeasured)
    } else if cond.moduli_equal() {
        warnings.push(
            "|sigma1| = |sigma2|: B12 cannot be separated, improved bounds disabled".to_string(),
        );
        (None, RotStatus::EqualModuli)
    } else {
        let (m1, m2) = (s1.norm_sqr(), s2.norm_sqr());
        let d = m2 - m1;
        (
            Some([
                (m2 * meas.rot_e - meas.rot_j) / d,
                (-m1 * meas.rot_e + meas.rot_j) / d,
            ]),
            RotStatus::Available,
        )
    };

    Ok(DerivedConstants {
        cond: *cond,
        beta,
        gamma,
        psi,
        xi,
        eta,
        b12,
        rot_status,
        phase,
        warnings,
    })
}

/// Per-phase second moments `A_21^(1), A_21^(2), A_22^(1), A_22^(2)` that
/// solve the power system for free variables `x = A_11^(1)`, `y = A_11^(2)`.
pub fn reduced_system_solve(consts: &DerivedConstants, x: f64, y: f64) -> [f64; 4] {
    [
        -consts.gamma * x - consts.psi[0] * y + consts.xi[0],
        consts.psi[1] * x + consts.gamma * y - consts.xi[1],
        -x + consts.eta[0],
        -y + consts.eta[1],
    ]
}

/// Measurement of a periodic composite, where every null Lagrangian reduces
/// to a product of averages.
pub fn composite_measurement(avg_e: [Complex64; 2], avg_j: [Complex64; 2]) -> BoundaryMeasurement {
    let e = from_complex(&avg_e);
    let j = from_complex(&avg_j);
    let mut power = [[0.0; 2]; 2];
    for (k, row) in power.iter_mut().enumerate() {
        for (l, p) in row.iter_mut().enumerate() {
            *p = e[k].dot(&j[l]);
        }
    }
    BoundaryMeasurement {
        avg_e: e,
        avg_j: j,
        power,
        rot_e: cross_rperp(&e[0], &e[1]),
        rot_j: cross_rperp(&j[0], &j[1]),
        rot_available: true,
    }
}

/// On-disk JSON form of a measurement together with its conductivities.
///
/// `avgE` and `avgJ` are `[component][re, im]`; `power` is ordered
/// `E1J1, E1J2, E2J1, E2J2`. Omitting `rotE`/`rotJ` marks 3-D data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDocument {
    pub sigma1: [f64; 2],
    pub sigma2: [f64; 2],
    #[serde(rename = "avgE")]
    pub avg_e: [[f64; 2]; 2],
    #[serde(rename = "avgJ")]
    pub avg_j: [[f64; 2]; 2],
    pub power: [f64; 4],
    #[serde(rename = "rotE", default, skip_serializing_if = "Option::is_none")]
    pub rot_e: Option<f64>,
    #[serde(rename = "rotJ", default, skip_serializing_if = "Option::is_none")]
    pub rot_j: Option<f64>,
}

impl MeasurementDocument {
    pub fn new(cond: &PhaseConductivities, meas: &BoundaryMeasurement) -> Self {
        let e = meas.avg_e_complex();
        let j = meas.avg_j_complex();
        let [[p11, p12], [p21, p22]] = meas.power;
        Self {
            sigma1: [cond.sigma1().re, cond.sigma1().im],
            sigma2: [cond.sigma2().re, cond.sigma2().im],
            avg_e: [[e[0].re, e[0].im], [e[1].re, e[1].im]],
            avg_j: [[j[0].re, j[0].im], [j[1].re, j[1].im]],
            power: [p11, p12, p21, p22],
            rot_e: meas.rot_available.then_some(meas.rot_e),
            rot_j: meas.rot_available.then_some(meas.rot_j),
        }
    }

    pub fn conductivities(&self) -> Result<PhaseConductivities, MeasurementError> {
        PhaseConductivities::new(
            Complex64::new(self.sigma1[0], self.sigma1[1]),
            Complex64::new(self.sigma2[0], self.sigma2[1]),
        )
    }

    pub fn measurement(&self) -> Result<BoundaryMeasurement, MeasurementError> {
        let rot_available = match (self.rot_e, self.rot_j) {
            (Some(_), Some(_)) => true,
            (None, None) => false,
            _ => {
                return Err(MeasurementError::Format(
                    "rotE and rotJ must be given together".into(),
                ))
            }
        };
        let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
        let e = [c(self.avg_e[0]), c(self.avg_e[1])];
        let j = [c(self.avg_j[0]), c(self.avg_j[1])];
        let [p11, p12, p21, p22] = self.power;
        let meas = BoundaryMeasurement {
            avg_e: from_complex(&e),
            avg_j: from_complex(&j),
            power: [[p11, p12], [p21, p22]],
            rot_e: self.rot_e.unwrap_or(0.0),
            rot_j: self.rot_j.unwrap_or(0.0),
            rot_available,
        };
        meas.validate()?;
        Ok(meas)
    }

    pub fn from_json(text: &str) -> Result<Self, MeasurementError> {
        serde_json::from_str(text).map_err(|e| MeasurementError::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("measurement serializes")
    }
}
