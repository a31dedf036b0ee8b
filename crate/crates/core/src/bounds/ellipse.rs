use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::{elementary_bounds, improved_elementary_bounds};
use crate::error::BoundsError;
use crate::measurement::{DerivedConstants, REL_TOL};

/// Relative size of `p_max` below which a disk counts as a single point.
/// Much tighter than `REL_TOL`: small but genuine disks must go through the
/// intersection test.
const POINT_TOL: f64 = 1e-13;

/// Affine function `c + cx x + cy y`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Affine {
    c: f64,
    cx: f64,
    cy: f64,
}

impl Affine {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.c + self.cx * x + self.cy * y
    }

    /// Coefficients of the product as `[a1, a2, a3, a4, a5, a6]` for
    /// `a1 x^2 + 2 a2 xy + a3 y^2 + 2 a4 x + 2 a5 y + a6`.
    fn product(&self, o: &Affine) -> [f64; 6] {
        [
            self.cx * o.cx,
            0.5 * (self.cx * o.cy + self.cy * o.cx),
            self.cy * o.cy,
            0.5 * (self.c * o.cx + self.cx * o.c),
            0.5 * (self.c * o.cy + self.cy * o.c),
            self.c * o.c,
        ]
    }
}

/// `f_*`: `f` for phase 1, `1 - f` for phase 2.
pub fn f_star(f: f64, phase: usize) -> f64 {
    if phase == 0 {
        f
    } else {
        1.0 - f
    }
}

/// Entries `(S_11, S_12, S_22)` of `S_f` for a phase as affine functions of
/// `(x, y) = (A_11^(1), A_11^(2))`.
fn s_entries(consts: &DerivedConstants, f: f64, phase: usize) -> [Affine; 3] {
    let fs = f_star(f, phase);
    let e = &consts.phase[phase];
    let (n1, n2, d) = (
        e.e1.norm_squared() / fs,
        e.e2.norm_squared() / fs,
        e.dot() / fs,
    );
    let (g, psi, xi, eta) = (consts.gamma, consts.psi, consts.xi, consts.eta);
    if phase == 0 {
        [
            Affine {
                c: -n1,
                cx: 1.0,
                cy: 0.0,
            },
            Affine {
                c: xi[0] - d,
                cx: -g,
                cy: -psi[0],
            },
            Affine {
                c: eta[0] - n2,
                cx: -1.0,
                cy: 0.0,
            },
        ]
    } else {
        [
            Affine {
                c: -n1,
                cx: 0.0,
                cy: 1.0,
            },
            Affine {
                c: -xi[1] - d,
                cx: psi[1],
                cy: g,
            },
            Affine {
                c: eta[1] - n2,
                cx: 0.0,
                cy: -1.0,
            },
        ]
    }
}

/// The two symmetric matrices `S_f^(1)(x, y)`, `S_f^(2)(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrixPair {
    pub s1: Matrix2<f64>,
    pub s2: Matrix2<f64>,
}

impl SMatrixPair {
    pub fn get(&self, phase: usize) -> &Matrix2<f64> {
        if phase == 0 {
            &self.s1
        } else {
            &self.s2
        }
    }
}

pub fn s_matrix(consts: &DerivedConstants, f: f64, x: f64, y: f64, phase: usize) -> Matrix2<f64> {
    let [u, v, w] = s_entries(consts, f, phase);
    let off = v.eval(x, y);
    Matrix2::new(u.eval(x, y), off, off, w.eval(x, y))
}

pub fn s_matrices(consts: &DerivedConstants, f: f64, x: f64, y: f64) -> SMatrixPair {
    SMatrixPair {
        s1: s_matrix(consts, f, x, y, 0),
        s2: s_matrix(consts, f, x, y, 1),
    }
}

/// `tau_f = [B_12 - <E_1> . Rperp <E_2> / f_*]^2`.
pub fn tau(consts: &DerivedConstants, f: f64, phase: usize) -> Result<f64, BoundsError> {
    Ok(tau_root(consts, f, phase)?.powi(2))
}

/// Signed square root of `tau_f` used for the antisymmetric block of `M`.
pub fn tau_root(consts: &DerivedConstants, f: f64, phase: usize) -> Result<f64, BoundsError> {
    let b = consts.b12.ok_or(BoundsError::MissingRotData)?;
    Ok(b[phase] - consts.phase[phase].cross() / f_star(f, phase))
}

/// `p(x, y) = a1 x^2 + 2 a2 xy + a3 y^2 + 2 a4 x + 2 a5 y + a6`, a concave
/// quadratic whose superlevel set `{p >= 0}` is an elliptic disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseQuadratic {
    /// `[a1, ..., a6]`, with `a6` already reduced by `tilde_shift`.
    pub a: [f64; 6],
    pub tilde_shift: f64,
    /// Maximum of `p`, from the closed form rather than from the
    /// coefficients, which lose accuracy to cancellation near collapse.
    pub p_max: f64,
}

impl EllipseQuadratic {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let [a1, a2, a3, a4, a5, a6] = self.a;
        a1 * x * x + 2.0 * a2 * x * y + a3 * y * y + 2.0 * a4 * x + 2.0 * a5 * y + a6
    }

    /// Sum of term magnitudes at a point; scales the tolerance of sign tests.
    pub fn magnitude(&self, x: f64, y: f64) -> f64 {
        let [a1, a2, a3, a4, a5, a6] = self.a.map(f64::abs);
        a1 * x * x
            + 2.0 * a2 * (x * y).abs()
            + a3 * y * y
            + 2.0 * a4 * x.abs()
            + 2.0 * a5 * y.abs()
            + a6
            + self.tilde_shift
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let [a1, a2, a3, a4, a5, _] = self.a;
        [2.0 * (a1 * x + a2 * y + a4), 2.0 * (a2 * x + a3 * y + a5)]
    }

    /// `a1 a3 - a2^2`.
    pub fn discriminant(&self) -> f64 {
        self.a[0] * self.a[2] - self.a[1] * self.a[1]
    }

    pub fn center(&self) -> (f64, f64) {
        let [a1, a2, a3, a4, a5, _] = self.a;
        let d = self.discriminant();
        ((a2 * a5 - a3 * a4) / d, (a2 * a4 - a1 * a5) / d)
    }

    pub fn max_value(&self) -> f64 {
        self.p_max
    }

    /// Whether the disk has collapsed to (at most) its center.
    pub fn is_point(&self) -> bool {
        let (x, y) = self.center();
        self.max_value() <= POINT_TOL * self.magnitude(x, y)
    }

    /// Half-widths of the bounding box of `{p >= 0}` along x and y.
    fn half_widths(&self) -> (f64, f64) {
        let pm = self.max_value().max(0.0);
        let d = self.discriminant();
        ((pm * -self.a[2] / d).sqrt(), (pm * -self.a[0] / d).sqrt())
    }

    pub fn x_extent(&self) -> (f64, f64) {
        let (cx, _) = self.center();
        let (hx, _) = self.half_widths();
        (cx - hx, cx + hx)
    }

    pub fn y_extent(&self) -> (f64, f64) {
        let (_, cy) = self.center();
        let (_, hy) = self.half_widths();
        (cy - hy, cy + hy)
    }

    /// `n` points on the curve `p = 0`, or the center repeated when the disk
    /// is a point or empty.
    pub fn boundary_points(&self, n: usize) -> Vec<(f64, f64)> {
        let (cx, cy) = self.center();
        let pm = self.max_value();
        if pm <= 0.0 {
            return vec![(cx, cy); n];
        }
        // p(c + d) = pm + d^T H d with H = [[a1, a2], [a2, a3]] negative definite.
        let h = -Matrix2::new(self.a[0], self.a[1], self.a[1], self.a[2]);
        let eig = h.symmetric_eigen();
        (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                let d = eig.eigenvectors.column(0) * (pm / eig.eigenvalues[0]).sqrt() * t.cos()
                    + eig.eigenvectors.column(1) * (pm / eig.eigenvalues[1]).sqrt() * t.sin();
                (cx + d[0], cy + d[1])
            })
            .collect()
    }
}

/// `p_f^(a) = det S_f^(a)`, optionally shifted by `tau_f^(a)`.
pub fn ellipse_quadratic(
    consts: &DerivedConstants,
    f: f64,
    phase: usize,
    tilde: bool,
) -> Result<EllipseQuadratic, BoundsError> {
    let [u, v, w] = s_entries(consts, f, phase);
    let uw = u.product(&w);
    let vv = v.product(&v);
    let mut a = [0.0; 6];
    for k in 0..6 {
        a[k] = uw[k] - vv[k];
    }
    let shift = if tilde { tau(consts, f, phase)? } else { 0.0 };
    a[5] -= shift;
    Ok(EllipseQuadratic {
        a,
        tilde_shift: shift,
        p_max: ellipse_pmax(consts, f, phase, tilde)?,
    })
}

pub fn ellipse_center(q: &EllipseQuadratic) -> (f64, f64) {
    q.center()
}

/// Closed-form maximum of `p_f^(a)` (or of the tilde quadratic).
pub fn ellipse_pmax(
    consts: &DerivedConstants,
    f: f64,
    phase: usize,
    tilde: bool,
) -> Result<f64, BoundsError> {
    let fs = f_star(f, phase);
    let e = &consts.phase[phase];
    let eta = consts.eta[phase];
    if !tilde {
        return Ok((eta * fs - e.norm_sum()).powi(2) / (4.0 * fs * fs));
    }
    let b = consts.b12.ok_or(BoundsError::MissingRotData)?[phase];
    let plus = (eta + 2.0 * b) * fs - e.v_plus().norm_squared();
    let minus = (eta - 2.0 * b) * fs - e.v_minus().norm_squared();
    Ok(plus * minus / (4.0 * fs * fs))
}

/// Axis-aligned rectangle of `(x, y)` allowed by the diagonal entries of
/// both `S` matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibleRectangle {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl FeasibleRectangle {
    pub fn new(consts: &DerivedConstants, f: f64) -> Self {
        let p1 = &consts.phase[0];
        let p2 = &consts.phase[1];
        let g = 1.0 - f;
        Self {
            x_lo: p1.e1.norm_squared() / f,
            x_hi: consts.eta[0] - p1.e2.norm_squared() / f,
            y_lo: p2.e1.norm_squared() / g,
            y_hi: consts.eta[1] - p2.e2.norm_squared() / g,
        }
    }

    pub fn is_nonempty(&self) -> bool {
        self.x_lo <= self.x_hi && self.y_lo <= self.y_hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictCase {
    /// The two boundary curves meet.
    DeltaNonneg,
    Disjoint,
    E1InsideE2,
    E2InsideE1,
    BothCentersInside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityVerdict {
    pub f: f64,
    pub delta: f64,
    pub p1_at_r2: f64,
    pub p2_at_r1: f64,
    pub centers: [(f64, f64); 2],
    pub admissible: bool,
    pub case: VerdictCase,
}

/// `mu_1..mu_6` of `|s1|^2 p^(1) - |s2|^2 p^(2)` and their magnitude scale.
fn line_coefficients(consts: &DerivedConstants, q: &[EllipseQuadratic; 2]) -> ([f64; 6], f64) {
    let w = consts.modulus_sqr();
    let mut mu = [0.0; 6];
    let mut scale = 0.0f64;
    for k in 0..6 {
        let factor = if matches!(k, 1 | 3 | 4) { 2.0 } else { 1.0 };
        let (t1, t2) = (w[0] * q[0].a[k], w[1] * q[1].a[k]);
        mu[k] = factor * (t1 - t2);
        scale = scale.max(factor * t1.abs()).max(factor * t2.abs());
    }
    (mu, scale)
}

/// `mu_1..mu_6` at a test value, with the magnitude used to judge
/// cancellation of `mu_1..mu_3`.
pub fn mu_coefficients(
    consts: &DerivedConstants,
    f: f64,
    tilde: bool,
) -> Result<([f64; 6], f64), BoundsError> {
    let q = [
        ellipse_quadratic(consts, f, 0, tilde)?,
        ellipse_quadratic(consts, f, 1, tilde)?,
    ];
    Ok(line_coefficients(consts, &q))
}

/// `p^(1)` restricted to the line `mu4 x + mu5 y + mu6 = 0`.
struct LineRestriction {
    /// Quadratic in the line parameter, scaled by `lead^2`.
    n: [f64; 3],
    /// `mu5`, or `mu4` when the line is vertical and `y` is the parameter.
    lead: f64,
    swapped: bool,
}

impl LineRestriction {
    /// Point of the line where the restriction peaks.
    fn peak(&self, mu: &[f64; 6]) -> (f64, f64) {
        let t = -self.n[1] / (2.0 * self.n[0]);
        if self.swapped {
            (-(mu[4] * t + mu[5]) / mu[3], t)
        } else {
            (t, -(mu[3] * t + mu[5]) / mu[4])
        }
    }
}

fn line_restriction(q: &EllipseQuadratic, mu: &[f64; 6], mu_scale: f64) -> Option<LineRestriction> {
    let [a1, a2, a3, a4, a5, a6] = q.a;
    let (m4, m5, m6) = (mu[3], mu[4], mu[5]);
    let tol = REL_TOL * mu_scale;
    if m5.abs() > tol {
        Some(LineRestriction {
            n: [
                a1 * m5 * m5 - 2.0 * a2 * m4 * m5 + a3 * m4 * m4,
                2.0 * (-a2 * m5 * m6 + a3 * m4 * m6 + a4 * m5 * m5 - a5 * m4 * m5),
                a3 * m6 * m6 - 2.0 * a5 * m5 * m6 + a6 * m5 * m5,
            ],
            lead: m5,
            swapped: false,
        })
    } else if m4.abs() > tol {
        // x = -(mu5 y + mu6)/mu4: swap the roles of x and y.
        Some(LineRestriction {
            n: [
                a3 * m4 * m4 - 2.0 * a2 * m5 * m4 + a1 * m5 * m5,
                2.0 * (-a2 * m4 * m6 + a1 * m5 * m6 + a5 * m4 * m4 - a4 * m5 * m4),
                a1 * m6 * m6 - 2.0 * a4 * m4 * m6 + a6 * m4 * m4,
            ],
            lead: m4,
            swapped: true,
        })
    } else {
        None
    }
}

/// Domain of test values on which a verdict is defined.
pub fn verdict_domain(consts: &DerivedConstants, tilde: bool) -> Result<(f64, f64), BoundsError> {
    let (lo, hi) = elementary_bounds(consts)?;
    if !tilde {
        return Ok((lo, hi));
    }
    let imp = improved_elementary_bounds(consts, lo, hi)?;
    Ok((imp.f_tilde_el, imp.f_tilde_eu))
}

/// Slack allowed when checking that a test value lies in its domain.
const DOMAIN_SLACK: f64 = 1e-9;

/// Decides whether the two (tilde-)elliptic disks intersect at `f`.
pub fn intersection_verdict(
    consts: &DerivedConstants,
    f: f64,
    tilde: bool,
) -> Result<AdmissibilityVerdict, BoundsError> {
    let (lo, hi) = verdict_domain(consts, tilde)?;
    if !(f > 0.0 && f < 1.0) || f < lo - DOMAIN_SLACK || f > hi + DOMAIN_SLACK {
        return Err(BoundsError::OutOfDomain { f, lo, hi });
    }
    verdict_unchecked(consts, f, tilde)
}

pub(crate) fn verdict_unchecked(
    consts: &DerivedConstants,
    f: f64,
    tilde: bool,
) -> Result<AdmissibilityVerdict, BoundsError> {
    let q = [
        ellipse_quadratic(consts, f, 0, tilde)?,
        ellipse_quadratic(consts, f, 1, tilde)?,
    ];
    let (mu, mu_scale) = line_coefficients(consts, &q);
    if mu[..3].iter().any(|m| m.abs() > REL_TOL * mu_scale) {
        return Err(BoundsError::QuadraticCancellation([mu[0], mu[1], mu[2]]));
    }
    let r1 = q[0].center();
    let r2 = q[1].center();
    let p1_at_r2 = q[0].eval(r2.0, r2.1);
    let p2_at_r1 = q[1].eval(r1.0, r1.1);
    let inside =
        |p: f64, qq: &EllipseQuadratic, at: (f64, f64)| p >= -REL_TOL * qq.magnitude(at.0, at.1);
    let r2_in_1 = inside(p1_at_r2, &q[0], r2);
    let r1_in_2 = inside(p2_at_r1, &q[1], r1);

    let restriction = line_restriction(&q[0], &mu, mu_scale);
    let (delta, delta_tol) = match restriction {
        Some(line) => {
            let [n1, n2, n3] = line.n;
            if n1.abs() <= REL_TOL * (n2.abs() + n3.abs()) {
                // Linear restriction: a real root exists iff n2 != 0.
                (n2 * n2, 0.0)
            } else {
                // Delta = -4 n1 lead^2 p^(1)(peak). Evaluating p^(1) at the
                // peak avoids the cancellation in n2^2 - 4 n1 n3.
                let (x, y) = line.peak(&mu);
                let w = -4.0 * n1 * line.lead * line.lead;
                (w * q[0].eval(x, y), w * REL_TOL * q[0].magnitude(x, y))
            }
        }
        // Degenerate line: coincident curves if mu6 = 0, otherwise none meet.
        None if mu[5].abs() <= REL_TOL * mu_scale => (0.0, 0.0),
        None => (-mu[5] * mu[5], 0.0),
    };

    let containment = || match (r2_in_1, r1_in_2) {
        (true, true) => VerdictCase::BothCentersInside,
        (true, false) => VerdictCase::E2InsideE1,
        (false, true) => VerdictCase::E1InsideE2,
        (false, false) => VerdictCase::Disjoint,
    };
    let point = [q[0].is_point(), q[1].is_point()];
    let case = if delta >= -delta_tol {
        VerdictCase::DeltaNonneg
    } else if point[0] || point[1] {
        // A collapsed disk meets the other one iff its center lies inside.
        match (point[0] && r1_in_2, point[1] && r2_in_1) {
            (true, true) => VerdictCase::BothCentersInside,
            (true, false) => VerdictCase::E1InsideE2,
            (false, true) => VerdictCase::E2InsideE1,
            (false, false) => VerdictCase::Disjoint,
        }
    } else {
        containment()
    };
    Ok(AdmissibilityVerdict {
        f,
        delta,
        p1_at_r2,
        p2_at_r1,
        centers: [r1, r2],
        admissible: case != VerdictCase::Disjoint,
        case,
    })
}
