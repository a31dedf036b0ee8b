//! Bounding procedures on the phase-1 volume fraction.

mod ellipse;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, MeasurementError};
use crate::measurement::{DerivedConstants, RotStatus, REL_TOL};
use crate::scan::{scan, AdmissibleSet, PredicateTag, ScanOptions};

pub use ellipse::{
    ellipse_center, ellipse_pmax, ellipse_quadratic, f_star, intersection_verdict, mu_coefficients,
    s_matrices, s_matrix, tau, tau_root, verdict_domain, AdmissibilityVerdict, EllipseQuadratic,
    FeasibleRectangle, SMatrixPair, VerdictCase,
};
pub use oracle::{
    grid_psd_oracle, m_matrix, m_matrix_eigenvalues, m_matrix_psd_oracle, GridOracle,
};

/// Domains narrower than this are treated as a single test value.
const COLLAPSE_WIDTH: f64 = 1e-12;
/// Slack on the ordering `f_el <= f~_el <= f~_eu <= f_eu`.
const ORDER_SLACK: f64 = 1e-9;

/// `(f_el, f_eu)` from the per-phase field averages.
pub fn elementary_bounds(consts: &DerivedConstants) -> Result<(f64, f64), BoundsError> {
    for a in 0..2 {
        if !(consts.eta[a] > 0.0) {
            return Err(MeasurementError::EtaDegenerate {
                phase: a + 1,
                value: consts.eta[a],
            }
            .into());
        }
    }
    let lo = consts.phase[0].norm_sum() / consts.eta[0];
    let hi = 1.0 - consts.phase[1].norm_sum() / consts.eta[1];
    Ok((lo, hi))
}

/// Which of `v_+`, `v_-` attains the maximum quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
    /// Both quotients agree.
    Equal,
}

/// Selects the maximising branch without forming the quotients: `v_+` wins
/// iff `<E_1> . Rperp <E_2> >= r B_12`, where `r` is `f_el` for phase 1 and
/// `1 - f_eu` for phase 2.
pub fn branch_selector(
    consts: &DerivedConstants,
    phase: usize,
    bound: f64,
) -> Result<Branch, BoundsError> {
    let b = consts.b12.ok_or(BoundsError::MissingRotData)?[phase];
    let r = if phase == 0 { bound } else { 1.0 - bound };
    let c = consts.phase[phase].cross();
    let gap = c - r * b;
    let scale = c.abs() + (r * b).abs();
    Ok(if gap.abs() <= REL_TOL * scale {
        Branch::Equal
    } else if gap > 0.0 {
        Branch::Plus
    } else {
        Branch::Minus
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprovedBounds {
    pub f_tilde_el: f64,
    pub f_tilde_eu: f64,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    /// `<||v_+||^2>` vanishes, per phase.
    pub vplus_zero: [bool; 2],
    pub vminus_zero: [bool; 2],
    /// `[q_+, q_-]` per phase, `None` where the branch is degenerate.
    pub quotients: [[Option<f64>; 2]; 2],
}

/// Bounds from the rotated combinations `v_+- = E_1 +- Rperp E_2`.
pub fn improved_elementary_bounds(
    consts: &DerivedConstants,
    f_el: f64,
    f_eu: f64,
) -> Result<ImprovedBounds, BoundsError> {
    match consts.rot_status {
        RotStatus::NotMeasured => return Err(BoundsError::MissingRotData),
        RotStatus::EqualModuli => return Err(BoundsError::EqualModuli),
        RotStatus::Available => {}
    }
    let b = consts.b12.ok_or(BoundsError::MissingRotData)?;
    let mut quotients = [[None; 2]; 2];
    let mut vzero = [[false; 2]; 2];
    for a in 0..2 {
        let eta = consts.eta[a];
        let e = &consts.phase[a];
        let energy = [eta + 2.0 * b[a], eta - 2.0 * b[a]];
        let mean = [e.v_plus().norm_squared(), e.v_minus().norm_squared()];
        for s in 0..2 {
            if energy[s] <= REL_TOL * eta {
                vzero[a][s] = true;
            } else {
                quotients[a][s] = Some(mean[s] / energy[s]);
            }
        }
    }
    let max_min = |q: [Option<f64>; 2]| {
        let vals: Vec<f64> = q.iter().flatten().copied().collect();
        (
            vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            vals.iter().copied().reduce(f64::min),
        )
    };
    let (max1, min1) = max_min(quotients[0]);
    let (max2, min2) = max_min(quotients[1]);
    let degenerate = |a: usize| vzero[a][0] || vzero[a][1];
    let f_tilde_el = if degenerate(0) { f_el } else { max1 };
    let f_tilde_eu = if degenerate(1) { f_eu } else { 1.0 - max2 };
    let out = ImprovedBounds {
        f_tilde_el,
        f_tilde_eu,
        q1: min1,
        q2: min2.map(|m| 1.0 - m),
        vplus_zero: [vzero[0][0], vzero[1][0]],
        vminus_zero: [vzero[0][1], vzero[1][1]],
        quotients,
    };
    if f_el > f_tilde_el + ORDER_SLACK
        || f_tilde_el > f_tilde_eu + ORDER_SLACK
        || f_tilde_eu > f_eu + ORDER_SLACK
    {
        return Err(BoundsError::Ordering(format!(
            "f_el = {f_el}, f~_el = {f_tilde_el}, f~_eu = {f_tilde_eu}, f_eu = {f_eu}"
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Degeneracy {
    pub beta_zero: bool,
    pub eta_zero: [bool; 2],
    pub vplus_zero: [bool; 2],
    pub vminus_zero: [bool; 2],
    pub equal_moduli: bool,
    pub rot_missing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub f_el: f64,
    pub f_eu: f64,
    pub f_tilde_el: Option<f64>,
    pub f_tilde_eu: Option<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    pub branch: Option<[Branch; 2]>,
    pub set_a: AdmissibleSet,
    pub set_a_tilde: Option<AdmissibleSet>,
    pub degeneracy: Degeneracy,
}

/// Scans the admissibility predicate over `[lo, hi]`, collapsing to a single
/// evaluation when the domain is a point.
pub fn admissible_set(
    consts: &DerivedConstants,
    lo: f64,
    hi: f64,
    tilde: bool,
    opts: ScanOptions,
) -> Result<AdmissibleSet, BoundsError> {
    let tag = if tilde {
        PredicateTag::TildeEllipse
    } else {
        PredicateTag::Ellipse
    };
    if hi - lo <= COLLAPSE_WIDTH {
        if lo - hi > ORDER_SLACK {
            return Err(BoundsError::Ordering(format!("empty domain [{lo}, {hi}]")));
        }
        let mid = 0.5 * (lo + hi);
        let v = ellipse::verdict_unchecked(consts, mid, tilde)?;
        return Ok(AdmissibleSet::point(mid, v.admissible, tag, opts));
    }
    scan(
        lo,
        hi,
        |f| ellipse::verdict_unchecked(consts, f, tilde).map(|v| v.admissible),
        opts,
        tag,
    )
}

/// Runs every bounding procedure the data supports.
pub fn compute_bounds(
    consts: &DerivedConstants,
    opts: ScanOptions,
) -> Result<BoundsReport, BoundsError> {
    let (f_el, f_eu) = elementary_bounds(consts)?;
    if f_el > f_eu + ORDER_SLACK {
        return Err(BoundsError::Ordering(format!(
            "f_el = {f_el} > f_eu = {f_eu}"
        )));
    }
    let mut degeneracy = Degeneracy {
        equal_moduli: consts.rot_status == RotStatus::EqualModuli,
        rot_missing: consts.rot_status == RotStatus::NotMeasured,
        ..Default::default()
    };
    let set_a = admissible_set(consts, f_el, f_eu, false, opts)?;
    let mut report = BoundsReport {
        f_el,
        f_eu,
        f_tilde_el: None,
        f_tilde_eu: None,
        q1: None,
        q2: None,
        branch: None,
        set_a,
        set_a_tilde: None,
        degeneracy,
    };
    if consts.rot_status != RotStatus::Available {
        return Ok(report);
    }
    let imp = improved_elementary_bounds(consts, f_el, f_eu)?;
    degeneracy.vplus_zero = imp.vplus_zero;
    degeneracy.vminus_zero = imp.vminus_zero;
    report.degeneracy = degeneracy;
    report.f_tilde_el = Some(imp.f_tilde_el);
    report.f_tilde_eu = Some(imp.f_tilde_eu);
    report.q1 = imp.q1;
    report.q2 = imp.q2;
    report.branch = Some([
        branch_selector(consts, 0, f_el)?,
        branch_selector(consts, 1, f_eu)?,
    ]);
    report.set_a_tilde = Some(admissible_set(
        consts,
        imp.f_tilde_el,
        imp.f_tilde_eu,
        true,
        opts,
    )?);
    Ok(report)
}
