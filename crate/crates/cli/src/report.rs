//! Structured report of one bounds run.

use serde::{Deserialize, Serialize};
use voltbound_core::bounds::{BoundsReport, Branch, Degeneracy};
use voltbound_core::measurement::{BoundaryMeasurement, DerivedConstants};
use voltbound_core::scan::{bounds_of, AdmissibleSet, SetBounds};

use crate::config::{Mode, SourceKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub mode: Mode,
    pub source: SourceKind,
    pub sigma1: [f64; 2],
    pub sigma2: [f64; 2],
    pub quadrature_n: Option<usize>,
    pub grid_n: usize,
    pub refine_tol: f64,
    /// Volume fraction of the generating geometry, when known.
    pub true_f: Option<f64>,
    pub measurement: BoundaryMeasurement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSection {
    pub f_el: f64,
    pub f_eu: f64,
    pub f_tilde_el: Option<f64>,
    pub f_tilde_eu: Option<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    pub branch: Option<[Branch; 2]>,
    pub ellipse: SetBounds,
    pub tilde_ellipse: Option<SetBounds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSets {
    pub ellipse: AdmissibleSet,
    pub tilde_ellipse: Option<AdmissibleSet>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub warnings: Vec<String>,
    pub transmission_residual: Option<f64>,
    /// Whether `true_f` lies in each reported set, up to `refine_tol`.
    pub true_f_in_ellipse: Option<bool>,
    pub true_f_in_tilde_ellipse: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub inputs: Inputs,
    pub constants: DerivedConstants,
    pub bounds: BoundsSection,
    pub admissible_sets: AdmissibleSets,
    pub degeneracy: Degeneracy,
    pub diagnostics: Diagnostics,
}

/// Membership that tolerates endpoint error up to `tol`.
pub fn contains_within(set: &AdmissibleSet, f: f64, tol: f64) -> bool {
    set.intervals
        .iter()
        .any(|i| i.lo - tol <= f && f <= i.hi + tol)
}

impl Report {
    pub(crate) fn assemble(
        inputs: Inputs,
        constants: DerivedConstants,
        b: BoundsReport,
        mut diagnostics: Diagnostics,
    ) -> Result<Self, voltbound_core::ScanError> {
        let ellipse = bounds_of(&b.set_a)?;
        let tilde_ellipse = b.set_a_tilde.as_ref().map(bounds_of).transpose()?;
        diagnostics
            .warnings
            .extend(constants.warnings.iter().cloned());
        if let Some(f) = inputs.true_f {
            let tol = inputs.refine_tol;
            diagnostics.true_f_in_ellipse = Some(contains_within(&b.set_a, f, tol));
            diagnostics.true_f_in_tilde_ellipse =
                b.set_a_tilde.as_ref().map(|s| contains_within(s, f, tol));
        }
        Ok(Self {
            inputs,
            constants,
            bounds: BoundsSection {
                f_el: b.f_el,
                f_eu: b.f_eu,
                f_tilde_el: b.f_tilde_el,
                f_tilde_eu: b.f_tilde_eu,
                q1: b.q1,
                q2: b.q2,
                branch: b.branch,
                ellipse,
                tilde_ellipse,
            },
            admissible_sets: AdmissibleSets {
                ellipse: b.set_a,
                tilde_ellipse: b.set_a_tilde,
            },
            degeneracy: b.degeneracy,
            diagnostics,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
