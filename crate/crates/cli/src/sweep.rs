//! Bounds over a family of annuli with varying phase-1 fraction.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{complex, LayeredSpec, Mode, RunConfig, SigmaPair, SweepSpec};
use crate::report::contains_within;
use crate::{run_pipeline, CliError};

/// Raw bounds of one sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub pair: usize,
    pub sigma1: [f64; 2],
    pub sigma2: [f64; 2],
    pub f1: f64,
    pub r2: f64,
    pub f_el: f64,
    pub f_eu: f64,
    pub f_tilde_el: f64,
    pub f_tilde_eu: f64,
    pub inf_a: f64,
    pub sup_a: f64,
    pub inf_a_tilde: f64,
    pub sup_a_tilde: f64,
    pub f1_in_a: bool,
    pub f1_in_a_tilde: bool,
}

impl SweepRow {
    /// `f_el <= f~_el <= f1 <= f~_eu <= f_eu`, with slack `tol`.
    pub fn ordered(&self, tol: f64) -> bool {
        let chain = [
            self.f_el,
            self.f_tilde_el,
            self.f1,
            self.f_tilde_eu,
            self.f_eu,
        ];
        chain.windows(2).all(|w| w[0] <= w[1] + tol)
    }
}

/// Row as written to CSV, every bound divided by `f1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct NormalizedRow {
    pair: usize,
    sigma1_re: f64,
    sigma1_im: f64,
    sigma2_re: f64,
    sigma2_im: f64,
    f1: f64,
    f_el_over_f1: f64,
    f_eu_over_f1: f64,
    f_tilde_el_over_f1: f64,
    f_tilde_eu_over_f1: f64,
    inf_a_over_f1: f64,
    sup_a_over_f1: f64,
    inf_a_tilde_over_f1: f64,
    sup_a_tilde_over_f1: f64,
}

impl From<&SweepRow> for NormalizedRow {
    fn from(r: &SweepRow) -> Self {
        let n = |v: f64| v / r.f1;
        Self {
            pair: r.pair,
            sigma1_re: r.sigma1[0],
            sigma1_im: r.sigma1[1],
            sigma2_re: r.sigma2[0],
            sigma2_im: r.sigma2[1],
            f1: r.f1,
            f_el_over_f1: n(r.f_el),
            f_eu_over_f1: n(r.f_eu),
            f_tilde_el_over_f1: n(r.f_tilde_el),
            f_tilde_eu_over_f1: n(r.f_tilde_eu),
            inf_a_over_f1: n(r.inf_a),
            sup_a_over_f1: n(r.sup_a),
            inf_a_tilde_over_f1: n(r.inf_a_tilde),
            sup_a_tilde_over_f1: n(r.sup_a_tilde),
        }
    }
}

/// Middle radius putting a fraction `f` of the disk of radius `r3` in the
/// core of radius `r1` plus the outer ring.
pub fn middle_radius(r1: f64, r3: f64, f: f64) -> f64 {
    (r1 * r1 + r3 * r3 * (1.0 - f)).sqrt()
}

fn row_config(base: &RunConfig, spec: &SweepSpec, pair: &SigmaPair, f: f64) -> (RunConfig, f64) {
    let r2 = middle_radius(spec.r1, spec.r3, f);
    let cfg = RunConfig {
        mode: Some(Mode::Pipeline),
        sigma1: Some(pair.sigma1),
        sigma2: Some(pair.sigma2),
        layered: Some(LayeredSpec {
            radii: vec![spec.r1, r2, spec.r3],
            layer_phase: vec![1, 2, 1],
            affine_u: Some(spec.affine_u),
            bc_modes: Vec::new(),
        }),
        emit_curves: false,
        sweep: None,
        ..base.clone()
    };
    (cfg, r2)
}

pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate(Mode::Sweep)?;
    let spec = cfg.sweep.as_ref().expect("validated");
    let jobs: Vec<(usize, f64)> = (0..spec.pairs.len())
        .flat_map(|p| spec.targets().into_iter().map(move |f| (p, f)))
        .collect();
    jobs.par_iter()
        .map(|&(p, f)| {
            let pair = &spec.pairs[p];
            let (row_cfg, r2) = row_config(cfg, spec, pair, f);
            let rep = run_pipeline(&row_cfg)?;
            let f1 = rep
                .inputs
                .true_f
                .expect("layered source has a volume fraction");
            let tilde = rep.admissible_sets.tilde_ellipse.as_ref();
            let tb = rep.bounds.tilde_ellipse.ok_or_else(|| {
                CliError::Degenerate(format!(
                    "improved bounds unavailable for sigma1 = {}, sigma2 = {}",
                    complex(pair.sigma1),
                    complex(pair.sigma2)
                ))
            })?;
            Ok(SweepRow {
                pair: p,
                sigma1: pair.sigma1,
                sigma2: pair.sigma2,
                f1,
                r2,
                f_el: rep.bounds.f_el,
                f_eu: rep.bounds.f_eu,
                f_tilde_el: rep.bounds.f_tilde_el.expect("present with tilde set"),
                f_tilde_eu: rep.bounds.f_tilde_eu.expect("present with tilde set"),
                inf_a: rep.bounds.ellipse.inf,
                sup_a: rep.bounds.ellipse.sup,
                inf_a_tilde: tb.inf,
                sup_a_tilde: tb.sup,
                f1_in_a: contains_within(&rep.admissible_sets.ellipse, f1, cfg.refine_tol),
                f1_in_a_tilde: tilde.is_some_and(|s| contains_within(s, f1, cfg.refine_tol)),
            })
        })
        .collect()
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(NormalizedRow::from(r)).map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
