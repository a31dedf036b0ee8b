//! Plot-ready CSV curves of the bounding quantities against the test value.

use std::path::{Path, PathBuf};

use serde::Serialize;
use voltbound_core::bounds::{
    ellipse_pmax, ellipse_quadratic, intersection_verdict, FeasibleRectangle,
};
use voltbound_core::measurement::{DerivedConstants, RotStatus};
use voltbound_core::BoundsError;

use crate::report::Report;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectangleRow {
    pub f: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerdictRow {
    pub f: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub p1_at_r2: f64,
    pub p2_at_r1: f64,
    pub admissible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PmaxRow {
    pub f: f64,
    pub p1_max: f64,
    pub p2_max: f64,
    pub p1_tilde_max: f64,
    pub p2_tilde_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryRow {
    pub f: f64,
    pub phase: u8,
    pub tilde: bool,
    pub k: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Curves {
    pub rectangle: Vec<RectangleRow>,
    pub ellipse_verdict: Vec<VerdictRow>,
    pub tilde_pmax: Vec<PmaxRow>,
    pub tilde_verdict: Vec<VerdictRow>,
    pub ellipse_boundaries: Vec<BoundaryRow>,
}

const BOUNDARY_SAMPLES: usize = 200;

fn samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn verdict_rows(
    consts: &DerivedConstants,
    lo: f64,
    hi: f64,
    n: usize,
    tilde: bool,
) -> Result<Vec<VerdictRow>, BoundsError> {
    samples(lo, hi, n)
        .into_iter()
        .map(|f| {
            let v = intersection_verdict(consts, f, tilde)?;
            Ok(VerdictRow {
                f,
                delta: v.delta,
                p1_at_r2: v.p1_at_r2,
                p2_at_r1: v.p2_at_r1,
                admissible: v.admissible,
            })
        })
        .collect()
}

/// Samples every curve over the relevant domains of `report`.
pub fn compute_curves(
    consts: &DerivedConstants,
    report: &Report,
    n: usize,
    f_values: &[f64],
) -> Result<Curves, BoundsError> {
    let b = &report.bounds;
    let mut out = Curves {
        rectangle: samples(b.f_el, b.f_eu, n)
            .into_iter()
            .map(|f| {
                let r = FeasibleRectangle::new(consts, f);
                RectangleRow {
                    f,
                    x_lo: r.x_lo,
                    x_hi: r.x_hi,
                    y_lo: r.y_lo,
                    y_hi: r.y_hi,
                }
            })
            .collect(),
        ellipse_verdict: if b.f_eu > b.f_el {
            verdict_rows(consts, b.f_el, b.f_eu, n, false)?
        } else {
            Vec::new()
        },
        ..Default::default()
    };
    let rot = consts.rot_status == RotStatus::Available;
    if rot {
        out.tilde_pmax = samples(b.f_el, b.f_eu, n)
            .into_iter()
            .map(|f| {
                Ok(PmaxRow {
                    f,
                    p1_max: ellipse_pmax(consts, f, 0, false)?,
                    p2_max: ellipse_pmax(consts, f, 1, false)?,
                    p1_tilde_max: ellipse_pmax(consts, f, 0, true)?,
                    p2_tilde_max: ellipse_pmax(consts, f, 1, true)?,
                })
            })
            .collect::<Result<_, BoundsError>>()?;
        if let (Some(lo), Some(hi)) = (b.f_tilde_el, b.f_tilde_eu) {
            if hi > lo {
                out.tilde_verdict = verdict_rows(consts, lo, hi, n, true)?;
            }
        }
    }
    let defaults;
    let fs = if f_values.is_empty() {
        defaults = samples(b.f_el, b.f_eu, 5);
        &defaults[..]
    } else {
        f_values
    };
    for &f in fs {
        for tilde in [false, true] {
            if tilde && !rot {
                continue;
            }
            for phase in 0..2 {
                let q = ellipse_quadratic(consts, f, phase, tilde)?;
                let pts = q.boundary_points(BOUNDARY_SAMPLES);
                out.ellipse_boundaries
                    .extend(pts.into_iter().enumerate().map(|(k, (x, y))| BoundaryRow {
                        f,
                        phase: phase as u8 + 1,
                        tilde,
                        k,
                        x,
                        y,
                    }));
            }
        }
    }
    Ok(out)
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes every nonempty curve as `<name>.csv` under `dir`.
pub fn write_curves(curves: &Curves, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let mut emit = |name: &str, f: &dyn Fn(&Path) -> Result<(), CliError>, empty: bool| {
        if empty {
            return Ok::<(), CliError>(());
        }
        let p = dir.join(format!("{name}.csv"));
        f(&p)?;
        written.push(p);
        Ok(())
    };
    emit(
        "rectangle",
        &|p| write_rows(p, &curves.rectangle),
        curves.rectangle.is_empty(),
    )?;
    emit(
        "ellipse_verdict",
        &|p| write_rows(p, &curves.ellipse_verdict),
        curves.ellipse_verdict.is_empty(),
    )?;
    emit(
        "tilde_pmax",
        &|p| write_rows(p, &curves.tilde_pmax),
        curves.tilde_pmax.is_empty(),
    )?;
    emit(
        "tilde_verdict",
        &|p| write_rows(p, &curves.tilde_verdict),
        curves.tilde_verdict.is_empty(),
    )?;
    emit(
        "ellipse_boundaries",
        &|p| write_rows(p, &curves.ellipse_boundaries),
        curves.ellipse_boundaries.is_empty(),
    )?;
    Ok(written)
}
