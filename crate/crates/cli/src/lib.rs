//! Command-line driver for `voltbound-core`: runs the forward solvers, the
//! bounding pipeline and conductivity sweeps from a JSON config, and writes
//! JSON reports and CSV curves.

pub mod config;
pub mod curves;
pub mod report;
pub mod sweep;

use std::path::{Path, PathBuf};

use nalgebra::Vector2;
use thiserror::Error;
use voltbound_core::bounds::compute_bounds;
use voltbound_core::forward::{
    boundary_trace, coreshell_solution, laminate_moments, solve_layered_disk, FieldSolution,
    FourierBC, LayeredDiskGeometry,
};
use voltbound_core::measurement::{
    derive_constants, BoundaryMeasurement, MeasurementDocument, PhaseConductivities,
};
use voltbound_core::quadrature::{null_lagrangians, BoundaryTrace, TraceDocument};
use voltbound_core::scan::ScanOptions;
use voltbound_core::{BoundsError, ForwardError, MeasurementError, QuadratureError, ScanError};

pub use config::{Mode, RunConfig, SourceKind};
pub use report::Report;
pub use sweep::{run_sweep, SweepRow};

use config::complex;
use report::{Diagnostics, Inputs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Degenerate(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<MeasurementError> for CliError {
    fn from(e: MeasurementError) -> Self {
        match e {
            MeasurementError::BetaZero(_)
            | MeasurementError::EtaDegenerate { .. }
            | MeasurementError::EqualConductivities => CliError::Degenerate(e.to_string()),
            MeasurementError::NonFinite(_) => CliError::Numerical(e.to_string()),
            MeasurementError::InvalidConductivity(_) | MeasurementError::Format(_) => {
                CliError::Config(e.to_string())
            }
        }
    }
}

impl From<ForwardError> for CliError {
    fn from(e: ForwardError) -> Self {
        match e {
            ForwardError::SingularTransmission { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<QuadratureError> for CliError {
    fn from(e: QuadratureError) -> Self {
        match e {
            QuadratureError::NonConservative { .. } | QuadratureError::Clockwise => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::GridTooCoarse(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Measurement(m) => m.into(),
            BoundsError::Scan(s) => s.into(),
            BoundsError::MissingRotData | BoundsError::EqualModuli => {
                CliError::Degenerate(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

fn conductivities(cfg: &RunConfig) -> Result<PhaseConductivities, CliError> {
    let (Some(s1), Some(s2)) = (cfg.sigma1, cfg.sigma2) else {
        return Err(CliError::Config("sigma1 and sigma2 are required".into()));
    };
    Ok(PhaseConductivities::new(complex(s1), complex(s2))?)
}

fn layered_solution(
    spec: &config::LayeredSpec,
    cond: &PhaseConductivities,
) -> Result<FieldSolution, CliError> {
    let geom = LayeredDiskGeometry::new(spec.radii.clone(), spec.layer_phase.clone())?;
    let mut modes = Vec::new();
    if let Some(u) = spec.affine_u {
        modes.extend(FourierBC::affine([complex(u[0]), complex(u[1])], geom.outer_radius()).modes);
    }
    modes.extend(
        spec.bc_modes
            .iter()
            .map(|m| (m.n, num_complex::Complex64::new(m.re, m.im))),
    );
    if modes.is_empty() {
        return Err(CliError::Config(
            "layered needs affine_u or bc_modes".into(),
        ));
    }
    Ok(solve_layered_disk(&geom, cond, &FourierBC::new(modes))?)
}

/// Output of the forward stage.
#[derive(Debug, Clone, PartialEq)]
pub enum ForwardArtifact {
    Trace {
        trace: TraceDocument,
        true_f: f64,
        transmission_residual: f64,
    },
    Measurement {
        document: MeasurementDocument,
        true_f: f64,
    },
}

/// Runs the configured generator. Field solutions are sampled on the
/// boundary; laminates yield a measurement directly.
pub fn run_forward(cfg: &RunConfig) -> Result<ForwardArtifact, CliError> {
    let source = cfg
        .validate(Mode::Forward)?
        .expect("forward mode has a source");
    let cond = conductivities(cfg)?;
    let sol = match source {
        SourceKind::Layered => layered_solution(cfg.layered.as_ref().expect("validated"), &cond)?,
        SourceKind::Coreshell => {
            let cs = cfg.coreshell.expect("validated");
            coreshell_solution(cs.r1, cs.r2, &cond, cs.k)?
        }
        SourceKind::Laminate => {
            let lam = cfg.laminate.expect("validated");
            let field = [complex(lam.field[0]), complex(lam.field[1])];
            let m = laminate_moments(lam.f1, &cond, field, Vector2::from(lam.normal))?;
            return Ok(ForwardArtifact::Measurement {
                document: MeasurementDocument::new(&cond, &m.measurement),
                true_f: lam.f1,
            });
        }
        SourceKind::TraceFile | SourceKind::MeasurementFile => unreachable!("not a generator"),
    };
    let trace = boundary_trace(&sol, cfg.quadrature_n)?;
    Ok(ForwardArtifact::Trace {
        trace: TraceDocument::new(&trace),
        true_f: sol.geom.volume_fraction(),
        transmission_residual: sol.transmission_residual(),
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

struct Acquired {
    cond: PhaseConductivities,
    measurement: BoundaryMeasurement,
    true_f: Option<f64>,
    transmission_residual: Option<f64>,
    quadrature_n: Option<usize>,
}

fn from_trace(cond: PhaseConductivities, trace: &BoundaryTrace) -> Result<Acquired, CliError> {
    Ok(Acquired {
        cond,
        measurement: null_lagrangians(trace)?,
        true_f: None,
        transmission_residual: None,
        quadrature_n: Some(trace.len()),
    })
}

fn acquire(cfg: &RunConfig, mode: Mode, source: SourceKind) -> Result<Acquired, CliError> {
    match source {
        SourceKind::TraceFile => {
            let path = cfg.trace_file.as_ref().expect("validated");
            let trace = TraceDocument::from_json(&read(path)?)?.trace()?;
            from_trace(conductivities(cfg)?, &trace)
        }
        SourceKind::MeasurementFile => {
            let path = cfg.measurement_file.as_ref().expect("validated");
            let doc = MeasurementDocument::from_json(&read(path)?)?;
            Ok(Acquired {
                cond: doc.conductivities()?,
                measurement: doc.measurement()?,
                true_f: None,
                transmission_residual: None,
                quadrature_n: None,
            })
        }
        _ => {
            let fwd = RunConfig {
                mode: Some(Mode::Forward),
                ..cfg.clone()
            };
            debug_assert_eq!(mode, Mode::Pipeline);
            match run_forward(&fwd)? {
                ForwardArtifact::Trace {
                    trace,
                    true_f,
                    transmission_residual,
                } => {
                    let mut a = from_trace(conductivities(cfg)?, &trace.trace()?)?;
                    a.true_f = Some(true_f);
                    a.transmission_residual = Some(transmission_residual);
                    Ok(a)
                }
                ForwardArtifact::Measurement { document, true_f } => Ok(Acquired {
                    cond: document.conductivities()?,
                    measurement: document.measurement()?,
                    true_f: Some(true_f),
                    transmission_residual: None,
                    quadrature_n: None,
                }),
            }
        }
    }
}

/// Bounds mode when the config names an input file, pipeline mode otherwise.
pub fn infer_mode(cfg: &RunConfig) -> Mode {
    cfg.mode.unwrap_or(
        if cfg.trace_file.is_some() || cfg.measurement_file.is_some() {
            Mode::Bounds
        } else {
            Mode::Pipeline
        },
    )
}

/// Computes every bound supported by the configured measurement source.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Report, CliError> {
    let mode = match infer_mode(cfg) {
        Mode::Bounds => Mode::Bounds,
        Mode::Pipeline => Mode::Pipeline,
        m => {
            return Err(CliError::Config(format!(
                "{m:?} mode does not produce a report"
            )))
        }
    };
    let source = cfg.validate(mode)?.expect("report modes have a source");
    let a = acquire(cfg, mode, source)?;
    let consts = derive_constants(&a.cond, &a.measurement)?;
    let opts = ScanOptions {
        grid_n: cfg.grid_n,
        refine_tol: cfg.refine_tol,
    };
    let bounds = compute_bounds(&consts, opts)?;
    let pair = |c: num_complex::Complex64| [c.re, c.im];
    let inputs = Inputs {
        mode,
        source,
        sigma1: pair(a.cond.sigma1()),
        sigma2: pair(a.cond.sigma2()),
        quadrature_n: a.quadrature_n,
        grid_n: cfg.grid_n,
        refine_tol: cfg.refine_tol,
        true_f: a.true_f,
        measurement: a.measurement,
    };
    let diag = Diagnostics {
        transmission_residual: a.transmission_residual,
        ..Default::default()
    };
    Ok(Report::assemble(inputs, consts, bounds, diag)?)
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, CliError> {
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Runs `mode` and writes its artifacts under `out`, returning their paths.
pub fn execute(mode: Mode, cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let cfg = RunConfig {
        mode: Some(mode),
        ..cfg.clone()
    };
    match mode {
        Mode::Forward => match run_forward(&cfg)? {
            ForwardArtifact::Trace { trace, .. } => {
                Ok(vec![write(out.join("trace.json"), &trace.to_json())?])
            }
            ForwardArtifact::Measurement { document, .. } => Ok(vec![write(
                out.join("measurement.json"),
                &document.to_json(),
            )?]),
        },
        Mode::Bounds | Mode::Pipeline => {
            let report = run_pipeline(&cfg)?;
            let mut paths = vec![write(out.join("report.json"), &report.to_json())?];
            if cfg.emit_curves {
                let c = curves::compute_curves(
                    &report.constants,
                    &report,
                    cfg.curve_points,
                    &cfg.curve_f_values,
                )?;
                paths.extend(curves::write_curves(&c, out)?);
            }
            Ok(paths)
        }
        Mode::Sweep => {
            let rows = run_sweep(&cfg)?;
            let path = out.join("sweep.csv");
            sweep::write_sweep_csv(&rows, &path)?;
            Ok(vec![path])
        }
    }
}
