//! Run configuration, read from JSON.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Forward,
    Bounds,
    Pipeline,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcMode {
    pub n: i32,
    pub re: f64,
    pub im: f64,
}

/// Concentric layers, innermost first, driven by an affine potential plus
/// optional extra Fourier modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredSpec {
    pub radii: Vec<f64>,
    pub layer_phase: Vec<u8>,
    /// `u` of `V = u . x`, as `[[re, im], [re, im]]`.
    #[serde(default)]
    pub affine_u: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    pub bc_modes: Vec<BcMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreShellSpec {
    pub r1: f64,
    pub r2: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaminateSpec {
    pub f1: f64,
    /// Constant phase-1 field, `[[re, im], [re, im]]`.
    pub field: [[f64; 2]; 2],
    pub normal: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaPair {
    pub sigma1: [f64; 2],
    pub sigma2: [f64; 2],
}

/// Three-layer annulus with phases (1, 2, 1) and outer radii
/// `(r1, R2, r3)`, where `R2` is chosen to hit each target fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub pairs: Vec<SigmaPair>,
    #[serde(default = "default_r1")]
    pub r1: f64,
    #[serde(default = "default_r3")]
    pub r3: f64,
    /// Explicit targets; otherwise `k / (f_count + 1)` for `k = 1..=f_count`.
    #[serde(default)]
    pub f_values: Option<Vec<f64>>,
    #[serde(default = "default_f_count")]
    pub f_count: usize,
    #[serde(default = "default_u")]
    pub affine_u: [[f64; 2]; 2],
}

impl SweepSpec {
    pub fn targets(&self) -> Vec<f64> {
        match &self.f_values {
            Some(v) => v.clone(),
            None => (1..=self.f_count)
                .map(|k| k as f64 / (self.f_count + 1) as f64)
                .collect(),
        }
    }
}

fn default_r1() -> f64 {
    0.45
}
fn default_r3() -> f64 {
    5.0
}
fn default_f_count() -> usize {
    99
}
fn default_u() -> [[f64; 2]; 2] {
    [[-2.0, 1.0], [0.6, -1.4]]
}
fn default_quadrature_n() -> usize {
    2048
}
fn default_grid_n() -> usize {
    2001
}
fn default_refine_tol() -> f64 {
    1e-10
}
fn default_curve_points() -> usize {
    401
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub sigma1: Option<[f64; 2]>,
    #[serde(default)]
    pub sigma2: Option<[f64; 2]>,
    #[serde(default)]
    pub layered: Option<LayeredSpec>,
    #[serde(default)]
    pub coreshell: Option<CoreShellSpec>,
    #[serde(default)]
    pub laminate: Option<LaminateSpec>,
    #[serde(default)]
    pub trace_file: Option<PathBuf>,
    #[serde(default)]
    pub measurement_file: Option<PathBuf>,
    #[serde(default = "default_quadrature_n")]
    pub quadrature_n: usize,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    #[serde(default)]
    pub emit_curves: bool,
    /// Samples per curve in the CSV output.
    #[serde(default = "default_curve_points")]
    pub curve_points: usize,
    /// Test values at which ellipse boundaries are sampled.
    #[serde(default)]
    pub curve_f_values: Vec<f64>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

/// Where the measurement comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Layered,
    Coreshell,
    Laminate,
    TraceFile,
    MeasurementFile,
}

pub(crate) fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a config, resolving relative file paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.trace_file, &mut cfg.measurement_file]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    fn generators(&self) -> Vec<SourceKind> {
        let mut v = Vec::new();
        if self.layered.is_some() {
            v.push(SourceKind::Layered);
        }
        if self.coreshell.is_some() {
            v.push(SourceKind::Coreshell);
        }
        if self.laminate.is_some() {
            v.push(SourceKind::Laminate);
        }
        v
    }

    fn files(&self) -> Vec<SourceKind> {
        let mut v = Vec::new();
        if self.trace_file.is_some() {
            v.push(SourceKind::TraceFile);
        }
        if self.measurement_file.is_some() {
            v.push(SourceKind::MeasurementFile);
        }
        v
    }

    /// Checks the config for `mode` and returns the single measurement source.
    pub fn validate(&self, mode: Mode) -> Result<Option<SourceKind>, CliError> {
        fn bad<T>(m: String) -> Result<T, CliError> {
            Err(CliError::Config(m))
        }
        if self.grid_n < 3 {
            return bad(format!("grid_n must be at least 3, got {}", self.grid_n));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol.is_finite()) {
            return bad(format!(
                "refine_tol must be positive, got {}",
                self.refine_tol
            ));
        }
        if self.quadrature_n < 16 || self.quadrature_n % 2 != 0 {
            return bad(format!(
                "quadrature_n must be even and at least 16, got {}",
                self.quadrature_n
            ));
        }
        if self.emit_curves && self.curve_points < 2 {
            return bad("curve_points must be at least 2".into());
        }
        let gens = self.generators();
        let files = self.files();
        let needs_sigma = |s: &Self| {
            if s.sigma1.is_none() || s.sigma2.is_none() {
                return bad("sigma1 and sigma2 are required".into());
            }
            Ok(())
        };
        match mode {
            Mode::Sweep => {
                let Some(sw) = &self.sweep else {
                    return bad("sweep mode needs a `sweep` section".into());
                };
                if sw.pairs.is_empty() {
                    return bad("sweep needs at least one conductivity pair".into());
                }
                if !(0.0 < sw.r1 && sw.r1 < sw.r3) {
                    return bad(format!(
                        "sweep radii need 0 < r1 < r3, got {} and {}",
                        sw.r1, sw.r3
                    ));
                }
                let lo = (sw.r1 / sw.r3).powi(2);
                if let Some(f) = sw.targets().into_iter().find(|f| !(lo < *f && *f < 1.0)) {
                    return bad(format!("sweep target {f} outside ({lo}, 1)"));
                }
                Ok(None)
            }
            Mode::Forward | Mode::Pipeline => {
                if gens.len() != 1 || !files.is_empty() {
                    return bad(format!(
                        "{mode:?} mode needs exactly one of layered, coreshell, laminate and no input files"
                    ));
                }
                needs_sigma(self)?;
                Ok(Some(gens[0]))
            }
            Mode::Bounds => {
                if files.len() != 1 || !gens.is_empty() {
                    return bad(
                        "bounds mode needs exactly one of trace_file, measurement_file".into(),
                    );
                }
                if files[0] == SourceKind::TraceFile {
                    needs_sigma(self)?;
                }
                Ok(Some(files[0]))
            }
        }
    }
}
