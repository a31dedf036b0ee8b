use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use voltbound::{execute, Mode, RunConfig};

/// Volume-fraction bounds for two-phase bodies from one boundary measurement.
#[derive(Debug, Parser)]
#[command(name = "voltbound", version)]
struct Args {
    #[arg(value_enum)]
    mode: Mode,
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long = "quadrature-n")]
    quadrature_n: Option<usize>,
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    #[arg(long = "refine-tol")]
    refine_tol: Option<f64>,
    #[arg(long = "emit-curves")]
    emit_curves: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let run = || {
        let mut cfg = RunConfig::load(&args.config)?;
        if let Some(n) = args.quadrature_n {
            cfg.quadrature_n = n;
        }
        if let Some(n) = args.grid_n {
            cfg.grid_n = n;
        }
        if let Some(t) = args.refine_tol {
            cfg.refine_tol = t;
        }
        cfg.emit_curves |= args.emit_curves;
        execute(args.mode, &cfg, &args.out)
    };
    match run() {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("voltbound: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
