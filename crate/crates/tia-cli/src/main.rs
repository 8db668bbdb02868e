//! `tia` — evaluate, sweep and export tubular interlocking assemblies.
//!
//! Exit codes: 0 on success, 1 if any result row carries an error, 2 on a
//! configuration error (bad flags, unreadable or invalid config file).

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tia_core::export::{export_mesh, ExportFormat};
use tia_core::geometry::{HexBlockParams, MeshResolution, SineBlockParams};
use tia_core::loads::{Bvp, LoadCase};
use tia_core::pipeline::{evaluate_many, prepare, solve_case, DesignPoint};
use tia_core::sweep::{run_sweep, write_point_sidecar, write_rows, write_rows_to, ResolutionSetting, SweepConfig};

#[derive(Parser)]
#[command(name = "tia", version, about = "Tubular topological interlocking assemblies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one design point under one load case.
    Evaluate(EvaluateArgs),
    /// Run a parameter sweep described by a TOML config file.
    Sweep(SweepArgs),
    /// Write the assembly surface mesh, optionally with contact pressures.
    Export(ExportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Block {
    Sine,
    Hex,
}

/// Design point; defaults are TSB 1 (sine) and THB 0 (hex).
#[derive(Args)]
struct PointArgs {
    #[arg(long, value_enum, default_value = "sine")]
    block: Block,
    /// Sine amplitude [mm].
    #[arg(long, default_value_t = 20.0)]
    a: f64,
    /// Phase shift in periods (0.5 gives the Cosine block).
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    /// Sine frequency per block.
    #[arg(long, default_value_t = 1.5)]
    f: f64,
    /// Blocks per layer.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Wall thickness [mm].
    #[arg(long, default_value_t = 40.0)]
    t: f64,
    /// Layer height [mm] (sine only).
    #[arg(long, default_value_t = 200.0)]
    h: f64,
    /// Inner radius [mm].
    #[arg(long, default_value_t = 120.0)]
    ri: f64,
    /// Interior layers.
    #[arg(long = "L", default_value_t = 12)]
    layers: usize,
    /// Mesh divisions per block; defaults to 24f,4,24 (sine) or 24,4,24 (hex).
    #[arg(long, value_name = "NX,NY,NZ")]
    resolution: Option<MeshResolution>,
}

impl PointArgs {
    fn point(&self) -> DesignPoint {
        match self.block {
            Block::Sine => DesignPoint::Sine(SineBlockParams {
                h: self.h,
                a: self.a,
                f: self.f,
                s: self.s,
                n: self.n,
                r_i: self.ri,
                t: self.t,
                layers: self.layers,
            }),
            Block::Hex => DesignPoint::Hex(HexBlockParams {
                n: self.n,
                r_i: self.ri,
                r_o: self.ri + self.t,
                layers: self.layers,
            }),
        }
    }

    fn resolution(&self, point: &DesignPoint) -> tia_core::Result<MeshResolution> {
        match self.resolution {
            Some(r) => Ok(r),
            None => point.default_resolution(),
        }
    }
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value = "pipe")]
    bvp: Bvp,
    /// Load magnitude [MPa].
    #[arg(long, default_value_t = 0.01)]
    p0: f64,
    /// CSV output; a JSON sidecar is written next to it. Prints to stdout
    /// when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (0 = all cores); overrides the config file.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory; overrides the config file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Load cases, comma separated; overrides the config file.
    #[arg(long, value_delimiter = ',')]
    bvp: Option<Vec<Bvp>>,
    #[arg(long)]
    p0: Option<f64>,
    /// `NX,NY,NZ` or `auto`; overrides the config file.
    #[arg(long)]
    resolution: Option<String>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    format: ExportFormat,
    #[arg(long)]
    out: PathBuf,
    /// Attach per-face contact pressures from the equilibrium of `--bvp`.
    #[arg(long)]
    pressures: bool,
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value = "pipe")]
    bvp: Bvp,
    #[arg(long, default_value_t = 0.01)]
    p0: f64,
}

enum Failure {
    Config(String),
    Row(String),
}

impl From<tia_core::Error> for Failure {
    fn from(e: tia_core::Error) -> Self {
        match e {
            tia_core::Error::Config(_) | tia_core::Error::Parse { .. } => Failure::Config(e.to_string()),
            other => Failure::Row(other.to_string()),
        }
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    if !(args.p0 > 0.0 && args.p0.is_finite()) {
        return Err(Failure::Config(format!("--p0 must be positive, got {}", args.p0)));
    }
    if args.point.block == Block::Hex {
        // the hexagon tile fixes its own layer height
        eprintln!("note: --a, --s, --f and --h do not apply to hex blocks");
    }
    let point = args.point.point();
    let res = args.point.resolution(&point).map_err(|e| Failure::Config(e.to_string()))?;
    let cases = [LoadCase::new(args.bvp, args.p0)];
    let rows = evaluate_many(&point, &res, &cases);
    match &args.out {
        Some(path) => {
            write_rows(path, &rows)?;
            write_point_sidecar(&sidecar_path(path), &point, &cases, &res, &rows)?;
        }
        None => write_rows_to(std::io::stdout().lock(), &rows)
            .map_err(|e| Failure::Row(format!("writing to stdout: {e}")))?,
    }
    match rows.iter().find_map(|r| r.error.clone()) {
        Some(e) => Err(Failure::Row(e)),
        None => Ok(()),
    }
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut cfg = SweepConfig::load(&args.config).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(b) = args.bvp {
        cfg.bvps = b;
    }
    if let Some(p0) = args.p0 {
        cfg.p0 = p0;
    }
    if let Some(r) = &args.resolution {
        cfg.resolution = if r.trim() == "auto" {
            ResolutionSetting::Auto
        } else {
            ResolutionSetting::Fixed(r.parse().map_err(|e: tia_core::Error| Failure::Config(e.to_string()))?)
        };
    }
    if let Some(out) = args.out {
        cfg.output = Some(out);
    }
    cfg.validate()?;
    let dir = cfg
        .output
        .clone()
        .ok_or_else(|| Failure::Config("no output directory (--out or `output` in the config)".into()))?;
    let jobs = args.jobs.unwrap_or(cfg.jobs);
    let out = run_sweep(&cfg, &dir, jobs)?;
    eprintln!(
        "{} rows ({} with errors) in {:.1} s → {}",
        out.rows.len(),
        out.error_rows,
        out.wall_clock_s,
        dir.join("results.csv").display()
    );
    if out.error_rows > 0 {
        return Err(Failure::Row(format!("{} rows carry errors", out.error_rows)));
    }
    Ok(())
}

fn export(args: ExportArgs) -> Result<(), Failure> {
    let point = args.point.point();
    let res = args.point.resolution(&point).map_err(|e| Failure::Config(e.to_string()))?;
    let prep = prepare(&point, &res)?;
    if !args.pressures {
        export_mesh(&prep.asm, args.format, &args.out, None)?;
        return Ok(());
    }
    let out = solve_case(&prep, &LoadCase::new(args.bvp, args.p0))?;
    let Some(field) = out.pressure_field(&prep) else {
        return Err(Failure::Row(format!(
            "{} is {}: no equilibrium, so no pressures",
            args.bvp, out.kinematics.classification
        )));
    };
    export_mesh(&prep.asm, args.format, &args.out, Some((&field, &prep.pairs)))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evaluate(a) => evaluate(a),
        Command::Sweep(a) => sweep(a),
        Command::Export(a) => export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Row(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
    }
}
