//! Grid sweeps over Sine block designs with CSV + JSON output.

use crate::geometry::{MeshResolution, SineBlockParams};
use crate::loads::{Bvp, LoadCase, PillarMode};
use crate::par::map_indexed;
use crate::pipeline::{evaluate_many, DesignPoint, ResultRow};
use crate::{tolerances, Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

/// Mesh resolution of a sweep: fixed, or `(24f, 4, 24)` per point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResolutionSetting {
    #[default]
    Auto,
    Fixed(MeshResolution),
}

impl ResolutionSetting {
    pub fn resolve(&self, point: &DesignPoint) -> Result<MeshResolution> {
        match self {
            Self::Auto => point.default_resolution(),
            Self::Fixed(r) => Ok(*r),
        }
    }
}

impl Serialize for ResolutionSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Auto => s.serialize_str("auto"),
            Self::Fixed(r) => s.serialize_str(&r.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for ResolutionSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s.trim() == "auto" {
            Ok(Self::Auto)
        } else {
            s.parse().map(Self::Fixed).map_err(serde::de::Error::custom)
        }
    }
}

/// Sweep description. Defaults reproduce the 480-point reference grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub amplitudes: Vec<f64>,
    pub shifts: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub n_values: Vec<usize>,
    pub thicknesses: Vec<f64>,
    pub h: f64,
    pub r_i: f64,
    #[serde(rename = "L")]
    pub layers: usize,
    pub p0: f64,
    pub resolution: ResolutionSetting,
    pub bvps: Vec<Bvp>,
    pub pillar_mode: PillarMode,
    pub output: Option<PathBuf>,
    /// Worker threads; `0` uses every core.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            amplitudes: vec![10.0, 15.0, 20.0, 25.0],
            shifts: vec![0.0, 0.5],
            frequencies: vec![1.0, 1.5, 2.0],
            n_values: vec![2, 3, 4, 5, 6],
            thicknesses: vec![30.0, 40.0, 50.0, 60.0],
            h: 200.0,
            r_i: 120.0,
            layers: 12,
            p0: 0.01,
            resolution: ResolutionSetting::Auto,
            bvps: vec![Bvp::Pipe],
            pillar_mode: PillarMode::ReleaseTopFrame,
            output: None,
            jobs: 0,
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("amplitudes", self.amplitudes.is_empty()),
            ("shifts", self.shifts.is_empty()),
            ("frequencies", self.frequencies.is_empty()),
            ("n_values", self.n_values.is_empty()),
            ("thicknesses", self.thicknesses.is_empty()),
            ("bvps", self.bvps.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|e| e.1) {
            return Err(Error::Config(format!("{name} must not be empty")));
        }
        if !(self.p0 > 0.0 && self.p0.is_finite()) {
            return Err(Error::Config(format!("p0 = {} must be positive", self.p0)));
        }
        if !(self.h > 0.0 && self.r_i > 0.0) || self.layers == 0 {
            return Err(Error::Config("h, r_i and L must be positive".into()));
        }
        Ok(())
    }

    /// Grid points in `a, s, f, n, t` order (last varies fastest).
    pub fn grid(&self) -> Vec<SineBlockParams> {
        let mut out = Vec::new();
        for &a in &self.amplitudes {
            for &s in &self.shifts {
                for &f in &self.frequencies {
                    for &n in &self.n_values {
                        for &t in &self.thicknesses {
                            out.push(SineBlockParams {
                                h: self.h,
                                a,
                                f,
                                s,
                                n,
                                r_i: self.r_i,
                                t,
                                layers: self.layers,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn cases(&self) -> Vec<LoadCase> {
        self.bvps
            .iter()
            .map(|&b| LoadCase {
                pillar_mode: self.pillar_mode,
                ..LoadCase::new(b, self.p0)
            })
            .collect()
    }
}

/// Rows in grid order, plus run statistics.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    pub error_rows: usize,
    pub wall_clock_s: f64,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(ResultRow::HEADER)
        .map_err(|e| Error::io(path, e.into()))?;
    Ok(w)
}

/// Writes rows with a header to `path`.
pub fn write_rows(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_rows_to(file, rows).map_err(|e| Error::io(path, e))
}

/// Writes rows with a header to any sink (e.g. stdout).
pub fn write_rows_to<W: std::io::Write>(sink: W, rows: &[ResultRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(ResultRow::HEADER)?;
    for r in rows {
        w.write_record(r.to_record())?;
    }
    w.flush()
}

/// Reads rows written by [`write_rows`].
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Parse {
        path: path.into(),
        msg: e.to_string(),
    })?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.into(),
            msg: e.to_string(),
        })?;
        let fields: Vec<String> = rec.iter().map(str::to_owned).collect();
        rows.push(ResultRow::from_record(&fields)?);
    }
    Ok(rows)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    code_version: &'static str,
    config: &'a SweepConfig,
    tolerances: tolerances::Tolerances,
    resolution: ResolutionSetting,
    parallel: bool,
    jobs: usize,
    rows: usize,
    error_rows: usize,
    wall_clock_s: f64,
}

pub fn write_sidecar(path: &Path, cfg: &SweepConfig, jobs: usize, out: &SweepOutcome) -> Result<()> {
    let side = Sidecar {
        code_version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        tolerances: tolerances::ALL,
        resolution: cfg.resolution,
        parallel: crate::par::parallel_enabled(),
        jobs,
        rows: out.rows.len(),
        error_rows: out.error_rows,
        wall_clock_s: out.wall_clock_s,
    };
    let text = serde_json::to_string_pretty(&side).expect("sidecar serialises");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct PointSidecar<'a> {
    code_version: &'static str,
    point: &'a DesignPoint,
    cases: &'a [LoadCase],
    tolerances: tolerances::Tolerances,
    resolution: MeshResolution,
    rows: usize,
    error_rows: usize,
}

/// Sidecar for a single-point evaluation.
pub fn write_point_sidecar(
    path: &Path,
    point: &DesignPoint,
    cases: &[LoadCase],
    res: &MeshResolution,
    rows: &[ResultRow],
) -> Result<()> {
    let side = PointSidecar {
        code_version: env!("CARGO_PKG_VERSION"),
        point,
        cases,
        tolerances: tolerances::ALL,
        resolution: *res,
        rows: rows.len(),
        error_rows: rows.iter().filter(|r| r.error.is_some()).count(),
    };
    let text = serde_json::to_string_pretty(&side).expect("sidecar serialises");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs the sweep in memory. `on_point` sees each point's rows as soon as
/// they are ready (completion order); the returned rows are in grid order.
pub fn run_sweep_with<F>(cfg: &SweepConfig, jobs: usize, on_point: F) -> Result<SweepOutcome>
where
    F: Fn(usize, &[ResultRow]) + Sync + Send,
{
    cfg.validate()?;
    let t0 = Instant::now();
    let cases = cfg.cases();
    let points = cfg.grid();
    let per_point = map_indexed(&points, jobs, |i, p| {
        let point = DesignPoint::Sine(*p);
        let rows = match cfg.resolution.resolve(&point) {
            Ok(res) => evaluate_many(&point, &res, &cases),
            Err(e) => {
                let fallback = MeshResolution::new(0, 0, 0);
                let mut rows = evaluate_many(&point, &fallback, &cases);
                rows.iter_mut().for_each(|r| r.error = Some(e.to_string()));
                rows
            }
        };
        on_point(i, &rows);
        rows
    });
    let rows: Vec<ResultRow> = per_point.into_iter().flatten().collect();
    let error_rows = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(SweepOutcome {
        rows,
        error_rows,
        wall_clock_s: t0.elapsed().as_secs_f64(),
    })
}

/// Runs the sweep into `dir`: rows stream into `results.partial.csv` as they
/// complete, then `results.csv` (grid order) and `sweep.json` are written and
/// the partial file is removed.
pub fn run_sweep(cfg: &SweepConfig, dir: &Path, jobs: usize) -> Result<SweepOutcome> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let partial_path = dir.join("results.partial.csv");
    let partial = Mutex::new(csv_writer(&partial_path)?);
    let out = run_sweep_with(cfg, jobs, |_, rows| {
        let mut w = partial.lock().expect("writer lock");
        for r in rows {
            // best effort: the final file is written from memory regardless
            let _ = w.write_record(r.to_record());
        }
        let _ = w.flush();
    })?;
    drop(partial);
    write_rows(&dir.join("results.csv"), &out.rows)?;
    write_sidecar(&dir.join("sweep.json"), cfg, jobs, &out)?;
    fs::remove_file(&partial_path).map_err(|e| Error::io(&partial_path, e))?;
    Ok(out)
}
