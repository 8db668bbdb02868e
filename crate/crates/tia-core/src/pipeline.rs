//! One design point end to end: geometry → contacts → Jacobian → cone test →
//! (work-rate LPs) → (equilibrium QP) → metrics.

use crate::contact::{assemble_jacobian_with, detect_contacts_default, ContactPair, DofMap};
use crate::geometry::{
    build_assembly, build_hex_assembly, Assembly, BlockKind, HexBlockParams, MeshResolution,
    SineBlockParams,
};
use crate::loads::{assemble_load, Bvp, LoadCase};
use crate::metrics::{compute_metrics, MetricsReport, PressureField};
use crate::statics::{
    classify, explosion_check, gamma_eps, kinematic_feasibility, solve_contact_forces, work_rates,
    Classification, EquilibriumReport, Feasibility, KinematicReport, WorkRates,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// A single block design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "block", rename_all = "lowercase")]
pub enum DesignPoint {
    Sine(SineBlockParams),
    Hex(HexBlockParams),
}

impl DesignPoint {
    pub fn kind(&self) -> BlockKind {
        match self {
            DesignPoint::Sine(_) => BlockKind::Sine,
            DesignPoint::Hex(_) => BlockKind::Hexagon,
        }
    }

    pub fn layers(&self) -> usize {
        match self {
            DesignPoint::Sine(p) => p.layers,
            DesignPoint::Hex(p) => p.layers,
        }
    }

    pub fn default_resolution(&self) -> Result<MeshResolution> {
        match self {
            DesignPoint::Sine(p) => MeshResolution::default_for_frequency(p.f),
            DesignPoint::Hex(_) => Ok(MeshResolution::default_hex()),
        }
    }

    pub fn build(&self, res: &MeshResolution) -> Result<Assembly> {
        match self {
            DesignPoint::Sine(p) => build_assembly(p, res),
            DesignPoint::Hex(p) => build_hex_assembly(p, res),
        }
    }
}

/// Geometry and contacts shared by all load cases of a design point.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub asm: Assembly,
    pub pairs: Vec<ContactPair>,
    pub exploding: bool,
    pub seconds: f64,
}

pub fn prepare(point: &DesignPoint, res: &MeshResolution) -> Result<Prepared> {
    let t0 = Instant::now();
    let asm = point.build(res)?;
    let pairs = detect_contacts_default(&asm)?;
    let exploding = explosion_check(&asm, &pairs);
    Ok(Prepared {
        asm,
        pairs,
        exploding,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

/// Everything computed for one load case.
#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub case: LoadCase,
    pub kinematics: KinematicReport,
    pub equilibrium: Option<EquilibriumReport>,
    /// Contact force per pair (zero for pairs outside the statics problem).
    pub pair_lambdas: Option<Vec<f64>>,
    pub metrics: Option<MetricsReport>,
    pub seconds: f64,
}

impl CaseOutcome {
    pub fn pressure_field(&self, prep: &Prepared) -> Option<PressureField> {
        self.pair_lambdas
            .as_ref()
            .map(|l| PressureField::new(&prep.asm, &prep.pairs, l))
    }
}

/// Caches the cone test per body-state map, since it does not depend on the
/// load.
#[derive(Default)]
struct FeasibilityCache {
    entries: Vec<(DofMap, Feasibility)>,
}

impl FeasibilityCache {
    fn get(&mut self, prep: &Prepared, dof: &DofMap) -> Result<Feasibility> {
        if let Some((_, f)) = self.entries.iter().find(|(d, _)| d == dof) {
            return Ok(f.clone());
        }
        let g = assemble_jacobian_with(&prep.pairs, dof);
        let f = kinematic_feasibility(&g)?;
        self.entries.push((dof.clone(), f.clone()));
        Ok(f)
    }
}

fn solve_case_cached(prep: &Prepared, case: &LoadCase, cache: &mut FeasibilityCache) -> Result<CaseOutcome> {
    let t0 = Instant::now();
    let asm = &prep.asm;
    let load = assemble_load(asm, case)?;

    let kdof = case.kinematic_dofs(asm);
    let feas = cache.get(prep, &kdof)?;
    let kinematics = if feas.locked() {
        KinematicReport {
            z_star: feas.z_star,
            sliding_dim: 0,
            gamma_max: None,
            gamma_min: None,
            mechanism: None,
            classification: Classification::Locked,
        }
    } else {
        let g = assemble_jacobian_with(&prep.pairs, &kdof);
        let f = load.to_free_vector(&kdof);
        let WorkRates {
            gamma_max: gmax,
            x_max: xmax,
            gamma_min: gmin,
            x_min: xmin,
        } = work_rates(&g, &f, &feas.mechanism)?;
        let class = classify(false, gmax, gmin, gamma_eps(&f));
        KinematicReport {
            z_star: feas.z_star,
            sliding_dim: feas.sliding_dim,
            gamma_max: Some(gmax),
            gamma_min: Some(gmin),
            mechanism: Some(match class {
                Classification::Activated => xmax,
                Classification::Suppressed => xmin,
                _ => feas.mechanism.clone(),
            }),
            classification: class,
        }
    };

    let (equilibrium, pair_lambdas, metrics) = if kinematics.classification.carries_load() {
        let edof = case.equilibrium_dofs(asm);
        let g = assemble_jacobian_with(&prep.pairs, &edof);
        let f = load.to_free_vector(&edof);
        let eq = solve_contact_forces(&g, &f, kinematics.classification)?;
        let mut lam = vec![0.0; prep.pairs.len()];
        for (j, &k) in g.pair_of_column.iter().enumerate() {
            lam[k] = eq.lambdas[j];
        }
        let metrics = eq
            .feasible
            .then(|| compute_metrics(asm, &PressureField::new(asm, &prep.pairs, &lam)));
        (Some(eq), Some(lam), metrics)
    } else {
        (None, None, None)
    };
    Ok(CaseOutcome {
        case: *case,
        kinematics,
        equilibrium,
        pair_lambdas,
        metrics,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

pub fn solve_case(prep: &Prepared, case: &LoadCase) -> Result<CaseOutcome> {
    solve_case_cached(prep, case, &mut FeasibilityCache::default())
}

/// One output row per (design point, load case).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub block: BlockKind,
    pub h: f64,
    pub a: Option<f64>,
    pub f: Option<f64>,
    pub s: Option<f64>,
    pub n: usize,
    pub r_i: f64,
    pub t: f64,
    #[serde(rename = "L")]
    pub layers: usize,
    pub bvp: Bvp,
    pub p0: f64,
    pub classification: Option<Classification>,
    pub z_star: Option<f64>,
    pub gamma_max: Option<f64>,
    pub gamma_min: Option<f64>,
    pub residual: Option<f64>,
    pub effective_area_pct: Option<f64>,
    pub p_eff_bar: Option<f64>,
    pub p_max_bar: Option<f64>,
    pub exploding: Option<bool>,
    pub n_w: Option<f64>,
    pub wall_clock_s: f64,
    pub resolution: MeshResolution,
    pub sliding_dim: Option<usize>,
    pub error: Option<String>,
}

impl ResultRow {
    pub const HEADER: [&'static str; 25] = [
        "block",
        "h",
        "a",
        "f",
        "s",
        "n",
        "r_i",
        "t",
        "L",
        "bvp",
        "p0",
        "classification",
        "z_star",
        "gamma_max",
        "gamma_min",
        "residual",
        "effective_area_pct",
        "p_eff_bar",
        "p_max_bar",
        "exploding",
        "n_w",
        "wall_clock_s",
        "resolution",
        "sliding_dim",
        "error",
    ];

    fn blank(point: &DesignPoint, res: &MeshResolution, case: &LoadCase) -> Self {
        let (block, h, a, f, s, n, r_i, t, layers, n_w) = match point {
            DesignPoint::Sine(p) => (
                BlockKind::Sine,
                p.h,
                Some(p.a),
                Some(p.f),
                Some(p.s),
                p.n,
                p.r_i,
                p.t,
                p.layers,
                Some(p.n_w()),
            ),
            DesignPoint::Hex(p) => (
                BlockKind::Hexagon,
                crate::geometry::hex_tile_dims(p).height,
                None,
                None,
                None,
                p.n,
                p.r_i,
                p.r_o - p.r_i,
                p.layers,
                None,
            ),
        };
        Self {
            block,
            h,
            a,
            f,
            s,
            n,
            r_i,
            t,
            layers,
            bvp: case.kind,
            p0: case.p0,
            classification: None,
            z_star: None,
            gamma_max: None,
            gamma_min: None,
            residual: None,
            effective_area_pct: None,
            p_eff_bar: None,
            p_max_bar: None,
            exploding: None,
            n_w,
            wall_clock_s: 0.0,
            resolution: *res,
            sliding_dim: None,
            error: None,
        }
    }

    fn fill(&mut self, prep: &Prepared, out: &CaseOutcome) {
        let k = &out.kinematics;
        self.classification = Some(k.classification);
        self.z_star = Some(k.z_star);
        self.sliding_dim = Some(k.sliding_dim);
        self.gamma_max = k.gamma_max;
        self.gamma_min = k.gamma_min;
        self.residual = out.equilibrium.as_ref().map(|e| e.residual);
        if let Some(m) = &out.metrics {
            self.effective_area_pct = Some(m.effective_area_pct);
            self.p_eff_bar = Some(m.p_eff_bar);
            self.p_max_bar = Some(m.p_max_bar);
        }
        self.exploding = Some(prep.exploding);
    }

    /// CSV fields in header order; floats carry 9 significant digits.
    pub fn to_record(&self) -> Vec<String> {
        let fl = |v: f64| format!("{v:.8e}");
        let of = |v: Option<f64>| v.map(fl).unwrap_or_default();
        vec![
            match self.block {
                BlockKind::Sine => "sine".into(),
                BlockKind::Hexagon => "hex".into(),
            },
            fl(self.h),
            of(self.a),
            of(self.f),
            of(self.s),
            self.n.to_string(),
            fl(self.r_i),
            fl(self.t),
            self.layers.to_string(),
            self.bvp.to_string(),
            fl(self.p0),
            self.classification.map(|c| c.to_string()).unwrap_or_default(),
            of(self.z_star),
            of(self.gamma_max),
            of(self.gamma_min),
            of(self.residual),
            of(self.effective_area_pct),
            of(self.p_eff_bar),
            of(self.p_max_bar),
            self.exploding.map(|b| b.to_string()).unwrap_or_default(),
            of(self.n_w),
            fl(self.wall_clock_s),
            self.resolution.to_string(),
            self.sliding_dim.map(|d| d.to_string()).unwrap_or_default(),
            self.error.clone().unwrap_or_default(),
        ]
    }

    /// Parses a record written by [`ResultRow::to_record`].
    pub fn from_record(rec: &[String]) -> Result<Self> {
        if rec.len() != Self::HEADER.len() {
            return Err(Error::Config(format!("expected {} fields, got {}", Self::HEADER.len(), rec.len())));
        }
        let bad = |i: usize| Error::Config(format!("bad value {:?} in column {}", rec[i], Self::HEADER[i]));
        let f = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(i));
        let of = |i: usize| if rec[i].is_empty() { Ok(None) } else { f(i).map(Some) };
        let u = |i: usize| rec[i].parse::<usize>().map_err(|_| bad(i));
        Ok(Self {
            block: match rec[0].as_str() {
                "sine" => BlockKind::Sine,
                "hex" => BlockKind::Hexagon,
                _ => return Err(bad(0)),
            },
            h: f(1)?,
            a: of(2)?,
            f: of(3)?,
            s: of(4)?,
            n: u(5)?,
            r_i: f(6)?,
            t: f(7)?,
            layers: u(8)?,
            bvp: rec[9].parse()?,
            p0: f(10)?,
            classification: if rec[11].is_empty() { None } else { Some(rec[11].parse()?) },
            z_star: of(12)?,
            gamma_max: of(13)?,
            gamma_min: of(14)?,
            residual: of(15)?,
            effective_area_pct: of(16)?,
            p_eff_bar: of(17)?,
            p_max_bar: of(18)?,
            exploding: match rec[19].as_str() {
                "" => None,
                "true" => Some(true),
                "false" => Some(false),
                _ => return Err(bad(19)),
            },
            n_w: of(20)?,
            wall_clock_s: f(21)?,
            resolution: rec[22].parse()?,
            sliding_dim: if rec[23].is_empty() { None } else { Some(u(23)?) },
            error: if rec[24].is_empty() { None } else { Some(rec[24].clone()) },
        })
    }
}

/// Evaluates several load cases of one design point, sharing geometry,
/// contacts and the cone test. Errors become row-level error records.
pub fn evaluate_many(point: &DesignPoint, res: &MeshResolution, cases: &[LoadCase]) -> Vec<ResultRow> {
    let prep = match prepare(point, res) {
        Ok(p) => p,
        Err(e) => {
            return cases
                .iter()
                .map(|c| {
                    let mut row = ResultRow::blank(point, res, c);
                    row.error = Some(e.to_string());
                    row
                })
                .collect()
        }
    };
    let mut cache = FeasibilityCache::default();
    cases
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut row = ResultRow::blank(point, res, c);
            match solve_case_cached(&prep, c, &mut cache) {
                Ok(out) => {
                    row.fill(&prep, &out);
                    // geometry time is charged to the first case
                    row.wall_clock_s = out.seconds + if i == 0 { prep.seconds } else { 0.0 };
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

pub fn evaluate(point: &DesignPoint, res: &MeshResolution, case: &LoadCase) -> ResultRow {
    evaluate_many(point, res, std::slice::from_ref(case)).remove(0)
}

/// All five load cases at pressure `p0`.
pub fn all_cases(p0: f64) -> Vec<LoadCase> {
    Bvp::ALL.iter().map(|&b| LoadCase::new(b, p0)).collect()
}
