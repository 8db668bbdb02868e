//! Contact pressures and the aggregate pressure measures.

use crate::contact::ContactPair;
use crate::geometry::Assembly;
use serde::Serialize;

/// Pressure `λ/A` per pair, plus each body's view of its pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureField {
    pub pair_pressure: Vec<f64>,
    /// Per body: `(pair index, area, pressure)` for every pair it touches.
    pub per_body: Vec<Vec<(usize, f64, f64)>>,
}

impl PressureField {
    /// `lambdas[k]` is the force on pair `k` (zero for pairs left out of the
    /// statics problem).
    pub fn new(asm: &Assembly, pairs: &[ContactPair], lambdas: &[f64]) -> Self {
        let pair_pressure: Vec<f64> = pairs.iter().zip(lambdas).map(|(p, l)| l / p.area).collect();
        let mut per_body = vec![Vec::new(); asm.bodies.len()];
        for (k, p) in pairs.iter().enumerate() {
            per_body[p.master_body].push((k, p.area, pair_pressure[k]));
            per_body[p.slave_body].push((k, p.area, pair_pressure[k]));
        }
        Self {
            pair_pressure,
            per_body,
        }
    }

    /// Per-face pressure of body `b`'s surface faces (zero off contact).
    pub fn face_pressures(&self, asm: &Assembly, pairs: &[ContactPair], b: usize) -> Vec<f64> {
        let mut out = vec![0.0; asm.bodies[b].mesh.surface_faces.len()];
        for &(k, _, p) in &self.per_body[b] {
            let pair = &pairs[k];
            let face = if pair.master_body == b { pair.master_face } else { pair.slave_face };
            out[face] = p;
        }
        out
    }
}

/// `(Σp)²/Σp²`; `None` when every pressure is zero.
pub fn participation_ratio(p: &[f64]) -> Option<f64> {
    let s: f64 = p.iter().sum();
    let s2: f64 = p.iter().map(|v| v * v).sum();
    (s2 > 0.0).then(|| s * s / s2)
}

/// Marks the `k` largest pressures; ties go to the lower index.
pub fn effective_mask(p: &[f64], k: usize) -> Vec<bool> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&i, &j| p[j].total_cmp(&p[i]).then(i.cmp(&j)));
    let mut mask = vec![false; p.len()];
    for &i in order.iter().take(k) {
        mask[i] = true;
    }
    mask
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BodyMetrics {
    pub body: usize,
    pub n_eff: f64,
    pub k: usize,
    pub p_eff: f64,
    pub p_max: f64,
    pub masked_area: f64,
    pub mask: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub effective_area_pct: f64,
    pub p_eff_bar: f64,
    pub p_max_bar: f64,
    pub bodies: Vec<BodyMetrics>,
    /// Contact-eligible area of all non-frame bodies.
    pub eligible_area: f64,
}

/// Metrics over non-frame bodies. Bodies whose pressures are all zero are
/// left out of the means but their faces stay in the area denominator.
pub fn compute_metrics(asm: &Assembly, field: &PressureField) -> MetricsReport {
    let mut bodies = Vec::new();
    let mut eligible = 0.0;
    let mut masked = 0.0;
    for (b, body) in asm.bodies.iter().enumerate() {
        if body.is_frame {
            continue;
        }
        let faces = &field.per_body[b];
        eligible += faces.iter().map(|f| f.1).sum::<f64>();
        let p: Vec<f64> = faces.iter().map(|f| f.2).collect();
        let Some(n_eff) = participation_ratio(&p) else { continue };
        // guard the floor against rounding just below an integer
        let k = ((n_eff + 1e-9).floor() as usize).clamp(1, p.len());
        let mask = effective_mask(&p, k);
        let sel = |i: usize| mask[i];
        let p_eff = (0..p.len()).filter(|&i| sel(i)).map(|i| p[i]).sum::<f64>() / k as f64;
        let p_max = p.iter().cloned().fold(0.0, f64::max);
        let area: f64 = (0..p.len()).filter(|&i| sel(i)).map(|i| faces[i].1).sum();
        masked += area;
        bodies.push(BodyMetrics {
            body: b,
            n_eff,
            k,
            p_eff,
            p_max,
            masked_area: area,
            mask,
        });
    }
    let nb = bodies.len().max(1) as f64;
    MetricsReport {
        effective_area_pct: if eligible > 0.0 { 100.0 * masked / eligible } else { 0.0 },
        p_eff_bar: bodies.iter().map(|m| m.p_eff).sum::<f64>() / nb,
        p_max_bar: bodies.iter().map(|m| m.p_max).sum::<f64>() / nb,
        bodies,
        eligible_area: eligible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn participation_examples() {
        assert!((participation_ratio(&[1.0, 1.0, 1.0, 1.0]).unwrap() - 4.0).abs() < 1e-15);
        assert!((participation_ratio(&[2.0, 1.0, 1.0, 0.0]).unwrap() - 16.0 / 6.0).abs() < 1e-15);
        assert!((participation_ratio(&[5.0, 0.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(participation_ratio(&[0.0, 0.0]).is_none());
    }

    #[test]
    fn mask_examples() {
        assert_eq!(effective_mask(&[2.0, 1.0, 1.0, 0.0], 2), vec![true, true, false, false]);
        assert_eq!(effective_mask(&[1.0; 4], 4), vec![true; 4]);
        assert_eq!(effective_mask(&[5.0, 0.0, 0.0, 0.0], 1), vec![true, false, false, false]);
    }
}
