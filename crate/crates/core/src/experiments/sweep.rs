use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::peak::PeakRule;
use super::runner::{default_budget, run_to_peak, ShiftCache};
use crate::engine::{EdgeMode, WalkConfig};
use crate::error::{Error, Result};
use crate::topology::{GridVertex, TopologyParams};

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub na: f64,
    pub peak_step: usize,
    pub peak_probability: f64,
    pub optimal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub optimal_index: usize,
}

impl SweepTable {
    pub fn optimal(&self) -> &SweepRow {
        &self.rows[self.optimal_index]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub topology: TopologyParams,
    pub targets: Vec<GridVertex>,
    pub mode: EdgeMode,
    pub na_min: f64,
    pub na_max: f64,
    pub na_step: f64,
    pub rule: PeakRule,
    /// Step budget per point; `None` uses [`default_budget`].
    pub budget: Option<usize>,
}

/// `na_min, na_min + step, …` up to `na_max` inclusive.
///
/// Points are computed as `na_min + k·step` so the grid carries no
/// accumulated rounding.
pub fn na_grid(na_min: f64, na_max: f64, na_step: f64) -> Result<Vec<f64>> {
    if !(na_step > 0.0 && na_step.is_finite()) {
        return Err(Error::domain(format!("Na step must be > 0, got {na_step}")));
    }
    if !(na_min >= 0.0 && na_max >= na_min && na_max.is_finite()) {
        return Err(Error::domain(format!(
            "empty Na range [{na_min}, {na_max}]"
        )));
    }
    let count = ((na_max - na_min) / na_step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| na_min + k as f64 * na_step).collect())
}

/// Runs one walk per `Na` on the grid and flags the row with the highest
/// first-peak probability (ties go to the smaller `Na`).
pub fn sweep_self_loop(plan: &SweepPlan) -> Result<SweepTable> {
    if plan.targets.is_empty() {
        return Err(Error::domain("a sweep needs at least one target"));
    }
    let grid = na_grid(plan.na_min, plan.na_max, plan.na_step)?;
    let cache = ShiftCache::new();
    cache.get(plan.topology, plan.mode)?;
    let budget = plan
        .budget
        .unwrap_or_else(|| default_budget(plan.topology.vertices(), plan.targets.len(), plan.mode));
    let mut rows = grid
        .par_iter()
        .map(|&na| {
            let cfg = WalkConfig::new(plan.topology, na, plan.targets.iter().copied(), plan.mode)?;
            let run = run_to_peak(&cache, cfg, plan.rule, budget, &[])?;
            log::info!(
                "sweep Na={na}: peak step {} P={:.6}",
                run.peak.step,
                run.peak.probability
            );
            Ok(SweepRow {
                na,
                peak_step: run.peak.step,
                peak_probability: run.peak.probability,
                optimal: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let optimal_index = rows.iter().enumerate().fold(0, |best, (i, r)| {
        if r.peak_probability > rows[best].peak_probability {
            i
        } else {
            best
        }
    });
    rows[optimal_index].optimal = true;
    Ok(SweepTable {
        rows,
        optimal_index,
    })
}
