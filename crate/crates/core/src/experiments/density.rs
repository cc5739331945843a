use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::peak::PeakRule;
use super::runner::{run_to_peak, ShiftCache};
use super::scaling::NaRule;
use super::targets::{derive_seed, random_target_set_in, TargetRegion};
use crate::engine::{amplified_cost, EdgeMode, WalkConfig};
use crate::error::{Error, Result};
use crate::topology::TopologyParams;

/// Coefficient of the `√(N/M)` step count at which density runs are sampled.
pub const DENSITY_STEP_COEFFICIENT: f64 = 1.75;

/// Peak rule for dense target sets. With `M/N` of 10–30 % the default
/// `5·P(0)` floor is at or above 0.5, so only a first-maximum test is kept.
pub const DENSITY_PEAK_RULE: PeakRule = PeakRule {
    min_gain: 1.0,
    decline: 5,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DensityPlan {
    pub sides: Vec<usize>,
    pub fractions: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub na_rule: NaRule,
    pub region: TargetRegion,
    pub rule: PeakRule,
}

/// One density trial: the walk sampled at `round(1.75·√(N/M))` and at its first peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    pub side: usize,
    pub n_elements: usize,
    pub m: usize,
    pub fraction: f64,
    pub na: f64,
    pub mode: EdgeMode,
    pub seed: u64,
    pub trial: usize,
    pub fixed_step: usize,
    pub fixed_step_probability: f64,
    pub peak_step: usize,
    pub peak_probability: f64,
    pub amplified_cost: f64,
}

/// Trial averages for one `(side, fraction)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCell {
    pub side: usize,
    pub fraction: f64,
    pub m: usize,
    pub trials: usize,
    pub mean_fixed_step_probability: f64,
    pub mean_peak_probability: f64,
    pub mean_peak_step: f64,
}

/// Number of targets for a marked fraction: `round(fraction·N)`.
pub fn targets_for_fraction(fraction: f64, topology: TopologyParams) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::domain(format!(
            "marked fraction must be in (0, 1), got {fraction}"
        )));
    }
    Ok(((fraction * topology.vertices() as f64).round() as usize).max(1))
}

/// Step at which a density run is sampled.
pub fn density_fixed_step(n: usize, m: usize) -> usize {
    (DENSITY_STEP_COEFFICIENT * (n as f64 / m as f64).sqrt()).round() as usize
}

/// Runs `trials` random target sets of `round(fraction·N)` vertices per side
/// and fraction, with long-range edges. Records are ordered by side, fraction, trial.
pub fn density_experiment(plan: &DensityPlan) -> Result<Vec<DensityRecord>> {
    if plan.trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    struct Job {
        topology: TopologyParams,
        fraction: f64,
        m: usize,
        trial: usize,
        seed: u64,
        targets: Vec<crate::topology::GridVertex>,
    }
    let mut jobs = Vec::new();
    for &side in &plan.sides {
        let topology = TopologyParams::from_side(side)?;
        for (fi, &fraction) in plan.fractions.iter().enumerate() {
            let m = targets_for_fraction(fraction, topology)?;
            for trial in 0..plan.trials {
                let seed = derive_seed(derive_seed(plan.seed, fi as u64), trial as u64);
                let targets = random_target_set_in(m, topology, seed, plan.region)?;
                jobs.push(Job {
                    topology,
                    fraction,
                    m,
                    trial,
                    seed,
                    targets,
                });
            }
        }
    }

    let cache = ShiftCache::new();
    let mode = EdgeMode::Hn4;
    jobs.par_iter()
        .map(|job| {
            let n = job.topology.vertices();
            let na = plan.na_rule.scaled_weight(job.m);
            let cfg = WalkConfig::new(job.topology, na, job.targets.iter().copied(), mode)?;
            let fixed = density_fixed_step(n, job.m);
            // generous horizon: the peak of a dense set arrives within a few √(N/M)
            let budget = (6.0 * (n as f64 / job.m as f64).sqrt()).ceil() as usize + 16;
            let run = run_to_peak(&cache, cfg, plan.rule, budget, &[fixed])?;
            log::info!(
                "density side {} fraction {} trial {}: P({fixed})={:.4}, peak step {} P={:.4}",
                job.topology.side(),
                job.fraction,
                job.trial,
                run.probes[0].1,
                run.peak.step,
                run.peak.probability
            );
            Ok(DensityRecord {
                side: job.topology.side(),
                n_elements: n,
                m: job.m,
                fraction: job.fraction,
                na,
                mode,
                seed: job.seed,
                trial: job.trial,
                fixed_step: fixed,
                fixed_step_probability: run.probes[0].1,
                peak_step: run.peak.step,
                peak_probability: run.peak.probability,
                amplified_cost: amplified_cost(run.peak.step, run.peak.probability)?,
            })
        })
        .collect()
}

/// Averages records per `(side, fraction)` in first-seen order.
pub fn summarize_density(records: &[DensityRecord]) -> Vec<DensityCell> {
    let mut cells: Vec<(DensityCell, usize)> = Vec::new();
    for r in records {
        let pos = cells
            .iter()
            .position(|(c, _)| c.side == r.side && c.fraction == r.fraction);
        let (cell, _) = match pos {
            Some(i) => &mut cells[i],
            None => {
                cells.push((
                    DensityCell {
                        side: r.side,
                        fraction: r.fraction,
                        m: r.m,
                        trials: 0,
                        mean_fixed_step_probability: 0.0,
                        mean_peak_probability: 0.0,
                        mean_peak_step: 0.0,
                    },
                    0,
                ));
                cells.last_mut().unwrap()
            }
        };
        cell.trials += 1;
        cell.mean_fixed_step_probability += r.fixed_step_probability;
        cell.mean_peak_probability += r.peak_probability;
        cell.mean_peak_step += r.peak_step as f64;
    }
    cells
        .into_iter()
        .map(|(mut c, _)| {
            let k = c.trials as f64;
            c.mean_fixed_step_probability /= k;
            c.mean_peak_probability /= k;
            c.mean_peak_step /= k;
            c
        })
        .collect()
}
