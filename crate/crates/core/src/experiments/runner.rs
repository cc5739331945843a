use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex};

use super::peak::{PeakResult, PeakRule, PeakTracker};
use crate::engine::{EdgeMode, ShiftTable, WalkConfig, Walker};
use crate::error::{Error, Result};
use crate::topology::TopologyParams;

/// Default step budget for a walk with `m` targets among `n` vertices:
/// `⌈6·√(N/M)⌉` with long-range edges, `⌈4·√((N/M)·ln(N/M))⌉ + 16` without.
pub fn default_budget(n: usize, m: usize, mode: EdgeMode) -> usize {
    let ratio = n as f64 / m.max(1) as f64;
    match mode {
        EdgeMode::Hn4 => (6.0 * ratio.sqrt()).ceil() as usize,
        EdgeMode::GridOnly => (4.0 * (ratio * ratio.ln().max(0.0)).sqrt()).ceil() as usize + 16,
    }
}

/// Shift tables shared between jobs on the same lattice.
#[derive(Debug, Default)]
pub struct ShiftCache {
    tables: Mutex<HashMap<(TopologyParams, EdgeMode), Arc<ShiftTable>>>,
}

impl ShiftCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, topology: TopologyParams, mode: EdgeMode) -> Result<Arc<ShiftTable>> {
        let mut tables = self.tables.lock().expect("shift cache poisoned");
        if let Some(t) = tables.get(&(topology, mode)) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(ShiftTable::new(topology, mode)?);
        tables.insert((topology, mode), Arc::clone(&t));
        Ok(t)
    }

    pub fn walker(&self, config: WalkConfig) -> Result<Walker<f64>> {
        let need = config.memory_estimate::<f64>();
        if need > crate::engine::DEFAULT_MEMORY_LIMIT {
            return Err(Error::Resource(format!(
                "{0}x{0} lattice needs {need} bytes",
                config.topology.side()
            )));
        }
        let shift = self.get(config.topology, config.edge_mode)?;
        Walker::with_shift(config, shift)
    }
}

/// Peak plus the probabilities sampled at requested extra steps.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakRun {
    pub peak: PeakResult,
    /// `(step, P(step))` for each requested probe, in request order.
    pub probes: Vec<(usize, f64)>,
    pub steps_taken: usize,
}

/// Evolves until the first peak is confirmed (or `budget` steps pass), also
/// sampling `P` at each step in `probes`.
pub fn run_to_peak(
    cache: &ShiftCache,
    config: WalkConfig,
    rule: PeakRule,
    budget: usize,
    probes: &[usize],
) -> Result<PeakRun> {
    let mut walker = cache.walker(config)?;
    let mut tracker = PeakTracker::new(rule);
    let last_probe = probes.iter().copied().max().unwrap_or(0);
    let mut sampled = vec![None; probes.len()];
    let steps_taken = walker.evolve(budget.max(last_probe), |t, p| {
        for (slot, &want) in sampled.iter_mut().zip(probes) {
            if want == t {
                *slot = Some(p);
            }
        }
        let peaked = tracker.push(p).is_some();
        if (peaked || t >= budget) && t >= last_probe {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let peak = tracker.finish()?;
    let probes = probes
        .iter()
        .zip(sampled)
        .map(|(&t, p)| (t, p.expect("probe step reached")))
        .collect();
    Ok(PeakRun {
        peak,
        probes,
        steps_taken,
    })
}
