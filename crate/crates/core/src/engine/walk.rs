use std::ops::ControlFlow;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use super::coin::{CoinVector, EdgeMode};
use super::shift::ShiftTable;
use super::state::{StateVector, PAR_THRESHOLD};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::topology::{ExceptionalPolicy, GridVertex, TopologyParams};

/// Default ceiling on the engine's working set.
pub const DEFAULT_MEMORY_LIMIT: usize = 4 << 30;

/// Parameters of one search walk.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub topology: TopologyParams,
    /// Per-vertex self-loop weight `a` (not `N·a`).
    pub self_loop_weight: f64,
    /// Marked vertices, sorted and free of duplicates.
    pub targets: Vec<GridVertex>,
    pub edge_mode: EdgeMode,
}

impl WalkConfig {
    /// Builds a config from the scaled weight `Na`; the stored weight is `Na / N`.
    pub fn new(
        topology: TopologyParams,
        scaled_weight: f64,
        targets: impl IntoIterator<Item = GridVertex>,
        edge_mode: EdgeMode,
    ) -> Result<Self> {
        if !(scaled_weight >= 0.0 && scaled_weight.is_finite()) {
            return Err(Error::domain(format!(
                "Na must be finite and >= 0, got {scaled_weight}"
            )));
        }
        let mut targets: Vec<GridVertex> = targets.into_iter().collect();
        targets.sort_unstable_by_key(|v| topology.index(*v));
        targets.dedup();
        if let Some(bad) = targets.iter().find(|v| !topology.contains(**v)) {
            return Err(Error::domain(format!(
                "target {bad} outside the {0}x{0} lattice",
                topology.side()
            )));
        }
        Ok(Self {
            topology,
            self_loop_weight: scaled_weight / topology.vertices() as f64,
            targets,
            edge_mode,
        })
    }

    /// `N·a`, the scaled self-loop weight.
    pub fn scaled_weight(&self) -> f64 {
        self.self_loop_weight * self.topology.vertices() as f64
    }

    pub fn target_indices(&self) -> Vec<usize> {
        self.targets
            .iter()
            .map(|&v| self.topology.index(v))
            .collect()
    }

    /// Targets lying on an exceptional line.
    pub fn exceptional_targets(&self) -> Vec<GridVertex> {
        self.targets
            .iter()
            .copied()
            .filter(|&v| self.topology.is_exceptional(v, ExceptionalPolicy::Line))
            .collect()
    }

    /// Working-set size in bytes for scalar `T`: two amplitude buffers plus the shift table.
    pub fn memory_estimate<T>(&self) -> usize {
        let slots = self.topology.vertices() * self.edge_mode.coin_dim();
        2 * slots * std::mem::size_of::<Complex<T>>() + slots * std::mem::size_of::<u32>()
    }
}

/// Success probability `P(t)` for `t = 0, 1, …`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbabilityTrace {
    values: Vec<f64>,
}

impl ProbabilityTrace {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn push(&mut self, p: f64) {
        self.values.push(p);
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, t: usize) -> Option<f64> {
        self.values.get(t).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// `ψ_c ⊗ ψ_v` for the config's coin.
pub fn build_initial_state<T: Real>(config: &WalkConfig) -> Result<StateVector<T>> {
    let coin = CoinVector::new(config.edge_mode, config.self_loop_weight)?;
    Ok(StateVector::uniform(
        config.topology,
        &coin,
        config.edge_mode,
    ))
}

/// Negates every coin amplitude at the listed vertex indices.
pub fn apply_oracle<T: Real>(state: &mut StateVector<T>, target_indices: &[usize]) {
    let d = state.coin_dim();
    let amps = state.as_mut_slice();
    for &i in target_indices {
        for a in &mut amps[i * d..(i + 1) * d] {
            *a = -*a;
        }
    }
}

/// Applies the weighted Grover coin to every vertex block.
pub fn apply_coin<T: Real>(state: &mut StateVector<T>, coin: &CoinVector<T>) {
    assert_eq!(coin.dim(), state.coin_dim(), "coin dimension mismatch");
    let d = coin.dim();
    let big = state.topology().vertices() >= PAR_THRESHOLD;
    let amps = state.as_mut_slice();
    if big {
        amps.par_chunks_mut(d * 1024).for_each(|chunk| {
            chunk.chunks_exact_mut(d).for_each(|b| coin.reflect(b));
        });
    } else {
        amps.chunks_exact_mut(d).for_each(|b| coin.reflect(b));
    }
}

/// Flip-flop shift without a caller-supplied scratch buffer.
pub fn apply_shift<T: Real>(state: &mut StateVector<T>, table: &ShiftTable) {
    assert_eq!(table.len(), state.len(), "shift table does not match state");
    let out = {
        let input = state.as_slice();
        let mut out = vec![input[0]; input.len()];
        table.gather(input, &mut out);
        out
    };
    state.as_mut_slice().copy_from_slice(&out);
}

/// Probability mass on the target vertices, summed over all coin directions.
pub fn success_probability<T: Real>(state: &StateVector<T>, target_indices: &[usize]) -> f64 {
    state.probability_at(target_indices)
}

/// Cost of boosting the final amplitude `√P` to constant probability: `t/√P`.
pub fn amplified_cost(peak_step: usize, peak_probability: f64) -> Result<f64> {
    if !(peak_probability > 0.0 && peak_probability <= 1.0 + 1e-9) {
        return Err(Error::domain(format!(
            "peak probability must be in (0, 1], got {peak_probability}"
        )));
    }
    Ok(peak_step as f64 / peak_probability.sqrt())
}

/// A running search walk: state, scratch buffer and precomputed operators.
#[derive(Debug, Clone)]
pub struct Walker<T> {
    config: WalkConfig,
    coin: CoinVector<T>,
    shift: Arc<ShiftTable>,
    state: StateVector<T>,
    scratch: Vec<Complex<T>>,
    target_indices: Vec<usize>,
    steps: usize,
}

impl<T: Real> Walker<T> {
    pub fn new(config: WalkConfig) -> Result<Self> {
        Self::with_memory_limit(config, DEFAULT_MEMORY_LIMIT)
    }

    pub fn with_memory_limit(config: WalkConfig, limit: usize) -> Result<Self> {
        let need = config.memory_estimate::<T>();
        if need > limit {
            return Err(Error::Resource(format!(
                "{0}x{0} lattice needs {need} bytes, limit is {limit}",
                config.topology.side()
            )));
        }
        let shift = Arc::new(ShiftTable::new(config.topology, config.edge_mode)?);
        Self::with_shift(config, shift)
    }

    /// Reuses a shift table built for the same topology and edge mode.
    pub fn with_shift(config: WalkConfig, shift: Arc<ShiftTable>) -> Result<Self> {
        if shift.topology() != config.topology || shift.mode() != config.edge_mode {
            return Err(Error::domain("shift table built for a different lattice"));
        }
        for v in config.exceptional_targets() {
            log::warn!(
                "target {v} lies on an exceptional line of the {0}x{0} lattice",
                config.topology.side()
            );
        }
        let coin = CoinVector::new(config.edge_mode, config.self_loop_weight)?;
        let state = StateVector::uniform(config.topology, &coin, config.edge_mode);
        let scratch = Vec::with_capacity(state.len());
        let target_indices = config.target_indices();
        Ok(Self {
            config,
            coin,
            shift,
            state,
            scratch,
            target_indices,
            steps: 0,
        })
    }

    pub fn config(&self) -> &WalkConfig {
        &self.config
    }

    pub fn state(&self) -> &StateVector<T> {
        &self.state
    }

    /// Replaces the state, e.g. with a random vector for operator tests.
    pub fn set_state(&mut self, state: StateVector<T>) -> Result<()> {
        if state.len() != self.state.len() || state.mode() != self.config.edge_mode {
            return Err(Error::domain("state does not match the walk"));
        }
        self.state = state;
        Ok(())
    }

    pub fn coin(&self) -> &CoinVector<T> {
        &self.coin
    }

    pub fn shift_table(&self) -> &Arc<ShiftTable> {
        &self.shift
    }

    /// Steps applied since construction.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn success_probability(&self) -> f64 {
        success_probability(&self.state, &self.target_indices)
    }

    /// One application of `U = S·C·(I ⊗ oracle)`: oracle, coin, then shift.
    pub fn step(&mut self) {
        apply_oracle(&mut self.state, &self.target_indices);
        apply_coin(&mut self.state, &self.coin);
        let amps = self.state.as_mut_slice();
        self.scratch.resize(amps.len(), amps[0]);
        self.shift.gather(amps, &mut self.scratch);
        amps.copy_from_slice(&self.scratch);
        self.steps += 1;
    }

    /// Steps until `t_max` or until `observe(t, P(t))` breaks; `t = 0` is
    /// reported before the first step. Returns the number of steps taken.
    pub fn evolve<F>(&mut self, t_max: usize, mut observe: F) -> usize
    where
        F: FnMut(usize, f64) -> ControlFlow<()>,
    {
        let start = self.steps;
        if observe(self.steps, self.success_probability()).is_break() {
            return 0;
        }
        while self.steps - start < t_max {
            self.step();
            if observe(self.steps, self.success_probability()).is_break() {
                break;
            }
        }
        self.steps - start
    }
}

/// Runs a fresh walk for `t_max` steps and records `P(t)` for `t = 0..=t_max`.
pub fn run<T: Real>(config: &WalkConfig, t_max: usize) -> Result<ProbabilityTrace> {
    let mut walker = Walker::<T>::new(config.clone())?;
    let mut trace = ProbabilityTrace::default();
    walker.evolve(t_max, |_, p| {
        trace.push(p);
        ControlFlow::Continue(())
    });
    Ok(trace)
}
