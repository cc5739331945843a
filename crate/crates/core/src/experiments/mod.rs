//! Experimental protocols: self-loop sweeps, scaling runs and marked-density runs.

mod density;
mod peak;
mod runner;
mod scaling;
mod sweep;
mod targets;

pub use density::{
    density_experiment, density_fixed_step, summarize_density, targets_for_fraction, DensityCell,
    DensityPlan, DensityRecord, DENSITY_PEAK_RULE, DENSITY_STEP_COEFFICIENT,
};
pub use peak::{detect_first_peak, PeakResult, PeakRule, PeakTracker};
pub use runner::{default_budget, run_to_peak, PeakRun, ShiftCache};
pub use scaling::{job_seed, scaling_experiment, NaRule, ScalingPlan, ScalingRecord, TargetChoice};
pub use sweep::{na_grid, sweep_self_loop, SweepPlan, SweepRow, SweepTable};
pub use targets::{
    derive_seed, random_target_set, random_target_set_in, rng_from_seed,
    sample_without_replacement, uniform_below, TargetEnsemble, TargetRegion, PRNG_ID,
};
