//! State-vector evolution of the lackadaisical search walk.

mod coin;
mod shift;
mod state;
mod walk;

pub use coin::{CoinDirection, CoinVector, EdgeMode};
pub use shift::{destination, ShiftTable};
pub use state::StateVector;
pub use walk::{
    amplified_cost, apply_coin, apply_oracle, apply_shift, build_initial_state, run,
    success_probability, ProbabilityTrace, WalkConfig, Walker, DEFAULT_MEMORY_LIMIT,
};
