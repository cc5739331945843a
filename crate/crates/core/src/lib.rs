//! Lackadaisical quantum-walk search on a periodic 2-D grid with Hanoi-network
//! (HN4) long-range edges.
//!
//! The simulator is generic over the amplitude component type ([`Real`]); the
//! aliases below fix it to `f64`, which every experiment uses.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod io;
pub mod scalar;
pub mod topology;

pub use engine::{CoinDirection, EdgeMode, ProbabilityTrace, WalkConfig};
pub use error::{Error, Result};
pub use fit::{fit_scaling, FitResult, LogBase, RuntimeModel, ScalingPoint};
pub use scalar::Real;
pub use topology::{ExceptionalPolicy, GridVertex, TopologyParams};

pub type StateVector = engine::StateVector<f64>;
pub type Walker = engine::Walker<f64>;
pub type CoinVector = engine::CoinVector<f64>;

pub type StateVectorF32 = engine::StateVector<f32>;
pub type WalkerF32 = engine::Walker<f32>;
pub type FitResultF32 = fit::FitResult<f32>;

/// Version of the engine, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
