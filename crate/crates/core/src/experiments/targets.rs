//! Reproducible random target sets.
//!
//! Every draw uses ChaCha8 seeded through `seed_from_u64`, consumed one `u64`
//! at a time. Bounded integers come from rejection sampling on the top of the
//! 64-bit range and sets are built by a partial Fisher–Yates shuffle over the
//! admissible vertices in index order, so the same seed yields the same set in
//! any implementation that follows these steps.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{ExceptionalPolicy, GridVertex, TopologyParams};

/// Identifier of the sampling procedure, recorded with every output.
pub const PRNG_ID: &str = "chacha8/seed_from_u64/reject-u64/partial-fisher-yates/v1";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives the seed of job `index` from a base seed (SplitMix64 finalizer).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform integer in `[0, bound)`.
pub fn uniform_below<R: RngCore>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0);
    // largest multiple of `bound` that fits; values at or above it are redrawn
    let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// `m` distinct items drawn uniformly from `pool`, in draw order.
pub fn sample_without_replacement<T: Copy, R: RngCore>(
    pool: &[T],
    m: usize,
    rng: &mut R,
) -> Result<Vec<T>> {
    if m > pool.len() {
        return Err(Error::domain(format!(
            "cannot draw {m} targets from {} admissible vertices",
            pool.len()
        )));
    }
    let mut work = pool.to_vec();
    for i in 0..m {
        let j = i + uniform_below(rng, (work.len() - i) as u64) as usize;
        work.swap(i, j);
    }
    work.truncate(m);
    Ok(work)
}

/// Where random targets may be placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetRegion {
    pub policy: ExceptionalPolicy,
    /// Restrict draws to the `w × w` corner `[0, w)²`, e.g. 16 for targets spread
    /// over a 16 × 16 patch. `None` means the whole lattice.
    pub window: Option<usize>,
}

impl TargetRegion {
    pub fn whole(policy: ExceptionalPolicy) -> Self {
        Self {
            policy,
            window: None,
        }
    }

    /// Admissible vertices of `topology` in index order.
    pub fn candidates(&self, topology: TopologyParams) -> Vec<GridVertex> {
        let w = self.window.unwrap_or(topology.side()).min(topology.side());
        topology
            .admissible_vertices(self.policy)
            .into_iter()
            .filter(|v| v.x < w && v.y < w)
            .collect()
    }
}

/// `m` distinct admissible targets, reproducible from `seed`.
pub fn random_target_set(
    m: usize,
    topology: TopologyParams,
    seed: u64,
    policy: ExceptionalPolicy,
) -> Result<Vec<GridVertex>> {
    random_target_set_in(m, topology, seed, TargetRegion::whole(policy))
}

pub fn random_target_set_in(
    m: usize,
    topology: TopologyParams,
    seed: u64,
    region: TargetRegion,
) -> Result<Vec<GridVertex>> {
    let pool = region.candidates(topology);
    let mut rng = rng_from_seed(seed);
    sample_without_replacement(&pool, m, &mut rng)
}

/// One target set per trial, all of size `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetEnsemble {
    pub sets: Vec<Vec<GridVertex>>,
    pub seed: u64,
    pub region: TargetRegion,
}

impl TargetEnsemble {
    /// Trial `k` is drawn with seed `derive_seed(seed, k)`.
    pub fn generate(
        m: usize,
        trials: usize,
        topology: TopologyParams,
        seed: u64,
        region: TargetRegion,
    ) -> Result<Self> {
        let sets = (0..trials)
            .map(|k| random_target_set_in(m, topology, derive_seed(seed, k as u64), region))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { sets, seed, region })
    }
}
