use num_complex::Complex;
use rayon::prelude::*;

use super::coin::{CoinDirection, EdgeMode};
use super::state::PAR_THRESHOLD;
use crate::error::{Error, Result};
use crate::topology::{grid_neighbor, long_range_neighbor, GridVertex, Step, TopologyParams};

/// Flip-flop shift as a gather table: after the shift, slot `d` holds the
/// amplitude previously found at slot `source[d]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftTable {
    source: Vec<u32>,
    mode: EdgeMode,
    topology: TopologyParams,
}

/// Where the amplitude of `dir` at `v` goes: the vertex reached along `dir`,
/// with the coin reversed. `Hold` stays put.
pub fn destination(
    topology: TopologyParams,
    dir: CoinDirection,
    v: GridVertex,
) -> (CoinDirection, GridVertex) {
    use CoinDirection::*;
    let side = topology.side();
    let n = topology.line_exponent();
    // HN4 lines are 1-based
    let lr = |c: usize, step: Step| {
        long_range_neighbor(c + 1, step, n).expect("grid coordinate is in range") - 1
    };
    let to = match dir {
        XPlus => GridVertex::new(grid_neighbor(v.x, Step::Forward, side), v.y),
        XMinus => GridVertex::new(grid_neighbor(v.x, Step::Backward, side), v.y),
        YPlus => GridVertex::new(v.x, grid_neighbor(v.y, Step::Forward, side)),
        YMinus => GridVertex::new(v.x, grid_neighbor(v.y, Step::Backward, side)),
        LXPlus => GridVertex::new(lr(v.x, Step::Forward), v.y),
        LXMinus => GridVertex::new(lr(v.x, Step::Backward), v.y),
        LYPlus => GridVertex::new(v.x, lr(v.y, Step::Forward)),
        LYMinus => GridVertex::new(v.x, lr(v.y, Step::Backward)),
        Hold => v,
    };
    (dir.flipped(), to)
}

impl ShiftTable {
    /// Precomputes the permutation and verifies that it is a bijection.
    pub fn new(topology: TopologyParams, mode: EdgeMode) -> Result<Self> {
        let dim = mode.coin_dim();
        let len = topology.vertices() * dim;
        if len > u32::MAX as usize {
            return Err(Error::Resource(format!(
                "{len} amplitudes exceed the 32-bit shift table"
            )));
        }
        const UNSET: u32 = u32::MAX;
        let mut source = vec![UNSET; len];
        for vi in 0..topology.vertices() {
            let v = topology.vertex(vi);
            for (slot, &dir) in mode.directions().iter().enumerate() {
                let (to_dir, to) = destination(topology, dir, v);
                let to_slot = mode.slot(to_dir).expect("flip stays in the coin space");
                let dest = topology.index(to) * dim + to_slot;
                if source[dest] != UNSET {
                    return Err(Error::domain(format!(
                        "shift is not injective: slot {dest} reached twice"
                    )));
                }
                source[dest] = (vi * dim + slot) as u32;
            }
        }
        // injective on a finite set of equal size, hence bijective
        debug_assert!(source.iter().all(|&s| s != UNSET));
        Ok(Self {
            source,
            mode,
            topology,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.source.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    #[inline]
    pub fn sources(&self) -> &[u32] {
        &self.source
    }

    pub fn topology(&self) -> TopologyParams {
        self.topology
    }

    pub fn mode(&self) -> EdgeMode {
        self.mode
    }

    /// True iff every source slot is used exactly once.
    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.source.len()];
        for &s in &self.source {
            let s = s as usize;
            if s >= seen.len() || seen[s] {
                return false;
            }
            seen[s] = true;
        }
        true
    }

    /// Gathers `input` into `output` through the table.
    pub fn gather<T: Copy + Send + Sync>(&self, input: &[T], output: &mut [T]) {
        assert_eq!(input.len(), self.source.len());
        assert_eq!(output.len(), self.source.len());
        if self.topology.vertices() >= PAR_THRESHOLD {
            output
                .par_chunks_mut(1 << 14)
                .zip(self.source.par_chunks(1 << 14))
                .for_each(|(out, src)| {
                    for (o, &s) in out.iter_mut().zip(src) {
                        *o = input[s as usize];
                    }
                });
        } else {
            for (o, &s) in output.iter_mut().zip(&self.source) {
                *o = input[s as usize];
            }
        }
    }

    /// Gathers `amps` through `scratch` and swaps the buffers back.
    pub fn apply_with_scratch<T: Copy + Send + Sync>(
        &self,
        amps: &mut Vec<Complex<T>>,
        scratch: &mut Vec<Complex<T>>,
    ) {
        scratch.resize(amps.len(), amps[0]);
        self.gather(amps, scratch);
        std::mem::swap(amps, scratch);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_moves_flip_the_coin() {
        let topo = TopologyParams::new(4).unwrap();
        let (d, v) = destination(topo, CoinDirection::XPlus, GridVertex::new(15, 3));
        assert_eq!((d, v), (CoinDirection::XMinus, GridVertex::new(0, 3)));
        let (d, v) = destination(topo, CoinDirection::YMinus, GridVertex::new(2, 0));
        assert_eq!((d, v), (CoinDirection::YPlus, GridVertex::new(2, 15)));
        let (d, v) = destination(topo, CoinDirection::Hold, GridVertex::new(2, 0));
        assert_eq!((d, v), (CoinDirection::Hold, GridVertex::new(2, 0)));
    }

    #[test]
    fn long_range_moves_use_hn4_lines() {
        let topo = TopologyParams::new(4).unwrap();
        // x = 2 is HN4 site 3 (level 0, rank 1); its forward neighbour is site 5
        let (d, v) = destination(topo, CoinDirection::LXPlus, GridVertex::new(2, 9));
        assert_eq!((d, v), (CoinDirection::LXMinus, GridVertex::new(4, 9)));
        // x = 7 is HN4 site 8 = 2^(n−1): self-loop
        let (d, v) = destination(topo, CoinDirection::LXPlus, GridVertex::new(7, 9));
        assert_eq!((d, v), (CoinDirection::LXMinus, GridVertex::new(7, 9)));
        let (d, v) = destination(topo, CoinDirection::LYMinus, GridVertex::new(1, 15));
        assert_eq!((d, v), (CoinDirection::LYPlus, GridVertex::new(1, 15)));
    }

    #[test]
    fn tables_are_permutations() {
        for n in 2..=6 {
            let topo = TopologyParams::new(n).unwrap();
            for mode in [EdgeMode::Hn4, EdgeMode::GridOnly] {
                let t = ShiftTable::new(topo, mode).unwrap();
                assert!(t.is_permutation(), "n={n} {mode}");
            }
        }
    }

    #[test]
    fn table_is_an_involution() {
        let topo = TopologyParams::new(5).unwrap();
        let t = ShiftTable::new(topo, EdgeMode::Hn4).unwrap();
        let src = t.sources();
        for (d, &s) in src.iter().enumerate() {
            assert_eq!(src[s as usize] as usize, d);
        }
    }
}
