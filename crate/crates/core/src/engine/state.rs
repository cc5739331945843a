use num_complex::Complex;
use rayon::prelude::*;

use super::coin::{CoinDirection, CoinVector, EdgeMode};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::topology::{GridVertex, TopologyParams};

/// Vertex count above which per-vertex kernels are split across rayon workers.
pub(crate) const PAR_THRESHOLD: usize = 1 << 12;

/// Amplitudes over (vertex, coin direction), stored vertex-major: the coin
/// block of vertex `v` occupies `amps[v·dim .. (v+1)·dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
    mode: EdgeMode,
    topology: TopologyParams,
}

impl<T: Real> StateVector<T> {
    /// The all-zero vector for `topology` and `mode`.
    pub fn zeros(topology: TopologyParams, mode: EdgeMode) -> Self {
        let len = topology.vertices() * mode.coin_dim();
        Self {
            amps: vec![Complex::new(T::zero(), T::zero()); len],
            mode,
            topology,
        }
    }

    /// Wraps raw amplitudes laid out vertex-major.
    pub fn from_amplitudes(
        topology: TopologyParams,
        mode: EdgeMode,
        amps: Vec<Complex<T>>,
    ) -> Result<Self> {
        let expected = topology.vertices() * mode.coin_dim();
        if amps.len() != expected {
            return Err(Error::domain(format!(
                "expected {expected} amplitudes, got {}",
                amps.len()
            )));
        }
        Ok(Self {
            amps,
            mode,
            topology,
        })
    }

    /// Product state `ψ_c ⊗ ψ_v` with `ψ_v` uniform over all vertices.
    pub fn uniform(topology: TopologyParams, coin: &CoinVector<T>, mode: EdgeMode) -> Self {
        assert_eq!(coin.dim(), mode.coin_dim(), "coin dimension mismatch");
        let inv_sqrt_n = T::one() / T::of_usize(topology.vertices()).sqrt();
        let block: Vec<Complex<T>> = coin
            .weights()
            .iter()
            .map(|&w| Complex::new(w * inv_sqrt_n, T::zero()))
            .collect();
        let mut amps = Vec::with_capacity(topology.vertices() * block.len());
        for _ in 0..topology.vertices() {
            amps.extend_from_slice(&block);
        }
        Self {
            amps,
            mode,
            topology,
        }
    }

    #[inline]
    pub fn topology(&self) -> TopologyParams {
        self.topology
    }

    #[inline]
    pub fn mode(&self) -> EdgeMode {
        self.mode
    }

    #[inline]
    pub fn coin_dim(&self) -> usize {
        self.mode.coin_dim()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.amps
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    /// Coin block of one vertex.
    #[inline]
    pub fn block(&self, v: GridVertex) -> &[Complex<T>] {
        let d = self.coin_dim();
        let i = self.topology.index(v) * d;
        &self.amps[i..i + d]
    }

    #[inline]
    pub fn block_mut(&mut self, v: GridVertex) -> &mut [Complex<T>] {
        let d = self.coin_dim();
        let i = self.topology.index(v) * d;
        &mut self.amps[i..i + d]
    }

    /// Amplitude of `dir` at `v`; `None` when the coin space lacks `dir`.
    pub fn amplitude(&self, dir: CoinDirection, v: GridVertex) -> Option<Complex<T>> {
        self.mode.slot(dir).map(|s| self.block(v)[s])
    }

    /// Squared norm `Σ|ψ|²`, accumulated in `f64` with compensated summation.
    pub fn norm_sqr(&self) -> f64 {
        let chunk_sum =
            |c: &[Complex<T>]| compensated_sum(c.iter().map(|a| a.norm_sqr().to_f64_lossy()));
        if self.topology.vertices() >= PAR_THRESHOLD {
            // fixed chunking keeps the sum independent of the worker count
            let partial: Vec<f64> = self.amps.par_chunks(1 << 14).map(chunk_sum).collect();
            compensated_sum(partial)
        } else {
            chunk_sum(&self.amps)
        }
    }

    /// Largest per-component absolute difference from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    /// Total probability on the vertices `indices`, summed over the coin space.
    pub fn probability_at(&self, indices: &[usize]) -> f64 {
        let d = self.coin_dim();
        indices
            .iter()
            .map(|&i| {
                self.amps[i * d..(i + 1) * d]
                    .iter()
                    .map(|a| a.norm_sqr().to_f64_lossy())
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_normalized() {
        for n in 2..=9 {
            let topo = TopologyParams::new(n).unwrap();
            for mode in [EdgeMode::Hn4, EdgeMode::GridOnly] {
                let coin = CoinVector::<f64>::new(mode, 8.5 / topo.vertices() as f64).unwrap();
                let s = StateVector::uniform(topo, &coin, mode);
                assert!((s.norm_sqr() - 1.0).abs() < 1e-14, "n={n} {mode}");
            }
        }
    }

    #[test]
    fn from_amplitudes_checks_length() {
        let topo = TopologyParams::new(2).unwrap();
        let r = StateVector::<f64>::from_amplitudes(topo, EdgeMode::Hn4, vec![]);
        assert!(r.is_err());
    }
}
