use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Whether the grid carries HN4 long-range edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeMode {
    /// Four grid edges, four long-range edges and the self-loop (9-dim coin).
    Hn4,
    /// Plain lackadaisical grid walk: four grid edges and the self-loop (5-dim coin).
    #[serde(rename = "grid")]
    GridOnly,
}

impl EdgeMode {
    const HN4_DIRECTIONS: [CoinDirection; 9] = [
        CoinDirection::XPlus,
        CoinDirection::XMinus,
        CoinDirection::YPlus,
        CoinDirection::YMinus,
        CoinDirection::LXPlus,
        CoinDirection::LXMinus,
        CoinDirection::LYPlus,
        CoinDirection::LYMinus,
        CoinDirection::Hold,
    ];
    const GRID_DIRECTIONS: [CoinDirection; 5] = [
        CoinDirection::XPlus,
        CoinDirection::XMinus,
        CoinDirection::YPlus,
        CoinDirection::YMinus,
        CoinDirection::Hold,
    ];

    /// Coin basis in slot order; `Hold` is always the last slot.
    pub fn directions(self) -> &'static [CoinDirection] {
        match self {
            EdgeMode::Hn4 => &Self::HN4_DIRECTIONS,
            EdgeMode::GridOnly => &Self::GRID_DIRECTIONS,
        }
    }

    #[inline]
    pub fn coin_dim(self) -> usize {
        self.directions().len()
    }

    /// Number of moving (non-`Hold`) directions.
    #[inline]
    pub fn edge_count(self) -> usize {
        self.coin_dim() - 1
    }

    /// Slot of `dir` inside a vertex block, or `None` if the mode lacks it.
    pub fn slot(self, dir: CoinDirection) -> Option<usize> {
        self.directions().iter().position(|&d| d == dir)
    }
}

impl fmt::Display for EdgeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeMode::Hn4 => "hn4",
            EdgeMode::GridOnly => "grid",
        })
    }
}

impl FromStr for EdgeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hn4" => Ok(EdgeMode::Hn4),
            "grid" | "grid_only" | "grid-only" => Ok(EdgeMode::GridOnly),
            other => Err(Error::domain(format!("unknown edge mode {other:?}"))),
        }
    }
}

/// Coin basis state: which edge the walker takes next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoinDirection {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
    LXPlus,
    LXMinus,
    LYPlus,
    LYMinus,
    Hold,
}

impl CoinDirection {
    /// The direction a flip-flop shift leaves behind after moving along `self`.
    pub fn flipped(self) -> Self {
        use CoinDirection::*;
        match self {
            XPlus => XMinus,
            XMinus => XPlus,
            YPlus => YMinus,
            YMinus => YPlus,
            LXPlus => LXMinus,
            LXMinus => LXPlus,
            LYPlus => LYMinus,
            LYMinus => LYPlus,
            Hold => Hold,
        }
    }
}

/// Weighted uniform coin state `ψ_c`: `1/√(E+a)` on each of the E edges and
/// `√a/√(E+a)` on the self-loop.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinVector<T> {
    weights: Vec<T>,
}

impl<T: Real> CoinVector<T> {
    pub fn new(mode: EdgeMode, self_loop_weight: f64) -> Result<Self> {
        if !(self_loop_weight >= 0.0 && self_loop_weight.is_finite()) {
            return Err(Error::domain(format!(
                "self-loop weight must be finite and >= 0, got {self_loop_weight}"
            )));
        }
        let edges = mode.edge_count() as f64;
        let norm = (edges + self_loop_weight).sqrt();
        let mut weights = vec![T::of(1.0 / norm); mode.coin_dim()];
        *weights.last_mut().unwrap() = T::of(self_loop_weight.sqrt() / norm);
        Ok(Self { weights })
    }

    #[inline]
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Grover reflection `2|ψ_c⟩⟨ψ_c| − I` on one vertex block.
    #[inline]
    pub fn reflect(&self, block: &mut [Complex<T>]) {
        debug_assert_eq!(block.len(), self.weights.len());
        let mut overlap = Complex::new(T::zero(), T::zero());
        for (b, &w) in block.iter().zip(&self.weights) {
            overlap = overlap + b.scale(w);
        }
        let twice = overlap + overlap;
        for (b, &w) in block.iter_mut().zip(&self.weights) {
            *b = twice.scale(w) - *b;
        }
    }
}
