//! Test oracles built without the engine's shift table or topology helpers.
#![allow(dead_code)]

use hanoiwalk::engine::StateVector;
use hanoiwalk::experiments::rng_from_seed;
use hanoiwalk::{CoinDirection, EdgeMode, GridVertex, TopologyParams};
use num_complex::Complex64;
use rand::Rng;

/// Long-range neighbour of the 0-based coordinate `c` on a line of `side` sites,
/// found by listing the sites whose 1-based value has the same number of
/// trailing zeros and stepping cyclically through that sorted list.
pub fn lr_by_enumeration(c: usize, forward: bool, side: usize) -> usize {
    let n = side.trailing_zeros();
    let level = |x: usize| (x + 1).trailing_zeros();
    let lv = level(c);
    if lv >= n - 1 {
        return c;
    }
    let same: Vec<usize> = (0..side).filter(|&y| level(y) == lv).collect();
    let i = same.iter().position(|&y| y == c).unwrap();
    let k = same.len();
    if forward {
        same[(i + 1) % k]
    } else {
        same[(i + k - 1) % k]
    }
}

/// Vertex reached from `(x, y)` along `dir`, with the reversed direction.
pub fn move_along(
    dir: CoinDirection,
    x: usize,
    y: usize,
    side: usize,
) -> (CoinDirection, usize, usize) {
    use CoinDirection::*;
    let (nx, ny, back) = match dir {
        XPlus => ((x + 1) % side, y, XMinus),
        XMinus => ((x + side - 1) % side, y, XPlus),
        YPlus => (x, (y + 1) % side, YMinus),
        YMinus => (x, (y + side - 1) % side, YPlus),
        LXPlus => (lr_by_enumeration(x, true, side), y, LXMinus),
        LXMinus => (lr_by_enumeration(x, false, side), y, LXPlus),
        LYPlus => (x, lr_by_enumeration(y, true, side), LYMinus),
        LYMinus => (x, lr_by_enumeration(y, false, side), LYPlus),
        Hold => (x, y, Hold),
    };
    (back, nx, ny)
}

/// Dense complex matrix, row-major.
#[derive(Clone)]
pub struct Dense {
    pub dim: usize,
    pub a: Vec<Complex64>,
}

impl Dense {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            a: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.a[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.a[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.a[r * self.dim + c] = v;
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let d = self.dim;
        let mut out = Dense::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let x = self.get(i, k);
                if x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.a[i * d + j] += x * o.a[k * d + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Dense {
        let d = self.dim;
        let mut out = Dense::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, o: &Dense) -> f64 {
        self.a
            .iter()
            .zip(&o.a)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// One step `S·C·O` of the walk written out as explicit matrices.
pub fn dense_step(
    side: usize,
    mode: EdgeMode,
    self_loop_weight: f64,
    targets: &[GridVertex],
) -> Dense {
    let dirs = mode.directions();
    let c = dirs.len();
    let n = side * side;
    let dim = c * n;
    let slot = |d: CoinDirection| dirs.iter().position(|&e| e == d).unwrap();
    let idx = |x: usize, y: usize, d: usize| (x + side * y) * c + d;

    let mut oracle = Dense::identity(dim);
    for t in targets {
        for d in 0..c {
            let i = idx(t.x, t.y, d);
            oracle.set(i, i, Complex64::new(-1.0, 0.0));
        }
    }

    let edges = (c - 1) as f64;
    let mut w = vec![1.0 / (edges + self_loop_weight).sqrt(); c];
    w[c - 1] = self_loop_weight.sqrt() / (edges + self_loop_weight).sqrt();
    let mut coin = Dense::zeros(dim);
    for v in 0..n {
        for i in 0..c {
            for j in 0..c {
                let delta = if i == j { 1.0 } else { 0.0 };
                coin.set(
                    v * c + i,
                    v * c + j,
                    Complex64::new(2.0 * w[i] * w[j] - delta, 0.0),
                );
            }
        }
    }

    let mut shift = Dense::zeros(dim);
    for y in 0..side {
        for x in 0..side {
            for &d in dirs {
                let (back, nx, ny) = move_along(d, x, y, side);
                shift.set(
                    idx(nx, ny, slot(back)),
                    idx(x, y, slot(d)),
                    Complex64::new(1.0, 0.0),
                );
            }
        }
    }
    shift.mul(&coin).mul(&oracle)
}

/// Normalized state with independent Gaussian-ish components.
pub fn random_state(topology: TopologyParams, mode: EdgeMode, seed: u64) -> StateVector<f64> {
    let mut rng = rng_from_seed(seed);
    let len = topology.vertices() * mode.coin_dim();
    let mut amps: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(topology, mode, amps).unwrap()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Prints the one-line verdict of an acceptance criterion and fails the test
/// when it does not hold.
pub fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {id} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} failed: {name}: {detail}");
}
