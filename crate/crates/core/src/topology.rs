//! Integer arithmetic for the periodic grid with HN4 long-range edges.
//!
//! Grid coordinates are stored 0-based (`x, y ∈ [0, L)`). The Hanoi hierarchy
//! is defined on 1-based line coordinates `x_hn4 = x + 1 ∈ [1, 2^n]`, where every
//! site factors uniquely as `2^level · (2·rank + 1)`. Within one level, sites are
//! joined to their rank neighbours `rank ± 1`, closed cyclically so the shift is a
//! bijection. Levels `n − 1` and `n` hold a single site each and their long-range
//! edges degenerate to self-loops; those sites are the exceptional points.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported line exponent. A 2^15 × 2^15 lattice already needs
/// hundreds of GiB of amplitudes.
pub const MAX_LINE_EXPONENT: u32 = 15;

/// Lattice size: `L = 2^n` sites per line and `N = L²` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopologyParams {
    n: u32,
}

impl TopologyParams {
    pub fn new(n: u32) -> Result<Self> {
        if !(2..=MAX_LINE_EXPONENT).contains(&n) {
            return Err(Error::domain(format!(
                "line exponent must be in [2, {MAX_LINE_EXPONENT}], got {n}"
            )));
        }
        Ok(Self { n })
    }

    /// Builds the topology for a lattice of `side × side` vertices.
    pub fn from_side(side: usize) -> Result<Self> {
        if side < 4 || !side.is_power_of_two() {
            return Err(Error::domain(format!(
                "side must be a power of two >= 4, got {side}"
            )));
        }
        Self::new(side.trailing_zeros())
    }

    #[inline]
    pub fn line_exponent(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn side(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn vertices(&self) -> usize {
        self.side() * self.side()
    }

    #[inline]
    pub fn index(&self, v: GridVertex) -> usize {
        v.x + self.side() * v.y
    }

    #[inline]
    pub fn vertex(&self, index: usize) -> GridVertex {
        GridVertex {
            x: index % self.side(),
            y: index / self.side(),
        }
    }

    pub fn contains(&self, v: GridVertex) -> bool {
        v.x < self.side() && v.y < self.side()
    }

    pub fn is_exceptional(&self, v: GridVertex, policy: ExceptionalPolicy) -> bool {
        is_exceptional(v, self.n, policy)
    }

    /// All vertices that are not excluded by `policy`, in index order.
    pub fn admissible_vertices(&self, policy: ExceptionalPolicy) -> Vec<GridVertex> {
        (0..self.vertices())
            .map(|i| self.vertex(i))
            .filter(|&v| !self.is_exceptional(v, policy))
            .collect()
    }
}

/// Hierarchy position of a 1-based line coordinate: `x = 2^level · (2·rank + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HierCoord {
    pub level: u32,
    pub rank: usize,
}

/// A lattice vertex in 0-based storage coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridVertex {
    pub x: usize,
    pub y: usize,
}

impl GridVertex {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for GridVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// Direction of a unit move along a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Forward,
    Backward,
}

impl Step {
    pub fn reverse(self) -> Self {
        match self {
            Step::Forward => Step::Backward,
            Step::Backward => Step::Forward,
        }
    }
}

/// Which vertices count as exceptional when excluding targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExceptionalPolicy {
    /// Either coordinate sits at an HN4 level `n − 1` or `n`.
    #[default]
    Line,
    /// Both coordinates do.
    Intersection,
}

impl fmt::Display for ExceptionalPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExceptionalPolicy::Line => "line",
            ExceptionalPolicy::Intersection => "intersection",
        })
    }
}

impl FromStr for ExceptionalPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(ExceptionalPolicy::Line),
            "intersection" => Ok(ExceptionalPolicy::Intersection),
            other => Err(Error::domain(format!(
                "unknown exceptional policy {other:?}"
            ))),
        }
    }
}

/// Largest rank at `level`: `2^(n − level − 1) − 1` below the top, 0 at the top.
#[inline]
pub fn max_rank(level: u32, n: u32) -> usize {
    if level >= n {
        0
    } else {
        (1usize << (n - level - 1)) - 1
    }
}

/// Number of sites sharing `level`.
#[inline]
pub fn level_size(level: u32, n: u32) -> usize {
    max_rank(level, n) + 1
}

fn check_line(x: usize, n: u32) -> Result<()> {
    if x == 0 || x > 1usize << n {
        return Err(Error::domain(format!(
            "line coordinate {x} outside [1, {}]",
            1usize << n
        )));
    }
    Ok(())
}

/// Splits a 1-based line coordinate into its 2-adic valuation and odd-part rank.
pub fn decompose(x: usize, n: u32) -> Result<HierCoord> {
    check_line(x, n)?;
    let level = x.trailing_zeros();
    Ok(HierCoord {
        level,
        rank: (x >> level) / 2,
    })
}

pub fn compose(h: HierCoord, n: u32) -> Result<usize> {
    if h.level > n {
        return Err(Error::domain(format!("level {} exceeds {n}", h.level)));
    }
    if h.rank > max_rank(h.level, n) {
        return Err(Error::domain(format!(
            "rank {} exceeds maximum {} at level {}",
            h.rank,
            max_rank(h.level, n),
            h.level
        )));
    }
    Ok((1usize << h.level) * (2 * h.rank + 1))
}

/// Long-range neighbour of a 1-based line coordinate within its hierarchy level.
///
/// Ranks wrap cyclically. Levels `n − 1` and `n` contain one site, which is
/// therefore its own neighbour.
pub fn long_range_neighbor(x: usize, step: Step, n: u32) -> Result<usize> {
    let h = decompose(x, n)?;
    let size = level_size(h.level, n);
    let rank = match step {
        Step::Forward => (h.rank + 1) % size,
        Step::Backward => (h.rank + size - 1) % size,
    };
    compose(
        HierCoord {
            level: h.level,
            rank,
        },
        n,
    )
}

/// Nearest grid neighbour of a 0-based coordinate on a periodic line of `side` sites.
#[inline]
pub fn grid_neighbor(c: usize, step: Step, side: usize) -> usize {
    match step {
        Step::Forward => (c + 1) % side,
        Step::Backward => (c + side - 1) % side,
    }
}

/// True when the 0-based coordinate `c` maps to an HN4 site at level `n − 1` or `n`.
#[inline]
pub fn is_exceptional_coord(c: usize, n: u32) -> bool {
    let x = c + 1;
    x == 1usize << (n - 1) || x == 1usize << n
}

pub fn is_exceptional(v: GridVertex, n: u32, policy: ExceptionalPolicy) -> bool {
    let ex = is_exceptional_coord(v.x, n);
    let ey = is_exceptional_coord(v.y, n);
    match policy {
        ExceptionalPolicy::Line => ex || ey,
        ExceptionalPolicy::Intersection => ex && ey,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(1, 4).unwrap(), HierCoord { level: 0, rank: 0 });
        assert_eq!(decompose(16, 4).unwrap(), HierCoord { level: 4, rank: 0 });
        assert_eq!(decompose(12, 4).unwrap(), HierCoord { level: 2, rank: 1 });
    }

    #[test]
    fn decompose_rejects_out_of_range() {
        assert!(matches!(decompose(0, 4), Err(Error::Domain(_))));
        assert!(matches!(decompose(17, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose(HierCoord { level: 0, rank: 7 }, 4).unwrap(), 15);
        assert_eq!(compose(HierCoord { level: 3, rank: 0 }, 4).unwrap(), 8);
        assert_eq!(compose(HierCoord { level: 1, rank: 3 }, 4).unwrap(), 14);
    }

    #[test]
    fn compose_rejects_rank_overflow() {
        assert!(compose(HierCoord { level: 0, rank: 8 }, 4).is_err());
        assert!(compose(HierCoord { level: 4, rank: 1 }, 4).is_err());
        assert!(compose(HierCoord { level: 5, rank: 0 }, 4).is_err());
    }

    #[test]
    fn max_rank_matches_floor_form() {
        for n in 2..12u32 {
            for i in 0..=n {
                let floor_form = ((2f64).powi(n as i32 - i as i32 - 1) - 0.5).floor() as usize;
                assert_eq!(max_rank(i, n), floor_form, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn long_range_examples() {
        assert_eq!(long_range_neighbor(3, Step::Forward, 4).unwrap(), 5);
        assert_eq!(long_range_neighbor(15, Step::Forward, 4).unwrap(), 1);
        assert_eq!(long_range_neighbor(1, Step::Backward, 4).unwrap(), 15);
        for step in [Step::Forward, Step::Backward] {
            assert_eq!(long_range_neighbor(8, step, 4).unwrap(), 8);
            assert_eq!(long_range_neighbor(16, step, 4).unwrap(), 16);
        }
        // level n−2 has two members; both directions reach the other one
        assert_eq!(long_range_neighbor(4, Step::Forward, 4).unwrap(), 12);
        assert_eq!(long_range_neighbor(4, Step::Backward, 4).unwrap(), 12);
    }

    #[test]
    fn grid_neighbor_examples() {
        assert_eq!(grid_neighbor(0, Step::Backward, 16), 15);
        assert_eq!(grid_neighbor(15, Step::Forward, 16), 0);
        assert_eq!(grid_neighbor(7, Step::Forward, 16), 8);
    }

    #[test]
    fn exceptional_examples() {
        let p = ExceptionalPolicy::Line;
        assert!(is_exceptional(GridVertex::new(7, 3), 4, p));
        assert!(!is_exceptional(GridVertex::new(0, 6), 4, p));
        assert!(!is_exceptional(
            GridVertex::new(7, 3),
            4,
            ExceptionalPolicy::Intersection
        ));
        assert!(is_exceptional(
            GridVertex::new(7, 15),
            4,
            ExceptionalPolicy::Intersection
        ));
    }

    #[test]
    fn exceptional_count_by_enumeration() {
        let topo = TopologyParams::new(4).unwrap();
        let count = (0..topo.vertices())
            .filter(|&i| topo.is_exceptional(topo.vertex(i), ExceptionalPolicy::Line))
            .count();
        assert_eq!(count, 60);
        let both = (0..topo.vertices())
            .filter(|&i| topo.is_exceptional(topo.vertex(i), ExceptionalPolicy::Intersection))
            .count();
        assert_eq!(both, 4);
        assert_eq!(topo.admissible_vertices(ExceptionalPolicy::Line).len(), 196);
    }

    #[test]
    fn topology_validation() {
        assert!(TopologyParams::new(1).is_err());
        assert!(TopologyParams::from_side(12).is_err());
        assert!(TopologyParams::from_side(2).is_err());
        let t = TopologyParams::from_side(64).unwrap();
        assert_eq!(t.line_exponent(), 6);
        assert_eq!(t.vertices(), 4096);
        let v = GridVertex::new(5, 9);
        assert_eq!(t.vertex(t.index(v)), v);
    }

    #[test]
    fn policy_parses() {
        assert_eq!(
            "line".parse::<ExceptionalPolicy>().unwrap(),
            ExceptionalPolicy::Line
        );
        assert_eq!(
            "intersection".parse::<ExceptionalPolicy>().unwrap(),
            ExceptionalPolicy::Intersection
        );
        assert!("corner".parse::<ExceptionalPolicy>().is_err());
    }
}
