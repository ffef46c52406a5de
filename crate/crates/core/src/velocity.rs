//! Velocity quadrature on `[-1, 1]` with `dμ = dv/2`, the uniform mesh on
//! `[0, 1]`, and the half-range sets selected by `ω(x, v) = (2x - 1) v`.

use std::ops::Range;

use crate::error::{invalid, Result};
use crate::quadrature::gauss_legendre;

/// Which half of velocity space is the incoming set `V-` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfRangeSide {
    /// `V- = {v > 0}`, left half of the slab.
    Plus,
    /// `V- = {v < 0}`, right half of the slab.
    Minus,
}

impl HalfRangeSide {
    pub fn opposite(self) -> Self {
        match self {
            HalfRangeSide::Plus => HalfRangeSide::Minus,
            HalfRangeSide::Minus => HalfRangeSide::Plus,
        }
    }

    /// True when `v` lies in the incoming set of this side.
    pub fn contains(self, v: f64) -> bool {
        match self {
            HalfRangeSide::Plus => v > 0.0,
            HalfRangeSide::Minus => v < 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HalfRangeSide::Plus => "plus",
            HalfRangeSide::Minus => "minus",
        }
    }
}

/// Side of the point `x`. The flip point `x = 1/2` counts as `Plus`.
pub fn half_sign(x: f64) -> HalfRangeSide {
    if x <= 0.5 {
        HalfRangeSide::Plus
    } else {
        HalfRangeSide::Minus
    }
}

/// Double Gauss–Legendre rule: `n_half` nodes on each of `[-1, 0]` and
/// `[0, 1]`, negative velocities first.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    n_half: usize,
}

impl VelocityGrid {
    pub fn new(n_half: usize) -> Result<Self> {
        if n_half < 2 {
            return Err(invalid(format!("n_half must be at least 2, got {n_half}")));
        }
        let (x, w) = gauss_legendre(n_half);
        let mut nodes = vec![0.0; 2 * n_half];
        let mut weights = vec![0.0; 2 * n_half];
        for k in 0..n_half {
            // x ascending, so (x + 1)/2 ascends on (0, 1).
            let v = 0.5 * (x[k] + 1.0);
            let wk = 0.25 * w[k];
            nodes[n_half + k] = v;
            weights[n_half + k] = wk;
            nodes[n_half - 1 - k] = -v;
            weights[n_half - 1 - k] = wk;
        }
        Ok(Self {
            nodes,
            weights,
            n_half,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_half(&self) -> usize {
        self.n_half
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_speed(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index range of the incoming set `V-` for `side`.
    pub fn half_range(&self, side: HalfRangeSide) -> Range<usize> {
        match side {
            HalfRangeSide::Plus => self.n_half..2 * self.n_half,
            HalfRangeSide::Minus => 0..self.n_half,
        }
    }

    /// `⟨φ⟩`.
    pub fn bracket(&self, phi: &[f64]) -> Result<f64> {
        self.check_len(phi)?;
        Ok(self.sum(phi))
    }

    /// `⟨φ⟩_{V-}` for the given side.
    pub fn bracket_half(&self, phi: &[f64], side: HalfRangeSide) -> Result<f64> {
        self.check_len(phi)?;
        Ok(self.sum_half(phi, side))
    }

    fn check_len(&self, phi: &[f64]) -> Result<()> {
        if phi.len() != self.len() {
            return Err(invalid(format!(
                "velocity array has length {}, grid has {} nodes",
                phi.len(),
                self.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn sum(&self, phi: &[f64]) -> f64 {
        debug_assert_eq!(phi.len(), self.len());
        self.weights.iter().zip(phi).map(|(w, p)| w * p).sum()
    }

    pub(crate) fn sum_half(&self, phi: &[f64], side: HalfRangeSide) -> f64 {
        let r = self.half_range(side);
        self.weights[r.clone()]
            .iter()
            .zip(&phi[r])
            .map(|(w, p)| w * p)
            .sum()
    }

    /// `⟨v φ⟩`.
    pub(crate) fn flux(&self, phi: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(&self.nodes)
            .zip(phi)
            .map(|((w, v), p)| w * v * p)
            .sum()
    }
}

/// Uniform mesh of `[0, 1]` with an even number of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMesh {
    n_cells: usize,
    dx: f64,
    centers: Vec<f64>,
    interfaces: Vec<f64>,
}

impl SpatialMesh {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 2 || n_cells % 2 != 0 {
            return Err(invalid(format!(
                "n_cells must be even and at least 2, got {n_cells}"
            )));
        }
        let dx = 1.0 / n_cells as f64;
        let interfaces: Vec<f64> = (0..=n_cells).map(|i| i as f64 / n_cells as f64).collect();
        let centers = (0..n_cells)
            .map(|i| (i as f64 + 0.5) / n_cells as f64)
            .collect();
        Ok(Self {
            n_cells,
            dx,
            centers,
            interfaces,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }
}
