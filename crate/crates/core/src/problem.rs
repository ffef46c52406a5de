//! Problem description shared by the kinetic solvers.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::transport::Equilibrium;
use crate::velocity::{SpatialMesh, VelocityGrid};

pub type PhaseFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Incoming data: `left(t, v)` is read for `v > 0` only, `right(t, v)` for
/// `v < 0` only.
#[derive(Clone)]
pub struct BoundaryData {
    pub left_incoming: PhaseFn,
    pub right_incoming: PhaseFn,
}

impl BoundaryData {
    pub fn new(
        left: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        right: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            left_incoming: Arc::new(left),
            right_incoming: Arc::new(right),
        }
    }
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BoundaryData { .. }")
    }
}

/// Initial distribution `f_init(x, v)`.
#[derive(Clone)]
pub struct InitialData(pub PhaseFn);

impl InitialData {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn zero() -> Self {
        Self::new(|_, _| 0.0)
    }

    pub fn eval(&self, x: f64, v: f64) -> f64 {
        (self.0)(x, v)
    }
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("InitialData { .. }")
    }
}

/// Built-in test cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// `f(0, v) = v` for `v > 0`, `f(1, v) = 0` for `v < 0`, `f_init = 0`.
    Linear,
    /// Equilibrium `f = E` everywhere, inflow included.
    Constant,
    /// All data zero.
    Zero,
}

impl Case {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" | "paper" => Some(Case::Linear),
            "constant" => Some(Case::Constant),
            "zero" => Some(Case::Zero),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::Linear => "linear",
            Case::Constant => "constant",
            Case::Zero => "zero",
        }
    }

    /// Boundary and initial data for `E ≡ 1`.
    pub fn data(self) -> (BoundaryData, InitialData) {
        match self {
            Case::Linear => (BoundaryData::new(|_, v| v, |_, _| 0.0), InitialData::zero()),
            Case::Constant => (
                BoundaryData::new(|_, _| 1.0, |_, _| 1.0),
                InitialData::new(|_, _| 1.0),
            ),
            Case::Zero => (BoundaryData::new(|_, _| 0.0, |_, _| 0.0), InitialData::zero()),
        }
    }
}

/// Configuration of a kinetic run (BAP, classical, or explicit reference).
#[derive(Debug, Clone)]
pub struct BapConfig {
    pub eps: f64,
    pub mesh: SpatialMesh,
    pub grid: VelocityGrid,
    pub eq: Equilibrium,
    pub cfl_sigma: f64,
    pub t_end: f64,
    pub boundary_data: BoundaryData,
    pub initial: InitialData,
}

impl BapConfig {
    /// `E ≡ 1` configuration for one of the built-in cases.
    pub fn for_case(case: Case, eps: f64, n_cells: usize, n_half: usize, t_end: f64) -> Result<Self> {
        let mesh = SpatialMesh::new(n_cells)?;
        let grid = VelocityGrid::new(n_half)?;
        let eq = Equilibrium::uniform(&grid);
        let (boundary_data, initial) = case.data();
        let cfg = Self {
            eps,
            mesh,
            grid,
            eq,
            cfl_sigma: 0.45,
            t_end,
            boundary_data,
            initial,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(invalid(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.cfl_sigma > 0.0 && self.cfl_sigma <= 1.0) {
            return Err(invalid(format!("cfl_sigma must lie in (0, 1], got {}", self.cfl_sigma)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.eq.values().len() != self.grid.len() {
            return Err(invalid("equilibrium and velocity grid sizes differ"));
        }
        Ok(())
    }

    /// Incoming samples at the left wall (zero on outgoing nodes).
    pub fn left_inflow(&self, t: f64) -> Vec<f64> {
        self.grid
            .nodes()
            .iter()
            .map(|&v| if v > 0.0 { (self.boundary_data.left_incoming)(t, v) } else { 0.0 })
            .collect()
    }

    /// Incoming samples at the right wall (zero on outgoing nodes).
    pub fn right_inflow(&self, t: f64) -> Vec<f64> {
        self.grid
            .nodes()
            .iter()
            .map(|&v| if v < 0.0 { (self.boundary_data.right_incoming)(t, v) } else { 0.0 })
            .collect()
    }
}
