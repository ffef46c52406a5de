//! Micro/macro solvers for the one-group kinetic equation in the diffusive
//! scaling on the slab `[0, 1]`, with a boundary-matching decomposition that
//! takes its wall values from the inflow alone.
//!
//! ```text
//! ε ∂t f + v ∂x f = (⟨f⟩E - f) / ε,   v ∈ [-1, 1],  dμ = dv/2
//! ```

pub mod bap;
pub mod chandrasekhar;
pub mod classical;
pub mod error;
pub mod half_maxwellian;
pub mod harness;
pub mod problem;
pub mod quadrature;
pub mod reference;
pub mod transport;
pub mod velocity;

pub use bap::{BapRun, BapState, Trajectory, Wall};
pub use chandrasekhar::HTable;
pub use classical::ClassicalState;
pub use error::{Error, Result};
pub use half_maxwellian::{HalfMoments, MaxwellParams1D, MomentVector};
pub use problem::{BapConfig, BoundaryData, Case, InitialData};
pub use reference::{DiffusionField, KineticField};
pub use transport::Equilibrium;
pub use velocity::{half_sign, HalfRangeSide, SpatialMesh, VelocityGrid};
