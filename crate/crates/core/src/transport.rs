//! One-group collision operator `L f = ⟨f⟩E - f` and the stiff relaxation
//! solve shared by both micro/macro schemes.

use crate::error::{invalid, Result};
use crate::velocity::{HalfRangeSide, VelocityGrid};

const MOMENT_TOL: f64 = 1e-13;

/// Normalized equilibrium profile `E(v)` sampled on a velocity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    values: Vec<f64>,
    half_plus: f64,
    half_minus: f64,
}

impl Equilibrium {
    /// `E ≡ 1`.
    pub fn uniform(grid: &VelocityGrid) -> Self {
        Self::new(grid, vec![1.0; grid.len()]).expect("E = 1 is a valid equilibrium")
    }

    pub fn new(grid: &VelocityGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("equilibrium length does not match the grid"));
        }
        if values.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(invalid("equilibrium must be finite and nonnegative"));
        }
        let mass = grid.sum(&values);
        let mom = grid.flux(&values);
        if (mass - 1.0).abs() > MOMENT_TOL {
            return Err(invalid(format!("⟨E⟩ = {mass}, expected 1")));
        }
        if mom.abs() > MOMENT_TOL {
            return Err(invalid(format!("⟨vE⟩ = {mom}, expected 0")));
        }
        let half_plus = grid.sum_half(&values, HalfRangeSide::Plus);
        let half_minus = grid.sum_half(&values, HalfRangeSide::Minus);
        if half_plus <= 0.0 || half_minus <= 0.0 {
            return Err(invalid("equilibrium vanishes on a half range"));
        }
        Ok(Self {
            values,
            half_plus,
            half_minus,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `⟨E⟩_{V-}` for `side`.
    pub fn half_mass(&self, side: HalfRangeSide) -> f64 {
        match side {
            HalfRangeSide::Plus => self.half_plus,
            HalfRangeSide::Minus => self.half_minus,
        }
    }
}

/// `⟨f⟩E - f`.
pub fn apply_l(f: &[f64], grid: &VelocityGrid, eq: &Equilibrium) -> Result<Vec<f64>> {
    let rho = grid.bracket(f)?;
    Ok(eq.values.iter().zip(f).map(|(e, f)| rho * e - f).collect())
}

/// Inverse of `L` on mean-zero functions, i.e. `-h`.
pub fn pseudo_inverse_l(h: &[f64], grid: &VelocityGrid) -> Result<Vec<f64>> {
    let mean = grid.bracket(h)?;
    if mean.abs() > 1e-10 {
        return Err(invalid(format!(
            "pseudo-inverse of L needs a mean-zero argument, got ⟨h⟩ = {mean:e}"
        )));
    }
    Ok(h.iter().map(|x| -x).collect())
}

/// `κ = ⟨v L⁻¹(vE)⟩`, negative; the heat coefficient is `|κ|`.
pub fn diffusion_coefficient(grid: &VelocityGrid, eq: &Equilibrium) -> f64 {
    let ve: Vec<f64> = grid.nodes().iter().zip(eq.values()).map(|(v, e)| v * e).collect();
    let inv = pseudo_inverse_l(&ve, grid).expect("⟨vE⟩ = 0 for a valid equilibrium");
    grid.flux(&inv)
}

/// `φ - (⟨φ⟩_{V-}/⟨E⟩_{V-}) E`: removes the `V-` mean along `E`.
///
/// This is both the projection used in the boundary-matching `g` equation
/// and the map taking a remainder from one side's convention to the other.
pub fn project_half(phi: &mut [f64], side: HalfRangeSide, grid: &VelocityGrid, eq: &Equilibrium) {
    let c = grid.sum_half(phi, side) / eq.half_mass(side);
    for (p, e) in phi.iter_mut().zip(eq.values()) {
        *p -= c * e;
    }
}

/// Solves `g - λ [L g - (E/⟨E⟩_{V-}) ⟨L g⟩_{V-}] = rhs`.
///
/// Taking the `V-` bracket gives `⟨g⟩_{V-} = ⟨rhs⟩_{V-}`, hence
/// `g = (rhs + λ ⟨rhs⟩_{V-}/⟨E⟩_{V-} E) / (1 + λ)`.
pub fn relaxation_solve(
    rhs: &[f64],
    lambda: f64,
    side: HalfRangeSide,
    grid: &VelocityGrid,
    eq: &Equilibrium,
) -> Result<Vec<f64>> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(invalid(format!("relaxation parameter must be finite and >= 0, got {lambda}")));
    }
    let mut g = rhs.to_vec();
    grid.bracket(rhs)?;
    relax_half_in_place(&mut g, lambda, side, grid, eq);
    Ok(g)
}

pub(crate) fn relax_half_in_place(
    g: &mut [f64],
    lambda: f64,
    side: HalfRangeSide,
    grid: &VelocityGrid,
    eq: &Equilibrium,
) {
    let es = eq.half_mass(side);
    debug_assert!(es > 0.0);
    let c = lambda * grid.sum_half(g, side) / es;
    let inv = 1.0 / (1.0 + lambda);
    for (x, e) in g.iter_mut().zip(eq.values()) {
        *x = (*x + c * e) * inv;
    }
}

/// Full-bracket counterpart: solves `g - λ L g = rhs`,
/// `g = (rhs + λ ⟨rhs⟩ E) / (1 + λ)`.
pub fn relaxation_solve_full(
    rhs: &[f64],
    lambda: f64,
    grid: &VelocityGrid,
    eq: &Equilibrium,
) -> Result<Vec<f64>> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(invalid(format!("relaxation parameter must be finite and >= 0, got {lambda}")));
    }
    let mut g = rhs.to_vec();
    grid.bracket(rhs)?;
    relax_full_in_place(&mut g, lambda, grid, eq);
    Ok(g)
}

pub(crate) fn relax_full_in_place(g: &mut [f64], lambda: f64, grid: &VelocityGrid, eq: &Equilibrium) {
    let c = lambda * grid.sum(g);
    let inv = 1.0 / (1.0 + lambda);
    for (x, e) in g.iter_mut().zip(eq.values()) {
        *x = (*x + c * e) * inv;
    }
}
