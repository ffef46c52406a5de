//! Chandrasekhar H-function for conservative isotropic scattering and the
//! Milne wall value of the diffusion limit.

use crate::error::{invalid, Error, Result};
use crate::quadrature::gauss_legendre_on;

/// Discretized `H` on Gauss–Legendre nodes of `(0, 1)`.
#[derive(Debug, Clone)]
pub struct HTable {
    mu_nodes: Vec<f64>,
    mu_weights: Vec<f64>,
    h_values: Vec<f64>,
    residual: f64,
    tol: f64,
    iterations: usize,
}

impl HTable {
    pub fn mu_nodes(&self) -> &[f64] {
        &self.mu_nodes
    }

    pub fn mu_weights(&self) -> &[f64] {
        &self.mu_weights
    }

    pub fn h_values(&self) -> &[f64] {
        &self.h_values
    }

    /// Max over nodes of `|1/H - 1 + (μ/2) ∫ H(μ')/(μ+μ') dμ'|`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn is_converged(&self) -> bool {
        self.residual <= self.tol
    }

    /// `∫₀¹ μ^k H(μ) dμ`.
    pub fn moment(&self, k: i32) -> f64 {
        self.mu_nodes
            .iter()
            .zip(&self.mu_weights)
            .zip(&self.h_values)
            .map(|((m, w), h)| w * m.powi(k) * h)
            .sum()
    }

    /// Nyström evaluation of `H` at any `μ ∈ [0, 1]`.
    pub fn eval(&self, mu: f64) -> f64 {
        1.0 / conservative_rhs(mu, &self.mu_nodes, &self.mu_weights, &self.h_values)
    }
}

fn conservative_rhs(mu: f64, nodes: &[f64], weights: &[f64], h: &[f64]) -> f64 {
    0.5 * nodes
        .iter()
        .zip(weights)
        .zip(h)
        .map(|((m, w), h)| w * m * h / (mu + m))
        .sum::<f64>()
}

fn reciprocal_residual(nodes: &[f64], weights: &[f64], h: &[f64]) -> f64 {
    nodes
        .iter()
        .zip(h)
        .map(|(&mu, &hm)| {
            let s: f64 = nodes
                .iter()
                .zip(weights)
                .zip(h)
                .map(|((m, w), h)| w * h / (mu + m))
                .sum();
            (1.0 / hm - (1.0 - 0.5 * mu * s)).abs()
        })
        .fold(0.0, f64::max)
}

/// Iterates the conservative reciprocal form
/// `1/H(μ) = (1/2) ∫₀¹ μ' H(μ') / (μ + μ') dμ'` with damping 1/2 until the
/// residual of `1/H = 1 - (μ/2) ∫₀¹ H(μ')/(μ + μ') dμ'` is below `tol`.
pub fn solve_h(n_nodes: usize, tol: f64, max_iter: usize) -> Result<HTable> {
    if n_nodes < 16 {
        return Err(invalid(format!("n_nodes must be at least 16, got {n_nodes}")));
    }
    if !(tol >= 1e-12) {
        return Err(invalid(format!("tol must be at least 1e-12, got {tol}")));
    }
    let (nodes, weights) = gauss_legendre_on(n_nodes, 0.0, 1.0);
    let mut h = vec![1.0; n_nodes];
    let mut inv = vec![1.0; n_nodes];
    let mut residual = reciprocal_residual(&nodes, &weights, &h);
    for it in 1..=max_iter {
        for i in 0..n_nodes {
            let target = conservative_rhs(nodes[i], &nodes, &weights, &h);
            inv[i] = 0.5 * inv[i] + 0.5 * target;
        }
        for (hv, iv) in h.iter_mut().zip(&inv) {
            *hv = 1.0 / iv;
        }
        residual = reciprocal_residual(&nodes, &weights, &h);
        if residual <= tol {
            return Ok(HTable {
                mu_nodes: nodes,
                mu_weights: weights,
                h_values: h,
                residual,
                tol,
                iterations: it,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "H-function iteration",
        iterations: max_iter,
        residual,
    })
}

/// `(√3/2) ∫₀¹ μ H(μ) f_b(μ) dμ`.
pub fn milne_boundary_value(table: &HTable, incoming: impl Fn(f64) -> f64) -> Result<f64> {
    if !table.is_converged() {
        return Err(invalid("H table is not converged"));
    }
    let s: f64 = table
        .mu_nodes
        .iter()
        .zip(&table.mu_weights)
        .zip(&table.h_values)
        .map(|((&m, w), h)| w * m * h * incoming(m))
        .sum();
    Ok(0.5 * 3f64.sqrt() * s)
}
