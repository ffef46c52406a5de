//! Classical micro/macro scheme, `f = ρE + g` with `⟨g⟩ = 0`, on the same
//! staggered layout as [`crate::bap`]. The wall needs a value of `ρ`; it is
//! copied from the first interior node.

use crate::bap::{drive, time_step, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::problem::BapConfig;
use crate::transport::relax_full_in_place;

/// Description of the artificial wall closure, recorded in run metadata.
pub const CLOSURE: &str = "zero-order extrapolation: wall rho copied from the first interior node";

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    /// `ρ` at nodes `0..=n_cells`; the wall entries hold the closure values.
    pub rho: Vec<f64>,
    /// `g[m * nv + k]` at cell centre `m`.
    pub g: Vec<f64>,
    pub nv: usize,
    pub time: f64,
}

impl ClassicalState {
    pub fn g_cell(&self, m: usize) -> &[f64] {
        &self.g[m * self.nv..(m + 1) * self.nv]
    }

    pub fn initial(cfg: &BapConfig) -> Self {
        let nv = cfg.grid.len();
        let nodes = cfg.grid.nodes();
        let sample = |x: f64| -> Vec<f64> { nodes.iter().map(|&v| cfg.initial.eval(x, v)).collect() };
        let mut rho: Vec<f64> = cfg.mesh.interfaces().iter().map(|&x| cfg.grid.sum(&sample(x))).collect();
        let n = rho.len() - 1;
        rho[0] = rho[1];
        rho[n] = rho[n - 1];
        let mut g = Vec::with_capacity(cfg.mesh.n_cells() * nv);
        for &x in cfg.mesh.centers() {
            let f = sample(x);
            let r = cfg.grid.sum(&f);
            g.extend(f.iter().zip(cfg.eq.values()).map(|(f, e)| f - r * e));
        }
        Self { rho, g, nv, time: 0.0 }
    }

    /// `max_m |⟨g_m⟩|`.
    pub fn constraint_residual(&self, cfg: &BapConfig) -> f64 {
        (0..cfg.mesh.n_cells())
            .map(|m| cfg.grid.sum(self.g_cell(m)).abs())
            .fold(0.0, f64::max)
    }
}

fn wall_vector(g: &[f64], inflow: &[f64], rho_wall: f64, incoming_positive: bool, cfg: &BapConfig) -> Vec<f64> {
    let e = cfg.eq.values();
    cfg.grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if (v > 0.0) == incoming_positive {
                inflow[k] - rho_wall * e[k]
            } else {
                g[k]
            }
        })
        .collect()
}

/// One step of the classical scheme.
pub fn step_classical(state: &ClassicalState, cfg: &BapConfig, dt: f64) -> Result<ClassicalState> {
    let n = cfg.mesh.n_cells();
    let nv = cfg.grid.len();
    if state.g.len() != n * nv || state.rho.len() != n + 1 || state.nv != nv {
        return Err(invalid("state does not match the configuration"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let grid = &cfg.grid;
    let e = cfg.eq.values();
    let nodes = grid.nodes();
    let dx = cfg.mesh.dx();
    let eps = cfg.eps;
    let t = state.time;
    let lambda = dt / (eps * eps);
    let coef = dt * eps / (eps * eps + dt);

    let mut rho_nodes = state.rho.clone();
    rho_nodes[0] = state.rho[1];
    rho_nodes[n] = state.rho[n - 1];
    let gl = wall_vector(state.g_cell(0), &cfg.left_inflow(t), rho_nodes[0], true, cfg);
    let gr = wall_vector(state.g_cell(n - 1), &cfg.right_inflow(t), rho_nodes[n], false, cfg);

    let mut g_new = vec![0.0; n * nv];
    let mut src = vec![0.0; nv];
    for m in 0..n {
        let here = state.g_cell(m);
        let drho = (rho_nodes[m + 1] - rho_nodes[m]) / dx;
        for k in 0..nv {
            let v = nodes[k];
            let lv = if m == 0 {
                gl[k]
            } else if v > 0.0 {
                state.g[(m - 1) * nv + k]
            } else {
                here[k]
            };
            let rv = if m + 1 == n {
                gr[k]
            } else if v > 0.0 {
                here[k]
            } else {
                state.g[(m + 1) * nv + k]
            };
            src[k] = v * (rv - lv) / dx + v * e[k] * drho;
        }
        let c = grid.sum(&src);
        let out = &mut g_new[m * nv..(m + 1) * nv];
        out.copy_from_slice(here);
        relax_full_in_place(out, lambda, grid, &cfg.eq);
        for k in 0..nv {
            out[k] -= coef * (src[k] - c * e[k]);
        }
    }
    let flux: Vec<f64> = (0..n).map(|m| grid.flux(&g_new[m * nv..(m + 1) * nv])).collect();
    let mut rho = state.rho.clone();
    let a = dt / (eps * dx);
    for i in 1..n {
        rho[i] -= a * (flux[i] - flux[i - 1]);
    }
    rho[0] = rho[1];
    rho[n] = rho[n - 1];
    let next = ClassicalState {
        rho,
        g: g_new,
        nv,
        time: t + dt,
    };
    if next.rho.iter().chain(&next.g).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: format!("classical step (eps = {eps:e}, dt = {dt:e})"),
            time: next.time,
        });
    }
    Ok(next)
}

/// Same driver and time step as the BAP scheme.
pub fn run_classical(cfg: &BapConfig, output_times: &[f64]) -> Result<Trajectory<ClassicalState>> {
    cfg.validate()?;
    drive(
        cfg,
        output_times,
        ClassicalState::initial(cfg),
        time_step(cfg),
        step_classical,
        |s| s.time,
        |s| s.constraint_residual(cfg),
    )
}
