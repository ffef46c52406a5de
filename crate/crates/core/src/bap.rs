//! Boundary-matching micro/macro scheme.
//!
//! Unknowns: `ρ` on the mesh nodes `x_i = iΔx` (walls included, where only
//! a diagnostic trace is stored) and the remainder `g` on the cell centres.
//! Each cell centre carries `g` in the convention of its own half of the
//! slab, so `⟨g⟩_{V-} = 0` there. At the walls `ρ̄` is the Dirichlet value
//! computed from the inflow; the wall node remainder is the exact incoming
//! `f_b - ρ̄_b E` plus an outgoing closure built from the first cell.

use crate::error::{invalid, Error, Result};
use crate::problem::BapConfig;
use crate::transport::{diffusion_coefficient, relax_half_in_place};
use crate::transport::Equilibrium;
use crate::velocity::{half_sign, HalfRangeSide, VelocityGrid};

pub use crate::problem::BoundaryData;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wall {
    Left,
    Right,
}

/// State of the scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct BapState {
    /// `ρ` at nodes `0..=n_cells`; entries 0 and `n_cells` are wall traces,
    /// recomputed after each step and never read by the update.
    pub rho: Vec<f64>,
    /// `g[m * nv + k]` at cell centre `m`, velocity node `k`.
    pub g: Vec<f64>,
    pub nv: usize,
    pub time: f64,
}

impl BapState {
    pub fn g_cell(&self, m: usize) -> &[f64] {
        &self.g[m * self.nv..(m + 1) * self.nv]
    }

    pub fn n_cells(&self) -> usize {
        self.g.len() / self.nv
    }

    /// Decomposition of `f_init` at `t = 0`.
    pub fn initial(cfg: &BapConfig) -> Self {
        let nv = cfg.grid.len();
        let nodes = cfg.grid.nodes();
        let rho = cfg
            .mesh
            .interfaces()
            .iter()
            .map(|&x| {
                let f: Vec<f64> = nodes.iter().map(|&v| cfg.initial.eval(x, v)).collect();
                cfg.grid.sum(&f)
            })
            .collect();
        let mut g = Vec::with_capacity(cfg.mesh.n_cells() * nv);
        for &x in cfg.mesh.centers() {
            let s = half_sign(x);
            let f: Vec<f64> = nodes.iter().map(|&v| cfg.initial.eval(x, v)).collect();
            let rb = cfg.grid.sum_half(&f, s) / cfg.eq.half_mass(s);
            g.extend(f.iter().zip(cfg.eq.values()).map(|(f, e)| f - rb * e));
        }
        Self {
            rho,
            g,
            nv,
            time: 0.0,
        }
    }

    /// `max_m |⟨g_m⟩_{V-(x_m)}|`.
    pub fn constraint_residual(&self, cfg: &BapConfig) -> f64 {
        cfg.mesh
            .centers()
            .iter()
            .enumerate()
            .map(|(m, &x)| cfg.grid.sum_half(self.g_cell(m), half_sign(x)).abs())
            .fold(0.0, f64::max)
    }
}

/// `ρ̄` at the wall: `⟨f_b⟩_{V-} / ⟨E⟩_{V-}` from incoming data only.
pub fn boundary_rho_bar(cfg: &BapConfig, t: f64, wall: Wall) -> f64 {
    match wall {
        Wall::Left => {
            cfg.grid.sum_half(&cfg.left_inflow(t), HalfRangeSide::Plus)
                / cfg.eq.half_mass(HalfRangeSide::Plus)
        }
        Wall::Right => {
            cfg.grid.sum_half(&cfg.right_inflow(t), HalfRangeSide::Minus)
                / cfg.eq.half_mass(HalfRangeSide::Minus)
        }
    }
}

/// `ρ̄` at node `i` in the node's own convention. Interior nodes use
/// `ρ_i - ⟨(g_{i-1/2} + g_{i+1/2})/2⟩`; walls return the Dirichlet value.
pub fn rho_bar(state: &BapState, cfg: &BapConfig, i: usize) -> f64 {
    let n = cfg.mesh.n_cells();
    if i == 0 {
        return boundary_rho_bar(cfg, state.time, Wall::Left);
    }
    if i == n {
        return boundary_rho_bar(cfg, state.time, Wall::Right);
    }
    let s = half_sign(cfg.mesh.interfaces()[i]);
    let sides = centre_sides(cfg);
    node_rho_bar(state, cfg, &sides, i, s, 0.0, 0.0)
}

/// Parabolic step `σ · max(Δx²/(2|κ|), εΔx)`.
pub fn time_step(cfg: &BapConfig) -> f64 {
    let dx = cfg.mesh.dx();
    let kappa = diffusion_coefficient(&cfg.grid, &cfg.eq).abs();
    cfg.cfl_sigma * (dx * dx / (2.0 * kappa)).max(cfg.eps * dx)
}

fn centre_sides(cfg: &BapConfig) -> Vec<HalfRangeSide> {
    cfg.mesh.centers().iter().map(|&x| half_sign(x)).collect()
}

// ⟨φ⟩ after re-expressing φ (held in convention `from`) in convention `to`.
fn mean_in(phi: &[f64], from: HalfRangeSide, to: HalfRangeSide, grid: &VelocityGrid, eq: &Equilibrium) -> f64 {
    let m = grid.sum(phi);
    if from == to {
        m
    } else {
        m - grid.sum_half(phi, to) / eq.half_mass(to)
    }
}

// Value of component k of φ (held in convention `from`) in convention `to`.
fn convert(phi: &[f64], from: HalfRangeSide, to: HalfRangeSide, grid: &VelocityGrid, eq: &Equilibrium) -> Vec<f64> {
    if from == to {
        return phi.to_vec();
    }
    let c = grid.sum_half(phi, to) / eq.half_mass(to);
    phi.iter().zip(eq.values()).map(|(p, e)| p - c * e).collect()
}

fn node_rho_bar(
    state: &BapState,
    cfg: &BapConfig,
    sides: &[HalfRangeSide],
    i: usize,
    to: HalfRangeSide,
    left_wall: f64,
    right_wall: f64,
) -> f64 {
    let n = cfg.mesh.n_cells();
    if i == 0 {
        return left_wall;
    }
    if i == n {
        return right_wall;
    }
    let a = mean_in(state.g_cell(i - 1), sides[i - 1], to, &cfg.grid, &cfg.eq);
    let b = mean_in(state.g_cell(i), sides[i], to, &cfg.grid, &cfg.eq);
    state.rho[i] - 0.5 * (a + b)
}

/// Remainder at the wall nodes, in the convention of the adjacent cell.
///
/// Incoming velocities carry `f_b - ρ̄_b E`. Outgoing velocities blend the
/// first cell's value with an isotropic profile, `a g + (1 - a) c E` with
/// `a = exp(-Δx / (2ε|v|))`, and `c` makes the wall current equal to the
/// current of the first cell.
pub fn wall_vectors(state: &BapState, cfg: &BapConfig, t: f64) -> (Vec<f64>, Vec<f64>) {
    let n = cfg.mesh.n_cells();
    let left = wall_vector(
        state.g_cell(0),
        &cfg.left_inflow(t),
        boundary_rho_bar(cfg, t, Wall::Left),
        HalfRangeSide::Plus,
        cfg,
    );
    let right = wall_vector(
        state.g_cell(n - 1),
        &cfg.right_inflow(t),
        boundary_rho_bar(cfg, t, Wall::Right),
        HalfRangeSide::Minus,
        cfg,
    );
    (left, right)
}

fn wall_vector(g: &[f64], inflow: &[f64], rb: f64, incoming: HalfRangeSide, cfg: &BapConfig) -> Vec<f64> {
    let nodes = cfg.grid.nodes();
    let w = cfg.grid.weights();
    let e = cfg.eq.values();
    let half_dx = 0.5 * cfg.mesh.dx();
    let mut out = vec![0.0; g.len()];
    let mut known = 0.0;
    let mut open = 0.0;
    for k in 0..g.len() {
        let v = nodes[k];
        if incoming.contains(v) {
            out[k] = inflow[k] - rb * e[k];
        } else {
            let a = (-half_dx / (cfg.eps * v.abs())).exp();
            out[k] = a * g[k];
            open += w[k] * v * (1.0 - a) * e[k];
        }
        known += w[k] * v * out[k];
    }
    let target = cfg.grid.flux(g);
    let c = if open.abs() > f64::MIN_POSITIVE { (target - known) / open } else { 0.0 };
    for k in 0..g.len() {
        let v = nodes[k];
        if !incoming.contains(v) {
            let a = (-half_dx / (cfg.eps * v.abs())).exp();
            out[k] += (1.0 - a) * c * e[k];
        }
    }
    out
}

/// One time step of length `dt`.
pub fn step(state: &BapState, cfg: &BapConfig, dt: f64) -> Result<BapState> {
    let n = cfg.mesh.n_cells();
    let nv = cfg.grid.len();
    if state.g.len() != n * nv || state.rho.len() != n + 1 || state.nv != nv {
        return Err(invalid("state does not match the configuration"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let grid = &cfg.grid;
    let eq = &cfg.eq;
    let e = eq.values();
    let nodes = grid.nodes();
    let dx = cfg.mesh.dx();
    let eps = cfg.eps;
    let t = state.time;
    let lambda = dt / (eps * eps);
    // dt/ε · 1/(1+λ), written to stay finite for tiny ε.
    let coef = dt * eps / (eps * eps + dt);
    let sides = centre_sides(cfg);
    let rbl = boundary_rho_bar(cfg, t, Wall::Left);
    let rbr = boundary_rho_bar(cfg, t, Wall::Right);
    let (gl, gr) = wall_vectors(state, cfg, t);

    let mut g_new = vec![0.0; n * nv];
    let mut src = vec![0.0; nv];
    for m in 0..n {
        let s = sides[m];
        let es = eq.half_mass(s);
        let here = state.g_cell(m);
        let from_left = (m > 0).then(|| convert(state.g_cell(m - 1), sides[m - 1], s, grid, eq));
        let from_right = (m + 1 < n).then(|| convert(state.g_cell(m + 1), sides[m + 1], s, grid, eq));
        let rb_l = node_rho_bar(state, cfg, &sides, m, s, rbl, rbr);
        let rb_r = node_rho_bar(state, cfg, &sides, m + 1, s, rbl, rbr);
        let drb = (rb_r - rb_l) / dx;
        for k in 0..nv {
            let v = nodes[k];
            let lv = match &from_left {
                None => gl[k],
                Some(p) if v > 0.0 => p[k],
                Some(_) => here[k],
            };
            let rv = match &from_right {
                None => gr[k],
                Some(_) if v > 0.0 => here[k],
                Some(p) => p[k],
            };
            src[k] = v * (rv - lv) / dx + v * e[k] * drb;
        }
        let c = grid.sum_half(&src, s) / es;
        let out = &mut g_new[m * nv..(m + 1) * nv];
        out.copy_from_slice(here);
        relax_half_in_place(out, lambda, s, grid, eq);
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
    let mut next = BapState {
        rho,
        g: g_new,
        nv,
        time: t + dt,
    };
    let (wl, wr) = wall_vectors(&next, cfg, next.time);
    next.rho[0] = boundary_rho_bar(cfg, next.time, Wall::Left) + grid.sum(&wl);
    next.rho[n] = boundary_rho_bar(cfg, next.time, Wall::Right) + grid.sum(&wr);
    if next.rho.iter().chain(&next.g).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: format!("BAP step (eps = {eps:e}, dt = {dt:e})"),
            time: next.time,
        });
    }
    Ok(next)
}

/// Snapshots and step statistics of a run.
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    /// One state per requested time, in order.
    pub snapshots: Vec<S>,
    pub steps: usize,
    pub dt: f64,
    pub max_constraint_residual: f64,
}

pub type BapRun = Trajectory<BapState>;

/// Advances from the initial data through the requested output times
/// (ascending, the last one normally `cfg.t_end`), shortening the step that
/// would overshoot an output time.
pub fn run(cfg: &BapConfig, output_times: &[f64]) -> Result<BapRun> {
    cfg.validate()?;
    drive(cfg, output_times, BapState::initial(cfg), time_step(cfg), step, |s| s.time, |s| {
        s.constraint_residual(cfg)
    })
}

/// Runs to `cfg.t_end` and returns the final state.
pub fn run_to_end(cfg: &BapConfig) -> Result<BapRun> {
    run(cfg, &[cfg.t_end])
}

pub(crate) fn drive<S: Clone>(
    cfg: &BapConfig,
    output_times: &[f64],
    initial: S,
    dt: f64,
    stepper: impl Fn(&S, &BapConfig, f64) -> Result<S>,
    time_of: impl Fn(&S) -> f64,
    residual: impl Fn(&S) -> f64,
) -> Result<Trajectory<S>> {
    if output_times.windows(2).any(|p| p[1] < p[0]) || output_times.iter().any(|t| !(*t >= 0.0)) {
        return Err(invalid("output times must be nonnegative and ascending"));
    }
    let mut state = initial;
    let mut steps = 0;
    let mut snapshots = Vec::with_capacity(output_times.len());
    let mut worst = residual(&state);
    for &target in output_times {
        loop {
            let now = time_of(&state);
            let remaining = target - now;
            if remaining <= 1e-12 * target.max(1.0) {
                break;
            }
            let h = if remaining < dt * (1.0 + 1e-12) { remaining } else { dt };
            state = stepper(&state, cfg, h)?;
            steps += 1;
            worst = worst.max(residual(&state));
        }
        snapshots.push(state.clone());
    }
    Ok(Trajectory {
        snapshots,
        steps,
        dt,
        max_constraint_residual: worst,
    })
}
