//! Reference solvers: resolved explicit upwind scheme for the kinetic
//! equation and backward-Euler for its diffusion limit.

use crate::error::{invalid, Error, Result};
use crate::problem::BapConfig;
use crate::velocity::SpatialMesh;

/// Cell-centred distribution `f[cell * nv + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    pub f: Vec<f64>,
    pub nv: usize,
    pub time: f64,
}

impl KineticField {
    pub fn initial(cfg: &BapConfig) -> Self {
        let nv = cfg.grid.len();
        let mut f = Vec::with_capacity(cfg.mesh.n_cells() * nv);
        for &x in cfg.mesh.centers() {
            for &v in cfg.grid.nodes() {
                f.push(cfg.initial.eval(x, v));
            }
        }
        Self { f, nv, time: 0.0 }
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        &self.f[i * self.nv..(i + 1) * self.nv]
    }

    pub fn n_cells(&self) -> usize {
        self.f.len() / self.nv
    }

    pub fn density(&self, cfg: &BapConfig) -> Vec<f64> {
        (0..self.n_cells()).map(|i| cfg.grid.sum(self.cell(i))).collect()
    }

    /// `⟨v f⟩` through the walls `x = 0` and `x = 1`, upwind traces.
    pub fn wall_fluxes(&self, cfg: &BapConfig) -> (f64, f64) {
        let n = self.n_cells();
        let left_in = cfg.left_inflow(self.time);
        let right_in = cfg.right_inflow(self.time);
        let mut fl = 0.0;
        let mut fr = 0.0;
        let first = self.cell(0);
        let last = self.cell(n - 1);
        for (k, (&v, &w)) in cfg.grid.nodes().iter().zip(cfg.grid.weights()).enumerate() {
            let tl = if v > 0.0 { left_in[k] } else { first[k] };
            let tr = if v > 0.0 { last[k] } else { right_in[k] };
            fl += w * v * tl;
            fr += w * v * tr;
        }
        (fl, fr)
    }
}

/// `min(ε Δx / v_max, ε²/2)`.
pub fn explicit_stability_bound(cfg: &BapConfig) -> f64 {
    let eps = cfg.eps;
    (eps * cfg.mesh.dx() / cfg.grid.max_speed()).min(0.5 * eps * eps)
}

/// One forward-Euler step: first-order upwind transport and explicit
/// relaxation toward `⟨f⟩E`.
pub fn explicit_kinetic_step(field: &KineticField, cfg: &BapConfig, dt: f64) -> Result<KineticField> {
    let bound = explicit_stability_bound(cfg);
    if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, bound });
    }
    let n = field.n_cells();
    let nv = field.nv;
    let nodes = cfg.grid.nodes();
    let e = cfg.eq.values();
    let left_in = cfg.left_inflow(field.time);
    let right_in = cfg.right_inflow(field.time);
    let a = dt / (cfg.eps * cfg.mesh.dx());
    let r = dt / (cfg.eps * cfg.eps);
    let mut out = vec![0.0; field.f.len()];
    for i in 0..n {
        let c = field.cell(i);
        let rho = cfg.grid.sum(c);
        for k in 0..nv {
            let v = nodes[k];
            let diff = if v > 0.0 {
                let up = if i == 0 { left_in[k] } else { field.f[(i - 1) * nv + k] };
                c[k] - up
            } else {
                let down = if i + 1 == n { right_in[k] } else { field.f[(i + 1) * nv + k] };
                down - c[k]
            };
            out[i * nv + k] = c[k] - a * v * diff + r * (rho * e[k] - c[k]);
        }
    }
    let time = field.time + dt;
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "explicit kinetic step".into(),
            time,
        });
    }
    Ok(KineticField { f: out, nv, time })
}

/// Runs the explicit scheme to `cfg.t_end` with `dt = safety · bound`,
/// shortening the last step. Returns the field and the step count.
pub fn run_explicit(cfg: &BapConfig, safety: f64) -> Result<(KineticField, usize)> {
    cfg.validate()?;
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(invalid(format!("safety factor must lie in (0, 1], got {safety}")));
    }
    let dt = safety * explicit_stability_bound(cfg);
    let mut field = KineticField::initial(cfg);
    let mut steps = 0;
    while field.time < cfg.t_end {
        let h = dt.min(cfg.t_end - field.time);
        if h <= 1e-14 * cfg.t_end {
            break;
        }
        field = explicit_kinetic_step(&field, cfg, h)?;
        steps += 1;
    }
    field.time = field.time.max(cfg.t_end);
    Ok((field, steps))
}

/// Vertex-centred density with Dirichlet values on the walls.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionField {
    pub rho0: Vec<f64>,
    pub time: f64,
    pub dirichlet: (f64, f64),
    pub steps: usize,
}

impl DiffusionField {
    pub fn x(&self, i: usize) -> f64 {
        i as f64 / (self.rho0.len() - 1) as f64
    }
}

/// Thomas algorithm for `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i`
/// (`a[0]` and `c[n-1]` are ignored).
pub fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || c.len() != n || d.len() != n {
        return Err(invalid("tridiagonal system with inconsistent lengths"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut m = b[0];
    if m == 0.0 {
        return Err(invalid("zero pivot in tridiagonal solve"));
    }
    cp[0] = c[0] / m;
    dp[0] = d[0] / m;
    for i in 1..n {
        m = b[i] - a[i] * cp[i - 1];
        if m == 0.0 {
            return Err(invalid("zero pivot in tridiagonal solve"));
        }
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= cp[i] * next;
    }
    Ok(x)
}

/// Backward Euler for `∂t ρ = kappa_abs ∂xx ρ` on the nodes of a uniform
/// mesh; `initial` has one value per node including the walls (wall entries
/// are overwritten by the Dirichlet data). The step is shortened uniformly
/// so that the run ends exactly at `t_end`.
pub fn diffusion_solve(
    initial: &[f64],
    dirichlet: (f64, f64),
    kappa_abs: f64,
    t_end: f64,
    dt: f64,
) -> Result<DiffusionField> {
    if !(kappa_abs > 0.0) {
        return Err(invalid(format!("kappa_abs must be positive, got {kappa_abs}")));
    }
    if initial.len() < 3 {
        return Err(invalid("diffusion mesh needs at least 3 nodes"));
    }
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(invalid("diffusion solve needs dt > 0 and t_end >= 0"));
    }
    let n = initial.len() - 1;
    let dx = 1.0 / n as f64;
    let mut rho = initial.to_vec();
    rho[0] = dirichlet.0;
    rho[n] = dirichlet.1;
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    if steps > 0 {
        let h = t_end / steps as f64;
        let r = kappa_abs * h / (dx * dx);
        let m = n - 1;
        let a = vec![-r; m];
        let b = vec![1.0 + 2.0 * r; m];
        let c = vec![-r; m];
        let mut d = vec![0.0; m];
        for _ in 0..steps {
            d.copy_from_slice(&rho[1..n]);
            d[0] += r * dirichlet.0;
            d[m - 1] += r * dirichlet.1;
            let x = solve_tridiagonal(&a, &b, &c, &d)?;
            rho[1..n].copy_from_slice(&x);
        }
    }
    if rho.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "diffusion solve".into(),
            time: t_end,
        });
    }
    Ok(DiffusionField {
        rho0: rho,
        time: t_end,
        dirichlet,
        steps,
    })
}

/// Diffusion reference on the nodes of `mesh`, zero initial data.
pub fn diffusion_reference(mesh: &SpatialMesh, dirichlet: (f64, f64), t_end: f64, dt: f64) -> Result<DiffusionField> {
    diffusion_solve(&vec![0.0; mesh.n_cells() + 1], dirichlet, 1.0 / 3.0, t_end, dt)
}
