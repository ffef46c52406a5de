//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use bap_core::bap::BapState;
use bap_core::classical::ClassicalState;
use bap_core::{half_sign, BapConfig, BoundaryData, Equilibrium, HalfRangeSide, InitialData, SpatialMesh, VelocityGrid};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random even, positive `E` normalized to `⟨E⟩ = 1`.
pub fn random_equilibrium(grid: &VelocityGrid, r: &mut ChaCha8Rng) -> Equilibrium {
    let n = grid.n_half();
    let half: Vec<f64> = (0..n).map(|_| r.gen_range(0.2..2.0)).collect();
    let mut vals = vec![0.0; 2 * n];
    for k in 0..n {
        vals[n + k] = half[k];
        vals[n - 1 - k] = half[k];
    }
    let mass: f64 = vals.iter().zip(grid.weights()).map(|(e, w)| e * w).sum();
    vals.iter_mut().for_each(|e| *e /= mass);
    Equilibrium::new(grid, vals).expect("symmetric profile")
}

pub mod exact;

use exact::{q, qi, Mat, Q};

fn weights_row(grid: &VelocityGrid) -> Mat {
    Mat::row(grid.weights())
}

fn half_weights_row(grid: &VelocityGrid, side: HalfRangeSide) -> Mat {
    let w: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .map(|(&v, &w)| if side.contains(v) { w } else { 0.0 })
        .collect();
    Mat::row(&w)
}

/// `L = E W - I`.
fn l_matrix(grid: &VelocityGrid, eq: &Equilibrium) -> Mat {
    Mat::col(eq.values()).mul(&weights_row(grid)).sub(&Mat::identity(grid.len()))
}

/// `P_s = I - E W_s / (W_s E)`.
fn half_projector(grid: &VelocityGrid, eq: &Equilibrium, s: HalfRangeSide) -> Mat {
    let e = Mat::col(eq.values());
    let ws = half_weights_row(grid, s);
    let es = ws.mul(&e).scalar();
    Mat::identity(grid.len()).sub(&e.mul(&ws).scale(&(Q::from_integer(1.into()) / es)))
}

/// `(I - λ P_s L)⁻¹ rhs`, assembled and solved exactly.
pub fn dense_relaxation(rhs: &[f64], lambda: f64, s: HalfRangeSide, grid: &VelocityGrid, eq: &Equilibrium) -> Vec<f64> {
    let n = grid.len();
    let a = half_projector(grid, eq, s).mul(&l_matrix(grid, eq));
    let m = Mat::identity(n).sub(&a.scale(&q(lambda)));
    m.inverse().mul(&Mat::col(rhs)).to_f64()
}

/// Affine map `s ↦ m s + c` on the flattened state.
#[derive(Clone)]
pub struct Affine {
    pub m: Mat,
    pub c: Mat,
}

impl Affine {
    fn zero(rows: usize, dim: usize) -> Self {
        Self { m: Mat::zeros(rows, dim), c: Mat::zeros(rows, 1) }
    }
    fn constant(c: Mat, dim: usize) -> Self {
        Self { m: Mat::zeros(c.r, dim), c }
    }
    fn lmul(&self, k: &Mat) -> Self {
        Self { m: k.mul(&self.m), c: k.mul(&self.c) }
    }
    fn add(&self, o: &Self) -> Self {
        Self { m: self.m.add(&o.m), c: self.c.add(&o.c) }
    }
    fn scale(&self, a: &Q) -> Self {
        Self { m: self.m.scale(a), c: self.c.scale(a) }
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&qi(-1)))
    }
}

/// Layout `[ρ_1..ρ_{N-1}, g_0, .., g_{N-1}]`.
pub struct Layout {
    pub n: usize,
    pub nv: usize,
}

impl Layout {
    pub fn dim(&self) -> usize {
        self.n - 1 + self.n * self.nv
    }
    fn g(&self, m: usize) -> Affine {
        let mut a = Affine::zero(self.nv, self.dim());
        for k in 0..self.nv {
            a.m.set(k, self.n - 1 + m * self.nv + k, qi(1));
        }
        a
    }
    fn rho(&self, i: usize) -> Affine {
        let mut a = Affine::zero(1, self.dim());
        a.m.set(0, i - 1, qi(1));
        a
    }
    pub fn pack(&self, rho: &[f64], g: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[..self.n - 1].copy_from_slice(&rho[1..self.n]);
        v[self.n - 1..].copy_from_slice(g);
        v
    }
}

/// Dense affine step map.
pub struct DenseStep {
    a: Mat,
    b: Mat,
}

impl DenseStep {
    /// `A s + b`, evaluated exactly and rounded once.
    pub fn apply(&self, s: &[f64]) -> Vec<f64> {
        self.a.mul(&Mat::col(s)).add(&self.b).to_f64()
    }
}

fn masks(grid: &VelocityGrid) -> (Mat, Mat) {
    let pos: Vec<Q> = grid.nodes().iter().map(|&v| qi((v > 0.0) as i64)).collect();
    let neg: Vec<Q> = grid.nodes().iter().map(|&v| qi((v < 0.0) as i64)).collect();
    (Mat::diag(&pos), Mat::diag(&neg))
}

fn inflow(cfg: &BapConfig, t: f64, left: bool) -> Mat {
    let v: Vec<f64> = cfg
        .grid
        .nodes()
        .iter()
        .map(|&vk| {
            if left && vk > 0.0 {
                (cfg.boundary_data.left_incoming)(t, vk)
            } else if !left && vk < 0.0 {
                (cfg.boundary_data.right_incoming)(t, vk)
            } else {
                0.0
            }
        })
        .collect();
    Mat::col(&v)
}

/// Assembles the BAP step exactly as a dense affine map.
pub fn dense_bap_step(cfg: &BapConfig, t: f64, dt: f64) -> DenseStep {
    let grid = &cfg.grid;
    let eq = &cfg.eq;
    let n = cfg.mesh.n_cells();
    let nv = grid.len();
    let lay = Layout { n, nv };
    let dim = lay.dim();
    let dx = cfg.mesh.dx();
    let eps = cfg.eps;
    let inv_dx = qi(1) / q(dx);
    let e = Mat::col(eq.values());
    let vq: Vec<Q> = grid.nodes().iter().map(|&v| q(v)).collect();
    let v = Mat::diag(&vq);
    let wv = weights_row(grid).mul(&v);
    let (pos, neg) = masks(grid);
    let side: Vec<HalfRangeSide> = cfg.mesh.centers().iter().map(|&x| half_sign(x)).collect();
    let to = |from: HalfRangeSide, s: HalfRangeSide| {
        if from == s {
            Mat::identity(nv)
        } else {
            half_projector(grid, eq, s)
        }
    };
    let es = |s| half_weights_row(grid, s).mul(&e).scalar();
    let fl = inflow(cfg, t, true);
    let fr = inflow(cfg, t, false);
    let rbl = half_weights_row(grid, HalfRangeSide::Plus).mul(&fl).scalar() / es(HalfRangeSide::Plus);
    let rbr = half_weights_row(grid, HalfRangeSide::Minus).mul(&fr).scalar() / es(HalfRangeSide::Minus);

    // Wall node vector, affine in the adjacent g.
    let wall = |gm: &Affine, fb: &Mat, rb: &Q, inc: &Mat, out: &Mat| -> Affine {
        let att: Vec<Q> = grid.nodes().iter().map(|&vk| q((-(0.5 * dx) / (eps * vk.abs())).exp())).collect();
        let a_out = out.mul(&Mat::diag(&att));
        let rest: Vec<Q> = att.iter().map(|a| qi(1) - a).collect();
        let one_minus = out.mul(&Mat::diag(&rest));
        let inc_part = inc.mul(&fb.sub(&e.scale(rb)));
        let d = wv.mul(&one_minus).mul(&e).scalar();
        let inv_d = qi(1) / d;
        let c_lin = wv.sub(&wv.mul(&a_out)).scale(&inv_d);
        let mut c_const = Mat::zeros(1, 1);
        c_const.set(0, 0, -wv.mul(&inc_part).scalar() * &inv_d);
        let c = gm.lmul(&c_lin).add(&Affine::constant(c_const, dim));
        let iso = one_minus.mul(&e);
        gm.lmul(&a_out).add(&c.lmul(&iso)).add(&Affine::constant(inc_part, dim))
    };
    let gl = wall(&lay.g(0), &fl, &rbl, &pos, &neg);
    let gr = wall(&lay.g(n - 1), &fr, &rbr, &neg, &pos);

    let half = Q::new(1.into(), 2.into());
    let rbar = |i: usize, s: HalfRangeSide| -> Affine {
        let konst = |x: &Q| {
            let mut c = Mat::zeros(1, 1);
            c.set(0, 0, x.clone());
            Affine::constant(c, dim)
        };
        if i == 0 {
            return konst(&rbl);
        }
        if i == n {
            return konst(&rbr);
        }
        let a = lay.g(i - 1).lmul(&weights_row(grid).mul(&to(side[i - 1], s)));
        let b = lay.g(i).lmul(&weights_row(grid).mul(&to(side[i], s)));
        lay.rho(i).sub(&a.add(&b).scale(&half))
    };

    let lambda = q(dt) / (q(eps) * q(eps));
    let dt_eps = q(dt) / q(eps);
    let ve = v.mul(&e);
    let mut new_g = Vec::with_capacity(n);
    for m in 0..n {
        let s = side[m];
        let left = if m == 0 {
            gl.clone()
        } else {
            lay.g(m - 1).lmul(&pos.mul(&to(side[m - 1], s))).add(&lay.g(m).lmul(&neg))
        };
        let right = if m + 1 == n {
            gr.clone()
        } else {
            lay.g(m).lmul(&pos).add(&lay.g(m + 1).lmul(&neg.mul(&to(side[m + 1], s))))
        };
        let transport = right.sub(&left).lmul(&v).scale(&inv_dx);
        let grad = rbar(m + 1, s).sub(&rbar(m, s)).scale(&inv_dx);
        let source = transport.add(&grad.lmul(&ve));
        let ps = half_projector(grid, eq, s);
        let rhs = lay.g(m).sub(&source.lmul(&ps).scale(&dt_eps));
        let stiff = ps.mul(&l_matrix(grid, eq));
        let inv = Mat::identity(nv).sub(&stiff.scale(&lambda)).inverse();
        new_g.push(rhs.lmul(&inv));
    }
    assemble(&lay, &new_g, &wv, &(q(dt) / (q(eps) * q(dx))))
}

fn assemble(lay: &Layout, new_g: &[Affine], wv: &Mat, a: &Q) -> DenseStep {
    let n = lay.n;
    let nv = lay.nv;
    let dim = lay.dim();
    let mut big = Mat::zeros(dim, dim);
    let mut c = Mat::zeros(dim, 1);
    for i in 1..n {
        let r = lay.rho(i).sub(&new_g[i].lmul(wv).sub(&new_g[i - 1].lmul(wv)).scale(a));
        for j in 0..dim {
            big.set(i - 1, j, r.m.at(0, j).clone());
        }
        c.set(i - 1, 0, r.c.at(0, 0).clone());
    }
    for m in 0..n {
        for k in 0..nv {
            let row = n - 1 + m * nv + k;
            for j in 0..dim {
                big.set(row, j, new_g[m].m.at(k, j).clone());
            }
            c.set(row, 0, new_g[m].c.at(k, 0).clone());
        }
    }
    DenseStep { a: big, b: c }
}

/// Assembles the classical step exactly as a dense affine map.
pub fn dense_classical_step(cfg: &BapConfig, t: f64, dt: f64) -> DenseStep {
    let grid = &cfg.grid;
    let eq = &cfg.eq;
    let n = cfg.mesh.n_cells();
    let nv = grid.len();
    let lay = Layout { n, nv };
    let dim = lay.dim();
    let dx = cfg.mesh.dx();
    let eps = cfg.eps;
    let inv_dx = qi(1) / q(dx);
    let e = Mat::col(eq.values());
    let vq: Vec<Q> = grid.nodes().iter().map(|&v| q(v)).collect();
    let v = Mat::diag(&vq);
    let wv = weights_row(grid).mul(&v);
    let (pos, neg) = masks(grid);
    let id = Mat::identity(nv);
    let full_proj = id.sub(&e.mul(&weights_row(grid)));
    let fl = inflow(cfg, t, true);
    let fr = inflow(cfg, t, false);
    let rho_at = |i: usize| -> Affine {
        if i == 0 {
            lay.rho(1)
        } else if i == n {
            lay.rho(n - 1)
        } else {
            lay.rho(i)
        }
    };
    let gl = Affine::constant(pos.mul(&fl), dim)
        .sub(&rho_at(0).lmul(&pos.mul(&e)))
        .add(&lay.g(0).lmul(&neg));
    let gr = Affine::constant(neg.mul(&fr), dim)
        .sub(&rho_at(n).lmul(&neg.mul(&e)))
        .add(&lay.g(n - 1).lmul(&pos));
    let lambda = q(dt) / (q(eps) * q(eps));
    let dt_eps = q(dt) / q(eps);
    let stiff = full_proj.mul(&l_matrix(grid, eq));
    let inv = id.sub(&stiff.scale(&lambda)).inverse();
    let ve = v.mul(&e);
    let mut new_g = Vec::with_capacity(n);
    for m in 0..n {
        let left = if m == 0 { gl.clone() } else { lay.g(m - 1).lmul(&pos).add(&lay.g(m).lmul(&neg)) };
        let right = if m + 1 == n { gr.clone() } else { lay.g(m).lmul(&pos).add(&lay.g(m + 1).lmul(&neg)) };
        let transport = right.sub(&left).lmul(&v).scale(&inv_dx);
        let grad = rho_at(m + 1).sub(&rho_at(m)).scale(&inv_dx);
        let source = transport.add(&grad.lmul(&ve));
        let rhs = lay.g(m).sub(&source.lmul(&full_proj).scale(&dt_eps));
        new_g.push(rhs.lmul(&inv));
    }
    assemble(&lay, &new_g, &wv, &(q(dt) / (q(eps) * q(dx))))
}

/// Small random problem with time-dependent inflow and a random `E`.
pub fn random_problem(eps: f64, n_cells: usize, n_half: usize, r: &mut ChaCha8Rng) -> BapConfig {
    let mesh = SpatialMesh::new(n_cells).unwrap();
    let grid = VelocityGrid::new(n_half).unwrap();
    let eq = random_equilibrium(&grid, r);
    let (a, b, c) = (r.gen_range(0.5..1.5), r.gen_range(-0.5..0.5), r.gen_range(0.0..1.0));
    BapConfig {
        eps,
        mesh,
        grid,
        eq,
        cfl_sigma: 0.45,
        t_end: 1.0,
        boundary_data: BoundaryData::new(move |t, v| a + b * v + 0.3 * (t + v * v).sin(), move |t, v| c * (1.0 - v) * (1.0 + t)),
        initial: InitialData::zero(),
    }
}

pub fn random_bap_state(cfg: &BapConfig, r: &mut ChaCha8Rng) -> BapState {
    let n = cfg.mesh.n_cells();
    let nv = cfg.grid.len();
    BapState {
        rho: (0..=n).map(|_| r.gen_range(0.0..2.0)).collect(),
        g: (0..n * nv).map(|_| r.gen_range(-1.0..1.0)).collect(),
        nv,
        time: r.gen_range(0.0..1.0),
    }
}

pub fn random_classical_state(cfg: &BapConfig, r: &mut ChaCha8Rng) -> ClassicalState {
    let b = random_bap_state(cfg, r);
    ClassicalState {
        rho: b.rho,
        g: b.g,
        nv: b.nv,
        time: b.time,
    }
}

/// Adaptive Gauss–Legendre on `[a, b]` comparing 10- and 20-point rules
/// per panel; error control relative to `scale`.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel: f64, scale: f64) -> f64 {
    fn rule(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let (x, w) = bap_core::quadrature::gauss_legendre_on(n, a, b);
        x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum()
    }
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel: f64, scale: f64, depth: u32) -> f64 {
        let c = rule(f, a, b, 10);
        let fine = rule(f, a, b, 20);
        if (fine - c).abs() <= rel * scale || depth > 40 {
            return fine;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, rel, scale, depth + 1) + rec(f, m, b, rel, scale, depth + 1)
    }
    rec(f, a, b, rel, scale, 0)
}

/// `∫_{V-} v^n M dv` by adaptive quadrature on the half line.
pub fn half_moment_oracle(rho: f64, u: f64, t: f64, side: HalfRangeSide, n: i32) -> f64 {
    let s = t.sqrt();
    let dens = move |v: f64| rho / (2.0 * std::f64::consts::PI * t).sqrt() * (-(v - u) * (v - u) / (2.0 * t)).exp();
    let (a, b) = match side {
        HalfRangeSide::Plus => ((u - 40.0 * s).max(0.0), (u + 40.0 * s).max(1e-300)),
        HalfRangeSide::Minus => ((u - 40.0 * s).min(-1e-300), (u + 40.0 * s).min(0.0)),
    };
    let f = move |v: f64| v.powi(n) * dens(v);
    // Composite pass for the magnitude, then relative error control.
    let h = (b - a) / 64.0;
    let rough: f64 = (0..64)
        .map(|k| {
            let (x, w) = bap_core::quadrature::gauss_legendre_on(20, a + k as f64 * h, a + (k + 1) as f64 * h);
            x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum::<f64>()
        })
        .sum();
    adaptive(&f, a, b, 1e-14, rough.abs().max(1e-300))
}

/// Uniform draws from `[0.1, 10] × [-3, 3] × [0.1, 10]` plus the box corners.
pub fn maxwell_sweep() -> Vec<bap_core::MaxwellParams1D> {
    use bap_core::MaxwellParams1D;
    let mut r = rng(2024);
    let mut out = Vec::new();
    for rho in [0.1, 10.0] {
        for u in [-3.0, 3.0] {
            for t in [0.1, 10.0] {
                out.push(MaxwellParams1D::new(rho, u, t).unwrap());
            }
        }
    }
    for _ in 0..300 {
        out.push(MaxwellParams1D::new(r.gen_range(0.1..10.0), r.gen_range(-3.0..3.0), r.gen_range(0.1..10.0)).unwrap());
    }
    out
}

/// Smooth data at ε = 1: `f_init = (1 + sin(πx)/2)(1 + 0.3v)`, inflow `1 + 0.3v`.
pub fn smooth_case(n: usize) -> BapConfig {
    let mut cfg = BapConfig::for_case(bap_core::Case::Constant, 1.0, n, 8, 0.2).unwrap();
    cfg.boundary_data = BoundaryData::new(|_, v| 1.0 + 0.3 * v, |_, v| 1.0 + 0.3 * v);
    cfg.initial = InitialData::new(|x, v| (1.0 + 0.5 * (std::f64::consts::PI * x).sin()) * (1.0 + 0.3 * v));
    cfg
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
