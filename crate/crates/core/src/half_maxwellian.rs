//! One-dimensional Maxwellians, their half-range moments over `V-`, the
//! boundary-matched Maxwellian and the half-range projector.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;

use crate::error::{invalid, Error, Result};
use crate::quadrature::gauss_legendre_on;
use crate::velocity::HalfRangeSide;

/// Parameters `(ρ, u, T)` of `ρ (2πT)^{-1/2} exp(-(v-u)²/2T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellParams1D {
    pub rho: f64,
    pub u: f64,
    pub t: f64,
}

impl MaxwellParams1D {
    pub fn new(rho: f64, u: f64, t: f64) -> Result<Self> {
        if !(rho > 0.0 && t > 0.0 && rho.is_finite() && t.is_finite() && u.is_finite()) {
            return Err(invalid(format!(
                "Maxwellian needs rho > 0, T > 0, finite u; got ({rho}, {u}, {t})"
            )));
        }
        Ok(Self { rho, u, t })
    }

    pub fn density(&self, v: f64) -> f64 {
        let d = v - self.u;
        self.rho / (2.0 * PI * self.t).sqrt() * (-d * d / (2.0 * self.t)).exp()
    }

    fn mirrored(self) -> Self {
        Self { u: -self.u, ..self }
    }
}

/// Moments against `(1, v, v²/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentVector {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

impl MomentVector {
    pub fn new(m0: f64, m1: f64, m2: f64) -> Self {
        Self { m0, m1, m2 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.m0, self.m1, self.m2]
    }
}

impl std::ops::Add for MomentVector {
    type Output = MomentVector;
    fn add(self, o: MomentVector) -> MomentVector {
        MomentVector::new(self.m0 + o.m0, self.m1 + o.m1, self.m2 + o.m2)
    }
}

/// Moments over the incoming half line of `side`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfMoments {
    pub moments: MomentVector,
    pub side: HalfRangeSide,
}

impl HalfMoments {
    pub fn new(moments: MomentVector, side: HalfRangeSide) -> Result<Self> {
        let MomentVector { m0, m1, m2 } = moments;
        let sign_ok = match side {
            HalfRangeSide::Plus => m1 > 0.0,
            HalfRangeSide::Minus => m1 < 0.0,
        };
        if !(m0 > 0.0 && m2 > 0.0 && sign_ok && m0.is_finite() && m1.is_finite() && m2.is_finite()) {
            return Err(Error::Infeasible {
                reason: format!(
                    "half moments ({m0}, {m1}, {m2}) on side {} violate the sign conditions",
                    side.name()
                ),
                trace: Vec::new(),
            });
        }
        Ok(Self { moments, side })
    }
}

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z < CF_SWITCH {
        std_normal_pdf(z) * mills_tails(-z, 0)[0]
    } else {
        0.5 * erfc(-z * FRAC_1_SQRT_2)
    }
}

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

const CF_SWITCH: f64 = -3.0;
const CF_TERMS: usize = 120;

// Tails U_k of the Mills-ratio continued fraction at x = -z > 0:
// U_k = 1 / (x + (k+1) U_{k+1}). Returns U_0..U_n; U_0 is the Mills ratio.
fn mills_tails(x: f64, n: usize) -> [f64; 5] {
    let mut out = [0.0; 5];
    let mut u = 0.0;
    for k in (0..=CF_TERMS).rev() {
        u = 1.0 / (x + (k + 1) as f64 * u);
        if k <= n {
            out[k] = u;
        }
    }
    out
}

/// `K_n(z) = ∫₀^∞ y^n φ(y - z) dy` for `n = 0..=4`, so that the half-line
/// raw moments of a Maxwellian are `ρ T^{n/2} K_n(u/√T)`.
pub(crate) fn k_moments(z: f64) -> [f64; 5] {
    let mut k = [0.0; 5];
    if z < CF_SWITCH {
        // K_0 = φ(z) U_0 and K_n = n U_n K_{n-1}, free of the cancellation
        // in the recursion.
        let u = mills_tails(-z, 4);
        k[0] = std_normal_pdf(z) * u[0];
        for n in 1..=4 {
            k[n] = n as f64 * u[n] * k[n - 1];
        }
    } else {
        let p0 = std_normal_cdf(z);
        k[0] = p0;
        k[1] = z * p0 + std_normal_pdf(z);
        for n in 2..=4 {
            k[n] = z * k[n - 1] + (n - 1) as f64 * k[n - 2];
        }
    }
    k
}

// a(z) = K1/K0 and b(z) = K2/K0.
fn ratio_ab(z: f64) -> (f64, f64) {
    if z < CF_SWITCH {
        let u = mills_tails(-z, 2);
        (u[1], 2.0 * u[1] * u[2])
    } else {
        let r = std_normal_pdf(z) / std_normal_cdf(z);
        let a = z + r;
        (a, 1.0 + z * a)
    }
}

/// `(ρ, ρu, ρu²/2 + ρT/2)`.
pub fn full_moments(p: &MaxwellParams1D) -> MomentVector {
    MomentVector::new(
        p.rho,
        p.rho * p.u,
        0.5 * p.rho * p.u * p.u + 0.5 * p.rho * p.t,
    )
}

/// Inverse of [`full_moments`].
pub fn params_from_full_moments(m: &MomentVector) -> Result<MaxwellParams1D> {
    let u = m.m1 / m.m0;
    let t = (2.0 * m.m2 * m.m0 - m.m1 * m.m1) / (m.m0 * m.m0);
    MaxwellParams1D::new(m.m0, u, t)
}

/// `∫_{V-} v^n M dv` for `n = 0..=4`.
pub fn half_power_moments(p: &MaxwellParams1D, side: HalfRangeSide) -> [f64; 5] {
    let q = match side {
        HalfRangeSide::Plus => *p,
        HalfRangeSide::Minus => p.mirrored(),
    };
    let z = q.u / q.t.sqrt();
    let k = k_moments(z);
    let s = q.t.sqrt();
    let mut out = [0.0; 5];
    let mut scale = q.rho;
    for n in 0..5 {
        let sign = if side == HalfRangeSide::Minus && n % 2 == 1 { -1.0 } else { 1.0 };
        out[n] = sign * scale * k[n];
        scale *= s;
    }
    out
}

/// Half-range moments against `(1, v, v²/2)` of the Maxwellian `p`.
pub fn half_moments(p: &MaxwellParams1D, side: HalfRangeSide) -> HalfMoments {
    let i = half_power_moments(p, side);
    HalfMoments {
        moments: MomentVector::new(i[0], i[1], 0.5 * i[2]),
        side,
    }
}

/// Recovers the Maxwellian whose half-range moments are `hm`.
///
/// With `z = u/√T`, `m1/m0 = √T a(z)` and `m2/m0 = (T/2) b(z)`, so
/// `(m1/m0)² / (2 m2/m0) = a²/b` is a function of `z` alone, increasing
/// from 1/2 to 1. It is solved by bracketed Newton; `T` and `ρ` follow.
pub fn invert_half_moments(hm: &HalfMoments) -> Result<MaxwellParams1D> {
    let hm = HalfMoments::new(hm.moments, hm.side)?;
    let MomentVector { m0, m1, m2 } = hm.moments;
    let m1 = match hm.side {
        HalfRangeSide::Plus => m1,
        HalfRangeSide::Minus => -m1,
    };
    let r1 = m1 / m0;
    let r2 = m2 / m0;
    let target = r1 * r1 / (2.0 * r2);
    let mut trace = Vec::new();
    if !(target > 0.5 && target < 1.0) {
        return Err(Error::Infeasible {
            reason: format!("ratio m1²/(2 m0 m2) = {target} outside (1/2, 1)"),
            trace,
        });
    }
    let q = |z: f64| {
        let (a, b) = ratio_ab(z);
        a * a / b - target
    };
    let (mut lo, mut hi) = (-35.0_f64, 35.0_f64);
    let (flo, fhi) = (q(lo), q(hi));
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::Infeasible {
            reason: format!("ratio {target} not bracketed on z in [-35, 35]"),
            trace,
        });
    }
    let mut z = 0.0;
    let mut converged = false;
    for _ in 0..200 {
        let (a, b) = ratio_ab(z);
        let h = a * a / b - target;
        trace.push(z);
        if h == 0.0 {
            converged = true;
            break;
        }
        if h < 0.0 {
            lo = z;
        } else {
            hi = z;
        }
        let r = a - z;
        let da = 1.0 - r * a;
        let db = a + z * da;
        let dq = (2.0 * a * da * b - a * a * db) / (b * b);
        let mut next = z - h / dq;
        if !(next > lo && next < hi) || !dq.is_finite() || dq <= 0.0 {
            next = 0.5 * (lo + hi);
        }
        if (next - z).abs() <= 4.0 * f64::EPSILON * z.abs().max(1.0) || hi - lo <= 4.0 * f64::EPSILON * z.abs().max(1.0) {
            z = next;
            converged = true;
            break;
        }
        z = next;
    }
    let resid = q(z).abs();
    if !converged || resid > 1e-10 {
        return Err(Error::Infeasible {
            reason: format!("Newton on z stopped with residual {resid:e}"),
            trace,
        });
    }
    let (a, _) = ratio_ab(z);
    let sqrt_t = r1 / a;
    let t = sqrt_t * sqrt_t;
    let u = z * sqrt_t;
    let rho = m0 / std_normal_cdf(z);
    let u = match hm.side {
        HalfRangeSide::Plus => u,
        HalfRangeSide::Minus => -u,
    };
    MaxwellParams1D::new(rho, u, t)
}

/// `(ρu, ρu² + ρT, ρu³/2 + 3ρuT/2)`, the flux `∫ v m(v) M dv`.
pub fn euler_flux_of_maxwellian(p: &MaxwellParams1D) -> MomentVector {
    let MaxwellParams1D { rho, u, t } = *p;
    MomentVector::new(
        rho * u,
        rho * u * u + rho * t,
        0.5 * rho * u * u * u + 1.5 * rho * u * t,
    )
}

/// `∫_{V-} v m(v) M dv`.
pub fn half_flux(p: &MaxwellParams1D, side: HalfRangeSide) -> MomentVector {
    let i = half_power_moments(p, side);
    MomentVector::new(i[1], i[2], 0.5 * i[3])
}

/// Quadrature on the incoming half line of a side.
#[derive(Debug, Clone)]
pub struct HalfLineQuadrature {
    pub side: HalfRangeSide,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HalfLineQuadrature {
    /// Composite Gauss–Legendre covering the mass of `p` on the half line,
    /// `panels` panels of `order` nodes on `[0, max(0, ±u) + 12√T]`.
    pub fn for_maxwellian(p: &MaxwellParams1D, side: HalfRangeSide, panels: usize, order: usize) -> Self {
        let q = match side {
            HalfRangeSide::Plus => *p,
            HalfRangeSide::Minus => p.mirrored(),
        };
        let s = q.t.sqrt();
        let lo = (q.u - 12.0 * s).max(0.0);
        let hi = q.u.max(0.0) + 12.0 * s;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        let h = (hi - lo) / panels as f64;
        for k in 0..panels {
            let a = lo + k as f64 * h;
            let (x, w) = gauss_legendre_on(order, a, a + h);
            nodes.extend(x);
            weights.extend(w);
        }
        if side == HalfRangeSide::Minus {
            nodes.iter_mut().for_each(|v| *v = -*v);
        }
        Self { side, nodes, weights }
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, f)| w * f).sum()
    }
}

/// Result of [`project_half`].
#[derive(Debug, Clone)]
pub struct HalfProjection {
    pub coefficients: [f64; 3],
    /// `(c0 + c1 v + c2 v²) M` at the quadrature nodes.
    pub values: Vec<f64>,
}

/// Orthogonal projection onto `span{M, vM, v²M}` in `L²(M⁻¹ 1_{V-})`.
pub fn project_half(
    phi: &[f64],
    quad: &HalfLineQuadrature,
    p: &MaxwellParams1D,
) -> Result<HalfProjection> {
    if phi.len() != quad.nodes.len() {
        return Err(invalid("samples do not match the quadrature"));
    }
    let g = gram_matrix(p, quad.side);
    let mut b = [0.0; 3];
    for ((v, w), f) in quad.nodes.iter().zip(&quad.weights).zip(phi) {
        b[0] += w * f;
        b[1] += w * v * f;
        b[2] += w * v * v * f;
    }
    let c = solve_spd3(&g, &b).ok_or_else(|| invalid("half-range Gram matrix is singular"))?;
    let values = quad
        .nodes
        .iter()
        .map(|&v| (c[0] + c[1] * v + c[2] * v * v) * p.density(v))
        .collect();
    Ok(HalfProjection {
        coefficients: c,
        values,
    })
}

/// `G_kl = ∫_{V-} v^{k+l} M dv`, `k, l = 0, 1, 2`.
pub fn gram_matrix(p: &MaxwellParams1D, side: HalfRangeSide) -> [[f64; 3]; 3] {
    let i = half_power_moments(p, side);
    let mut g = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            g[k][l] = i[k + l];
        }
    }
    g
}

// Cholesky solve; None when not positive definite.
fn solve_spd3(g: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = [0.0; 3];
    for i in 0..3 {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut s = y[i];
        for k in i + 1..3 {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Some(x)
}

/// Maxwellian matching the half moments of incoming samples `f_b`.
pub fn boundary_maxwellian(f_b: &[f64], quad: &HalfLineQuadrature) -> Result<MaxwellParams1D> {
    if f_b.len() != quad.nodes.len() {
        return Err(invalid("samples do not match the quadrature"));
    }
    let mut m = [0.0; 3];
    for ((v, w), f) in quad.nodes.iter().zip(&quad.weights).zip(f_b) {
        m[0] += w * f;
        m[1] += w * v * f;
        m[2] += 0.5 * w * v * v * f;
    }
    let hm = HalfMoments::new(MomentVector::new(m[0], m[1], m[2]), quad.side)?;
    invert_half_moments(&hm)
}
