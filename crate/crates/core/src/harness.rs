//! Experiment plumbing: `key = value` configs, runs, CSV profiles with a
//! metadata sidecar, profile comparison and ε-sweeps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::bap::{self, rho_bar};
use crate::chandrasekhar::{milne_boundary_value, solve_h, HTable};
use crate::classical::{self, run_classical};
use crate::error::{invalid, Error, Result};
use crate::problem::{BapConfig, Case};
use crate::reference::{diffusion_solve, run_explicit};
use crate::velocity::{half_sign, SpatialMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Bap,
    Classical,
    Explicit,
    Diffusion,
}

impl Scheme {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bap" => Some(Scheme::Bap),
            "classical" => Some(Scheme::Classical),
            "explicit" => Some(Scheme::Explicit),
            "diffusion" => Some(Scheme::Diffusion),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Bap => "bap",
            Scheme::Classical => "classical",
            Scheme::Explicit => "explicit",
            Scheme::Diffusion => "diffusion",
        }
    }

    pub fn is_kinetic(self) -> bool {
        self != Scheme::Diffusion
    }
}

/// A single run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    /// Required for the kinetic schemes.
    pub eps: Option<f64>,
    pub n_cells: usize,
    pub n_half: usize,
    pub t_end: f64,
    pub cfl_sigma: f64,
    pub case: Case,
    pub output_path: PathBuf,
    /// Wall values for the diffusion scheme.
    pub dirichlet: Option<(f64, f64)>,
    /// Backward-Euler step of the diffusion scheme.
    pub diffusion_dt: f64,
    /// Fraction of the stability bound used by the explicit scheme.
    pub explicit_safety: f64,
}

impl RunConfig {
    pub fn new(scheme: Scheme, eps: Option<f64>, t_end: f64) -> Self {
        Self {
            scheme,
            eps,
            n_cells: 100,
            n_half: 8,
            t_end,
            cfl_sigma: 0.45,
            case: Case::Linear,
            output_path: PathBuf::from(format!("{}.csv", scheme.name())),
            dirichlet: None,
            diffusion_dt: 1e-4,
            explicit_safety: 0.9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config { line: 0, msg: m });
        if self.scheme.is_kinetic() {
            match self.eps {
                None => return bad(format!("scheme {} needs eps", self.scheme.name())),
                Some(e) if !(e > 0.0 && e.is_finite()) => return bad(format!("eps must be positive, got {e}")),
                _ => {}
            }
        } else if self.dirichlet.is_none() {
            return bad("scheme diffusion needs dirichlet = a, b".into());
        }
        if self.n_cells < 2 || self.n_cells % 2 != 0 {
            return bad(format!("n_cells must be even and at least 2, got {}", self.n_cells));
        }
        if self.n_half < 2 {
            return bad(format!("n_half must be at least 2, got {}", self.n_half));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be >= 0, got {}", self.t_end));
        }
        if !(self.cfl_sigma > 0.0 && self.cfl_sigma <= 1.0) {
            return bad(format!("cfl_sigma must lie in (0, 1], got {}", self.cfl_sigma));
        }
        if !(self.diffusion_dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.diffusion_dt));
        }
        if !(self.explicit_safety > 0.0 && self.explicit_safety <= 1.0) {
            return bad(format!("safety must lie in (0, 1], got {}", self.explicit_safety));
        }
        Ok(())
    }

    /// Kinetic configuration for this run.
    pub fn kinetic_config(&self) -> Result<BapConfig> {
        let eps = self.eps.ok_or_else(|| invalid("kinetic run without eps"))?;
        let mut cfg = BapConfig::for_case(self.case, eps, self.n_cells, self.n_half, self.t_end)?;
        cfg.cfl_sigma = self.cfl_sigma;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses line-oriented `key = value` text. `#` starts a comment.
///
/// Keys: `scheme`, `eps`, `n_cells`, `n_half`, `t_end`, `cfl_sigma`, `case`,
/// `output`, `dirichlet` (`a, b`), `dt`, `safety`.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let err = |line: usize, msg: String| Error::Config { line, msg };
    let mut scheme = None;
    let mut eps = None;
    let mut n_cells = None;
    let mut n_half = None;
    let mut t_end = None;
    let mut cfl_sigma = None;
    let mut case = None;
    let mut output = None;
    let mut dirichlet = None;
    let mut dt = None;
    let mut safety = None;
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, got `{body}`")))?;
        let key = key.trim();
        let value = value.trim();
        if !seen.insert(key.to_string()) {
            return Err(err(line, format!("duplicate key `{key}`")));
        }
        let real = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(line, format!("`{key}`: malformed number `{v}`")))
        };
        let positive = |v: &str| -> Result<f64> {
            let x = real(v)?;
            if x > 0.0 {
                Ok(x)
            } else {
                Err(err(line, format!("`{key}` must be positive, got {x}")))
            }
        };
        let count = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| err(line, format!("`{key}`: malformed integer `{v}`")))
        };
        match key {
            "scheme" => {
                scheme = Some(Scheme::parse(value).ok_or_else(|| err(line, format!("unknown scheme `{value}`")))?)
            }
            "eps" => eps = Some(positive(value)?),
            "n_cells" => {
                let n = count(value)?;
                if n < 2 || n % 2 != 0 {
                    return Err(err(line, format!("n_cells must be even and at least 2, got {n}")));
                }
                n_cells = Some(n);
            }
            "n_half" => {
                let n = count(value)?;
                if n < 2 {
                    return Err(err(line, format!("n_half must be at least 2, got {n}")));
                }
                n_half = Some(n);
            }
            "t_end" => {
                let t = real(value)?;
                if t < 0.0 {
                    return Err(err(line, format!("t_end must be >= 0, got {t}")));
                }
                t_end = Some(t);
            }
            "cfl_sigma" => {
                let s = positive(value)?;
                if s > 1.0 {
                    return Err(err(line, format!("cfl_sigma must lie in (0, 1], got {s}")));
                }
                cfl_sigma = Some(s);
            }
            "case" => case = Some(Case::parse(value).ok_or_else(|| err(line, format!("unknown case `{value}`")))?),
            "output" => {
                if value.is_empty() {
                    return Err(err(line, "empty output path".into()));
                }
                output = Some(PathBuf::from(value));
            }
            "dirichlet" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(err(line, format!("dirichlet needs two values `a, b`, got `{value}`")));
                }
                dirichlet = Some((real(parts[0])?, real(parts[1])?));
            }
            "dt" => dt = Some(positive(value)?),
            "safety" => {
                let s = positive(value)?;
                if s > 1.0 {
                    return Err(err(line, format!("safety must lie in (0, 1], got {s}")));
                }
                safety = Some(s);
            }
            other => return Err(err(line, format!("unknown key `{other}`"))),
        }
    }
    let scheme = scheme.ok_or_else(|| err(0, "missing required key `scheme`".into()))?;
    let t_end = t_end.ok_or_else(|| err(0, "missing required key `t_end`".into()))?;
    let mut cfg = RunConfig::new(scheme, eps, t_end);
    if let Some(n) = n_cells {
        cfg.n_cells = n;
    }
    if let Some(n) = n_half {
        cfg.n_half = n;
    }
    if let Some(s) = cfl_sigma {
        cfg.cfl_sigma = s;
    }
    if let Some(c) = case {
        cfg.case = c;
    }
    if let Some(p) = output {
        cfg.output_path = p;
    }
    if let Some(d) = dt {
        cfg.diffusion_dt = d;
    }
    if let Some(s) = safety {
        cfg.explicit_safety = s;
    }
    cfg.dirichlet = dirichlet;
    cfg.validate()?;
    Ok(cfg)
}

/// Density profile as written to CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub rho_bar: Option<Vec<f64>>,
}

/// Step statistics of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub dt: f64,
    pub steps: usize,
    pub max_constraint_residual: Option<f64>,
}

/// Runs the configured scheme in memory.
///
/// Micro/macro profiles hold the interior nodes, explicit profiles the cell
/// centres, diffusion profiles all nodes including the walls.
pub fn simulate(cfg: &RunConfig) -> Result<(Profile, RunStats)> {
    cfg.validate()?;
    match cfg.scheme {
        Scheme::Bap => {
            let k = cfg.kinetic_config()?;
            let run = bap::run(&k, &[cfg.t_end])?;
            let st = &run.snapshots[0];
            let n = k.mesh.n_cells();
            let x = k.mesh.interfaces()[1..n].to_vec();
            let rho = st.rho[1..n].to_vec();
            let rb = (1..n).map(|i| rho_bar(st, &k, i)).collect();
            Ok((
                Profile { x, rho, rho_bar: Some(rb) },
                RunStats {
                    dt: run.dt,
                    steps: run.steps,
                    max_constraint_residual: Some(run.max_constraint_residual),
                },
            ))
        }
        Scheme::Classical => {
            let k = cfg.kinetic_config()?;
            let run = run_classical(&k, &[cfg.t_end])?;
            let st = &run.snapshots[0];
            let n = k.mesh.n_cells();
            let x = k.mesh.interfaces()[1..n].to_vec();
            let rho = st.rho[1..n].to_vec();
            let rb = (1..n)
                .map(|i| {
                    let s = half_sign(k.mesh.interfaces()[i]);
                    let avg: Vec<f64> = st
                        .g_cell(i - 1)
                        .iter()
                        .zip(st.g_cell(i))
                        .map(|(a, b)| 0.5 * (a + b))
                        .collect();
                    st.rho[i] + k.grid.sum_half(&avg, s) / k.eq.half_mass(s)
                })
                .collect();
            Ok((
                Profile { x, rho, rho_bar: Some(rb) },
                RunStats {
                    dt: run.dt,
                    steps: run.steps,
                    max_constraint_residual: Some(run.max_constraint_residual),
                },
            ))
        }
        Scheme::Explicit => {
            let k = cfg.kinetic_config()?;
            let (field, steps) = run_explicit(&k, cfg.explicit_safety)?;
            let rho = field.density(&k);
            let rb = (0..k.mesh.n_cells())
                .map(|i| {
                    let s = half_sign(k.mesh.centers()[i]);
                    k.grid.sum_half(field.cell(i), s) / k.eq.half_mass(s)
                })
                .collect();
            Ok((
                Profile {
                    x: k.mesh.centers().to_vec(),
                    rho,
                    rho_bar: Some(rb),
                },
                RunStats {
                    dt: cfg.explicit_safety * crate::reference::explicit_stability_bound(&k),
                    steps,
                    max_constraint_residual: None,
                },
            ))
        }
        Scheme::Diffusion => {
            let mesh = SpatialMesh::new(cfg.n_cells)?;
            let d = cfg.dirichlet.ok_or_else(|| invalid("diffusion run without dirichlet data"))?;
            let init = vec![0.0; mesh.n_cells() + 1];
            let field = diffusion_solve(&init, d, 1.0 / 3.0, cfg.t_end, cfg.diffusion_dt)?;
            let dt = if field.steps > 0 { cfg.t_end / field.steps as f64 } else { 0.0 };
            Ok((
                Profile {
                    x: mesh.interfaces().to_vec(),
                    rho: field.rho0,
                    rho_bar: None,
                },
                RunStats {
                    dt,
                    steps: field.steps,
                    max_constraint_residual: None,
                },
            ))
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `x,rho[,rho_bar]` rows with 17 significant digits.
pub fn write_profile(path: &Path, p: &Profile) -> Result<()> {
    let mut s = String::new();
    s.push_str(if p.rho_bar.is_some() { "x,rho,rho_bar\n" } else { "x,rho\n" });
    for i in 0..p.x.len() {
        write!(s, "{:.16e},{:.16e}", p.x[i], p.rho[i]).unwrap();
        if let Some(rb) = &p.rho_bar {
            write!(s, ",{:.16e}", rb[i]).unwrap();
        }
        s.push('\n');
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, s).map_err(io_err(path))
}

/// Reads a profile written by [`write_profile`].
pub fn read_profile(path: &Path) -> Result<Profile> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let perr = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, h)| h.trim()).unwrap_or("");
    let with_bar = match header {
        "x,rho,rho_bar" => true,
        "x,rho" => false,
        other => return Err(perr(1, format!("unexpected header `{other}`"))),
    };
    let mut p = Profile {
        x: Vec::new(),
        rho: Vec::new(),
        rho_bar: with_bar.then(Vec::new),
    };
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| perr(i + 1, e.to_string()))?;
        if vals.len() != if with_bar { 3 } else { 2 } {
            return Err(perr(i + 1, format!("expected {} columns", if with_bar { 3 } else { 2 })));
        }
        p.x.push(vals[0]);
        p.rho.push(vals[1]);
        if let Some(rb) = p.rho_bar.as_mut() {
            rb.push(vals[2]);
        }
    }
    if p.x.is_empty() {
        return Err(perr(1, "no data rows".into()));
    }
    if p.x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(perr(1, "x column is not increasing".into()));
    }
    Ok(p)
}

/// Sidecar path: `<output>.meta`.
pub fn meta_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn metadata(cfg: &RunConfig, stats: &RunStats) -> Vec<(String, String)> {
    let mut m = vec![
        ("scheme".to_string(), cfg.scheme.name().to_string()),
        ("case".into(), cfg.case.name().into()),
        ("n_cells".into(), cfg.n_cells.to_string()),
        ("n_half".into(), cfg.n_half.to_string()),
        ("t_end".into(), format!("{:e}", cfg.t_end)),
        ("dt".into(), format!("{:.16e}", stats.dt)),
        ("steps".into(), stats.steps.to_string()),
    ];
    if let Some(e) = cfg.eps {
        m.push(("eps".into(), format!("{e:e}")));
    }
    match cfg.scheme {
        Scheme::Bap | Scheme::Classical => m.push(("cfl_sigma".into(), cfg.cfl_sigma.to_string())),
        Scheme::Explicit => m.push(("safety".into(), cfg.explicit_safety.to_string())),
        Scheme::Diffusion => {
            let (a, b) = cfg.dirichlet.unwrap_or_default();
            m.push(("dirichlet".into(), format!("{a}, {b}")));
            m.push(("kappa_abs".into(), format!("{:.16e}", 1.0 / 3.0)));
        }
    }
    if let Some(r) = stats.max_constraint_residual {
        m.push(("max_constraint_residual".into(), format!("{r:e}")));
    }
    if cfg.scheme == Scheme::Classical {
        m.push(("closure".into(), classical::CLOSURE.into()));
    }
    m
}

pub fn write_meta(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut s = String::new();
    for (k, v) in entries {
        writeln!(s, "{k} = {v}").unwrap();
    }
    fs::write(path, s).map_err(io_err(path))
}

pub fn read_meta(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.trim().to_string(), v.trim().to_string())))
        .collect())
}

/// Files written by [`run_command`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub csv_path: PathBuf,
    pub meta_path: PathBuf,
    pub stats: RunStats,
    pub profile: Profile,
}

/// Runs and writes the CSV plus its sidecar.
pub fn run_command(cfg: &RunConfig) -> Result<RunSummary> {
    let (profile, stats) = simulate(cfg)?;
    write_profile(&cfg.output_path, &profile)?;
    let meta = meta_path(&cfg.output_path);
    write_meta(&meta, &metadata(cfg, &stats))?;
    Ok(RunSummary {
        csv_path: cfg.output_path.clone(),
        meta_path: meta,
        stats,
        profile,
    })
}

/// Difference of two profiles on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub l1_error: f64,
    pub linf_error: f64,
    /// Location of the largest difference.
    pub linf_x: f64,
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub meta_a: Vec<(String, String)>,
    pub meta_b: Vec<(String, String)>,
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    let j = x.partition_point(|&v| v < at);
    if j < x.len() && x[j] == at {
        return y[j];
    }
    let j = j.clamp(1, x.len() - 1);
    let t = (at - x[j - 1]) / (x[j] - x[j - 1]);
    y[j - 1] + t * (y[j] - y[j - 1])
}

/// Interpolates the coarser profile linearly onto the points of the finer
/// one inside `window` and both ranges; L1 uses the trapezoidal rule.
pub fn compare(a: &Profile, b: &Profile, window: (f64, f64)) -> Result<ComparisonReport> {
    let (fine, coarse) = if a.x.len() >= b.x.len() { (a, b) } else { (b, a) };
    let lo = window.0.max(coarse.x[0]).max(fine.x[0]);
    let hi = window.1.min(coarse.x[coarse.x.len() - 1]).min(fine.x[fine.x.len() - 1]);
    let tol = 1e-12;
    let pts: Vec<usize> = (0..fine.x.len())
        .filter(|&i| fine.x[i] >= lo - tol && fine.x[i] <= hi + tol)
        .collect();
    if pts.is_empty() || coarse.x.len() < 2 && pts.len() > 1 {
        return Err(invalid("profiles have no common points in the window"));
    }
    let diff: Vec<(f64, f64)> = pts
        .iter()
        .map(|&i| {
            let c = if coarse.x.len() == 1 { coarse.rho[0] } else { interpolate(&coarse.x, &coarse.rho, fine.x[i]) };
            (fine.x[i], (fine.rho[i] - c).abs())
        })
        .collect();
    let (linf_x, linf) = diff.iter().fold((diff[0].0, 0.0), |acc, &(x, d)| if d > acc.1 { (x, d) } else { acc });
    let l1 = diff.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum();
    Ok(ComparisonReport {
        l1_error: l1,
        linf_error: linf,
        linf_x,
        n_points: diff.len(),
        x_min: diff[0].0,
        x_max: diff[diff.len() - 1].0,
        meta_a: Vec::new(),
        meta_b: Vec::new(),
    })
}

/// [`compare`] on two CSV files; sidecars are attached when present.
pub fn compare_files(a: &Path, b: &Path, window: (f64, f64)) -> Result<ComparisonReport> {
    let pa = read_profile(a)?;
    let pb = read_profile(b)?;
    let mut r = compare(&pa, &pb, window)?;
    r.meta_a = read_meta(&meta_path(a)).unwrap_or_default();
    r.meta_b = read_meta(&meta_path(b)).unwrap_or_default();
    Ok(r)
}

/// Comparison window of the diffusion regime.
pub const INTERIOR_WINDOW: (f64, f64) = (0.05, 0.95);
/// Below this ε the reference is the diffusion limit.
pub const EXPLICIT_REFERENCE_MIN_EPS: f64 = 0.05;
/// Mesh of the explicit reference.
pub const REFERENCE_CELLS: usize = 1000;

/// Wall values of the diffusion limit for the built-in cases.
pub fn limit_dirichlet(case: Case, table: &HTable) -> Result<(f64, f64)> {
    Ok(match case {
        Case::Linear => (milne_boundary_value(table, |mu| mu)?, 0.0),
        Case::Constant => (1.0, 1.0),
        Case::Zero => (0.0, 0.0),
    })
}

/// How a sweep member was checked.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Explicit { n_cells: usize },
    Diffusion { n_cells: usize, dirichlet: (f64, f64) },
}

impl Reference {
    pub fn describe(&self) -> String {
        match self {
            Reference::Explicit { n_cells } => format!("explicit Nx={n_cells}"),
            Reference::Diffusion { n_cells, dirichlet } => {
                format!("diffusion Nx={n_cells} dirichlet=({:.7}, {})", dirichlet.0, dirichlet.1)
            }
        }
    }
}

/// One line of the sweep summary.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub eps: f64,
    pub csv_path: PathBuf,
    pub outcome: std::result::Result<SweepOutcome, String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub steps: usize,
    pub wall_seconds: f64,
    pub reference: String,
    pub report: ComparisonReport,
}

/// Output file name for member `eps` of a sweep.
pub fn sweep_file(dir: &Path, scheme: Scheme, eps: f64) -> PathBuf {
    dir.join(format!("{}_eps{:e}.csv", scheme.name(), eps))
}

/// Runs `base` for every ε concurrently, writing one CSV per run (and its
/// reference) into `dir`, and `summary.csv` with the errors.
///
/// Members with `ε >= 0.05` are checked against the explicit scheme on
/// [`REFERENCE_CELLS`] cells over the whole slab; smaller ε against the
/// diffusion limit with Milne wall values on [`INTERIOR_WINDOW`].
pub fn sweep(base: &RunConfig, eps_list: &[f64], dir: &Path) -> Result<Vec<SweepRow>> {
    if !base.scheme.is_kinetic() {
        return Err(invalid("sweeps need a kinetic scheme"));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let diffusion = if eps_list.iter().any(|&e| e < EXPLICIT_REFERENCE_MIN_EPS) {
        let table = solve_h(64, 1e-10, 1000)?;
        let dirichlet = limit_dirichlet(base.case, &table)?;
        let mut r = RunConfig::new(Scheme::Diffusion, None, base.t_end);
        r.case = base.case;
        r.n_cells = REFERENCE_CELLS;
        r.dirichlet = Some(dirichlet);
        r.diffusion_dt = 1e-5;
        r.output_path = dir.join("reference_diffusion.csv");
        let profile = run_command(&r)?.profile;
        let reference = Reference::Diffusion {
            n_cells: REFERENCE_CELLS,
            dirichlet,
        };
        Some((profile, reference))
    } else {
        None
    };
    let rows: Vec<SweepRow> = eps_list
        .par_iter()
        .map(|&eps| {
            let mut cfg = base.clone();
            cfg.eps = Some(eps);
            cfg.output_path = sweep_file(dir, base.scheme, eps);
            let outcome = sweep_member(&cfg, eps, diffusion.as_ref(), dir).map_err(|e| e.to_string());
            SweepRow {
                eps,
                csv_path: cfg.output_path,
                outcome,
            }
        })
        .collect();
    let mut s = String::from("eps,steps,wall_seconds,reference,l1_error,linf_error,status\n");
    for r in &rows {
        match &r.outcome {
            Ok(o) => writeln!(
                s,
                "{:e},{},{:.3},{},{:.6e},{:.6e},ok",
                r.eps, o.steps, o.wall_seconds, o.reference, o.report.l1_error, o.report.linf_error
            )
            .unwrap(),
            Err(e) => writeln!(s, "{:e},,,,,,failed: {}", r.eps, e.replace(',', ";")).unwrap(),
        }
    }
    let summary = dir.join("summary.csv");
    fs::write(&summary, s).map_err(io_err(&summary))?;
    Ok(rows)
}

fn sweep_member(
    cfg: &RunConfig,
    eps: f64,
    diffusion: Option<&(Profile, Reference)>,
    dir: &Path,
) -> Result<SweepOutcome> {
    let start = Instant::now();
    let run = run_command(cfg)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    let (ref_profile, reference, window) = match diffusion {
        Some((p, r)) if eps < EXPLICIT_REFERENCE_MIN_EPS => (p.clone(), r.clone(), INTERIOR_WINDOW),
        _ => {
            let mut r = cfg.clone();
            r.scheme = Scheme::Explicit;
            r.n_cells = REFERENCE_CELLS;
            r.output_path = dir.join(format!("reference_explicit_eps{eps:e}.csv"));
            let p = run_command(&r)?.profile;
            (p, Reference::Explicit { n_cells: REFERENCE_CELLS }, (0.0, 1.0))
        }
    };
    let report = compare(&run.profile, &ref_profile, window)?;
    Ok(SweepOutcome {
        steps: run.stats.steps,
        wall_seconds,
        reference: reference.describe(),
        report,
    })
}

/// Incoming data for [`chandrasekhar_command`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incoming {
    /// `f_b(μ) = μ`.
    Linear,
    /// `f_b(μ) = 1`.
    Constant,
}

/// Solves for `H`, optionally dumps `(μ, H)` pairs, returns the wall value.
pub fn chandrasekhar_command(
    n_nodes: usize,
    tol: f64,
    incoming: Incoming,
    table_path: Option<&Path>,
) -> Result<(f64, HTable)> {
    let table = solve_h(n_nodes, tol, 100_000)?;
    let value = match incoming {
        Incoming::Linear => milne_boundary_value(&table, |m| m)?,
        Incoming::Constant => milne_boundary_value(&table, |_| 1.0)?,
    };
    if let Some(p) = table_path {
        let mut s = String::from("mu,h\n");
        for (m, h) in table.mu_nodes().iter().zip(table.h_values()) {
            writeln!(s, "{m:.16e},{h:.16e}").unwrap();
        }
        fs::write(p, s).map_err(io_err(p))?;
    }
    Ok((value, table))
}

/// ε values of the benchmark set.
pub const FIG1_EPS: [f64; 5] = [1.0, 0.5, 0.2, 0.05, 1e-4];

/// BAP runs of the benchmark set with their references.
pub fn fig1(dir: &Path) -> Result<Vec<SweepRow>> {
    let base = RunConfig::new(Scheme::Bap, Some(1.0), 0.4);
    sweep(&base, &FIG1_EPS, dir)
}
