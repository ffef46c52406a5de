use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use bap_core::harness::{self, Incoming, SweepRow};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bap", version, about = "Micro/macro kinetic solvers with exact inflow boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its CSV and .meta sidecar.
    Run {
        /// key = value configuration file
        config: PathBuf,
        /// Override the output path from the config.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare two density CSV files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        xmin: f64,
        #[arg(long, default_value_t = 1.0)]
        xmax: f64,
    },
    /// Run a configuration for several values of eps.
    Sweep {
        config: PathBuf,
        /// Comma-separated eps values.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value = "sweep")]
        out_dir: PathBuf,
    },
    /// Solve for the H-function and print the Milne wall value.
    Chandrasekhar {
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = IncomingArg::Linear)]
        incoming: IncomingArg,
        /// Write (mu, H) pairs here.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Benchmark data set: five eps values with their references.
    Fig1 {
        #[arg(long, default_value = "fig1")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum IncomingArg {
    Linear,
    Constant,
}

fn print_rows(rows: &[SweepRow]) -> bool {
    println!("{:>10} {:>7} {:>9} {:>12} {:>12}  reference", "eps", "steps", "wall_s", "l1", "linf");
    let mut ok = true;
    for r in rows {
        match &r.outcome {
            Ok(o) => println!(
                "{:>10.1e} {:>7} {:>9.3} {:>12.4e} {:>12.4e}  {}",
                r.eps, o.steps, o.wall_seconds, o.report.l1_error, o.report.linf_error, o.reference
            ),
            Err(e) => {
                ok = false;
                println!("{:>10.1e} failed: {e}", r.eps);
            }
        }
    }
    ok
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = harness::parse_config(&text).with_context(|| format!("in {}", config.display()))?;
            if let Some(o) = output {
                cfg.output_path = o;
            }
            let start = Instant::now();
            let s = harness::run_command(&cfg)?;
            println!(
                "wrote {} ({} steps, dt = {:e}, {:.3} s)",
                s.csv_path.display(),
                s.stats.steps,
                s.stats.dt,
                start.elapsed().as_secs_f64()
            );
            if let Some(r) = s.stats.max_constraint_residual {
                println!("max constraint residual {r:e}");
            }
        }
        Command::Compare { a, b, xmin, xmax } => {
            let r = harness::compare_files(&a, &b, (xmin, xmax))?;
            println!("points {} on [{}, {}]", r.n_points, r.x_min, r.x_max);
            println!("l1   {:.6e}", r.l1_error);
            println!("linf {:.6e} at x = {}", r.linf_error, r.linf_x);
        }
        Command::Sweep { config, eps, out_dir } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut text_cfg = text.clone();
            if !text.lines().any(|l| l.split('#').next().unwrap_or("").trim_start().starts_with("eps")) {
                text_cfg.push_str("\neps = 1\n");
            }
            let cfg = harness::parse_config(&text_cfg).with_context(|| format!("in {}", config.display()))?;
            let rows = harness::sweep(&cfg, &eps, &out_dir)?;
            if !print_rows(&rows) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Chandrasekhar { nodes, tol, incoming, table } => {
            let start = Instant::now();
            let inc = match incoming {
                IncomingArg::Linear => Incoming::Linear,
                IncomingArg::Constant => Incoming::Constant,
            };
            let (value, t) = harness::chandrasekhar_command(nodes, tol, inc, table.as_deref())?;
            println!("{value:.10}");
            eprintln!(
                "nodes {nodes}, iterations {}, residual {:.3e}, alpha0 {:.12}, alpha1 {:.12}, {:.3} s",
                t.iterations(),
                t.residual(),
                t.moment(0),
                t.moment(1),
                start.elapsed().as_secs_f64()
            );
        }
        Command::Fig1 { out_dir } => {
            let rows = harness::fig1(&out_dir)?;
            if !print_rows(&rows) {
                return Ok(ExitCode::FAILURE);
            }
            println!("data in {}", out_dir.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
