//! Command-line driver: configuration, run orchestration and output files.

// NaN must fail range checks, so `!(x > 0.0)` is intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod csv;
pub mod error;
pub mod radial;
pub mod simulate;
pub mod verify;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use torus_ns_core::radial::{SelfSimProblem, ShootOptions, ShootOutcome};

pub use config::{parse_config, parse_config_str, RunConfig};
pub use error::{CliError, Status};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "TORUS_NS_OUT";
pub const DEFAULT_OUT_ROOT: &str = "torus-ns-out";
pub const DEFAULT_VERIFY_SEED: u64 = 20;

#[derive(Debug, Parser)]
#[command(name = "torus-ns", version, about = "Periodic Navier-Stokes-type solver and verification harness")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; defaults to $TORUS_NS_OUT/<command>.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for random initial data or the verification fields.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, value_name = "INT")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SelfSimArgs {
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub multiplier: u8,
    #[arg(long, default_value_t = 10.0)]
    pub ymax: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the torus solver from a configuration file.
    Simulate,
    /// Continue a run from one of its snapshots.
    Resume {
        #[arg(long, value_name = "PATH")]
        snapshot: PathBuf,
    },
    /// Integrate the self-similar profile ODE.
    Selfsim {
        #[command(flatten)]
        problem: SelfSimArgs,
        #[arg(long, conflicts_with = "kappa_bracket", required_unless_present = "kappa_bracket")]
        kappa: Option<f64>,
        /// Shoot for kappa inside `LO,HI` first.
        #[arg(long, value_parser = parse_bracket, value_name = "LO,HI")]
        kappa_bracket: Option<(f64, f64)>,
        /// Also tabulate the radial consistency residual under refinement.
        #[arg(long)]
        refine: bool,
    },
    /// Shoot in kappa for the far-field condition y^2 w -> 1.
    Shoot {
        #[command(flatten)]
        problem: SelfSimArgs,
        #[arg(long, value_parser = parse_bracket, value_name = "LO,HI")]
        kappa_bracket: (f64, f64),
        #[arg(long, default_value_t = 33)]
        scan_points: usize,
    },
    /// Run the built-in identity suites.
    Verify {
        /// Suites to run; all when omitted.
        #[arg(long = "suite", value_enum)]
        suites: Vec<verify::Suite>,
    },
    /// Bochner and Sobolev norms of a stored run.
    Norms {
        /// Run directory written by `simulate`.
        #[arg(long, value_name = "DIR")]
        run: PathBuf,
        #[arg(long, default_value_t = 1)]
        order: u32,
    },
}

fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

impl Command {
    fn label(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Resume { .. } => "resume",
            Command::Selfsim { .. } => "selfsim",
            Command::Shoot { .. } => "shoot",
            Command::Verify { .. } => "verify",
            Command::Norms { .. } => "norms",
        }
    }
}

/// `--out`, else the config's `[output] dir`, else `$TORUS_NS_OUT/<label>`.
pub fn output_dir(flag: Option<&Path>, from_config: Option<&Path>, label: &str) -> PathBuf {
    if let Some(p) = flag.or(from_config) {
        return p.to_path_buf();
    }
    let root = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT), PathBuf::from);
    root.join(label)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))
}

fn load_config(common: &Common) -> Result<RunConfig, CliError> {
    let path = common
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config(vec!["--config is required for this command".into()]))?;
    let cfg = parse_config(path)?;
    Ok(match common.seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    })
}

fn problem(a: &SelfSimArgs, kappa: f64) -> SelfSimProblem {
    SelfSimProblem { n: a.n, kappa, gamma: a.gamma, multiplier: a.multiplier, y_max: a.ymax }
}

fn report_run(r: &simulate::RunReport) {
    let s = &r.summary;
    match &s.blow_up {
        Some(b) => println!(
            "blow-up at t = {:e} (step {}); last finite state t = {} written to {}",
            b.time,
            b.step_index,
            s.final_state.t,
            r.dir.join("final.tfld").display()
        ),
        None => println!("completed {} steps to t = {}; output in {}", s.steps_taken, s.final_state.t, r.dir.display()),
    }
    println!("peak L2 = {:e}, peak H1 = {:e}", s.peak_l2, s.peak_h1);
    if let Some(e) = r.taylor_green_error {
        println!("taylor-green sup error at t = {}: {e:e}", s.final_state.t);
    }
}

pub fn run(cli: Cli) -> Result<Status, CliError> {
    let common = &cli.common;
    if let Some(t) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    let label = cli.command.label();
    match &cli.command {
        Command::Simulate => {
            let cfg = load_config(common)?;
            let dir = output_dir(common.out.as_deref(), cfg.output.dir.as_deref(), label);
            let r = simulate::simulate(&cfg, &dir)?;
            report_run(&r);
            Ok(r.status)
        }
        Command::Resume { snapshot } => {
            let cfg = load_config(common)?;
            let dir = output_dir(common.out.as_deref(), None, label);
            let r = simulate::resume(&cfg, snapshot, &dir)?;
            report_run(&r);
            Ok(r.status)
        }
        Command::Selfsim { problem: args, kappa, kappa_bracket, refine } => {
            let dir = output_dir(common.out.as_deref(), None, label);
            ensure_dir(&dir)?;
            let kappa = match (kappa, kappa_bracket) {
                (Some(k), _) => *k,
                (None, Some(b)) => {
                    let outcome = radial::shoot(args.n, args.gamma, args.multiplier, *b, &shoot_opts(args, 33), &dir)?;
                    println!("{}", radial::describe(&outcome));
                    match outcome {
                        ShootOutcome::Root { kappa, .. } => kappa,
                        _ => return Ok(Status::Ok),
                    }
                }
                (None, None) => unreachable!("clap requires one of --kappa, --kappa-bracket"),
            };
            let p = problem(args, kappa);
            let r = radial::selfsim(&p, *refine, &dir)?;
            let prof = &r.profile;
            match prof.blow_up {
                Some(y) => println!("profile blows up at y = {y:e}"),
                None => println!(
                    "y^2 w(y_max) - 1 = {:e}, y w'/w = {:.4}, sup|w| = {:e}",
                    prof.farfield_mismatch(),
                    prof.log_derivative(),
                    prof.sup_abs(args.ymax)
                ),
            }
            if let Some(table) = &r.refinement {
                for (h, rep) in table {
                    println!("h = {h}: scaled residual {:e}", rep.scaled);
                }
                let orders = radial::observed_orders(table);
                println!("observed orders: {orders:?}");
            }
            Ok(Status::Ok)
        }
        Command::Shoot { problem: args, kappa_bracket, scan_points } => {
            let dir = output_dir(common.out.as_deref(), None, label);
            ensure_dir(&dir)?;
            let outcome =
                radial::shoot(args.n, args.gamma, args.multiplier, *kappa_bracket, &shoot_opts(args, *scan_points), &dir)?;
            println!("{}", radial::describe(&outcome));
            Ok(Status::Ok)
        }
        Command::Verify { suites } => {
            let seed = common.seed.unwrap_or(DEFAULT_VERIFY_SEED);
            let chosen: Vec<verify::Suite> = if suites.is_empty() { verify::Suite::ALL.to_vec() } else { suites.clone() };
            let mut lines = Vec::new();
            let mut all_ok = true;
            for s in chosen {
                for c in verify::run_suite(s, seed)? {
                    let tag = if c.passed() { "PASS" } else { "FAIL" };
                    all_ok &= c.passed();
                    lines.push(format!("{tag} [{}] {}: {:.3e} (tol {:.1e})", s.name(), c.name, c.value, c.tol));
                }
            }
            for l in &lines {
                println!("{l}");
            }
            if let Some(dir) = common.out.as_deref() {
                ensure_dir(dir)?;
                let path = dir.join("verify.txt");
                std::fs::write(&path, lines.join("\n") + "\n").map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
            }
            Ok(if all_ok { Status::Ok } else { Status::Failed })
        }
        Command::Norms { run, order } => {
            let r = simulate::norms(run, *order)?;
            for ((i, b), (_, d)) in r.bochner.iter().zip(&r.data) {
                println!("order {i}: |u|_(i,mu,T) = {b:e}, |(f,u0)|_(k,mu,T) = {d:e}");
            }
            Ok(Status::Ok)
        }
    }
}

fn shoot_opts(args: &SelfSimArgs, scan_points: usize) -> ShootOptions {
    ShootOptions { y_max: args.ymax, scan_points, ..ShootOptions::default() }
}
