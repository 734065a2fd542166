//! `simulate`, `resume` and `norms`.
//!
//! A run directory holds:
//!
//! - `config.toml`: the effective configuration (echo-back)
//! - `diagnostics.csv`: one row per diagnostic sample
//! - `snapshots/step_<index>.tfld`: periodic snapshots
//! - `final.tfld`: the last state (the last finite one after a blow-up)
//! - `summary.txt`: `key = value` lines describing the outcome

use std::fs;
use std::path::{Path, PathBuf};

use torus_ns_core::diagnostics::{
    bochner_seminorm, data_seminorm, fill_energy_residuals, DiagnosticRecord,
};
use torus_ns_core::integrator::{Forcing, RunSummary};
use torus_ns_core::operators::{linf_norm, sobolev_norm};
use torus_ns_core::{snapshot, FourierField, Integrator, SimulationState, Trajectory};

use crate::config::{taylor_green, ForcingConfig, InitialConfig, RunConfig};
use crate::csv::{diagnostic_columns, diagnostic_row, fmt, CsvWriter};
use crate::error::{CliError, Status};

#[derive(Debug, Clone)]
pub struct RunReport {
    pub status: Status,
    pub dir: PathBuf,
    pub summary: RunSummary,
    /// Sup-norm distance to the closed-form vortex for Taylor–Green runs.
    pub taylor_green_error: Option<f64>,
}

pub fn snapshot_name(step: u64) -> String {
    format!("step_{step:08}.tfld")
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir.join("snapshots")).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

/// Config as it will be archived: the resolved output directory filled in.
fn effective(cfg: &RunConfig, dir: &Path) -> RunConfig {
    let mut eff = cfg.clone();
    eff.output.dir = Some(dir.to_path_buf());
    eff
}

fn taylor_green_applies(cfg: &RunConfig) -> Option<f64> {
    match (&cfg.initial, &cfg.forcing, &cfg.nonlinearity, cfg.sim.a) {
        (InitialConfig::TaylorGreen { amplitude }, ForcingConfig::Zero, torus_ns_core::NonlinearitySpec::Advection, 1) => {
            Some(*amplitude)
        }
        _ => None,
    }
}

struct Recorder<'a> {
    cfg: &'a RunConfig,
    integrator: &'a Integrator,
    forcing: &'a dyn Forcing,
    dir: &'a Path,
    records: Vec<DiagnosticRecord>,
}

impl Recorder<'_> {
    fn observe(&mut self, s: &SimulationState) -> torus_ns_core::Result<()> {
        let cfg = self.cfg;
        self.records.push(DiagnosticRecord::compute(
            &s.u,
            s.t,
            &cfg.diagnostics.sobolev,
            self.integrator.operator(),
            cfg.sim.mu,
            self.forcing,
        )?);
        if s.step_index.is_multiple_of(cfg.diagnostics.snapshot_every) {
            snapshot::save(&self.dir.join("snapshots").join(snapshot_name(s.step_index)), s.t, &s.u)?;
        }
        Ok(())
    }

    fn finish(mut self, summary: &RunSummary) -> Result<(), CliError> {
        fill_energy_residuals(&mut self.records);
        let g = self.integrator.grid();
        let meta = [
            ("grid", format!("n={} ell={} N={}", g.dim(), g.period(), g.points())),
            ("sim", format!("mu={} a={} dt={} T={} scheme={:?}", self.cfg.sim.mu, self.cfg.sim.a, self.cfg.sim.dt, self.cfg.sim.t_final, self.cfg.sim.scheme)),
        ];
        let mut w = CsvWriter::create(
            &self.dir.join("diagnostics.csv"),
            "torus-ns diagnostics",
            &meta,
            &diagnostic_columns(&self.cfg.diagnostics.sobolev),
        )?;
        for r in &self.records {
            w.row(&diagnostic_row(r))?;
        }
        w.finish()?;
        let fs = &summary.final_state;
        snapshot::save(&self.dir.join("final.tfld"), fs.t, &fs.u)?;
        Ok(())
    }
}

fn write_summary(dir: &Path, report: &RunReport) -> Result<(), CliError> {
    let s = &report.summary;
    let mut text = format!(
        "status = {}\nfinal_t = {}\nfinal_step = {}\nsteps_taken = {}\npeak_l2 = {}\npeak_h1 = {}\nmax_divergence = {}\nprojection_correction = {}\n",
        match report.status {
            Status::Ok => "ok",
            Status::BlowUp => "blow_up",
            Status::Failed => "failed",
        },
        fmt(s.final_state.t),
        s.final_state.step_index,
        s.steps_taken,
        fmt(s.peak_l2),
        fmt(s.peak_h1),
        fmt(s.max_divergence),
        fmt(s.projection_correction),
    );
    if let Some(b) = &s.blow_up {
        text += &format!("blow_up_t = {}\nblow_up_step = {}\n", fmt(b.time), b.step_index);
    }
    if let Some(e) = report.taylor_green_error {
        text += &format!("taylor_green_sup_error = {}\n", fmt(e));
    }
    write_text(&dir.join("summary.txt"), &text)
}

fn execute(cfg: &RunConfig, dir: &Path, start: Option<SimulationState>) -> Result<RunReport, CliError> {
    let grid = cfg.torus()?;
    let forcing = cfg.forcing_spec(&grid)?;
    let integrator = Integrator::new(grid, cfg.sim.clone(), cfg.nonlinearity.clone())?;
    create_dir(dir)?;
    write_text(&dir.join("config.toml"), &effective(cfg, dir).echo()?)?;

    let mut rec = Recorder { cfg, integrator: &integrator, forcing: &forcing, dir, records: Vec::new() };
    let mut sink = |s: &SimulationState| rec.observe(s);
    let summary = match start {
        None => integrator.run(&cfg.initial_field(&grid)?, &forcing, &mut sink)?,
        Some(state) => integrator.run_from(state, &forcing, &mut sink)?,
    };
    rec.finish(&summary)?;

    let taylor_green_error = match taylor_green_applies(cfg) {
        Some(amp) if summary.blow_up.is_none() => {
            let exact = taylor_green(&grid, amp, cfg.sim.mu, summary.final_state.t)?;
            Some(linf_norm(&(&summary.final_state.u - &exact)))
        }
        _ => None,
    };
    let status = if summary.blow_up.is_some() { Status::BlowUp } else { Status::Ok };
    let report = RunReport { status, dir: dir.to_path_buf(), summary, taylor_green_error };
    write_summary(dir, &report)?;
    Ok(report)
}

pub fn simulate(cfg: &RunConfig, dir: &Path) -> Result<RunReport, CliError> {
    execute(cfg, dir, None)
}

/// Continue a run from one of its snapshots. The snapshot time must be a
/// step time of `cfg`.
pub fn resume(cfg: &RunConfig, snapshot_path: &Path, dir: &Path) -> Result<RunReport, CliError> {
    let snap = snapshot::load(snapshot_path)?;
    let grid = cfg.torus()?;
    grid.check_same(snap.field.grid())?;
    snap.field.ensure_components(grid.dim(), "resumed state")?;
    let step = (snap.t / cfg.sim.dt).round();
    if !(step >= 0.0) || cfg.sim.time_of(step as u64).to_bits() != snap.t.to_bits() {
        return Err(CliError::Config(vec![format!(
            "snapshot time {} is not a step time for dt = {}",
            snap.t, cfg.sim.dt
        )]));
    }
    let state = SimulationState { t: snap.t, step_index: step as u64, u: snap.field, p: None };
    execute(cfg, dir, Some(state))
}

/// All snapshots of a run directory in time order.
pub fn load_snapshots(dir: &Path) -> Result<Trajectory, CliError> {
    let sdir = dir.join("snapshots");
    let mut paths: Vec<PathBuf> = fs::read_dir(&sdir)
        .map_err(|e| CliError::io(format!("listing {}", sdir.display()), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tfld"))
        .collect();
    paths.sort();
    let mut samples: Vec<(f64, FourierField)> = Vec::with_capacity(paths.len());
    for p in paths {
        let s = snapshot::load(&p)?;
        samples.push((s.t, s.field));
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Trajectory { samples })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormsReport {
    /// `(i, ‖u‖_{i,μ,T})`
    pub bochner: Vec<(u32, f64)>,
    /// `(k, ‖(f, u₀)‖_{k,μ,T})`
    pub data: Vec<(u32, f64)>,
    /// `(t, ‖u(t)‖_{H^s})` per configured order.
    pub sobolev: Vec<(f64, Vec<f64>)>,
}

/// Norms of a stored trajectory. The snapshots must span `[0, T]`.
pub fn norms(dir: &Path, max_order: u32) -> Result<NormsReport, CliError> {
    let cfg = crate::config::parse_config(&dir.join("config.toml"))?;
    let traj = load_snapshots(dir)?;
    let grid = cfg.torus()?;
    let forcing = cfg.forcing_spec(&grid)?;
    let (mu, t_final) = (cfg.sim.mu, cfg.sim.t_final);
    let mut f_traj = Trajectory::new();
    for (t, _) in &traj.samples {
        f_traj.push(*t, forcing.at(&grid, *t)?.unwrap_or_else(|| FourierField::zeros(grid, grid.dim())));
    }
    let u0 = &traj.samples.first().ok_or_else(|| CliError::Invariant("no snapshots".into()))?.1;
    let mut report = NormsReport { bochner: Vec::new(), data: Vec::new(), sobolev: Vec::new() };
    for i in 0..=max_order {
        report.bochner.push((i, bochner_seminorm(&traj, i, mu, t_final)?));
        report.data.push((i, data_seminorm(&f_traj, u0, i, mu, t_final)?));
    }
    for (t, u) in &traj.samples {
        report.sobolev.push((*t, cfg.diagnostics.sobolev.iter().map(|&s| sobolev_norm(u, s)).collect()));
    }

    let mut w = CsvWriter::create(
        &dir.join("norms.csv"),
        "torus-ns norms",
        &[("mu", mu.to_string()), ("T", t_final.to_string())],
        &["order".into(), "bochner".into(), "data".into()],
    )?;
    for ((i, b), (_, d)) in report.bochner.iter().zip(&report.data) {
        w.row(&[i.to_string(), fmt(*b), fmt(*d)])?;
    }
    w.finish()?;
    let mut cols = vec!["t".to_string()];
    cols.extend(cfg.diagnostics.sobolev.iter().map(|s| format!("hs_{s}")));
    let mut w = CsvWriter::create(&dir.join("sobolev.csv"), "torus-ns sobolev", &[], &cols)?;
    for (t, v) in &report.sobolev {
        let mut row = vec![*t];
        row.extend(v);
        w.row_f64(&row)?;
    }
    w.finish()?;
    Ok(report)
}
