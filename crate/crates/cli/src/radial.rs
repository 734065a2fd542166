//! `selfsim` and `shoot`.

use std::path::Path;

use torus_ns_core::radial::{
    selfsim_consistency_residual, selfsim_ode_integrate, shoot_farfield, ConsistencyReport, OdeOptions, ResidualBox,
    SelfSimProblem, SelfSimProfile, ShootOptions, ShootOutcome,
};

use crate::csv::{fmt, CsvWriter};
use crate::error::CliError;

/// Sample box used for refinement tables: blow-up time 1, `t ∈ [0, ½]`,
/// `r ∈ [¼, 2]`.
pub const REFINE_BOX: ResidualBox =
    ResidualBox { r_range: (0.25, 2.0), t_range: (0.0, 0.5), r_samples: 16, t_samples: 6 };
pub const REFINE_STEPS: [f64; 3] = [0.04, 0.02, 0.01];

pub fn write_profile(path: &Path, p: &SelfSimProfile) -> Result<(), CliError> {
    let q = &p.problem;
    let meta = [
        ("problem", format!("n={} kappa={} gamma={} m={} y_max={}", q.n, q.kappa, q.gamma, q.multiplier, q.y_max)),
        ("blow_up", p.blow_up.map_or("none".into(), fmt)),
    ];
    let mut w = CsvWriter::create(path, "torus-ns selfsim profile", &meta, &["y".into(), "w".into(), "w_prime".into()])?;
    for i in 0..p.y.len() {
        w.row_f64(&[p.y[i], p.w[i], p.wp[i]])?;
    }
    w.finish()
}

/// Consistency residual for each finite-difference step in `steps`.
pub fn refinement(profile: &SelfSimProfile, steps: &[f64]) -> Result<Vec<(f64, ConsistencyReport)>, CliError> {
    steps
        .iter()
        .map(|&h| Ok((h, selfsim_consistency_residual(profile, 1.0, &REFINE_BOX, h)?)))
        .collect()
}

/// Observed orders `log₂(e_i / e_{i+1})` between consecutive halvings.
pub fn observed_orders(table: &[(f64, ConsistencyReport)]) -> Vec<f64> {
    table
        .windows(2)
        .map(|w| (w[0].1.scaled / w[1].1.scaled).ln() / (w[0].0 / w[1].0).ln())
        .collect()
}

pub fn write_refinement(path: &Path, table: &[(f64, ConsistencyReport)]) -> Result<(), CliError> {
    let mut w = CsvWriter::create(
        path,
        "torus-ns consistency refinement",
        &[("box", format!("{REFINE_BOX:?}"))],
        &["h".into(), "scaled_residual".into(), "raw_residual".into()],
    )?;
    for (h, r) in table {
        w.row_f64(&[*h, r.scaled, r.raw])?;
    }
    w.finish()
}

pub fn write_scan(path: &Path, outcome: &ShootOutcome) -> Result<(), CliError> {
    let scan = match outcome {
        ShootOutcome::Root { scan, .. } | ShootOutcome::NoRoot { scan } | ShootOutcome::Ambiguous { scan, .. } => scan,
    };
    let mut w = CsvWriter::create(
        path,
        "torus-ns shooting scan",
        &[],
        &["kappa".into(), "mismatch".into(), "blow_up_y".into()],
    )?;
    for s in scan {
        w.row(&[fmt(s.kappa), fmt(s.mismatch), s.blow_up.map_or_else(String::new, fmt)])?;
    }
    w.finish()
}

pub fn describe(outcome: &ShootOutcome) -> String {
    match outcome {
        ShootOutcome::Root { kappa, mismatch, log_derivative, .. } => format!(
            "root kappa = {kappa:.15} (mismatch {mismatch:.3e}, y w'/w at y_max = {log_derivative:.4})"
        ),
        ShootOutcome::NoRoot { scan } => format!(
            "no root: all {} profiles finite with one mismatch sign ({})",
            scan.len(),
            scan.first().map_or("empty".into(), |s| if s.mismatch > 0.0 { "+" } else { "-" }.to_string())
        ),
        ShootOutcome::Ambiguous { reason, .. } => format!("ambiguous: {reason}"),
    }
}

pub fn shoot(
    n: usize,
    gamma: f64,
    multiplier: u8,
    bracket: (f64, f64),
    opts: &ShootOptions,
    dir: &Path,
) -> Result<ShootOutcome, CliError> {
    let outcome = shoot_farfield(n, gamma, multiplier, bracket, opts)?;
    write_scan(&dir.join("shooting.csv"), &outcome)?;
    Ok(outcome)
}

pub struct SelfSimReport {
    pub profile: SelfSimProfile,
    pub refinement: Option<Vec<(f64, ConsistencyReport)>>,
}

pub fn selfsim(problem: &SelfSimProblem, refine: bool, dir: &Path) -> Result<SelfSimReport, CliError> {
    let profile = selfsim_ode_integrate(problem, &OdeOptions::default())?;
    write_profile(&dir.join("profile.csv"), &profile)?;
    let refinement = if refine {
        let table = refinement(&profile, &REFINE_STEPS)?;
        write_refinement(&dir.join("refinement.csv"), &table)?;
        Some(table)
    } else {
        None
    };
    Ok(SelfSimReport { profile, refinement })
}
