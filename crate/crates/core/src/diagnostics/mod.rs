//! Norms, identity residuals and inequality bounds evaluated on computed
//! trajectories.

mod energy;
mod gagliardo;
mod gronwall;
mod norms;
mod quadrature;

pub use energy::{
    energy_balance_defect, energy_identity_residual, energy_terms, exp_energy, exp_energy_identity_residual,
    exp_energy_terms, EnergyTerms, ExpEnergy, ExpEnergyTerms,
};
pub use gagliardo::{gagliardo_nirenberg_probe, GnParams, GnReport};
pub use gronwall::{gron_large_bound, gron_large_feasible, gronwall_perov_bound, perov_condition_holds, BoundOutcome, GronwallInputs, SampledFn};
pub use norms::{bochner_seminorm, data_seminorm, dual_h1_norm};
pub use quadrature::{adaptive_simpson, time_derivative, trapezoid};

use crate::error::Result;
use crate::field::FourierField;
use crate::integrator::Forcing;
use crate::nonlinearity::NonlinearOperator;
use crate::operators::{derivative_norm, l2_norm, max_abs_divergence, sobolev_norm};

/// One row of per-sample diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub l2_norm: f64,
    pub h1_norm: f64,
    pub h_s_norms: Vec<f64>,
    pub grad_norm: f64,
    pub divergence_max: f64,
    /// Filled in once neighbouring samples are known.
    pub energy_residual: Option<f64>,
    pub exp_energy: ExpEnergy,
    pub trilinear: f64,
    /// Energy-identity ingredients kept for the residual post-pass.
    pub energy: EnergyTerms,
}

impl DiagnosticRecord {
    pub fn compute(
        u: &FourierField,
        t: f64,
        sobolev_orders: &[f64],
        op: &NonlinearOperator,
        mu: f64,
        f: &dyn Forcing,
    ) -> Result<Self> {
        let energy = energy_terms(u, t, f, op, mu)?;
        Ok(Self {
            t,
            l2_norm: l2_norm(u),
            h1_norm: sobolev_norm(u, 1.0),
            h_s_norms: sobolev_orders.iter().map(|&s| sobolev_norm(u, s)).collect(),
            grad_norm: derivative_norm(u, 1),
            divergence_max: max_abs_divergence(u)?,
            energy_residual: None,
            exp_energy: exp_energy(u),
            trilinear: crate::operators::l2_inner(&op.d(u)?, u),
            energy,
        })
    }
}

/// Fill `energy_residual` from the stored energy terms (needs ≥ 3 rows).
pub fn fill_energy_residuals(records: &mut [DiagnosticRecord]) {
    if records.len() < 3 {
        return;
    }
    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let half: Vec<f64> = records.iter().map(|r| r.energy.half_energy).collect();
    if let Ok(d) = time_derivative(&times, &half) {
        for (r, de) in records.iter_mut().zip(d) {
            r.energy_residual = Some(de + r.energy.dissipation - r.energy.work);
        }
    }
}
