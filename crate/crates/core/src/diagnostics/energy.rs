//! Energy identities: the `L²` balance and the exponential energy
//! `∫ e^{1+|u|²}`.

use crate::error::{Error, Result};
use crate::field::{inverse_transform, FourierField, PhysicalField};
use crate::integrator::{Forcing, Trajectory};
use crate::nonlinearity::NonlinearOperator;
use crate::operators::{derivative_norm, jacobian, l2_inner, l2_norm, leray_project};

use super::quadrature::{time_derivative, trapezoid};

/// Above this value of `max|u|²` the linear-domain exponential energy is not formed.
pub const EXP_OVERFLOW_LIMIT: f64 = 700.0;

/// Ingredients of `½ d/dt‖u‖² + μ‖∇u‖² = (f − Du, u)` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    pub t: f64,
    pub half_energy: f64,
    pub dissipation: f64,
    pub work: f64,
}

fn forcing_minus_d(u: &FourierField, t: f64, f: &dyn Forcing, op: &NonlinearOperator) -> Result<FourierField> {
    let mut r = -&op.d(u)?;
    if let Some(force) = f.at(u.grid(), t)? {
        r += &force;
    }
    Ok(r)
}

pub fn energy_terms(u: &FourierField, t: f64, f: &dyn Forcing, op: &NonlinearOperator, mu: f64) -> Result<EnergyTerms> {
    let rhs = forcing_minus_d(u, t, f, op)?;
    Ok(EnergyTerms {
        t,
        half_energy: 0.5 * l2_norm(u).powi(2),
        dissipation: mu * derivative_norm(u, 1).powi(2),
        work: l2_inner(&rhs, u),
    })
}

/// `r(t) = ½ d/dt‖u‖² + μ‖∇u‖² − (f − Du, u)` at every sample.
pub fn energy_identity_residual(
    traj: &Trajectory,
    f: &dyn Forcing,
    op: &NonlinearOperator,
    mu: f64,
) -> Result<Vec<(f64, f64)>> {
    if traj.len() < 3 {
        return Err(Error::Trajectory(format!("energy residual needs at least 3 samples, got {}", traj.len())));
    }
    let terms = traj
        .samples
        .iter()
        .map(|(t, u)| energy_terms(u, *t, f, op, mu))
        .collect::<Result<Vec<_>>>()?;
    let times = traj.times();
    let half: Vec<f64> = terms.iter().map(|e| e.half_energy).collect();
    let d = time_derivative(&times, &half)?;
    Ok(terms.iter().zip(d).map(|(e, de)| (e.t, de + e.dissipation - e.work)).collect())
}

/// Relative defect of the integrated unforced balance
/// `‖u(T)‖² + 2μ∫‖∇u‖² = ‖u₀‖²`.
pub fn energy_balance_defect(traj: &Trajectory, mu: f64) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::Trajectory("energy balance needs at least 2 samples".into()));
    }
    let e0 = l2_norm(&traj.samples[0].1).powi(2);
    if e0 == 0.0 {
        return Err(Error::InvalidArgument("energy balance of zero initial data".into()));
    }
    let e_end = l2_norm(&traj.samples[traj.len() - 1].1).powi(2);
    let grad: Vec<f64> = traj.samples.iter().map(|(_, u)| derivative_norm(u, 1).powi(2)).collect();
    Ok((e_end + 2.0 * mu * trapezoid(&traj.times(), &grad) - e0).abs() / e0)
}

/// `‖e^{1+|u|²}‖_{L¹}` with a log-domain companion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpEnergy {
    /// `None` when `max|u|²` exceeds [`EXP_OVERFLOW_LIMIT`].
    pub value: Option<f64>,
    pub log_value: f64,
    pub overflow: bool,
}

fn exp_energy_from_sq(grid: &crate::grid::TorusGrid, sq: &[f64]) -> ExpEnergy {
    let peak = sq.iter().copied().fold(0.0, f64::max);
    let shifted: f64 = sq.iter().map(|s| (s - peak).exp()).sum::<f64>() * grid.cell_volume();
    let log_value = 1.0 + peak + shifted.ln();
    if peak > EXP_OVERFLOW_LIMIT {
        ExpEnergy { value: None, log_value, overflow: true }
    } else {
        let value = PhysicalField::integrate(grid, sq.iter().map(|s| (1.0 + s).exp()));
        ExpEnergy { value: Some(value), log_value, overflow: false }
    }
}

pub fn exp_energy(u: &FourierField) -> ExpEnergy {
    let p = inverse_transform(u);
    exp_energy_from_sq(u.grid(), &p.magnitude_sq())
}

/// Terms of the exponential-energy identity at one time:
/// `d/dt E + dissipation + gradient − work = 0` with `E = ∫ e^{1+|u|²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpEnergyTerms {
    pub t: f64,
    pub energy: ExpEnergy,
    /// `2μ ‖ |∇u| e^{(1+|u|²)/2} ‖²`
    pub dissipation: f64,
    /// `4μ ‖ ∇ e^{(1+|u|²)/2} ‖²`
    pub gradient: f64,
    /// `2 (P_a(f − Du), u e^{1+|u|²})`
    pub work: f64,
}

pub fn exp_energy_terms(
    u: &FourierField,
    t: f64,
    f: &dyn Forcing,
    op: &NonlinearOperator,
    mu: f64,
    projected: bool,
) -> Result<ExpEnergyTerms> {
    let grid = *u.grid();
    let n = grid.dim();
    let up = inverse_transform(u);
    let sq = up.magnitude_sq();
    let energy = exp_energy_from_sq(&grid, &sq);
    if energy.overflow {
        return Ok(ExpEnergyTerms { t, energy, dissipation: 0.0, gradient: 0.0, work: 0.0 });
    }
    let jac = inverse_transform(&jacobian(u)?);
    let mut rhs = forcing_minus_d(u, t, f, op)?;
    if projected {
        rhs = leray_project(&rhs)?;
    }
    let rp = inverse_transform(&rhs);
    let (mut diss, mut grad, mut work) = (0.0, 0.0, 0.0);
    for x in 0..grid.len() {
        let w = (1.0 + sq[x]).exp();
        let mut g2 = 0.0;
        let mut q2 = 0.0;
        for k in 0..n {
            let mut q = 0.0;
            for l in 0..n {
                let g = jac.component(k * n + l)[x];
                g2 += g * g;
                q += up.component(l)[x] * g;
            }
            q2 += q * q;
        }
        let dot: f64 = (0..n).map(|l| rp.component(l)[x] * up.component(l)[x]).sum();
        diss += g2 * w;
        grad += q2 * w;
        work += dot * w;
    }
    let cv = grid.cell_volume();
    Ok(ExpEnergyTerms {
        t,
        energy,
        dissipation: 2.0 * mu * diss * cv,
        gradient: 4.0 * mu * grad * cv,
        work: 2.0 * work * cv,
    })
}

/// Residual of the exponential-energy identity per sample; `None` where the
/// sample or a neighbour used for the time derivative overflowed.
pub fn exp_energy_identity_residual(
    traj: &Trajectory,
    f: &dyn Forcing,
    op: &NonlinearOperator,
    mu: f64,
    projected: bool,
) -> Result<Vec<(f64, Option<f64>)>> {
    if traj.len() < 3 {
        return Err(Error::Trajectory(format!(
            "exponential energy residual needs at least 3 samples, got {}",
            traj.len()
        )));
    }
    let terms = traj
        .samples
        .iter()
        .map(|(t, u)| exp_energy_terms(u, *t, f, op, mu, projected))
        .collect::<Result<Vec<_>>>()?;
    let times = traj.times();
    let values: Vec<f64> = terms.iter().map(|e| e.energy.value.unwrap_or(f64::NAN)).collect();
    let d = time_derivative(&times, &values)?;
    let last = terms.len() - 1;
    Ok(terms
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let stencil = if i == 0 { 0..=2 } else if i == last { last - 2..=last } else { i - 1..=i + 1 };
            let clean = stencil.into_iter().all(|j| !terms[j].energy.overflow);
            (e.t, clean.then(|| d[i] + e.dissipation + e.gradient - e.work))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{E, PI};

    use num_complex::Complex64;

    use super::*;
    use crate::grid::TorusGrid;
    use crate::integrator::ForcingSpec;
    use crate::nonlinearity::NonlinearitySpec;
    use crate::random::random_field;

    fn zero_op() -> NonlinearOperator {
        NonlinearOperator::new(NonlinearitySpec::Zero)
    }

    fn heat_traj(u0: &FourierField, mu: f64, lambda: f64, t_final: f64, steps: usize) -> Trajectory {
        let mut tr = Trajectory::new();
        for s in 0..=steps {
            let t = t_final * s as f64 / steps as f64;
            tr.push(t, u0.scaled((-mu * lambda * t).exp()));
        }
        tr
    }

    fn heat_mode(g: &TorusGrid, amp: f64) -> FourierField {
        let mut u = FourierField::zeros(*g, 2);
        u.set_real_mode(0, &[0, 1, 0, 0], Complex64::new(amp, 0.0));
        u.set_real_mode(1, &[1, 0, 0, 0], Complex64::new(0.0, amp));
        u
    }

    #[test]
    fn exp_energy_constants() {
        let g = TorusGrid::new(3, 1.5, 8).unwrap();
        let zero = exp_energy(&FourierField::zeros(g, 3));
        assert!((zero.value.unwrap() - E * 1.5f64.powi(3)).abs() < 1e-12);
        let mut unit = FourierField::zeros(g, 3);
        unit.component_mut(1)[0] = Complex64::new(1.0, 0.0);
        let one = exp_energy(&unit);
        assert!((one.value.unwrap() - E * E * 1.5f64.powi(3)).abs() < 1e-11);
        assert!((one.log_value - one.value.unwrap().ln()).abs() < 1e-12);
    }

    #[test]
    fn exp_energy_overflow_flagged() {
        let g = TorusGrid::new(2, 1.0, 8).unwrap();
        let mut big = FourierField::zeros(g, 2);
        big.component_mut(0)[0] = Complex64::new(30.0, 0.0);
        let e = exp_energy(&big);
        assert!(e.overflow && e.value.is_none());
        assert!((e.log_value - 901.0).abs() < 1e-10);
    }

    fn refine(u: &FourierField, points: usize) -> FourierField {
        let g = u.grid();
        let fine = TorusGrid::new(g.dim(), g.period(), points).unwrap();
        let mut out = FourierField::zeros(fine, u.components());
        for c in 0..u.components() {
            for (i, v) in u.component(c).iter().enumerate() {
                let k = g.mode(i);
                if !g.is_nyquist(&k) {
                    out.component_mut(c)[fine.index_of(&k)] = *v;
                }
            }
        }
        out
    }

    #[test]
    fn exp_energy_matches_refined_quadrature() {
        let g = TorusGrid::new(2, 1.0, 32).unwrap();
        let u = random_field(&g, 2, 0.3, 11);
        let coarse = exp_energy(&u);
        let fine = exp_energy(&refine(&u, 128));
        let (a, b) = (coarse.value.unwrap(), fine.value.unwrap());
        assert!((a - b).abs() < 1e-8 * b, "{a} vs {b}");
        assert!((coarse.log_value - a.ln()).abs() < 1e-10 * a.ln().abs());
    }

    #[test]
    fn heat_energy_residual_is_second_order() {
        let g = TorusGrid::new(2, 1.0, 16).unwrap();
        let u0 = heat_mode(&g, 1.0);
        let (mu, lambda) = (0.05, (2.0 * PI).powi(2));
        let err = |steps| {
            let r = energy_identity_residual(&heat_traj(&u0, mu, lambda, 1.0, steps), &ForcingSpec::Zero, &zero_op(), mu)
                .unwrap();
            r.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(50), err(100));
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.2, "order {order}");
    }

    #[test]
    fn zero_trajectory_residuals_vanish() {
        let g = TorusGrid::new(2, 1.0, 8).unwrap();
        let z = FourierField::zeros(g, 2);
        let tr = heat_traj(&z, 1.0, 1.0, 1.0, 4);
        let op = NonlinearOperator::new(NonlinearitySpec::Advection);
        for (_, r) in energy_identity_residual(&tr, &ForcingSpec::Zero, &op, 1.0).unwrap() {
            assert_eq!(r, 0.0);
        }
        // Constant energy e·ℓⁿ; the difference weights cancel only to roundoff.
        for (_, r) in exp_energy_identity_residual(&tr, &ForcingSpec::Zero, &op, 1.0, true).unwrap() {
            assert!(r.unwrap().abs() < 1e-12);
        }
        assert!(energy_identity_residual(&Trajectory::new(), &ForcingSpec::Zero, &op, 1.0).is_err());
    }

    #[test]
    fn heat_exp_residual_shrinks() {
        let g = TorusGrid::new(2, 1.0, 32).unwrap();
        let u0 = heat_mode(&g, 0.5);
        let (mu, lambda) = (0.02, (2.0 * PI).powi(2));
        let err = |steps| {
            let r = exp_energy_identity_residual(&heat_traj(&u0, mu, lambda, 0.5, steps), &ForcingSpec::Zero, &zero_op(), mu, false)
                .unwrap();
            r.iter().map(|(_, v)| v.unwrap().abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(20), err(40));
        assert!(e2 < e1 / 3.0, "{e1} -> {e2}");
    }

    #[test]
    fn balance_defect_of_exact_decay_is_small() {
        let g = TorusGrid::new(2, 1.0, 16).unwrap();
        let u0 = heat_mode(&g, 1.0);
        let (mu, lambda) = (0.01, (2.0 * PI).powi(2));
        let d = energy_balance_defect(&heat_traj(&u0, mu, lambda, 1.0, 1000), mu).unwrap();
        assert!(d < 1e-6, "{d}");
    }
}
