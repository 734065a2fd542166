//! Bochner-type seminorms of sampled trajectories and data.

use crate::error::{Error, Result};
use crate::field::FourierField;
use crate::integrator::Trajectory;
use crate::operators::derivative_norm;

use super::quadrature::trapezoid;

fn check_span(traj: &Trajectory, t_final: f64, what: &str) -> Result<()> {
    let Some((first, _)) = traj.samples.first() else {
        return Err(Error::Trajectory(format!("{what}: empty trajectory")));
    };
    let last = traj.samples.last().map(|(t, _)| *t).unwrap_or(*first);
    let tol = 1e-9 * t_final.abs().max(1.0);
    if first.abs() > tol || (last - t_final).abs() > tol {
        return Err(Error::Trajectory(format!(
            "{what}: samples span [{first}, {last}], expected [0, {t_final}]"
        )));
    }
    Ok(())
}

/// `‖u‖_{i,μ,T} = (sup_t ‖∇ⁱu‖² + μ ∫₀ᵀ ‖∇^{i+1}u‖² dt)^{1/2}` on the samples.
pub fn bochner_seminorm(traj: &Trajectory, i: u32, mu: f64, t_final: f64) -> Result<f64> {
    check_span(traj, t_final, "bochner seminorm")?;
    let times = traj.times();
    let sup = traj
        .samples
        .iter()
        .map(|(_, u)| derivative_norm(u, i).powi(2))
        .fold(0.0, f64::max);
    let next: Vec<f64> = traj.samples.iter().map(|(_, u)| derivative_norm(u, i + 1).powi(2)).collect();
    Ok((sup + mu * trapezoid(&times, &next)).sqrt())
}

/// Spectral `(H¹)′` norm: weight `1/((2π/ℓ)²(k,k))` off the mean, `1` on it.
pub fn dual_h1_norm(f: &FourierField) -> f64 {
    let grid = *f.grid();
    let s2 = grid.wavenumber_scale().powi(2);
    let weights: Vec<f64> = grid
        .modes()
        .map(|k| match grid.norm_sq(&k) {
            0 => 1.0,
            kk => 1.0 / (s2 * kk as f64),
        })
        .collect();
    let len = grid.len();
    let sum: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| weights[i % len] * c.norm_sqr())
        .sum();
    (grid.volume() * sum).sqrt()
}

/// `‖(f, u₀)‖_{k,μ,T}`.
///
/// For `k ≥ 1`: `(‖∇^k u₀‖² + 4μ⁻¹ ‖∇^{k−1} f‖²_{L²(I,L²)})^{1/2}`.
/// For `k = 0`: `(‖u₀‖² + 2μ⁻¹ ‖f‖²_{L²(I,(H¹)′)} + ‖f‖²_{L¹(I,(H¹)′)})^{1/2}`.
pub fn data_seminorm(f: &Trajectory, u0: &FourierField, k: u32, mu: f64, t_final: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("viscosity must be positive, got {mu}")));
    }
    let times = f.times();
    if f.is_empty() {
        // No forcing samples: treat f as zero.
        return Ok(derivative_norm(u0, k));
    }
    check_span(f, t_final, "data seminorm")?;
    if k == 0 {
        let dual: Vec<f64> = f.samples.iter().map(|(_, g)| dual_h1_norm(g)).collect();
        let sq: Vec<f64> = dual.iter().map(|d| d * d).collect();
        let l1 = trapezoid(&times, &dual);
        Ok((derivative_norm(u0, 0).powi(2) + 2.0 / mu * trapezoid(&times, &sq) + l1 * l1).sqrt())
    } else {
        let sq: Vec<f64> = f.samples.iter().map(|(_, g)| derivative_norm(g, k - 1).powi(2)).collect();
        Ok((derivative_norm(u0, k).powi(2) + 4.0 / mu * trapezoid(&times, &sq)).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::grid::TorusGrid;

    fn single_mode(g: &TorusGrid, amp: f64) -> FourierField {
        let mut u = FourierField::zeros(*g, 2);
        u.set_real_mode(0, &[1, 2, 0, 0], Complex64::new(0.0, amp));
        u
    }

    fn constant_traj(u: &FourierField, t_final: f64, samples: usize) -> Trajectory {
        let mut tr = Trajectory::new();
        for s in 0..=samples {
            tr.push(t_final * s as f64 / samples as f64, u.clone());
        }
        tr
    }

    #[test]
    fn constant_single_mode() {
        let g = TorusGrid::new(2, 3.0, 16).unwrap();
        let u = single_mode(&g, 0.4);
        let (mu, t) = (0.3, 2.0);
        let l2sq = derivative_norm(&u, 0).powi(2);
        let grad_sq = (2.0 * PI / 3.0).powi(2) * 5.0 * l2sq;
        let got = bochner_seminorm(&constant_traj(&u, t, 7), 0, mu, t).unwrap();
        assert!((got - (l2sq + mu * t * grad_sq).sqrt()).abs() < 1e-12 * got);
    }

    #[test]
    fn zero_and_empty() {
        let g = TorusGrid::new(2, 1.0, 8).unwrap();
        let z = FourierField::zeros(g, 2);
        assert_eq!(bochner_seminorm(&constant_traj(&z, 1.0, 3), 1, 1.0, 1.0).unwrap(), 0.0);
        assert!(matches!(bochner_seminorm(&Trajectory::new(), 0, 1.0, 1.0), Err(Error::Trajectory(_))));
    }

    #[test]
    fn heat_decay_matches_integral() {
        // u(t) = e^{-μλt} u₀ with λ = (2π/ℓ)²(k,k).
        let g = TorusGrid::new(2, 1.0, 16).unwrap();
        let u0 = single_mode(&g, 1.0);
        let (mu, t_final, steps) = (0.05, 1.0, 20000);
        let lambda = (2.0 * PI).powi(2) * 5.0;
        let mut tr = Trajectory::new();
        for s in 0..=steps {
            let t = t_final * s as f64 / steps as f64;
            tr.push(t, u0.scaled((-mu * lambda * t).exp()));
        }
        let e0 = derivative_norm(&u0, 0).powi(2);
        let exact = (e0 + mu * lambda * e0 * (1.0 - (-2.0 * mu * lambda * t_final).exp()) / (2.0 * mu * lambda)).sqrt();
        let got = bochner_seminorm(&tr, 0, mu, t_final).unwrap();
        assert!((got - exact).abs() < 1e-6 * exact, "{got} vs {exact}");
    }

    #[test]
    fn data_seminorm_closed_forms() {
        let g = TorusGrid::new(2, 1.0, 16).unwrap();
        let f = single_mode(&g, 0.7);
        let (mu, t) = (0.2, 3.0);
        let zero = FourierField::zeros(g, 2);
        let got = data_seminorm(&constant_traj(&f, t, 5), &zero, 1, mu, t).unwrap();
        let expect = 2.0 / mu.sqrt() * derivative_norm(&f, 0) * t.sqrt();
        assert!((got - expect).abs() < 1e-12 * expect);

        let u0 = single_mode(&g, 0.3);
        let none = data_seminorm(&constant_traj(&zero, t, 5), &u0, 2, mu, t).unwrap();
        assert!((none - derivative_norm(&u0, 2)).abs() < 1e-14 * none);

        let f_term = |scale: f64, k: u32| {
            let v = data_seminorm(&constant_traj(&f.scaled(scale), t, 5), &u0, k, mu, t).unwrap();
            v * v - derivative_norm(&u0, k).powi(2)
        };
        for k in [0, 1, 2] {
            assert!((f_term(2.0, k) - 4.0 * f_term(1.0, k)).abs() < 1e-10 * f_term(2.0, k));
        }
    }

    #[test]
    fn dual_norm_weights() {
        let g = TorusGrid::new(2, 2.0, 8).unwrap();
        let mut f = FourierField::zeros(g, 1);
        f.set_real_mode(0, &[1, 0, 0, 0], Complex64::new(0.5, 0.0));
        f.component_mut(0)[0] = Complex64::new(2.0, 0.0);
        // mean part: 4·|2|²; mode pair: 4·2·0.25/π²
        let expect = (4.0 * 4.0 + 4.0 * 0.5 / (PI * PI)).sqrt();
        assert!((dual_h1_norm(&f) - expect).abs() < 1e-13);
    }
}
