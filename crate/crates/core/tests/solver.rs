use std::f64::consts::TAU;

use num_complex::Complex64;
use torus_ns_core::diagnostics::{bochner_seminorm, energy_balance_defect};
use torus_ns_core::integrator::record_trajectory;
use torus_ns_core::operators::{l2_norm, leray_project};
use torus_ns_core::random::random_zero_mean;
use torus_ns_core::{
    snapshot, ForcingSpec, FourierField, Integrator, NonlinearitySpec, Scheme, SimConfig, SimulationState, TorusGrid,
};

fn cfg(a: u8, scheme: Scheme, dt: f64, t_final: f64) -> SimConfig {
    SimConfig { mu: 0.1, a, t_final, dt, scheme, diag_every: 1, ..SimConfig::default() }
}

#[test]
fn linear_system_decays_exactly_per_mode() {
    let g = TorusGrid::new(3, 2.0, 16).unwrap();
    let mut u = FourierField::zeros(g, 3);
    let k = [1, -2, 3, 0];
    u.set_real_mode(0, &k, Complex64::new(0.3, -0.4));
    for scheme in [Scheme::ImexEuler, Scheme::Etdrk2] {
        let integ = Integrator::new(g, cfg(0, scheme, 0.01, 0.5), NonlinearitySpec::Zero).unwrap();
        let (s, _) = record_trajectory(&integ, &u, &ForcingSpec::Zero).unwrap();
        let lambda = 0.1 * (TAU / 2.0f64).powi(2) * 14.0;
        let expect = Complex64::new(0.3, -0.4) * (-lambda * 0.5).exp();
        assert!((s.final_state.u.coeff(0, &k) - expect).norm() < 1e-14, "{scheme:?}");
    }
}

#[test]
fn trilinear_null_systems_lose_energy() {
    let g = TorusGrid::new(2, TAU, 32).unwrap();
    let u0 = random_zero_mean(&g, 2, 1.0, 5);
    for (a, spec, data) in [
        (0u8, NonlinearitySpec::Svplechac { b: 0.25 }, u0.clone()),
        (1, NonlinearitySpec::Advection, leray_project(&u0).unwrap()),
    ] {
        let integ = Integrator::new(g, cfg(a, Scheme::Etdrk2, 2e-3, 0.5), spec.clone()).unwrap();
        let (summary, traj) = record_trajectory(&integ, &data, &ForcingSpec::Zero).unwrap();
        assert!(summary.blow_up.is_none());
        let norms: Vec<f64> = traj.samples.iter().map(|(_, u)| l2_norm(u)).collect();
        assert!(norms.windows(2).all(|w| w[1] < w[0]), "{spec:?}");
        assert!(energy_balance_defect(&traj, 0.1).unwrap() < 1e-5, "{spec:?}");
        let b0 = bochner_seminorm(&traj, 0, 0.1, 0.5).unwrap();
        assert!(b0 >= norms[0] * (1.0 - 1e-12));
    }
}

#[test]
fn stepping_is_deterministic_and_resumable() {
    let g = TorusGrid::new(2, TAU, 16).unwrap();
    let u0 = random_zero_mean(&g, 2, 1.0, 8);
    let f = ForcingSpec::SingleMode { component: 1, mode: vec![2, 1], coefficient: (0.2, 0.1), frequency: 3.0 };
    let integ = Integrator::new(g, cfg(1, Scheme::Etdrk2, 1e-3, 0.2), NonlinearitySpec::Advection).unwrap();
    let (whole, traj) = record_trajectory(&integ, &u0, &f).unwrap();
    let (t_mid, u_mid) = traj.samples[100].clone();

    let dir = std::env::temp_dir().join(format!("torus-ns-core-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mid.tfld");
    snapshot::save(&path, t_mid, &u_mid).unwrap();
    let back = snapshot::load(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();

    let start = SimulationState { t: back.t, step_index: 100, u: back.field, p: None };
    let resumed = integ.run_from(start, &f, &mut |_| Ok(())).unwrap();
    let (a, b) = (whole.final_state.u.coeffs(), resumed.final_state.u.coeffs());
    assert!(a.iter().zip(b).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
}
