use torus_ns_core::radial::{
    radial_run, sample_box, selfsim_ode_integrate, series_second_derivative, shoot_farfield, stable_dt,
    vector_system_residual, FarField, OdeOptions, RadialState, SelfSimProblem, SelfSimProfile, ShootOptions,
    ShootOutcome,
};

const N: usize = 5;
const GAMMA: f64 = 0.1;

fn shot_profile(m: u8) -> SelfSimProfile {
    let opts = ShootOptions::default();
    let ShootOutcome::Root { kappa, mismatch, .. } = shoot_farfield(N, GAMMA, 2, (1.0, 2.0), &opts).unwrap() else {
        panic!("no root in [1, 2]");
    };
    assert!(mismatch.abs() < 1e-6, "re-integrated mismatch {mismatch}");
    let p = SelfSimProblem { n: N, kappa, gamma: GAMMA, multiplier: m, y_max: opts.y_max };
    selfsim_ode_integrate(&p, &OdeOptions::default()).unwrap()
}

fn selfsim_v(p: &SelfSimProfile, r: f64, t: f64) -> f64 {
    let s = 2.0 * p.problem.kappa * (1.0 - t);
    p.eval(r / s.sqrt()).unwrap().0 / s
}

#[test]
fn origin_start_matches_series() {
    let p = SelfSimProblem { n: N, kappa: 1.0, gamma: GAMMA, multiplier: 2, y_max: 3.0 };
    let prof = selfsim_ode_integrate(&p, &OdeOptions::default()).unwrap();
    let w2 = series_second_derivative(&p);
    assert!((w2 - 0.13 / 7.0).abs() < 1e-15);
    // w′ ≈ w″(0) y near the origin.
    for i in 0..5 {
        let (y, wp) = (prof.y[i], prof.wp[i]);
        assert!((wp - w2 * y).abs() < 1e-3 * y + 1e-12, "y = {y}: w' = {wp}");
    }
}

#[test]
fn multipliers_give_different_profiles() {
    let mk = |m| SelfSimProblem { n: N, kappa: 1.0, gamma: GAMMA, multiplier: m, y_max: 4.0 };
    let a = selfsim_ode_integrate(&mk(1), &OdeOptions::default()).unwrap();
    let b = selfsim_ode_integrate(&mk(2), &OdeOptions::default()).unwrap();
    let top = a.valid_until().min(b.valid_until());
    let diff = (0..=200)
        .map(|i| top * i as f64 / 200.0)
        .map(|y| (a.eval(y).unwrap().0 - b.eval(y).unwrap().0).abs())
        .fold(0.0, f64::max);
    assert!(diff > 1e-3, "sup difference {diff}");
}

#[test]
fn radial_pde_tracks_self_similar_solution() {
    let prof = shot_profile(2);
    let (r_max, t_final) = (3.0, 0.3);
    let errors: Vec<f64> = [60usize, 120]
        .iter()
        .map(|&m| {
            let init = RadialState::from_fn(N, r_max, m, 0.0, |r| selfsim_v(&prof, r, 0.0)).unwrap();
            let h = init.spacing();
            let steps = (t_final / stable_dt(N, h)).ceil();
            let far = {
                let p = prof.clone();
                FarField::Dirichlet(Box::new(move |t| selfsim_v(&p, r_max, t)))
            };
            let run = radial_run(&init, t_final / steps, t_final, &far, usize::MAX).unwrap();
            assert!(run.blow_up.is_none());
            let last = run.last();
            (0..=m).map(|i| (last.v[i] - selfsim_v(&prof, last.radius(i), t_final)).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!(errors[1] < 1e-3, "{errors:?}");
    let order = (errors[0] / errors[1]).log2();
    assert!(order > 1.7, "observed order {order} from {errors:?}");
}

#[test]
fn vector_reduction_needs_amplitude_two_and_is_b_independent() {
    let prof = shot_profile(2);
    let pts = sample_box(N, 0.5, 3);
    let times = [0.0, 0.2];
    let res = |amp: f64, b: f64, h: f64| vector_system_residual(&prof, 1.0, amp, b, &pts, &times, h).unwrap();
    let coarse = res(2.0, 0.5, 0.02);
    let fine = res(2.0, 0.5, 0.01);
    assert!((coarse / fine).log2() > 1.7, "{coarse} -> {fine}");
    for b in [0.1, 0.9] {
        assert!((res(2.0, b, 0.01) - fine).abs() <= 1e-9 * fine.max(1.0), "b = {b}");
    }
    // With amplitude one the quadratic terms no longer balance.
    assert!(res(1.0, 0.5, 0.01) > 100.0 * fine);
}

#[test]
fn m1_profile_is_not_a_radial_solution() {
    let prof = shot_profile(1);
    let pts = sample_box(N, 0.5, 3);
    let times = [0.0, 0.2];
    let a = vector_system_residual(&prof, 1.0, 2.0, 0.5, &pts, &times, 0.02).unwrap();
    let b = vector_system_residual(&prof, 1.0, 2.0, 0.5, &pts, &times, 0.01).unwrap();
    assert!((a - b).abs() < 0.05 * b, "residual should stall: {a} -> {b}");
    assert!(b > 1e-2);
}
