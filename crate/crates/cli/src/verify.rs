//! Built-in identity suites run by `torus-ns verify`.

use std::f64::consts::TAU;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_ns_core::diagnostics::{gronwall_perov_bound, perov_condition_holds, GronwallInputs, SampledFn};
use torus_ns_core::integrator::record_trajectory;
use torus_ns_core::nonlinearity::{polarization_residual, trilinear_pairing};
use torus_ns_core::operators::{
    derivative_norm, divergence, gradient, l2_norm, laplacian, leray_project, max_abs_divergence, rot, rot_adjoint,
    ABS_FLOOR,
};
use torus_ns_core::random::{random_field, random_zero_mean};
use torus_ns_core::{
    BilinearTensor, FourierField, ForcingSpec, Integrator, NonlinearOperator, NonlinearitySpec, Scheme, SimConfig,
    TorusGrid,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    DeRham,
    Projection,
    Polarization,
    Trilinear,
    Frechet,
    Perov,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::DeRham, Suite::Projection, Suite::Polarization, Suite::Trilinear, Suite::Frechet, Suite::Perov];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DeRham => "de-rham",
            Suite::Projection => "projection",
            Suite::Polarization => "polarization",
            Suite::Trilinear => "trilinear",
            Suite::Frechet => "frechet",
            Suite::Perov => "perov",
        }
    }
}

/// One measured quantity and the bound it must stay under.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub value: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value < self.tol
    }
}

/// Fields per dimension for the randomized suites.
pub const FIELDS_PER_DIM: u64 = 10;
pub const POINTS: usize = 32;

fn rel(a: &FourierField, scale: f64) -> f64 {
    a.coeff_norm() / scale.max(ABS_FLOOR)
}

fn grid(dim: usize) -> Result<TorusGrid, CliError> {
    Ok(TorusGrid::new(dim, TAU, POINTS)?)
}

fn seeds(base: u64) -> impl Iterator<Item = u64> {
    (0..FIELDS_PER_DIM).map(move |i| base.wrapping_mul(1_000_003).wrapping_add(i))
}

/// Largest relative residual of each identity of the de Rham complex over
/// seeded random fields, `n = 2, 3`.
pub fn de_rham(seed: u64, tol: f64) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for dim in [2usize, 3] {
        let g = grid(dim)?;
        let mut worst = [0.0f64; 4];
        for s in seeds(seed) {
            let phi = random_field(&g, 1, 1.0, s);
            let u = random_field(&g, dim, 1.0, s ^ 0x5eed);
            let grad = gradient(&phi)?;
            let lap_phi = laplacian(&phi);
            let r = rot(&u)?;
            let rr = rot_adjoint(&r)?;
            let lap_u = laplacian(&u);
            worst[0] = worst[0].max(rel(&rot(&grad)?, lap_phi.coeff_norm()));
            worst[1] = worst[1].max(rel(&(&divergence(&grad)? - &lap_phi), lap_phi.coeff_norm()));
            worst[2] = worst[2].max(rel(&divergence(&rr)?, lap_u.coeff_norm()));
            let lhs = &(&gradient(&divergence(&u)?)? - &rr) - &lap_u;
            worst[3] = worst[3].max(rel(&lhs, lap_u.coeff_norm()));
        }
        let names = ["rot grad = 0", "div grad = lap", "div rot = 0", "-rot rot + grad div = lap"];
        for (name, w) in names.iter().zip(worst) {
            out.push(Check { suite: Suite::DeRham, name: format!("n={dim}: {name}"), value: w, tol });
        }
    }
    Ok(out)
}

/// Idempotence, gradient annihilation and pointwise divergence of the
/// projection.
pub fn projection(seed: u64, tol: f64) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for dim in [2usize, 3] {
        let g = grid(dim)?;
        let mut worst = [0.0f64; 3];
        for s in seeds(seed) {
            let u = random_field(&g, dim, 1.0, s);
            let pu = leray_project(&u)?;
            worst[0] = worst[0].max(rel(&(&leray_project(&pu)? - &pu), pu.coeff_norm()));
            let grad = gradient(&random_field(&g, 1, 1.0, s ^ 0x9e37))?;
            worst[1] = worst[1].max(rel(&leray_project(&grad)?, grad.coeff_norm()));
            worst[2] = worst[2].max(max_abs_divergence(&pu)? / l2_norm(&u).max(ABS_FLOOR));
        }
        let names = ["P P u = P u", "P grad = 0", "max|div P u| / |u|"];
        for (name, w) in names.iter().zip(worst) {
            out.push(Check { suite: Suite::Projection, name: format!("n={dim}: {name}"), value: w, tol });
        }
    }
    Ok(out)
}

/// A tensor with independent standard-normal-ish entries in `[-1, 1]`.
pub fn random_tensor(dim: usize, seed: u64) -> BilinearTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = BilinearTensor::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    t.add(i, j, k, l, rng.random_range(-1.0..=1.0));
                }
            }
        }
    }
    t
}

/// `D u₁ − D u₂ = B(u₁, u₁−u₂) − ½ B(u₁−u₂, u₁−u₂)` relative to
/// `‖D u₁‖ + ‖D u₂‖`, for built-in and random tensors.
pub fn polarization(seed: u64, tol: f64) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for dim in [2usize, 3] {
        let g = grid(dim)?;
        let mut worst = 0.0f64;
        for s in seeds(seed) {
            let specs = [
                NonlinearitySpec::Advection,
                NonlinearitySpec::Svplechac { b: 0.3 },
                NonlinearitySpec::Custom { tensor: random_tensor(dim, s) },
            ];
            let u1 = random_field(&g, dim, 1.0, s);
            let u2 = random_field(&g, dim, 0.7, s ^ 0xabcd);
            for spec in specs {
                let op = NonlinearOperator::new(spec.clone());
                let scale = l2_norm(&op.d(&u1)?) + l2_norm(&op.d(&u2)?);
                worst = worst.max(polarization_residual(&spec, &u1, &u2)? / scale.max(ABS_FLOOR));
            }
        }
        out.push(Check { suite: Suite::Polarization, name: format!("n={dim}: polarization identity"), value: worst, tol });
    }
    Ok(out)
}

/// `|(D u, u)| / (‖u‖² ‖∇u‖)` for the Plecháč–Šverák family on arbitrary
/// fields and for advection on divergence-free fields.
pub fn trilinear(seed: u64, tol: f64) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for dim in [2usize, 3] {
        let g = grid(dim)?;
        let cases: [(String, NonlinearitySpec, bool); 4] = [
            ("svplechac b=0.1".into(), NonlinearitySpec::Svplechac { b: 0.1 }, false),
            ("svplechac b=0.5".into(), NonlinearitySpec::Svplechac { b: 0.5 }, false),
            ("svplechac b=0.9".into(), NonlinearitySpec::Svplechac { b: 0.9 }, false),
            ("advection, projected".into(), NonlinearitySpec::Advection, true),
        ];
        for (name, spec, project) in cases {
            let mut worst = 0.0f64;
            for s in seeds(seed) {
                let mut u = random_field(&g, dim, 1.0, s);
                if project {
                    u = leray_project(&u)?;
                }
                let scale = l2_norm(&u).powi(2) * derivative_norm(&u, 1);
                worst = worst.max(trilinear_pairing(&spec, &u)?.abs() / scale.max(ABS_FLOOR));
            }
            out.push(Check { suite: Suite::Trilinear, name: format!("n={dim}: {name}"), value: worst, tol });
        }
    }
    Ok(out)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Linearized-flow check. Errors `‖(S(u₀+εh₀) − S(u₀))/ε − L h₀‖` per `ε`,
/// where `S` is the discrete nonlinear flow and `L` the discrete linearized
/// flow along `S(u₀)`.
pub fn frechet_sweep(
    grid: TorusGrid,
    config: &SimConfig,
    spec: &NonlinearitySpec,
    u0: &FourierField,
    h0: &FourierField,
    eps: &[f64],
) -> Result<Vec<(f64, f64)>, CliError> {
    let mut cfg = config.clone();
    cfg.diag_every = 1;
    let integ = Integrator::new(grid, cfg, spec.clone())?;
    let f = ForcingSpec::Zero;
    let (base, traj) = record_trajectory(&integ, u0, &f)?;
    if base.blow_up.is_some() {
        return Err(CliError::Invariant("reference run blew up".into()));
    }
    let lin = integ.run_linearized(h0, &traj, &f)?.u;
    let mut out = Vec::new();
    for &e in eps {
        let mut up = u0.clone();
        up.axpy(e, h0);
        let (pert, _) = record_trajectory(&integ, &up, &f)?;
        let mut fd = &pert.final_state.u - &base.final_state.u;
        fd = fd.scaled(1.0 / e);
        out.push((e, l2_norm(&(&fd - &lin))));
    }
    Ok(out)
}

pub const FRECHET_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// `|slope − 1|` of the Fréchet error against `ε`, for the projected
/// advection system and the unprojected Plecháč–Šverák system.
pub fn frechet(seed: u64, tol: f64) -> Result<Vec<Check>, CliError> {
    let g = TorusGrid::new(2, TAU, 16)?;
    let mut out = Vec::new();
    for (a, spec) in [(1u8, NonlinearitySpec::Advection), (0, NonlinearitySpec::Svplechac { b: 0.5 })] {
        let cfg = SimConfig { mu: 0.1, a, t_final: 0.2, dt: 1e-3, scheme: Scheme::ImexEuler, ..SimConfig::default() };
        let u0 = random_zero_mean(&g, 2, 1.0, seed);
        let h0 = random_zero_mean(&g, 2, 1.0, seed ^ 0x77);
        let sweep = frechet_sweep(g, &cfg, &spec, &u0, &h0, &FRECHET_EPS)?;
        let slope = loglog_slope(&sweep);
        out.push(Check {
            suite: Suite::Frechet,
            name: format!("a={a} {spec:?}: slope {slope:.4}"),
            value: (slope - 1.0).abs(),
            tol,
        });
    }
    Ok(out)
}

fn constant_inputs(a: f64, b: f64, c: f64, gamma0: f64, h: Option<f64>) -> GronwallInputs {
    GronwallInputs { a, b: SampledFn::Constant(b), c: SampledFn::Constant(c), gamma0, interval: (0.0, 20.0), h }
}

/// Largest relative deviation of the bound from the exact solutions of
/// `F′ = βF` (`γ₀ = 1`), `F′ = F²` (`γ₀ = 2`) and `F′ = √F` (`γ₀ = ½`).
pub fn perov_closed_forms() -> Result<Vec<(String, f64)>, CliError> {
    let grid_t: Vec<f64> = (0..=20).map(|i| i as f64 * 0.04).collect();
    let mut out = Vec::new();
    type Case = (&'static str, GronwallInputs, Box<dyn Fn(f64) -> f64>);
    let cases: [Case; 3] = [
        ("F' = 0.7 F", constant_inputs(1.3, 0.7, 0.0, 1.0, None), Box::new(|t: f64| 1.3 * (0.7 * t).exp())),
        ("F' = F^2", constant_inputs(1.0, 0.0, 1.0, 2.0, Some(0.8)), Box::new(|t: f64| 1.0 / (1.0 - t))),
        ("F' = F^(1/2)", constant_inputs(2.0, 0.0, 1.0, 0.5, None), Box::new(|t: f64| (2f64.sqrt() + 0.5 * t).powi(2))),
    ];
    for (name, g, exact) in cases {
        let mut worst = 0.0f64;
        for &t in &grid_t {
            let bound = gronwall_perov_bound(&g, t)?
                .value()
                .ok_or_else(|| CliError::Invariant(format!("{name}: bound infeasible at t = {t}")))?;
            worst = worst.max((bound - exact(t)).abs() / exact(t));
        }
        out.push((name.to_string(), worst));
    }
    Ok(out)
}

/// Horizon where the feasibility flag for `γ₀ > 1` flips, by bisection on
/// `[lo, hi]` down to width `width`.
pub fn perov_flip(a: f64, b: f64, c: f64, gamma0: f64, lo: f64, hi: f64, width: f64) -> Result<f64, CliError> {
    let holds = |h: f64| perov_condition_holds(&constant_inputs(a, b, c, gamma0, Some(h)));
    let (mut lo, mut hi) = (lo, hi);
    if !holds(lo)? || holds(hi)? {
        return Err(CliError::Invariant(format!("no feasibility flip in [{lo}, {hi}]")));
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Boundary of `A ((γ−1) C h)^{1/(γ−1)} < e^{−B h}` for constant `B, C`,
/// solved independently by Newton's method in `z = ln h`, where the
/// logarithmic form is convex and increasing.
pub fn perov_boundary_newton(a: f64, b: f64, c: f64, gamma0: f64) -> f64 {
    let g = gamma0 - 1.0;
    let phi = |z: f64| a.ln() + ((g * c).ln() + z) / g + b * z.exp();
    let dphi = |z: f64| 1.0 / g + b * z.exp();
    let mut z = -(a.powf(g) * g * c).ln();
    for _ in 0..100 {
        let step = phi(z) / dphi(z);
        z -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    z.exp()
}

pub fn perov(tol: f64, boundary_tol: f64) -> Result<Vec<Check>, CliError> {
    let mut out: Vec<Check> = perov_closed_forms()?
        .into_iter()
        .map(|(name, value)| Check { suite: Suite::Perov, name, value, tol })
        .collect();
    for (a, b, c, gamma0) in [(1.0, 0.0, 1.0, 2.0), (0.5, 0.8, 1.5, 3.0)] {
        let exact = perov_boundary_newton(a, b, c, gamma0);
        let found = perov_flip(a, b, c, gamma0, 1e-3, 10.0, boundary_tol)?;
        out.push(Check {
            suite: Suite::Perov,
            name: format!("flip for A={a} B={b} C={c} gamma={gamma0} at h={found:.10}"),
            value: (found - exact).abs(),
            tol: boundary_tol,
        });
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<Check>, CliError> {
    match suite {
        Suite::DeRham => de_rham(seed, 1e-11),
        Suite::Projection => projection(seed, 1e-11),
        Suite::Polarization => polarization(seed, 1e-12),
        Suite::Trilinear => trilinear(seed, 1e-10),
        Suite::Frechet => frechet(seed, 0.1),
        Suite::Perov => perov(1e-9, 1e-8),
    }
}
