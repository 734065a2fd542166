//! Time stepping of `∂_t u − μΔu + D u + a∇p = f` and its linearization
//! `∂_t u − μΔu + B(w, u) + a∇p = f` on the torus.
//!
//! The viscous term is integrated exactly by the per-mode factor
//! `e^{−μ(2π/ℓ)²(k,k)dt}`. Everything else is collected in
//! `G = P_a(f − D u)`, where `P_a` is the identity for `a = 0` and the
//! Leray projection for `a = 1`. Pressure is recovered after each step from
//! `∇p = (I − P)(f − D u)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FourierField;
use crate::grid::TorusGrid;
use crate::nonlinearity::{NonlinearOperator, NonlinearitySpec};
use crate::operators::{
    derivative_norm, l2_norm, leray_project, linf_norm, linf_upper_bound, max_abs_divergence,
    pressure_from_gradient, sobolev_norm, ABS_FLOOR,
};

/// `‖u‖_{L∞}` above which a run is declared blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ImexEuler,
    Etdrk2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub mu: f64,
    pub a: u8,
    pub t_final: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub dealias: bool,
    pub diag_every: u64,
    /// Allowed `max|div u|` relative to the RMS gradient when `a = 1`.
    pub tol_div: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            mu: 0.1,
            a: 1,
            t_final: 1.0,
            dt: 1e-3,
            scheme: Scheme::Etdrk2,
            dealias: true,
            diag_every: 10,
            tol_div: 1e-10,
        }
    }
}

impl SimConfig {
    /// All violated constraints, empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.mu.is_finite() && self.mu > 0.0) {
            v.push(format!("mu must be positive (got {})", self.mu));
        }
        if self.a > 1 {
            v.push("a must be 0 or 1".to_string());
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            v.push(format!("T must be positive (got {})", self.t_final));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            v.push(format!("dt must be positive (got {})", self.dt));
        } else if self.dt >= self.t_final {
            v.push(format!("dt must be smaller than T (dt = {}, T = {})", self.dt, self.t_final));
        } else if self.step_count().is_none() {
            v.push(format!("T = {} is not an integer multiple of dt = {}", self.t_final, self.dt));
        }
        if self.diag_every == 0 {
            v.push("diag_every must be at least 1".to_string());
        }
        if !(self.tol_div.is_finite() && self.tol_div > 0.0) {
            v.push(format!("tol_div must be positive (got {})", self.tol_div));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v.join("; ")))
        }
    }

    /// `T/dt` when it is an integer to within `1e-9` relative.
    pub fn step_count(&self) -> Option<u64> {
        let ratio = self.t_final / self.dt;
        let n = ratio.round();
        ((ratio - n).abs() <= 1e-9 * ratio.max(1.0) && n >= 1.0).then_some(n as u64)
    }

    pub fn time_of(&self, step: u64) -> f64 {
        step as f64 * self.dt
    }

    pub fn projected(&self) -> bool {
        self.a == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    pub t: f64,
    pub step_index: u64,
    pub u: FourierField,
    /// Present iff `a = 1`.
    pub p: Option<FourierField>,
}

/// Right-hand side data `f(·, t)`.
pub trait Forcing {
    /// `None` means `f ≡ 0` at this time.
    fn at(&self, grid: &TorusGrid, t: f64) -> Result<Option<FourierField>>;
}

impl<F> Forcing for F
where
    F: Fn(f64) -> FourierField,
{
    fn at(&self, _grid: &TorusGrid, t: f64) -> Result<Option<FourierField>> {
        Ok(Some(self(t)))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum ForcingSpec {
    #[default]
    Zero,
    /// `f = cos(ω t) · 2 Re(c e^{i(2π/ℓ)k·x}) e_component`.
    SingleMode {
        component: usize,
        mode: Vec<i64>,
        coefficient: (f64, f64),
        frequency: f64,
    },
    /// Time-independent field, e.g. loaded from a snapshot.
    Field(FourierField),
}

impl Forcing for ForcingSpec {
    fn at(&self, grid: &TorusGrid, t: f64) -> Result<Option<FourierField>> {
        match self {
            ForcingSpec::Zero => Ok(None),
            ForcingSpec::SingleMode { component, mode, coefficient, frequency } => {
                if *component >= grid.dim() || mode.len() != grid.dim() {
                    return Err(Error::Config(format!(
                        "single-mode forcing needs component < {} and a {}-entry mode",
                        grid.dim(),
                        grid.dim()
                    )));
                }
                let mut k = [0i64; crate::grid::MAX_DIM];
                k[..mode.len()].copy_from_slice(mode);
                let mut f = FourierField::zeros(*grid, grid.dim());
                let s = (frequency * t).cos();
                f.set_real_mode(
                    *component,
                    &k,
                    num_complex::Complex64::new(coefficient.0 * s, coefficient.1 * s),
                );
                Ok(Some(f))
            }
            ForcingSpec::Field(f) => {
                grid.check_same(f.grid())?;
                f.ensure_components(grid.dim(), "forcing")?;
                Ok(Some(f.clone()))
            }
        }
    }
}

/// Stored samples `(t, u(t))` of a trajectory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, FourierField)>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, u: FourierField) {
        self.samples.push((t, u));
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|(t, _)| *t).collect()
    }

    /// Sample stored at time `t` (to within `tol`).
    pub fn at(&self, t: f64, tol: f64) -> Result<&FourierField> {
        let idx = self.samples.partition_point(|(s, _)| *s < t - tol);
        match self.samples.get(idx) {
            Some((s, u)) if (s - t).abs() <= tol => Ok(u),
            _ => Err(Error::Trajectory(format!("no trajectory sample at t = {t}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowUpInfo {
    pub time: f64,
    pub step_index: u64,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    /// Final state, or the last finite state when the run blew up.
    pub final_state: SimulationState,
    pub steps_taken: u64,
    pub peak_l2: f64,
    pub peak_h1: f64,
    /// Largest relative divergence observed (`a = 1` only).
    pub max_divergence: f64,
    /// `‖u₀ − P u₀‖` removed from the initial data when `a = 1`.
    pub projection_correction: f64,
    pub blow_up: Option<BlowUpInfo>,
}

fn phi1(z: f64) -> f64 {
    if z.abs() < 0.1 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..16 {
            term *= z / (j as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        z.exp_m1() / z
    }
}

fn phi2(z: f64) -> f64 {
    if z.abs() < 0.1 {
        let mut term = 0.5;
        let mut sum = 0.5;
        for j in 1..16 {
            term *= z / (j as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// What replaces `D u` in the explicit part.
enum Explicit<'a> {
    Nonlinear,
    Linearized { w_now: &'a FourierField, w_next: &'a FourierField },
}

/// Precomputed stepping operators for one grid and configuration.
pub struct Integrator {
    grid: TorusGrid,
    config: SimConfig,
    op: NonlinearOperator,
    decay: Vec<f64>,
    phi1_dt: Vec<f64>,
    phi2_dt: Vec<f64>,
}

impl Integrator {
    pub fn new(grid: TorusGrid, config: SimConfig, spec: NonlinearitySpec) -> Result<Self> {
        config.validate()?;
        spec.validate(grid.dim())?;
        let s2 = grid.wavenumber_scale().powi(2);
        let dt = config.dt;
        let (mut decay, mut phi1_dt, mut phi2_dt) = (Vec::new(), Vec::new(), Vec::new());
        for k in grid.modes() {
            let lambda = if grid.is_nyquist(&k) { 0.0 } else { -config.mu * s2 * grid.norm_sq(&k) as f64 };
            let z = lambda * dt;
            decay.push(z.exp());
            phi1_dt.push(dt * phi1(z));
            phi2_dt.push(dt * phi2(z));
        }
        let op = NonlinearOperator::with_dealias(spec, config.dealias);
        Ok(Self { grid, config, op, decay, phi1_dt, phi2_dt })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn operator(&self) -> &NonlinearOperator {
        &self.op
    }

    fn diag_apply(&self, weights: &[f64], u: &FourierField) -> FourierField {
        let len = self.grid.len();
        let mut out = u.clone();
        for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c *= weights[i % len];
        }
        out
    }

    fn project_a(&self, u: FourierField) -> Result<FourierField> {
        if self.config.projected() {
            leray_project(&u)
        } else {
            Ok(u)
        }
    }

    /// `f(t) − D u` (or `f(t) − B(w, u)`), before projection.
    fn residual_force(&self, u: &FourierField, w: Option<&FourierField>, t: f64, f: &dyn Forcing) -> Result<FourierField> {
        let nonlinear = match w {
            None => self.op.d(u)?,
            Some(w) => self.op.b(w, u)?,
        };
        let mut out = -&nonlinear;
        if let Some(force) = f.at(&self.grid, t)? {
            out += &force;
        }
        Ok(out)
    }

    fn g(&self, u: &FourierField, w: Option<&FourierField>, t: f64, f: &dyn Forcing) -> Result<FourierField> {
        self.project_a(self.residual_force(u, w, t, f)?)
    }

    fn advance(&self, state: &SimulationState, explicit: Explicit<'_>, f: &dyn Forcing) -> Result<SimulationState> {
        let u = &state.u;
        let next_index = state.step_index + 1;
        let t_next = self.config.time_of(next_index);
        let (w_now, w_next) = match explicit {
            Explicit::Nonlinear => (None, None),
            Explicit::Linearized { w_now, w_next } => (Some(w_now), Some(w_next)),
        };
        let g0 = self.g(u, w_now, state.t, f)?;
        let new_u = match self.config.scheme {
            Scheme::ImexEuler => {
                let mut v = u.clone();
                v.axpy(self.config.dt, &g0);
                self.diag_apply(&self.decay, &v)
            }
            Scheme::Etdrk2 => {
                let mut a = self.diag_apply(&self.decay, u);
                a += &self.diag_apply(&self.phi1_dt, &g0);
                let g1 = self.g(&a, w_next, t_next, f)?;
                let corr = &g1 - &g0;
                a += &self.diag_apply(&self.phi2_dt, &corr);
                a
            }
        };

        if !new_u.is_finite()
            || (linf_upper_bound(&new_u) > BLOWUP_THRESHOLD && linf_norm(&new_u) > BLOWUP_THRESHOLD)
        {
            return Err(Error::BlowUp { time: t_next, last_good: Box::new(state.clone()) });
        }

        let p = if self.config.projected() {
            let force = self.residual_force(&new_u, w_next, t_next, f)?;
            let gradient_part = &force - &leray_project(&force)?;
            Some(pressure_from_gradient(&gradient_part)?)
        } else {
            None
        };
        Ok(SimulationState { t: t_next, step_index: next_index, u: new_u, p })
    }

    /// Advance the nonlinear system by one `dt`.
    pub fn step(&self, state: &SimulationState, f: &dyn Forcing) -> Result<SimulationState> {
        self.advance(state, Explicit::Nonlinear, f)
    }

    /// Advance the linearized system about `w` by one `dt`; `w` must hold
    /// samples at the current and next step times.
    pub fn step_linearized(&self, state: &SimulationState, w: &Trajectory, f: &dyn Forcing) -> Result<SimulationState> {
        let tol = 1e-9 * self.config.dt;
        let w_now = w.at(state.t, tol)?;
        let w_next = w.at(self.config.time_of(state.step_index + 1), tol)?;
        self.grid.check_same(w_now.grid())?;
        self.advance(state, Explicit::Linearized { w_now, w_next }, f)
    }

    /// Relative divergence `max|div u| / RMS|∇u|`.
    pub fn relative_divergence(&self, u: &FourierField) -> Result<f64> {
        let scale = derivative_norm(u, 1) / self.grid.volume().sqrt();
        Ok(max_abs_divergence(u)? / scale.max(ABS_FLOOR))
    }

    /// Initial state at `t = 0`; projects the data when `a = 1` and returns
    /// the size of the removed part.
    pub fn initial_state(&self, u0: &FourierField) -> Result<(SimulationState, f64)> {
        self.grid.check_same(u0.grid())?;
        u0.ensure_components(self.grid.dim(), "initial data")?;
        let (u, correction) = if self.config.projected() {
            let pu = leray_project(u0)?;
            let c = (u0 - &pu).coeff_norm();
            if c > ABS_FLOOR {
                log::info!("initial data projected onto divergence-free fields; correction {c:.3e}");
            }
            (pu, c)
        } else {
            (u0.clone(), 0.0)
        };
        Ok((SimulationState { t: 0.0, step_index: 0, u, p: None }, correction))
    }

    /// Step from `u0` to `T`, calling `sink` on the initial state, every
    /// `diag_every` steps, and on the final state.
    pub fn run(
        &self,
        u0: &FourierField,
        f: &dyn Forcing,
        sink: &mut dyn FnMut(&SimulationState) -> Result<()>,
    ) -> Result<RunSummary> {
        let (state, correction) = self.initial_state(u0)?;
        sink(&state)?;
        let mut summary = self.run_from(state, f, sink)?;
        summary.projection_correction = correction;
        Ok(summary)
    }

    /// Continue from an existing state (e.g. a resumed snapshot) to `T`.
    /// `sink` is not called on the starting state.
    pub fn run_from(
        &self,
        start: SimulationState,
        f: &dyn Forcing,
        sink: &mut dyn FnMut(&SimulationState) -> Result<()>,
    ) -> Result<RunSummary> {
        let total = self
            .config
            .step_count()
            .ok_or_else(|| Error::Config("T is not an integer multiple of dt".into()))?;
        let mut summary = RunSummary {
            peak_l2: l2_norm(&start.u),
            peak_h1: sobolev_norm(&start.u, 1.0),
            final_state: start,
            steps_taken: 0,
            max_divergence: 0.0,
            projection_correction: 0.0,
            blow_up: None,
        };
        while summary.final_state.step_index < total {
            let next = match self.step(&summary.final_state, f) {
                Ok(s) => s,
                Err(Error::BlowUp { time, last_good }) => {
                    log::warn!("blow-up detected at t = {time}");
                    summary.blow_up = Some(BlowUpInfo { time, step_index: last_good.step_index + 1 });
                    summary.final_state = *last_good;
                    return Ok(summary);
                }
                Err(e) => return Err(e),
            };
            if self.config.projected() {
                let div = self.relative_divergence(&next.u)?;
                summary.max_divergence = summary.max_divergence.max(div);
                if div > self.config.tol_div {
                    return Err(Error::Invariant(format!(
                        "relative divergence {div:.3e} exceeds {:.1e} at t = {}",
                        self.config.tol_div, next.t
                    )));
                }
            }
            summary.peak_l2 = summary.peak_l2.max(l2_norm(&next.u));
            summary.peak_h1 = summary.peak_h1.max(sobolev_norm(&next.u, 1.0));
            summary.steps_taken += 1;
            if next.step_index % self.config.diag_every == 0 || next.step_index == total {
                sink(&next)?;
            }
            summary.final_state = next;
        }
        Ok(summary)
    }

    /// Evolve `h0` under the linearization about the sampled trajectory `w`.
    pub fn run_linearized(&self, h0: &FourierField, w: &Trajectory, f: &dyn Forcing) -> Result<SimulationState> {
        let total = self
            .config
            .step_count()
            .ok_or_else(|| Error::Config("T is not an integer multiple of dt".into()))?;
        let (mut state, _) = self.initial_state(h0)?;
        while state.step_index < total {
            state = self.step_linearized(&state, w, f)?;
        }
        Ok(state)
    }
}

/// Run the nonlinear system and keep the samples the sink would see
/// (every `diag_every` steps plus the endpoints).
pub fn record_trajectory(integrator: &Integrator, u0: &FourierField, f: &dyn Forcing) -> Result<(RunSummary, Trajectory)> {
    let mut traj = Trajectory::new();
    let summary = integrator.run(u0, f, &mut |s| {
        traj.push(s.t, s.u.clone());
        Ok(())
    })?;
    Ok((summary, traj))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::random::random_field;

    fn cfg(a: u8, scheme: Scheme, dt: f64, t_final: f64) -> SimConfig {
        SimConfig { mu: 0.1, a, t_final, dt, scheme, diag_every: 1, ..SimConfig::default() }
    }

    #[test]
    fn phi_functions_are_continuous_across_series_switch() {
        for z in [-0.1f64 + 1e-12, -0.1 - 1e-12, 0.1 - 1e-12] {
            let direct1 = z.exp_m1() / z;
            let direct2 = (z.exp_m1() - z) / (z * z);
            assert!((phi1(z) - direct1).abs() < 1e-14);
            assert!((phi2(z) - direct2).abs() < 1e-13);
        }
        assert_eq!(phi1(0.0), 1.0);
        assert_eq!(phi2(0.0), 0.5);
    }

    #[test]
    fn config_validation_collects_everything() {
        let bad = SimConfig { mu: -1.0, a: 2, t_final: 1.0, dt: 0.3, diag_every: 0, ..SimConfig::default() };
        let v = bad.violations();
        assert!(v.iter().any(|m| m == "a must be 0 or 1"));
        assert_eq!(v.len(), 4, "{v:?}");
        assert_eq!(SimConfig { t_final: 1.0, dt: 0.25, ..SimConfig::default() }.step_count(), Some(4));
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let g = TorusGrid::new(2, 2.0 * PI, 16).unwrap();
        let integ = Integrator::new(g, cfg(1, Scheme::Etdrk2, 0.1, 1.0), NonlinearitySpec::Advection).unwrap();
        let s = integ.run(&FourierField::zeros(g, 2), &ForcingSpec::Zero, &mut |_| Ok(())).unwrap();
        assert_eq!(s.final_state.u.coeff_norm(), 0.0);
        assert_eq!(s.steps_taken, 10);
    }

    #[test]
    fn exact_viscous_decay_of_single_mode() {
        let g = TorusGrid::new(3, 2.0, 8).unwrap();
        for scheme in [Scheme::ImexEuler, Scheme::Etdrk2] {
            let c = cfg(0, scheme, 0.01, 0.5);
            let integ = Integrator::new(g, c.clone(), NonlinearitySpec::Zero).unwrap();
            let k = [1, -2, 1, 0];
            let mut u0 = FourierField::zeros(g, 3);
            u0.set_real_mode(1, &k, Complex64::new(0.7, -0.2));
            let s = integ.run(&u0, &ForcingSpec::Zero, &mut |_| Ok(())).unwrap();
            let rate = c.mu * g.wavenumber_scale().powi(2) * 6.0;
            let expect = u0.scaled((-rate * 0.5).exp());
            let err = (&s.final_state.u - &expect).coeff_norm() / expect.coeff_norm();
            assert!(err < 1e-12, "{scheme:?}: {err}");
        }
    }

    #[test]
    fn exact_step_count() {
        let g = TorusGrid::new(2, 1.0, 8).unwrap();
        let integ = Integrator::new(g, cfg(0, Scheme::ImexEuler, 0.125, 1.0), NonlinearitySpec::Zero).unwrap();
        let mut seen = Vec::new();
        let s = integ
            .run(&FourierField::zeros(g, 2), &ForcingSpec::Zero, &mut |st| {
                seen.push(st.step_index);
                Ok(())
            })
            .unwrap();
        assert_eq!(s.steps_taken, 8);
        assert_eq!(seen, (0..=8).collect::<Vec<_>>());
        assert_eq!(s.final_state.t, 1.0);
    }

    #[test]
    fn projected_run_keeps_divergence_small_and_records_pressure() {
        let g = TorusGrid::new(2, 2.0 * PI, 16).unwrap();
        let integ = Integrator::new(g, cfg(1, Scheme::Etdrk2, 0.01, 0.2), NonlinearitySpec::Advection).unwrap();
        let u0 = random_field(&g, 2, 1.0, 3);
        let s = integ.run(&u0, &ForcingSpec::Zero, &mut |_| Ok(())).unwrap();
        assert!(s.projection_correction > 0.0);
        assert!(s.max_divergence < 1e-9);
        assert!(s.final_state.p.is_some());
    }

    #[test]
    fn linearized_about_zero_is_stokes_flow() {
        let g = TorusGrid::new(2, 2.0 * PI, 16).unwrap();
        let c = cfg(1, Scheme::Etdrk2, 0.05, 0.5);
        let integ = Integrator::new(g, c.clone(), NonlinearitySpec::Svplechac { b: 0.5 }).unwrap();
        let stokes = Integrator::new(g, c.clone(), NonlinearitySpec::Zero).unwrap();
        let mut w = Trajectory::new();
        for i in 0..=10 {
            w.push(c.time_of(i), FourierField::zeros(g, 2));
        }
        let h0 = random_field(&g, 2, 1.0, 4);
        let lin = integ.run_linearized(&h0, &w, &ForcingSpec::Zero).unwrap();
        let st = stokes.run(&h0, &ForcingSpec::Zero, &mut |_| Ok(())).unwrap();
        assert!((&lin.u - &st.final_state.u).coeff_norm() < 1e-14);
    }

    #[test]
    fn linearized_rejects_misaligned_trajectory() {
        let g = TorusGrid::new(2, 2.0 * PI, 8).unwrap();
        let c = cfg(0, Scheme::ImexEuler, 0.1, 0.5);
        let integ = Integrator::new(g, c, NonlinearitySpec::Advection).unwrap();
        let mut w = Trajectory::new();
        w.push(0.0, FourierField::zeros(g, 2));
        w.push(0.15, FourierField::zeros(g, 2));
        let h0 = random_field(&g, 2, 1.0, 4);
        assert!(matches!(
            integ.run_linearized(&h0, &w, &ForcingSpec::Zero),
            Err(Error::Trajectory(_))
        ));
    }

    #[test]
    fn linearized_flow_superposition() {
        let g = TorusGrid::new(2, 2.0 * PI, 16).unwrap();
        let c = cfg(0, Scheme::Etdrk2, 0.01, 0.1);
        let integ = Integrator::new(g, c, NonlinearitySpec::Svplechac { b: 0.3 }).unwrap();
        let (_, w) = record_trajectory(&integ, &random_field(&g, 2, 0.5, 1), &ForcingSpec::Zero).unwrap();
        let (a, b) = (random_field(&g, 2, 1.0, 2), random_field(&g, 2, 1.0, 3));
        let (alpha, beta) = (0.7, -1.3);
        let mut combo = a.scaled(alpha);
        combo.axpy(beta, &b);
        let ea = integ.run_linearized(&a, &w, &ForcingSpec::Zero).unwrap().u;
        let eb = integ.run_linearized(&b, &w, &ForcingSpec::Zero).unwrap().u;
        let ec = integ.run_linearized(&combo, &w, &ForcingSpec::Zero).unwrap().u;
        let mut expect = ea.scaled(alpha);
        expect.axpy(beta, &eb);
        assert!((&ec - &expect).coeff_norm() < 1e-13 * expect.coeff_norm());
    }

    #[test]
    fn blow_up_is_reported_with_finite_state() {
        let g = TorusGrid::new(2, 2.0 * PI, 16).unwrap();
        let c = SimConfig { mu: 0.01, a: 0, t_final: 50.0, dt: 0.5, scheme: Scheme::ImexEuler, ..SimConfig::default() };
        let integ = Integrator::new(g, c, NonlinearitySpec::Advection).unwrap();
        let s = integ.run(&random_field(&g, 2, 20.0, 5), &ForcingSpec::Zero, &mut |_| Ok(())).unwrap();
        let info = s.blow_up.expect("expected blow-up");
        assert!(info.time > 0.0);
        assert!(s.final_state.u.is_finite());
    }

    #[test]
    fn single_mode_forcing_is_real() {
        let g = TorusGrid::new(2, 1.0, 8).unwrap();
        let f = ForcingSpec::SingleMode { component: 1, mode: vec![1, 2], coefficient: (0.5, 0.25), frequency: 2.0 };
        let v = f.at(&g, 0.3).unwrap().unwrap();
        assert!(v.hermitian_defect() < 1e-16);
        let bad = ForcingSpec::SingleMode { component: 2, mode: vec![1, 2], coefficient: (0.5, 0.0), frequency: 0.0 };
        assert!(bad.at(&g, 0.0).is_err());
    }
}
