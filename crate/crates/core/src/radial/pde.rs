//! Method-of-lines solver for `v_t = v_rr + ((n+1)/r) v_r + (n+2)v² + 3r v v_r`.

use crate::error::{Error, Result};
use crate::integrator::BLOWUP_THRESHOLD;

pub const MIN_INTERVALS: usize = 8;

/// `v` sampled on `r_i = i R / M`, `i = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialState {
    pub n: usize,
    pub r_max: f64,
    pub v: Vec<f64>,
    pub t: f64,
}

impl RadialState {
    pub fn from_fn(n: usize, r_max: f64, intervals: usize, t: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = r_max / intervals as f64;
        let s = Self { n, r_max, v: (0..=intervals).map(|i| f(i as f64 * h)).collect(), t };
        s.validate()?;
        Ok(s)
    }

    pub fn intervals(&self) -> usize {
        self.v.len().saturating_sub(1)
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.intervals() as f64
    }

    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidArgument(format!("radial dimension must be >= 3, got {}", self.n)));
        }
        if !(self.r_max > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {}", self.r_max)));
        }
        if self.intervals() < MIN_INTERVALS {
            return Err(Error::InvalidArgument(format!(
                "radial grid too coarse: {} intervals, need at least {MIN_INTERVALS}",
                self.intervals()
            )));
        }
        if self.v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("radial profile has non-finite values".into()));
        }
        Ok(())
    }
}

fn rhs_into(n: usize, h: f64, v: &[f64], out: &mut [f64]) {
    let m = v.len() - 1;
    let nf = n as f64;
    let h2 = h * h;
    // Even extension: v_{-1} = v_1, and (n+1)v_r/r → (n+1)v_rr.
    out[0] = (nf + 2.0) * 2.0 * (v[1] - v[0]) / h2 + (nf + 2.0) * v[0] * v[0];
    for i in 1..m {
        let r = i as f64 * h;
        let vr = (v[i + 1] - v[i - 1]) / (2.0 * h);
        let vrr = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
        out[i] = vrr + (nf + 1.0) / r * vr + (nf + 2.0) * v[i] * v[i] + 3.0 * r * v[i] * vr;
    }
    let r = m as f64 * h;
    let vr = (3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) / (2.0 * h);
    let vrr = (2.0 * v[m] - 5.0 * v[m - 1] + 4.0 * v[m - 2] - v[m - 3]) / h2;
    out[m] = vrr + (nf + 1.0) / r * vr + (nf + 2.0) * v[m] * v[m] + 3.0 * r * v[m] * vr;
}

/// Semi-discrete right-hand side at every grid point (one-sided stencils at `R`).
pub fn radial_rhs(state: &RadialState) -> Result<Vec<f64>> {
    state.validate()?;
    let mut out = vec![0.0; state.v.len()];
    rhs_into(state.n, state.spacing(), &state.v, &mut out);
    Ok(out)
}

/// Largest RK4 step accepted for spacing `h`. The discrete operator has
/// spectral radius close to `(2n+5)/h²` because of the origin row, so the
/// plain `h²/4` rule is not enough once `n ≥ 5`.
pub fn stable_dt(n: usize, h: f64) -> f64 {
    (h * h / 4.0).min(h * h / (n as f64 + 3.0))
}

/// Boundary value at `r = R`.
pub enum FarField {
    Homogeneous,
    Dirichlet(Box<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl FarField {
    fn value(&self, t: f64) -> f64 {
        match self {
            FarField::Homogeneous => 0.0,
            FarField::Dirichlet(g) => g(t),
        }
    }
}

impl std::fmt::Debug for FarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FarField::Homogeneous => write!(f, "Homogeneous"),
            FarField::Dirichlet(_) => write!(f, "Dirichlet(..)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialRun {
    /// States every `sample_every` steps, first and last included.
    pub samples: Vec<RadialState>,
    /// Time at which `max|v|` exceeded the blow-up threshold.
    pub blow_up: Option<f64>,
}

impl RadialRun {
    pub fn last(&self) -> &RadialState {
        self.samples.last().expect("run has at least the initial sample")
    }
}

pub fn radial_run(
    initial: &RadialState,
    dt: f64,
    t_final: f64,
    boundary: &FarField,
    sample_every: usize,
) -> Result<RadialRun> {
    initial.validate()?;
    let h = initial.spacing();
    let limit = stable_dt(initial.n, h);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("dt = {dt} outside (0, {limit}] for spacing {h}")));
    }
    let steps = ((t_final - initial.t) / dt).round();
    if steps < 0.0 || ((initial.t + steps * dt) - t_final).abs() > 1e-9 * t_final.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "run length {} is not a multiple of dt = {dt}",
            t_final - initial.t
        )));
    }
    let steps = steps as u64;
    let every = sample_every.max(1) as u64;
    let (n, len, m) = (initial.n, initial.v.len(), initial.intervals());
    let mut state = initial.clone();
    state.v[m] = boundary.value(state.t);
    let mut samples = vec![state.clone()];
    let mut k = vec![vec![0.0; len]; 4];
    let mut stage = vec![0.0; len];
    for step in 1..=steps {
        let t0 = state.t;
        rhs_into(n, h, &state.v, &mut k[0]);
        for (s, c) in [(1usize, 0.5), (2, 0.5), (3, 1.0)] {
            for i in 0..len {
                stage[i] = state.v[i] + c * dt * k[s - 1][i];
            }
            stage[m] = boundary.value(t0 + c * dt);
            rhs_into(n, h, &stage, &mut k[s]);
        }
        for i in 0..m {
            state.v[i] += dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        state.t = initial.t + step as f64 * dt;
        state.v[m] = boundary.value(state.t);
        let peak = state.v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if !(peak <= BLOWUP_THRESHOLD) {
            log::warn!("radial profile blew up at t = {}", state.t);
            return Ok(RadialRun { samples, blow_up: Some(state.t) });
        }
        if step % every == 0 || step == steps {
            samples.push(state.clone());
        }
    }
    Ok(RadialRun { samples, blow_up: None })
}
