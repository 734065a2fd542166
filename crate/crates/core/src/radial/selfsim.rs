use ode_solvers::{Dopri5, OutputType, System, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values of `|w|` beyond this count as blow-up of the profile.
pub const PROFILE_BLOWUP: f64 = 1e8;

/// `w″ + ((n+1)/y)w′ − κyw′ + (n+2)w² + 3yww′ − mκw = 0`, `w(0) = γ`, `w′(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfSimProblem {
    pub n: usize,
    pub kappa: f64,
    pub gamma: f64,
    pub multiplier: u8,
    pub y_max: f64,
}

impl SelfSimProblem {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.n < 3 {
            bad.push(format!("n = {} (need n >= 3)", self.n));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            bad.push(format!("kappa = {} (need > 0)", self.kappa));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            bad.push(format!("gamma = {} (need >= 0)", self.gamma));
        }
        if !matches!(self.multiplier, 1 | 2) {
            bad.push(format!("multiplier = {} (need 1 or 2)", self.multiplier));
        }
        if !(self.y_max > 0.0) || !self.y_max.is_finite() {
            bad.push(format!("y_max = {} (need > 0)", self.y_max));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(bad.join("; ")))
        }
    }

    /// `w″` from the equation at `y > 0`.
    pub fn second_derivative(&self, y: f64, w: f64, wp: f64) -> f64 {
        let (n, k, m) = (self.n as f64, self.kappa, self.multiplier as f64);
        -(n + 1.0) / y * wp + k * y * wp - (n + 2.0) * w * w - 3.0 * y * w * wp + m * k * w
    }

    /// Offset of the series start.
    pub fn start_offset(&self) -> f64 {
        1e-4 / self.kappa.sqrt().max(1.0)
    }
}

/// `w″(0) = (mκγ − (n+2)γ²)/(n+2)`.
pub fn series_second_derivative(p: &SelfSimProblem) -> f64 {
    let n2 = p.n as f64 + 2.0;
    (p.multiplier as f64 * p.kappa * p.gamma - n2 * p.gamma * p.gamma) / n2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest step; keeps the stored samples dense enough for interpolation.
    pub h_max: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, h_max: 0.01 }
    }
}

/// Integrated profile: accepted steps plus a quintic Hermite interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimProfile {
    pub problem: SelfSimProblem,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub wp: Vec<f64>,
    /// Location where `|w|` left the representable range, if it did.
    pub blow_up: Option<f64>,
}

struct Rhs {
    p: SelfSimProblem,
}

impl System<f64, Vector2<f64>> for Rhs {
    fn system(&self, y: f64, s: &Vector2<f64>, ds: &mut Vector2<f64>) {
        ds[0] = s[1];
        ds[1] = self.p.second_derivative(y, s[0], s[1]);
    }

    fn solout(&mut self, _y: f64, s: &Vector2<f64>, _ds: &Vector2<f64>) -> bool {
        !(s[0].abs() <= PROFILE_BLOWUP)
    }
}

pub fn selfsim_ode_integrate(p: &SelfSimProblem, opts: &OdeOptions) -> Result<SelfSimProfile> {
    p.validate()?;
    let y0 = p.start_offset();
    let w2 = series_second_derivative(p);
    let mut profile = SelfSimProfile { problem: *p, y: vec![0.0], w: vec![p.gamma], wp: vec![0.0], blow_up: None };
    if p.gamma == 0.0 {
        // w ≡ 0 is the solution; store the endpoints only.
        profile.y.push(p.y_max);
        profile.w.push(0.0);
        profile.wp.push(0.0);
        return Ok(profile);
    }
    if p.y_max <= y0 {
        return Err(Error::InvalidArgument(format!("y_max = {} inside the series start {y0}", p.y_max)));
    }
    let start = Vector2::new(p.gamma + 0.5 * w2 * y0 * y0, w2 * y0);
    let mut solver = Dopri5::from_param(
        Rhs { p: *p },
        y0,
        p.y_max,
        p.y_max,
        start,
        opts.rtol,
        opts.atol,
        0.9,
        0.04,
        0.2,
        10.0,
        opts.h_max.min(p.y_max),
        0.0,
        u32::MAX,
        u32::MAX,
        OutputType::Sparse,
    );
    let outcome = solver.integrate();
    for (y, s) in solver.x_out().iter().zip(solver.y_out()) {
        profile.y.push(*y);
        profile.w.push(s[0]);
        profile.wp.push(s[1]);
    }
    let last_y = *profile.y.last().unwrap_or(&y0);
    match outcome {
        Ok(_) if last_y < p.y_max * (1.0 - 1e-12) => profile.blow_up = Some(last_y),
        Ok(_) => {}
        Err(ode_solvers::dop_shared::IntegrationError::StepSizeUnderflow { x })
        | Err(ode_solvers::dop_shared::IntegrationError::StiffnessDetected { x }) => profile.blow_up = Some(x),
        Err(e) => return Err(Error::Invariant(format!("profile integration failed: {e}"))),
    }
    if profile.blow_up.is_some() {
        // Drop non-finite tail values.
        while profile.w.last().is_some_and(|w| !w.is_finite() || !profile.wp.last().unwrap().is_finite()) {
            profile.y.pop();
            profile.w.pop();
            profile.wp.pop();
        }
    }
    Ok(profile)
}

impl SelfSimProfile {
    /// Largest `y` at which the profile can be evaluated.
    pub fn valid_until(&self) -> f64 {
        *self.y.last().unwrap_or(&0.0)
    }

    fn w2(&self, i: usize) -> f64 {
        if self.y[i] == 0.0 {
            series_second_derivative(&self.problem)
        } else {
            self.problem.second_derivative(self.y[i], self.w[i], self.wp[i])
        }
    }

    /// `(w(y), w′(y))`; `None` outside `[0, valid_until]`.
    pub fn eval(&self, y: f64) -> Option<(f64, f64)> {
        if !(y >= 0.0) || y > self.valid_until() {
            return None;
        }
        if self.problem.gamma == 0.0 {
            return Some((0.0, 0.0));
        }
        if y <= self.y[1] {
            let w2 = series_second_derivative(&self.problem);
            return Some((self.problem.gamma + 0.5 * w2 * y * y, w2 * y));
        }
        let i = self.y.partition_point(|s| *s < y).clamp(1, self.y.len() - 1) - 1;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let h = y1 - y0;
        let s = (y - y0) / h;
        let (p0, d0, a0) = (self.w[i], self.wp[i] * h, self.w2(i) * h * h);
        let (p1, d1, a1) = (self.w[i + 1], self.wp[i + 1] * h, self.w2(i + 1) * h * h);
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s2);
        let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
        let h3 = 0.5 * (s3 - 2.0 * s4 + s5);
        let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let w = h0 * p0 + h1 * d0 + h2 * a0 + h3 * a1 + h4 * d1 + h5 * p1;
        let dh0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let dh1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let dh2 = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4);
        let dh3 = 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4);
        let dh4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let dh5 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
        let wp = (dh0 * p0 + dh1 * d0 + dh2 * a0 + dh3 * a1 + dh4 * d1 + dh5 * p1) / h;
        Some((w, wp))
    }

    /// `y² w(y) − 1` at the end of the profile.
    pub fn farfield_mismatch(&self) -> f64 {
        let y = self.valid_until();
        y * y * self.w.last().copied().unwrap_or(0.0) - 1.0
    }

    /// `y w′/w` at the end of the profile (`−2` for `y⁻²` decay).
    pub fn log_derivative(&self) -> f64 {
        let i = self.y.len() - 1;
        if self.w[i] == 0.0 {
            return f64::NAN;
        }
        self.y[i] * self.wp[i] / self.w[i]
    }

    /// `sup |w|` over `[0, y_hi]`.
    pub fn sup_abs(&self, y_hi: f64) -> f64 {
        self.y
            .iter()
            .zip(&self.w)
            .filter(|(y, _)| **y <= y_hi)
            .map(|(_, w)| w.abs())
            .fold(0.0, f64::max)
    }
}
