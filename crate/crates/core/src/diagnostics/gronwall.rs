//! Gronwall–Perov bounds for `F(t) ≤ 𝔄 + ∫ (𝔅F + ℭF^γ)`.

use crate::error::{Error, Result};

use super::quadrature::adaptive_simpson;

const QUAD_TOL: f64 = 1e-13;

/// Nonnegative coefficient function: constant or piecewise-linear samples
/// (held constant outside the sampled range).
#[derive(Debug, Clone, PartialEq)]
pub enum SampledFn {
    Constant(f64),
    Table { t: Vec<f64>, v: Vec<f64> },
}

impl SampledFn {
    fn validate(&self, name: &str) -> Result<()> {
        match self {
            SampledFn::Constant(c) if !(*c >= 0.0) || !c.is_finite() => {
                Err(Error::InvalidArgument(format!("{name} must be nonnegative, got {c}")))
            }
            SampledFn::Constant(_) => Ok(()),
            SampledFn::Table { t, v } => {
                if t.is_empty() || t.len() != v.len() {
                    return Err(Error::InvalidArgument(format!("{name}: table needs matching nonempty t and v")));
                }
                if t.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidArgument(format!("{name}: sample times must increase")));
                }
                if let Some(x) = v.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
                    return Err(Error::InvalidArgument(format!("{name} must be nonnegative, got sample {x}")));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match self {
            SampledFn::Constant(c) => *c,
            SampledFn::Table { t, v } => {
                let i = t.partition_point(|x| *x <= s);
                if i == 0 {
                    v[0]
                } else if i == t.len() {
                    v[t.len() - 1]
                } else {
                    let w = (s - t[i - 1]) / (t[i] - t[i - 1]);
                    v[i - 1] + w * (v[i] - v[i - 1])
                }
            }
        }
    }

    /// Exact `∫_a^b` of the interpolant.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.integral(b, a);
        }
        match self {
            SampledFn::Constant(c) => c * (b - a),
            SampledFn::Table { .. } => {
                let pts = self.breakpoints(a, b);
                pts.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (self.value(w[0]) + self.value(w[1]))).sum()
            }
        }
    }

    /// `a`, every table node strictly inside `(a, b)`, and `b`.
    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        if let SampledFn::Table { t, .. } = self {
            pts.extend(t.iter().copied().filter(|x| *x > a && *x < b));
        }
        pts.push(b);
        pts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallInputs {
    pub a: f64,
    pub b: SampledFn,
    pub c: SampledFn,
    pub gamma0: f64,
    pub interval: (f64, f64),
    /// Horizon for `γ₀ > 1`; required there.
    pub h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundOutcome {
    Finite(f64),
    Infeasible(String),
}

impl BoundOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            BoundOutcome::Finite(v) => Some(*v),
            BoundOutcome::Infeasible(_) => None,
        }
    }
}

impl GronwallInputs {
    fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0) || !self.a.is_finite() {
            return Err(Error::InvalidArgument(format!("constant must be nonnegative, got {}", self.a)));
        }
        if !(self.gamma0 > 0.0) {
            return Err(Error::InvalidArgument(format!("exponent must be positive, got {}", self.gamma0)));
        }
        let (a0, b0) = self.interval;
        if !(a0 < b0) {
            return Err(Error::InvalidArgument(format!("empty interval [{a0}, {b0}]")));
        }
        self.b.validate("B")?;
        self.c.validate("C")?;
        if self.gamma0 > 1.0 {
            match self.h {
                Some(h) if h > 0.0 && h <= b0 - a0 => {}
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "exponent > 1 needs a horizon in (0, {}], got {other:?}",
                        b0 - a0
                    )))
                }
            }
        }
        Ok(())
    }

    /// `∫_{a₀}^t C(τ) e^{κ ∫_τ^t B} dτ`, split at table nodes.
    fn weighted_c(&self, t: f64, kappa: f64) -> f64 {
        let a0 = self.interval.0;
        let ib_t = self.b.integral(a0, t);
        let integrand = |tau: f64| self.c.value(tau) * (kappa * (ib_t - self.b.integral(a0, tau))).exp();
        let mut pts = self.c.breakpoints(a0, t);
        pts.extend(self.b.breakpoints(a0, t));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.windows(2).map(|w| adaptive_simpson(&integrand, w[0], w[1], QUAD_TOL)).sum()
    }
}

/// Whether the feasibility condition for `γ₀ > 1` holds on `[a₀, a₀ + h]`.
pub fn perov_condition_holds(g: &GronwallInputs) -> Result<bool> {
    g.validate()?;
    let gm1 = g.gamma0 - 1.0;
    if gm1 <= 0.0 {
        return Ok(true);
    }
    let (a0, h) = (g.interval.0, g.h.unwrap_or(0.0));
    let lhs = g.a * (gm1 * g.c.integral(a0, a0 + h)).powf(1.0 / gm1);
    let rhs = (-gm1 * g.b.integral(a0, a0 + h)).exp().powf(1.0 / gm1);
    Ok(lhs < rhs)
}

/// Bound on `F(t)` from whichever branch `γ₀` selects.
pub fn gronwall_perov_bound(g: &GronwallInputs, t: f64) -> Result<BoundOutcome> {
    g.validate()?;
    let (a0, b0) = g.interval;
    let gamma = g.gamma0;
    let upper = if gamma > 1.0 { a0 + g.h.unwrap_or(0.0) } else { b0 };
    if !(t >= a0 && t <= upper) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [{a0}, {upper}]")));
    }
    let ib = g.b.integral(a0, t);
    if gamma == 1.0 {
        return Ok(BoundOutcome::Finite(g.a * (ib + g.c.integral(a0, t)).exp()));
    }
    let k = 1.0 - gamma;
    if gamma < 1.0 {
        let inner = g.a.powf(k) * (k * ib).exp() + k * g.weighted_c(t, k);
        return Ok(BoundOutcome::Finite(inner.powf(1.0 / k)));
    }
    if !perov_condition_holds(g)? {
        return Ok(BoundOutcome::Infeasible("feasibility condition fails on the horizon".into()));
    }
    let bracket = (k * ib).exp() - g.a.powf(-k) * (-k) * g.weighted_c(t, k);
    if !(bracket > 0.0) {
        return Ok(BoundOutcome::Infeasible(format!("bracket {bracket:e} is not positive")));
    }
    Ok(BoundOutcome::Finite(g.a * bracket.powf(1.0 / k)))
}

fn check_large(a: f64, b: f64, delta: f64, mu: f64, t_final: f64, dim: usize) -> Result<()> {
    if !(delta > 0.0 && delta * (dim as f64) < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1/{dim}), got {delta}")));
    }
    if !(a >= 0.0 && b >= 0.0 && mu > 0.0 && t_final > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need A, B >= 0 and mu, T > 0; got A={a}, B={b}, mu={mu}, T={t_final}"
        )));
    }
    Ok(())
}

/// `T^{1/δ}(A+1)/(μ ln(1/δ))^{1/δ} < e^{−TB}`, compared in the log domain.
pub fn gron_large_feasible(a: f64, b: f64, delta: f64, mu: f64, t_final: f64, dim: usize) -> Result<bool> {
    check_large(a, b, delta, mu, t_final, dim)?;
    let lhs = t_final.ln() / delta + (a + 1.0).ln() - (mu * (1.0 / delta).ln()).ln() / delta;
    Ok(lhs < -t_final * b)
}

/// `(A+1) (e^{−BTδ} − (A+1)^δ/(μ ln(1/δ)) ∫₀ᵗ e^{(τ−t)Bδ} dτ)^{−1/δ}`.
pub fn gron_large_bound(a: f64, b: f64, delta: f64, mu: f64, t_final: f64, t: f64, dim: usize) -> Result<BoundOutcome> {
    check_large(a, b, delta, mu, t_final, dim)?;
    if !(0.0..=t_final).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0, {t_final}]")));
    }
    if !gron_large_feasible(a, b, delta, mu, t_final, dim)? {
        return Ok(BoundOutcome::Infeasible("time-horizon feasibility condition fails".into()));
    }
    let rate = b * delta;
    let integral = if rate == 0.0 { t } else { -(-rate * t).exp_m1() / rate };
    let bracket = (-b * t_final * delta).exp() - (a + 1.0).powf(delta) / (mu * (1.0 / delta).ln()) * integral;
    if !(bracket > 0.0) {
        return Ok(BoundOutcome::Infeasible(format!("bracket {bracket:e} is not positive")));
    }
    Ok(BoundOutcome::Finite((a + 1.0) * bracket.powf(-1.0 / delta)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(a: f64, b: SampledFn, c: SampledFn, gamma0: f64, h: Option<f64>) -> GronwallInputs {
        GronwallInputs { a, b, c, gamma0, interval: (0.0, 2.0), h }
    }

    fn finite(o: BoundOutcome) -> f64 {
        o.value().expect("finite bound")
    }

    #[test]
    fn linear_branch() {
        let g = inputs(1.0, SampledFn::Constant(0.7), SampledFn::Constant(0.0), 1.0, None);
        for t in [0.0, 0.5, 2.0] {
            assert!((finite(gronwall_perov_bound(&g, t).unwrap()) - (0.7 * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn bernoulli_quadratic() {
        // F' = F², F(0) = A  →  F = A/(1 − At)
        let a = 0.8;
        let g = inputs(a, SampledFn::Constant(0.0), SampledFn::Constant(1.0), 2.0, Some(1.2));
        for t in [0.0, 0.3, 0.9, 1.2] {
            let got = finite(gronwall_perov_bound(&g, t).unwrap());
            assert!((got - a / (1.0 - a * t)).abs() < 1e-12 * got, "t={t}");
        }
        let too_long = inputs(a, SampledFn::Constant(0.0), SampledFn::Constant(1.0), 2.0, Some(1.3));
        assert!(matches!(gronwall_perov_bound(&too_long, 0.1).unwrap(), BoundOutcome::Infeasible(_)));
        assert!(gronwall_perov_bound(&g, 1.5).is_err());
    }

    #[test]
    fn square_root_growth() {
        // F' = √F, F(0) = 0  →  F = t²/4
        let g = inputs(0.0, SampledFn::Constant(0.0), SampledFn::Constant(1.0), 0.5, None);
        for t in [0.0, 0.5, 2.0] {
            assert!((finite(gronwall_perov_bound(&g, t).unwrap()) - t * t / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_inputs_rejected() {
        let g = inputs(-1.0, SampledFn::Constant(0.0), SampledFn::Constant(1.0), 0.5, None);
        assert!(matches!(gronwall_perov_bound(&g, 0.1), Err(Error::InvalidArgument(_))));
        let g = inputs(1.0, SampledFn::Table { t: vec![0.0, 1.0], v: vec![1.0, -1.0] }, SampledFn::Constant(1.0), 0.5, None);
        assert!(gronwall_perov_bound(&g, 0.1).is_err());
        let g = inputs(1.0, SampledFn::Constant(0.0), SampledFn::Constant(1.0), 1.5, None);
        assert!(gronwall_perov_bound(&g, 0.1).is_err());
    }

    #[test]
    fn monotone_in_t() {
        for gamma in [0.5, 1.0, 1.5] {
            let g = inputs(0.3, SampledFn::Constant(0.4), SampledFn::Constant(0.6), gamma, Some(1.0));
            let mut prev = 0.0;
            for i in 0..=50 {
                let v = finite(gronwall_perov_bound(&g, i as f64 / 50.0).unwrap());
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    /// Synthetic `F` solving the equality with tabulated `B`, `C` (RK4 on a fine grid).
    #[test]
    fn bound_dominates_equality_solution() {
        let tt: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let bv: Vec<f64> = tt.iter().map(|t| 0.5 + 0.3 * (3.0 * t).sin().abs()).collect();
        let cv: Vec<f64> = tt.iter().map(|t| 0.2 + t * t).collect();
        let (b, c) = (SampledFn::Table { t: tt.clone(), v: bv }, SampledFn::Table { t: tt, v: cv });
        for gamma in [0.5, 1.0, 1.3] {
            let g = GronwallInputs { a: 0.5, b: b.clone(), c: c.clone(), gamma0: gamma, interval: (0.0, 1.0), h: Some(1.0) };
            let rhs = |t: f64, f: f64| b.value(t) * f + c.value(t) * f.powf(gamma);
            let (mut t, mut f, dt) = (0.0, 0.5, 1e-4);
            while t < 1.0 - 1e-12 {
                let k1 = rhs(t, f);
                let k2 = rhs(t + dt / 2.0, f + dt / 2.0 * k1);
                let k3 = rhs(t + dt / 2.0, f + dt / 2.0 * k2);
                let k4 = rhs(t + dt, f + dt * k3);
                f += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += dt;
                if (t * 10.0).fract() < 1e-6 || (t * 10.0).fract() > 1.0 - 1e-6 {
                    let bound = finite(gronwall_perov_bound(&g, t.min(1.0)).unwrap());
                    assert!(bound >= f * (1.0 - 1e-9), "gamma {gamma} t {t}: {bound} < {f}");
                }
            }
        }
    }

    #[test]
    fn sampled_fn_integral() {
        let s = SampledFn::Table { t: vec![0.0, 1.0, 2.0], v: vec![0.0, 2.0, 2.0] };
        assert!((s.integral(0.0, 2.0) - 3.0).abs() < 1e-15);
        assert!((s.integral(0.5, 1.5) - 1.75).abs() < 1e-15);
        assert_eq!(s.value(5.0), 2.0);
    }

    #[test]
    fn large_bound_closed_forms() {
        let (a, b, mu, t_final) = (0.5, 0.4, 50.0, 0.5);
        let delta = 0.1;
        let at_zero = finite(gron_large_bound(a, b, delta, mu, t_final, 0.0, 3).unwrap());
        assert!((at_zero - (a + 1.0) * (b * t_final).exp()).abs() < 1e-12 * at_zero);
        let flat = finite(gron_large_bound(a, 0.0, delta, 1e300, t_final, 0.3, 3).unwrap());
        assert!((flat - (a + 1.0)).abs() < 1e-12);
        assert!(gron_large_bound(a, b, 0.34, mu, t_final, 0.0, 3).is_err());
        assert!(gron_large_bound(a, b, 0.0, mu, t_final, 0.0, 3).is_err());
    }
}
