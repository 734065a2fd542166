//! Cross-checks: self-similar profile → radial PDE → vector system.

use super::pde::RadialState;
use super::selfsim::SelfSimProfile;
use crate::error::{Error, Result};
use crate::nonlinearity::BilinearTensor;

/// Sample box in `(r, t)`; sample points are fixed, independent of the
/// finite-difference step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualBox {
    pub r_range: (f64, f64),
    pub t_range: (f64, f64),
    pub r_samples: usize,
    pub t_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport {
    /// `sup s²|R|` with `s = 2κ(T−t)`: the residual in profile units.
    pub scaled: f64,
    /// `sup |R|`.
    pub raw: f64,
    /// Time range actually sampled.
    pub t_range: (f64, f64),
    pub clipped: bool,
}

fn linspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let steps = count.max(2) - 1;
    (0..=steps).map(move |i| lo + (hi - lo) * i as f64 / steps as f64)
}

/// `v(r,t) = w(r/√s)/s`, `s = 2κ(T_blow − t)`.
fn selfsim_v(profile: &SelfSimProfile, t_blow: f64, r: f64, t: f64) -> Result<f64> {
    let s = 2.0 * profile.problem.kappa * (t_blow - t);
    let y = r / s.sqrt();
    profile
        .eval(y)
        .map(|(w, _)| w / s)
        .ok_or_else(|| Error::InvalidArgument(format!("profile not available at y = {y}")))
}

/// Residual of the radial equation for the self-similar `v` built from
/// `profile`, by centered differences with step `h` in `r` and `t`.
pub fn selfsim_consistency_residual(
    profile: &SelfSimProfile,
    t_blow: f64,
    bx: &ResidualBox,
    h: f64,
) -> Result<ConsistencyReport> {
    let (r_lo, r_hi) = bx.r_range;
    let (t_lo, mut t_hi) = bx.t_range;
    if !(h > 0.0 && r_lo > h && r_hi >= r_lo && t_hi >= t_lo) {
        return Err(Error::InvalidArgument(format!(
            "residual box r {:?}, t {:?} with step {h} is malformed",
            bx.r_range, bx.t_range
        )));
    }
    let kappa = profile.problem.kappa;
    let y_ok = profile.valid_until();
    // Largest t whose stencil stays inside the profile and before T_blow.
    let t_allowed = t_blow - ((r_hi + h) / y_ok).powi(2) / (2.0 * kappa) - h;
    let mut clipped = false;
    if t_hi > t_allowed {
        if t_allowed < t_lo {
            return Err(Error::InvalidArgument(format!(
                "sample box reaches the scaling singularity: need t <= {t_allowed}, box starts at {t_lo}"
            )));
        }
        log::warn!("residual box clipped from t <= {t_hi} to t <= {t_allowed} near the blow-up time");
        t_hi = t_allowed;
        clipped = true;
    }
    let n = profile.problem.n as f64;
    let (mut scaled, mut raw) = (0.0f64, 0.0f64);
    for t in linspace(t_lo, t_hi, bx.t_samples) {
        let s = 2.0 * kappa * (t_blow - t);
        for r in linspace(r_lo, r_hi, bx.r_samples) {
            let v = |rr: f64, tt: f64| selfsim_v(profile, t_blow, rr, tt);
            let (vm, v0, vp) = (v(r - h, t)?, v(r, t)?, v(r + h, t)?);
            let vt = (v(r, t + h)? - v(r, t - h)?) / (2.0 * h);
            let vr = (vp - vm) / (2.0 * h);
            let vrr = (vp - 2.0 * v0 + vm) / (h * h);
            let res = vt - (vrr + (n + 1.0) / r * vr + (n + 2.0) * v0 * v0 + 3.0 * r * v0 * vr);
            raw = raw.max(res.abs());
            scaled = scaled.max(s * s * res.abs());
        }
    }
    Ok(ConsistencyReport { scaled, raw, t_range: (t_lo, t_hi), clipped })
}

/// Four-point Lagrange interpolation of `v` at radius `r` (even extension at 0).
fn interpolate(state: &RadialState, r: f64) -> f64 {
    let h = state.spacing();
    let m = state.intervals() as i64;
    let at = |i: i64| state.v[i.unsigned_abs() as usize];
    let i0 = ((r / h).floor() as i64 - 1).clamp(-1, m - 3);
    let nodes: Vec<i64> = (i0..i0 + 4).collect();
    let mut acc = 0.0;
    for &a in &nodes {
        let mut basis = 1.0;
        for &b in &nodes {
            if a != b {
                basis *= (r - b as f64 * h) / ((a - b) as f64 * h);
            }
        }
        acc += basis * at(a);
    }
    acc
}

/// `u(x) = −v(|x|) x` at the given points of `ℝⁿ`.
pub fn radial_to_vector_field(state: &RadialState, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    state.validate()?;
    points
        .iter()
        .map(|x| {
            if x.len() != state.n {
                return Err(Error::Shape(format!("point has {} coordinates, expected {}", x.len(), state.n)));
            }
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            if r > state.r_max * (1.0 + 1e-12) {
                return Err(Error::InvalidArgument(format!("|x| = {r} outside [0, {}]", state.r_max)));
            }
            let v = interpolate(state, r);
            Ok(x.iter().map(|c| -v * c).collect())
        })
        .collect()
}

/// Tensor grid of `per_axis^n` points in `[−half, half]ⁿ`.
pub fn sample_box(n: usize, half: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = linspace(-half, half, per_axis).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |c| {
                    let mut q = p.clone();
                    q.push(*c);
                    q
                })
            })
            .collect();
    }
    out
}

/// `sup |u_t − Δu + M(u, ∇u)|` over `points × times` for
/// `u = −A v(|x|, t) x` built from the self-similar `v`, with the
/// Plecháč–Šverák nonlinearity at parameter `b`; derivatives by centered
/// differences of step `h`.
pub fn vector_system_residual(
    profile: &SelfSimProfile,
    t_blow: f64,
    amplitude: f64,
    b: f64,
    points: &[Vec<f64>],
    times: &[f64],
    h: f64,
) -> Result<f64> {
    let n = profile.problem.n;
    let tensor = BilinearTensor::svplechac(n, b);
    let u = |x: &[f64], t: f64| -> Result<Vec<f64>> {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let v = selfsim_v(profile, t_blow, r, t)?;
        Ok(x.iter().map(|c| -amplitude * v * c).collect())
    };
    let shifted = |x: &[f64], axis: usize, d: f64| {
        let mut y = x.to_vec();
        y[axis] += d;
        y
    };
    let mut sup = 0.0f64;
    let mut grad = vec![0.0; n * n];
    let mut nonlinear = vec![0.0; n];
    for &t in times {
        for x in points {
            if x.len() != n {
                return Err(Error::Shape(format!("point has {} coordinates, expected {n}", x.len())));
            }
            let u0 = u(x, t)?;
            let (up, um) = (u(x, t + h)?, u(x, t - h)?);
            let mut lap = vec![0.0; n];
            for k in 0..n {
                let plus = u(&shifted(x, k, h), t)?;
                let minus = u(&shifted(x, k, -h), t)?;
                for l in 0..n {
                    grad[k * n + l] = (plus[l] - minus[l]) / (2.0 * h);
                    lap[l] += (plus[l] - 2.0 * u0[l] + minus[l]) / (h * h);
                }
            }
            tensor.apply(&u0, &grad, &mut nonlinear);
            for i in 0..n {
                let res = (up[i] - um[i]) / (2.0 * h) - lap[i] + nonlinear[i];
                sup = sup.max(res.abs());
            }
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_field_of_constant_profile() {
        let s = RadialState::from_fn(3, 2.0, 16, 0.0, |_| 0.7).unwrap();
        let pts = sample_box(3, 0.5, 3);
        let u = radial_to_vector_field(&s, &pts).unwrap();
        for (x, ux) in pts.iter().zip(&u) {
            for (c, uc) in x.iter().zip(ux) {
                assert!((uc + 0.7 * c).abs() < 1e-14);
            }
        }
        // div(−c x) = −c n by differences of the sampled field.
        let h = 1e-3;
        let mut div = 0.0;
        for k in 0..3 {
            let mut p = vec![0.2, -0.1, 0.3];
            let mut q = p.clone();
            p[k] += h;
            q[k] -= h;
            let f = radial_to_vector_field(&s, &[p, q]).unwrap();
            div += (f[0][k] - f[1][k]) / (2.0 * h);
        }
        assert!((div + 2.1).abs() < 1e-10);
    }

    #[test]
    fn zero_profile_and_range_checks() {
        let s = RadialState::from_fn(3, 1.0, 16, 0.0, |_| 0.0).unwrap();
        assert!(radial_to_vector_field(&s, &sample_box(3, 0.5, 2)).unwrap().iter().flatten().all(|v| *v == 0.0));
        assert!(radial_to_vector_field(&s, &[vec![1.0, 1.0, 0.0]]).is_err());
        assert!(radial_to_vector_field(&s, &[vec![0.1, 0.1]]).is_err());
    }

    #[test]
    fn interpolation_is_cubic_exact() {
        let s = RadialState::from_fn(3, 2.0, 16, 0.0, |r| 1.0 + r * r - 0.3 * r * r * r).unwrap();
        for r in [0.2, 0.61, 1.3, 1.99] {
            assert!((interpolate(&s, r) - (1.0 + r * r - 0.3 * r * r * r)).abs() < 1e-12, "{r}");
        }
    }
}
