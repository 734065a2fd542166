use crate::error::{Error, Result};

/// Trapezoid rule on (possibly nonuniform) samples.
pub fn trapezoid(t: &[f64], v: &[f64]) -> f64 {
    t.windows(2)
        .zip(v.windows(2))
        .map(|(tw, vw)| 0.5 * (tw[1] - tw[0]) * (vw[0] + vw[1]))
        .sum()
}

/// Second-order derivative estimate: centered three-point formulas inside,
/// one-sided three-point formulas at both ends.
pub fn time_derivative(t: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let n = t.len();
    if n < 3 || v.len() != n {
        return Err(Error::Trajectory(format!(
            "time derivative needs at least 3 matching samples, got {n}"
        )));
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        d[i] = -h2 / (h1 * (h1 + h2)) * v[i - 1] + (h2 - h1) / (h1 * h2) * v[i] + h1 / (h2 * (h1 + h2)) * v[i + 1];
    }
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * v[0] + (h1 + h2) / (h1 * h2) * v[1] - h1 / (h2 * (h1 + h2)) * v[2];
    let (h1, h2) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
    d[n - 1] = h2 / (h1 * (h1 + h2)) * v[n - 3] - (h1 + h2) / (h1 * h2) * v[n - 2] + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * v[n - 1];
    Ok(d)
}

/// Adaptive Simpson quadrature to a relative tolerance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb, m) = (f(a), f(b), 0.5 * (a + b));
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = rel_tol * whole.abs().max(1e-300);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_is_exact_for_quadratics_on_nonuniform_grid() {
        let t = [0.0, 0.1, 0.25, 0.3, 0.7];
        let v: Vec<f64> = t.iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        let d = time_derivative(&t, &v).unwrap();
        for (x, dx) in t.iter().zip(d) {
            assert!((dx - (6.0 * x - 1.0)).abs() < 1e-12);
        }
        assert!(time_derivative(&t[..2], &v[..2]).is_err());
    }

    #[test]
    fn quadrature_rules() {
        assert!((trapezoid(&[0.0, 1.0, 3.0], &[1.0, 1.0, 1.0]) - 3.0).abs() < 1e-15);
        let s = adaptive_simpson(&|x: f64| x.exp(), 0.0, 2.0, 1e-14);
        assert!((s - (2f64.exp() - 1.0)).abs() < 1e-12);
    }
}
