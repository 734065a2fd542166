//! Linear differential and projection operators, all diagonal in Fourier space.
//!
//! Derivatives multiply mode `k` by `i(2π/ℓ)k_j`. Modes with a component equal
//! to `-N/2` have no Hermitian partner on the lattice, so every differential
//! operator (and the inverse Laplacian) sends them to zero.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{inverse_transform, FourierField, PhysicalField};
use crate::grid::{Mode, TorusGrid};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative tolerance for the curl-free precondition of [`pressure_from_gradient`].
pub const PRESSURE_CONSISTENCY_TOL: f64 = 1e-8;

/// Absolute floor used with relative tolerances.
pub const ABS_FLOOR: f64 = 1e-14;

fn derivative_symbol(grid: &TorusGrid, k: &Mode, axis: usize) -> Complex64 {
    if grid.is_nyquist(k) {
        ZERO
    } else {
        Complex64::new(0.0, grid.wavenumber_scale() * k[axis] as f64)
    }
}

/// `∂_axis` applied to every component.
pub fn partial(u: &FourierField, axis: usize) -> FourierField {
    let grid = *u.grid();
    u.map_modes(|k, c| c * derivative_symbol(&grid, k, axis))
}

/// Gradient of a scalar field; returns `n` components.
pub fn gradient(s: &FourierField) -> Result<FourierField> {
    s.ensure_components(1, "gradient")?;
    let parts: Vec<FourierField> = (0..s.grid().dim()).map(|a| partial(s, a)).collect();
    FourierField::stack(&parts)
}

/// Full Jacobian `G_{kl} = ∂_k u^l`, stored with index `k * n + l`.
pub fn jacobian(u: &FourierField) -> Result<FourierField> {
    let n = u.grid().dim();
    u.ensure_components(n, "jacobian")?;
    let mut parts = Vec::with_capacity(n * n);
    for k in 0..n {
        let d = partial(u, k);
        for l in 0..n {
            parts.push(d.component_field(l));
        }
    }
    FourierField::stack(&parts)
}

pub fn divergence(u: &FourierField) -> Result<FourierField> {
    let grid = *u.grid();
    u.ensure_components(grid.dim(), "divergence")?;
    let mut out = FourierField::zeros(grid, 1);
    for (a, o) in out.component_mut(0).iter_mut().enumerate() {
        let k = grid.mode(a);
        *o = (0..grid.dim())
            .map(|j| u.component(j)[a] * derivative_symbol(&grid, &k, j))
            .sum();
    }
    Ok(out)
}

/// Multiplies every component by `-(2π/ℓ)²(k,k)`.
pub fn laplacian(u: &FourierField) -> FourierField {
    let grid = *u.grid();
    let s2 = grid.wavenumber_scale().powi(2);
    u.map_modes(|k, c| {
        if grid.is_nyquist(k) {
            ZERO
        } else {
            c * (-s2 * grid.norm_sq(k) as f64)
        }
    })
}

/// Scalar curl `∂₁u² − ∂₂u¹` for `n = 2`, vector curl for `n = 3`.
pub fn rot(u: &FourierField) -> Result<FourierField> {
    let n = u.grid().dim();
    u.ensure_components(n, "rot")?;
    let d = |axis: usize, comp: usize| partial(&u.component_field(comp), axis);
    match n {
        2 => Ok(&d(0, 1) - &d(1, 0)),
        3 => FourierField::stack(&[
            &d(1, 2) - &d(2, 1),
            &d(2, 0) - &d(0, 2),
            &d(0, 1) - &d(1, 0),
        ]),
        _ => Err(Error::Unsupported(format!("rot is defined for n = 2 or 3, not n = {n}"))),
    }
}

/// Formal adjoint of [`rot`]: `ψ ↦ (∂₂ψ, −∂₁ψ)` for a scalar `ψ` when
/// `n = 2`; `rot` itself when `n = 3`.
pub fn rot_adjoint(w: &FourierField) -> Result<FourierField> {
    match w.grid().dim() {
        2 => {
            w.ensure_components(1, "rot adjoint")?;
            FourierField::stack(&[partial(w, 1), partial(w, 0).scaled(-1.0)])
        }
        3 => rot(w),
        n => Err(Error::Unsupported(format!("rot is defined for n = 2 or 3, not n = {n}"))),
    }
}

/// Helmholtz–Leray projection onto divergence-free fields.
///
/// Removes the component of `c_k` along `k` for `k ≠ 0`. The mean mode and the
/// Nyquist modes lie in the kernel of the discrete divergence and pass through.
pub fn leray_project(u: &FourierField) -> Result<FourierField> {
    let grid = *u.grid();
    let n = grid.dim();
    u.ensure_components(n, "leray_project")?;
    let mut out = u.clone();
    let len = grid.len();
    for a in 1..len {
        let k = grid.mode(a);
        if grid.is_nyquist(&k) {
            continue;
        }
        let kk = grid.norm_sq(&k) as f64;
        let dot: Complex64 = (0..n).map(|j| u.component(j)[a] * k[j] as f64).sum();
        for j in 0..n {
            out.component_mut(j)[a] -= dot * (k[j] as f64 / kk);
        }
    }
    Ok(out)
}

/// `Π u`: the mean mode only.
pub fn mean_part(u: &FourierField) -> FourierField {
    u.map_modes(|k, c| if k.iter().all(|&kj| kj == 0) { c } else { ZERO })
}

/// Inverse Laplacian on mean-free fields: `k ≠ 0` scaled by
/// `-1/((k,k)(2π/ℓ)²)`, the mean (and Nyquist) modes set to zero.
pub fn phi_inverse_laplacian(u: &FourierField) -> FourierField {
    let grid = *u.grid();
    let s2 = grid.wavenumber_scale().powi(2);
    u.map_modes(|k, c| {
        let kk = grid.norm_sq(k);
        if kk == 0 || grid.is_nyquist(k) {
            ZERO
        } else {
            c * (-1.0 / (kk as f64 * s2))
        }
    })
}

/// Recover the zero-mean scalar `p` with `∇p = F − ΠF` from a gradient field,
/// via `p = div φ F`.
pub fn pressure_from_gradient(f: &FourierField) -> Result<FourierField> {
    pressure_from_gradient_with_tol(f, PRESSURE_CONSISTENCY_TOL)
}

pub fn pressure_from_gradient_with_tol(f: &FourierField, rel_tol: f64) -> Result<FourierField> {
    let solenoidal = &leray_project(f)? - &mean_part(f);
    let defect = solenoidal.coeff_norm();
    let scale = f.coeff_norm();
    if defect > rel_tol * scale + ABS_FLOOR {
        return Err(Error::InconsistentInput(format!(
            "field is not a gradient: divergence-free part {defect:.3e} vs norm {scale:.3e}"
        )));
    }
    divergence(&phi_inverse_laplacian(f))
}

/// `sqrt(|c_0|² + Σ_{k≠0} (k,k)^s |c_k|²)` summed over components, with the
/// integer-lattice weight `(k,k)^s`.
pub fn sobolev_norm(u: &FourierField, s: f64) -> f64 {
    let grid = *u.grid();
    let weights: Vec<f64> = grid
        .modes()
        .map(|k| {
            let kk = grid.norm_sq(&k);
            if kk == 0 {
                1.0
            } else {
                (kk as f64).powf(s)
            }
        })
        .collect();
    let len = grid.len();
    u.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| weights[i % len] * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Two-thirds rule: zero every mode with some `|k_j| > N/3`.
pub fn dealias(u: &FourierField) -> FourierField {
    let grid = *u.grid();
    let n = grid.points() as i64;
    u.map_modes(|k, c| {
        if k[..grid.dim()].iter().any(|kj| 3 * kj.abs() > n) {
            ZERO
        } else {
            c
        }
    })
}

/// `(u, v)_{L²(Q)}` by Parseval.
pub fn l2_inner(u: &FourierField, v: &FourierField) -> f64 {
    debug_assert_eq!(u.coeffs().len(), v.coeffs().len());
    u.grid().volume()
        * u.coeffs()
            .iter()
            .zip(v.coeffs())
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
}

pub fn l2_norm(u: &FourierField) -> f64 {
    l2_inner(u, u).max(0.0).sqrt()
}

/// `‖∇^i u‖_{L²(Q)}` summing all `i`-th order partial derivatives:
/// `ℓ^n Σ_k ((2π/ℓ)²(k,k))^i |c_k|²`.
pub fn derivative_norm(u: &FourierField, order: u32) -> f64 {
    if order == 0 {
        return l2_norm(u);
    }
    let grid = *u.grid();
    let s2 = grid.wavenumber_scale().powi(2);
    let weights: Vec<f64> = grid
        .modes()
        .map(|k| {
            if grid.is_nyquist(&k) {
                0.0
            } else {
                (s2 * grid.norm_sq(&k) as f64).powi(order as i32)
            }
        })
        .collect();
    let len = grid.len();
    let sum: f64 = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| weights[i % len] * c.norm_sqr())
        .sum();
    (grid.volume() * sum).sqrt()
}

/// `max_x |div u(x)|`.
pub fn max_abs_divergence(u: &FourierField) -> Result<f64> {
    let d = inverse_transform(&divergence(u)?);
    Ok(d.values().iter().map(|v| v.abs()).fold(0.0, f64::max))
}

/// `max_x |u(x)|`.
pub fn linf_norm(u: &FourierField) -> f64 {
    inverse_transform(u).max_magnitude()
}

/// Cheap upper bound for `‖u‖_{L∞}`: `Σ_k |c_k|` per component, combined.
pub fn linf_upper_bound(u: &FourierField) -> f64 {
    (0..u.components())
        .map(|c| u.component(c).iter().map(|z| z.norm()).sum::<f64>().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Pointwise product helper used by physical-space quadrature.
pub fn physical(u: &FourierField) -> PhysicalField {
    inverse_transform(u)
}
