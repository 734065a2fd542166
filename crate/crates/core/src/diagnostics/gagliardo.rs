//! Empirical Gagliardo–Nirenberg ratio probe. No universal constant is
//! estimated; the report only exposes both sides.

use crate::error::{Error, Result};
use crate::field::{inverse_transform, FourierField};
use crate::operators::partial;

const RELATION_TOL: f64 = 1e-12;

/// Exponents of `‖∇^{j₀}u‖_{p₀} ≤ c₁‖∇^{k₀}u‖^{a₀}_{r₀}‖u‖^{1−a₀}_{q₀} + c₂‖u‖_{s₀}`.
/// Infinite Lebesgue exponents are `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnParams {
    pub j0: u32,
    pub k0: u32,
    pub p0: f64,
    pub q0: f64,
    pub r0: f64,
    pub s0: f64,
    pub a0: f64,
}

impl GnParams {
    pub fn check(&self, dim: usize) -> Result<()> {
        let mut bad = Vec::new();
        for (name, p) in [("p0", self.p0), ("q0", self.q0), ("r0", self.r0), ("s0", self.s0)] {
            if !(p >= 1.0) {
                bad.push(format!("{name} = {p} is below 1"));
            }
        }
        if !(0.0..=1.0).contains(&self.a0) {
            bad.push(format!("a0 = {} outside [0, 1]", self.a0));
        }
        if self.j0 > self.k0 || (self.k0 > 0 && (self.j0 as f64 / self.k0 as f64) > self.a0 + RELATION_TOL) {
            bad.push(format!("need j0/k0 <= a0, got j0={}, k0={}, a0={}", self.j0, self.k0, self.a0));
        }
        let n = dim as f64;
        let rhs = self.j0 as f64 / n + self.a0 * (1.0 / self.r0 - self.k0 as f64 / n) + (1.0 - self.a0) / self.q0;
        if (1.0 / self.p0 - rhs).abs() > RELATION_TOL {
            bad.push(format!("exponent relation fails: 1/p0 = {} but right side = {rhs}", 1.0 / self.p0));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InconsistentInput(bad.join("; ")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnReport {
    /// `‖∇^{j₀}u‖_{L^{p₀}}`
    pub lhs: f64,
    /// `‖∇^{k₀}u‖^{a₀}_{L^{r₀}} ‖u‖^{1−a₀}_{L^{q₀}}`
    pub interpolation: f64,
    /// `‖u‖_{L^{s₀}}`
    pub lower_order: f64,
    /// `lhs / (interpolation + lower_order)`; `None` when that is `0/0`.
    pub ratio: Option<f64>,
}

impl GnReport {
    pub fn is_degenerate(&self) -> bool {
        self.ratio.is_none()
    }
}

/// Multi-indices `α ∈ ℕⁿ` with `|α| = order`.
fn multi_indices(dim: usize, order: u32) -> Vec<Vec<u32>> {
    if dim == 1 {
        return vec![vec![order]];
    }
    (0..=order)
        .flat_map(|first| {
            multi_indices(dim - 1, order - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn lp_norm(u: &FourierField, p: f64) -> f64 {
    let field = inverse_transform(u);
    let sq = field.magnitude_sq();
    if p.is_infinite() {
        return sq.iter().copied().fold(0.0, f64::max).sqrt();
    }
    let sum: f64 = sq.iter().map(|s| s.powf(p / 2.0)).sum();
    (sum * u.grid().cell_volume()).powf(1.0 / p)
}

/// `max_{|α| = order} ‖∂^α u‖_{L^p}` with the Euclidean norm across components.
pub fn derivative_lp_norm(u: &FourierField, order: u32, p: f64) -> f64 {
    multi_indices(u.grid().dim(), order)
        .iter()
        .map(|alpha| {
            let mut d = u.clone();
            for (axis, &times) in alpha.iter().enumerate() {
                for _ in 0..times {
                    d = partial(&d, axis);
                }
            }
            lp_norm(&d, p)
        })
        .fold(0.0, f64::max)
}

pub fn gagliardo_nirenberg_probe(u: &FourierField, params: &GnParams) -> Result<GnReport> {
    params.check(u.grid().dim())?;
    let lhs = derivative_lp_norm(u, params.j0, params.p0);
    let top = derivative_lp_norm(u, params.k0, params.r0);
    let base = lp_norm(u, params.q0);
    let interpolation = top.powf(params.a0) * base.powf(1.0 - params.a0);
    let lower_order = lp_norm(u, params.s0);
    let denom = interpolation + lower_order;
    let ratio = if denom > 0.0 { Some(lhs / denom) } else if lhs == 0.0 { None } else { Some(f64::INFINITY) };
    Ok(GnReport { lhs, interpolation, lower_order, ratio })
}
