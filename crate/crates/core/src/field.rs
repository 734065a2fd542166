//! Modal and nodal representations of periodic vector fields and the
//! transforms between them.
//!
//! Normalization: `c_k = N^{-n} Σ_x p(x) e^{-i (2π/ℓ) k·x}`, so `c_0` is the
//! spatial mean and `p(x) = Σ_k c_k e^{i (2π/ℓ) k·x}`. Parseval then reads
//! `‖p‖²_{L²(Q)} = ℓ^n Σ_k |c_k|²`; every L² quantity in this crate uses that
//! identity.

use std::collections::HashMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Mode, TorusGrid};

/// Complex modal coefficients of an `m`-component field, component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    grid: TorusGrid,
    components: usize,
    coeffs: Vec<Complex64>,
}

/// Real nodal values of an `m`-component field, component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: TorusGrid,
    components: usize,
    values: Vec<f64>,
}

impl FourierField {
    pub fn zeros(grid: TorusGrid, components: usize) -> Self {
        Self {
            grid,
            components,
            coeffs: vec![Complex64::new(0.0, 0.0); components * grid.len()],
        }
    }

    pub fn from_coeffs(grid: TorusGrid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.len() {
            return Err(Error::Config(format!(
                "expected {} x {} coefficients, got {}",
                components,
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, components, coeffs })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    /// Extract a single component as a scalar field.
    pub fn component_field(&self, c: usize) -> FourierField {
        FourierField {
            grid: self.grid,
            components: 1,
            coeffs: self.component(c).to_vec(),
        }
    }

    /// Stack scalar or vector fields into one field.
    pub fn stack(parts: &[FourierField]) -> Result<FourierField> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Shape("cannot stack zero fields".into()))?;
        let mut coeffs = Vec::new();
        let mut components = 0;
        for p in parts {
            first.grid.check_same(&p.grid)?;
            coeffs.extend_from_slice(&p.coeffs);
            components += p.components;
        }
        Ok(FourierField { grid: first.grid, components, coeffs })
    }

    pub fn coeff(&self, c: usize, k: &Mode) -> Complex64 {
        self.component(c)[self.grid.index_of(k)]
    }

    /// Set `c_k` and its partner `c_{-k} = conj(c_k)` so the field stays real.
    pub fn set_real_mode(&mut self, c: usize, k: &Mode, value: Complex64) {
        let i = self.grid.index_of(k);
        let j = self.grid.partner_index(i);
        let comp = self.component_mut(c);
        if i == j {
            comp[i] = Complex64::new(value.re, 0.0);
        } else {
            comp[i] = value;
            comp[j] = value.conj();
        }
    }

    pub fn ensure_compatible(&self, other: &FourierField) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.components != other.components {
            return Err(Error::Shape(format!(
                "component mismatch: {} vs {}",
                self.components, other.components
            )));
        }
        Ok(())
    }

    pub fn ensure_components(&self, expected: usize, what: &str) -> Result<()> {
        if self.components == expected {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what} expects {expected} component(s), got {}",
                self.components
            )))
        }
    }

    /// Apply a per-mode multiplier to every component.
    pub fn map_modes(&self, mut f: impl FnMut(&Mode, Complex64) -> Complex64) -> FourierField {
        let len = self.grid.len();
        let modes: Vec<Mode> = self.grid.modes().collect();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(&modes[i % len], c))
            .collect();
        FourierField { grid: self.grid, components: self.components, coeffs }
    }

    pub fn scaled(&self, s: f64) -> FourierField {
        FourierField {
            grid: self.grid,
            components: self.components,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &FourierField) {
        assert_eq!(self.coeffs.len(), other.coeffs.len(), "axpy shape mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
    }

    /// `sqrt(Σ |c_k|²)` over all components.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest violation of `c_{-k} = conj(c_k)`.
    pub fn hermitian_defect(&self) -> f64 {
        let len = self.grid.len();
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            let comp = self.component(c);
            for i in 0..len {
                let j = self.grid.partner_index(i);
                worst = worst.max((comp[j] - comp[i].conj()).norm());
            }
        }
        worst
    }

    /// Project onto Hermitian-symmetric coefficients.
    pub fn symmetrized(&self) -> FourierField {
        let len = self.grid.len();
        let mut out = self.clone();
        for c in 0..self.components {
            let comp = self.component(c);
            let dst = out.component_mut(c);
            for (i, d) in dst.iter_mut().enumerate() {
                let j = self.grid.partner_index(i);
                *d = 0.5 * (comp[i] + comp[j].conj());
            }
            debug_assert_eq!(dst.len(), len);
        }
        out
    }
}

impl Add<&FourierField> for &FourierField {
    type Output = FourierField;
    fn add(self, rhs: &FourierField) -> FourierField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&FourierField> for &FourierField {
    type Output = FourierField;
    fn sub(self, rhs: &FourierField) -> FourierField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl AddAssign<&FourierField> for FourierField {
    fn add_assign(&mut self, rhs: &FourierField) {
        self.axpy(1.0, rhs);
    }
}

impl Mul<f64> for &FourierField {
    type Output = FourierField;
    fn mul(self, rhs: f64) -> FourierField {
        self.scaled(rhs)
    }
}

impl Neg for &FourierField {
    type Output = FourierField;
    fn neg(self) -> FourierField {
        self.scaled(-1.0)
    }
}

impl PhysicalField {
    pub fn new(grid: TorusGrid, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != components * grid.len() {
            return Err(Error::Config(format!(
                "expected {} x {} values, got {}",
                components,
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("physical field contains non-finite values".into()));
        }
        Ok(Self { grid, components, values })
    }

    /// Sample a function of position on the grid.
    pub fn from_fn(grid: TorusGrid, components: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let len = grid.len();
        let mut values = vec![0.0; components * len];
        for i in 0..len {
            let x = grid.point(i);
            let v = f(&x[..grid.dim()]);
            if v.len() != components {
                return Err(Error::Shape(format!(
                    "sampler returned {} values, expected {components}",
                    v.len()
                )));
            }
            for (c, vc) in v.into_iter().enumerate() {
                values[c * len + i] = vc;
            }
        }
        Self::new(grid, components, values)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.values[c * len..(c + 1) * len]
    }

    /// Pointwise Euclidean magnitude squared.
    pub fn magnitude_sq(&self) -> Vec<f64> {
        let len = self.grid.len();
        let mut out = vec![0.0; len];
        for c in 0..self.components {
            for (o, v) in out.iter_mut().zip(self.component(c)) {
                *o += v * v;
            }
        }
        out
    }

    /// `max_x |p(x)|` with the Euclidean norm across components.
    pub fn max_magnitude(&self) -> f64 {
        self.magnitude_sq().into_iter().fold(0.0, f64::max).sqrt()
    }

    /// Grid quadrature of a pointwise integrand.
    pub fn integrate(grid: &TorusGrid, integrand: impl IntoIterator<Item = f64>) -> f64 {
        integrand.into_iter().sum::<f64>() * grid.cell_volume()
    }
}

fn plan(points: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    type PlanCache = Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>;
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let (planner, plans) = &mut *guard;
    let key = (points, direction == FftDirection::Forward);
    plans
        .entry(key)
        .or_insert_with(|| planner.plan_fft(points, direction))
        .clone()
}

/// In-place n-dimensional FFT of one component (unnormalized).
fn fft_nd(data: &mut [Complex64], grid: &TorusGrid, direction: FftDirection) {
    let n = grid.points();
    let dim = grid.dim();
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let block = n * stride;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, l) in line.iter_mut().enumerate() {
                    *l = data[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, l) in line.iter().enumerate() {
                    data[base + j * stride] = *l;
                }
            }
        }
    }
}

/// Nodal values to modal coefficients; `c_0` is the mean.
pub fn forward_transform(p: &PhysicalField) -> FourierField {
    let grid = p.grid;
    let len = grid.len();
    let norm = 1.0 / len as f64;
    let mut coeffs: Vec<Complex64> = p.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for chunk in coeffs.chunks_mut(len) {
        fft_nd(chunk, &grid, FftDirection::Forward);
        chunk.iter_mut().for_each(|c| *c *= norm);
    }
    FourierField { grid, components: p.components, coeffs }
}

/// Modal coefficients to nodal values (real part; the imaginary part is
/// roundoff for Hermitian-symmetric input).
pub fn inverse_transform(f: &FourierField) -> PhysicalField {
    let grid = f.grid;
    let len = grid.len();
    let mut buf = f.coeffs.clone();
    for chunk in buf.chunks_mut(len) {
        fft_nd(chunk, &grid, FftDirection::Inverse);
    }
    PhysicalField {
        grid,
        components: f.components,
        values: buf.into_iter().map(|c| c.re).collect(),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::random::random_field;

    #[test]
    fn constant_field_has_only_mean_mode() {
        let g = TorusGrid::new(3, 2.0, 8).unwrap();
        let p = PhysicalField::new(g, 1, vec![3.0; g.len()]).unwrap();
        let f = forward_transform(&p);
        assert!((f.coeffs()[0] - Complex64::new(3.0, 0.0)).norm() < 1e-14);
        assert!(f.coeffs()[1..].iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn cosine_splits_between_plus_minus_one() {
        let g = TorusGrid::new(2, 3.0, 16).unwrap();
        let s = g.wavenumber_scale();
        let p = PhysicalField::from_fn(g, 1, |x| vec![(s * x[0]).cos()]).unwrap();
        let f = forward_transform(&p);
        for (i, c) in f.coeffs().iter().enumerate() {
            let k = g.mode(i);
            let expect = if k[..2] == [1, 0] || k[..2] == [-1, 0] { 0.5 } else { 0.0 };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-14, "k={k:?} c={c}");
        }
    }

    #[test]
    fn round_trip_random_fields() {
        for &n in &[8usize, 16, 32] {
            for dim in [2usize, 3] {
                let g = TorusGrid::new(dim, 2.0 * PI, n).unwrap();
                let values: Vec<f64> = (0..2 * g.len()).map(|i| ((i * 7919) % 1013) as f64 / 97.0 - 5.0).collect();
                let p = PhysicalField::new(g, 2, values).unwrap();
                let back = inverse_transform(&forward_transform(&p));
                let scale = p.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
                let err = p.values().iter().zip(back.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err <= 1e-12 * scale, "n={n} dim={dim} err={err}");
            }
        }
    }

    #[test]
    fn transform_of_real_field_is_hermitian() {
        let g = TorusGrid::new(2, 1.0, 16).unwrap();
        let u = random_field(&g, 2, 0.25, 11);
        let p = inverse_transform(&u);
        let f = forward_transform(&p);
        assert!(f.hermitian_defect() < 1e-14);
        assert!((&f - &u).coeff_norm() < 1e-13);
    }

    #[test]
    fn shape_mismatch_is_config_error() {
        let g = TorusGrid::new(2, 1.0, 8).unwrap();
        assert!(matches!(PhysicalField::new(g, 1, vec![0.0; 10]), Err(Error::Config(_))));
        assert!(matches!(
            FourierField::from_coeffs(g, 2, vec![Complex64::new(0.0, 0.0); 64]),
            Err(Error::Config(_))
        ));
    }
}
