//! Constant-coefficient bilinear nonlinearities `D u = M(u, ∇u)`.
//!
//! `M(u, G)_i = Σ_{j,k,l} M[i][j][(k,l)] u^j G_{kl}` with `G_{kl} = ∂_k w^l`.
//! The symmetrization is `B(w, u) = M(u, ∇w) + M(w, ∇u)`, so `B(u, u) = 2 D u`.
//! Products are formed pseudo-spectrally and the result is passed through the
//! two-thirds filter, which keeps every evaluation an exact quadratic form in
//! the coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{forward_transform, inverse_transform, FourierField, PhysicalField};
use crate::operators::{dealias, jacobian, l2_inner, l2_norm};

/// Coefficients of `M: ℝⁿ × ℝ^{n²} → ℝⁿ`, shape `n × n × n²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Vec<f64>>>", into = "Vec<Vec<Vec<f64>>>")]
pub struct BilinearTensor {
    dim: usize,
    coeffs: Vec<f64>,
}

impl BilinearTensor {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, coeffs: vec![0.0; dim.pow(4)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        let n = self.dim;
        ((i * n + j) * n + k) * n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.coeffs[self.index(i, j, k, l)]
    }

    pub fn add(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let idx = self.index(i, j, k, l);
        self.coeffs[idx] += value;
    }

    /// `(u·∇)u`: `M[i][j][(j,i)] = 1`.
    pub fn advection(dim: usize) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                t.add(i, j, j, i, 1.0);
            }
        }
        t
    }

    /// `b (u·∇)u + ½(1−b)∇|u|² + ½(div u) u`.
    pub fn svplechac(dim: usize, b: f64) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                t.add(i, j, j, i, b);
                t.add(i, j, i, j, 1.0 - b);
                t.add(i, i, j, j, 0.5);
            }
        }
        t
    }

    /// Evaluate `M(u, G)` at one point.
    pub fn apply(&self, u: &[f64], g: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = 0.0;
            for (j, uj) in u.iter().enumerate().take(n) {
                let row = &self.coeffs[(i * n + j) * n * n..(i * n + j + 1) * n * n];
                acc += uj * row.iter().zip(g).map(|(m, gk)| m * gk).sum::<f64>();
            }
            *o = acc;
        }
    }

    fn validate(&self) -> Result<()> {
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("bilinear tensor has non-finite entries".into()));
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<Vec<f64>>>> for BilinearTensor {
    type Error = Error;

    fn try_from(nested: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = nested.len();
        if !(2..=crate::grid::MAX_DIM).contains(&n) {
            return Err(Error::Config(format!("tensor leading dimension must be 2..=4, got {n}")));
        }
        let mut coeffs = Vec::with_capacity(n.pow(4));
        for (i, row) in nested.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Config(format!("tensor[{i}] has {} rows, expected {n}", row.len())));
            }
            for (j, entries) in row.iter().enumerate() {
                if entries.len() != n * n {
                    return Err(Error::Config(format!(
                        "tensor[{i}][{j}] has {} entries, expected {}",
                        entries.len(),
                        n * n
                    )));
                }
                coeffs.extend_from_slice(entries);
            }
        }
        let t = BilinearTensor { dim: n, coeffs };
        t.validate()?;
        Ok(t)
    }
}

impl From<BilinearTensor> for Vec<Vec<Vec<f64>>> {
    fn from(t: BilinearTensor) -> Self {
        let n = t.dim;
        t.coeffs
            .chunks(n * n * n)
            .map(|block| block.chunks(n * n).map(|r| r.to_vec()).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NonlinearitySpec {
    Advection,
    Svplechac { b: f64 },
    Custom { tensor: BilinearTensor },
    Zero,
}

impl NonlinearitySpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            NonlinearitySpec::Svplechac { b } if !(*b > 0.0 && *b < 1.0) => {
                Err(Error::Config(format!("svplechac parameter b must lie in (0, 1), got {b}")))
            }
            NonlinearitySpec::Custom { tensor } if tensor.dim() != dim => Err(Error::Config(format!(
                "custom tensor is for n = {}, grid has n = {dim}",
                tensor.dim()
            ))),
            NonlinearitySpec::Custom { tensor } => tensor.validate(),
            _ => Ok(()),
        }
    }

    /// Tensor encoding of the same form.
    pub fn to_tensor(&self, dim: usize) -> BilinearTensor {
        match self {
            NonlinearitySpec::Advection => BilinearTensor::advection(dim),
            NonlinearitySpec::Svplechac { b } => BilinearTensor::svplechac(dim, *b),
            NonlinearitySpec::Custom { tensor } => tensor.clone(),
            NonlinearitySpec::Zero => BilinearTensor::zeros(dim),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NonlinearitySpec::Zero)
    }

    /// Pointwise `M(u, G)`. Built-in kinds use their closed forms directly.
    fn apply_pointwise(&self, n: usize, u: &[f64], g: &[f64], out: &mut [f64]) {
        match self {
            NonlinearitySpec::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            NonlinearitySpec::Advection => {
                for i in 0..n {
                    out[i] = (0..n).map(|j| u[j] * g[j * n + i]).sum();
                }
            }
            NonlinearitySpec::Svplechac { b } => {
                let div: f64 = (0..n).map(|k| g[k * n + k]).sum();
                for i in 0..n {
                    let transport: f64 = (0..n).map(|j| u[j] * g[j * n + i]).sum();
                    let half_grad_sq: f64 = (0..n).map(|l| u[l] * g[i * n + l]).sum();
                    out[i] = b * transport + (1.0 - b) * half_grad_sq + 0.5 * div * u[i];
                }
            }
            NonlinearitySpec::Custom { tensor } => tensor.apply(u, g, out),
        }
    }
}

/// Pseudo-spectral evaluator for one nonlinearity.
#[derive(Debug, Clone)]
pub struct NonlinearOperator {
    spec: NonlinearitySpec,
    dealias: bool,
}

impl NonlinearOperator {
    pub fn new(spec: NonlinearitySpec) -> Self {
        Self { spec, dealias: true }
    }

    pub fn with_dealias(spec: NonlinearitySpec, dealias: bool) -> Self {
        Self { spec, dealias }
    }

    pub fn spec(&self) -> &NonlinearitySpec {
        &self.spec
    }

    /// `M(u, ∇w)`.
    pub fn m(&self, u: &FourierField, w: &FourierField) -> Result<FourierField> {
        u.ensure_compatible(w)?;
        let grid = *u.grid();
        let n = grid.dim();
        u.ensure_components(n, "nonlinearity")?;
        self.spec.validate(n)?;
        if self.spec.is_zero() {
            return Ok(FourierField::zeros(grid, n));
        }
        let up = inverse_transform(u);
        let gp = inverse_transform(&jacobian(w)?);
        let len = grid.len();
        let mut values = vec![0.0; n * len];
        let mut ux = vec![0.0; n];
        let mut gx = vec![0.0; n * n];
        let mut out = vec![0.0; n];
        for x in 0..len {
            for (j, v) in ux.iter_mut().enumerate() {
                *v = up.component(j)[x];
            }
            for (kl, v) in gx.iter_mut().enumerate() {
                *v = gp.component(kl)[x];
            }
            self.spec.apply_pointwise(n, &ux, &gx, &mut out);
            for (i, o) in out.iter().enumerate() {
                values[i * len + x] = *o;
            }
        }
        let product = forward_transform(&PhysicalField::new(grid, n, values)?);
        Ok(if self.dealias { dealias(&product) } else { product })
    }

    /// `D u = M(u, ∇u)`.
    pub fn d(&self, u: &FourierField) -> Result<FourierField> {
        self.m(u, u)
    }

    /// `B(w, u) = M(u, ∇w) + M(w, ∇u)`.
    pub fn b(&self, w: &FourierField, u: &FourierField) -> Result<FourierField> {
        Ok(&self.m(u, w)? + &self.m(w, u)?)
    }
}

pub fn eval_d(spec: &NonlinearitySpec, u: &FourierField) -> Result<FourierField> {
    NonlinearOperator::new(spec.clone()).d(u)
}

pub fn eval_b(spec: &NonlinearitySpec, w: &FourierField, u: &FourierField) -> Result<FourierField> {
    NonlinearOperator::new(spec.clone()).b(w, u)
}

/// `(D u, u)_{L²(Q)}` by Parseval on the dealiased product.
pub fn trilinear_pairing(spec: &NonlinearitySpec, u: &FourierField) -> Result<f64> {
    Ok(l2_inner(&eval_d(spec, u)?, u))
}

/// `‖D u₁ − D u₂ − B(u₁, u₁−u₂) + ½ B(u₁−u₂, u₁−u₂)‖_{L²}`.
pub fn polarization_residual(spec: &NonlinearitySpec, u1: &FourierField, u2: &FourierField) -> Result<f64> {
    let op = NonlinearOperator::new(spec.clone());
    let v = u1 - u2;
    let mut r = &op.d(u1)? - &op.d(u2)?;
    r.axpy(-1.0, &op.b(u1, &v)?);
    r.axpy(0.5, &op.b(&v, &v)?);
    Ok(l2_norm(&r))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::grid::TorusGrid;
    use crate::operators::{gradient, leray_project};
    use crate::random::random_field;

    fn grid2() -> TorusGrid {
        TorusGrid::new(2, 2.0 * PI, 16).unwrap()
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let g = grid2();
        let u = FourierField::zeros(g, 2);
        for spec in [
            NonlinearitySpec::Advection,
            NonlinearitySpec::Svplechac { b: 0.3 },
            NonlinearitySpec::Zero,
        ] {
            assert_eq!(eval_d(&spec, &u).unwrap().coeff_norm(), 0.0);
        }
    }

    #[test]
    fn shear_flow_has_no_self_advection() {
        let g = TorusGrid::new(2, 3.0, 16).unwrap();
        let s = g.wavenumber_scale();
        let u = crate::field::forward_transform(
            &PhysicalField::from_fn(g, 2, |x| vec![(s * x[1]).sin(), 0.0]).unwrap(),
        );
        assert!(eval_d(&NonlinearitySpec::Advection, &u).unwrap().coeff_norm() < 1e-15);
    }

    #[test]
    fn closed_form_and_tensor_encodings_agree() {
        for dim in [2usize, 3] {
            let g = TorusGrid::new(dim, 2.0 * PI, 12).unwrap();
            let u = random_field(&g, dim, 1.0, 17);
            for spec in [NonlinearitySpec::Advection, NonlinearitySpec::Svplechac { b: 0.35 }] {
                let direct = eval_d(&spec, &u).unwrap();
                let custom = NonlinearitySpec::Custom { tensor: spec.to_tensor(dim) };
                let via_tensor = eval_d(&custom, &u).unwrap();
                assert!((&direct - &via_tensor).coeff_norm() < 1e-14 * direct.coeff_norm());
            }
        }
    }

    #[test]
    fn svplechac_gradient_term_matches_spectral_gradient_of_square() {
        // ½∇|u|² computed by transforming |u|² and differentiating.
        let g = grid2();
        let u = random_field(&g, 2, 1.0, 5);
        let b = 0.4;
        let op = NonlinearOperator::new(NonlinearitySpec::Svplechac { b });
        let full = op.d(&u).unwrap();
        let adv = eval_d(&NonlinearitySpec::Advection, &u).unwrap();
        let p = inverse_transform(&u);
        let sq = crate::field::forward_transform(&PhysicalField::new(g, 1, p.magnitude_sq()).unwrap());
        let grad_sq = dealias(&gradient(&sq).unwrap());
        let div = crate::operators::divergence(&u).unwrap();
        let dp = inverse_transform(&div);
        let len = g.len();
        let mut vals = vec![0.0; 2 * len];
        for c in 0..2 {
            for x in 0..len {
                vals[c * len + x] = dp.values()[x] * p.component(c)[x];
            }
        }
        let div_u = dealias(&crate::field::forward_transform(&PhysicalField::new(g, 2, vals).unwrap()));
        let mut expect = adv.scaled(b);
        expect.axpy(0.5 * (1.0 - b), &grad_sq);
        expect.axpy(0.5, &div_u);
        assert!((&full - &expect).coeff_norm() < 1e-13 * full.coeff_norm());
    }

    #[test]
    fn symmetrization_properties() {
        let g = grid2();
        let spec = NonlinearitySpec::Svplechac { b: 0.7 };
        let op = NonlinearOperator::new(spec.clone());
        let u = random_field(&g, 2, 1.0, 1);
        let w = random_field(&g, 2, 1.0, 2);
        let buu = op.b(&u, &u).unwrap();
        assert!((&buu - &op.d(&u).unwrap().scaled(2.0)).coeff_norm() < 1e-14 * buu.coeff_norm());
        assert_eq!(op.b(&w, &FourierField::zeros(g, 2)).unwrap().coeff_norm(), 0.0);
        let bwu = op.b(&w, &u).unwrap();
        assert!((&bwu - &op.b(&u, &w).unwrap()).coeff_norm() < 1e-14 * bwu.coeff_norm());
    }

    #[test]
    fn trilinear_examples() {
        let g = grid2();
        let u = random_field(&g, 2, 1.0, 8);
        let scale = l2_norm(&u).powi(2) * crate::operators::derivative_norm(&u, 1);
        for b in [0.1, 0.5, 0.9] {
            let t = trilinear_pairing(&NonlinearitySpec::Svplechac { b }, &u).unwrap();
            assert!(t.abs() < 1e-10 * scale, "b={b}: {t}");
        }
        let v = leray_project(&u).unwrap();
        assert!(trilinear_pairing(&NonlinearitySpec::Advection, &v).unwrap().abs() < 1e-10 * scale);
    }

    #[test]
    fn advection_of_gradient_field_pairs_nonzero() {
        // u = ∇(cos x₁ + cos x₂ + cos(x₁+x₂)); (u·∇u, u) = −½∫ div u |u|² = 2π²
        // by symbolic integration.
        let g = TorusGrid::new(2, 2.0 * PI, 16).unwrap();
        let phi = crate::field::forward_transform(
            &PhysicalField::from_fn(g, 1, |x| vec![x[0].cos() + x[1].cos() + (x[0] + x[1]).cos()]).unwrap(),
        );
        let u = gradient(&phi).unwrap();
        let t = trilinear_pairing(&NonlinearitySpec::Advection, &u).unwrap();
        let oracle = 2.0 * PI * PI;
        assert!((t - oracle).abs() < 1e-10 * oracle, "{t} vs {oracle}");
    }

    #[test]
    fn polarization_examples() {
        let g = grid2();
        let spec = NonlinearitySpec::Advection;
        let u1 = random_field(&g, 2, 1.0, 30);
        let u2 = random_field(&g, 2, 1.0, 31);
        assert_eq!(polarization_residual(&spec, &u1, &u1).unwrap(), 0.0);
        let z = FourierField::zeros(g, 2);
        let scale = l2_norm(&eval_d(&spec, &u1).unwrap());
        assert!(polarization_residual(&spec, &u1, &z).unwrap() < 1e-14 * scale);
        assert!(polarization_residual(&spec, &u1, &u2).unwrap() < 1e-12 * scale);
    }

    #[test]
    fn spec_validation() {
        assert!(NonlinearitySpec::Svplechac { b: 1.0 }.validate(2).is_err());
        assert!(NonlinearitySpec::Svplechac { b: 0.0 }.validate(2).is_err());
        let t = BilinearTensor::advection(3);
        assert!(NonlinearitySpec::Custom { tensor: t }.validate(2).is_err());
        assert!(BilinearTensor::try_from(vec![vec![vec![0.0; 4]; 2]; 3]).is_err());
    }

    #[test]
    fn tensor_nested_round_trip() {
        let t = BilinearTensor::svplechac(3, 0.25);
        let nested: Vec<Vec<Vec<f64>>> = t.clone().into();
        assert_eq!(nested.len(), 3);
        assert_eq!(nested[0][0].len(), 9);
        assert_eq!(BilinearTensor::try_from(nested).unwrap(), t);
    }
}
