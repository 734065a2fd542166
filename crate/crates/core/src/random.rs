//! Seed-determined random band-limited fields.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::field::FourierField;
use crate::grid::TorusGrid;

/// Random real field with every `|k_j| <= N/4`, Hermitian-symmetric, with
/// `Σ_k |c_k|² = amplitude²` (the mean-square of the field).
pub fn random_field(grid: &TorusGrid, components: usize, amplitude: f64, seed: u64) -> FourierField {
    random_band_limited(grid, components, amplitude, grid.points() / 4, seed)
}

/// As [`random_field`] with an explicit per-axis band limit. The spectrum
/// decays like `(1 + |k|²)^{-1}` so the samples are smooth.
pub fn random_band_limited(
    grid: &TorusGrid,
    components: usize,
    amplitude: f64,
    band: usize,
    seed: u64,
) -> FourierField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = band.min(grid.points() / 2 - 1) as i64;
    let mut f = FourierField::zeros(*grid, components);
    for c in 0..components {
        let comp = f.component_mut(c);
        for (i, slot) in comp.iter_mut().enumerate() {
            let k = grid.mode(i);
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if k[..grid.dim()].iter().all(|kj| kj.abs() <= band) {
                let weight = 1.0 / (1.0 + grid.norm_sq(&k) as f64);
                *slot = Complex64::new(re, im) * weight;
            }
        }
    }
    let mut f = f.symmetrized();
    let norm = f.coeff_norm();
    if norm > 0.0 {
        f = f.scaled(amplitude / norm);
    }
    f
}

/// Random field with vanishing mean mode.
pub fn random_zero_mean(grid: &TorusGrid, components: usize, amplitude: f64, seed: u64) -> FourierField {
    let mut f = random_field(grid, components, 1.0, seed);
    for c in 0..components {
        f.component_mut(c)[0] = Complex64::new(0.0, 0.0);
    }
    let norm = f.coeff_norm();
    f.scaled(amplitude / norm)
}
