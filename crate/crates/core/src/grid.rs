//! Uniform grids on the n-torus `(0, ℓ)^n` and the matching modal lattice.
//!
//! Lattice indices follow FFT storage order along every axis: index `j` holds
//! wavenumber `j` for `j < N/2` and `j - N` otherwise, so each component of a
//! wavevector lies in `[-N/2, N/2)`. Flat indices are row-major with axis 0
//! varying slowest.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 4;

/// Integer wavevector; entries beyond the grid dimension are zero.
pub type Mode = [i64; MAX_DIM];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    period: f64,
    points: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, period: f64, points: usize) -> Result<Self> {
        let mut problems = Vec::new();
        if !(2..=MAX_DIM).contains(&dim) {
            problems.push(format!("dimension must be 2, 3 or 4 (got {dim})"));
        }
        if !(period.is_finite() && period > 0.0) {
            problems.push(format!("period must be positive (got {period})"));
        }
        if points < 8 || !points.is_multiple_of(2) {
            problems.push(format!("points per dimension must be even and >= 8 (got {points})"));
        }
        if problems.is_empty() {
            Ok(Self { dim, period, points })
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of grid points (and lattice modes), `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `2π/ℓ`.
    pub fn wavenumber_scale(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// `ℓ^n`.
    pub fn volume(&self) -> f64 {
        self.period.powi(self.dim as i32)
    }

    /// Quadrature weight of one grid point, `(ℓ/N)^n`.
    pub fn cell_volume(&self) -> f64 {
        (self.period / self.points as f64).powi(self.dim as i32)
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.points as f64
    }

    /// Wavevector stored at a flat index.
    pub fn mode(&self, mut flat: usize) -> Mode {
        let n = self.points;
        let half = (n / 2) as i64;
        let mut k = [0i64; MAX_DIM];
        for axis in (0..self.dim).rev() {
            let j = (flat % n) as i64;
            flat /= n;
            k[axis] = if j < half { j } else { j - n as i64 };
        }
        k
    }

    /// Flat index holding wavevector `k` (taken modulo `N` per axis).
    pub fn index_of(&self, k: &Mode) -> usize {
        let n = self.points as i64;
        k[..self.dim]
            .iter()
            .fold(0usize, |acc, &kj| acc * self.points + kj.rem_euclid(n) as usize)
    }

    /// Flat index of the Hermitian partner `-k`.
    pub fn partner_index(&self, flat: usize) -> usize {
        let mut k = self.mode(flat);
        k.iter_mut().for_each(|kj| *kj = -*kj);
        self.index_of(&k)
    }

    /// Any component equals `-N/2`.
    pub fn is_nyquist(&self, k: &Mode) -> bool {
        let half = (self.points / 2) as i64;
        k[..self.dim].iter().any(|&kj| kj == -half)
    }

    /// `(k, k)` on the integer lattice.
    pub fn norm_sq(&self, k: &Mode) -> i64 {
        k[..self.dim].iter().map(|kj| kj * kj).sum()
    }

    /// All wavevectors in storage order.
    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.len()).map(move |i| self.mode(i))
    }

    /// Physical coordinate of a flat grid index.
    pub fn point(&self, mut flat: usize) -> [f64; MAX_DIM] {
        let h = self.spacing();
        let mut x = [0.0; MAX_DIM];
        for axis in (0..self.dim).rev() {
            x[axis] = (flat % self.points) as f64 * h;
            flat /= self.points;
        }
        x
    }

    pub fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Shape(format!("grid mismatch: {self:?} vs {other:?}")))
        }
    }
}
