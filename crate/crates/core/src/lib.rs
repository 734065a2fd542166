//! Pseudo-spectral solver and verification diagnostics for spatially periodic
//! Navier–Stokes-type systems with a configurable bilinear nonlinearity, plus
//! the radial self-similar reduction of one such system.

// NaN must fail range checks, so `!(x > 0.0)` is intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod integrator;
pub mod nonlinearity;
pub mod operators;
pub mod radial;
pub mod random;
pub mod snapshot;

pub use error::{Error, Result};
pub use field::{forward_transform, inverse_transform, FourierField, PhysicalField};
pub use grid::TorusGrid;
pub use integrator::{ForcingSpec, Integrator, Scheme, SimConfig, SimulationState, Trajectory};
pub use nonlinearity::{BilinearTensor, NonlinearOperator, NonlinearitySpec};
