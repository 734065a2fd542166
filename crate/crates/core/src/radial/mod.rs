//! Radial reduction `u = −A v(|x|, t) x` of the ersatz system, its
//! self-similar profile ODE and the cross-checks between them.

mod consistency;
mod pde;
mod selfsim;
mod shooting;

pub use consistency::{
    radial_to_vector_field, sample_box, selfsim_consistency_residual, vector_system_residual, ConsistencyReport,
    ResidualBox,
};
pub use pde::{radial_rhs, radial_run, stable_dt, FarField, RadialRun, RadialState, MIN_INTERVALS};
pub use selfsim::{selfsim_ode_integrate, series_second_derivative, OdeOptions, SelfSimProblem, SelfSimProfile};
pub use shooting::{shoot_farfield, ScanPoint, ShootOptions, ShootOutcome};
