//! Independent check of the analytic matching condition.
//!
//! The delta shell is replaced by a narrow bump of the same area, the radial
//! system is integrated outward from the origin and inward from the decaying
//! tail, and energies are found where the two spinor angles agree at `r0`.
//! Nothing here uses Bessel functions or the transfer matrix: start values
//! come from the frozen-coefficient limits of the radial system at small and
//! large `r`.

mod extrapolate;
mod integrator;
mod potential;
mod shoot;

pub use extrapolate::{extrapolate_to_zero_width, fit_power_law_limit, PowerLawFit, ZeroWidthEstimate, DEFAULT_SIGMA_LADDER};
pub use integrator::{dopri5_step, IntegrationConfig, SolutionTrace, TracePoint};
pub use potential::{regularized_potential, BumpShape, RegularizedPotential};
pub use shoot::{default_oracle_search, integrate_inward, integrate_outward, shoot_bound_state, shooting_mismatch};
