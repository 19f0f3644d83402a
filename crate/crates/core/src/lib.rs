//! Bound states of the 2+1 dimensional Dirac equation with an attractive
//! delta-shell potential `V(r) = -a δ(r - r0)`.
//!
//! The crate is layered bottom-up:
//!
//! * [`specfun`]: integer-order modified Bessel functions `I_n`, `K_n` and a
//!   complex-argument `J_n` series used as a cross-check.
//! * [`dirac`]: physical types, analytic inner/outer radial solutions, the
//!   SO(2) transfer matrix across the shell and the matching residual.
//! * [`spectrum`]: root scanning and refinement, normalization, sampling of
//!   wavefunctions and parameter scans.
//! * [`oracle`]: an independent shooting solver for a smoothed shell, with
//!   extrapolation of the smoothing width to zero.
//! * [`verify`]: the invariant battery behind the `verify` subcommand.
//! * [`cli`]: argument parsing, table output and subcommand drivers.
//!
//! Natural units `ħ = c = 1` are used throughout.

pub mod cli;
pub mod dirac;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod specfun;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
