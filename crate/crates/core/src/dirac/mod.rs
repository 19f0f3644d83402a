//! Physical types and the analytic content of the delta-shell problem.
//!
//! The radial system (with `ψ ∝ r^{-1/2} (F e^{i(j-1/2)φ}, G e^{i(j+1/2)φ})`) is
//!
//! ```text
//!  G' + (j/r) G = (E - V - M) F
//! -F' + (j/r) F = (E - V + M) G
//! ```
//!
//! Writing `(F, G) = ρ (sin θ, cos θ)`, the delta shell contributes `θ' ∋ V`,
//! so crossing the shell rotates the spinor by `-a` and leaves `ρ` unchanged.

mod matching;
mod solution;
mod transfer;
mod types;

pub use matching::{
    matching_residual, mobius_residual, phase_jump, reflect_negative_j, reflect_sample,
    shell_angles, wrap_half_turn,
};
pub use solution::{inner_ratio, inner_solution, outer_ratio, outer_solution, radial_residual};
pub use transfer::{apply_transfer, transfer_matrix, TransferMatrix};
pub use types::{Channel, Kappa, ShellParams, SpinorSample, GAP_MARGIN};
