use std::f64::consts::{FRAC_PI_2, PI};

use super::{inner_ratio, inner_solution, outer_ratio, outer_solution, Channel, ShellParams, SpinorSample};
use crate::error::{Error, Result};

/// Map an angle into `(-π/2, π/2]`.
pub fn wrap_half_turn(x: f64) -> f64 {
    let w = x - PI * (x / PI).round();
    if w <= -FRAC_PI_2 {
        w + PI
    } else if w > FRAC_PI_2 {
        w - PI
    } else {
        w
    }
}

/// Spinor angles `(θ⁻, θ⁺)` of the inner and outer solutions at `r0`,
/// with `θ = atan2(F, G)`.
pub fn shell_angles(ch: Channel, energy: f64, p: &ShellParams) -> Result<(f64, f64)> {
    p.check_in_window(energy)?;
    let inner = inner_solution(ch, energy, p.radius, p)?;
    let outer = outer_solution(ch, energy, p.radius, p)?;
    Ok((inner.angle(), outer.angle()))
}

/// `θ⁺ - θ⁻` at `r0`, unwrapped.
pub fn phase_jump(ch: Channel, energy: f64, p: &ShellParams) -> Result<f64> {
    let (minus, plus) = shell_angles(ch, energy, p)?;
    Ok(plus - minus)
}

/// Angle-form matching residual `wrap(θ⁺ - θ⁻ + a)`.
///
/// The shell rotates the spinor by `-a`, so a bound state needs the outer
/// solution parallel to the rotated inner one. Both solutions carry an
/// arbitrary sign, hence the wrap is modulo π. The residual is continuous
/// where `G` changes sign; its only jumps sit at maximal mismatch `±π/2`,
/// far from any root.
pub fn matching_residual(ch: Channel, energy: f64, p: &ShellParams) -> Result<f64> {
    let jump = phase_jump(ch, energy, p)?;
    Ok(wrap_half_turn(jump + p.coupling))
}

/// Möbius-form residual `F⁺/G⁺ - (ρ - α)/(1 + αρ)` with `ρ = F⁻/G⁻` and
/// `α = tan a`. Has poles and is undefined at `a = π/2 + kπ`; only used to
/// cross-check root locations of [`matching_residual`].
pub fn mobius_residual(ch: Channel, energy: f64, p: &ShellParams) -> Result<f64> {
    let alpha = p.alpha().ok_or_else(|| {
        Error::InvalidParameter(format!(
            "tan(a) diverges at a = {}; use the angle form",
            p.coupling
        ))
    })?;
    let rho = inner_ratio(ch, energy, p)?;
    let outer = outer_ratio(ch, energy, p)?;
    Ok(outer - (rho - alpha) / (1.0 + alpha * rho))
}

/// `(j, E) → (-j, -E)`; pair with [`reflect_sample`] for `F ↔ G`.
///
/// This is an exact symmetry of the free radial system. With a potential
/// it also flips `V → -V`, so the spectrum of `-j` at coupling `a` is the
/// negated spectrum of `j` at coupling `-a`.
pub fn reflect_negative_j(ch: Channel, energy: f64) -> (Channel, f64) {
    (ch.negated(), -energy)
}

pub fn reflect_sample(s: &SpinorSample) -> SpinorSample {
    SpinorSample::new(s.r, s.g, s.f)
}
