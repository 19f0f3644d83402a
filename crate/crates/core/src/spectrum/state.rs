use serde::{Deserialize, Serialize};

use super::search::{RootEstimate, ScanOutcome};
use crate::dirac::{apply_transfer, inner_solution, outer_solution, transfer_matrix, Channel, Kappa, ShellParams, SpinorSample};
use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// The outer integration runs to `r0 + DEFAULT_CUTOFF_DECAY_LENGTHS / κ`.
pub const DEFAULT_CUTOFF_DECAY_LENGTHS: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub bracket_history: Vec<(f64, f64)>,
    pub scan_points: usize,
    pub refined_grid: bool,
    pub warning: Option<String>,
}

/// A converged eigenvalue with the data needed to rebuild its wavefunction.
///
/// Inside the shell the state is `norm_constant · inner(r)`; outside it is
/// `norm_constant · outer_coefficient · outer(r)`, where both analytic
/// solutions have unit norm at `r0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub channel: Channel,
    pub energy: f64,
    pub kappa: Kappa,
    /// `M - |E|`
    pub binding: f64,
    pub residual_at_root: f64,
    pub norm_constant: f64,
    pub outer_coefficient: f64,
    pub diagnostics: Diagnostics,
}

impl BoundState {
    /// Build an unnormalized state (`norm_constant = 1`) from a refined root.
    pub fn from_root(ch: Channel, p: &ShellParams, root: &RootEstimate, scan: &ScanOutcome) -> Result<BoundState> {
        let energy = root.x;
        let kappa = Kappa::from_energy(p.mass, energy)?;
        let inner = inner_solution(ch, energy, p.radius, p)?;
        let outer = outer_solution(ch, energy, p.radius, p)?;
        let rotated = apply_transfer(&transfer_matrix(p.coupling), &inner);
        // both unit vectors, parallel at a root; the dot product fixes the sign
        let outer_coefficient = rotated.f * outer.f + rotated.g * outer.g;
        Ok(BoundState {
            channel: ch,
            energy,
            kappa,
            binding: p.mass - energy.abs(),
            residual_at_root: root.residual,
            norm_constant: 1.0,
            outer_coefficient,
            diagnostics: Diagnostics {
                bracket_history: root.history.clone(),
                scan_points: scan.grid_points,
                refined_grid: scan.refined_grid,
                warning: scan.warning.clone(),
            },
        })
    }

    fn unnormalized(&self, r: f64, p: &ShellParams) -> Result<SpinorSample> {
        if r <= p.radius {
            inner_solution(self.channel, self.energy, r, p)
        } else {
            Ok(outer_solution(self.channel, self.energy, r, p)?.scaled(self.outer_coefficient))
        }
    }
}

/// `normalize_state_with_cutoff` at the default cutoff.
pub fn normalize_state(state: &BoundState, p: &ShellParams) -> Result<BoundState> {
    normalize_state_with_cutoff(state, p, DEFAULT_CUTOFF_DECAY_LENGTHS)
}

/// Fix `norm_constant` so that `∫_0^∞ (F² + G²) dr = 1`.
///
/// Panels are split at `r0`, where the derivative of the integrand jumps.
/// Beyond `R = r0 + decay_lengths/κ` the density decays like `e^{-2κr}` and
/// the tail `ρ(R)/(2κ)` is added analytically.
pub fn normalize_state_with_cutoff(state: &BoundState, p: &ShellParams, decay_lengths: f64) -> Result<BoundState> {
    let kappa = state.kappa.value();
    if !(kappa > 0.0) {
        return Err(Error::DegenerateKappa { energy: state.energy, mass: p.mass });
    }
    let r0 = p.radius;
    let density = |r: f64| state.unnormalized(r, p).map(|s| s.norm_sq());

    let inner = integrate(density, 0.0, r0, &[], 1e-14, 0.0)?;
    let cutoff = r0 + decay_lengths / kappa;
    let panels = decay_lengths.ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (1..panels)
        .map(|k| r0 + (cutoff - r0) * k as f64 / panels as f64)
        .collect();
    let outer = integrate(density, r0, cutoff, &breaks, 1e-14, 0.0)?;
    let tail = density(cutoff)? / (2.0 * kappa);

    let total = inner.value + outer.value + tail;
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Quadrature { a: 0.0, b: cutoff, estimate: total });
    }
    Ok(BoundState {
        norm_constant: total.sqrt().recip(),
        ..state.clone()
    })
}

/// Normalized `(F, G)` at each radius: the inner solution on `(0, r0]`, the
/// glued outer solution beyond.
pub fn sample_wavefunction(state: &BoundState, p: &ShellParams, grid: &[f64]) -> Result<Vec<SpinorSample>> {
    grid.iter()
        .map(|&r| {
            if !(r > 0.0) {
                return Err(Error::Domain { function: "sample_wavefunction radius", x: r });
            }
            Ok(state.unnormalized(r, p)?.scaled(state.norm_constant))
        })
        .collect()
}

/// The normalized one-sided values `(r0⁻, r0⁺)` at the shell.
pub fn shell_samples(state: &BoundState, p: &ShellParams) -> Result<(SpinorSample, SpinorSample)> {
    let n = state.norm_constant;
    let minus = inner_solution(state.channel, state.energy, p.radius, p)?.scaled(n);
    let plus = outer_solution(state.channel, state.energy, p.radius, p)?.scaled(n * state.outer_coefficient);
    Ok((minus, plus))
}
