//! Invariant battery run by the `verify` subcommand.
//!
//! Every check measures a worst-case error over a fixed, deterministic sample
//! and compares it with its tolerance. A check that cannot be evaluated at all
//! (a solver error) is reported as failed with the error in `detail`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dirac::{
    inner_solution, outer_solution, radial_residual, transfer_matrix, wrap_half_turn, Channel, Kappa,
    ShellParams,
};
use crate::error::Result;
use crate::specfun::{bessel_i_scaled, bessel_k_scaled, complex_bessel_j_series, BesselOrder};
use crate::spectrum::{find_bound_states, shell_samples, BoundState, SearchConfig};

pub const WRONSKIAN_TOL: f64 = 1e-12;
pub const RECURRENCE_TOL: f64 = 1e-10;
pub const BRIDGE_TOL: f64 = 1e-10;
pub const TRANSFER_TOL: f64 = 1e-14;
pub const GROUP_LAW_TOL: f64 = 1e-13;
pub const ODE_RESIDUAL_TOL: f64 = 1e-6;
pub const NORM_CONTINUITY_TOL: f64 = 1e-10;
pub const PHASE_JUMP_TOL: f64 = 1e-9;
pub const REFLECTION_TOL: f64 = 1e-10;
pub const SCALE_COVARIANCE_TOL: f64 = 1e-9;

/// Largest Bessel order in the identity checks.
pub const MAX_ORDER: u32 = 20;
/// Largest order in the `J_n(ix) = iⁿ I_n(x)` bridge.
pub const MAX_BRIDGE_ORDER: u32 = 10;
pub const ARGUMENT_RANGE: (f64, f64) = (0.1, 30.0);
pub const GROUP_LAW_PAIRS: usize = 100;
pub const ODE_GRID_POINTS: usize = 1000;
pub const SCALE_FACTORS: [f64; 3] = [0.5, 2.0, 10.0];

const SEED: u64 = 0x5eed_0d1a;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub name: &'static str,
    pub worst_error: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
    pub detail: String,
}

impl InvariantReport {
    fn measured(name: &'static str, worst_error: f64, tolerance: f64, samples: usize) -> Self {
        InvariantReport {
            name,
            worst_error,
            tolerance,
            samples,
            passed: worst_error <= tolerance,
            detail: String::new(),
        }
    }

    fn from_result(name: &'static str, tolerance: f64, r: Result<(f64, usize)>) -> Self {
        match r {
            Ok((worst, n)) => InvariantReport::measured(name, worst, tolerance, n),
            Err(e) => InvariantReport {
                name,
                worst_error: f64::INFINITY,
                tolerance,
                samples: 0,
                passed: false,
                detail: e.to_string(),
            },
        }
    }
}

/// Log-spaced arguments covering [`ARGUMENT_RANGE`].
pub fn argument_grid(count: usize) -> Vec<f64> {
    let (lo, hi) = ARGUMENT_RANGE;
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|k| (lo.ln() + step * k as f64).exp().clamp(lo, hi))
        .collect()
}

/// Physical parameter sets probed by the spectral checks.
pub fn probe_params() -> Vec<ShellParams> {
    let mut out = Vec::new();
    for a in [0.3, 0.7, 1.1, 1.5] {
        for r0 in [0.5, 1.0, 2.0, 5.0] {
            out.push(ShellParams::new(1.0, r0, a).expect("valid probe"));
        }
    }
    out
}

/// Channels probed by the spectral checks.
pub fn probe_channels() -> Vec<Channel> {
    [1, -1, 3, -3, 5, -5]
        .into_iter()
        .map(|t| Channel::new(t).expect("odd"))
        .collect()
}

/// `I_n K_{n+1} + I_{n+1} K_n = 1/x`, as `|x(…) - 1|`.
pub fn wronskian_check(xs: &[f64]) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    for n in 0..=MAX_ORDER {
        for &x in xs {
            let i0 = bessel_i_scaled(BesselOrder::new(n), x)?;
            let i1 = bessel_i_scaled(BesselOrder::new(n + 1), x)?;
            let k0 = bessel_k_scaled(BesselOrder::new(n), x)?;
            let k1 = bessel_k_scaled(BesselOrder::new(n + 1), x)?;
            let shift = (i0.log_scale + k1.log_scale).exp();
            let w = x * (i0.mantissa * k1.mantissa + i1.mantissa * k0.mantissa) * shift;
            worst = worst.max((w - 1.0).abs());
        }
    }
    Ok((worst, (MAX_ORDER as usize + 1) * xs.len()))
}

/// `I_{n-1} - I_{n+1} = (2n/x) I_n` and `K_{n+1} - K_{n-1} = (2n/x) K_n`,
/// relative to the largest term.
pub fn recurrence_check(xs: &[f64]) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    for n in 1..=MAX_ORDER {
        for &x in xs {
            let o = |k: u32| BesselOrder::new(k);
            let im = bessel_i_scaled(o(n - 1), x)?.mantissa;
            let ic = bessel_i_scaled(o(n), x)?.mantissa;
            let ip = bessel_i_scaled(o(n + 1), x)?.mantissa;
            let lhs = im - ip;
            let rhs = 2.0 * n as f64 / x * ic;
            worst = worst.max((lhs - rhs).abs() / im.abs().max(rhs.abs()));

            let km = bessel_k_scaled(o(n - 1), x)?.mantissa;
            let kc = bessel_k_scaled(o(n), x)?.mantissa;
            let kp = bessel_k_scaled(o(n + 1), x)?.mantissa;
            let lhs = kp - km;
            let rhs = 2.0 * n as f64 / x * kc;
            worst = worst.max((lhs - rhs).abs() / kp.abs().max(rhs.abs()));
        }
    }
    Ok((worst, 2 * MAX_ORDER as usize * xs.len()))
}

/// `J_n(ix) = iⁿ I_n(x)`, relative error.
pub fn bridge_check(xs: &[f64]) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    for n in 0..=MAX_BRIDGE_ORDER {
        let phase = Complex64::i().powu(n);
        for &x in xs {
            let j = complex_bessel_j_series(BesselOrder::new(n), Complex64::new(0.0, x))?;
            let i = bessel_i_scaled(BesselOrder::new(n), x)?;
            let expected = phase * i.value();
            worst = worst.max((j - expected).norm() / expected.norm());
        }
    }
    Ok((worst, (MAX_BRIDGE_ORDER as usize + 1) * xs.len()))
}

fn angle_pairs() -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..GROUP_LAW_PAIRS)
        .map(|_| (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)))
        .collect()
}

/// `AᵀA = 1` and `det A = 1` for every angle in the group-law sample.
pub fn transfer_orthogonality_check() -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let pairs = angle_pairs();
    for &(a, b) in &pairs {
        for m in [transfer_matrix(a), transfer_matrix(b)] {
            worst = worst
                .max(m.orthogonality_defect())
                .max((m.determinant() - 1.0).abs());
        }
    }
    (worst, 2 * pairs.len())
}

/// `A(a₁) A(a₂) = A(a₁ + a₂)`, entrywise.
pub fn group_law_check() -> (f64, usize) {
    let pairs = angle_pairs();
    let worst = pairs
        .iter()
        .map(|&(a, b)| {
            transfer_matrix(a)
                .compose(&transfer_matrix(b))
                .max_abs_diff(&transfer_matrix(a + b))
        })
        .fold(0.0, f64::max);
    (worst, pairs.len())
}

/// Five-point residual of the inner and outer solutions on grids of
/// [`ODE_GRID_POINTS`] radii each, staying 1% of `r0` clear of the shell.
pub fn ode_residual_check(channels: &[Channel], p: &ShellParams, energies: &[f64]) -> Result<(f64, usize)> {
    let r0 = p.radius;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &ch in channels {
        for &e in energies {
            let kappa = Kappa::from_energy(p.mass, e)?.value();
            let step = |r: f64| 1e-3 * r.min(r0).min(1.0 / kappa).min(1.0 / p.mass);
            let n = ODE_GRID_POINTS;
            let (ilo, ihi) = (0.01 * r0, 0.99 * r0);
            for k in 0..n {
                let r = ilo + (ihi - ilo) * k as f64 / (n - 1) as f64;
                let res = radial_residual(ch, e, p.mass, r, step(r), |s| inner_solution(ch, e, s, p))?;
                worst = worst.max(res);
            }
            let (olo, ohi) = (1.01 * r0, r0 + 30.0 / kappa);
            for k in 0..n {
                let r = olo + (ohi - olo) * k as f64 / (n - 1) as f64;
                let res = radial_residual(ch, e, p.mass, r, step(r), |s| outer_solution(ch, e, s, p))?;
                worst = worst.max(res);
            }
            count += 2 * n;
        }
    }
    Ok((worst, count))
}

fn all_states(params: &[ShellParams], channels: &[Channel], cfg: &SearchConfig) -> Result<Vec<(ShellParams, BoundState)>> {
    let jobs: Vec<(ShellParams, Channel)> = params
        .iter()
        .flat_map(|p| channels.iter().map(move |&ch| (*p, ch)))
        .collect();
    let found: Vec<Result<Vec<BoundState>>> = jobs
        .par_iter()
        .map(|(p, ch)| find_bound_states(*ch, p, cfg))
        .collect();
    let mut out = Vec::new();
    for ((p, _), states) in jobs.iter().zip(found) {
        out.extend(states?.into_iter().map(|s| (*p, s)));
    }
    Ok(out)
}

/// Worst `(norm continuity, phase jump)` errors over all given states.
///
/// Norm continuity is `|ρ⁺ - ρ⁻| / ρ⁻`; the phase jump error is the
/// distance of `θ⁺ - θ⁻` from `-a` modulo π.
pub fn shell_condition_errors(states: &[(ShellParams, BoundState)]) -> Result<(f64, f64)> {
    let mut norm: f64 = 0.0;
    let mut phase: f64 = 0.0;
    for (p, s) in states {
        let (minus, plus) = shell_samples(s, p)?;
        norm = norm.max((plus.norm_sq() - minus.norm_sq()).abs() / minus.norm_sq());
        phase = phase.max(wrap_half_turn(plus.angle() - minus.angle() + p.coupling).abs());
    }
    Ok((norm, phase))
}

fn energies_of(ch: Channel, p: &ShellParams, cfg: &SearchConfig) -> Result<Vec<f64>> {
    Ok(find_bound_states(ch, p, cfg)?.into_iter().map(|s| s.energy).collect())
}

fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `E(-j; -a) = -E(j; a)` on every probe, in units of `M`. The channel
/// reflection swaps `F ↔ G`, which maps the potential term onto its negative.
pub fn reflection_check(params: &[ShellParams], channels: &[Channel], cfg: &SearchConfig) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for p in params {
        for &ch in channels.iter().filter(|c| c.is_positive()) {
            let direct = energies_of(ch, p, cfg)?;
            let mut mirrored: Vec<f64> = energies_of(ch.negated(), &p.with_reversed_coupling(), cfg)?
                .into_iter()
                .map(|e| -e)
                .collect();
            mirrored.sort_by(f64::total_cmp);
            worst = worst.max(spectrum_distance(&direct, &mirrored) / p.mass);
            count += direct.len().max(1);
        }
    }
    Ok((worst, count))
}

/// The literal statement `E(-j; a) = -E(j; a)` at fixed coupling.
pub fn fixed_coupling_reflection_check(params: &[ShellParams], channels: &[Channel], cfg: &SearchConfig) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for p in params {
        for &ch in channels.iter().filter(|c| c.is_positive()) {
            let direct = energies_of(ch, p, cfg)?;
            let mut mirrored: Vec<f64> = energies_of(ch.negated(), p, cfg)?.into_iter().map(|e| -e).collect();
            mirrored.sort_by(f64::total_cmp);
            worst = worst.max(spectrum_distance(&direct, &mirrored) / p.mass);
            count += direct.len().max(1);
        }
    }
    Ok((worst, count))
}

/// `E(sM, r0/s, a) = s E(M, r0, a)`, relative to `sM`.
pub fn scale_covariance_check(params: &[ShellParams], channels: &[Channel], cfg: &SearchConfig) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for p in params {
        for &ch in channels {
            let base = energies_of(ch, p, cfg)?;
            for s in SCALE_FACTORS {
                let scaled: Vec<f64> = base.iter().map(|e| s * e).collect();
                let got = energies_of(ch, &p.rescaled(s)?, cfg)?;
                worst = worst.max(spectrum_distance(&got, &scaled) / (s * p.mass));
                count += base.len().max(1);
            }
        }
    }
    Ok((worst, count))
}

/// Runs the whole battery in a fixed order.
pub fn run_battery(cfg: &SearchConfig) -> Vec<InvariantReport> {
    let xs = argument_grid(300);
    let params = probe_params();
    let channels = probe_channels();
    let mut out = vec![
        InvariantReport::from_result("bessel_wronskian", WRONSKIAN_TOL, wronskian_check(&xs)),
        InvariantReport::from_result("bessel_recurrence", RECURRENCE_TOL, recurrence_check(&xs)),
        InvariantReport::from_result("bessel_j_bridge", BRIDGE_TOL, bridge_check(&xs)),
    ];
    let (w, n) = transfer_orthogonality_check();
    out.push(InvariantReport::measured("transfer_orthogonality", w, TRANSFER_TOL, n));
    let (w, n) = group_law_check();
    out.push(InvariantReport::measured("transfer_group_law", w, GROUP_LAW_TOL, n));

    let ode_params = [
        ShellParams::new(1.0, 1.0, 0.5).expect("valid"),
        ShellParams::new(1.0, 0.3, 1.0).expect("valid"),
        ShellParams::new(2.0, 3.0, 0.2).expect("valid"),
    ];
    let ode = ode_params.iter().try_fold((0.0f64, 0usize), |(w, n), p| {
        let es: Vec<f64> = [-0.95, -0.5, 0.0, 0.6, 0.99].iter().map(|e| e * p.mass).collect();
        ode_residual_check(&channels, p, &es).map(|(w2, n2)| (w.max(w2), n + n2))
    });
    out.push(InvariantReport::from_result("ode_residual", ODE_RESIDUAL_TOL, ode));

    match all_states(&params, &channels, cfg).and_then(|s| {
        let (norm, phase) = shell_condition_errors(&s)?;
        Ok((norm, phase, s.len()))
    }) {
        Ok((norm, phase, n)) => {
            out.push(InvariantReport::measured("shell_norm_continuity", norm, NORM_CONTINUITY_TOL, n));
            out.push(InvariantReport::measured("shell_phase_jump", phase, PHASE_JUMP_TOL, n));
        }
        Err(e) => {
            for (name, tol) in [
                ("shell_norm_continuity", NORM_CONTINUITY_TOL),
                ("shell_phase_jump", PHASE_JUMP_TOL),
            ] {
                out.push(InvariantReport::from_result(name, tol, Err(e.clone())));
            }
        }
    }
    out.push(InvariantReport::from_result(
        "spectral_reflection",
        REFLECTION_TOL,
        reflection_check(&params, &channels, cfg),
    ));
    out.push(InvariantReport::from_result(
        "scale_covariance",
        SCALE_COVARIANCE_TOL,
        scale_covariance_check(&params, &channels, cfg),
    ));
    out
}

/// Name of the first failing invariant, if any.
pub fn first_failure(reports: &[InvariantReport]) -> Option<&InvariantReport> {
    reports.iter().find(|r| !r.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argument_grid_spans_range() {
        let xs = argument_grid(50);
        assert!((xs[0] - 0.1).abs() < 1e-15);
        assert!((xs[49] - 30.0).abs() < 1e-12);
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn angle_pairs_are_reproducible() {
        assert_eq!(angle_pairs(), angle_pairs());
    }

    #[test]
    fn transfer_checks_pass() {
        assert!(transfer_orthogonality_check().0 <= TRANSFER_TOL);
        assert!(group_law_check().0 <= GROUP_LAW_TOL);
    }

    #[test]
    fn spectrum_distance_flags_count_mismatch() {
        assert_eq!(spectrum_distance(&[0.1], &[]), f64::INFINITY);
        assert_eq!(spectrum_distance(&[], &[]), 0.0);
    }
}
