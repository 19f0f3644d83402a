use super::integrator::{integrate_path, IntegrationConfig, SolutionTrace, Stop};
use super::potential::{regularized_potential, BumpShape, RegularizedPotential};
use crate::dirac::{wrap_half_turn, Channel, ShellParams};
use crate::error::{Error, Result};
use crate::spectrum::{scan_roots, SearchConfig};

/// Search settings for the shooting oracle. The mismatch carries integrator
/// noise near 1e-10, so the residual acceptance is looser than the analytic
/// solver's.
pub fn default_oracle_search() -> SearchConfig {
    SearchConfig {
        residual_tol: 1e-8,
        ..SearchConfig::default()
    }
}

fn radial_rhs(ch: Channel, energy: f64, mass: f64, v: &RegularizedPotential) -> impl Fn(f64, [f64; 2]) -> [f64; 2] + '_ {
    let j = ch.j();
    move |r, y| {
        let pot = v.value(r);
        [
            (j / r) * y[0] - (energy - pot + mass) * y[1],
            -(j / r) * y[1] + (energy - pot - mass) * y[0],
        ]
    }
}

fn check_energy(energy: f64, mass: f64) -> Result<()> {
    if energy.is_finite() && energy.abs() < mass {
        Ok(())
    } else {
        Err(Error::Domain {
            function: "shooting energy outside the mass gap",
            x: energy,
        })
    }
}

/// Knots and targets merged into stops along the travel direction. Pieces
/// whose midpoint lies in the bump support are limited to half a width.
fn build_stops(from: f64, to: f64, targets: &[f64], v: &RegularizedPotential) -> Vec<Stop> {
    let (lo, hi) = (from.min(to), from.max(to));
    let (s_lo, s_hi) = v.support();
    let mut knots: Vec<(f64, bool)> = [s_lo, s_hi, v.radius]
        .into_iter()
        .filter(|&k| k > lo && k < hi)
        .map(|k| (k, false))
        .collect();
    knots.extend(targets.iter().map(|&t| (t, true)));
    if from < to {
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
    } else {
        knots.sort_by(|a, b| b.0.total_cmp(&a.0));
    }
    let mut stops: Vec<Stop> = Vec::with_capacity(knots.len());
    let mut prev = from;
    for (r, record) in knots {
        if let Some(last) = stops.last_mut() {
            if last.r == r {
                last.record |= record;
                continue;
            }
        }
        let mid = 0.5 * (prev + r);
        let max_step = if mid > s_lo && mid < s_hi {
            0.5 * v.sigma
        } else {
            f64::INFINITY
        };
        stops.push(Stop { r, max_step, record });
        prev = r;
    }
    stops
}

/// Integrate the regularized radial system from `r_min` outward, recording
/// the solution at `radii` (ascending, each at least `r_min`).
///
/// Start values are the regular small-`r` behaviour of the free system:
/// `F ∝ r^j, G ≈ (E-M) r F/(2j+1)` for `j > 0` and
/// `G ∝ r^{-j}, F ≈ (E+M) r G/(2j-1)` for `j < 0`.
pub fn integrate_outward(ch: Channel, energy: f64, mass: f64, v: &RegularizedPotential, cfg: &IntegrationConfig, radii: &[f64]) -> Result<SolutionTrace> {
    cfg.validate()?;
    check_energy(energy, mass)?;
    let r_min = cfg.r_min.unwrap_or(1e-6 * v.radius);
    if radii.is_empty() || radii.windows(2).any(|w| w[1] < w[0]) || radii[0] < r_min {
        return Err(Error::InvalidParameter(format!(
            "outward radii must be ascending and at least r_min = {r_min}"
        )));
    }
    let j = ch.j();
    let y0 = if j > 0.0 {
        [1.0, (energy - mass) * r_min / (2.0 * j + 1.0)]
    } else {
        [(energy + mass) * r_min / (2.0 * j - 1.0), 1.0]
    };
    let end = *radii.last().expect("non-empty");
    let stops = build_stops(r_min, end, radii, v);
    let f = radial_rhs(ch, energy, mass, v);
    integrate_path(&f, r_min, y0, &stops, v.radius, cfg)
}

/// Integrate from the decaying tail inward, recording at `radii`
/// (descending). The start vector `(sqrt(M+E), sqrt(M-E))` is the large-`r`
/// decaying mode; its admixture of the growing mode dies off inward.
pub fn integrate_inward(ch: Channel, energy: f64, mass: f64, v: &RegularizedPotential, cfg: &IntegrationConfig, radii: &[f64]) -> Result<SolutionTrace> {
    cfg.validate()?;
    check_energy(energy, mass)?;
    let kappa = ((mass - energy) * (mass + energy)).sqrt();
    let (_, s_hi) = v.support();
    let r_max = cfg.r_max.unwrap_or(s_hi + 40.0 / kappa);
    if kappa * (r_max - v.radius) < 30.0 {
        return Err(Error::InvalidParameter(format!(
            "inward start r_max = {r_max} is fewer than 30 decay lengths beyond the shell"
        )));
    }
    if radii.is_empty() || radii.windows(2).any(|w| w[1] > w[0]) || radii[0] > r_max || *radii.last().unwrap() <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "inward radii must be descending, positive and at most r_max = {r_max}"
        )));
    }
    let y0 = [(mass + energy).sqrt(), (mass - energy).sqrt()];
    let end = *radii.last().expect("non-empty");
    let stops = build_stops(r_max, end, radii, v);
    let f = radial_rhs(ch, energy, mass, v);
    integrate_path(&f, r_max, y0, &stops, v.radius, cfg)
}

/// `wrap(θ_inward - θ_outward)` at `r0`, modulo π.
pub fn shooting_mismatch(ch: Channel, energy: f64, mass: f64, v: &RegularizedPotential, cfg: &IntegrationConfig) -> Result<f64> {
    let r0 = v.radius;
    let out = integrate_outward(ch, energy, mass, v, cfg, &[r0])?;
    let inw = integrate_inward(ch, energy, mass, v, cfg, &[r0])?;
    Ok(wrap_half_turn(inw.points[0].angle() - out.points[0].angle()))
}

/// Bound-state energies of the regularized shell, ascending.
pub fn shoot_bound_state(ch: Channel, p: &ShellParams, sigma: f64, shape: BumpShape, icfg: &IntegrationConfig, search: &SearchConfig) -> Result<Vec<f64>> {
    let v = regularized_potential(p.coupling, p.radius, sigma, shape)?;
    let outcome = scan_roots(
        |e| shooting_mismatch(ch, e, p.mass, &v, icfg),
        p.energy_window(),
        search,
        search.bracket_tol_for(p.mass),
    )?;
    let mut energies: Vec<f64> = outcome.roots.iter().map(|r| r.x).collect();
    energies.sort_by(f64::total_cmp);
    Ok(energies)
}
