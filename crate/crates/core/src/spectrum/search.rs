use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::state::{normalize_state, BoundState};
use crate::dirac::{matching_residual, Channel, ShellParams};
use crate::error::{Error, Result};

/// Adjacent grid values of a wrapped-angle residual that differ by more than
/// this are a branch jump, not a root.
pub const BRANCH_JUMP: f64 = FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Uniform grid size over the energy window; at least 16.
    pub scan_points: usize,
    /// Target bracket width; `None` means `1e-12 · M`.
    pub bracket_tol: Option<f64>,
    pub residual_tol: f64,
    pub max_refinements: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            scan_points: 512,
            bracket_tol: None,
            residual_tol: 1e-10,
            max_refinements: 200,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scan_points < 16 {
            return Err(Error::InvalidParameter(format!(
                "scan_points must be at least 16, got {}",
                self.scan_points
            )));
        }
        if let Some(t) = self.bracket_tol {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("bracket_tol must be positive, got {t}")));
            }
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "residual_tol must be positive, got {}",
                self.residual_tol
            )));
        }
        if self.max_refinements == 0 {
            return Err(Error::InvalidParameter("max_refinements must be positive".into()));
        }
        Ok(())
    }

    pub fn bracket_tol_for(&self, mass: f64) -> f64 {
        self.bracket_tol.unwrap_or(1e-12 * mass)
    }
}

/// A refined root together with the bracket sequence that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootEstimate {
    pub x: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub history: Vec<(f64, f64)>,
}

/// Shrink a sign-changing bracket by bisection with secant steps.
///
/// Every evaluation lies inside `[lo, hi]`. A secant step is taken only while
/// the previous two steps together at least halved the bracket; otherwise
/// the next step bisects. Secant points are kept `tol/4` away from the
/// bracket ends so the bracket can close from either side. Once the bracket
/// is below `tol`, refinement continues while neither end meets
/// `residual_tol`, down to adjacent floats; this matters near the gap edge,
/// where the residual is steep in `E`.
pub fn refine_root<F>(mut f: F, bracket: (f64, f64), tol: f64, residual_tol: f64, max_iter: usize) -> Result<RootEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    let mut history = vec![(lo, hi)];
    if f_lo == 0.0 {
        return Ok(RootEstimate { x: lo, residual: 0.0, bracket: (lo, hi), history });
    }
    if f_hi == 0.0 {
        return Ok(RootEstimate { x: hi, residual: 0.0, bracket: (lo, hi), history });
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::InvalidBracket { lo, hi });
    }

    let mut widths = [hi - lo, hi - lo];
    let mut iterations = 0;
    while hi - lo > tol || f_lo.abs().min(f_hi.abs()) > residual_tol {
        if iterations >= max_iter {
            return Err(Error::NoConvergence { iterations, lo, hi });
        }
        iterations += 1;
        let width = hi - lo;
        let use_secant = width <= 0.5 * widths[0];
        let mut x = if use_secant {
            lo - f_lo * (hi - lo) / (f_hi - f_lo)
        } else {
            0.5 * (lo + hi)
        };
        let pad = 0.25 * tol.min(width);
        x = x.clamp(lo + pad, hi - pad);
        if !(x > lo && x < hi) {
            break;
        }
        let fx = f(x)?;
        if fx == 0.0 {
            history.push((x, x));
            return Ok(RootEstimate { x, residual: 0.0, bracket: (x, x), history });
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        history.push((lo, hi));
        widths = [widths[1], width];
    }

    let mid = 0.5 * (lo + hi);
    let f_mid = f(mid)?;
    let mut best = (mid, f_mid);
    for cand in [(lo, f_lo), (hi, f_hi)] {
        if cand.1.abs() < best.1.abs() {
            best = cand;
        }
    }
    if best.1.abs() > residual_tol {
        return Err(Error::NoConvergence { iterations, lo, hi });
    }
    // Prefer the midpoint whenever it meets the tolerance.
    let (x, residual) = if f_mid.abs() <= residual_tol { (mid, f_mid) } else { best };
    Ok(RootEstimate { x, residual, bracket: (lo, hi), history })
}

/// Result of scanning a window for roots.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub roots: Vec<RootEstimate>,
    pub grid_points: usize,
    pub refined_grid: bool,
    pub warning: Option<String>,
}

fn sign_change_cells(xs: &[f64], fs: &[f64]) -> Vec<usize> {
    (0..xs.len() - 1)
        .filter(|&i| {
            let (a, b) = (fs[i], fs[i + 1]);
            (a >= 0.0) != (b >= 0.0) && (a - b).abs() < BRANCH_JUMP
        })
        .collect()
}

fn crowded(cells: &[usize]) -> bool {
    cells.windows(2).any(|w| w[1] - w[0] <= 2)
}

/// Scan `window` on a uniform grid, bracket every sign change of the
/// wrapped residual `f` and refine each bracket.
///
/// Roots closer than two grid cells trigger one 4× denser rescan; if they
/// are still crowded the outcome carries a warning.
pub fn scan_roots<F>(mut f: F, window: (f64, f64), cfg: &SearchConfig, tol: f64) -> Result<ScanOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    let (lo, hi) = window;
    let grid = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    };

    let mut n = cfg.scan_points;
    let mut xs = grid(n);
    let mut fs = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let mut cells = sign_change_cells(&xs, &fs);
    let mut refined_grid = false;
    if crowded(&cells) {
        n = 4 * (n - 1) + 1;
        xs = grid(n);
        fs = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        cells = sign_change_cells(&xs, &fs);
        refined_grid = true;
    }
    let warning = crowded(&cells).then(|| {
        format!("roots closer than two grid cells remain after refining to {n} points")
    });

    let roots = cells
        .iter()
        .map(|&i| refine_root(&mut f, (xs[i], xs[i + 1]), tol, cfg.residual_tol, cfg.max_refinements))
        .collect::<Result<Vec<_>>>()?;

    Ok(ScanOutcome {
        roots,
        grid_points: n,
        refined_grid,
        warning,
    })
}

/// Refine a bracket of the matching residual.
pub fn refine_bound_state_root(ch: Channel, p: &ShellParams, bracket: (f64, f64), cfg: &SearchConfig) -> Result<RootEstimate> {
    cfg.validate()?;
    refine_root(
        |e| matching_residual(ch, e, p),
        bracket,
        cfg.bracket_tol_for(p.mass),
        cfg.residual_tol,
        cfg.max_refinements,
    )
}

/// All bound states of channel `ch`, ascending in energy, each normalized.
pub fn find_bound_states(ch: Channel, p: &ShellParams, cfg: &SearchConfig) -> Result<Vec<BoundState>> {
    let outcome = scan_roots(
        |e| matching_residual(ch, e, p),
        p.energy_window(),
        cfg,
        cfg.bracket_tol_for(p.mass),
    )?;
    let mut states = outcome
        .roots
        .iter()
        .map(|root| {
            let state = BoundState::from_root(ch, p, root, &outcome)?;
            normalize_state(&state, p)
        })
        .collect::<Result<Vec<_>>>()?;
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(states)
}
