//! Acceptance criteria for the `delta-shell` solver, one function per
//! criterion. Each returns an [`Outcome`] carrying the measured worst case
//! and the tolerance it was held to; nothing here decides what to print.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use delta_shell::dirac::{matching_residual, wrap_half_turn, Channel, ShellParams};
use delta_shell::oracle::{
    default_oracle_search, extrapolate_to_zero_width, shoot_bound_state, BumpShape, IntegrationConfig,
    DEFAULT_SIGMA_LADDER,
};
use delta_shell::spectrum::{find_bound_states, shell_samples, SearchConfig};
use delta_shell::verify;

pub const ORACLE_TOL: f64 = 1e-4;
pub const ORACLE_BUDGET: Duration = Duration::from_secs(300);
pub const NORM_TOL: f64 = 1e-10;
pub const PHASE_TOL: f64 = 1e-9;
pub const TRANSFER_TOL: f64 = 1e-14;
pub const GROUP_LAW_TOL: f64 = 1e-13;
pub const WRONSKIAN_TOL: f64 = 1e-12;
pub const RECURRENCE_TOL: f64 = 1e-10;
pub const BRIDGE_TOL: f64 = 1e-10;
pub const ODE_TOL: f64 = 1e-6;
pub const REFLECTION_TOL: f64 = 1e-10;
pub const SCALE_TOL: f64 = 1e-9;
pub const VERIFY_BUDGET: Duration = Duration::from_secs(60);

pub const GRID_COUPLINGS: [f64; 3] = [0.3, 0.7, 1.1];
pub const GRID_RADII: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(id: u32, name: &'static str, passed: bool, detail: String) -> Self {
        Outcome { id, name, passed, detail }
    }

    fn error(id: u32, name: &'static str, e: impl std::fmt::Display) -> Self {
        Outcome::new(id, name, false, format!("error: {e}"))
    }
}

fn half() -> Channel {
    Channel::new(1).expect("odd")
}

fn energies(ch: Channel, p: &ShellParams) -> delta_shell::Result<Vec<f64>> {
    Ok(find_bound_states(ch, p, &SearchConfig::default())?
        .into_iter()
        .map(|s| s.energy)
        .collect())
}

/// Zero-width oracle estimate at one grid point.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub params: ShellParams,
    pub analytic: Vec<f64>,
    /// `(energy, error bar)` per state.
    pub oracle: Vec<(f64, f64)>,
}

/// Analytic and extrapolated oracle spectra over the 3×3 grid for `j = 1/2`.
pub fn oracle_grid(shape: BumpShape) -> delta_shell::Result<Vec<GridPoint>> {
    let icfg = IntegrationConfig::default();
    let search = default_oracle_search();
    let mut out = Vec::new();
    for &a in &GRID_COUPLINGS {
        for &r0 in &GRID_RADII {
            let p = ShellParams::new(1.0, r0, a)?;
            let sigmas: Vec<f64> = DEFAULT_SIGMA_LADDER.iter().map(|s| s * r0).collect();
            let oracle = extrapolate_to_zero_width(half(), &p, &sigmas, shape, &icfg, &search)?
                .into_iter()
                .map(|e| (e.energy, e.error_bar))
                .collect();
            out.push(GridPoint {
                params: p,
                analytic: energies(half(), &p)?,
                oracle,
            });
        }
    }
    Ok(out)
}

pub fn oracle_agreement(grid: &delta_shell::Result<Vec<GridPoint>>, elapsed: Duration) -> Outcome {
    const NAME: &str = "oracle agreement";
    let grid = match grid {
        Ok(g) => g,
        Err(e) => return Outcome::error(1, NAME, e),
    };
    let mut worst: f64 = 0.0;
    let mut states = 0;
    let mut mismatched = Vec::new();
    for g in grid {
        if g.analytic.len() != g.oracle.len() {
            mismatched.push(format!("a={} r0={}", g.params.coupling, g.params.radius));
            continue;
        }
        for (e, (o, _)) in g.analytic.iter().zip(&g.oracle) {
            worst = worst.max((e - o).abs());
            states += 1;
        }
    }
    let passed = mismatched.is_empty() && states > 0 && worst <= ORACLE_TOL && elapsed <= ORACLE_BUDGET;
    let mut detail = format!(
        "worst |E_analytic - E_oracle| = {worst:.3e} (tol {ORACLE_TOL:e}) over {states} states, {:.1} s (budget {} s)",
        elapsed.as_secs_f64(),
        ORACLE_BUDGET.as_secs()
    );
    if !mismatched.is_empty() {
        detail += &format!("; state counts differ at {}", mismatched.join(", "));
    }
    Outcome::new(1, NAME, passed, detail)
}

/// Parameter sets and channels for the checks that run at found roots.
pub fn root_probes() -> (Vec<ShellParams>, Vec<Channel>) {
    let mut params = Vec::new();
    for a in [0.1, 0.3, 0.7, 1.1, 1.5, 2.5, -0.6] {
        for r0 in [0.2, 0.5, 1.0, 2.0, 5.0, 10.0] {
            params.push(ShellParams::new(1.0, r0, a).expect("valid"));
        }
    }
    params.push(ShellParams::new(3.0, 0.7, 0.9).expect("valid"));
    let channels = [1, -1, 3, -3, 5, -5, 7, -7]
        .into_iter()
        .map(|t| Channel::new(t).expect("odd"))
        .collect();
    (params, channels)
}

pub fn shell_conditions() -> Outcome {
    const NAME: &str = "shell conditions";
    let (params, channels) = root_probes();
    let mut norm: f64 = 0.0;
    let mut phase: f64 = 0.0;
    let mut count = 0;
    for p in &params {
        for &ch in &channels {
            let states = match find_bound_states(ch, p, &SearchConfig::default()) {
                Ok(s) => s,
                Err(e) => return Outcome::error(2, NAME, e),
            };
            for s in &states {
                let (minus, plus) = match shell_samples(s, p) {
                    Ok(x) => x,
                    Err(e) => return Outcome::error(2, NAME, e),
                };
                norm = norm.max((plus.norm_sq() - minus.norm_sq()).abs() / minus.norm_sq());
                phase = phase.max(wrap_half_turn(plus.angle() - minus.angle() + p.coupling).abs());
                count += 1;
            }
        }
    }
    Outcome::new(
        2,
        NAME,
        count > 0 && norm <= NORM_TOL && phase <= PHASE_TOL,
        format!("norm continuity {norm:.3e} (tol {NORM_TOL:e}), phase jump {phase:.3e} (tol {PHASE_TOL:e}) at {count} roots"),
    )
}

pub fn transfer_algebra() -> Outcome {
    let (ortho, n) = verify::transfer_orthogonality_check();
    let (group, pairs) = verify::group_law_check();
    Outcome::new(
        3,
        "transfer matrix algebra",
        ortho <= TRANSFER_TOL && group <= GROUP_LAW_TOL && pairs >= 100,
        format!(
            "orthogonality/det {ortho:.3e} (tol {TRANSFER_TOL:e}) over {n} angles, group law {group:.3e} (tol {GROUP_LAW_TOL:e}) over {pairs} pairs"
        ),
    )
}

pub fn special_functions() -> Outcome {
    const NAME: &str = "special functions";
    let xs = verify::argument_grid(2000);
    let run = || -> delta_shell::Result<(f64, f64, f64)> {
        Ok((
            verify::wronskian_check(&xs)?.0,
            verify::recurrence_check(&xs)?.0,
            verify::bridge_check(&xs)?.0,
        ))
    };
    match run() {
        Ok((w, r, b)) => Outcome::new(
            4,
            NAME,
            w <= WRONSKIAN_TOL && r <= RECURRENCE_TOL && b <= BRIDGE_TOL,
            format!(
                "wronskian {w:.3e} (tol {WRONSKIAN_TOL:e}), recurrences {r:.3e} (tol {RECURRENCE_TOL:e}), bridge {b:.3e} (tol {BRIDGE_TOL:e}) on {} arguments",
                xs.len()
            ),
        ),
        Err(e) => Outcome::error(4, NAME, e),
    }
}

pub fn ode_residual() -> Outcome {
    const NAME: &str = "ODE residual";
    let (params, channels) = root_probes();
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for p in params.iter().step_by(3) {
        let mut es: Vec<f64> = [-0.97, -0.4, 0.0, 0.5, 0.98].iter().map(|e| e * p.mass).collect();
        for &ch in &channels {
            match energies(ch, p) {
                Ok(found) => es.extend(found),
                Err(e) => return Outcome::error(5, NAME, e),
            }
        }
        match verify::ode_residual_check(&channels, p, &es) {
            Ok((w, n)) => {
                worst = worst.max(w);
                samples += n;
            }
            Err(e) => return Outcome::error(5, NAME, e),
        }
    }
    Outcome::new(
        5,
        NAME,
        worst <= ODE_TOL,
        format!("worst relative residual {worst:.3e} (tol {ODE_TOL:e}) over {samples} points"),
    )
}

/// First `(params, j)` whose `-j` spectrum is not the negated `+j` spectrum
/// at the same coupling, if any.
fn first_reflection_miss(params: &[ShellParams], channels: &[Channel]) -> delta_shell::Result<Option<String>> {
    for p in params {
        for &ch in channels.iter().filter(|c| c.is_positive()) {
            let plus = energies(ch, p)?;
            let minus = energies(ch.negated(), p)?;
            if plus.len() != minus.len() {
                return Ok(Some(format!(
                    "a={} r0={} j={ch}: E(j) = {plus:?}, E(-j) = {minus:?}",
                    p.coupling, p.radius
                )));
            }
        }
    }
    Ok(None)
}

pub fn symmetries() -> Outcome {
    const NAME: &str = "symmetries";
    let params = verify::probe_params();
    let channels = verify::probe_channels();
    let cfg = SearchConfig::default();
    let run = || -> delta_shell::Result<(f64, f64, f64, Option<String>)> {
        Ok((
            verify::fixed_coupling_reflection_check(&params, &channels, &cfg)?.0,
            verify::scale_covariance_check(&params, &channels, &cfg)?.0,
            verify::reflection_check(&params, &channels, &cfg)?.0,
            first_reflection_miss(&params, &channels)?,
        ))
    };
    match run() {
        Ok((reflection, scale, reversed, miss)) => {
            let literal = if reflection.is_finite() {
                format!("{reflection:.3e}")
            } else {
                "spectra differ in size".to_string()
            };
            let mut detail = format!(
                "E(-j) = -E(j) worst {literal} (tol {REFLECTION_TOL:e}), scale covariance {scale:.3e} (tol {SCALE_TOL:e}); E(-j, -a) = -E(j, a) worst {reversed:.3e}"
            );
            if let Some(m) = miss {
                detail += &format!("; first mismatch {m}");
            }
            Outcome::new(6, NAME, reflection <= REFLECTION_TOL && scale <= SCALE_TOL, detail)
        }
        Err(e) => Outcome::error(6, NAME, e),
    }
}

pub fn degenerate_cases() -> Outcome {
    const NAME: &str = "degenerate cases";
    let run = || -> delta_shell::Result<(usize, usize, usize, f64)> {
        let channels: Vec<Channel> = [1, -1, 3, -3].into_iter().map(|t| Channel::new(t).expect("odd")).collect();
        let icfg = IntegrationConfig::default();
        let search = default_oracle_search();
        let mut analytic = 0;
        let mut oracle = 0;
        for r0 in GRID_RADII {
            let p = ShellParams::new(1.0, r0, 0.0)?;
            for &ch in &channels {
                analytic += energies(ch, &p)?.len();
                for shape in [BumpShape::Gaussian, BumpShape::TopHat] {
                    for s in DEFAULT_SIGMA_LADDER {
                        oracle += shoot_bound_state(ch, &p, s * r0, shape, &icfg, &search)?.len();
                    }
                }
            }
        }
        let mut solved = 0;
        let mut worst: f64 = 0.0;
        for a in [FRAC_PI_2 - 1e-6, FRAC_PI_2 - 1e-12, FRAC_PI_2, FRAC_PI_2 + 1e-12, FRAC_PI_2 + 1e-6] {
            for r0 in GRID_RADII {
                let p = ShellParams::new(1.0, r0, a)?;
                for &ch in &channels {
                    for e in energies(ch, &p)? {
                        worst = worst.max(matching_residual(ch, e, &p)?.abs());
                        solved += 1;
                    }
                }
            }
        }
        Ok((analytic, oracle, solved, worst))
    };
    match run() {
        Ok((analytic, oracle, solved, worst)) => Outcome::new(
            7,
            NAME,
            analytic == 0 && oracle == 0 && solved > 0 && worst <= 1e-10,
            format!(
                "a = 0: {analytic} analytic and {oracle} oracle states; a near pi/2: {solved} roots, worst angle residual {worst:.3e}"
            ),
        ),
        Err(e) => Outcome::error(7, NAME, e),
    }
}

pub fn shape_independence(
    gaussian: &delta_shell::Result<Vec<GridPoint>>,
    top_hat: &delta_shell::Result<Vec<GridPoint>>,
) -> Outcome {
    const NAME: &str = "regularization shape independence";
    let (g, t) = match (gaussian, top_hat) {
        (Ok(g), Ok(t)) => (g, t),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(8, NAME, e),
    };
    let mut worst_ratio: f64 = 0.0;
    let mut worst_diff: f64 = 0.0;
    let mut states = 0;
    let mut counts_match = true;
    for (a, b) in g.iter().zip(t) {
        if a.oracle.len() != b.oracle.len() {
            counts_match = false;
            continue;
        }
        for ((eg, bg), (et, bt)) in a.oracle.iter().zip(&b.oracle) {
            let diff = (eg - et).abs();
            worst_diff = worst_diff.max(diff);
            worst_ratio = worst_ratio.max(diff / (bg + bt));
            states += 1;
        }
    }
    Outcome::new(
        8,
        NAME,
        counts_match && states > 0 && worst_ratio <= 1.0,
        format!(
            "worst |E_gaussian - E_top_hat| = {worst_diff:.3e}, worst ratio to combined bars {worst_ratio:.3} (limit 1) over {states} states"
        ),
    )
}

pub fn verify_command(binary: &Path) -> Outcome {
    const NAME: &str = "verify subcommand";
    let start = Instant::now();
    let out = match Command::new(binary).arg("verify").output() {
        Ok(o) => o,
        Err(e) => return Outcome::error(9, NAME, format!("{}: {e}", binary.display())),
    };
    let elapsed = start.elapsed();
    let code = out.status.code();
    let rows = String::from_utf8_lossy(&out.stdout).lines().count().saturating_sub(1);
    Outcome::new(
        9,
        NAME,
        code == Some(0) && elapsed < VERIFY_BUDGET,
        format!(
            "exit {}, {rows} invariants, {:.1} s (budget {} s)",
            code.map_or("signal".to_string(), |c| c.to_string()),
            elapsed.as_secs_f64(),
            VERIFY_BUDGET.as_secs()
        ),
    )
}
