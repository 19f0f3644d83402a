use rayon::prelude::*;

use super::args::{Command, RunConfig, ScanParam};
use super::output::{Cell, Table};
use super::CliError;
use crate::dirac::{Channel, ShellParams};
use crate::oracle::{extrapolate_to_zero_width, shoot_bound_state, IntegrationConfig};
use crate::spectrum::{find_bound_states, sample_wavefunction, shell_samples, spectrum_scan, BoundState};
use crate::verify::{first_failure, run_battery};

/// Agreement slack on top of the oracle error bar, in units of `M`.
pub const ORACLE_SLACK: f64 = 1e-4;

/// A finished table plus the failure, if any, that sets the exit status.
/// The table is emitted even when the run fails.
#[derive(Debug)]
pub struct Report {
    pub table: Table,
    pub failure: Option<CliError>,
}

impl Report {
    fn ok(table: Table) -> Self {
        Report { table, failure: None }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::Solve => run_solve(cfg).map(Report::ok),
        Command::Scan => run_scan(cfg).map(Report::ok),
        Command::Wavefunction => run_wavefunction(cfg).map(Report::ok),
        Command::Oracle => run_oracle(cfg),
        Command::Verify => Ok(run_verify(cfg)),
    }
}

fn states_for(channels: &[Channel], p: &ShellParams, cfg: &RunConfig) -> Result<Vec<BoundState>, CliError> {
    let per_channel: Vec<_> = channels
        .par_iter()
        .map(|&ch| find_bound_states(ch, p, &cfg.search))
        .collect();
    let mut states = Vec::new();
    for s in per_channel {
        states.extend(s?);
    }
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.channel.cmp(&b.channel)));
    Ok(states)
}

pub const SOLVE_COLUMNS: [&str; 9] = ["two_j", "M", "r0", "a", "E", "kappa", "binding", "residual", "norm_constant"];

pub fn run_solve(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = &cfg.params;
    let mut t = Table::new(&SOLVE_COLUMNS);
    for s in states_for(&cfg.channels, p, cfg)? {
        t.push(vec![
            s.channel.two_j().into(),
            p.mass.into(),
            p.radius.into(),
            p.coupling.into(),
            s.energy.into(),
            s.kappa.value().into(),
            s.binding.into(),
            s.residual_at_root.into(),
            s.norm_constant.into(),
        ]);
    }
    Ok(t)
}

pub const SCAN_COLUMNS: [&str; 6] = ["grid_value", "two_j", "state_index", "E", "binding", "status"];

pub fn run_scan(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = cfg.scan.as_ref().ok_or_else(|| CliError::Usage("scan requires a grid".into()))?;
    let p = cfg.params;
    let grid: Vec<ShellParams> = spec
        .grid
        .iter()
        .map(|&v| match spec.param {
            ScanParam::Coupling => ShellParams::new(p.mass, p.radius, v),
            ScanParam::Radius => ShellParams::new(p.mass, v, p.coupling),
        })
        .collect::<crate::Result<_>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let rows = spectrum_scan(&cfg.channels, &grid, &cfg.search);
    let mut t = Table::new(&SCAN_COLUMNS);
    for (g, chunk) in spec.grid.iter().zip(rows.chunks(cfg.channels.len())) {
        let mut entries: Vec<(f64, i32, Vec<Cell>)> = Vec::new();
        for row in chunk {
            let two_j = row.channel.two_j();
            match &row.outcome {
                Ok(states) => {
                    for (k, s) in states.iter().enumerate() {
                        let cells = vec![(*g).into(), two_j.into(), k.into(), s.energy.into(), s.binding.into(), "ok".into()];
                        entries.push((s.energy, two_j, cells));
                    }
                }
                Err(e) => {
                    let cells = vec![(*g).into(), two_j.into(), Cell::Empty, Cell::Empty, Cell::Empty, format!("failed: {e}").into()];
                    entries.push((f64::INFINITY, two_j, cells));
                }
            }
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, _, cells) in entries {
            t.push(cells);
        }
    }
    Ok(t)
}

pub const WAVEFUNCTION_COLUMNS: [&str; 5] = ["r", "F", "G", "norm2", "tag"];

pub fn run_wavefunction(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = &cfg.params;
    let ch = cfg.channels[0];
    let states = find_bound_states(ch, p, &cfg.search)?;
    let idx = cfg.wavefunction.state;
    let state = states.get(idx).ok_or_else(|| {
        CliError::BadSelector(format!("channel j = {ch} has {} bound state(s); no state {idx}", states.len()))
    })?;
    let r0 = p.radius;
    let r_min = cfg.wavefunction.r_min.unwrap_or(1e-4 * r0);
    let r_max = cfg.wavefunction.r_max.unwrap_or(r0 + 30.0 / state.kappa.value());
    let n = cfg.wavefunction.points;
    let grid: Vec<f64> = (0..n)
        .map(|k| r_min + (r_max - r_min) * k as f64 / (n - 1) as f64)
        .filter(|&r| r != r0)
        .collect();
    let samples = sample_wavefunction(state, p, &grid)?;
    let (minus, plus) = shell_samples(state, p)?;
    let mut t = Table::new(&WAVEFUNCTION_COLUMNS);
    let row = |s: &crate::dirac::SpinorSample, tag: &str| -> Vec<Cell> {
        vec![s.r.into(), s.f.into(), s.g.into(), s.norm_sq().into(), tag.into()]
    };
    let mut shell_done = false;
    for s in &samples {
        if s.r > r0 && !shell_done {
            t.push(row(&minus, "r0-"));
            t.push(row(&plus, "r0+"));
            shell_done = true;
        }
        t.push(row(s, if s.r < r0 { "inner" } else { "outer" }));
    }
    if !shell_done {
        t.push(row(&minus, "r0-"));
        t.push(row(&plus, "r0+"));
    }
    Ok(t)
}

pub const ORACLE_COLUMNS: [&str; 7] = ["two_j", "state_index", "E_analytic", "E_oracle", "error_bar", "order", "agree"];

struct OracleEstimate {
    energy: f64,
    error_bar: f64,
    order: Option<f64>,
}

/// With fewer than three widths there is no fit: the estimate is the energy
/// at the smallest width and the bar is three times its change from the
/// next width (from `σ/2` when only one width is given).
fn oracle_estimates(ch: Channel, cfg: &RunConfig) -> Result<Vec<OracleEstimate>, CliError> {
    let p = &cfg.params;
    let opts = &cfg.oracle;
    let icfg = IntegrationConfig::default();
    let search = crate::oracle::default_oracle_search();
    if opts.sigmas.len() >= 3 {
        let est = extrapolate_to_zero_width(ch, p, &opts.sigmas, opts.shape, &icfg, &search)?;
        return Ok(est
            .into_iter()
            .map(|e| OracleEstimate {
                energy: e.energy,
                error_bar: e.error_bar,
                order: Some(e.order),
            })
            .collect());
    }
    let mut widths = opts.sigmas.clone();
    if widths.len() == 1 {
        widths.push(widths[0] / 2.0);
    }
    let spectra: Vec<Vec<f64>> = widths
        .par_iter()
        .map(|&s| shoot_bound_state(ch, p, s, opts.shape, &icfg, &search))
        .collect::<crate::Result<_>>()?;
    let (wide, narrow) = (&spectra[0], &spectra[1]);
    if wide.len() != narrow.len() {
        return Err(CliError::Solver(crate::Error::Extrapolation(format!(
            "number of states changes between widths: {} vs {}",
            wide.len(),
            narrow.len()
        ))));
    }
    Ok(narrow
        .iter()
        .zip(wide)
        .map(|(&e, &w)| OracleEstimate {
            energy: e,
            error_bar: 3.0 * (w - e).abs(),
            order: None,
        })
        .collect())
}

pub fn run_oracle(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = &cfg.params;
    let mut t = Table::new(&ORACLE_COLUMNS);
    let mut disagreements = Vec::new();
    for &ch in &cfg.channels {
        let analytic: Vec<f64> = find_bound_states(ch, p, &cfg.search)?.iter().map(|s| s.energy).collect();
        let oracle = oracle_estimates(ch, cfg)?;
        for k in 0..analytic.len().max(oracle.len()) {
            let a = analytic.get(k);
            let o = oracle.get(k);
            let agree = match (a, o) {
                (Some(&a), Some(o)) => (a - o.energy).abs() <= o.error_bar + ORACLE_SLACK * p.mass,
                _ => false,
            };
            if !agree {
                disagreements.push(format!("j = {ch}, state {k}"));
            }
            t.push(vec![
                ch.two_j().into(),
                k.into(),
                a.map_or(Cell::Empty, |&e| e.into()),
                o.map_or(Cell::Empty, |o| o.energy.into()),
                o.map_or(Cell::Empty, |o| o.error_bar.into()),
                o.and_then(|o| o.order).map_or(Cell::Empty, Cell::Float),
                agree.into(),
            ]);
        }
    }
    let failure = (!disagreements.is_empty())
        .then(|| CliError::OracleDisagreement(format!("oracle disagrees at {}", disagreements.join("; "))));
    Ok(Report { table: t, failure })
}

pub const VERIFY_COLUMNS: [&str; 6] = ["invariant", "worst_error", "tolerance", "samples", "status", "detail"];

pub fn run_verify(cfg: &RunConfig) -> Report {
    let reports = run_battery(&cfg.search);
    let mut t = Table::new(&VERIFY_COLUMNS);
    for r in &reports {
        t.push(vec![
            r.name.into(),
            r.worst_error.into(),
            r.tolerance.into(),
            r.samples.into(),
            if r.passed { "PASS" } else { "FAIL" }.into(),
            r.detail.as_str().into(),
        ]);
    }
    let failure = first_failure(&reports).map(|r| {
        CliError::InvariantFailure(format!(
            "invariant {} failed: worst error {:e} > {:e}",
            r.name, r.worst_error, r.tolerance
        ))
    });
    Report { table: t, failure }
}
