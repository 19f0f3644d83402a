use rayon::prelude::*;

use super::search::{find_bound_states, SearchConfig};
use super::state::BoundState;
use crate::dirac::{Channel, ShellParams};
use crate::error::Result;

/// One `(params, channel)` cell of a spectral scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub params: ShellParams,
    pub channel: Channel,
    pub outcome: Result<Vec<BoundState>>,
}

/// Solve every `(params, channel)` pair. Rows come back params-major in input
/// order; failures stay in their row. Cells run in parallel but each is an
/// independent deterministic solve, so the table does not depend on
/// scheduling.
pub fn spectrum_scan(channels: &[Channel], p_grid: &[ShellParams], cfg: &SearchConfig) -> Vec<ScanRow> {
    let cells: Vec<(ShellParams, Channel)> = p_grid
        .iter()
        .flat_map(|p| channels.iter().map(move |c| (*p, *c)))
        .collect();
    cells
        .par_iter()
        .map(|&(params, channel)| ScanRow {
            params,
            channel,
            outcome: find_bound_states(channel, &params, cfg),
        })
        .collect()
}
