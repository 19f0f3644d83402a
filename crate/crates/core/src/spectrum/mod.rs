//! Bound-state search, normalization, sampling and parameter scans.

mod scan;
mod search;
mod state;

pub use scan::{spectrum_scan, ScanRow};
pub use search::{
    find_bound_states, refine_bound_state_root, refine_root, scan_roots, RootEstimate, ScanOutcome,
    SearchConfig, BRANCH_JUMP,
};
pub use state::{
    normalize_state, normalize_state_with_cutoff, sample_wavefunction, shell_samples, BoundState,
    Diagnostics, DEFAULT_CUTOFF_DECAY_LENGTHS,
};
