use std::cell::RefCell;

use delta_shell::dirac::*;
use delta_shell::quadrature::integrate;
use delta_shell::spectrum::*;

fn half() -> Channel {
    Channel::new(1).unwrap()
}

fn energies(ch: Channel, p: &ShellParams) -> Vec<f64> {
    find_bound_states(ch, p, &SearchConfig::default())
        .unwrap()
        .iter()
        .map(|s| s.energy)
        .collect()
}

/// σ→0 limit of the shooting oracle (gaussian ladder 1e-2, 3e-3, 1e-3) for
/// j = 1/2, M = r0 = 1, a = 0.5, with its error bar.
const ORACLE_E0: f64 = 0.874_197_370_971;
const ORACLE_BAR: f64 = 2.0e-4;

/// Root of the same matching condition evaluated with SciPy's Bessel
/// routines, an implementation independent of this crate's.
const SCIPY_ROOT: f64 = 0.874_199_506_916_991;

#[test]
fn reference_state_matches_oracle() {
    let p = ShellParams::new(1.0, 1.0, 0.5).unwrap();
    let e = energies(half(), &p);
    assert_eq!(e.len(), 1);
    assert!((e[0] - ORACLE_E0).abs() <= 1e-4);
    assert!((e[0] - ORACLE_E0).abs() <= ORACLE_BAR);
    assert!((e[0] - SCIPY_ROOT).abs() < 1e-10);
}

#[test]
fn free_case_is_empty() {
    let p = ShellParams::new(1.0, 1.0, 0.0).unwrap();
    for two_j in [1, -1, 3, -3, 5] {
        assert!(energies(Channel::new(two_j).unwrap(), &p).is_empty());
    }
}

#[test]
fn dimensional_scaling() {
    let base = energies(half(), &ShellParams::new(1.0, 1.0, 0.7).unwrap());
    let scaled = energies(half(), &ShellParams::new(2.0, 0.5, 0.7).unwrap());
    assert_eq!(base.len(), scaled.len());
    for (b, s) in base.iter().zip(&scaled) {
        assert!((2.0 * b - s).abs() < 1e-9);
    }
}

#[test]
fn roots_have_small_residual_in_both_forms() {
    let cfg = SearchConfig::default();
    for (a, r0) in [(0.5, 1.0), (1.1, 2.0), (1.4, 5.0), (0.3, 0.5)] {
        let p = ShellParams::new(1.0, r0, a).unwrap();
        for two_j in [1, 3, -1] {
            let ch = Channel::new(two_j).unwrap();
            for s in find_bound_states(ch, &p, &cfg).unwrap() {
                assert!(matching_residual(ch, s.energy, &p).unwrap().abs() <= 1e-10);
                assert!(mobius_residual(ch, s.energy, &p).unwrap().abs() <= 1e-10);
                assert!(s.binding > 0.0 && s.binding == 1.0 - s.energy.abs());
            }
        }
    }
}

#[test]
fn spectrum_is_periodic_in_coupling() {
    for (a, r0) in [(0.4, 1.0), (1.2, 5.0)] {
        let base = energies(half(), &ShellParams::new(1.0, r0, a).unwrap());
        let shifted = energies(half(), &ShellParams::new(1.0, r0, a + std::f64::consts::PI).unwrap());
        assert_eq!(base.len(), shifted.len());
        for (x, y) in base.iter().zip(&shifted) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn refine_root_examples() {
    let r = refine_root(|e| Ok(e - 0.3), (0.0, 1.0), 1e-13, 1e-14, 200).unwrap();
    assert!((r.x - 0.3).abs() < 1e-12);
    let tight = refine_root(|e| Ok(e - 0.5 - 1e-14), (0.5, 0.5 + 1e-13), 1e-12, 1.0, 200).unwrap();
    assert_eq!(tight.x, 0.5 + 0.5e-13);
}

#[test]
fn refinement_stays_in_bracket() {
    let p = ShellParams::new(1.0, 1.0, 0.5).unwrap();
    let seen = RefCell::new(Vec::new());
    let bracket = (0.6, 0.95);
    refine_root(
        |e| {
            seen.borrow_mut().push(e);
            matching_residual(half(), e, &p)
        },
        bracket,
        1e-12,
        1e-10,
        200,
    )
    .unwrap();
    assert!(seen.borrow().iter().all(|&e| e >= bracket.0 && e <= bracket.1));
}

#[test]
fn refine_root_reports_bad_bracket() {
    assert!(refine_root(|e| Ok(e - 2.0), (0.0, 1.0), 1e-12, 1e-10, 50).is_err());
}

fn normalized_integral(state: &BoundState, p: &ShellParams) -> f64 {
    let rho = |r: f64| Ok(sample_wavefunction(state, p, &[r])?[0].norm_sq());
    let kappa = state.kappa.value();
    let inner = integrate(rho, 0.0, p.radius, &[], 1e-13, 1e-300).unwrap();
    let outer = integrate(rho, p.radius, p.radius + 60.0 / kappa, &[], 1e-13, 1e-300).unwrap();
    inner.value + outer.value
}

#[test]
fn normalization() {
    for (a, r0, two_j) in [(0.5, 1.0, 1), (1.2, 2.0, 3), (1.5, 0.5, 1)] {
        let p = ShellParams::new(1.0, r0, a).unwrap();
        let states = find_bound_states(Channel::new(two_j).unwrap(), &p, &SearchConfig::default()).unwrap();
        assert!(!states.is_empty());
        for s in &states {
            assert!(s.norm_constant.is_finite() && s.norm_constant > 0.0);
            assert!((normalized_integral(s, &p) - 1.0).abs() < 1e-8);
            let longer = normalize_state_with_cutoff(s, &p, 2.0 * DEFAULT_CUTOFF_DECAY_LENGTHS).unwrap();
            assert!((longer.norm_constant / s.norm_constant - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn shell_values_are_glued_by_the_transfer_matrix() {
    let p = ShellParams::new(1.0, 1.0, 0.9).unwrap();
    for s in find_bound_states(half(), &p, &SearchConfig::default()).unwrap() {
        let (minus, plus) = shell_samples(&s, &p).unwrap();
        let rotated = apply_transfer(&transfer_matrix(p.coupling), &minus);
        assert!((rotated.f - plus.f).abs() < 1e-10 && (rotated.g - plus.g).abs() < 1e-10);
        assert!((plus.norm_sq() - minus.norm_sq()).abs() < 1e-10 * minus.norm_sq());
        let below = sample_wavefunction(&s, &p, &[1.0 - 1e-9]).unwrap()[0];
        let above = sample_wavefunction(&s, &p, &[1.0 + 1e-9]).unwrap()[0];
        assert!((below.f - minus.f).abs() < 1e-7 && (above.f - plus.f).abs() < 1e-7);
    }
}

#[test]
fn wavefunction_vanishes_at_origin() {
    let p = ShellParams::new(1.0, 1.0, 0.5).unwrap();
    let s = &find_bound_states(half(), &p, &SearchConfig::default()).unwrap()[0];
    let samples = sample_wavefunction(s, &p, &[1e-2, 1e-4, 1e-6]).unwrap();
    assert!(samples.windows(2).all(|w| w[1].norm() < w[0].norm()));
    assert!(samples[2].norm() < 1e-2);
    assert!(sample_wavefunction(s, &p, &[0.0]).is_err());
}

#[test]
fn scan_rows_match_direct_solves() {
    let chs = [half(), Channel::new(-1).unwrap(), Channel::new(3).unwrap()];
    let grid: Vec<ShellParams> = [0.2, 0.6, 1.0, -0.6]
        .iter()
        .map(|&a| ShellParams::new(1.0, 1.5, a).unwrap())
        .collect();
    let cfg = SearchConfig::default();
    let rows = spectrum_scan(&chs, &grid, &cfg);
    assert_eq!(rows.len(), chs.len() * grid.len());
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row.params, grid[k / chs.len()]);
        assert_eq!(row.channel, chs[k % chs.len()]);
        let direct = find_bound_states(row.channel, &row.params, &cfg).unwrap();
        assert_eq!(row.outcome.as_ref().unwrap(), &direct);
    }
    let single = spectrum_scan(&[half()], &grid[..1], &cfg);
    assert_eq!(single[0].outcome.as_ref().unwrap(), &find_bound_states(half(), &grid[0], &cfg).unwrap());
}

#[test]
fn negative_channel_mirrors_reversed_coupling() {
    let cfg = SearchConfig::default();
    let p = ShellParams::new(1.0, 1.5, 0.6).unwrap();
    let rows = spectrum_scan(&[half(), Channel::new(-1).unwrap()], &[p, p.with_reversed_coupling()], &cfg);
    let e = |k: usize| -> Vec<f64> { rows[k].outcome.as_ref().unwrap().iter().map(|s| s.energy).collect() };
    // rows: (a, +j), (a, -j), (-a, +j), (-a, -j)
    let mirrored: Vec<f64> = e(3).iter().rev().map(|x| -x).collect();
    assert_eq!(e(0).len(), mirrored.len());
    for (a, b) in e(0).iter().zip(&mirrored) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn scan_records_failures_in_row() {
    let bad = SearchConfig {
        scan_points: 4,
        ..SearchConfig::default()
    };
    let p = ShellParams::new(1.0, 1.0, 0.5).unwrap();
    let rows = spectrum_scan(&[half()], &[p], &bad);
    assert!(rows[0].outcome.is_err());
}

#[test]
fn solves_are_deterministic() {
    let p = ShellParams::new(1.0, 2.0, 1.3).unwrap();
    let a = find_bound_states(Channel::new(3).unwrap(), &p, &SearchConfig::default()).unwrap();
    let b = find_bound_states(Channel::new(3).unwrap(), &p, &SearchConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn quarter_turn_coupling_is_solved() {
    let p = ShellParams::new(1.0, 1.0, std::f64::consts::FRAC_PI_2).unwrap();
    let e = energies(half(), &p);
    assert_eq!(e.len(), 1);
    assert!(matching_residual(half(), e[0], &p).unwrap().abs() < 1e-10);
}

#[test]
fn weakly_bound_state_near_threshold() {
    let p = ShellParams::new(1.0, 0.5, 0.1).unwrap();
    let states = find_bound_states(half(), &p, &SearchConfig::default()).unwrap();
    assert_eq!(states.len(), 1);
    let s = &states[0];
    assert!(s.binding > 0.0 && s.binding < 1e-8);
    assert!(matching_residual(half(), s.energy, &p).unwrap().abs() <= 1e-10);
    assert!((normalized_integral(s, &p) - 1.0).abs() < 1e-6);
}
