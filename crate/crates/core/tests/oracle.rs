use delta_shell::dirac::*;
use delta_shell::oracle::*;
use delta_shell::quadrature::integrate;
use delta_shell::spectrum::{find_bound_states, SearchConfig};

fn half() -> Channel {
    Channel::new(1).unwrap()
}

fn free(r0: f64) -> RegularizedPotential {
    regularized_potential(0.0, r0, 0.1 * r0, BumpShape::TopHat).unwrap()
}

fn cfg() -> IntegrationConfig {
    IntegrationConfig::default()
}

#[test]
fn bump_area_and_shape() {
    for shape in [BumpShape::Gaussian, BumpShape::TopHat] {
        let v = regularized_potential(0.5, 1.0, 1e-2, shape).unwrap();
        let (lo, hi) = v.support();
        let area = integrate(|r| Ok(v.value(r)), 0.0, 2.0, &[lo, 1.0, hi], 1e-14, 1e-16).unwrap();
        assert!((area.value + 0.5).abs() < 1e-12, "{shape}: {}", area.value);
    }
    let top = regularized_potential(0.5, 1.0, 1e-2, BumpShape::TopHat).unwrap();
    assert_eq!(top.value(1.005), -0.5 / 0.02);
    assert_eq!(top.value(1.02), 0.0);
    let g = regularized_potential(0.5, 1.0, 1e-2, BumpShape::Gaussian).unwrap();
    let peak = -0.5 / (1e-2 * (2.0 * std::f64::consts::PI).sqrt());
    assert!((g.value(1.0) - peak).abs() < 1e-12 * peak.abs());
}

#[test]
fn width_limit_enforced() {
    assert!(regularized_potential(0.5, 1.0, 0.1, BumpShape::Gaussian).is_ok());
    assert!(regularized_potential(0.5, 1.0, 0.11, BumpShape::Gaussian).is_err());
    assert!(regularized_potential(0.5, 1.0, 0.0, BumpShape::TopHat).is_err());
}

fn radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

#[test]
fn free_outward_run_follows_inner_solution() {
    let p = ShellParams::new(1.0, 1.0, 0.0).unwrap();
    for (two_j, e) in [(1, 0.3), (-1, -0.6), (3, 0.9)] {
        let ch = Channel::new(two_j).unwrap();
        let rs = radii(0.01, 1.0, 60);
        let trace = integrate_outward(ch, e, 1.0, &free(1.0), &cfg(), &rs).unwrap();
        for (pt, &r) in trace.points.iter().zip(&rs) {
            let exact = inner_solution(ch, e, r, &p).unwrap();
            let d = wrap_half_turn(pt.angle() - exact.angle());
            assert!(d.abs() < 1e-8, "two_j={two_j} r={r}: {d:e}");
        }
    }
}

#[test]
fn free_inward_run_follows_outer_solution() {
    let p = ShellParams::new(1.0, 1.0, 0.0).unwrap();
    for (two_j, e) in [(1, 0.3), (-3, -0.6), (1, 0.97)] {
        let ch = Channel::new(two_j).unwrap();
        let kappa = Kappa::from_energy(1.0, e).unwrap().value();
        let mut rs = radii(1.0, 1.0 + 10.0 / kappa, 60);
        rs.reverse();
        let trace = integrate_inward(ch, e, 1.0, &free(1.0), &cfg(), &rs).unwrap();
        for (pt, &r) in trace.points.iter().zip(&rs) {
            let exact = outer_solution(ch, e, r, &p).unwrap();
            let d = wrap_half_turn(pt.angle() - exact.angle());
            assert!(d.abs() < 1e-8, "two_j={two_j} r={r}: {d:e}");
        }
    }
}

#[test]
fn free_outward_norm_grows() {
    let rs = radii(0.01, 3.0, 200);
    let trace = integrate_outward(half(), 0.0, 1.0, &free(1.0), &cfg(), &rs).unwrap();
    let norms: Vec<f64> = trace.points.iter().map(|p| p.unscaled().norm()).collect();
    assert!(norms.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn inward_amplitude_grows_like_the_decay_rate() {
    let e = 0.5;
    let kappa: f64 = (1.0f64 - e * e).sqrt();
    let r_max = 1.2 + 40.0 / kappa;
    let icfg = IntegrationConfig {
        r_max: Some(r_max),
        ..cfg()
    };
    let delta = 5.0 / kappa;
    let trace = integrate_inward(half(), e, 1.0, &free(1.0), &icfg, &[r_max, r_max - delta]).unwrap();
    let growth = trace.points[1].unscaled().norm() / trace.points[0].unscaled().norm();
    let expected = (kappa * delta).exp();
    assert!((growth / expected - 1.0).abs() < 0.05, "{growth} vs {expected}");
}

#[test]
fn inward_start_is_far_enough() {
    let v = regularized_potential(0.5, 1.0, 1e-2, BumpShape::Gaussian).unwrap();
    let icfg = IntegrationConfig {
        r_max: Some(2.0),
        ..cfg()
    };
    assert!(integrate_inward(half(), 0.5, 1.0, &v, &icfg, &[1.0]).is_err());
}

#[test]
fn doubling_r_max_leaves_matched_angle() {
    let v = regularized_potential(0.5, 1.0, 1e-2, BumpShape::Gaussian).unwrap();
    let (_, hi) = v.support();
    let e = 0.87;
    let kappa = (1.0f64 - e * e).sqrt();
    let at = 1.0 + v.sigma;
    let theta = |r_max: f64| {
        let icfg = IntegrationConfig {
            r_max: Some(r_max),
            ..cfg()
        };
        integrate_inward(half(), e, 1.0, &v, &icfg, &[at]).unwrap().points[0].angle()
    };
    let base = hi + 40.0 / kappa;
    let d = wrap_half_turn(theta(2.0 * base) - theta(base));
    assert!(d.abs() < 1e-9, "{d:e}");
}

/// θ rotation across the bump support relative to the free run.
fn rotation_across_bump(a: f64, sigma: f64, shape: BumpShape) -> f64 {
    let e = 0.3;
    let v = regularized_potential(a, 1.0, sigma, shape).unwrap();
    let (lo, hi) = v.support();
    let run = |pot: &RegularizedPotential| {
        let t = integrate_outward(half(), e, 1.0, pot, &cfg(), &[lo, hi]).unwrap();
        wrap_half_turn(t.points[1].angle() - t.points[0].angle())
    };
    let bare = regularized_potential(0.0, 1.0, sigma, shape).unwrap();
    wrap_half_turn(run(&v) - run(&bare))
}

#[test]
fn bump_rotates_angle_by_minus_coupling() {
    // measured deviation / σ stays below this constant for a ≤ 1.4
    const C: f64 = 2.0;
    for a in [0.3, 0.8, 1.4] {
        for sigma in [1e-2, 1e-3] {
            let rot = rotation_across_bump(a, sigma, BumpShape::TopHat);
            assert!((rot + a).abs() <= C * sigma, "a={a} σ={sigma}: {rot}");
        }
    }
}

#[test]
fn renormalization_bookkeeping_is_exact() {
    let e = -0.2;
    let rs = radii(0.5, 30.0, 40);
    let tight = IntegrationConfig {
        renorm_guard: 1e3,
        ..cfg()
    };
    let a = integrate_outward(half(), e, 1.0, &free(1.0), &cfg(), &rs).unwrap();
    let b = integrate_outward(half(), e, 1.0, &free(1.0), &tight, &rs).unwrap();
    assert!(b.renormalizations > a.renormalizations);
    for (x, y) in a.points.iter().zip(&b.points) {
        let (x, y) = (x.unscaled(), y.unscaled());
        assert!((x.f - y.f).abs() <= 1e-12 * x.norm() && (x.g - y.g).abs() <= 1e-12 * x.norm());
    }
}

#[test]
fn tighter_tolerance_reduces_angle_error() {
    let p = ShellParams::new(1.0, 1.0, 0.0).unwrap();
    let rs = radii(0.05, 1.0, 40);
    let err = |rtol: f64| {
        let icfg = IntegrationConfig {
            rtol,
            atol: rtol * 1e-2,
            ..cfg()
        };
        let t = integrate_outward(half(), 0.4, 1.0, &free(1.0), &icfg, &rs).unwrap();
        t.points
            .iter()
            .zip(&rs)
            .map(|(pt, &r)| wrap_half_turn(pt.angle() - inner_solution(half(), 0.4, r, &p).unwrap().angle()).abs())
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(1e-5), err(1e-8));
    assert!(fine < coarse / 10.0, "{coarse:e} -> {fine:e}");
}

#[test]
fn free_oracle_finds_nothing() {
    let p = ShellParams::new(1.0, 1.0, 0.0).unwrap();
    for shape in [BumpShape::Gaussian, BumpShape::TopHat] {
        let e = shoot_bound_state(half(), &p, 1e-2, shape, &cfg(), &default_oracle_search()).unwrap();
        assert!(e.is_empty());
    }
}

#[test]
fn oracle_converges_to_analytic_root() {
    let p = ShellParams::new(1.0, 1.0, 0.5).unwrap();
    let exact = find_bound_states(half(), &p, &SearchConfig::default()).unwrap()[0].energy;
    let mut prev = f64::INFINITY;
    for sigma in [1e-2, 3e-3, 1e-3] {
        let e = shoot_bound_state(half(), &p, sigma, BumpShape::Gaussian, &cfg(), &default_oracle_search()).unwrap();
        assert_eq!(e.len(), 1);
        let d = (e[0] - exact).abs();
        assert!(d < prev);
        prev = d;
    }
    assert!(prev < 1e-3);
}

#[test]
fn shapes_agree_to_first_order_in_width() {
    let p = ShellParams::new(1.0, 1.0, 0.7).unwrap();
    for sigma in [1e-2, 1e-3] {
        let g = shoot_bound_state(half(), &p, sigma, BumpShape::Gaussian, &cfg(), &default_oracle_search()).unwrap();
        let t = shoot_bound_state(half(), &p, sigma, BumpShape::TopHat, &cfg(), &default_oracle_search()).unwrap();
        assert_eq!(g.len(), t.len());
        assert!((g[0] - t[0]).abs() < 0.5 * sigma, "σ={sigma}: {} vs {}", g[0], t[0]);
    }
}

#[test]
fn oracle_sees_the_mirrored_negative_channel() {
    let neg = Channel::new(-1).unwrap();
    let attractive = ShellParams::new(1.0, 1.0, 0.5).unwrap();
    let s = default_oracle_search();
    assert!(shoot_bound_state(neg, &attractive, 1e-3, BumpShape::TopHat, &cfg(), &s).unwrap().is_empty());
    let repulsive = attractive.with_reversed_coupling();
    let e = shoot_bound_state(neg, &repulsive, 1e-3, BumpShape::TopHat, &cfg(), &s).unwrap();
    let positive = shoot_bound_state(half(), &attractive, 1e-3, BumpShape::TopHat, &cfg(), &s).unwrap();
    assert_eq!(e.len(), 1);
    assert!((e[0] + positive[0]).abs() < 1e-7);
}

#[test]
fn extrapolation_recovers_synthetic_models() {
    let s = [1e-2, 3e-3, 1e-3];
    let lin: Vec<f64> = s.iter().map(|x| 0.9 + 0.1 * x).collect();
    assert!((fit_power_law_limit(&s, &lin).unwrap().limit - 0.9).abs() < 1e-10);
    let quad: Vec<f64> = s.iter().map(|x| 0.9 + 0.1 * x * x).collect();
    let fit = fit_power_law_limit(&s, &quad).unwrap();
    assert!((fit.limit - 0.9).abs() < 1e-10);
    assert!((fit.order - 2.0).abs() < 1e-3);
    assert!(fit_power_law_limit(&s, &[0.9, 0.95, 0.91]).is_err());
}

#[test]
fn extrapolated_reference_state() {
    let p = ShellParams::new(1.0, 1.0, 0.5).unwrap();
    let exact = find_bound_states(half(), &p, &SearchConfig::default()).unwrap()[0].energy;
    let est = extrapolate_to_zero_width(half(), &p, &DEFAULT_SIGMA_LADDER, BumpShape::TopHat, &cfg(), &default_oracle_search()).unwrap();
    assert_eq!(est.len(), 1);
    assert!((est[0].energy - exact).abs() <= 1e-4);
    assert!(est[0].order > 0.5 && est[0].order < 2.0);
    assert_eq!(est[0].error_bar, (est[0].ladder[2].1 - est[0].energy).abs());
}

#[test]
fn extrapolation_input_checks() {
    let p = ShellParams::new(1.0, 1.0, 0.5).unwrap();
    let s = default_oracle_search();
    assert!(extrapolate_to_zero_width(half(), &p, &[1e-2, 1e-3], BumpShape::TopHat, &cfg(), &s).is_err());
    assert!(extrapolate_to_zero_width(half(), &p, &[1e-3, 3e-3, 1e-2], BumpShape::TopHat, &cfg(), &s).is_err());
}
