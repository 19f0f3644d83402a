use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrator::IntegrationConfig;
use super::potential::BumpShape;
use super::shoot::shoot_bound_state;
use crate::dirac::{Channel, ShellParams};
use crate::error::{Error, Result};
use crate::spectrum::SearchConfig;

/// Default widths, in units of `r0`.
pub const DEFAULT_SIGMA_LADDER: [f64; 3] = [1e-2, 3e-3, 1e-3];

/// `E(σ) = limit + coefficient · σ^order` through three points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub limit: f64,
    pub coefficient: f64,
    pub order: f64,
}

const ORDER_RANGE: (f64, f64) = (0.05, 12.0);

/// Fit `E0 + c σ^q` exactly through the three smallest widths.
///
/// `sigmas` must be strictly decreasing with at least three entries; the
/// differences of consecutive values must not change sign.
pub fn fit_power_law_limit(sigmas: &[f64], values: &[f64]) -> Result<PowerLawFit> {
    if sigmas.len() < 3 || sigmas.len() != values.len() {
        return Err(Error::Extrapolation(format!(
            "need at least three (sigma, value) pairs, got {} widths and {} values",
            sigmas.len(),
            values.len()
        )));
    }
    if sigmas.windows(2).any(|w| !(w[1] < w[0])) || sigmas.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Extrapolation("widths must be positive and strictly decreasing".into()));
    }
    let n = sigmas.len();
    let (s1, s2, s3) = (sigmas[n - 3], sigmas[n - 2], sigmas[n - 1]);
    let (e1, e2, e3) = (values[n - 3], values[n - 2], values[n - 1]);
    let (d1, d2) = (e1 - e2, e2 - e3);
    if d1 == 0.0 && d2 == 0.0 {
        return Ok(PowerLawFit {
            limit: e3,
            coefficient: 0.0,
            order: f64::NAN,
        });
    }
    if d1 * d2 <= 0.0 {
        return Err(Error::Extrapolation(format!(
            "E(sigma) is not monotone: {e1}, {e2}, {e3}"
        )));
    }
    let target = d1 / d2;
    let ratio = |q: f64| (s1.powf(q) - s2.powf(q)) / (s2.powf(q) - s3.powf(q));
    let (mut lo, mut hi) = ORDER_RANGE;
    if !(ratio(lo) <= target && target <= ratio(hi)) {
        return Err(Error::Extrapolation(format!(
            "convergence order outside [{lo}, {hi}] (difference ratio {target})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let order = 0.5 * (lo + hi);
    let coefficient = d2 / (s2.powf(order) - s3.powf(order));
    Ok(PowerLawFit {
        limit: e3 - coefficient * s3.powf(order),
        coefficient,
        order,
    })
}

/// Zero-width estimate for one bound state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroWidthEstimate {
    pub energy: f64,
    /// `|E(smallest σ) - E0|`
    pub error_bar: f64,
    pub order: f64,
    pub ladder: Vec<(f64, f64)>,
}

/// Shoot at every width of a decreasing ladder and extrapolate each state's
/// energy to zero width.
pub fn extrapolate_to_zero_width(ch: Channel, p: &ShellParams, sigmas: &[f64], shape: BumpShape, icfg: &IntegrationConfig, search: &SearchConfig) -> Result<Vec<ZeroWidthEstimate>> {
    if sigmas.len() < 3 {
        return Err(Error::Extrapolation(format!("need at least three widths, got {}", sigmas.len())));
    }
    if sigmas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Extrapolation("widths must be strictly decreasing".into()));
    }
    let spectra = sigmas
        .par_iter()
        .map(|&s| shoot_bound_state(ch, p, s, shape, icfg, search))
        .collect::<Result<Vec<_>>>()?;
    let count = spectra[0].len();
    if spectra.iter().any(|s| s.len() != count) {
        let counts: Vec<usize> = spectra.iter().map(Vec::len).collect();
        return Err(Error::Extrapolation(format!(
            "number of states changes along the width ladder: {counts:?}"
        )));
    }
    (0..count)
        .map(|k| {
            let values: Vec<f64> = spectra.iter().map(|s| s[k]).collect();
            let fit = fit_power_law_limit(sigmas, &values)?;
            let smallest = *values.last().expect("three or more widths");
            Ok(ZeroWidthEstimate {
                energy: fit.limit,
                error_bar: (smallest - fit.limit).abs(),
                order: fit.order,
                ladder: sigmas.iter().copied().zip(values).collect(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const LADDER: [f64; 3] = [1e-2, 3e-3, 1e-3];

    #[test]
    fn linear_model_recovered() {
        let v: Vec<f64> = LADDER.iter().map(|s| 0.9 + 0.1 * s).collect();
        let fit = fit_power_law_limit(&LADDER, &v).unwrap();
        assert!((fit.limit - 0.9).abs() < 1e-10);
        assert!((fit.order - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quadratic_model_recovered() {
        let v: Vec<f64> = LADDER.iter().map(|s| 0.9 + 0.1 * s * s).collect();
        let fit = fit_power_law_limit(&LADDER, &v).unwrap();
        assert!((fit.limit - 0.9).abs() < 1e-10);
        assert!((fit.order - 2.0).abs() < 1e-4);
    }

    #[test]
    fn uses_the_three_smallest_widths() {
        let s = [3e-2, 1e-2, 3e-3, 1e-3];
        let mut v: Vec<f64> = s.iter().map(|s| -0.2 + 0.5 * s).collect();
        v[0] = 7.0;
        let fit = fit_power_law_limit(&s, &v).unwrap();
        assert!((fit.limit + 0.2).abs() < 1e-12);
    }

    #[test]
    fn failures() {
        assert!(fit_power_law_limit(&LADDER[..2], &[1.0, 2.0]).is_err());
        assert!(fit_power_law_limit(&LADDER, &[0.9, 0.8, 0.85]).is_err());
        assert!(fit_power_law_limit(&[1e-3, 3e-3, 1e-2], &[0.9, 0.8, 0.7]).is_err());
        let flat = fit_power_law_limit(&LADDER, &[0.5, 0.5, 0.5]).unwrap();
        assert_eq!(flat.limit, 0.5);
    }
}
