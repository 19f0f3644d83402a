use num_complex::Complex64;

use super::BesselOrder;
use crate::error::{Error, Result};

/// Largest `|z|` for which the alternating series is trusted.
pub const J_SERIES_WINDOW: f64 = 30.0;

/// `J_n(z) = Σ_k (-1)^k (z/2)^{2k+n} / (k! (k+n)!)` summed directly.
///
/// Only meant as an independent check of the real-form reduction
/// `J_n(ix) = i^n I_n(x)`. For real `z` near the window edge the alternating
/// terms cancel and accuracy degrades; for imaginary `z` all terms share a
/// phase and the sum is accurate to rounding.
pub fn complex_bessel_j_series(n: BesselOrder, z: Complex64) -> Result<Complex64> {
    let modulus = z.norm();
    if !modulus.is_finite() || modulus > J_SERIES_WINDOW {
        return Err(Error::SeriesWindow {
            modulus,
            limit: J_SERIES_WINDOW,
        });
    }
    let n = n.get();
    let half = z * 0.5;
    if modulus == 0.0 {
        return Ok(if n == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        });
    }

    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -(half * half);
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.norm() <= f64::EPSILON * 1e-2 * sum.norm() && k as f64 > modulus {
            break;
        }
        if k > 500 {
            break;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(complex_bessel_j_series(BesselOrder::new(0), z).unwrap().re, 1.0);
        assert_eq!(complex_bessel_j_series(BesselOrder::new(2), z).unwrap().norm(), 0.0);
    }

    #[test]
    fn j2_at_one() {
        // mpmath, 30 digits: J_2(1) = 0.114903484931900480469646881335
        let v = complex_bessel_j_series(BesselOrder::new(2), Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re - 0.114_903_484_931_900_48).abs() < 1e-16);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn window_is_enforced() {
        let err = complex_bessel_j_series(BesselOrder::new(0), Complex64::new(0.0, 31.0));
        assert!(matches!(err, Err(Error::SeriesWindow { .. })));
    }
}
