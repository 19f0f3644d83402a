use super::{BesselOrder, ScaledValue};
use crate::error::{Error, Result};

/// Power series for `I_n` is used for `x <= I_SERIES_MAX`.
pub const I_SERIES_MAX: f64 = 25.0;
/// Logarithmic series for `K_0`, `K_1` is used for `x <= K_SERIES_MAX`.
pub const K_SERIES_MAX: f64 = 2.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
// ln(f64::MAX)
const EXP_OVERFLOW: f64 = 709.782_712_893_384;
const RESCALE_AT: f64 = 1e200;

fn check_nonnegative(function: &'static str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        Err(Error::Domain { function, x })
    } else {
        Ok(())
    }
}

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if x.is_nan() || x <= 0.0 {
        Err(Error::Domain { function, x })
    } else {
        Ok(())
    }
}

/// `I_n(x)` for `x >= 0`.
pub fn bessel_i(n: BesselOrder, x: f64) -> Result<f64> {
    check_nonnegative("bessel_i", x)?;
    if x <= I_SERIES_MAX {
        return Ok(i_series(n.get(), x));
    }
    if x >= EXP_OVERFLOW {
        return Err(Error::Overflow {
            function: "bessel_i",
            order: n.get(),
            x,
        });
    }
    let v = i_miller_scaled(n.get(), x) * x.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow {
            function: "bessel_i",
            order: n.get(),
            x,
        })
    }
}

/// `e^{-x} I_n(x)` in the mantissa, `x` in the scale.
pub fn bessel_i_scaled(n: BesselOrder, x: f64) -> Result<ScaledValue> {
    check_nonnegative("bessel_i_scaled", x)?;
    let mantissa = if x <= I_SERIES_MAX {
        i_series(n.get(), x) * (-x).exp()
    } else {
        i_miller_scaled(n.get(), x)
    };
    Ok(ScaledValue::scaled(mantissa, x))
}

/// `K_n(x)` for `x > 0`. Underflows gracefully to zero for very large `x`.
pub fn bessel_k(n: BesselOrder, x: f64) -> Result<f64> {
    check_positive("bessel_k", x)?;
    let v = if x <= K_SERIES_MAX {
        let (k0, k1) = k01_series(x);
        k_upward(n.get(), x, k0, k1)
    } else {
        let (k0, k1) = k01_quadrature_scaled(x);
        k_upward(n.get(), x, k0, k1) * (-x).exp()
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow {
            function: "bessel_k",
            order: n.get(),
            x,
        })
    }
}

/// `e^{x} K_n(x)` in the mantissa, `-x` in the scale.
pub fn bessel_k_scaled(n: BesselOrder, x: f64) -> Result<ScaledValue> {
    check_positive("bessel_k_scaled", x)?;
    let mantissa = if x <= K_SERIES_MAX {
        let (k0, k1) = k01_series(x);
        k_upward(n.get(), x, k0, k1) * x.exp()
    } else {
        let (k0, k1) = k01_quadrature_scaled(x);
        k_upward(n.get(), x, k0, k1)
    };
    if !mantissa.is_finite() {
        return Err(Error::Overflow {
            function: "bessel_k_scaled",
            order: n.get(),
            x,
        });
    }
    Ok(ScaledValue::scaled(mantissa, -x))
}

/// Σ_k (x/2)^{2k+n} / (k! (k+n)!). Every term is positive, so the sum is
/// accurate to a few ulps wherever the leading factor does not overflow.
fn i_series(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / k as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term < 0.25 * f64::EPSILON * sum {
            break;
        }
    }
    lead * sum
}

/// `e^{-x} I_n(x)` by Miller's backward recurrence, normalized with
/// `1 = e^{-x} (I_0 + 2 Σ_{k>=1} I_k)`.
fn i_miller_scaled(n: u32, x: f64) -> f64 {
    // Contamination by the K-like solution falls off as e^{-(N² - n²)/x}
    // and the tail of the normalization sum as e^{-N²/(2x)}.
    let start = n as usize + (150.0 * x).sqrt().ceil() as usize + 30;
    let two_over_x = 2.0 / x;
    let mut above = 0.0; // I_{k+1}
    let mut here = 1e-300; // I_k
    let mut sum = 0.0;
    let mut at_n = 0.0;
    for k in (1..=start).rev() {
        let below = (k as f64) * two_over_x * here + above;
        above = here;
        here = below;
        if k - 1 == n as usize {
            at_n = here;
        }
        sum += 2.0 * above;
        if here > RESCALE_AT {
            here /= RESCALE_AT;
            above /= RESCALE_AT;
            sum /= RESCALE_AT;
            at_n /= RESCALE_AT;
        }
    }
    // here = I_0 after the loop (unnormalized); `above` is I_1 and was added.
    sum += here;
    if n == 0 {
        at_n = here;
    }
    at_n / sum
}

/// `K_0`, `K_1` from their series with logarithmic terms (valid for small x).
fn k01_series(x: f64) -> (f64, f64) {
    let half = 0.5 * x;
    let q = half * half;
    let ln_half = half.ln();

    // K_0 = -(ln(x/2) + γ) I_0 + Σ_{k>=1} q^k/(k!)² H_k
    let mut t0 = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut s0 = 0.0;
    // K_1 = 1/x + ln(x/2) I_1 - (x/4) Σ_k q^k/(k!(k+1)!) (ψ(k+1) + ψ(k+2))
    let mut t1 = 1.0;
    let mut i1 = 1.0;
    let mut s1 = -2.0 * EULER_GAMMA + 1.0;
    let mut k = 0u32;
    loop {
        k += 1;
        let kf = k as f64;
        harmonic += 1.0 / kf;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        i0 += t0;
        i1 += t1;
        s0 += t0 * harmonic;
        s1 += t1 * (-2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (kf + 1.0));
        if t0 * harmonic.max(1.0) < 0.25 * f64::EPSILON * s0.abs().max(i0) && k > 2 {
            break;
        }
    }
    let k0 = -(ln_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + ln_half * half * i1 - 0.5 * half * s1;
    (k0, k1)
}

/// `e^{x} K_0(x)` and `e^{x} K_1(x)` from the trapezoidal rule applied to
/// `∫_0^∞ e^{-x (cosh t - 1)} cosh(ν t) dt`. The integrand is analytic and
/// decays doubly exponentially, so the rule converges geometrically in 1/h.
fn k01_quadrature_scaled(x: f64) -> (f64, f64) {
    let h = (0.2f64).min(0.45 / x.sqrt());
    let mut s0 = 0.5;
    let mut s1 = 0.5;
    let mut k = 1u32;
    loop {
        let t = k as f64 * h;
        let sh = (0.5 * t).sinh();
        // cosh t - 1 without cancellation
        let cm1 = 2.0 * sh * sh;
        let w = (-x * cm1).exp();
        s0 += w;
        s1 += w * (1.0 + cm1);
        if x * cm1 - t > 45.0 {
            break;
        }
        k += 1;
    }
    (h * s0, h * s1)
}

/// `K_{k+1} = K_{k-1} + (2k/x) K_k`, stable in the increasing direction.
fn k_upward(n: u32, x: f64, k0: f64, k1: f64) -> f64 {
    match n {
        0 => k0,
        1 => k1,
        _ => {
            let (mut lo, mut hi) = (k0, k1);
            for k in 1..n {
                let next = lo + (2.0 * k as f64 / x) * hi;
                lo = hi;
                hi = next;
            }
            hi
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn o(n: u32) -> BesselOrder {
        BesselOrder::new(n)
    }

    // Reference values: mpmath at 30 digits, scaled as e^{-x} I_n, e^{x} K_n.
    const REFERENCE: &[(u32, f64, f64, f64)] = &[
        (0, 2.0, 0.308_508_322_553_671_04, 0.841_568_215_070_771_4),
        (1, 2.0, 0.215_269_289_248_937_66, 1.033_476_847_068_688_6),
        (0, 2.000_000_1, 0.308_508_313_229_768_1, 0.841_568_195_879_908_9),
        (5, 0.1, 2.357_329_429_578_214e-9, 42_412_050.199_178_21),
        (20, 0.1, 3.547_298_401_813_024_5e-45, 7.047_528_538_886_919e42),
        (21, 30.0, 5.522_796_886_474_970_6e-5, 247.217_387_166_006_6),
        (0, 30.0, 0.073_145_946_482_237_29, 0.227_886_665_616_253_73),
        (3, 7.5, 0.078_571_963_371_959_87, 0.788_167_821_675_031_9),
        (10, 25.0, 0.010_711_755_425_929_168, 1.733_645_371_619_134_2),
        (10, 26.0, 0.011_341_495_319_733_562, 1.582_670_116_326_403_6),
        (0, 700.0, 0.015_081_295_651_531_358, 0.047_362_369_454_613_57),
        (1, 50.0, 0.055_993_123_892_895_4, 0.178_566_558_558_815_57),
    ];

    #[test]
    fn matches_reference_table() {
        for &(n, x, i_ref, k_ref) in REFERENCE {
            let i = bessel_i_scaled(o(n), x).unwrap().mantissa;
            let k = bessel_k_scaled(o(n), x).unwrap().mantissa;
            assert!(rel(i, i_ref) < 2e-14, "I_{n}({x}): {i} vs {i_ref}");
            assert!(rel(k, k_ref) < 2e-14, "K_{n}({x}): {k} vs {k_ref}");
        }
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_i(o(0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(o(3), 0.0).unwrap(), 0.0);
        let s = bessel_i_scaled(o(0), 0.0).unwrap();
        assert_eq!((s.mantissa, s.log_scale), (1.0, 0.0));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_i(o(0), -1.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_k(o(0), 0.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_k(o(0), -2.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_i_scaled(o(1), -0.1), Err(Error::Domain { .. })));
        assert!(matches!(bessel_k_scaled(o(1), 0.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_i(o(0), f64::NAN), Err(Error::Domain { .. })));
    }

    #[test]
    fn unscaled_overflow_is_reported() {
        assert!(matches!(bessel_i(o(0), 710.0), Err(Error::Overflow { .. })));
        let m = bessel_i_scaled(o(0), 700.0).unwrap().mantissa;
        assert!(m > 0.0 && m < 1.0);
        let k = bessel_k_scaled(o(0), 700.0).unwrap().mantissa;
        assert!(k.is_finite() && k > 0.0);
    }

    #[test]
    fn series_and_miller_agree_on_overlap() {
        for n in [0u32, 1, 4, 12] {
            for x in [3.0, 8.0, 15.0, 24.0] {
                let s = i_series(n, x) * (-x).exp();
                let m = i_miller_scaled(n, x);
                assert!(rel(m, s) < 1e-14, "n={n} x={x}: {m} vs {s}");
            }
        }
    }

    #[test]
    fn log_series_and_quadrature_agree_near_switch() {
        for x in [0.8, 1.5, 2.0] {
            let (k0, k1) = k01_series(x);
            let (q0, q1) = k01_quadrature_scaled(x);
            let e = (-x).exp();
            assert!(rel(k0, q0 * e) < 1e-14, "K0({x}) {k0} {}", q0 * e);
            assert!(rel(k1, q1 * e) < 1e-14, "K1({x}) {k1} {}", q1 * e);
        }
    }
}
