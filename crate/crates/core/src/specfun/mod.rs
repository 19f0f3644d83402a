//! Integer-order modified Bessel functions in double precision.
//!
//! `I_n` uses the power series up to [`I_SERIES_MAX`] and Miller's backward
//! recurrence normalized by `e^x = I_0 + 2 Σ I_k` beyond it. `K_0`, `K_1` use
//! the logarithmic series up to [`K_SERIES_MAX`] and a trapezoidal rule on
//! `∫ e^{-x cosh t} cosh(νt) dt` beyond it; higher orders come from upward
//! recurrence. Relative accuracy is ~1e-14 on `x ∈ [1e-6, 30]`.

mod complex_series;
mod modified;

pub use complex_series::{complex_bessel_j_series, J_SERIES_WINDOW};
pub use modified::{
    bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled, I_SERIES_MAX, K_SERIES_MAX,
};

use crate::error::{Error, Result};

/// Order of `I_n` / `K_n`. Negative orders fold onto positive ones since
/// `I_{-n} = I_n` and `K_{-n} = K_n` for integer `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BesselOrder(u32);

impl BesselOrder {
    pub const fn new(n: u32) -> Self {
        BesselOrder(n)
    }

    pub fn folded(n: i64) -> Self {
        BesselOrder(n.unsigned_abs() as u32)
    }

    pub const fn get(self) -> u32 {
        self.0
    }
}

impl From<u32> for BesselOrder {
    fn from(n: u32) -> Self {
        BesselOrder(n)
    }
}

/// A value stored as `mantissa · e^{log_scale}`.
///
/// The scaled Bessel routines put `e^{∓x}` into the scale so the mantissa
/// stays finite for arguments where the plain value over- or underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub log_scale: f64,
    pub is_scaled: bool,
}

impl ScaledValue {
    pub fn unscaled(value: f64) -> Self {
        ScaledValue {
            mantissa: value,
            log_scale: 0.0,
            is_scaled: false,
        }
    }

    pub fn scaled(mantissa: f64, log_scale: f64) -> Self {
        ScaledValue {
            mantissa,
            log_scale,
            is_scaled: log_scale != 0.0,
        }
    }

    /// `mantissa · e^{log_scale}`; may be infinite or zero when out of range.
    pub fn value(&self) -> f64 {
        if self.log_scale == 0.0 {
            self.mantissa
        } else {
            self.mantissa * self.log_scale.exp()
        }
    }

    /// The plain value, or an error if it is not representable.
    pub fn try_value(&self) -> Result<f64> {
        let v = self.value();
        if v.is_finite() && (v != 0.0 || self.mantissa == 0.0) {
            Ok(v)
        } else {
            Err(Error::InvalidParameter(format!(
                "scaled value {:e}·e^{} is not representable",
                self.mantissa, self.log_scale
            )))
        }
    }

    /// Natural log of the absolute value.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_negative_orders() {
        assert_eq!(BesselOrder::folded(-3), BesselOrder::new(3));
        assert_eq!(BesselOrder::folded(4).get(), 4);
    }

    #[test]
    fn scaled_round_trip() {
        let s = ScaledValue::scaled(0.25, 3.0);
        assert!((s.value() - 0.25 * 3f64.exp()).abs() < 1e-15 * s.value());
        assert!((s.ln_abs() - (0.25f64.ln() + 3.0)).abs() < 1e-15);
        assert!(ScaledValue::scaled(1.0, 800.0).try_value().is_err());
        assert_eq!(ScaledValue::unscaled(0.0).try_value(), Ok(0.0));
    }
}
