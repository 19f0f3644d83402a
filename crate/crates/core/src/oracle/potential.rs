use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpShape {
    Gaussian,
    TopHat,
}

impl fmt::Display for BumpShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BumpShape::Gaussian => "gaussian",
            BumpShape::TopHat => "top_hat",
        })
    }
}

impl FromStr for BumpShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(BumpShape::Gaussian),
            "top_hat" | "top-hat" | "tophat" => Ok(BumpShape::TopHat),
            other => Err(Error::InvalidParameter(format!(
                "unknown bump shape '{other}' (expected gaussian or top_hat)"
            ))),
        }
    }
}

/// A smooth stand-in for `-a δ(r - r0)` with the same area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedPotential {
    pub coupling: f64,
    pub radius: f64,
    pub sigma: f64,
    pub shape: BumpShape,
}

/// Gaussian tails beyond this many widths are below 1e-31 of the peak.
const GAUSSIAN_REACH: f64 = 12.0;

pub fn regularized_potential(coupling: f64, radius: f64, sigma: f64, shape: BumpShape) -> Result<RegularizedPotential> {
    if !(radius > 0.0 && radius.is_finite()) || !coupling.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bump needs finite coupling and positive radius, got a = {coupling}, r0 = {radius}"
        )));
    }
    // small slack so that r0/10 computed by the caller is accepted
    if !(sigma > 0.0 && sigma <= 0.1 * radius * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "bump width must satisfy 0 < sigma <= r0/10, got sigma = {sigma}, r0 = {radius}"
        )));
    }
    Ok(RegularizedPotential {
        coupling,
        radius,
        sigma,
        shape,
    })
}

impl RegularizedPotential {
    pub fn value(&self, r: f64) -> f64 {
        let (a, r0, s) = (self.coupling, self.radius, self.sigma);
        match self.shape {
            BumpShape::Gaussian => {
                let z = (r - r0) / s;
                -a * (-0.5 * z * z).exp() / (s * (2.0 * PI).sqrt())
            }
            BumpShape::TopHat => {
                if (r - r0).abs() <= s {
                    -a / (2.0 * s)
                } else {
                    0.0
                }
            }
        }
    }

    /// Interval the integrator must resolve with steps no larger than the
    /// width. For the top hat these are exactly its discontinuities.
    pub fn support(&self) -> (f64, f64) {
        match self.shape {
            BumpShape::TopHat => (self.radius - self.sigma, self.radius + self.sigma),
            BumpShape::Gaussian => {
                let reach = GAUSSIAN_REACH * self.sigma;
                ((self.radius - reach).max(0.5 * self.radius), self.radius + reach)
            }
        }
    }
}
