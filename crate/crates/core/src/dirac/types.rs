use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Energies closer than `GAP_MARGIN · M` to either gap edge are excluded.
pub const GAP_MARGIN: f64 = 1e-9;

/// Mass, shell radius and coupling of `V(r) = -a δ(r - r0)`.
///
/// Any finite coupling is accepted. `a <= 0` lies outside the attractive
/// regime but the matching condition is still well defined there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellParams {
    pub mass: f64,
    pub radius: f64,
    pub coupling: f64,
}

impl ShellParams {
    pub fn new(mass: f64, radius: f64, coupling: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shell radius must be positive and finite, got {radius}"
            )));
        }
        if !coupling.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling must be finite, got {coupling}"
            )));
        }
        Ok(ShellParams {
            mass,
            radius,
            coupling,
        })
    }

    /// `tan(a)`, or `None` where it diverges (`a = π/2 + kπ`).
    pub fn alpha(&self) -> Option<f64> {
        let c = self.coupling.cos();
        if c.abs() < 1e-12 {
            None
        } else {
            Some(self.coupling.sin() / c)
        }
    }

    /// True for the attractive shell `a > 0`.
    pub fn is_attractive(&self) -> bool {
        self.coupling > 0.0
    }

    /// The same shell with `a → -a`.
    pub fn with_reversed_coupling(&self) -> Self {
        ShellParams {
            coupling: -self.coupling,
            ..*self
        }
    }

    /// `(M, r0, a) → (sM, r0/s, a)`; energies scale by `s`.
    pub fn rescaled(&self, s: f64) -> Result<Self> {
        ShellParams::new(self.mass * s, self.radius / s, self.coupling)
    }

    /// Usable energy window `(-M + ε, M - ε)`.
    pub fn energy_window(&self) -> (f64, f64) {
        let eps = GAP_MARGIN * self.mass;
        (-self.mass + eps, self.mass - eps)
    }

    pub(crate) fn check_in_window(&self, energy: f64) -> Result<()> {
        let (lo, hi) = self.energy_window();
        if energy.is_finite() && energy >= lo && energy <= hi {
            Ok(())
        } else {
            Err(Error::DegenerateKappa {
                energy,
                mass: self.mass,
            })
        }
    }

    pub(crate) fn check_in_gap(&self, energy: f64) -> Result<()> {
        if energy.is_finite() && energy.abs() < self.mass {
            Ok(())
        } else {
            Err(Error::Domain {
                function: "energy outside the mass gap",
                x: energy,
            })
        }
    }
}

/// Total angular momentum `j = two_j / 2`, a half-odd integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Channel {
    two_j: i32,
}

impl Channel {
    pub fn new(two_j: i32) -> Result<Self> {
        if two_j % 2 == 0 {
            Err(Error::InvalidParameter(
                "j must be half-odd-integer".to_string(),
            ))
        } else {
            Ok(Channel { two_j })
        }
    }

    pub fn two_j(&self) -> i32 {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        0.5 * self.two_j as f64
    }

    pub fn is_positive(&self) -> bool {
        self.two_j > 0
    }

    pub fn negated(&self) -> Self {
        Channel {
            two_j: -self.two_j,
        }
    }

    /// Bessel orders `(j - 1/2, j + 1/2)` for `j > 0`; for `j < 0` the
    /// orders of the mirrored channel `-j`.
    pub fn orders(&self) -> (u32, u32) {
        let n = (self.two_j.unsigned_abs() - 1) / 2;
        (n, n + 1)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.two_j)
    }
}

impl FromStr for Channel {
    type Err = Error;

    /// Accepts `"1/2"`, `"-3/2"` and plain numbers such as `"0.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter("j must be half-odd-integer".to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            let den: i32 = den.trim().parse().map_err(|_| bad())?;
            return match den {
                2 => Channel::new(num).map_err(|_| bad()),
                _ => Err(bad()),
            };
        }
        let value: f64 = s.parse().map_err(|_| bad())?;
        let twice = 2.0 * value;
        if twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
            return Err(bad());
        }
        Channel::new(twice as i32).map_err(|_| bad())
    }
}

/// Decay constant `κ = sqrt(M² - E²)` of the bound-state tail.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Kappa(f64);

impl Kappa {
    pub fn from_energy(mass: f64, energy: f64) -> Result<Self> {
        if !(energy.abs() <= mass) {
            return Err(Error::Domain {
                function: "kappa",
                x: energy,
            });
        }
        // (M - E)(M + E) avoids cancellation near the gap edges.
        Ok(Kappa(((mass - energy) * (mass + energy)).sqrt()))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Radial amplitudes `(F, G)` at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinorSample {
    pub r: f64,
    pub f: f64,
    pub g: f64,
}

impl SpinorSample {
    pub fn new(r: f64, f: f64, g: f64) -> Self {
        SpinorSample { r, f, g }
    }

    pub fn norm_sq(&self) -> f64 {
        self.f * self.f + self.g * self.g
    }

    pub fn norm(&self) -> f64 {
        self.f.hypot(self.g)
    }

    /// `θ = atan2(F, G)`, so that `tan θ = F/G`.
    pub fn angle(&self) -> f64 {
        self.f.atan2(self.g)
    }

    pub fn scaled(&self, s: f64) -> Self {
        SpinorSample {
            r: self.r,
            f: self.f * s,
            g: self.g * s,
        }
    }
}
