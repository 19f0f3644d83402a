use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {x} is outside the domain")]
    Domain { function: &'static str, x: f64 },

    #[error("{function}({order}, {x}) overflows f64; use the scaled variant")]
    Overflow {
        function: &'static str,
        order: u32,
        x: f64,
    },

    #[error("|z| = {modulus} exceeds the series accuracy window |z| <= {limit}")]
    SeriesWindow { modulus: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("energy {energy} lies outside the usable gap of mass {mass} (kappa degenerates)")]
    DegenerateKappa { energy: f64, mass: f64 },

    #[error("root refinement did not converge after {iterations} iterations, final bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("bracket [{lo}, {hi}] does not enclose a sign change")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("integration failed at r = {r}: {reason}")]
    Integration { r: f64, reason: String },

    #[error("extrapolation failed: {0}")]
    Extrapolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
