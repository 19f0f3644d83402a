use super::{Channel, Kappa, ShellParams, SpinorSample};
use crate::error::{Error, Result};
use crate::specfun::{bessel_i_scaled, bessel_k_scaled, BesselOrder};

/// Regular solution of the free radial system inside the shell.
///
/// For `j > 0`, with `n = j - 1/2` and `x = κr`:
///
/// ```text
/// F =  sqrt((M+E) x) I_n(x)
/// G = -sqrt((M-E) x) I_{n+1}(x)
/// ```
///
/// This is the real form of the `J_{n}(iκr)` solution once the constant
/// phases are stripped; the minus sign on `G` is what the radial system
/// demands. Negative `j` uses the mirrored free solution `F_{-j,E} = G_{j,-E}`.
/// The result is scaled to unit norm at `r0`.
pub fn inner_solution(ch: Channel, energy: f64, r: f64, p: &ShellParams) -> Result<SpinorSample> {
    p.check_in_gap(energy)?;
    if !(r > 0.0 && r <= p.radius) {
        return Err(Error::Domain {
            function: "inner_solution radius",
            x: r,
        });
    }
    if !ch.is_positive() {
        let s = inner_solution(ch.negated(), -energy, r, p)?;
        return Ok(SpinorSample::new(r, s.g, s.f));
    }
    let (n, m) = ch.orders();
    let kappa = Kappa::from_energy(p.mass, energy)?.value();
    let up = (p.mass + energy).sqrt();
    let down = (p.mass - energy).sqrt();
    let raw = |x: f64| -> Result<(f64, f64)> {
        let sx = x.sqrt();
        let i_n = bessel_i_scaled(BesselOrder::new(n), x)?.mantissa;
        let i_m = bessel_i_scaled(BesselOrder::new(m), x)?.mantissa;
        Ok((up * sx * i_n, -down * sx * i_m))
    };
    let x = kappa * r;
    let x0 = kappa * p.radius;
    let (f0, g0) = raw(x0)?;
    let (f, g) = raw(x)?;
    let scale = (x - x0).exp() / f0.hypot(g0);
    Ok(SpinorSample::new(r, f * scale, g * scale))
}

/// Decaying solution of the free radial system outside the shell:
///
/// ```text
/// F = sqrt((M+E) x) K_n(x)
/// G = sqrt((M-E) x) K_{n+1}(x)
/// ```
///
/// the real form of the `H^{(1)}_n(iκr)` solution. Unit norm at `r0`.
pub fn outer_solution(ch: Channel, energy: f64, r: f64, p: &ShellParams) -> Result<SpinorSample> {
    p.check_in_gap(energy)?;
    if !(r >= p.radius && r.is_finite()) {
        return Err(Error::Domain {
            function: "outer_solution radius",
            x: r,
        });
    }
    if !ch.is_positive() {
        let s = outer_solution(ch.negated(), -energy, r, p)?;
        return Ok(SpinorSample::new(r, s.g, s.f));
    }
    let (n, m) = ch.orders();
    let kappa = Kappa::from_energy(p.mass, energy)?.value();
    let up = (p.mass + energy).sqrt();
    let down = (p.mass - energy).sqrt();
    let raw = |x: f64| -> Result<(f64, f64)> {
        let sx = x.sqrt();
        let k_n = bessel_k_scaled(BesselOrder::new(n), x)?.mantissa;
        let k_m = bessel_k_scaled(BesselOrder::new(m), x)?.mantissa;
        Ok((up * sx * k_n, down * sx * k_m))
    };
    let x = kappa * r;
    let x0 = kappa * p.radius;
    let (f0, g0) = raw(x0)?;
    let (f, g) = raw(x)?;
    let scale = (x0 - x).exp() / f0.hypot(g0);
    Ok(SpinorSample::new(r, f * scale, g * scale))
}

/// `F⁻/G⁻` at the inner side of the shell.
pub fn inner_ratio(ch: Channel, energy: f64, p: &ShellParams) -> Result<f64> {
    p.check_in_window(energy)?;
    let s = inner_solution(ch, energy, p.radius, p)?;
    Ok(s.f / s.g)
}

/// `F⁺/G⁺` at the outer side of the shell.
pub fn outer_ratio(ch: Channel, energy: f64, p: &ShellParams) -> Result<f64> {
    p.check_in_window(energy)?;
    let s = outer_solution(ch, energy, p.radius, p)?;
    Ok(s.f / s.g)
}

/// Relative residual of the free radial system at `r` for a solution given
/// as a closure, using a five-point central difference with step `h`.
///
/// Returns `|residual| / ((M + |j|/r) |(F, G)|)`.
pub fn radial_residual<S>(ch: Channel, energy: f64, mass: f64, r: f64, h: f64, solution: S) -> Result<f64>
where
    S: Fn(f64) -> Result<SpinorSample>,
{
    let j = ch.j();
    let at = |k: f64| solution(r + k * h);
    let (m2, m1, c, p1, p2) = (at(-2.0)?, at(-1.0)?, at(0.0)?, at(1.0)?, at(2.0)?);
    let d = |a: f64, b: f64, cc: f64, dd: f64| (a - 8.0 * b + 8.0 * cc - dd) / (12.0 * h);
    let df = d(m2.f, m1.f, p1.f, p2.f);
    let dg = d(m2.g, m1.g, p1.g, p2.g);
    let res_upper = dg + (j / r) * c.g - (energy - mass) * c.f;
    let res_lower = -df + (j / r) * c.f - (energy + mass) * c.g;
    let scale = (mass + j.abs() / r) * c.norm();
    Ok(res_upper.hypot(res_lower) / scale)
}
