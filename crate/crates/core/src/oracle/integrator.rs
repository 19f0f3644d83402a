use serde::{Deserialize, Serialize};

use crate::dirac::SpinorSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Outward start radius; `None` means `1e-6 · r0`.
    pub r_min: Option<f64>,
    /// Inward start radius; `None` means the bump's outer edge plus `40/κ`.
    pub r_max: Option<f64>,
    pub max_steps: usize,
    /// Amplitudes leaving `[1/guard, guard]` are rescaled by a power of two.
    pub renorm_guard: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            rtol: 1e-10,
            atol: 1e-12,
            r_min: None,
            r_max: None,
            max_steps: 500_000,
            renorm_guard: 1e100,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive("rtol", self.rtol)?;
        positive("atol", self.atol)?;
        if let Some(r) = self.r_min {
            positive("r_min", r)?;
        }
        if let Some(r) = self.r_max {
            positive("r_max", r)?;
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter("max_steps must be positive".into()));
        }
        if !(self.renorm_guard > 1.0) {
            return Err(Error::InvalidParameter("renorm_guard must exceed 1".into()));
        }
        Ok(())
    }
}

/// Integrated amplitudes at a requested radius. The true solution is
/// `sample · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub sample: SpinorSample,
    pub log_scale: f64,
}

impl TracePoint {
    pub fn unscaled(&self) -> SpinorSample {
        self.sample.scaled(self.log_scale.exp())
    }

    pub fn angle(&self) -> f64 {
        self.sample.angle()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionTrace {
    pub points: Vec<TracePoint>,
    pub steps: usize,
    pub rejected: usize,
    pub renormalizations: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince 5(4) step from `(r, y)` with slope `k1 = f(r, y)`.
/// Returns the fifth-order update, the local error vector and `f(r+h, y_new)`.
pub fn dopri5_step<F>(f: &F, r: f64, y: [f64; 2], k1: [f64; 2], h: f64) -> ([f64; 2], [f64; 2], [f64; 2])
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    let mut k = [[0.0; 2]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = y;
        for (i, ki) in k.iter().enumerate().take(s) {
            let a = A[s][i];
            if a != 0.0 {
                ys[0] += h * a * ki[0];
                ys[1] += h * a * ki[1];
            }
        }
        if s == 6 {
            // stage 7 is evaluated at the fifth-order solution itself
            k[6] = f(r + h, ys);
            let err = [
                h * E.iter().zip(&k).map(|(e, ki)| e * ki[0]).sum::<f64>(),
                h * E.iter().zip(&k).map(|(e, ki)| e * ki[1]).sum::<f64>(),
            ];
            return (ys, err, k[6]);
        }
        k[s] = f(r + C[s] * h, ys);
    }
    unreachable!("the loop returns at stage 7")
}

/// A radius the path must stop at exactly.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stop {
    pub r: f64,
    /// Largest step allowed on the piece ending here.
    pub max_step: f64,
    pub record: bool,
}

/// Integrate a linear 2-vector ODE through `stops` (monotone in the travel
/// direction) with adaptive Dormand–Prince steps.
///
/// The amplitude is kept inside the renormalization guard by power-of-two
/// rescaling. The absolute tolerance is tracked in unscaled units, so a run
/// with rescaling is bitwise the same computation as one without.
pub(crate) fn integrate_path<F>(f: &F, start: f64, y0: [f64; 2], stops: &[Stop], length_scale: f64, cfg: &IntegrationConfig) -> Result<SolutionTrace>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    let mut r = start;
    let mut y = y0;
    let mut k1 = f(r, y);
    let mut exp2: i32 = 0;
    let mut trace = SolutionTrace {
        points: Vec::new(),
        steps: 0,
        rejected: 0,
        renormalizations: 0,
    };
    let first_len = stops.first().map(|s| (s.r - start).abs()).unwrap_or(0.0);
    let mut h_abs = 0.01 * first_len.min(start.abs().max(1e-300)).max(1e-12 * length_scale);
    let min_step = 1e-14 * length_scale;

    for stop in stops {
        let dir = if stop.r >= r { 1.0 } else { -1.0 };
        h_abs = h_abs.min(stop.max_step);
        while r != stop.r {
            if trace.steps + trace.rejected >= cfg.max_steps {
                return Err(Error::Integration {
                    r,
                    reason: format!("step budget of {} exhausted", cfg.max_steps),
                });
            }
            let remaining = (stop.r - r).abs();
            let last = h_abs >= remaining;
            let h_try = if last { remaining } else { h_abs.min(stop.max_step) };
            let h = dir * h_try;
            let (y_new, err, k_new) = dopri5_step(f, r, y, k1, h);
            let atol = cfg.atol * (-(exp2 as f64)).exp2();
            // one scale for both components: the angle of (F, G) is what
            // matters, and one component may be tiny next to the other
            let sc = atol + cfg.rtol * y[0].hypot(y[1]).max(y_new[0].hypot(y_new[1]));
            let err_norm = err[0].abs().max(err[1].abs()) / sc;
            if !err_norm.is_finite() {
                return Err(Error::Integration {
                    r,
                    reason: "non-finite amplitude".into(),
                });
            }
            if err_norm <= 1.0 {
                r = if last { stop.r } else { r + h };
                y = y_new;
                k1 = k_new;
                trace.steps += 1;
                let grow = if err_norm == 0.0 {
                    5.0
                } else {
                    (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                // a clipped final step says nothing about the natural step size
                h_abs = if last { h_abs.max(h_try * grow) } else { h_try * grow };

                let m = y[0].abs().max(y[1].abs());
                if m > cfg.renorm_guard || (m > 0.0 && m < cfg.renorm_guard.recip()) {
                    let k = m.log2().floor() as i32;
                    let s = (-(k as f64)).exp2();
                    y = [y[0] * s, y[1] * s];
                    k1 = [k1[0] * s, k1[1] * s];
                    exp2 += k;
                    trace.renormalizations += 1;
                }
            } else {
                trace.rejected += 1;
                h_abs = h_try * (0.9 * err_norm.powf(-0.2)).clamp(0.2, 1.0);
                if h_abs < min_step {
                    return Err(Error::Integration {
                        r,
                        reason: format!("step size collapsed below {min_step:e} (stiff region?)"),
                    });
                }
            }
        }
        if stop.record {
            trace.points.push(TracePoint {
                sample: SpinorSample::new(r, y[0], y[1]),
                log_scale: exp2 as f64 * std::f64::consts::LN_2,
            });
        }
    }
    Ok(trace)
}
