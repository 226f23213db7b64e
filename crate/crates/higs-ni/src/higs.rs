//! The hybrid integrator-gain element: a controller that switches between an
//! integrator `xh' = wh * e` and a static gain `xh = kh * e` so that the
//! input/output pair `(e, u = xh)` stays in the sector `e u >= u^2 / kh`.
//!
//! Open-loop stepping against an externally supplied input signal lives
//! here; the closed-loop interconnection is in [`crate::sim`].

use alloc::vec::Vec;

// f64 math via the trait in no_std builds; std's inherent methods shadow it
// elsewhere, leaving the import apparently unused
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::tol;

/// Tunable pair: integrator frequency `omega_h >= 0` (rad/s) and sector gain
/// `k_h > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HigsParams {
    k_h: f64,
    omega_h: f64,
}

impl HigsParams {
    pub fn new(k_h: f64, omega_h: f64) -> Result<Self> {
        if !k_h.is_finite() || k_h <= 0.0 {
            return Err(Error::InvalidParameter("k_h must be positive and finite"));
        }
        if !omega_h.is_finite() || omega_h < 0.0 {
            return Err(Error::InvalidParameter(
                "omega_h must be nonnegative and finite",
            ));
        }
        Ok(Self { k_h, omega_h })
    }

    pub fn k_h(&self) -> f64 {
        self.k_h
    }

    pub fn omega_h(&self) -> f64 {
        self.omega_h
    }
}

/// Operating regime of the element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Integrator,
    Gain,
}

impl Mode {
    /// CSV encoding: 0 = integrator, 1 = gain.
    pub fn as_u8(&self) -> u8 {
        match self {
            Mode::Integrator => 0,
            Mode::Gain => 1,
        }
    }
}

/// Hybrid state of the element at time `t`. The output is `u = x_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HigsState {
    pub x_h: f64,
    pub mode: Mode,
    pub t: f64,
}

impl HigsState {
    /// The default initial condition: zero state in integrator mode.
    pub fn initial() -> Self {
        Self {
            x_h: 0.0,
            mode: Mode::Integrator,
            t: 0.0,
        }
    }
}

/// Continuous, piecewise-differentiable input with a consistent derivative.
///
/// When no analytic derivative is available implement only `e`; the default
/// `edot` is a central difference with step `tol::H_FD * max(1, timescale)`.
pub trait InputSignal {
    fn e(&self, t: f64) -> f64;

    /// Characteristic time of the signal; scales the finite-difference step.
    fn timescale(&self) -> f64 {
        1.0
    }

    fn edot(&self, t: f64) -> f64 {
        let h = tol::H_FD * self.timescale().max(1.0);
        (self.e(t + h) - self.e(t - h)) / (2.0 * h)
    }
}

/// Signal from a pair of closures `(e, edot)`.
pub struct AnalyticSignal<E, D> {
    pub e: E,
    pub edot: D,
}

impl<E: Fn(f64) -> f64, D: Fn(f64) -> f64> InputSignal for AnalyticSignal<E, D> {
    fn e(&self, t: f64) -> f64 {
        (self.e)(t)
    }

    fn edot(&self, t: f64) -> f64 {
        (self.edot)(t)
    }
}

/// Signal from a single closure; derivative by central difference.
pub struct NumericSignal<E> {
    pub e: E,
    pub timescale: f64,
}

impl<E: Fn(f64) -> f64> InputSignal for NumericSignal<E> {
    fn e(&self, t: f64) -> f64 {
        (self.e)(t)
    }

    fn timescale(&self) -> f64 {
        self.timescale
    }
}

/// `amplitude * sin(omega t)` with its exact derivative.
#[derive(Debug, Clone, Copy)]
pub struct SineInput {
    pub amplitude: f64,
    pub omega: f64,
}

impl InputSignal for SineInput {
    fn e(&self, t: f64) -> f64 {
        self.amplitude * (self.omega * t).sin()
    }

    fn edot(&self, t: f64) -> f64 {
        self.amplitude * self.omega * (self.omega * t).cos()
    }
}

/// Constant input with zero derivative.
#[derive(Debug, Clone, Copy)]
pub struct ConstantInput(pub f64);

impl InputSignal for ConstantInput {
    fn e(&self, _t: f64) -> f64 {
        self.0
    }

    fn edot(&self, _t: f64) -> f64 {
        0.0
    }
}

/// Sector membership: `e u >= u^2/k_h - SECTOR*(1 + u^2)`. The sector forces
/// the input and output to share sign.
pub fn in_sector(e: f64, u: f64, params: &HigsParams) -> bool {
    e * u >= u * u / params.k_h - tol::SECTOR * (1.0 + u * u)
}

/// Gain-mode set membership: on the sector boundary `u = k_h e` (within
/// tolerance) with the integrator dynamics pointing out of the sector,
/// `omega_h e^2 > k_h e edot` (strict).
pub fn in_f2(e: f64, u: f64, edot: f64, params: &HigsParams) -> bool {
    (u - params.k_h * e).abs() <= tol::GAIN_MODE * (1.0 + u.abs())
        && params.omega_h * e * e > params.k_h * e * edot
}

/// Select the operating mode for a sector-feasible triple `(e, x_h, edot)`:
/// gain mode iff the triple lies in the gain-mode set, integrator otherwise.
/// A state outside the sector beyond tolerance signals an integration
/// failure upstream and is an error.
pub fn mode_select(e: f64, edot: f64, x_h: f64, params: &HigsParams) -> Result<Mode> {
    if !in_sector(e, x_h, params) {
        return Err(Error::OutsideSector { t: f64::NAN });
    }
    if in_f2(e, x_h, edot, params) {
        Ok(Mode::Gain)
    } else {
        Ok(Mode::Integrator)
    }
}

/// Sector-boundary gap `g1 = e x_h - x_h^2/k_h`; nonnegative inside the
/// sector, zero on its boundary.
fn boundary_gap(e: f64, x_h: f64, k_h: f64) -> f64 {
    e * x_h - x_h * x_h / k_h
}

/// Gain-mode margin `g2 = omega_h e^2 - k_h e edot`; positive while the gain
/// branch must stay active.
fn gain_margin(e: f64, edot: f64, params: &HigsParams) -> f64 {
    params.omega_h * e * e - params.k_h * e * edot
}

/// One RK4 step of the integrator branch `x_h' = omega_h e(t)` over `h`.
fn rk4_integrator<I: InputSignal>(input: &I, t: f64, x_h: f64, h: f64, omega_h: f64) -> f64 {
    let k1 = input.e(t);
    let k23 = input.e(t + 0.5 * h);
    let k4 = input.e(t + h);
    x_h + h * omega_h * (k1 + 4.0 * k23 + k4) / 6.0
}

/// Advance the element by `dt` against the supplied input.
///
/// Integrator segments use RK4; gain segments are algebraic
/// (`x_h = k_h e`). Mode transitions are located by bisection on the
/// switching functions to a time resolution of `tol::EVENT * dt`, and the
/// state is committed on the feasible side of each event so `x_h` stays
/// continuous across switches.
pub fn step_open_loop<I: InputSignal>(
    state: &HigsState,
    input: &I,
    dt: f64,
    params: &HigsParams,
) -> Result<HigsState> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter("dt must be positive and finite"));
    }
    let t_end = state.t + dt;
    let mut t = state.t;
    let mut x_h = state.x_h;
    let mut mode = state.mode;
    if !in_sector(input.e(t), x_h, params) {
        return Err(Error::OutsideSector { t });
    }
    let min_advance = tol::EVENT * dt;
    let mut switches = 0usize;
    while t_end - t > min_advance {
        if switches > 256 {
            return Err(Error::EventResolution { t });
        }
        let remaining = t_end - t;
        match mode {
            Mode::Integrator => {
                let trial = rk4_integrator(input, t, x_h, remaining, params.omega_h);
                if boundary_gap(input.e(t + remaining), trial, params.k_h) >= 0.0 {
                    x_h = trial;
                    t += remaining;
                    continue;
                }
                // boundary hit inside the step: bisect the first crossing
                let mut lo = 0.0;
                let mut hi = remaining;
                let mut x_lo = x_h;
                while hi - lo > min_advance {
                    let mid = 0.5 * (lo + hi);
                    let x_mid = rk4_integrator(input, t, x_h, mid, params.omega_h);
                    if boundary_gap(input.e(t + mid), x_mid, params.k_h) >= 0.0 {
                        lo = mid;
                        x_lo = x_mid;
                    } else {
                        hi = mid;
                    }
                }
                let e_lo = input.e(t + lo);
                if in_f2(e_lo, x_lo, input.edot(t + lo), params) {
                    // commit on the in-sector side and switch
                    t += lo;
                    x_h = params.k_h * e_lo;
                    mode = Mode::Gain;
                    switches += 1;
                } else {
                    // tangency or sector corner (e = 0): the integrator field
                    // points back inside; step just past the crossing and
                    // carry on, as long as the dip stays within sector slack
                    let x_hi = rk4_integrator(input, t, x_h, hi, params.omega_h);
                    let slack = tol::SECTOR * (1.0 + x_hi * x_hi);
                    if boundary_gap(input.e(t + hi), x_hi, params.k_h) < -slack {
                        return Err(Error::EventResolution { t });
                    }
                    t += hi;
                    x_h = x_hi;
                    switches += 1;
                }
            }
            Mode::Gain => {
                if gain_margin(input.e(t), input.edot(t), params) <= 0.0 {
                    // leave immediately; the integrator restarts from the
                    // gain-mode value, keeping the output continuous
                    mode = Mode::Integrator;
                    x_h = params.k_h * input.e(t);
                    switches += 1;
                    continue;
                }
                if gain_margin(input.e(t + remaining), input.edot(t + remaining), params) > 0.0 {
                    t += remaining;
                    x_h = params.k_h * input.e(t);
                    continue;
                }
                // exit event: bisect and commit on the far side, where the
                // strict gain-set inequality has already failed (both sides
                // of this surface lie in the sector, and selecting the
                // integrator there cannot flip straight back)
                let mut lo = 0.0;
                let mut hi = remaining;
                while hi - lo > min_advance {
                    let mid = 0.5 * (lo + hi);
                    if gain_margin(input.e(t + mid), input.edot(t + mid), params) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                t += hi;
                x_h = params.k_h * input.e(t);
                mode = Mode::Integrator;
                switches += 1;
            }
        }
    }
    Ok(HigsState {
        x_h,
        mode,
        t: t_end,
    })
}

/// One recorded instant of an open-loop run. The element output is
/// `u = x_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HigsSample {
    pub t: f64,
    pub e: f64,
    pub edot: f64,
    pub x_h: f64,
    pub mode: Mode,
}

impl HigsSample {
    /// Storage function `V = x_h^2 / (2 k_h)`.
    pub fn storage(&self, params: &HigsParams) -> f64 {
        self.x_h * self.x_h / (2.0 * params.k_h)
    }

    /// Mode-consistent dissipation residual `Vdot - udot e`.
    ///
    /// Integrator mode: `Vdot = omega_h e x_h / k_h`, `udot e = omega_h e^2`.
    /// Gain mode: `Vdot = e xh' = udot e` identically, residual zero.
    pub fn dissipation_residual(&self, params: &HigsParams) -> f64 {
        match self.mode {
            Mode::Integrator => {
                params.omega_h / params.k_h * (self.e * self.x_h - params.k_h * self.e * self.e)
            }
            Mode::Gain => 0.0,
        }
    }
}

/// Largest dissipation residual `Vdot - udot e` over the samples. For a
/// correct trajectory this does not exceed the monitor tolerance.
pub fn nni_dissipation_residual(samples: &[HigsSample], params: &HigsParams) -> f64 {
    samples
        .iter()
        .map(|s| s.dissipation_residual(params))
        .fold(0.0, f64::max)
}

/// Fixed-step open-loop run from the default initial state, recording one
/// sample per step.
pub fn simulate_open_loop<I: InputSignal>(
    params: &HigsParams,
    input: &I,
    dt: f64,
    t_final: f64,
) -> Result<Vec<HigsSample>> {
    if !t_final.is_finite() || t_final <= dt {
        return Err(Error::InvalidParameter("t_final must exceed dt"));
    }
    let steps = (t_final / dt).round() as usize;
    let mut state = HigsState::initial();
    state.mode = mode_select(input.e(0.0), input.edot(0.0), 0.0, params)?;
    let mut samples = Vec::with_capacity(steps + 1);
    let record = |s: &HigsState| HigsSample {
        t: s.t,
        e: input.e(s.t),
        edot: input.edot(s.t),
        x_h: s.x_h,
        mode: s.mode,
    };
    samples.push(record(&state));
    for _ in 0..steps {
        state = step_open_loop(&state, input, dt, params)?;
        samples.push(record(&state));
    }
    Ok(samples)
}
