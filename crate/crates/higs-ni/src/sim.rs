//! Event-driven simulation of the positive feedback interconnection
//! `e = y = Cx`, `u = x_h`: RK4 between mode switches, bisection on the
//! switching surfaces, and runtime monitors for the storage functions
//! `V = x_h^2/(2 k_h)` (element) and
//! `W = x' Y^{-1} x / 2 + x_h^2/(2 k_h) - Cx x_h` (interconnection).
//!
//! In closed loop the input derivative is exact, `edot = C(Ax + B(x_h + d))`;
//! no finite differences are used.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

// f64 math via the trait in no_std builds; std's inherent methods shadow it
// elsewhere, leaving the import apparently unused
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::higs::{in_f2, in_sector, HigsParams, Mode};
use crate::lti::StateSpace;
use crate::matrix::{self, Matrix};
use crate::ni::YCertificate;
use crate::tol;

/// External input added to the plant input alongside the element output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Disturbance {
    Step { amplitude: f64, t_on: f64 },
}

impl Disturbance {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Disturbance::Step { amplitude, t_on } => {
                if t >= *t_on {
                    *amplitude
                } else {
                    0.0
                }
            }
        }
    }

    fn discontinuity(&self) -> Option<f64> {
        match self {
            Disturbance::Step { t_on, .. } => Some(*t_on),
        }
    }
}

/// Simulation configuration. `record_stride` records every k-th step (the
/// initial and final instants are always recorded). Enabling `monitor_w`
/// without supplying a Y certificate is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_stride: usize,
    pub disturbance: Option<Disturbance>,
    pub monitor_w: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-6,
            t_final: 0.05,
            record_stride: 1,
            disturbance: None,
            monitor_w: true,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidParameter("dt must be positive and finite"));
        }
        if !self.t_final.is_finite() || self.t_final <= self.dt {
            return Err(Error::InvalidParameter("t_final must exceed dt"));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter("record_stride must be at least 1"));
        }
        Ok(())
    }
}

/// One recorded instant of the closed loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub x_h: f64,
    pub e: f64,
    pub edot: f64,
    pub mode: Mode,
    /// Element storage `V = x_h^2/(2 k_h)`.
    pub v: f64,
    /// Interconnection storage, when a certificate was supplied.
    pub w: Option<f64>,
    /// Backward difference of `W` between recorded samples.
    pub wdot_est: Option<f64>,
    /// `e u - u^2/k_h` (nonnegative inside the sector).
    pub sector_gap: f64,
    /// `e x_h - k_h e^2` (nonpositive by the sector property: the output
    /// product never exceeds the upper sector edge).
    pub upper_sector_gap: f64,
    /// Mode-consistent `Vdot - udot e` (nonpositive for a correct run).
    pub dissipation_residual: f64,
}

/// Mode switch record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchEvent {
    pub t: f64,
    pub from: Mode,
    pub to: Mode,
}

/// Recorded closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<SwitchEvent>,
    pub warnings: Vec<String>,
    pub disturbance: Option<Disturbance>,
    /// Whether the W monitor ran (a certificate was available).
    pub w_available: bool,
}

impl Trajectory {
    pub fn final_sample(&self) -> &Sample {
        self.samples.last().expect("at least the initial sample")
    }

    /// Combined state norm `|(x, x_h)|` at a sample.
    pub fn combined_norm(sample: &Sample) -> f64 {
        (matrix::dot(&sample.x, &sample.x) + sample.x_h * sample.x_h).sqrt()
    }
}

/// Plant-only linear run (used as the open-loop comparison in disturbance
/// studies).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub y: f64,
}

/// Closed-loop plus open-loop responses to the same disturbance.
#[derive(Debug, Clone, PartialEq)]
pub struct StepStudy {
    pub closed: Trajectory,
    pub open: Vec<LinearSample>,
}

struct ClosedLoop<'a> {
    sys: &'a StateSpace,
    params: &'a HigsParams,
    disturbance: Option<Disturbance>,
    c: Vec<f64>,
}

impl<'a> ClosedLoop<'a> {
    fn d(&self, t: f64) -> f64 {
        self.disturbance.map_or(0.0, |d| d.value(t))
    }

    fn e(&self, x: &[f64]) -> f64 {
        matrix::dot(&self.c, x)
    }

    /// Exact input derivative `C (A x + B (x_h + d))`.
    fn edot(&self, t: f64, x: &[f64], x_h: f64) -> f64 {
        let w = x_h + self.d(t);
        let ax = self.sys.a().mul_vec(x);
        let b = self.sys.b_vec();
        let mut acc = 0.0;
        for i in 0..x.len() {
            acc += self.c[i] * (ax[i] + b[i] * w);
        }
        acc
    }

    /// Integrator-mode field on the stacked state (x, x_h).
    fn field_integrator(&self, t: f64, z: &[f64], out: &mut [f64]) {
        let n = z.len() - 1;
        let x = &z[..n];
        let x_h = z[n];
        let w = x_h + self.d(t);
        let ax = self.sys.a().mul_vec(x);
        let b = self.sys.b_vec();
        for i in 0..n {
            out[i] = ax[i] + b[i] * w;
        }
        out[n] = self.params.omega_h() * self.e(x);
    }

    /// Gain-mode field on x alone (`x_h = k_h C x` is algebraic).
    fn field_gain(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let w = self.params.k_h() * self.e(x) + self.d(t);
        let ax = self.sys.a().mul_vec(x);
        let b = self.sys.b_vec();
        for i in 0..x.len() {
            out[i] = ax[i] + b[i] * w;
        }
    }

    fn rk4<F>(&self, f: F, t: f64, z: &[f64], h: f64) -> Vec<f64>
    where
        F: Fn(f64, &[f64], &mut [f64]),
    {
        let n = z.len();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        f(t, z, &mut k1);
        for i in 0..n {
            tmp[i] = z[i] + 0.5 * h * k1[i];
        }
        f(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = z[i] + 0.5 * h * k2[i];
        }
        f(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = z[i] + h * k3[i];
        }
        f(t + h, &tmp, &mut k4);
        let mut out = z.to_vec();
        for i in 0..n {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }

    fn step_integrator(&self, t: f64, x: &[f64], x_h: f64, h: f64) -> (Vec<f64>, f64) {
        let mut z = x.to_vec();
        z.push(x_h);
        let out = self.rk4(|t, z, o| self.field_integrator(t, z, o), t, &z, h);
        let n = x.len();
        (out[..n].to_vec(), out[n])
    }

    fn step_gain(&self, t: f64, x: &[f64], h: f64) -> Vec<f64> {
        self.rk4(|t, x, o| self.field_gain(t, x, o), t, x, h)
    }

    fn boundary_gap(&self, x: &[f64], x_h: f64) -> f64 {
        let e = self.e(x);
        e * x_h - x_h * x_h / self.params.k_h()
    }

    fn gain_margin(&self, t: f64, x: &[f64]) -> f64 {
        let e = self.e(x);
        let x_h = self.params.k_h() * e;
        let edot = self.edot(t, x, x_h);
        self.params.omega_h() * e * e - self.params.k_h() * e * edot
    }
}

/// Mode-dependent closed-loop field at one state, mostly useful for tests
/// and external integrators: returns `(xdot, x_h_dot)`.
pub fn closed_loop_field(
    sys: &StateSpace,
    params: &HigsParams,
    mode: Mode,
    t: f64,
    x: &[f64],
    x_h: f64,
    disturbance: Option<Disturbance>,
) -> (Vec<f64>, f64) {
    let cl = ClosedLoop {
        sys,
        params,
        disturbance,
        c: sys.c_vec(),
    };
    match mode {
        Mode::Integrator => {
            let mut z = x.to_vec();
            z.push(x_h);
            let mut out = vec![0.0; z.len()];
            cl.field_integrator(t, &z, &mut out);
            let n = x.len();
            (out[..n].to_vec(), out[n])
        }
        Mode::Gain => {
            let mut out = vec![0.0; x.len()];
            cl.field_gain(t, x, &mut out);
            // x_h = k_h C x differentiates to k_h C xdot
            let xh_dot = params.k_h() * matrix::dot(&cl.c, &out);
            (out, xh_dot)
        }
    }
}

/// Simulate the interconnection from `x0` (plant) and `x_h0` (element).
///
/// Preconditions: `(C x0, x_h0)` must lie in the sector (initial conditions
/// outside it are refused, not projected). A non-minimal plant produces a
/// warning in the trajectory, not a refusal. The `W` monitor runs when a
/// certificate is supplied; `cfg.monitor_w = true` without one is an error.
pub fn simulate(
    sys: &StateSpace,
    params: &HigsParams,
    x0: &[f64],
    x_h0: f64,
    cfg: &SimConfig,
    y: Option<&YCertificate>,
) -> Result<Trajectory> {
    cfg.validate()?;
    let n = sys.order();
    if x0.len() != n {
        return Err(Error::DimensionMismatch("x0 length must match the plant order"));
    }
    if cfg.monitor_w && y.is_none() {
        return Err(Error::MissingCertificate);
    }
    let mut warnings = Vec::new();
    if !sys.minimality().minimal {
        warnings.push(String::from(
            "plant realization is not minimal; stability certificates do not apply",
        ));
    }
    let y_inv = match y {
        Some(cert) => Some(matrix::inverse(&cert.y)?),
        None => None,
    };

    let cl = ClosedLoop {
        sys,
        params,
        disturbance: cfg.disturbance,
        c: sys.c_vec(),
    };

    let mut x = x0.to_vec();
    let mut x_h = x_h0;
    let e0 = cl.e(&x);
    if !in_sector(e0, x_h, params) {
        return Err(Error::OutsideSector { t: 0.0 });
    }
    let ed0 = cl.edot(0.0, &x, x_h);
    let mut mode = if in_f2(e0, x_h, ed0, params) {
        Mode::Gain
    } else {
        Mode::Integrator
    };
    if mode == Mode::Gain {
        x_h = params.k_h() * e0;
    }

    let steps = (cfg.t_final / cfg.dt).round() as usize;
    let mut events: Vec<SwitchEvent> = Vec::new();
    let mut samples: Vec<Sample> = Vec::with_capacity(steps / cfg.record_stride + 2);
    let mut prev_w: Option<(f64, f64)> = None; // (t, W) of last recorded sample

    let record = |t: f64,
                  x: &[f64],
                  x_h: f64,
                  mode: Mode,
                  cl: &ClosedLoop,
                  y_inv: &Option<Matrix>,
                  prev_w: &mut Option<(f64, f64)>|
     -> Sample {
        let e = cl.e(x);
        let edot = cl.edot(t, x, x_h);
        let k_h = cl.params.k_h();
        let v = x_h * x_h / (2.0 * k_h);
        let w = y_inv.as_ref().map(|yi| {
            let yx = yi.mul_vec(x);
            0.5 * matrix::dot(x, &yx) + v - e * x_h
        });
        let wdot_est = match (w, *prev_w) {
            (Some(wn), Some((tp, wp))) if t > tp => Some((wn - wp) / (t - tp)),
            _ => None,
        };
        if let Some(wn) = w {
            *prev_w = Some((t, wn));
        }
        let dissipation_residual = match mode {
            Mode::Integrator => {
                cl.params.omega_h() / k_h * (e * x_h - k_h * e * e)
            }
            Mode::Gain => 0.0,
        };
        Sample {
            t,
            x: x.to_vec(),
            x_h,
            e,
            edot,
            mode,
            v,
            w,
            wdot_est,
            sector_gap: e * x_h - x_h * x_h / k_h,
            upper_sector_gap: e * x_h - k_h * e * e,
            dissipation_residual,
        }
    };

    samples.push(record(0.0, &x, x_h, mode, &cl, &y_inv, &mut prev_w));

    let mut t = 0.0;
    for step in 0..steps {
        let t_end = (step + 1) as f64 * cfg.dt;
        advance(&cl, &mut t, &mut x, &mut x_h, &mut mode, t_end, cfg.dt, &mut events)?;
        if events.len() > tol::MAX_EVENTS {
            return Err(Error::Chattering {
                events: events.len(),
            });
        }
        if (step + 1) % cfg.record_stride == 0 || step + 1 == steps {
            samples.push(record(t, &x, x_h, mode, &cl, &y_inv, &mut prev_w));
        }
    }

    Ok(Trajectory {
        samples,
        events,
        warnings,
        disturbance: cfg.disturbance,
        w_available: y_inv.is_some(),
    })
}

/// Advance one macro step to `t_end`, switching modes at bisected events.
/// The state is committed on the feasible side of each switching surface, so
/// `x_h` is continuous across switches.
#[allow(clippy::too_many_arguments)]
fn advance(
    cl: &ClosedLoop,
    t: &mut f64,
    x: &mut Vec<f64>,
    x_h: &mut f64,
    mode: &mut Mode,
    t_end: f64,
    dt: f64,
    events: &mut Vec<SwitchEvent>,
) -> Result<()> {
    let min_advance = tol::EVENT * dt;
    let mut switches_in_step = 0usize;
    while t_end - *t > min_advance {
        if switches_in_step > 256 {
            return Err(Error::EventResolution { t: *t });
        }
        let mut remaining = t_end - *t;
        // never integrate across a disturbance discontinuity
        if let Some(td) = cl.disturbance.as_ref().and_then(|d| d.discontinuity()) {
            if *t < td && td < *t + remaining {
                remaining = td - *t;
            }
        }
        match *mode {
            Mode::Integrator => {
                let (x_try, xh_try) = cl.step_integrator(*t, x, *x_h, remaining);
                if cl.boundary_gap(&x_try, xh_try) >= 0.0 {
                    *x = x_try;
                    *x_h = xh_try;
                    *t += remaining;
                    continue;
                }
                // boundary hit inside the step: bisect the first crossing
                let mut lo = 0.0;
                let mut hi = remaining;
                let mut at_lo = (x.clone(), *x_h);
                while hi - lo > min_advance {
                    let mid = 0.5 * (lo + hi);
                    let (xm, xhm) = cl.step_integrator(*t, x, *x_h, mid);
                    if cl.boundary_gap(&xm, xhm) >= 0.0 {
                        lo = mid;
                        at_lo = (xm, xhm);
                    } else {
                        hi = mid;
                    }
                }
                let e_lo = cl.e(&at_lo.0);
                let edot_lo = cl.edot(*t + lo, &at_lo.0, at_lo.1);
                if in_f2(e_lo, at_lo.1, edot_lo, cl.params) {
                    // commit on the in-sector side and switch
                    *t += lo;
                    *x = at_lo.0;
                    *x_h = cl.params.k_h() * e_lo;
                    events.push(SwitchEvent {
                        t: *t,
                        from: Mode::Integrator,
                        to: Mode::Gain,
                    });
                    *mode = Mode::Gain;
                    switches_in_step += 1;
                } else {
                    // tangency or sector corner (e = 0): the integrator field
                    // points back inside; step just past the crossing and
                    // carry on, provided the dip stays within sector slack
                    let (x_hi, xh_hi) = cl.step_integrator(*t, x, *x_h, hi);
                    let slack = tol::SECTOR * (1.0 + xh_hi * xh_hi);
                    if cl.boundary_gap(&x_hi, xh_hi) < -slack {
                        return Err(Error::EventResolution { t: *t });
                    }
                    *t += hi;
                    *x = x_hi;
                    *x_h = xh_hi;
                    switches_in_step += 1;
                }
            }
            Mode::Gain => {
                if cl.gain_margin(*t, x) <= 0.0 {
                    events.push(SwitchEvent {
                        t: *t,
                        from: Mode::Gain,
                        to: Mode::Integrator,
                    });
                    *mode = Mode::Integrator;
                    *x_h = cl.params.k_h() * cl.e(x);
                    switches_in_step += 1;
                    continue;
                }
                let x_try = cl.step_gain(*t, x, remaining);
                if cl.gain_margin(*t + remaining, &x_try) > 0.0 {
                    *x = x_try;
                    *t += remaining;
                    *x_h = cl.params.k_h() * cl.e(x);
                    continue;
                }
                // exit event: bisect and commit on the far side, where the
                // strict gain-set inequality has already failed (both sides
                // of this surface lie in the sector, and selecting the
                // integrator there cannot flip straight back)
                let mut lo = 0.0;
                let mut hi = remaining;
                let mut at_hi = x_try;
                while hi - lo > min_advance {
                    let mid = 0.5 * (lo + hi);
                    let xm = cl.step_gain(*t, x, mid);
                    if cl.gain_margin(*t + mid, &xm) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                        at_hi = xm;
                    }
                }
                *t += hi;
                *x = at_hi;
                *x_h = cl.params.k_h() * cl.e(x);
                events.push(SwitchEvent {
                    t: *t,
                    from: Mode::Gain,
                    to: Mode::Integrator,
                });
                *mode = Mode::Integrator;
                switches_in_step += 1;
            }
        }
    }
    Ok(())
}

/// Closed-loop response to the configured disturbance together with the
/// open-loop (element disconnected) comparison, both from rest.
pub fn step_disturbance(
    sys: &StateSpace,
    params: &HigsParams,
    cfg: &SimConfig,
    y: Option<&YCertificate>,
) -> Result<StepStudy> {
    if cfg.disturbance.is_none() {
        return Err(Error::InvalidParameter(
            "step_disturbance needs cfg.disturbance",
        ));
    }
    let n = sys.order();
    let x0 = vec![0.0; n];
    let closed = simulate(sys, params, &x0, 0.0, cfg, y)?;

    // linear open loop: xdot = A x + B d(t)
    let steps = (cfg.t_final / cfg.dt).round() as usize;
    let dist = cfg.disturbance.expect("checked above");
    let c = sys.c_vec();
    let b = sys.b_vec();
    let field = |t: f64, x: &[f64], out: &mut [f64]| {
        let ax = sys.a().mul_vec(x);
        let d = dist.value(t);
        for i in 0..x.len() {
            out[i] = ax[i] + b[i] * d;
        }
    };
    let cl_dummy = ClosedLoop {
        sys,
        params,
        disturbance: Some(dist),
        c: c.clone(),
    };
    let mut x = vec![0.0; n];
    let mut open = Vec::with_capacity(steps / cfg.record_stride + 2);
    open.push(LinearSample {
        t: 0.0,
        x: x.clone(),
        y: matrix::dot(&c, &x),
    });
    for step in 0..steps {
        let t = step as f64 * cfg.dt;
        x = cl_dummy.rk4(field, t, &x, cfg.dt);
        if (step + 1) % cfg.record_stride == 0 || step + 1 == steps {
            open.push(LinearSample {
                t: (step + 1) as f64 * cfg.dt,
                x: x.clone(),
                y: matrix::dot(&c, &x),
            });
        }
    }
    Ok(StepStudy { closed, open })
}

/// Trajectory-level certificate: recomputes every monitored quantity from
/// the recorded states (not from the stored monitor columns) and reports the
/// worst violations.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorReport {
    /// Worst normalized storage increase
    /// `(W_{k+1} - W_k) / (1 + |W_k|)` (should not exceed the monitor
    /// tolerance).
    pub max_w_increase: f64,
    /// Worst `Vdot - udot e` residual.
    pub max_dissipation_residual: f64,
    /// Worst normalized sector violation `(u^2/k_h - e u) / (1 + u^2)`.
    pub max_sector_violation: f64,
    /// Worst normalized violation of `e x_h - k_h e^2 <= 0`.
    pub max_upper_sector_violation: f64,
    /// Worst gain-mode identity residual `|(x_h/k_h - e) xh'|`.
    pub max_gain_identity: f64,
    /// `W > 0` held at every nonzero recorded state.
    pub w_positive: bool,
    pub pass: bool,
}

pub fn certify_trajectory(
    traj: &Trajectory,
    sys: &StateSpace,
    params: &HigsParams,
    y: &YCertificate,
) -> Result<MonitorReport> {
    let y_inv = matrix::inverse(&y.y)?;
    let c = sys.c_vec();
    let k_h = params.k_h();
    let mut max_w_increase = f64::NEG_INFINITY;
    let mut max_dissipation = f64::NEG_INFINITY;
    let mut max_sector = f64::NEG_INFINITY;
    let mut max_upper_sector = f64::NEG_INFINITY;
    let mut max_gain_identity = 0.0f64;
    let mut w_positive = true;
    let mut prev_w: Option<f64> = None;
    for s in &traj.samples {
        let e = matrix::dot(&c, &s.x);
        let u = s.x_h;
        let yx = y_inv.mul_vec(&s.x);
        let w = 0.5 * matrix::dot(&s.x, &yx) + u * u / (2.0 * k_h) - e * u;
        if let Some(wp) = prev_w {
            max_w_increase = max_w_increase.max((w - wp) / (1.0 + wp.abs()));
        }
        prev_w = Some(w);
        let norm = Trajectory::combined_norm(s);
        if norm > 0.0 && w <= 0.0 {
            w_positive = false;
        }
        max_sector = max_sector.max((u * u / k_h - e * u) / (1.0 + u * u));
        max_upper_sector = max_upper_sector.max((e * u - k_h * e * e) / (1.0 + e * e));
        match s.mode {
            Mode::Integrator => {
                max_dissipation =
                    max_dissipation.max(params.omega_h() / k_h * (e * u - k_h * e * e));
            }
            Mode::Gain => {
                // in the gain set, (x_h/k_h - e) xh' vanishes identically
                let d = traj.disturbance.map_or(0.0, |dist| dist.value(s.t));
                let ax = sys.a().mul_vec(&s.x);
                let b = sys.b_vec();
                let mut edot = 0.0;
                for i in 0..s.x.len() {
                    edot += c[i] * (ax[i] + b[i] * (u + d));
                }
                let xh_dot = k_h * edot;
                let residual = ((u / k_h - e) * xh_dot).abs() / (1.0 + xh_dot.abs());
                max_gain_identity = max_gain_identity.max(residual);
                max_dissipation = max_dissipation.max(0.0);
            }
        }
    }
    let pass = max_w_increase <= tol::MONITOR
        && max_dissipation <= tol::MONITOR
        && max_sector <= tol::SECTOR
        && max_upper_sector <= tol::SECTOR
        && max_gain_identity <= tol::MONITOR
        && w_positive;
    Ok(MonitorReport {
        max_w_increase,
        max_dissipation_residual: max_dissipation,
        max_sector_violation: max_sector,
        max_upper_sector_violation: max_upper_sector,
        max_gain_identity,
        w_positive,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ni::synth_y;

    fn mems() -> StateSpace {
        StateSpace::new(
            Matrix::new(2, 2, vec![-547.571, -1.6676e4, 32768.0, 0.0]).unwrap(),
            Matrix::new(2, 1, vec![128.0, 0.0]).unwrap(),
            Matrix::new(1, 2, vec![0.0, 130.9727]).unwrap(),
            0.0,
        )
        .unwrap()
    }

    fn tuned_params() -> HigsParams {
        HigsParams::new(0.4939, 1.1705e4).unwrap()
    }

    #[test]
    fn zero_initial_condition_stays_at_rest() {
        let sys = mems();
        let params = tuned_params();
        let cfg = SimConfig {
            t_final: 1e-3,
            monitor_w: false,
            ..SimConfig::default()
        };
        let traj = simulate(&sys, &params, &[0.0, 0.0], 0.0, &cfg, None).unwrap();
        for s in &traj.samples {
            assert_eq!(Trajectory::combined_norm(s), 0.0);
            assert_eq!(s.v, 0.0);
        }
        assert!(traj.events.is_empty());
    }

    #[test]
    fn field_consistency_in_gain_mode() {
        // after the algebraic substitution, x_h_dot = k_h C xdot identically
        let sys = mems();
        let params = tuned_params();
        let x = [0.003, 0.024];
        let (xdot, xh_dot) =
            closed_loop_field(&sys, &params, Mode::Gain, 0.0, &x, 0.0, None);
        let c = sys.c_vec();
        let want = params.k_h() * matrix::dot(&c, &xdot);
        assert!((xh_dot - want).abs() <= 1e-12 * want.abs());
    }

    #[test]
    fn field_in_integrator_mode_matches_matrices() {
        let sys = mems();
        let params = tuned_params();
        let x = [0.003, 0.024];
        let (xdot, xh_dot) =
            closed_loop_field(&sys, &params, Mode::Integrator, 0.0, &x, 0.0, None);
        let ax = sys.a().mul_vec(&x);
        for i in 0..2 {
            assert!((xdot[i] - ax[i]).abs() < 1e-12 * ax[i].abs().max(1.0));
        }
        let want = params.omega_h() * matrix::dot(&sys.c_vec(), &x);
        assert!((xh_dot - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn w_monitor_without_certificate_is_refused() {
        let sys = mems();
        let params = tuned_params();
        let cfg = SimConfig {
            t_final: 1e-4,
            monitor_w: true,
            ..SimConfig::default()
        };
        assert_eq!(
            simulate(&sys, &params, &[0.0, 0.0], 0.0, &cfg, None).unwrap_err(),
            Error::MissingCertificate
        );
    }

    #[test]
    fn initial_state_outside_sector_is_refused() {
        let sys = mems();
        let params = tuned_params();
        let cfg = SimConfig {
            t_final: 1e-4,
            monitor_w: false,
            ..SimConfig::default()
        };
        // e = C x > 0 with x_h < 0 violates the sector
        let err = simulate(&sys, &params, &[0.003, 0.024], -0.5, &cfg, None).unwrap_err();
        assert!(matches!(err, Error::OutsideSector { .. }));
    }

    #[test]
    fn free_response_converges_with_clean_monitors() {
        let sys = mems();
        let params = tuned_params();
        let cert = synth_y(&sys).unwrap();
        let cfg = SimConfig {
            dt: 1e-6,
            t_final: 0.05,
            record_stride: 10,
            disturbance: None,
            monitor_w: true,
        };
        let x0 = [0.003, 0.024];
        let traj = simulate(&sys, &params, &x0, 0.0, &cfg, Some(&cert)).unwrap();
        assert!(traj.w_available);
        assert!(!traj.events.is_empty(), "expected mode switching");
        let n0 = (x0[0] * x0[0] + x0[1] * x0[1]).sqrt();
        let nf = Trajectory::combined_norm(traj.final_sample());
        assert!(nf <= 1e-3 * n0, "final norm {nf} vs initial {n0}");
        let report = certify_trajectory(&traj, &sys, &params, &cert).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn corrupted_trajectory_is_flagged() {
        let sys = mems();
        let params = tuned_params();
        let cert = synth_y(&sys).unwrap();
        let cfg = SimConfig {
            dt: 1e-6,
            t_final: 2e-3,
            record_stride: 10,
            disturbance: None,
            monitor_w: true,
        };
        let mut traj = simulate(&sys, &params, &[0.003, 0.024], 0.0, &cfg, Some(&cert)).unwrap();
        for s in traj.samples.iter_mut() {
            s.x_h *= 1.1;
        }
        let report = certify_trajectory(&traj, &sys, &params, &cert).unwrap();
        assert!(!report.pass, "{report:?}");
    }

    #[test]
    fn zero_amplitude_disturbance_stays_at_rest() {
        let sys = mems();
        let params = tuned_params();
        let cfg = SimConfig {
            dt: 1e-6,
            t_final: 1e-3,
            record_stride: 10,
            disturbance: Some(Disturbance::Step {
                amplitude: 0.0,
                t_on: 0.0,
            }),
            monitor_w: false,
        };
        let study = step_disturbance(&sys, &params, &cfg, None).unwrap();
        assert!(study
            .closed
            .samples
            .iter()
            .all(|s| Trajectory::combined_norm(s) == 0.0));
        assert!(study.open.iter().all(|s| s.y == 0.0));
    }

    #[test]
    fn step_disturbance_settles_at_quasi_linear_dc() {
        let sys = mems();
        let params = tuned_params();
        let cfg = SimConfig {
            dt: 1e-6,
            t_final: 0.05,
            record_stride: 10,
            disturbance: Some(Disturbance::Step {
                amplitude: 1.0,
                t_on: 0.0,
            }),
            monitor_w: false,
        };
        let study = step_disturbance(&sys, &params, &cfg, None).unwrap();
        let dc = sys.dc_gain().unwrap();
        // open loop settles at G(0)
        let y_open = study.open.last().unwrap().y;
        assert!((y_open - dc).abs() < 1e-3 * dc);
        // closed loop settles at G(0)/(1 - k_h G(0))
        let want = dc / (1.0 - params.k_h() * dc);
        let y_closed = study.closed.final_sample().e;
        assert!(
            (y_closed - want).abs() < 1e-2 * want.abs(),
            "closed-loop DC {y_closed} vs predicted {want}"
        );
    }
}
