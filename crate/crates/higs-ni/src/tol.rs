//! Numeric tolerance policy, collected in one place.
//!
//! The analysis conditions the toolkit checks are exact (in)equalities; every
//! constant below turns one of them into a decidable numeric test. Scales are
//! noted next to each constant: a `*` suffix in the comment means the value
//! multiplies the indicated quantity before use.

/// Pole classified as unstable when `Re(lambda) > POLE_AXIS * |A|_F`.
/// Also the half-width of the frequency-sweep exclusion window around
/// imaginary-axis poles.
pub const POLE_AXIS: f64 = 1e-7;

/// Pole classified as "at the origin" when `|lambda| < ORIGIN * |A|_F`.
pub const ORIGIN: f64 = 1e-9;

/// Frequency-sweep pass margin: `min -2 Im G >= -SWEEP * max |G|` on the grid.
pub const SWEEP: f64 = 1e-8;

/// Semidefiniteness slack for the Lyapunov block:
/// `lambda_max(AY + YA') <= PSD * 2 |A|_F |Y|_F`.
pub const PSD: f64 = 1e-7;

/// Linear-constraint slack: `|B + A Y C'| <= LIN * (|B| + 1)`.
pub const LIN: f64 = 1e-8;

/// Eigenvalue-cluster radius for pole-multiplicity decisions,
/// `CLUSTER * |A|_F`.
pub const CLUSTER: f64 = 1e-6;

/// Sector membership slack: `e u >= u^2/k_h - SECTOR * (1 + u^2)`.
pub const SECTOR: f64 = 1e-9;

/// Gain-mode boundary slack: `|u - k_h e| <= GAIN_MODE * (1 + |u|)`.
pub const GAIN_MODE: f64 = 1e-9;

/// Runtime monitor slack (storage-function decrease, dissipation residual,
/// output continuity across switches).
pub const MONITOR: f64 = 1e-7;

/// Mode-switch time resolution as a fraction of the integration step.
pub const EVENT: f64 = 1e-10;

/// Shift-identity margin: `A + k_h B C` counts as a multiple of the identity
/// when its trace-centered part is below `ALPHA * |A + k_h B C|_F`.
pub const ALPHA: f64 = 1e-9;

/// Minimum allowed return-difference magnitude `|1 - G Dh|` in the
/// describing-function closed loop.
pub const LOOP_MIN: f64 = 1e-6;

/// Chattering guard: a run aborts after this many mode switches.
pub const MAX_EVENTS: usize = 1_000_000;

/// Central-difference step for input derivatives when no analytic derivative
/// is supplied, `H_FD * max(1, timescale)`.
pub const H_FD: f64 = 1e-6;
