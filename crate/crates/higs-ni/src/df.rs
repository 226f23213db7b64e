//! Describing-function (first-harmonic quasi-linear) analysis of the hybrid
//! integrator-gain element, and closed-loop response prediction for the
//! positive feedback loop with a linear plant.
//!
//! For a sinusoidal input the element output is periodic but non-sinusoidal;
//! an exact frequency response does not exist. The describing function
//! `Dh(jw)` is the first Fourier harmonic of that steady state, with
//! switching angle `gamma = 2 atan(k_h w / omega_h)`. At low frequency the
//! element acts as the static gain `k_h`; at high frequency
//! `Dh -> (omega_h/(jw)) (1 + j 4/pi)`, i.e. magnitude `~1.62 omega_h/w` and
//! phase `~ -38.1 deg`.

use alloc::vec::Vec;

use num_complex::Complex64;
// f64 math via the trait in no_std builds; std's inherent methods shadow it
// elsewhere, leaving the import apparently unused
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::higs::HigsParams;
use crate::lti::{ComplexResponse, StateSpace};

/// One evaluated describing-function point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfPoint {
    /// Angular frequency (rad/s).
    pub omega: f64,
    /// Switching angle `gamma = 2 atan(k_h omega / omega_h)`, in `[0, pi)`
    /// for `omega_h > 0` and exactly `pi` in the `omega_h = 0` limit.
    pub gamma: f64,
    pub value: Complex64,
}

impl DfPoint {
    pub fn magnitude_db(&self) -> f64 {
        20.0 * self.value.norm().log10()
    }

    pub fn phase_deg(&self) -> f64 {
        self.value.arg() * 180.0 / core::f64::consts::PI
    }
}

/// Cut-off frequency marker `omega_c = omega_h |1 + j 4/pi|`.
pub fn cutoff_frequency(params: &HigsParams) -> f64 {
    let four_over_pi = 4.0 / core::f64::consts::PI;
    params.omega_h() * (1.0 + four_over_pi * four_over_pi).sqrt()
}

/// Evaluate the describing function at `omega > 0`:
///
/// ```text
/// Dh(jw) = (wh/(jw)) (g/pi + j (e^{-j2g} - 1)/(2 pi) - 4 j (e^{-jg} - 1)/(2 pi))
///        + kh ((pi - g)/pi + j (e^{-j2g} - 1)/(2 pi)),     g = 2 atan(kh w / wh)
/// ```
///
/// For `omega_h = 0` the integrator never acts: `gamma` is taken as its
/// limit `pi` and the `omega_h/(jw)` term vanishes.
pub fn describing_function(params: &HigsParams, omega: f64) -> Result<DfPoint> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::InvalidParameter("omega must be positive and finite"));
    }
    let pi = core::f64::consts::PI;
    let k_h = params.k_h();
    let w_h = params.omega_h();
    let j = Complex64::new(0.0, 1.0);
    let (gamma, integrator_part) = if w_h == 0.0 {
        (pi, Complex64::new(0.0, 0.0))
    } else {
        let gamma = 2.0 * (k_h * omega / w_h).atan();
        let e1 = (-j * gamma).exp();
        let e2 = (-j * 2.0 * gamma).exp();
        let inner = Complex64::new(gamma / pi, 0.0) + j * (e2 - 1.0) / (2.0 * pi)
            - j * 4.0 * (e1 - 1.0) / (2.0 * pi);
        let coeff = Complex64::new(w_h, 0.0) / (j * omega);
        (gamma, coeff * inner)
    };
    let e2 = (-j * 2.0 * gamma).exp();
    let gain_part = k_h * (Complex64::new((pi - gamma) / pi, 0.0) + j * (e2 - 1.0) / (2.0 * pi));
    Ok(DfPoint {
        omega,
        gamma,
        value: integrator_part + gain_part,
    })
}

/// Describing function over a positive increasing grid.
pub fn df_bode(params: &HigsParams, grid: &[f64]) -> Result<Vec<DfPoint>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid[0].is_nan() || grid[0] <= 0.0 || grid.windows(2).any(|w| w[1].is_nan() || w[1] <= w[0]) {
        return Err(Error::InvalidGrid("frequencies must be positive increasing"));
    }
    grid.iter()
        .map(|&w| describing_function(params, w))
        .collect()
}

/// Quasi-linear closed-loop response of the positive feedback loop,
/// `T(jw) = G(jw) / (1 - G(jw) Dh(jw))`, mapping the reference to the plant
/// output. Errors when the return difference `|1 - G Dh|` falls below
/// `tol::LOOP_MIN` at some grid point.
pub fn df_closed_loop(
    response: &ComplexResponse,
    params: &HigsParams,
) -> Result<ComplexResponse> {
    let mut values = Vec::with_capacity(response.len());
    for (w, g) in response.iter() {
        let dh = describing_function(params, w)?.value;
        let denom = Complex64::new(1.0, 0.0) - g * dh;
        if denom.norm() < crate::tol::LOOP_MIN {
            return Err(Error::NearSingularLoop {
                omega: w,
                value: denom.norm(),
            });
        }
        values.push(g / denom);
    }
    ComplexResponse::new(response.frequencies().to_vec(), values)
}

/// Convenience wrapper: frequency response of `sys` on `grid`, then
/// [`df_closed_loop`].
pub fn df_closed_loop_ss(
    sys: &StateSpace,
    params: &HigsParams,
    grid: &[f64],
) -> Result<ComplexResponse> {
    let resp = sys.freq_response(grid)?;
    df_closed_loop(&resp, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::GridSpec;

    fn params(k_h: f64, omega_h: f64) -> HigsParams {
        HigsParams::new(k_h, omega_h).unwrap()
    }

    #[test]
    fn low_frequency_limit_is_static_gain() {
        let p = params(1.0, 600.0 * core::f64::consts::PI);
        let d = describing_function(&p, p.omega_h() * 1e-6).unwrap();
        assert!((d.value - Complex64::new(1.0, 0.0)).norm() < 1e-3);
    }

    #[test]
    fn high_frequency_asymptote() {
        let p = params(1.0, 600.0 * core::f64::consts::PI);
        let w = p.omega_h() * 1e6;
        let d = describing_function(&p, w).unwrap();
        let normalized = d.value.norm() * w / p.omega_h();
        let expect = (1.0 + (4.0 / core::f64::consts::PI).powi(2)).sqrt(); // 1.6190
        assert!((normalized - expect).abs() < 0.5e-2 * expect);
        let phase = d.phase_deg();
        assert!((phase + 38.146).abs() < 0.2, "phase {phase}");
    }

    #[test]
    fn quarter_pi_switching_angle() {
        // omega = omega_h / k_h gives atan(1) and gamma = pi/2
        let p = params(2.0, 10.0);
        let d = describing_function(&p, 5.0).unwrap();
        assert!((d.gamma - core::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn gamma_monotone_and_value_continuous() {
        let p = params(1.0, 600.0 * core::f64::consts::PI);
        let grid = GridSpec::new(1.0, 1e6, 600).unwrap().frequencies();
        let pts = df_bode(&p, &grid).unwrap();
        for pair in pts.windows(2) {
            assert!(pair[1].gamma > pair[0].gamma);
            // no jumps: neighboring values stay close on a log grid
            let step = (pair[1].value - pair[0].value).norm();
            assert!(step < 0.2, "jump {step} near {} rad/s", pair[0].omega);
        }
        assert!(pts.iter().all(|pt| pt.gamma < core::f64::consts::PI));
    }

    #[test]
    fn phase_and_imaginary_part_bounds() {
        // dense parameter sweep: Im Dh <= 0 and phase >= -90 deg everywhere
        for &k_h in &[0.1, 0.5, 1.0, 5.0] {
            for &w_h in &[1.0, 100.0, 600.0 * core::f64::consts::PI] {
                let p = params(k_h, w_h);
                let grid = GridSpec::new(w_h * 1e-3, w_h * 1e3, 400).unwrap().frequencies();
                for pt in df_bode(&p, &grid).unwrap() {
                    assert!(pt.value.im <= 1e-12, "Im > 0 at w={}", pt.omega);
                    assert!(pt.phase_deg() >= -90.0, "phase < -90 at w={}", pt.omega);
                }
            }
        }
    }

    #[test]
    fn fig1_shape_magnitude_rolloff_and_phase_band() {
        let p = params(1.0, 600.0 * core::f64::consts::PI);
        let two_pi = 2.0 * core::f64::consts::PI;
        let grid = GridSpec::new(two_pi * 1.0, two_pi * 1e5, 1000)
            .unwrap()
            .frequencies();
        let pts = df_bode(&p, &grid).unwrap();
        let wc = cutoff_frequency(&p);
        for pair in pts.windows(2) {
            if pair[0].omega > wc {
                assert!(
                    pair[1].value.norm() < pair[0].value.norm() * (1.0 + 1e-9),
                    "magnitude not rolling off at {} rad/s",
                    pair[0].omega
                );
            }
            let ph = pair[0].phase_deg();
            assert!((-38.2..=0.0).contains(&ph), "phase {ph} outside band");
        }
    }

    #[test]
    fn zero_integrator_frequency_limit() {
        // omega_h = 0 freezes the integrator; from a zero initial state the
        // element output is identically zero and the first harmonic vanishes.
        // The formula agrees: gamma = pi kills both terms.
        let p = params(0.75, 0.0);
        for &w in &[1e-3, 1.0, 1e3] {
            let d = describing_function(&p, w).unwrap();
            assert_eq!(d.gamma, core::f64::consts::PI);
            assert!(d.value.norm() < 1e-12, "got {}", d.value);
        }
    }

    #[test]
    fn closed_loop_dc_algebra() {
        // G(s) = 1/(s+1), k_h = 0.5: T(0) = 1/(1 - 0.5) = 2
        let sys = StateSpace::scalar(-1.0, 1.0, 1.0, 0.0).unwrap();
        let p = params(0.5, 100.0);
        let t = df_closed_loop_ss(&sys, &p, &[1e-6, 1e-5]).unwrap();
        assert!((t.values()[0] - Complex64::new(2.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn closed_loop_rejects_near_singular_return_difference() {
        // G(0) = 1 with k_h = 1 makes 1 - G Dh vanish toward DC
        let sys = StateSpace::scalar(-1.0, 1.0, 1.0, 0.0).unwrap();
        let p = params(1.0, 100.0);
        let err = df_closed_loop_ss(&sys, &p, &[1e-9, 1e-8]).unwrap_err();
        assert!(matches!(err, crate::Error::NearSingularLoop { .. }), "{err:?}");
    }

    #[test]
    fn closed_loop_with_vanishing_describing_function_recovers_plant() {
        // omega_h = 0 with tiny k_h: Dh = 0 and T = G exactly
        let sys = StateSpace::scalar(-1.0, 1.0, 1.0, 0.0).unwrap();
        let p = params(1e-9, 0.0);
        let grid = GridSpec::new(0.01, 100.0, 50).unwrap().frequencies();
        let g = sys.freq_response(&grid).unwrap();
        let t = df_closed_loop(&g, &p).unwrap();
        for (gv, tv) in g.values().iter().zip(t.values()) {
            assert!((gv - tv).norm() < 1e-12);
        }
    }
}
