//! Plot-ready CSV writers. All floating-point columns carry 17 significant
//! digits so that runs are reproducible bit-for-bit from the files.

use std::fmt::Write as _;

use higs_ni::df::DfPoint;
use higs_ni::higs::{HigsParams, HigsSample};
use higs_ni::lti::ComplexResponse;
use higs_ni::sim::{LinearSample, Trajectory};

/// 17 significant digits, scientific notation.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Bode table: `freq_hz, mag_db, phase_deg, re, im`.
pub fn bode_csv_from_response(resp: &ComplexResponse) -> String {
    let mut out = String::from("freq_hz,mag_db,phase_deg,re,im\n");
    for (w, v) in resp.iter() {
        let hz = w / (2.0 * std::f64::consts::PI);
        let mag_db = 20.0 * v.norm().log10();
        let phase = v.arg().to_degrees();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sig17(hz),
            sig17(mag_db),
            sig17(phase),
            sig17(v.re),
            sig17(v.im)
        );
    }
    out
}

/// Describing-function Bode table, same columns as
/// [`bode_csv_from_response`].
pub fn bode_csv_from_df(points: &[DfPoint]) -> String {
    let mut out = String::from("freq_hz,mag_db,phase_deg,re,im\n");
    for p in points {
        let hz = p.omega / (2.0 * std::f64::consts::PI);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sig17(hz),
            sig17(p.magnitude_db()),
            sig17(p.phase_deg()),
            sig17(p.value.re),
            sig17(p.value.im)
        );
    }
    out
}

/// Open-loop element trajectory:
/// `t, e, edot, x_h, u, mode, V, dissipation_residual`
/// with mode encoded as 0 = integrator, 1 = gain.
pub fn higs_csv(samples: &[HigsSample], params: &HigsParams) -> String {
    let mut out = String::from("t,e,edot,x_h,u,mode,V,dissipation_residual\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            sig17(s.t),
            sig17(s.e),
            sig17(s.edot),
            sig17(s.x_h),
            sig17(s.x_h),
            s.mode.as_u8(),
            sig17(s.storage(params)),
            sig17(s.dissipation_residual(params))
        );
    }
    out
}

/// Closed-loop trajectory: the open-loop columns plus `x_1..x_n, W,
/// Wdot_est`. Unavailable monitor values are written as NaN.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.samples.first().map_or(0, |s| s.x.len());
    let mut out = String::from("t,e,edot,x_h,u,mode,V,dissipation_residual");
    for i in 1..=n {
        let _ = write!(out, ",x_{i}");
    }
    out.push_str(",W,Wdot_est\n");
    for s in &traj.samples {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            sig17(s.t),
            sig17(s.e),
            sig17(s.edot),
            sig17(s.x_h),
            sig17(s.x_h),
            s.mode.as_u8(),
            sig17(s.v),
            sig17(s.dissipation_residual)
        );
        for xi in &s.x {
            let _ = write!(out, ",{}", sig17(*xi));
        }
        let _ = writeln!(
            out,
            ",{},{}",
            sig17(s.w.unwrap_or(f64::NAN)),
            sig17(s.wdot_est.unwrap_or(f64::NAN))
        );
    }
    out
}

/// Plant-only linear response: `t, y, x_1..x_n`.
pub fn linear_csv(samples: &[LinearSample]) -> String {
    let n = samples.first().map_or(0, |s| s.x.len());
    let mut out = String::from("t,y");
    for i in 1..=n {
        let _ = write!(out, ",x_{i}");
    }
    out.push('\n');
    for s in samples {
        let _ = write!(out, "{},{}", sig17(s.t), sig17(s.y));
        for xi in &s.x {
            let _ = write!(out, ",{}", sig17(*xi));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use higs_ni::higs::{simulate_open_loop, ConstantInput};

    #[test]
    fn sig17_is_deterministic_17_digits() {
        assert_eq!(sig17(0.05), "5.0000000000000003e-2");
        assert_eq!(sig17(1.0), "1.0000000000000000e0");
        assert_eq!(sig17(f64::NAN), "NaN");
    }

    #[test]
    fn higs_csv_layout() {
        let params = HigsParams::new(0.5, 4.0).unwrap();
        let samples = simulate_open_loop(&params, &ConstantInput(1.0), 0.01, 0.5).unwrap();
        let csv = higs_csv(&samples, &params);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,e,edot,x_h,u,mode,V,dissipation_residual"
        );
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 8);
            // the element output u is its state x_h
            assert_eq!(cols[3], cols[4]);
            // mode is the 0/1 encoding
            assert!(cols[5] == "0" || cols[5] == "1");
        }
    }
}
