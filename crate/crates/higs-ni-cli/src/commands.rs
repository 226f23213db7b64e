//! Subcommand implementations. Each returns the process exit code; data and
//! usage problems surface as [`CmdError`].

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use higs_ni::df::{self, cutoff_frequency};
use higs_ni::eigen;
use higs_ni::higs::HigsParams;
use higs_ni::lti::{ComplexResponse, GridSpec, StateSpace};
use higs_ni::ni;
use higs_ni::sim::{self, MonitorReport, SimConfig, Trajectory};
use higs_ni::stability::{self, SweepSim, Verdict};
use higs_ni::Error as CoreError;

use crate::cli::*;
use crate::csvfmt;
use crate::json::*;
use crate::{read_system, write_text, CmdError};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_CHATTERING: i32 = 4;

fn data_err(e: impl std::fmt::Display) -> CmdError {
    CmdError::Data(e.to_string())
}

impl GridArgs {
    /// Resolve with per-command defaults (already in rad/s).
    fn resolve(&self, default: GridSpec) -> Result<GridSpec, CmdError> {
        let scale = if self.hz { TWO_PI } else { 1.0 };
        let omega_min = self.omega_min.map_or(default.omega_min, |v| v * scale);
        let omega_max = self.omega_max.map_or(default.omega_max, |v| v * scale);
        let points = self.points.unwrap_or(default.points);
        GridSpec::new(omega_min, omega_max, points)
            .map_err(|e| CmdError::Usage(format!("bad grid: {e}")))
    }
}

fn default_sweep_grid(sys: &StateSpace) -> Result<GridSpec, CmdError> {
    let spectrum = eigen::eigenvalues(sys.a()).map_err(data_err)?;
    Ok(GridSpec::default_for(spectrum.spectral_radius()))
}

pub fn verify_ni(args: &VerifyNiArgs) -> Result<i32, CmdError> {
    let sys = read_system(&args.system)?;
    let grid = args.grid.resolve(default_sweep_grid(&sys)?)?;
    let report = ni::check_ni_frequency(&sys, &grid).map_err(data_err)?;
    let cert = match ni::synth_y(&sys) {
        Ok(c) => Some(c),
        Err(CoreError::NoCertificateFound) | Err(CoreError::ConstraintInconsistent) => None,
        Err(e) => return Err(data_err(e)),
    };
    let json = NiReportJson::build(&report, cert.as_ref());
    let text = if args.json {
        serde_json::to_string_pretty(&json).map_err(data_err)?
    } else {
        let mut s = format!(
            "negative-imaginary: {}\npole check: {}\nsweep min(-2 Im G) = {:.6e} at {:.6e} rad/s (tolerance -{:.3e})\n",
            if report.ni { "pass" } else { "fail" },
            if report.pole_check.pass { "pass" } else { "fail" },
            report.sweep_min,
            report.worst_frequency,
            report.sweep_tol,
        );
        for r in &report.residues {
            s.push_str(&format!(
                "residue at {:.6e} rad/s: {:.6e}{:+.6e}j simple={} psd={}\n",
                r.pole_omega, r.residue.re, r.residue.im, r.simple, r.psd
            ));
        }
        match &cert {
            Some(c) => s.push_str(&format!(
                "certificate: found (min_eig_y = {:.6e}, max_eig_lyap = {:.6e}, residual_b = {:.3e})\n",
                c.min_eig_y, c.max_eig_lyap, c.residual_b
            )),
            None => s.push_str("certificate: not found (inconclusive, not a disproof)\n"),
        }
        s
    };
    write_text(args.out.as_deref(), &text)?;
    Ok(if !report.ni {
        EXIT_FAIL
    } else if cert.is_some() {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    })
}

pub fn synth_y(args: &SynthYArgs) -> Result<i32, CmdError> {
    let sys = read_system(&args.system)?;
    match ni::synth_y(&sys) {
        Ok(cert) => {
            let json = YCertificateJson::from_cert(&cert);
            let text = if args.json {
                serde_json::to_string_pretty(&json).map_err(data_err)?
            } else {
                format!(
                    "Y = {:?}\nmin_eig_y = {:.6e}\nmax_eig_lyap = {:.6e}\nresidual_b = {:.3e}\n",
                    cert.y.to_nested(),
                    cert.min_eig_y,
                    cert.max_eig_lyap,
                    cert.residual_b
                )
            };
            write_text(args.out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Err(CoreError::NoCertificateFound) => {
            write_text(
                args.out.as_deref(),
                "no certificate found within the search budget; inconclusive (not a disproof)\n",
            )?;
            Ok(EXIT_INCONCLUSIVE)
        }
        Err(CoreError::ConstraintInconsistent) => {
            write_text(
                args.out.as_deref(),
                "linear constraint B + A Y C' = 0 is inconsistent: the plant is not negative imaginary\n",
            )?;
            Ok(EXIT_FAIL)
        }
        Err(e) => Err(data_err(e)),
    }
}

pub fn df_bode(args: &DfBodeArgs) -> Result<i32, CmdError> {
    let params = HigsParams::new(args.k_h, args.omega_h)
        .map_err(|e| CmdError::Usage(e.to_string()))?;
    let default = GridSpec::new(TWO_PI, TWO_PI * 1e5, 500)
        .expect("static default grid");
    let grid = args.grid.resolve(default)?;
    let points = df::df_bode(&params, &grid.frequencies()).map_err(data_err)?;
    let cutoff = cutoff_frequency(&params);
    let text = if args.json {
        #[derive(serde::Serialize)]
        struct Row {
            freq_hz: f64,
            mag_db: f64,
            phase_deg: f64,
            re: f64,
            im: f64,
        }
        #[derive(serde::Serialize)]
        struct Out {
            points: Vec<Row>,
            #[serde(skip_serializing_if = "Option::is_none")]
            cutoff_hz: Option<f64>,
        }
        let out = Out {
            points: points
                .iter()
                .map(|p| Row {
                    freq_hz: p.omega / TWO_PI,
                    mag_db: p.magnitude_db(),
                    phase_deg: p.phase_deg(),
                    re: p.value.re,
                    im: p.value.im,
                })
                .collect(),
            cutoff_hz: args.cutoff.then_some(cutoff / TWO_PI),
        };
        serde_json::to_string_pretty(&out).map_err(data_err)?
    } else {
        let mut s = csvfmt::bode_csv_from_df(&points);
        if args.cutoff {
            s.push_str(&format!("# cutoff_hz,{}\n", csvfmt::sig17(cutoff / TWO_PI)));
        }
        s
    };
    write_text(args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

pub fn certify(args: &CertifyArgs) -> Result<i32, CmdError> {
    let sys = read_system(&args.system)?;
    let params = HigsParams::new(args.k_h, args.omega_h)
        .map_err(|e| CmdError::Usage(e.to_string()))?;
    let cert = stability::certify(&sys, &params).map_err(data_err)?;
    let json = CertificateJson::build(&cert);
    let text = if args.json {
        serde_json::to_string_pretty(&json).map_err(data_err)?
    } else {
        let mut s = format!(
            "verdict: {}\ndc_gain = {:.6}\nk_h = {} (bound: {})\n",
            json.verdict,
            cert.dc_gain,
            cert.k_h,
            match cert.k_h_bound {
                stability::GainBound::Finite(b) => format!("{b:.6}"),
                stability::GainBound::Unbounded => "unbounded".into(),
            }
        );
        if let Some(m) = cert.schur_margin {
            s.push_str(&format!("schur margin 1/k_h - C Y C' = {m:.6e}\n"));
        }
        s.push_str(&format!(
            "shift-identity distance = {:.6e} ({})\n",
            cert.alpha_identity.distance,
            if cert.alpha_identity.ok { "ok" } else { "violated" }
        ));
        for r in &cert.reasons {
            s.push_str(&format!("reason: {r}\n"));
        }
        s
    };
    write_text(args.out.as_deref(), &text)?;
    Ok(match cert.verdict {
        Verdict::Pass => EXIT_OK,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

pub fn sweep(args: &SweepArgs) -> Result<i32, CmdError> {
    if args.k_h_grid.iter().any(|k| *k <= 0.0) {
        return Err(CmdError::Usage("k_h grid values must be positive".into()));
    }
    let sys = read_system(&args.system)?;
    let sim_cfg = if args.simulate {
        let x0 = args
            .x0
            .clone()
            .ok_or_else(|| CmdError::Usage("--simulate needs --x0".into()))?;
        Some(SweepSim {
            x0,
            dt: args.dt,
            t_final: args.t_final,
        })
    } else {
        None
    };
    let rows =
        stability::sweep_k_h(&sys, &args.k_h_grid, args.omega_h, sim_cfg.as_ref())
            .map_err(data_err)?;
    let text = if args.json {
        #[derive(serde::Serialize)]
        struct Row {
            k_h: f64,
            certificate: CertificateJson,
            settling_time: Option<f64>,
        }
        let out: Vec<Row> = rows
            .iter()
            .map(|r| Row {
                k_h: r.k_h,
                certificate: CertificateJson::build(&r.certificate),
                settling_time: r.settling_time,
            })
            .collect();
        serde_json::to_string_pretty(&out).map_err(data_err)?
    } else {
        let mut s = String::from("k_h  verdict  schur_margin  settling_time\n");
        for r in &rows {
            s.push_str(&format!(
                "{:<8} {:<12} {:<13} {}\n",
                r.k_h,
                verdict_str(r.certificate.verdict),
                r.certificate
                    .schur_margin
                    .map_or_else(|| "-".into(), |m| format!("{m:.4e}")),
                r.settling_time
                    .map_or_else(|| "-".into(), |t| format!("{t:.4e}")),
            ));
        }
        s
    };
    write_text(args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

/// Run a scenario: closed-loop trajectory CSV plus a monitor summary, and
/// the open-loop comparison when a disturbance is configured.
pub fn simulate(args: &SimulateArgs) -> Result<i32, CmdError> {
    let raw = fs::read_to_string(&args.scenario)
        .map_err(|e| CmdError::Data(format!("{}: {e}", args.scenario.display())))?;
    let scenario: ScenarioJson = serde_json::from_str(&raw)
        .map_err(|e| CmdError::Data(format!("{}: {e}", args.scenario.display())))?;
    let sys = scenario.resolve_system()?;
    let params = HigsParams::new(scenario.higs.k_h, scenario.higs.omega_h)
        .map_err(|e| CmdError::Data(e.to_string()))?;

    // best effort: the W monitor runs only when a certificate is found
    let cert = ni::synth_y(&sys).ok();
    let cfg: SimConfig = scenario.sim_config(cert.is_some());

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CmdError::Data(format!("{}: {e}", args.out_dir.display())))?;

    let run = |cfg: &SimConfig| -> Result<(Trajectory, Option<Vec<sim::LinearSample>>), CmdError> {
        if cfg.disturbance.is_some() {
            let study = sim::step_disturbance(&sys, &params, cfg, cert.as_ref())
                .map_err(map_sim_err)?;
            Ok((study.closed, Some(study.open)))
        } else {
            let traj = sim::simulate(&sys, &params, &scenario.x0, scenario.x_h0, cfg, cert.as_ref())
                .map_err(map_sim_err)?;
            Ok((traj, None))
        }
    };
    let (traj, open) = match run(&cfg) {
        Ok(v) => v,
        Err(CmdError::Chattering) => return Ok(EXIT_CHATTERING),
        Err(e) => return Err(e),
    };

    let monitors: Option<MonitorReport> = cert
        .as_ref()
        .map(|c| sim::certify_trajectory(&traj, &sys, &params, c))
        .transpose()
        .map_err(data_err)?;

    let traj_path = args.out_dir.join("trajectory.csv");
    fs::write(&traj_path, csvfmt::trajectory_csv(&traj))
        .map_err(|e| CmdError::Data(format!("{}: {e}", traj_path.display())))?;
    if let Some(open) = &open {
        let open_path = args.out_dir.join("open_loop.csv");
        fs::write(&open_path, csvfmt::linear_csv(open))
            .map_err(|e| CmdError::Data(format!("{}: {e}", open_path.display())))?;
    }
    let summary = SimulationSummaryJson::build(&traj, monitors.as_ref());
    let summary_text = serde_json::to_string_pretty(&summary).map_err(data_err)?;
    let mon_path = args.out_dir.join("monitors.json");
    fs::write(&mon_path, &summary_text)
        .map_err(|e| CmdError::Data(format!("{}: {e}", mon_path.display())))?;

    if args.json {
        println!("{summary_text}");
    } else {
        println!(
            "wrote {} ({} samples, {} events, W monitor {})",
            traj_path.display(),
            summary.samples,
            summary.events,
            summary.w_monitor
        );
        if let Some(m) = &summary.monitors {
            println!("monitors pass: {}", m.pass);
        }
    }
    Ok(EXIT_OK)
}

fn map_sim_err(e: CoreError) -> CmdError {
    match e {
        CoreError::Chattering { .. } => CmdError::Chattering,
        other => CmdError::Data(other.to_string()),
    }
}

/// Emit the data bundle behind one figure into a timestamped directory.
pub fn reproduce(args: &ReproduceArgs) -> Result<i32, CmdError> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let dir = args.out_dir.join(format!("figure{}_{stamp}", args.figure));
    fs::create_dir_all(&dir).map_err(|e| CmdError::Data(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<String> = Vec::new();
    let mut notes = serde_json::Map::new();

    let mems = crate::data::mems_model()?;
    let params = crate::data::mems_params();

    match args.figure {
        1 => {
            let p = HigsParams::new(1.0, 600.0 * std::f64::consts::PI).expect("static");
            let grid = GridSpec::new(TWO_PI, TWO_PI * 1e5, 1000).expect("static");
            let pts = df::df_bode(&p, &grid.frequencies()).map_err(data_err)?;
            write_file(&dir, "df_bode.csv", &csvfmt::bode_csv_from_df(&pts), &mut files)?;
            notes.insert(
                "cutoff_hz".into(),
                serde_json::json!(cutoff_frequency(&p) / TWO_PI),
            );
        }
        3 => {
            let grid = resonance_grid(&mems)?;
            let resp = mems.freq_response(&grid.frequencies()).map_err(data_err)?;
            write_file(
                &dir,
                "model_frf.csv",
                &csvfmt::bode_csv_from_response(&resp),
                &mut files,
            )?;
        }
        4 => {
            let grid = resonance_grid(&mems)?;
            let open = mems.freq_response(&grid.frequencies()).map_err(data_err)?;
            let closed = df::df_closed_loop(&open, &params).map_err(data_err)?;
            write_file(
                &dir,
                "open_loop_frf.csv",
                &csvfmt::bode_csv_from_response(&open),
                &mut files,
            )?;
            write_file(
                &dir,
                "closed_loop_frf.csv",
                &csvfmt::bode_csv_from_response(&closed),
                &mut files,
            )?;
            let damping = peak_db(&open) - peak_db(&closed);
            notes.insert("resonance_damping_db".into(), serde_json::json!(damping));
        }
        5 => {
            let cert = ni::synth_y(&mems).ok();
            let cfg = SimConfig {
                dt: 1e-6,
                t_final: 0.05,
                record_stride: 10,
                disturbance: None,
                monitor_w: cert.is_some(),
            };
            let traj = sim::simulate(&mems, &params, &[0.003, 0.024], 0.0, &cfg, cert.as_ref())
                .map_err(map_sim_err)?;
            write_file(&dir, "trajectory.csv", &csvfmt::trajectory_csv(&traj), &mut files)?;
        }
        6 => {
            let cert = ni::synth_y(&mems).ok();
            let cfg = SimConfig {
                dt: 1e-6,
                t_final: 0.05,
                record_stride: 10,
                disturbance: Some(sim::Disturbance::Step {
                    amplitude: 1.0,
                    t_on: 0.0,
                }),
                monitor_w: cert.is_some(),
            };
            let study =
                sim::step_disturbance(&mems, &params, &cfg, cert.as_ref()).map_err(map_sim_err)?;
            write_file(
                &dir,
                "closed_step.csv",
                &csvfmt::trajectory_csv(&study.closed),
                &mut files,
            )?;
            write_file(&dir, "open_step.csv", &csvfmt::linear_csv(&study.open), &mut files)?;
        }
        other => {
            return Err(CmdError::Usage(format!(
                "unknown figure id {other}; valid ids are 1, 3, 4, 5, 6"
            )))
        }
    }

    let manifest = serde_json::json!({
        "figure": args.figure,
        "files": files,
        "notes": notes,
    });
    let manifest_path = dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest).map_err(data_err)?)
        .map_err(|e| CmdError::Data(format!("{}: {e}", manifest_path.display())))?;
    println!("wrote {}", dir.display());
    Ok(EXIT_OK)
}

fn resonance_grid(sys: &StateSpace) -> Result<GridSpec, CmdError> {
    let rho = eigen::eigenvalues(sys.a()).map_err(data_err)?.spectral_radius();
    GridSpec::new(rho * 1e-2, rho * 1e2, 4000).map_err(data_err)
}

fn peak_db(resp: &ComplexResponse) -> f64 {
    20.0 * resp.max_magnitude().log10()
}

fn write_file(
    dir: &Path,
    name: &str,
    content: &str,
    files: &mut Vec<String>,
) -> Result<(), CmdError> {
    let path: PathBuf = dir.join(name);
    fs::write(&path, content).map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))?;
    files.push(name.to_string());
    Ok(())
}
