//! JSON schemas for systems, scenarios, reports and certificates.

use higs_ni::lti::{GridSpec, StateSpace};
use higs_ni::matrix::Matrix;
use higs_ni::ni::{NiFrequencyReport, YCertificate};
use higs_ni::sim::{Disturbance, MonitorReport, SimConfig, Trajectory};
use higs_ni::stability::{GainBound, StabilityCertificate, Verdict};
use serde::{Deserialize, Serialize};

use crate::CmdError;

/// `{"a": [[...]], "b": [[...]], "c": [[...]], "d": 0.0}`, row-major nested
/// arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpaceJson {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    #[serde(default)]
    pub d: f64,
}

impl StateSpaceJson {
    pub fn to_state_space(&self) -> Result<StateSpace, CmdError> {
        let build = || -> higs_ni::Result<StateSpace> {
            StateSpace::new(
                Matrix::from_rows(&self.a)?,
                Matrix::from_rows(&self.b)?,
                Matrix::from_rows(&self.c)?,
                self.d,
            )
        };
        build().map_err(|e| CmdError::Data(format!("invalid state-space model: {e}")))
    }

    pub fn from_state_space(sys: &StateSpace) -> Self {
        Self {
            a: sys.a().to_nested(),
            b: sys.b().to_nested(),
            c: sys.c().to_nested(),
            d: sys.d(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HigsParamsJson {
    pub k_h: f64,
    pub omega_h: f64,
}

/// `{"type": "step", "amplitude": 1.0, "t_on": 0.0}`
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DisturbanceJson {
    Step {
        amplitude: f64,
        #[serde(default)]
        t_on: f64,
    },
}

impl DisturbanceJson {
    pub fn to_disturbance(&self) -> Disturbance {
        match self {
            DisturbanceJson::Step { amplitude, t_on } => Disturbance::Step {
                amplitude: *amplitude,
                t_on: *t_on,
            },
        }
    }
}

/// System given inline or as a path to another JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemRef {
    Inline(StateSpaceJson),
    Path(String),
}

/// Simulation scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioJson {
    pub system: SystemRef,
    pub higs: HigsParamsJson,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub x_h0: f64,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub disturbance: Option<DisturbanceJson>,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
}

fn default_stride() -> usize {
    1
}

impl ScenarioJson {
    pub fn resolve_system(&self) -> Result<StateSpace, CmdError> {
        match &self.system {
            SystemRef::Inline(ss) => ss.to_state_space(),
            SystemRef::Path(p) => crate::read_system(std::path::Path::new(p)),
        }
    }

    pub fn sim_config(&self, monitor_w: bool) -> SimConfig {
        SimConfig {
            dt: self.dt,
            t_final: self.t_final,
            record_stride: self.record_stride,
            disturbance: self.disturbance.as_ref().map(|d| d.to_disturbance()),
            monitor_w,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleCheckJson {
    pub pass: bool,
    pub offending_poles: Vec<ComplexJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidueJson {
    pub pole_omega: f64,
    pub residue: ComplexJson,
    pub simple: bool,
    pub psd: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct YMarginsJson {
    pub min_eig_y: f64,
    pub max_eig_lyap: f64,
    pub residual_b: f64,
    pub tol_psd: f64,
    pub tol_lin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct YCertificateJson {
    pub y: Vec<Vec<f64>>,
    pub margins: YMarginsJson,
}

impl YCertificateJson {
    pub fn from_cert(cert: &YCertificate) -> Self {
        Self {
            y: cert.y.to_nested(),
            margins: YMarginsJson {
                min_eig_y: cert.min_eig_y,
                max_eig_lyap: cert.max_eig_lyap,
                residual_b: cert.residual_b,
                tol_psd: cert.tol_psd,
                tol_lin: cert.tol_lin,
            },
        }
    }
}

/// Full NI verification report:
/// `{"ni": ..., "pole_check": {...}, "sweep_min": ..., "worst_frequency":
/// ..., "certificate": {...} | null, "inconclusive": ...}`.
#[derive(Debug, Clone, Serialize)]
pub struct NiReportJson {
    pub ni: bool,
    pub pole_check: PoleCheckJson,
    pub sweep_min: f64,
    pub worst_frequency: f64,
    pub sweep_tolerance: f64,
    pub grid: GridJson,
    pub excluded_points: usize,
    pub residues: Vec<ResidueJson>,
    pub certificate: Option<YCertificateJson>,
    /// True when the frequency-domain check passed but no certificate was
    /// found within the search budget (not a disproof).
    pub inconclusive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridJson {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

impl From<&GridSpec> for GridJson {
    fn from(g: &GridSpec) -> Self {
        Self {
            omega_min: g.omega_min,
            omega_max: g.omega_max,
            points: g.points,
        }
    }
}

impl NiReportJson {
    pub fn build(report: &NiFrequencyReport, cert: Option<&YCertificate>) -> Self {
        Self {
            ni: report.ni,
            pole_check: PoleCheckJson {
                pass: report.pole_check.pass,
                offending_poles: report
                    .pole_check
                    .offending
                    .iter()
                    .map(|l| ComplexJson { re: l.re, im: l.im })
                    .collect(),
            },
            sweep_min: report.sweep_min,
            worst_frequency: report.worst_frequency,
            sweep_tolerance: report.sweep_tol,
            grid: GridJson::from(&report.grid),
            excluded_points: report.excluded_points,
            residues: report
                .residues
                .iter()
                .map(|r| ResidueJson {
                    pole_omega: r.pole_omega,
                    residue: ComplexJson {
                        re: r.residue.re,
                        im: r.residue.im,
                    },
                    simple: r.simple,
                    psd: r.psd,
                })
                .collect(),
            certificate: cert.map(YCertificateJson::from_cert),
            inconclusive: report.ni && cert.is_none(),
        }
    }
}

/// `"unbounded"` or a number.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum GainBoundJson {
    Finite(f64),
    Unbounded(&'static str),
}

impl From<GainBound> for GainBoundJson {
    fn from(b: GainBound) -> Self {
        match b {
            GainBound::Finite(v) => GainBoundJson::Finite(v),
            GainBound::Unbounded => GainBoundJson::Unbounded("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaIdentityJson {
    pub ok: bool,
    pub distance: f64,
}

/// `{"verdict":"pass|fail|inconclusive", "dc_gain":..., "k_h":...,
/// "k_h_bound":..., "schur_margin":..., "alpha_identity":{...},
/// "reasons":[...]}`.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateJson {
    pub verdict: &'static str,
    pub dc_gain: f64,
    pub k_h: f64,
    pub k_h_bound: GainBoundJson,
    pub schur_margin: Option<f64>,
    pub alpha_identity: AlphaIdentityJson,
    pub y: Option<YCertificateJson>,
    pub reasons: Vec<String>,
}

pub fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

impl CertificateJson {
    pub fn build(cert: &StabilityCertificate) -> Self {
        Self {
            verdict: verdict_str(cert.verdict),
            dc_gain: cert.dc_gain,
            k_h: cert.k_h,
            k_h_bound: cert.k_h_bound.into(),
            schur_margin: cert.schur_margin,
            alpha_identity: AlphaIdentityJson {
                ok: cert.alpha_identity.ok,
                distance: cert.alpha_identity.distance,
            },
            y: cert.y.as_ref().map(YCertificateJson::from_cert),
            reasons: cert.reasons.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonitorReportJson {
    pub max_w_increase: f64,
    pub max_dissipation_residual: f64,
    pub max_sector_violation: f64,
    pub max_upper_sector_violation: f64,
    pub max_gain_identity: f64,
    pub w_positive: bool,
    pub pass: bool,
}

impl From<&MonitorReport> for MonitorReportJson {
    fn from(r: &MonitorReport) -> Self {
        Self {
            max_w_increase: r.max_w_increase,
            max_dissipation_residual: r.max_dissipation_residual,
            max_sector_violation: r.max_sector_violation,
            max_upper_sector_violation: r.max_upper_sector_violation,
            max_gain_identity: r.max_gain_identity,
            w_positive: r.w_positive,
            pass: r.pass,
        }
    }
}

/// Summary written next to the trajectory CSV by `simulate`.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummaryJson {
    pub samples: usize,
    pub events: usize,
    pub w_monitor: &'static str,
    pub warnings: Vec<String>,
    pub final_time: f64,
    pub final_combined_norm: f64,
    pub settling_time: Option<f64>,
    pub monitors: Option<MonitorReportJson>,
}

impl SimulationSummaryJson {
    pub fn build(traj: &Trajectory, monitors: Option<&MonitorReport>) -> Self {
        let last = traj.final_sample();
        Self {
            samples: traj.samples.len(),
            events: traj.events.len(),
            w_monitor: if traj.w_available {
                "enabled"
            } else {
                "unavailable"
            },
            warnings: traj.warnings.clone(),
            final_time: last.t,
            final_combined_norm: Trajectory::combined_norm(last),
            settling_time: higs_ni::stability::settling_of(traj),
            monitors: monitors.map(MonitorReportJson::from),
        }
    }
}
