//! Negative-imaginary verification of SISO LTI plants.
//!
//! Two independent routes are provided:
//! - [`check_ni_frequency`]: the frequency-domain definition — stable poles,
//!   `j[G(jw) - G*(jw)] >= 0` on a sweep (for SISO this is `-2 Im G`), and
//!   residue analysis at imaginary-axis poles;
//! - [`synth_y`] / [`verify_y`]: synthesis and independent checking of a
//!   certificate matrix `Y = Y' > 0` with `A Y + Y A' <= 0` and
//!   `B + A Y C' = 0`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// f64 math via the trait in no_std builds; std's inherent methods shadow it
// elsewhere, leaving the import apparently unused
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lti::{GridSpec, StateSpace};
use crate::matrix::{self, Matrix};
use crate::{eigen, tol};

/// Maximum state dimension accepted by the certificate search.
pub const MAX_SYNTH_DIM: usize = 12;

/// Stability/origin test of the plant poles.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleCheck {
    pub pass: bool,
    /// Eigenvalues with `Re > tol` or `|lambda| < tol` (unstable or at the
    /// origin).
    pub offending: Vec<Complex64>,
}

/// Residue analysis of one imaginary-axis pole.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueReport {
    /// Pole frequency (rad/s).
    pub pole_omega: f64,
    /// `K0 = lim_{s->j w0} (s - j w0) j G(s)`, by radial evaluation with
    /// Richardson extrapolation.
    pub residue: Complex64,
    pub simple: bool,
    /// For SISO: residue real and nonnegative within tolerance. `false`
    /// whenever `simple` is `false` (undefined in that case).
    pub psd: bool,
}

impl ResidueReport {
    pub fn pass(&self) -> bool {
        self.simple && self.psd
    }
}

/// Outcome of the frequency-domain NI check.
#[derive(Debug, Clone, PartialEq)]
pub struct NiFrequencyReport {
    /// Overall verdict.
    pub ni: bool,
    pub pole_check: PoleCheck,
    /// Smallest value of `-2 Im G(jw)` over the effective grid.
    pub sweep_min: f64,
    /// Grid frequency attaining `sweep_min`.
    pub worst_frequency: f64,
    /// Pass threshold actually used: `sweep_min >= -sweep_tol`.
    pub sweep_tol: f64,
    /// The sweep that was run.
    pub grid: GridSpec,
    /// Grid points dropped for being within the exclusion window of an
    /// imaginary-axis pole.
    pub excluded_points: usize,
    /// One report per imaginary-axis pole with positive frequency.
    pub residues: Vec<ResidueReport>,
}

/// Certificate matrix with its margins.
///
/// A valid certificate has `min_eig_y > 0`, `max_eig_lyap <= tol_psd` and
/// `residual_b <= tol_lin`; `pass` records that decision.
#[derive(Debug, Clone, PartialEq)]
pub struct YCertificate {
    pub y: Matrix,
    /// Smallest eigenvalue of `Y` (must be positive).
    pub min_eig_y: f64,
    /// Largest eigenvalue of `A Y + Y A'` (must not exceed `tol_psd`).
    pub max_eig_lyap: f64,
    /// `|B + A Y C'|_2` (must not exceed `tol_lin`).
    pub residual_b: f64,
    pub tol_psd: f64,
    pub tol_lin: f64,
    pub pass: bool,
}

impl YCertificate {
    /// `C Y C'`, which for a valid certificate equals the DC gain `G(0)`.
    pub fn c_y_ct(&self, sys: &StateSpace) -> f64 {
        let c = sys.c_vec();
        let yc = self.y.mul_vec(&c);
        matrix::dot(&c, &yc)
    }
}

fn margins(sys: &StateSpace, y: &Matrix) -> Result<(f64, f64, f64, f64, f64)> {
    let min_eig_y = matrix::sym_eigenvalues(y)?[0];
    let ay = sys.a().matmul(y)?;
    let lyap = ay.add(&ay.transpose())?;
    let max_eig_lyap = *matrix::sym_eigenvalues(&lyap)?
        .last()
        .expect("nonempty spectrum");
    // residual of B + A Y C'
    let yct = y.mul_vec(&sys.c_vec());
    let ayct = sys.a().mul_vec(&yct);
    let b = sys.b_vec();
    let res: f64 = b
        .iter()
        .zip(&ayct)
        .map(|(bi, ai)| (bi + ai) * (bi + ai))
        .sum::<f64>()
        .sqrt();
    let tol_psd = tol::PSD * 2.0 * sys.a().frobenius_norm() * y.frobenius_norm();
    let tol_lin = tol::LIN * (matrix::norm2(&b) + 1.0);
    Ok((min_eig_y, max_eig_lyap, res, tol_psd, tol_lin))
}

fn certificate_from(sys: &StateSpace, y: Matrix, symmetric_ok: bool) -> Result<YCertificate> {
    let (min_eig_y, max_eig_lyap, residual_b, tol_psd, tol_lin) = margins(sys, &y)?;
    let pass =
        symmetric_ok && min_eig_y > 0.0 && max_eig_lyap <= tol_psd && residual_b <= tol_lin;
    Ok(YCertificate {
        y,
        min_eig_y,
        max_eig_lyap,
        residual_b,
        tol_psd,
        tol_lin,
        pass,
    })
}

/// Recompute all certificate margins for a caller-supplied `Y` and report
/// pass/fail. This checker is independent of [`synth_y`] and is what tests
/// use to cross-validate it.
pub fn verify_y(sys: &StateSpace, y: &Matrix) -> Result<YCertificate> {
    if !y.is_square() || y.rows() != sys.order() {
        return Err(Error::DimensionMismatch("Y must be n x n"));
    }
    let symmetric_ok = y.asymmetry() <= 1e-12;
    certificate_from(sys, y.clone(), symmetric_ok)
}

/// Frequency-domain NI check per the definition: no poles at the origin or
/// in the open right half-plane, `-2 Im G(jw) >= 0` on the sweep (excluding
/// a window around imaginary-axis poles), and nonnegative simple residues at
/// imaginary-axis poles. Refuses non-minimal realizations.
pub fn check_ni_frequency(sys: &StateSpace, grid: &GridSpec) -> Result<NiFrequencyReport> {
    if !sys.minimality().minimal {
        return Err(Error::NonMinimal);
    }
    let spectrum = eigen::eigenvalues(sys.a())?;
    let anorm = sys.a().frobenius_norm();
    let pole_axis = tol::POLE_AXIS * anorm;
    let origin = tol::ORIGIN * anorm;

    let offending: Vec<Complex64> = spectrum
        .eigenvalues
        .iter()
        .copied()
        .filter(|l| l.re > pole_axis || l.norm() < origin)
        .collect();
    let pole_check = PoleCheck {
        pass: offending.is_empty(),
        offending,
    };

    let imag_poles: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .filter(|l| l.re.abs() <= pole_axis && l.im > 0.0)
        .map(|l| l.im)
        .collect();

    let all = grid.frequencies();
    let effective: Vec<f64> = all
        .iter()
        .copied()
        .filter(|w| imag_poles.iter().all(|w0| (w - w0).abs() > pole_axis))
        .collect();
    let excluded_points = all.len() - effective.len();
    if effective.is_empty() {
        return Err(Error::EmptyGrid);
    }

    let resp = sys.freq_response(&effective)?;
    let mut sweep_min = f64::INFINITY;
    let mut worst_frequency = effective[0];
    for (w, g) in resp.iter() {
        let v = -2.0 * g.im;
        if v < sweep_min {
            sweep_min = v;
            worst_frequency = w;
        }
    }
    let sweep_tol = tol::SWEEP * resp.max_magnitude();

    let mut residues = Vec::with_capacity(imag_poles.len());
    for w0 in imag_poles {
        residues.push(residue_at(sys, w0)?);
    }

    let ni = pole_check.pass && sweep_min >= -sweep_tol && residues.iter().all(|r| r.pass());
    Ok(NiFrequencyReport {
        ni,
        pole_check,
        sweep_min,
        worst_frequency,
        sweep_tol,
        grid: grid.clone(),
        excluded_points,
        residues,
    })
}

/// Residue `K0 = lim_{s -> j w0} (s - j w0) j G(s)` of a pole on (or near)
/// the imaginary axis at `w0 > 0`.
///
/// The limit is taken along the real direction `s = j w0 + r` on radii
/// `r = 1e-2 |A| .. 1e-6 |A|` with two-point Richardson extrapolation.
/// A non-simple pole is reported with `simple = false` (the residue test is
/// then undefined and counts as failed).
pub fn residue_at(sys: &StateSpace, omega0: f64) -> Result<ResidueReport> {
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(Error::InvalidParameter("residue frequency must be positive"));
    }
    let spectrum = eigen::eigenvalues(sys.a())?;
    let anorm = sys.a().frobenius_norm().max(f64::MIN_POSITIVE);
    let target = Complex64::new(0.0, omega0);
    let cluster = spectrum
        .eigenvalues
        .iter()
        .filter(|l| (*l - target).norm() <= tol::CLUSTER * anorm)
        .count();
    if cluster == 0 {
        return Err(Error::NoPoleNear { omega: omega0 });
    }
    if cluster > 1 {
        return Ok(ResidueReport {
            pole_omega: omega0,
            residue: Complex64::new(0.0, 0.0),
            simple: false,
            psd: false,
        });
    }
    let j = Complex64::new(0.0, 1.0);
    let mut samples = Vec::with_capacity(5);
    for k in 2..=6 {
        let r = Float::powi(10.0f64, -k) * anorm;
        let s = target + Complex64::new(r, 0.0);
        let (g, _) = sys.eval(s)?;
        samples.push(Complex64::new(r, 0.0) * j * g);
    }
    // two-point Richardson on consecutive radii (ratio 10): K = (10 f1 - f0)/9
    let mut extrap = samples[samples.len() - 1];
    for k in 0..samples.len() - 1 {
        extrap = (samples[k + 1] * 10.0 - samples[k]) / 9.0;
    }
    let k0 = extrap;
    let tol_res = 1e-7 * (1.0 + k0.norm());
    Ok(ResidueReport {
        pole_omega: omega0,
        residue: k0,
        simple: true,
        psd: k0.re >= -tol_res && k0.im.abs() <= tol_res,
    })
}

/// Synthesize a certificate `Y` for the NI lemma conditions
/// `Y = Y' > 0`, `A Y + Y A' <= 0`, `B + A Y C' = 0`.
///
/// The linear constraint is eliminated in closed form: with `c = C'` and
/// `v = -A^{-1} B` (so that `Y c = v`), a particular symmetric solution plus
/// an orthonormal basis of `{S = S' : S c = 0}` (dimension n(n-1)/2)
/// parameterize the affine search set. A coordinate pattern search with
/// shrinking step then maximizes `min(lambda_min(Y), -lambda_max(AY + YA'))`
/// and accepts as soon as both margins clear their tolerances.
///
/// Failure to find a certificate is reported as
/// [`Error::NoCertificateFound`], which is inconclusive — it is not a proof
/// that the system lacks the negative-imaginary property.
pub fn synth_y(sys: &StateSpace) -> Result<YCertificate> {
    if !sys.minimality().minimal {
        return Err(Error::NonMinimal);
    }
    let n = sys.order();
    if n > MAX_SYNTH_DIM {
        return Err(Error::TooLarge {
            n,
            max: MAX_SYNTH_DIM,
        });
    }
    let b = sys.b_vec();
    let c = sys.c_vec();
    let cn2 = matrix::dot(&c, &c);
    if cn2 <= 0.0 {
        // C = 0 cannot satisfy B + A Y C' = 0 with B != 0 (and is never
        // minimal anyway).
        return Err(Error::ConstraintInconsistent);
    }
    let neg_b: Vec<f64> = b.iter().map(|x| -x).collect();
    let v = matrix::lu_solve(sys.a(), &neg_b).map_err(|_| Error::PoleAtOrigin)?;

    // particular symmetric solution of Y c = v
    let ctv = matrix::dot(&c, &v);
    let y0 = Matrix::outer(&v, &c, 1.0 / cn2)
        .add(&Matrix::outer(&c, &v, 1.0 / cn2))?
        .sub(&Matrix::outer(&c, &c, ctv / (cn2 * cn2)))?;

    // orthonormal basis of the hyperplane c-perp via the Householder
    // reflector mapping e1 to c/|c|
    let cn = cn2.sqrt();
    let q: Vec<f64> = c.iter().map(|x| x / cn).collect();
    let mut w = q.clone();
    w[0] -= 1.0; // w = q - e1; reflector P = I - 2 w w'/w'w has P e1 = q
    let wtw = matrix::dot(&w, &w);
    let mut u_basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for jcol in 1..n {
        let mut col = vec![0.0; n];
        col[jcol] = 1.0;
        if wtw > 1e-24 {
            let f = 2.0 * w[jcol] / wtw;
            for i in 0..n {
                col[i] -= f * w[i];
            }
        }
        u_basis.push(col);
    }

    // symmetric basis of {S : S c = 0}
    let mut s_basis: Vec<Matrix> = Vec::new();
    for i in 0..u_basis.len() {
        for jb in i..u_basis.len() {
            let s = if i == jb {
                Matrix::outer(&u_basis[i], &u_basis[i], 1.0)
            } else {
                let f = 1.0 / 2.0f64.sqrt();
                Matrix::outer(&u_basis[i], &u_basis[jb], f)
                    .add(&Matrix::outer(&u_basis[jb], &u_basis[i], f))?
            };
            s_basis.push(s);
        }
    }

    let assemble = |theta: &[f64]| -> Result<Matrix> {
        let mut y = y0.clone();
        for (t, s) in theta.iter().zip(&s_basis) {
            if *t != 0.0 {
                y = y.add(&s.scale(*t))?;
            }
        }
        Ok(y)
    };
    let objective = |theta: &[f64]| -> Result<(f64, bool, Matrix)> {
        let y = assemble(theta)?;
        let (min_eig_y, max_eig_lyap, residual_b, tol_psd, tol_lin) = margins(sys, &y)?;
        let pass = min_eig_y > 0.0 && max_eig_lyap <= tol_psd && residual_b <= tol_lin;
        Ok((min_eig_y.min(-max_eig_lyap), pass, y))
    };

    let m = s_basis.len();
    let scale = y0.frobenius_norm().max(1e-30);
    let budget_per_restart = 500 * (m + 1);
    let mut rng = 0x9e3779b97f4a7c15u64;
    let mut xorshift = move || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };

    for restart in 0..50 {
        let mut theta = vec![0.0; m];
        if restart > 0 {
            for t in theta.iter_mut() {
                *t = xorshift() * 2.0 * scale;
            }
        }
        let (mut phi, pass, y) = objective(&theta)?;
        if pass {
            return certificate_from(sys, y, true);
        }
        let mut step = 0.5 * scale;
        let mut evals = 0usize;
        while step > 1e-14 * scale && evals < budget_per_restart {
            let mut improved = false;
            'coords: for k in 0..m {
                for sgn in [1.0, -1.0] {
                    let mut cand = theta.clone();
                    cand[k] += sgn * step;
                    let (phi_c, pass_c, y_c) = objective(&cand)?;
                    evals += 1;
                    if pass_c {
                        return certificate_from(sys, y_c, true);
                    }
                    if phi_c > phi {
                        theta = cand;
                        phi = phi_c;
                        improved = true;
                        continue 'coords;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if m == 0 {
            // nothing to search: the constraint fixes Y completely
            break;
        }
    }
    Err(Error::NoCertificateFound)
}
