//! SISO LTI state-space models and the handful of system-level queries the
//! toolkit needs: frequency response, DC gain, and minimality.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
// f64 math via the trait in no_std builds; std's inherent methods shadow it
// elsewhere, leaving the import apparently unused
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};

/// Minimal realization `(A, B, C, d)` of a SISO plant
/// `G(s) = C (sI - A)^{-1} B + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: f64,
}

impl StateSpace {
    /// Validates that `a` is square n x n, `b` is n x 1, `c` is 1 x n and `d`
    /// is finite.
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch("A must be square"));
        }
        let n = a.rows();
        if b.rows() != n || b.cols() != 1 {
            return Err(Error::DimensionMismatch("B must be n x 1"));
        }
        if c.rows() != 1 || c.cols() != n {
            return Err(Error::DimensionMismatch("C must be 1 x n"));
        }
        if !d.is_finite() {
            return Err(Error::InvalidMatrix("D must be finite"));
        }
        Ok(Self { a, b, c, d })
    }

    /// First-order helper `(a, b, c, d)` with scalar entries.
    pub fn scalar(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(
            Matrix::new(1, 1, alloc::vec![a])?,
            Matrix::new(1, 1, alloc::vec![b])?,
            Matrix::new(1, 1, alloc::vec![c])?,
            d,
        )
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// B as a plain vector.
    pub fn b_vec(&self) -> Vec<f64> {
        self.b.data().to_vec()
    }

    /// C as a plain vector.
    pub fn c_vec(&self) -> Vec<f64> {
        self.c.data().to_vec()
    }

    /// Evaluate `G(s) = C (sI - A)^{-1} B + d` at a complex point by a
    /// complex linear solve (no explicit inverse). Also returns the relative
    /// residual of the solve.
    pub fn eval(&self, s: Complex64) -> Result<(Complex64, f64)> {
        let n = self.order();
        let mut m = alloc::vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = Complex64::new(-self.a.get(i, j), 0.0);
            }
            m[i * n + i] += s;
        }
        let b: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(self.b.get(i, 0), 0.0))
            .collect();
        let (x, rel) = matrix::complex_solve(&m, &b, n)?;
        let mut g = Complex64::new(self.d, 0.0);
        for j in 0..n {
            g += Complex64::new(self.c.get(0, j), 0.0) * x[j];
        }
        Ok((g, rel))
    }

    /// `G(j omega)` over a positive, strictly increasing grid. Each point is
    /// obtained by a complex solve whose relative residual must stay below
    /// `1e-10`; a larger residual signals an imaginary-axis pole at that
    /// frequency and is reported as an error.
    pub fn freq_response(&self, grid: &[f64]) -> Result<ComplexResponse> {
        validate_grid(grid)?;
        let mut values = Vec::with_capacity(grid.len());
        for &w in grid {
            let s = Complex64::new(0.0, w);
            match self.eval(s) {
                Ok((g, rel)) if rel <= 1e-10 => values.push(g),
                _ => return Err(Error::SingularAtFrequency { omega: w }),
            }
        }
        ComplexResponse::new(grid.to_vec(), values)
    }

    /// DC gain `G(0) = -C A^{-1} B + d` via a real linear solve.
    /// Errors with [`Error::PoleAtOrigin`] when `A` is singular.
    pub fn dc_gain(&self) -> Result<f64> {
        let b = self.b_vec();
        let x = matrix::lu_solve(&self.a, &b).map_err(|_| Error::PoleAtOrigin)?;
        let bnorm = matrix::norm2(&b);
        if matrix::residual(&self.a, &x, &b) > 1e-12 * bnorm.max(1.0) {
            return Err(Error::PoleAtOrigin);
        }
        let cx = matrix::dot(&self.c_vec(), &x);
        Ok(-cx + self.d)
    }

    /// Controllability matrix `[B, AB, ..., A^{n-1}B]`.
    pub fn controllability(&self) -> Matrix {
        let n = self.order();
        let mut out = Matrix::zeros(n, n).expect("n within cap");
        let mut col = self.b_vec();
        for j in 0..n {
            for i in 0..n {
                out.set(i, j, col[i]);
            }
            col = self.a.mul_vec(&col);
        }
        out
    }

    /// Observability matrix `[C; CA; ...; CA^{n-1}]`.
    pub fn observability(&self) -> Matrix {
        let n = self.order();
        let mut out = Matrix::zeros(n, n).expect("n within cap");
        let at = self.a.transpose();
        let mut row = self.c_vec();
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, row[j]);
            }
            row = at.mul_vec(&row);
        }
        out
    }

    /// Minimality test by singular-value rank of the controllability and
    /// observability matrices, with relative tolerance `1e-9 * sigma_max`.
    pub fn minimality(&self) -> Minimality {
        let rank_margin = |m: &Matrix| -> (usize, f64) {
            let sv = matrix::singular_values(m).expect("square within cap");
            let tol = 1e-9 * sv[0];
            let rank = sv.iter().filter(|s| **s > tol).count();
            // smallest singular value retained by the rank decision
            let margin = if rank == 0 { 0.0 } else { sv[rank - 1] };
            (rank, margin)
        };
        let n = self.order();
        let (cr, cm) = rank_margin(&self.controllability());
        let (or, om) = rank_margin(&self.observability());
        Minimality {
            minimal: cr == n && or == n,
            controllability_margin: cm,
            observability_margin: om,
            rank_tolerance: 1e-9,
        }
    }
}

/// Outcome of the minimality test.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimality {
    pub minimal: bool,
    /// Smallest singular value of the controllability matrix retained by the
    /// rank decision.
    pub controllability_margin: f64,
    /// Same for the observability matrix.
    pub observability_margin: f64,
    /// Relative tolerance used (times the largest singular value).
    pub rank_tolerance: f64,
}

/// Sampled frequency response `G(j omega_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexResponse {
    frequencies: Vec<f64>,
    values: Vec<Complex64>,
}

impl ComplexResponse {
    pub fn new(frequencies: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if frequencies.len() != values.len() {
            return Err(Error::InvalidGrid("frequency/value length mismatch"));
        }
        validate_grid(&frequencies)?;
        Ok(Self {
            frequencies,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.frequencies
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Largest magnitude over the grid.
    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid[0] <= 0.0 || !grid[0].is_finite() {
        return Err(Error::InvalidGrid("frequencies must be positive"));
    }
    for pair in grid.windows(2) {
        if !pair[1].is_finite() || pair[1] <= pair[0] {
            return Err(Error::InvalidGrid("frequencies must be strictly increasing"));
        }
    }
    Ok(())
}

/// Log-spaced frequency grid description.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(omega_min: f64, omega_max: f64, points: usize) -> Result<Self> {
        if !omega_min.is_finite() || !omega_max.is_finite() || omega_min <= 0.0 || omega_max <= omega_min {
            return Err(Error::InvalidGrid("need 0 < omega_min < omega_max"));
        }
        if points < 2 {
            return Err(Error::InvalidGrid("need at least 2 points"));
        }
        Ok(Self {
            omega_min,
            omega_max,
            points,
        })
    }

    /// Default sweep for a plant with the given spectral radius: 2000
    /// log-spaced points spanning `[1e-2, 1e2] * rho`, which resolves the
    /// resonances of lightly damped modes.
    pub fn default_for(spectral_radius: f64) -> Self {
        let rho = if spectral_radius > 0.0 && spectral_radius.is_finite() {
            spectral_radius
        } else {
            1.0
        };
        Self {
            omega_min: 1e-2 * rho,
            omega_max: 1e2 * rho,
            points: 2000,
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.points;
        let l0 = self.omega_min.log10();
        let l1 = self.omega_max.log10();
        (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                libm_pow10(l0 + f * (l1 - l0))
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        alloc::format!(
            "{} log-spaced points over [{:e}, {:e}] rad/s",
            self.points,
            self.omega_min,
            self.omega_max
        )
    }
}

fn libm_pow10(x: f64) -> f64 {
    Float::powf(10.0f64, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    pub(crate) fn mems() -> StateSpace {
        StateSpace::new(
            Matrix::new(2, 2, vec![-547.571, -1.6676e4, 32768.0, 0.0]).unwrap(),
            Matrix::new(2, 1, vec![128.0, 0.0]).unwrap(),
            Matrix::new(1, 2, vec![0.0, 130.9727]).unwrap(),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn first_order_response() {
        // G(s) = 1/(s+1) at omega = 1: 0.5 - 0.5j
        let sys = StateSpace::scalar(-1.0, 1.0, 1.0, 0.0).unwrap();
        let resp = sys.freq_response(&[1.0]).unwrap();
        let g = resp.values()[0];
        assert!((g - Complex64::new(0.5, -0.5)).norm() < 1e-12);
    }

    #[test]
    fn mems_low_frequency_and_resonance() {
        let sys = mems();
        // near-DC value from direct evaluation of the transfer function
        let resp = sys.freq_response(&[1.0]).unwrap();
        let g = resp.values()[0];
        assert!((g.re - 1.00531).abs() < 1e-3, "{g}");
        assert!(g.im.abs() < 1e-2);
        // magnitude peaks near the resonance at 3.72 kHz
        let wr = 2.0 * core::f64::consts::PI * 3725.0;
        let grid = GridSpec::new(wr / 10.0, wr * 10.0, 801).unwrap().frequencies();
        let resp = sys.freq_response(&grid).unwrap();
        let (kmax, _) = resp
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap();
        let wpeak = resp.frequencies()[kmax];
        assert!(
            (wpeak - wr).abs() < 0.05 * wr,
            "peak at {wpeak} rad/s, expected near {wr}"
        );
    }

    #[test]
    fn dc_gain_cases() {
        let sys = StateSpace::scalar(-2.0, 1.0, 1.0, 0.0).unwrap();
        assert!((sys.dc_gain().unwrap() - 0.5).abs() < 1e-14);

        // closed-form 2x2 inverse for the bundled plant
        let sys = mems();
        let want = 130.9727 * 32768.0 * 128.0 / (1.6676e4 * 32768.0);
        assert!((sys.dc_gain().unwrap() - want).abs() < 1e-10 * want);

        // B = 0 returns d
        let sys = StateSpace::scalar(-1.0, 0.0, 1.0, 3.5).unwrap();
        assert!((sys.dc_gain().unwrap() - 3.5).abs() < 1e-14);

        // pole at the origin is an error
        let sys = StateSpace::scalar(0.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(sys.dc_gain(), Err(Error::PoleAtOrigin));
    }

    #[test]
    fn minimality_cases() {
        let sys = StateSpace::scalar(-1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(sys.minimality().minimal);

        // decoupled second state is unreachable and unobservable
        let sys = StateSpace::new(
            Matrix::new(2, 2, vec![-1.0, 0.0, 0.0, -2.0]).unwrap(),
            Matrix::new(2, 1, vec![1.0, 0.0]).unwrap(),
            Matrix::new(1, 2, vec![1.0, 0.0]).unwrap(),
            0.0,
        )
        .unwrap();
        let m = sys.minimality();
        assert!(!m.minimal);

        assert!(mems().minimality().minimal);
    }

    #[test]
    fn response_errors_on_imaginary_axis_pole() {
        // G(s) = 1/(s^2+1): the solve at exactly omega = 1 is singular
        let sys = StateSpace::new(
            Matrix::new(2, 2, vec![0.0, 1.0, -1.0, 0.0]).unwrap(),
            Matrix::new(2, 1, vec![0.0, 1.0]).unwrap(),
            Matrix::new(1, 2, vec![1.0, 0.0]).unwrap(),
            0.0,
        )
        .unwrap();
        assert_eq!(
            sys.freq_response(&[1.0]),
            Err(Error::SingularAtFrequency { omega: 1.0 })
        );
        // nearby frequencies still evaluate
        assert!(sys.freq_response(&[0.9, 1.1]).is_ok());
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0.0, 1.0, 10).is_err());
        assert!(GridSpec::new(1.0, 0.5, 10).is_err());
        assert!(GridSpec::new(1.0, 2.0, 1).is_err());
        let g = GridSpec::new(0.1, 1000.0, 5).unwrap().frequencies();
        assert_eq!(g.len(), 5);
        assert!((g[0] - 0.1).abs() < 1e-12);
        assert!((g[4] - 1000.0).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
