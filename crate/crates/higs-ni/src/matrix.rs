//! Small dense real matrices and the factorizations the toolkit needs:
//! LU solves (real and complex), symmetric Jacobi eigenvalues, and
//! one-sided Jacobi singular values.
//!
//! Everything here is sized for low-order models; dimensions are capped at
//! [`MAX_DIM`] and the cap is enforced at construction.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// f64 math via the trait in no_std builds; std's inherent methods shadow it
// elsewhere, leaving the import apparently unused
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Hard cap on matrix dimensions. The models this crate targets are
/// low-order; a dense O(n^3) path is adequate up to this size.
pub const MAX_DIM: usize = 32;

/// Dense real matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Build a matrix from row-major entries. All entries must be finite and
    /// both dimensions must lie in `1..=MAX_DIM`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix("dimensions must be at least 1x1"));
        }
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::TooLarge {
                n: rows.max(cols),
                max: MAX_DIM,
            });
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix("entry count does not match rows*cols"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from nested row slices.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidMatrix("no rows"));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidMatrix("ragged rows"));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        Ok(m)
    }

    /// Column vector from a slice.
    pub fn column(v: &[f64]) -> Result<Self> {
        Self::new(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// Row-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Rows as nested vectors (used by serializers).
    pub fn to_nested(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = vec![0.0; self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[c * self.rows + r] = self.get(r, c);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data: out,
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("matmul inner dimensions"));
        }
        let mut out = Self {
            rows: self.rows,
            cols: other.cols,
            data: vec![0.0; self.rows * other.cols],
        };
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * out.cols + j] += aik * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix add"));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix sub"));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// y = M x for a vector x of length `cols`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for r in 0..self.rows {
            let mut acc = 0.0;
            for c in 0..self.cols {
                acc += self.get(r, c) * x[c];
            }
            y[r] = acc;
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute asymmetry `max_ij |m_ij - m_ji|` (square only).
    pub fn asymmetry(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `v v'` outer product of a vector with itself scaled by `s`.
    pub fn outer(u: &[f64], v: &[f64], s: f64) -> Self {
        let rows = u.len();
        let cols = v.len();
        let mut data = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                data[i * cols + j] = s * u[i] * v[j];
            }
        }
        Self { rows, cols, data }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Solve `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("lu_solve needs a square matrix"));
    }
    let n = a.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch("lu_solve rhs length"));
    }
    let mut lu = a.data.clone();
    let mut x = b.to_vec();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..n {
        // pivot
        let mut p = k;
        let mut best = lu[k * n + k].abs();
        for i in (k + 1)..n {
            let v = lu[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= f64::EPSILON * scale {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let piv = lu[k * n + k];
        for i in (k + 1)..n {
            let f = lu[i * n + k] / piv;
            lu[i * n + k] = f;
            for j in (k + 1)..n {
                lu[i * n + j] -= f * lu[k * n + j];
            }
            x[i] -= f * x[k];
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in (i + 1)..n {
            acc -= lu[i * n + j] * x[j];
        }
        x[i] = acc / lu[i * n + i];
    }
    Ok(x)
}

/// Matrix inverse via LU column solves.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("inverse needs a square matrix"));
    }
    let n = a.rows();
    let mut out = Matrix::zeros(n, n)?;
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = lu_solve(a, &e)?;
        e[j] = 0.0;
        for i in 0..n {
            out.set(i, j, col[i]);
        }
    }
    Ok(out)
}

/// 2-norm of the residual `A x - b`.
pub fn residual(a: &Matrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    ax.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// Solve the complex system `M x = b` (row-major `M`, n x n) by LU with
/// partial pivoting. Returns the solution and the relative residual
/// `|M x - b| / |b|` (zero when `b = 0`).
pub fn complex_solve(m: &[Complex64], b: &[Complex64], n: usize) -> Result<(Vec<Complex64>, f64)> {
    debug_assert_eq!(m.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut lu = m.to_vec();
    let mut x = b.to_vec();
    let scale = m
        .iter()
        .fold(0.0f64, |s, v| s.max(v.norm()))
        .max(f64::MIN_POSITIVE);
    for k in 0..n {
        let mut p = k;
        let mut best = lu[k * n + k].norm();
        for i in (k + 1)..n {
            let v = lu[i * n + k].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= f64::EPSILON * f64::EPSILON * scale {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let piv = lu[k * n + k];
        for i in (k + 1)..n {
            let f = lu[i * n + k] / piv;
            lu[i * n + k] = f;
            for j in (k + 1)..n {
                let sub = f * lu[k * n + j];
                lu[i * n + j] -= sub;
            }
            let sub = f * x[k];
            x[i] -= sub;
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in (i + 1)..n {
            acc -= lu[i * n + j] * x[j];
        }
        x[i] = acc / lu[i * n + i];
    }
    // relative residual of the solve
    let mut rnorm = 0.0f64;
    let mut bnorm = 0.0f64;
    for i in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += m[i * n + j] * x[j];
        }
        rnorm += (acc - b[i]).norm_sqr();
        bnorm += b[i].norm_sqr();
    }
    let rel = if bnorm > 0.0 {
        (rnorm / bnorm).sqrt()
    } else {
        0.0
    };
    Ok((x, rel))
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method,
/// sorted ascending. The input is symmetrized as `(M + M')/2` first.
pub fn sym_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "sym_eigenvalues needs a square matrix",
        ));
    }
    let n = m.rows();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (m.get(i, j) + m.get(j, i));
        }
    }
    let norm = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * norm;
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eig)
}

/// Singular values by one-sided Jacobi (orthogonalization of columns),
/// sorted descending. Accurate for small singular values, which is what the
/// rank decisions need.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    let rows = m.rows();
    let cols = m.cols();
    // work on columns
    let mut u: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m.get(i, j)).collect())
        .collect();
    for _sweep in 0..64 {
        let mut converged = true;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                converged = false;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let up = u[p][i];
                    let uq = u[q][i];
                    u[p][i] = c * up - s * uq;
                    u[q][i] = s * up + c * uq;
                }
            }
        }
        if converged {
            break;
        }
    }
    let mut sv: Vec<f64> = u.iter().map(|col| norm2(col)).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
        Matrix::new(2, 2, vec![a, b, c, d]).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            Matrix::new(0, 1, vec![]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            Matrix::new(2, 2, vec![1.0, 2.0, 3.0]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            Matrix::new(1, 1, vec![f64::NAN]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            Matrix::zeros(MAX_DIM + 1, 1),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn lu_solves_and_residual() {
        let a = m2(4.0, 1.0, 2.0, 3.0);
        let x = lu_solve(&a, &[9.0, 13.0]).unwrap();
        assert!((x[0] - 1.4).abs() < 1e-14);
        assert!((x[1] - 3.4).abs() < 1e-14);
        assert!(residual(&a, &x, &[9.0, 13.0]) < 1e-13);
        let sing = m2(1.0, 2.0, 2.0, 4.0);
        assert_eq!(lu_solve(&sing, &[1.0, 1.0]), Err(Error::Singular));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = Matrix::new(3, 3, vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]).unwrap();
        let inv = inverse(&a).unwrap();
        let prod = a.matmul(&inv).unwrap();
        let eye = Matrix::identity(3).unwrap();
        assert!(prod.sub(&eye).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn complex_solve_first_order() {
        // (j + 1) x = 1  =>  x = 0.5 - 0.5j
        let m = [Complex64::new(1.0, 1.0)];
        let b = [Complex64::new(1.0, 0.0)];
        let (x, rel) = complex_solve(&m, &b, 1).unwrap();
        assert!((x[0] - Complex64::new(0.5, -0.5)).norm() < 1e-15);
        assert!(rel < 1e-15);
    }

    #[test]
    fn jacobi_eigenvalues_symmetric() {
        let a = Matrix::new(3, 3, vec![2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
        let eig = sym_eigenvalues(&a).unwrap();
        let sqrt2 = 2.0f64.sqrt();
        assert!((eig[0] - (2.0 - sqrt2)).abs() < 1e-12);
        assert!((eig[1] - 2.0).abs() < 1e-12);
        assert!((eig[2] - (2.0 + sqrt2)).abs() < 1e-12);
    }

    #[test]
    fn singular_values_known() {
        // diag(3, 2) has singular values {3, 2}; a rank-1 matrix has one zero.
        let d = m2(3.0, 0.0, 0.0, 2.0);
        let sv = singular_values(&d).unwrap();
        assert!((sv[0] - 3.0).abs() < 1e-12 && (sv[1] - 2.0).abs() < 1e-12);
        let r1 = m2(1.0, 2.0, 2.0, 4.0);
        let sv = singular_values(&r1).unwrap();
        assert!((sv[0] - 5.0).abs() < 1e-12);
        assert!(sv[1].abs() < 1e-12);
    }
}
