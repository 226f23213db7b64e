//! General (nonsymmetric) eigenvalues for small dense real matrices:
//! Householder reduction to upper Hessenberg form followed by the Francis
//! double-shift QR iteration with deflation and exceptional shifts.
//!
//! Complex eigenvalues of real input are produced as exact conjugate pairs
//! because they come out of 2x2 diagonal blocks in closed form.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// f64 math via the trait in no_std builds; std's inherent methods shadow it
// elsewhere, leaving the import apparently unused
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Eigenvalues plus a backward-error estimate.
///
/// `residual` bounds the size of the subdiagonal entries that were neglected
/// during deflation; the reported eigenvalues are exact for a matrix within
/// `O(residual)` of an orthogonal similarity of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub residual: f64,
}

impl Spectrum {
    /// Spectral radius, `max |lambda|`.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.norm()))
    }

    /// Largest real part.
    pub fn max_real(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(f64::NEG_INFINITY, |m, l| m.max(l.re))
    }
}

#[inline]
fn fsign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// All eigenvalues of a square matrix with `n <= MAX_DIM`.
pub fn eigenvalues(m: &Matrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigenvalues need a square matrix"));
    }
    let n = m.rows();
    if n == 1 {
        return Ok(Spectrum {
            eigenvalues: vec![Complex64::new(m.get(0, 0), 0.0)],
            residual: 0.0,
        });
    }
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] = m.get(i, j);
        }
    }
    hessenberg(&mut h, n);
    let (mut eig, residual) = hqr(&mut h, n)?;
    // canonical order: by real part, then imaginary part
    eig.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("finite eigenvalues")
    });
    Ok(Spectrum {
        eigenvalues: eig,
        residual,
    })
}

/// Householder reduction to upper Hessenberg form (in place).
fn hessenberg(h: &mut [f64], n: usize) {
    for k in 0..n.saturating_sub(2) {
        // column k below the subdiagonal
        let mut xnorm = 0.0f64;
        for i in (k + 1)..n {
            xnorm += h[i * n + k] * h[i * n + k];
        }
        xnorm = xnorm.sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1) * n + k];
        let alpha = -fsign(xnorm, x0);
        // v = x - alpha*e1
        let mut v = vec![0.0; n - k - 1];
        for (idx, i) in ((k + 1)..n).enumerate() {
            v[idx] = h[i * n + k];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 <= f64::MIN_POSITIVE {
            continue;
        }
        // H <- P H with P = I - 2 v v' / v'v  (rows k+1.., all columns)
        for j in k..n {
            let mut w = 0.0;
            for (idx, i) in ((k + 1)..n).enumerate() {
                w += v[idx] * h[i * n + j];
            }
            let f = 2.0 * w / vnorm2;
            for (idx, i) in ((k + 1)..n).enumerate() {
                h[i * n + j] -= f * v[idx];
            }
        }
        // H <- H P (all rows, columns k+1..)
        for i in 0..n {
            let mut w = 0.0;
            for (idx, j) in ((k + 1)..n).enumerate() {
                w += h[i * n + j] * v[idx];
            }
            let f = 2.0 * w / vnorm2;
            for (idx, j) in ((k + 1)..n).enumerate() {
                h[i * n + j] -= f * v[idx];
            }
        }
        // entries below the subdiagonal are zero by construction
        h[(k + 1) * n + k] = alpha;
        for i in (k + 2)..n {
            h[i * n + k] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix. Returns the
/// eigenvalues and the largest neglected subdiagonal (backward error).
fn hqr(a: &mut [f64], n: usize) -> Result<(Vec<Complex64>, f64)> {
    let idx = |i: usize, j: usize| i * n + j;
    let mut eig = Vec::with_capacity(n);
    let mut neglected = 0.0f64;
    let eps = f64::EPSILON;

    // Hessenberg norm used when a diagonal pair vanishes.
    let mut anorm = 0.0f64;
    for i in 0..n {
        let j0 = i.saturating_sub(1);
        for j in j0..n {
            anorm += a[idx(i, j)].abs();
        }
    }
    if anorm == 0.0 {
        // zero matrix
        return Ok((vec![Complex64::new(0.0, 0.0); n], 0.0));
    }

    let max_total_iters = 30 * n;
    let mut total_iters = 0usize;
    let mut t = 0.0f64; // accumulated exceptional shifts
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            // find a small subdiagonal element splitting the active block
            let mut l = nn;
            while l >= 1 {
                let s = a[idx((l - 1) as usize, (l - 1) as usize)].abs()
                    + a[idx(l as usize, l as usize)].abs();
                let s = if s == 0.0 { anorm } else { s };
                if a[idx(l as usize, (l - 1) as usize)].abs() <= eps * s {
                    neglected = neglected.max(a[idx(l as usize, (l - 1) as usize)].abs());
                    a[idx(l as usize, (l - 1) as usize)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = a[idx(nn as usize, nn as usize)];
            if l == nn {
                // one real eigenvalue converged
                eig.push(Complex64::new(x + t, 0.0));
                nn -= 1;
                break;
            }
            let y = a[idx((nn - 1) as usize, (nn - 1) as usize)];
            let w = a[idx(nn as usize, (nn - 1) as usize)] * a[idx((nn - 1) as usize, nn as usize)];
            if l == nn - 1 {
                // 2x2 block: closed-form pair
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x = x + t;
                if q >= 0.0 {
                    let z = p + fsign(z, p);
                    eig.push(Complex64::new(x + z, 0.0));
                    if z != 0.0 {
                        eig.push(Complex64::new(x - w / z, 0.0));
                    } else {
                        eig.push(Complex64::new(x + z, 0.0));
                    }
                } else {
                    eig.push(Complex64::new(x + p, z));
                    eig.push(Complex64::new(x + p, -z));
                }
                nn -= 2;
                break;
            }
            if total_iters >= max_total_iters {
                return Err(Error::EigenNoConvergence);
            }
            total_iters += 1;
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=(nn as usize) {
                    a[idx(i, i)] -= x;
                }
                let s = a[idx(nn as usize, (nn - 1) as usize)].abs()
                    + a[idx((nn - 1) as usize, (nn - 2) as usize)].abs();
                y = 0.75 * s;
                x = y;
                w = -0.4375 * s * s;
            }
            its += 1;
            // look for two consecutive small subdiagonals
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
            while m >= l {
                let mu = m as usize;
                let z = a[idx(mu, mu)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[idx(mu + 1, mu)] + a[idx(mu, mu + 1)];
                q = a[idx(mu + 1, mu + 1)] - z - rr - ss;
                r = a[idx(mu + 2, mu + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[idx(mu, mu - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (a[idx(mu - 1, mu - 1)].abs() + z.abs() + a[idx(mu + 1, mu + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            let m = m as usize;
            let l = l as usize;
            let nnu = nn as usize;
            for i in (m + 2)..=nnu {
                a[idx(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[idx(i, i - 3)] = 0.0;
                }
            }
            // double QR sweep over rows l..nn
            for k in m..nnu {
                if k != m {
                    p = a[idx(k, k - 1)];
                    q = a[idx(k + 1, k - 1)];
                    r = if k != nnu - 1 {
                        a[idx(k + 2, k - 1)]
                    } else {
                        0.0
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = fsign((p * p + q * q + r * r).sqrt(), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[idx(k, k - 1)] = -a[idx(k, k - 1)];
                    }
                } else {
                    a[idx(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                // row modification
                for j in k..=nnu {
                    let mut pp = a[idx(k, j)] + q * a[idx(k + 1, j)];
                    if k != nnu - 1 {
                        pp += r * a[idx(k + 2, j)];
                        a[idx(k + 2, j)] -= pp * z;
                    }
                    a[idx(k + 1, j)] -= pp * y;
                    a[idx(k, j)] -= pp * x;
                }
                // column modification
                let mmin = if nnu < k + 3 { nnu } else { k + 3 };
                for i in l..=mmin {
                    let mut pp = x * a[idx(i, k)] + y * a[idx(i, k + 1)];
                    if k != nnu - 1 {
                        pp += z * a[idx(i, k + 2)];
                        a[idx(i, k + 2)] -= pp * r;
                    }
                    a[idx(i, k + 1)] -= pp * q;
                    a[idx(i, k)] -= pp;
                }
            }
        }
    }
    Ok((eig, neglected))
}
