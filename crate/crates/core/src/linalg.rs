//! Dense 4x4 kernels for the Newton solver.

use crate::scalar::{lit, Scalar};

pub type Vec4<T> = [T; 4];
/// Row-major.
pub type Mat4<T> = [[T; 4]; 4];

pub fn norm<T: Scalar>(v: &Vec4<T>) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when the smallest pivot falls below `pivot_tol` times the
/// largest; callers then fall back to [`Svd4`].
pub fn lu_solve<T: Scalar>(a: &Mat4<T>, b: &Vec4<T>, pivot_tol: T) -> Option<Vec4<T>> {
    let mut m = *a;
    let mut x = *b;
    let mut max_pivot = T::zero();
    let mut min_pivot = T::infinity();
    for col in 0..4 {
        let mut piv = col;
        for row in col + 1..4 {
            if m[row][col].abs() > m[piv][col].abs() {
                piv = row;
            }
        }
        m.swap(col, piv);
        x.swap(col, piv);
        let p = m[col][col];
        max_pivot = max_pivot.max(p.abs());
        min_pivot = min_pivot.min(p.abs());
        if !(p.abs() > T::zero()) {
            return None;
        }
        for row in col + 1..4 {
            let f = m[row][col] / p;
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
            x[row] -= f * x[col];
        }
    }
    if !(min_pivot > pivot_tol * max_pivot) {
        return None;
    }
    for col in (0..4).rev() {
        let mut acc = x[col];
        for k in col + 1..4 {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Some(x)
}

/// Thin SVD `A = U diag(sigma) V^T` by one-sided Jacobi rotations.
#[derive(Debug, Clone, Copy)]
pub struct Svd4<T> {
    /// Columns of `U`, stored as `u[j][i] = U_{ij}`.
    pub u: [[T; 4]; 4],
    pub sigma: [T; 4],
    /// Columns of `V`, stored as `v[j][i] = V_{ij}`.
    pub v: [[T; 4]; 4],
}

impl<T: Scalar> Svd4<T> {
    pub fn new(a: &Mat4<T>) -> Self {
        // Work on columns of A.
        let mut cols = [[T::zero(); 4]; 4];
        for (i, row) in a.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                cols[j][i] = *x;
            }
        }
        let mut v = [[T::zero(); 4]; 4];
        for (j, col) in v.iter_mut().enumerate() {
            col[j] = T::one();
        }
        let tol = T::epsilon();
        for _sweep in 0..30 {
            let mut rotated = false;
            for p in 0..3 {
                for q in p + 1..4 {
                    let alpha: T = cols[p].iter().map(|x| *x * *x).sum();
                    let beta: T = cols[q].iter().map(|x| *x * *x).sum();
                    let gamma: T = (0..4).map(|i| cols[p][i] * cols[q][i]).sum();
                    if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (lit::<T>(2.0) * gamma);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    for i in 0..4 {
                        let (x, y) = (cols[p][i], cols[q][i]);
                        cols[p][i] = c * x - s * y;
                        cols[q][i] = s * x + c * y;
                        let (x, y) = (v[p][i], v[q][i]);
                        v[p][i] = c * x - s * y;
                        v[q][i] = s * x + c * y;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sigma = [T::zero(); 4];
        let mut u = [[T::zero(); 4]; 4];
        for j in 0..4 {
            let s = norm(&cols[j]);
            sigma[j] = s;
            if s > T::zero() {
                for i in 0..4 {
                    u[j][i] = cols[j][i] / s;
                }
            }
        }
        Self { u, sigma, v }
    }

    pub fn max_singular(&self) -> T {
        self.sigma.iter().copied().fold(T::zero(), T::max)
    }

    pub fn min_singular(&self) -> T {
        self.sigma.iter().copied().fold(T::infinity(), T::min)
    }

    /// `sigma_max / sigma_min`; infinite for a singular matrix.
    pub fn condition(&self) -> T {
        let lo = self.min_singular();
        if lo == T::zero() {
            T::infinity()
        } else {
            self.max_singular() / lo
        }
    }

    /// Minimum-norm least-squares solution of `A x = b`, discarding singular
    /// values below `rcond * sigma_max`.
    pub fn solve(&self, b: &Vec4<T>, rcond: T) -> Vec4<T> {
        let cutoff = rcond * self.max_singular();
        let mut x = [T::zero(); 4];
        for j in 0..4 {
            let s = self.sigma[j];
            if !(s > cutoff) {
                continue;
            }
            let coef = (0..4).map(|i| self.u[j][i] * b[i]).sum::<T>() / s;
            for (xi, vi) in x.iter_mut().zip(self.v[j].iter()) {
                *xi += coef * *vi;
            }
        }
        x
    }
}
