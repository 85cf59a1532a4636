//! Small dense symmetric-matrix helpers for the d×d covariance blocks of a
//! triplet. Dimensions here are tiny (d ≤ 10 in practice), so a cyclic Jacobi
//! eigensolver is simpler and more portable than pulling in a BLAS binding.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{LevyError, Result};
use crate::math;

/// Row-major symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LevyError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(SymMatrix { dim, data })
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = v;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if math::abs(self.get(i, j) - self.get(j, i)) > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `x ↦ Mx`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| math::dot(&self.data[i * self.dim..(i + 1) * self.dim], x))
            .collect()
    }

    /// `x·Mx`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        math::dot(x, &self.matvec(x))
    }

    /// Largest absolute entry, used as an operator-norm proxy for the
    /// bounded-coefficients certificate.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(math::abs(v)))
    }

    /// Eigen-decomposition by cyclic Jacobi rotations: returns
    /// `(eigenvalues, eigenvectors)` with column `k` of the returned matrix
    /// the eigenvector of `eigenvalues[k]`.
    pub fn jacobi_eigen(&self) -> (Vec<f64>, SymMatrix) {
        let n = self.dim;
        let mut a = self.clone();
        let mut v = SymMatrix::identity(n);
        for _sweep in 0..64 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a.get(i, j) * a.get(i, j);
                }
            }
            if off <= 1e-30 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if math::abs(apq) < 1e-300 {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + math::sqrt(1.0 + theta * theta))
                    } else {
                        1.0 / (theta - math::sqrt(1.0 + theta * theta))
                    };
                    let c = 1.0 / math::sqrt(1.0 + t * t);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        let eig = (0..n).map(|i| a.get(i, i)).collect();
        (eig, v)
    }

    /// Symmetric square root of a positive semidefinite matrix. Eigenvalues in
    /// `[-tol_psd, 0)` are clamped to zero; smaller ones reject the input.
    pub fn psd_sqrt(&self, tol_psd: f64) -> Result<SymMatrix> {
        if !self.is_symmetric(1e-12) {
            return Err(LevyError::NotPositiveSemidefinite);
        }
        let (eig, vecs) = self.jacobi_eigen();
        let n = self.dim;
        let mut root = SymMatrix::zeros(n);
        let mut sqrt_eig = vec![0.0; n];
        for (root_l, &l) in sqrt_eig.iter_mut().zip(&eig) {
            if l < -tol_psd {
                return Err(LevyError::NotPositiveSemidefinite);
            }
            *root_l = math::sqrt(l.max(0.0));
        }
        for i in 0..n {
            for j in 0..n {
                let s: f64 = sqrt_eig
                    .iter()
                    .enumerate()
                    .map(|(k, se)| vecs.get(i, k) * se * vecs.get(j, k))
                    .sum();
                root.set(i, j, s);
            }
        }
        Ok(root)
    }

    /// Smallest eigenvalue, for the PSD validity check.
    pub fn min_eigenvalue(&self) -> f64 {
        let (eig, _) = self.jacobi_eigen();
        eig.into_iter().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal() {
        let m = SymMatrix::diagonal(&[1.0, 4.0]);
        let (mut eig, _) = m.jacobi_eigen();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eig[0] - 1.0).abs() < 1e-12);
        assert!((eig[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = SymMatrix::from_rows(&[vec![2.0, 0.5, 0.0], vec![0.5, 1.0, 0.2], vec![0.0, 0.2, 3.0]])
            .unwrap();
        let r = m.psd_sqrt(1e-10).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += r.get(i, k) * r.get(k, j);
                }
                assert!((s - m.get(i, j)).abs() < 1e-10, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn negative_definite_rejected() {
        let m = SymMatrix::diagonal(&[1.0, -0.5]);
        assert_eq!(m.psd_sqrt(1e-10), Err(LevyError::NotPositiveSemidefinite));
    }
}
