//! Dense symmetric linear algebra for the tiny systems the solver builds.
//! Matrices here are (s+1)-dimensional at most, so a cyclic Jacobi
//! eigensolver is exact enough and keeps the crate dependency-free.

use crate::scalar::Scalar;

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).fold(T::zero(), |acc, v| acc + v)
}

/// Eigendecomposition A = V Λ Vᵀ of a symmetric matrix; `vectors` is
/// row-major with eigenvector j in column j.
pub(crate) struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<T>,
    pub n: usize,
}

impl<T: Scalar> SymEigen<T> {
    /// Vᵀ x.
    pub fn project(&self, x: &[T]) -> Vec<T> {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.vectors[i * n + j] * x[i]).fold(T::zero(), |a, v| a + v))
            .collect()
    }

    /// Σ_j coeff_j · v_j.
    pub fn combine(&self, coeff: &[T]) -> Vec<T> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.vectors[i * n + j] * coeff[j]).fold(T::zero(), |a, v| a + v))
            .collect()
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a.max(v))
    }
}

/// Cyclic Jacobi rotations until the off-diagonal mass is at machine level.
pub(crate) fn sym_eigen<T: Scalar>(mat: &[T], n: usize) -> SymEigen<T> {
    debug_assert_eq!(mat.len(), n * n);
    let mut a = mat.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let scale = a
        .iter()
        .map(|&x| x * x)
        .fold(T::zero(), |acc, x| acc + x)
        .sqrt();
    let stop = scale * T::epsilon() * T::from_usize_c(n.max(1));
    let two = T::from_f64_c(2.0);

    for _sweep in 0..60 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off + a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = if theta >= T::zero() {
                    T::one() / (theta + (theta * theta + T::one()).sqrt())
                } else {
                    -T::one() / (-theta + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p * n + i];
                    let aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }

    SymEigen {
        values: (0..n).map(|i| a[i * n + i]).collect(),
        vectors: v,
        n,
    }
}

/// Minimum-norm least-squares solution of the (possibly rank-deficient)
/// positive semidefinite system A x = rhs: components along eigenvectors
/// with eigenvalue at numerical rank level are dropped.
pub(crate) fn psd_solve_min_norm<T: Scalar>(eig: &SymEigen<T>, rhs: &[T]) -> Vec<T> {
    let cutoff = eig.max_value() * T::epsilon() * T::from_usize_c(16 * eig.n.max(1));
    let proj = eig.project(rhs);
    let coeff: Vec<T> = proj
        .iter()
        .zip(&eig.values)
        .map(|(&c, &l)| if l > cutoff { c / l } else { T::zero() })
        .collect();
    eig.combine(&coeff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eigen_reconstructs_matrix() {
        // Symmetric 3x3 with known entries.
        let a = vec![4.0f64, 1.0, -2.0, 1.0, 2.0, 0.0, -2.0, 0.0, 3.0];
        let eig = sym_eigen(&a, 3);
        // Rebuild A = V diag(values) Vᵀ entry by entry.
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    acc += eig.vectors[i * 3 + k] * eig.values[k] * eig.vectors[j * 3 + k];
                }
                assert_relative_eq!(acc, a[i * 3 + j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn min_norm_solve_full_rank() {
        // A = [[2,0],[0,4]], rhs = (2, 8) -> x = (1, 2).
        let eig = sym_eigen(&[2.0f64, 0.0, 0.0, 4.0], 2);
        let x = psd_solve_min_norm(&eig, &[2.0, 8.0]);
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(x[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn min_norm_solve_rank_deficient() {
        // A = [[1,1],[1,1]] (rank 1), rhs = (2,2): solutions x1+x2 = 2,
        // minimum norm picks (1,1).
        let eig = sym_eigen(&[1.0f64, 1.0, 1.0, 1.0], 2);
        let x = psd_solve_min_norm(&eig, &[2.0, 2.0]);
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(x[1], 1.0, epsilon = 1e-10);
    }
}
