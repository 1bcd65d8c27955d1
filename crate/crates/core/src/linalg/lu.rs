use num_traits::{One, Zero};

use super::{is_square, CMat, LinalgError};
use crate::scalar::{abs1, Cx, Real};

/// LU factorization with partial pivoting, `P·A = L·U` stored compactly.
#[derive(Debug, Clone)]
pub struct Lu<R: Real> {
    lu: CMat<R>,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl<R: Real> Lu<R> {
    pub fn new(a: &CMat<R>) -> Result<Self, LinalgError> {
        let n = is_square(a)?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, abs1(lu[[i, k]])))
                .fold((k, R::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == R::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.swap([k, j], [p, j]);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[[k, k]];
            for i in (k + 1)..n {
                let f = lu[[i, k]] / pivot;
                lu[[i, k]] = f;
                if f != Cx::zero() {
                    for j in (k + 1)..n {
                        let u = lu[[k, j]];
                        lu[[i, j]] = lu[[i, j]] - f * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm, swaps, singular })
    }

    pub fn determinant(&self) -> Cx<R> {
        if self.singular {
            return Cx::zero();
        }
        let mut det = self.lu.diag().iter().fold(Cx::one(), |acc, &z| acc * z);
        if self.swaps % 2 == 1 {
            det = -det;
        }
        det
    }

    /// Solves `A·X = B` for a matrix right-hand side.
    pub fn solve(&self, b: &CMat<R>) -> Result<CMat<R>, LinalgError> {
        if self.singular {
            return Err(LinalgError::Singular);
        }
        let n = self.lu.nrows();
        let m = b.ncols();
        let mut x = CMat::from_shape_fn((n, m), |(i, j)| b[[self.perm[i], j]]);
        for col in 0..m {
            for i in 0..n {
                let mut s = x[[i, col]];
                for k in 0..i {
                    s = s - self.lu[[i, k]] * x[[k, col]];
                }
                x[[i, col]] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[[i, col]];
                for k in (i + 1)..n {
                    s = s - self.lu[[i, k]] * x[[k, col]];
                }
                x[[i, col]] = s / self.lu[[i, i]];
            }
        }
        Ok(x)
    }
}

pub fn inverse<R: Real>(a: &CMat<R>) -> Result<CMat<R>, LinalgError> {
    let lu = Lu::new(a)?;
    lu.solve(&super::identity(a.nrows()))
}

pub fn determinant<R: Real>(a: &CMat<R>) -> Result<Cx<R>, LinalgError> {
    Ok(Lu::new(a)?.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, norm_inf};
    use crate::scalar::cx;
    use ndarray::array;

    #[test]
    fn inverse_and_determinant_of_small_matrix() {
        let a: CMat<f64> = array![
            [cx(2.0, 1.0), cx(0.0, -1.0), cx(1.0, 0.0)],
            [cx(0.5, 0.0), cx(3.0, 0.0), cx(0.0, 2.0)],
            [cx(1.0, 1.0), cx(0.0, 0.0), cx(1.0, -1.0)],
        ];
        let inv = inverse(&a).unwrap();
        let err = norm_inf(&(a.dot(&inv) - identity::<f64>(3)));
        assert!(err < 1e-13, "{err}");
        // cofactor expansion along the first row
        let det = a[[0, 0]] * (a[[1, 1]] * a[[2, 2]] - a[[1, 2]] * a[[2, 1]])
            - a[[0, 1]] * (a[[1, 0]] * a[[2, 2]] - a[[1, 2]] * a[[2, 0]])
            + a[[0, 2]] * (a[[1, 0]] * a[[2, 1]] - a[[1, 1]] * a[[2, 0]]);
        assert!((determinant(&a).unwrap() - det).norm() < 1e-13);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a: CMat<f64> = array![[cx(1.0, 0.0), cx(2.0, 0.0)], [cx(2.0, 0.0), cx(4.0, 0.0)]];
        assert_eq!(determinant(&a).unwrap(), cx(0.0, 0.0));
        assert_eq!(inverse(&a).unwrap_err(), LinalgError::Singular);
    }
}
