//! Complex Schur decomposition by Householder reduction to Hessenberg form
//! followed by shifted QR sweeps with Givens rotations. Eigenvectors come
//! from back-substitution on the triangular factor.

use num_traits::{One, Zero};

use super::{adjoint, hermitian_part, identity, is_square, CMat, LinalgError};
use crate::scalar::{abs1, cx, re, Cx, Real};

/// `A = Q·T·Q†` with `Q` unitary and `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur<R: Real> {
    pub q: CMat<R>,
    pub t: CMat<R>,
}

/// Right eigenvectors (columns of `vectors`) paired with `values`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<R: Real> {
    pub values: Vec<Cx<R>>,
    pub vectors: CMat<R>,
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<R: Real> {
    pub values: Vec<R>,
    pub vectors: CMat<R>,
}

impl<R: Real> HermitianEigen<R> {
    pub fn min(&self) -> R {
        self.values.first().copied().unwrap_or_else(R::infinity)
    }
}

/// Reduces `a` to upper Hessenberg form in place, accumulating the
/// transformation into `q` (`a_orig = q·a·q†`).
fn hessenberg<R: Real>(a: &mut CMat<R>, q: &mut CMat<R>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let two = R::lit(2.0);
    for k in 0..n - 2 {
        let norm = (k + 1..n).map(|i| a[[i, k]].norm_sqr()).sum::<R>().sqrt();
        if norm == R::zero() {
            continue;
        }
        let x0 = a[[k + 1, k]];
        let phase = if x0.norm() == R::zero() { Cx::one() } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Cx<R>> = (k + 1..n).map(|i| a[[i, k]]).collect();
        v[0] = v[0] - alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt();
        if vnorm == R::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vnorm;
        }
        // a <- H a, H = I - 2 v v†, acting on rows k+1..n
        for j in 0..n {
            let mut s = Cx::zero();
            for (idx, vi) in v.iter().enumerate() {
                s = s + vi.conj() * a[[k + 1 + idx, j]];
            }
            s = s * two;
            for (idx, vi) in v.iter().enumerate() {
                a[[k + 1 + idx, j]] = a[[k + 1 + idx, j]] - *vi * s;
            }
        }
        // a <- a H and q <- q H, acting on columns k+1..n
        for m in [&mut *a, &mut *q] {
            for i in 0..n {
                let mut s = Cx::zero();
                for (idx, vi) in v.iter().enumerate() {
                    s = s + m[[i, k + 1 + idx]] * *vi;
                }
                s = s * two;
                for (idx, vi) in v.iter().enumerate() {
                    m[[i, k + 1 + idx]] = m[[i, k + 1 + idx]] - s * vi.conj();
                }
            }
        }
        for i in k + 2..n {
            a[[i, k]] = Cx::zero();
        }
    }
}

/// Givens rotation `G = [[c, s], [-s̄, c]]` with `G·[x; y] = [r; 0]`.
fn givens<R: Real>(x: Cx<R>, y: Cx<R>) -> (R, Cx<R>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == R::zero() {
        return (R::one(), Cx::zero());
    }
    if ax == R::zero() {
        return (R::zero(), y.conj() / ay);
    }
    let nrm = ax.hypot(ay);
    let c = ax / nrm;
    let s = (x / ax) * y.conj() / nrm;
    (c, s)
}

fn wilkinson_shift<R: Real>(a: Cx<R>, b: Cx<R>, c: Cx<R>, d: Cx<R>) -> Cx<R> {
    let half = R::lit(0.5);
    let mean = (a + d) * half;
    let disc = (((a - d) * half) * ((a - d) * half) + b * c).sqrt();
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition.
pub fn schur<R: Real>(a: &CMat<R>) -> Result<Schur<R>, LinalgError> {
    let n = is_square(a)?;
    let mut t = a.clone();
    let mut q = identity::<R>(n);
    if n <= 1 {
        return Ok(Schur { q, t });
    }
    hessenberg(&mut t, &mut q);

    let eps = R::epsilon();
    let anorm = t.iter().map(|&z| abs1(z)).fold(R::zero(), R::max);
    let small = R::min_positive_value() / eps;
    let max_iter = 60 * n;
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut iter = 0usize;

    while hi > 0 {
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = abs1(t[[lo, lo - 1]]);
            let mut diag = abs1(t[[lo - 1, lo - 1]]) + abs1(t[[lo, lo]]);
            if diag == R::zero() {
                diag = anorm;
            }
            if sub <= eps * diag || sub <= small {
                t[[lo, lo - 1]] = Cx::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(LinalgError::NoConvergence(total));
        }

        let shift = if iter % 11 == 10 {
            // exceptional shift to break cycles
            let e = abs1(t[[hi, hi - 1]]) + if hi >= 2 { abs1(t[[hi - 1, hi - 2]]) } else { R::zero() };
            t[[hi, hi]] + cx(R::lit(0.75) * e, R::lit(0.4375) * e)
        } else {
            wilkinson_shift(t[[hi - 1, hi - 1]], t[[hi - 1, hi]], t[[hi, hi - 1]], t[[hi, hi]])
        };

        for k in lo..=hi {
            t[[k, k]] = t[[k, k]] - shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(t[[k, k]], t[[k + 1, k]]);
            let cc = re(c);
            for j in k..n {
                let x = t[[k, j]];
                let y = t[[k + 1, j]];
                t[[k, j]] = cc * x + s * y;
                t[[k + 1, j]] = -s.conj() * x + cc * y;
            }
            t[[k + 1, k]] = Cx::zero();
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            let cc = re(c);
            let top = (k + 2).min(hi);
            for i in 0..=top {
                let x = t[[i, k]];
                let y = t[[i, k + 1]];
                t[[i, k]] = x * cc + y * s.conj();
                t[[i, k + 1]] = -x * s + y * cc;
            }
            for i in 0..n {
                let x = q[[i, k]];
                let y = q[[i, k + 1]];
                q[[i, k]] = x * cc + y * s.conj();
                q[[i, k + 1]] = -x * s + y * cc;
            }
        }
        for k in lo..=hi {
            t[[k, k]] = t[[k, k]] + shift;
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            t[[i, j]] = Cx::zero();
        }
    }
    Ok(Schur { q, t })
}

/// Eigenvalues and right eigenvectors of a general complex matrix.
///
/// Diagonal entries of the Schur factor closer than `merge_tol` to the
/// eigenvalue being solved for are treated as the same eigenvalue, and the
/// corresponding free coordinates are set to zero. For a diagonalizable
/// matrix with a repeated eigenvalue this yields a basis of the eigenspace;
/// for a defective one the resulting basis fails to reconstruct the matrix,
/// which callers detect.
pub fn eig<R: Real>(a: &CMat<R>, merge_tol: R) -> Result<EigenDecomposition<R>, LinalgError> {
    let n = is_square(a)?;
    let Schur { q, t } = schur(a)?;
    let values: Vec<Cx<R>> = (0..n).map(|i| t[[i, i]]).collect();
    let tnorm = t.iter().map(|&z| abs1(z)).fold(R::zero(), R::max);
    let tiny = R::epsilon() * tnorm.max(R::min_positive_value());

    let mut y = CMat::<R>::zeros((n, n));
    for k in 0..n {
        let lambda = values[k];
        y[[k, k]] = Cx::one();
        for i in (0..k).rev() {
            let mut s: Cx<R> = Cx::zero();
            for j in i + 1..=k {
                s = s + t[[i, j]] * y[[j, k]];
            }
            let mut denom = t[[i, i]] - lambda;
            if denom.norm() <= merge_tol {
                y[[i, k]] = Cx::zero();
                continue;
            }
            if denom.norm() < tiny {
                denom = re(tiny);
            }
            y[[i, k]] = -s / denom;
        }
        let nrm = (0..=k).map(|i| y[[i, k]].norm_sqr()).sum::<R>().sqrt();
        for i in 0..=k {
            y[[i, k]] = y[[i, k]] / nrm;
        }
    }
    let vectors = q.dot(&y);
    Ok(EigenDecomposition { values, vectors })
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized first.
pub fn hermitian_eig<R: Real>(a: &CMat<R>) -> Result<HermitianEigen<R>, LinalgError> {
    let n = is_square(a)?;
    let h = hermitian_part(a);
    let Schur { q, t } = schur(&h)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| t[[i, i]].re.partial_cmp(&t[[j, j]].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| t[[i, i]].re).collect();
    let vectors = CMat::from_shape_fn((n, n), |(r, c)| q[[r, order[c]]]);
    Ok(HermitianEigen { values, vectors })
}

#[allow(dead_code)]
pub(crate) fn unitary_residual<R: Real>(q: &CMat<R>) -> R {
    super::norm_inf(&(adjoint(q).dot(q) - identity::<R>(q.nrows())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_inf;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> CMat<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |_| cx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn schur_factors_random_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (4, 3), (9, 4), (16, 5), (25, 6)] {
            let a = random_matrix(n, seed);
            let Schur { q, t } = schur(&a).unwrap();
            assert!(unitary_residual(&q) < 1e-12);
            let back = q.dot(&t).dot(&adjoint(&q));
            assert!(norm_inf(&(back - &a)) < 1e-12 * (n as f64).max(1.0));
            for j in 0..n {
                for i in j + 1..n {
                    assert_eq!(t[[i, j]], cx(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let a = random_matrix(9, 11);
        let e = eig(&a, 0.0).unwrap();
        for k in 0..9 {
            let v = e.vectors.column(k).to_owned();
            let av = a.dot(&v);
            let err = av.iter().zip(v.iter()).map(|(x, y)| (*x - e.values[k] * *y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-11, "k={k} err={err}");
        }
    }

    #[test]
    fn repeated_eigenvalue_of_identity() {
        let a = identity::<f64>(4);
        let e = eig(&a, 1e-10).unwrap();
        assert!(e.values.iter().all(|v| (*v - cx(1.0, 0.0)).norm() < 1e-15));
        assert!(norm_inf(&(e.vectors - identity::<f64>(4))) < 1e-15);
    }

    #[test]
    fn real_rotation_has_conjugate_pair() {
        let a: CMat<f64> = ndarray::array![[cx(0.0, 0.0), cx(-1.0, 0.0)], [cx(1.0, 0.0), cx(0.0, 0.0)]];
        let e = eig(&a, 0.0).unwrap();
        let mut ims: Vec<f64> = e.values.iter().map(|v| v.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_eigenvalues_sorted_and_orthonormal() {
        let x = random_matrix(6, 21);
        let h = hermitian_part(&x);
        let he = hermitian_eig(&h).unwrap();
        assert!(he.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(unitary_residual(&he.vectors) < 1e-12);
        let d = CMat::from_shape_fn((6, 6), |(i, j)| if i == j { re(he.values[i]) } else { Cx::zero() });
        let back = he.vectors.dot(&d).dot(&adjoint(&he.vectors));
        assert!(norm_inf(&(back - h)) < 1e-12);
    }

    #[test]
    fn single_precision_schur() {
        let a: CMat<f32> = random_matrix(4, 8).mapv(|z| cx(z.re as f32, z.im as f32));
        let Schur { q, t } = schur(&a).unwrap();
        let back = q.dot(&t).dot(&adjoint(&q));
        assert!(norm_inf(&(back - &a)) < 1e-4);
    }
}
