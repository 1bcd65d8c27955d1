#![allow(dead_code)]

use markovscope::channel::{transfer_from_kraus, ChannelMatrix, KrausSet};
use markovscope::linalg::{adjoint, hermitian_eig, hermitian_part, CMat};
use markovscope::Complex64;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat<f64> {
    Array2::from_shape_fn((r, c), |_| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        Complex64::new(a, b)
    })
}

pub fn hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat<f64> {
    hermitian_part(&gaussian(rng, n, n))
}

pub fn random_density(rng: &mut ChaCha8Rng, d: usize) -> CMat<f64> {
    let x = gaussian(rng, d, d);
    let w = x.dot(&adjoint(&x));
    let tr: f64 = (0..d).map(|i| w[[i, i]].re).sum();
    w.mapv(|z| z / tr)
}

/// Kraus channel `K_i = A_i S^{-1/2}` with `S = Σ A_i†A_i`.
pub fn kraus_channel(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> ChannelMatrix<f64> {
    let a: Vec<CMat<f64>> = (0..rank).map(|_| gaussian(rng, d, d)).collect();
    let s = a.iter().fold(Array2::zeros((d, d)), |acc: CMat<f64>, k| acc + adjoint(k).dot(k));
    let he = hermitian_eig(&s).unwrap();
    let inv_sqrt = Array2::from_shape_fn((d, d), |(r, c)| {
        (0..d).fold(Complex64::new(0.0, 0.0), |acc, k| {
            acc + he.vectors[[r, k]] * he.vectors[[c, k]].conj() / he.values[k].sqrt()
        })
    });
    let ops = a.iter().map(|k| k.dot(&inv_sqrt)).collect();
    transfer_from_kraus(&KrausSet::new(ops).unwrap())
}

pub fn close(a: &CMat<f64>, b: &CMat<f64>) -> f64 {
    markovscope::linalg::max_abs(&(a - b))
}
