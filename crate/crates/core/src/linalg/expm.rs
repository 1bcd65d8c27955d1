//! Matrix exponential via scaling-and-squaring with a [13/13] Padé approximant.

use super::{identity, is_square, norm_1, scale, CMat, LinalgError, Lu};
use crate::scalar::{re, Real};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// `exp(A)` for a square complex matrix.
pub fn expm<R: Real>(a: &CMat<R>) -> Result<CMat<R>, LinalgError> {
    let n = is_square(a)?;
    if n == 0 {
        return Ok(a.clone());
    }
    let norm = norm_1(a).as_f64();
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil().max(0.0) as i32 } else { 0 };
    let scaled = a.mapv(|z| z * R::lit(2f64.powi(-squarings)));

    let b = |k: usize| re(R::lit(PADE13[k]));
    let eye = identity::<R>(n);
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let u_inner = scale(&a6, b(13)) + scale(&a4, b(11)) + scale(&a2, b(9));
    let u = scaled.dot(&(a6.dot(&u_inner) + scale(&a6, b(7)) + scale(&a4, b(5)) + scale(&a2, b(3)) + scale(&eye, b(1))));
    let v_inner = scale(&a6, b(12)) + scale(&a4, b(10)) + scale(&a2, b(8));
    let v = a6.dot(&v_inner) + scale(&a6, b(6)) + scale(&a4, b(4)) + scale(&a2, b(2)) + scale(&eye, b(0));

    let p = &v + &u;
    let q = &v - &u;
    let mut r = Lu::new(&q)?.solve(&p)?;
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    Ok(r)
}
