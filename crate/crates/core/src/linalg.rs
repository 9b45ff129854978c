//! Conversions between real-linear maps on ℝ²ⁿ and their complex/conjugate
//! parts on ℂⁿ.
//!
//! Real coordinates are interleaved as `(x_1, y_1, …, x_n, y_n)` so that the
//! standard structure `J_st` is block-diagonal with 2×2 rotation blocks. Every
//! real-linear map `M` splits uniquely as `v ↦ P v + Q v̄` with complex `P`
//! (the part commuting with `J_st`) and `Q` (the anticommuting part).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Standard complex structure on ℝ²ⁿ: 2×2 blocks [[0, -1], [1, 0]].
pub fn j_standard(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = -1.0;
        j[(2 * k + 1, 2 * k)] = 1.0;
    }
    j
}

/// Real 2n×2n matrix of the complex-linear map `v ↦ P v`.
pub fn real_of_complex_linear(p: &DMatrix<C64>) -> DMatrix<f64> {
    let n = p.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let a = p[(i, j)];
            m[(2 * i, 2 * j)] = a.re;
            m[(2 * i, 2 * j + 1)] = -a.im;
            m[(2 * i + 1, 2 * j)] = a.im;
            m[(2 * i + 1, 2 * j + 1)] = a.re;
        }
    }
    m
}

/// Real 2n×2n matrix of the conjugate-linear map `v ↦ Q v̄`.
pub fn real_of_conjugate_linear(q: &DMatrix<C64>) -> DMatrix<f64> {
    let n = q.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let a = q[(i, j)];
            m[(2 * i, 2 * j)] = a.re;
            m[(2 * i, 2 * j + 1)] = a.im;
            m[(2 * i + 1, 2 * j)] = a.im;
            m[(2 * i + 1, 2 * j + 1)] = -a.re;
        }
    }
    m
}

/// Split a real-linear map into its complex-linear and conjugate-linear parts.
///
/// `C = (M - J_st M J_st)/2` commutes with `J_st`, `K = (M + J_st M J_st)/2`
/// anticommutes; the returned matrices satisfy `M v = P v + Q v̄`.
pub fn split_real_linear(m: &DMatrix<f64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n2 = m.nrows();
    debug_assert_eq!(n2 % 2, 0);
    let n = n2 / 2;
    let jst = j_standard(n);
    let jmj = &jst * m * &jst;
    let c = (m - &jmj) * 0.5;
    let k = (m + &jmj) * 0.5;
    let p = DMatrix::from_fn(n, n, |i, j| C64::new(c[(2 * i, 2 * j)], c[(2 * i + 1, 2 * j)]));
    let q = DMatrix::from_fn(n, n, |i, j| C64::new(k[(2 * i, 2 * j)], k[(2 * i + 1, 2 * j)]));
    (p, q)
}

/// Interleaved real coordinates of a complex vector.
pub fn realify_vector(v: &[C64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * v.len());
    for z in v {
        out.push(z.re);
        out.push(z.im);
    }
    out
}

/// Complex vector from interleaved real coordinates.
pub fn complexify_vector(v: &[f64]) -> Vec<C64> {
    debug_assert_eq!(v.len() % 2, 0);
    v.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect()
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Operator norm of a complex matrix acting on ℂⁿ (via its real representation).
pub fn complex_operator_norm(a: &DMatrix<C64>) -> f64 {
    operator_norm(&real_of_complex_linear(a))
}
