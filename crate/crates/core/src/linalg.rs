//! Dense complex matrix helpers shared by every module.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize, m: usize) -> CMat {
    CMat::zeros(n, m)
}

/// Kronecker product `a ⊗ b`, with `a` the slow (outer) index.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `N×N` matrix unit e_{ij}.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n, n);
    m[(i, j)] = re(1.0);
    m
}

/// Permutation (flip) operator on C^n ⊗ C^n: P^{ij}_{hk} = δ^i_k δ^j_h.
pub fn flip(n: usize) -> CMat {
    let mut p = zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            p[(i * n + j, j * n + i)] = re(1.0);
        }
    }
    p
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm of the difference `a - b`.
pub fn dist(a: &CMat, b: &CMat) -> f64 {
    spectral_norm(&(a - b))
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("{}x{} matrix not invertible", m.nrows(), m.ncols())))
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Backed by faer: nalgebra's symmetric QR returns wrong eigenvectors on
/// strongly degenerate spectra (e.g. the `l²` blocks of the so(N) orbital data).
///
/// # Panics
/// If the eigensolver fails to converge.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let fm = faer::Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = fm.self_adjoint_eigen(faer::Side::Lower).expect("Hermitian eigensolver converges");
    let s = evd.S().column_vector();
    let u = evd.U();
    ((0..n).map(|k| s[k].re).collect(), CMat::from_fn(n, n, |i, j| u[(i, j)]))
}

/// Applies a scalar function to a Hermitian matrix through its spectrum.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let n = vals.len();
    let mut d = zeros(n, n);
    for (k, v) in vals.iter().enumerate() {
        d[(k, k)] = f(*v);
    }
    &vecs * d * vecs.adjoint()
}

/// `x^{s·H} = exp(s ln x · H)` for Hermitian `H`, real `x > 0` and complex `s`.
pub fn hermitian_power(x: f64, s: C64, h: &CMat) -> CMat {
    let lx = x.ln();
    hermitian_fn(h, |lam| (s * lx * lam).exp())
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Sandwich `left * m * right`, used for safe-subspace projections.
pub fn sandwich(left: &CMat, m: &CMat, right: &CMat) -> CMat {
    left * m * right
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_on_degenerate_spectrum() {
        // 0.25 ⊕ 6.25·1₅ ⊕ 20.25·1₉, rotated by a dense unitary
        let n = 15;
        let d = CMat::from_fn(n, n, |i, j| match (i == j, i) {
            (false, _) => re(0.0),
            (true, 0) => re(0.25),
            (true, 1..=5) => re(6.25),
            _ => re(20.25),
        });
        let h = CMat::from_fn(n, n, |i, j| c(((i * 7 + j * 3) % 5) as f64, (i as f64 - j as f64) * 0.1));
        let h = &h + h.adjoint();
        let u = hermitian_fn(&h, |x| c(0.0, x).exp());
        let m = &u * d * u.adjoint();
        let (vals, vecs) = hermitian_eigen(&m);
        let back = &vecs * CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, vals.iter().map(|&v| re(v))))
            * vecs.adjoint();
        assert!(dist(&back, &m) < 1e-12);
        let root = hermitian_fn(&m, |x| re(x.sqrt()));
        assert!(dist(&(&root * &root), &m) < 1e-12);
    }

    #[test]
    fn flip_squares_to_identity() {
        let p = flip(3);
        assert!(dist(&(&p * &p), &identity(9)) < 1e-15);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let mut m = zeros(3, 3);
        m[(0, 0)] = re(-2.0);
        m[(1, 1)] = c(0.0, 3.0);
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-14);
        assert!((frobenius_norm(&m) - 13f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn hermitian_power_of_flip() {
        // P has eigenvalues ±1, so x^{sP} = x^s Sym + x^{-s} Anti.
        let p = flip(2);
        let x = 0.3_f64;
        let s = c(0.0, 0.7);
        let got = hermitian_power(x, s, &p);
        let id = identity(4);
        let sym = (&id + &p) * re(0.5);
        let anti = (&id - &p) * re(0.5);
        let want = sym * (s * x.ln()).exp() + anti * (-s * x.ln()).exp();
        assert!(dist(&got, &want) < 1e-13);
    }
}
