//! Small dense complex linear-algebra helpers shared by the floating point
//! modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

pub fn re_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn im_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_real(m: &RMat) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Eigenvalues of a real symmetric matrix (symmetrised first), ascending.
pub fn sym_eigenvalues(m: &RMat) -> Vec<f64> {
    let s = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix (Hermitised first), ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// 2-norm condition number; `inf` for rank-deficient input.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Orthonormal basis of the column span.
pub fn orthonormal_columns(m: &CMat) -> CMat {
    let qr = m.clone().qr();
    qr.q().columns(0, m.ncols()).into_owned()
}

/// Distance between two column spans, measured as the spectral norm of the
/// difference of the orthogonal projectors.
pub fn subspace_distance(a: &CMat, b: &CMat) -> f64 {
    let qa = orthonormal_columns(a);
    let qb = orthonormal_columns(b);
    let pa = &qa * qa.adjoint();
    let pb = &qb * qb.adjoint();
    singular_values(&(pa - pb)).first().copied().unwrap_or(0.0)
}

pub fn random_real_symmetric<R: Rng + ?Sized>(g: usize, scale: f64, rng: &mut R) -> RMat {
    let mut m = RMat::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            let x = rng.gen_range(-scale..scale);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

/// A random positive definite matrix with eigenvalues bounded below by
/// `floor`.
pub fn random_positive_definite<R: Rng + ?Sized>(g: usize, floor: f64, rng: &mut R) -> RMat {
    let a = RMat::from_fn(g, g, |_, _| rng.gen_range(-0.7..0.7));
    &a * a.transpose() + RMat::identity(g, g) * floor
}

pub fn random_complex_symmetric<R: Rng + ?Sized>(g: usize, rng: &mut R) -> CMat {
    let re = random_real_symmetric(g, 1.0, rng);
    let im = random_real_symmetric(g, 1.0, rng);
    CMat::from_fn(g, g, |i, j| c(re[(i, j)], im[(i, j)]))
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Relative spread `(max - min) / |mean|` of a list of values.
pub fn relative_spread(values: &[f64]) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / mean.abs()
}
