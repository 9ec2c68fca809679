//! Theta constants with characteristics, lattice theta series and the named
//! cusp forms χ10 (genus 2), χ18 (genus 3) and the Schottky difference.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::QMatrix;
use crate::fourier::{exact_int, FourierExpansion, HalfIntegralMatrix};
use crate::numeric::{c, fit_slope, CMat};
use crate::siegelspace::{cocycle, moebius_act, SiegelPoint};

// ---------------------------------------------------------------------------
// Characteristics and theta constants

/// `ε = (ε′, ε″)` with `ε′ = a/2`, `ε″ = b/2` and `a, b ∈ {0, 1}^g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ThetaCharacteristic {
    a: Vec<u8>,
    b: Vec<u8>,
}

impl ThetaCharacteristic {
    pub fn new(a: Vec<u8>, b: Vec<u8>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        if a.is_empty() {
            return Err(Error::InvalidParameter("characteristic needs g ≥ 1".into()));
        }
        if a.iter().chain(&b).any(|&x| x > 1) {
            return Err(Error::InvalidParameter("characteristic bits must be 0 or 1".into()));
        }
        Ok(ThetaCharacteristic { a, b })
    }

    pub fn g(&self) -> usize {
        self.a.len()
    }

    pub fn top(&self) -> &[u8] {
        &self.a
    }

    pub fn bottom(&self) -> &[u8] {
        &self.b
    }

    /// `4·ᵗε′ε″`.
    fn pairing(&self) -> u32 {
        self.a.iter().zip(&self.b).map(|(x, y)| u32::from(x * y)).sum()
    }

    pub fn is_even(&self) -> bool {
        self.pairing().is_multiple_of(2)
    }

    /// `exp(4πi ᵗε′ε″) = ±1`.
    pub fn parity(&self) -> i8 {
        if self.is_even() {
            1
        } else {
            -1
        }
    }
}

/// All `4^g` characteristics.
pub fn all_characteristics(g: usize) -> Result<Vec<ThetaCharacteristic>> {
    if g == 0 || g > 8 {
        return Err(Error::InvalidParameter(format!("genus {g} outside 1..=8")));
    }
    let bits = |m: usize| (0..g).map(|i| ((m >> i) & 1) as u8).collect::<Vec<_>>();
    let mut out = Vec::with_capacity(1 << (2 * g));
    for ma in 0..(1usize << g) {
        for mb in 0..(1usize << g) {
            out.push(ThetaCharacteristic::new(bits(ma), bits(mb))?);
        }
    }
    out.sort();
    Ok(out)
}

/// The `2^{g−1}(2^g + 1)` even characteristics.
pub fn even_characteristics(g: usize) -> Result<Vec<ThetaCharacteristic>> {
    Ok(all_characteristics(g)?.into_iter().filter(ThetaCharacteristic::is_even).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationParams {
    /// Half-width of the summation box `‖n‖∞ ≤ R`.
    pub radius: usize,
    /// Largest acceptable tail bound.
    pub target: f64,
}

pub const DEFAULT_THETA_TARGET: f64 = 1e-15;
const MAX_THETA_TERMS: f64 = 5e7;

impl TruncationParams {
    pub fn new(radius: usize, target: f64) -> Result<Self> {
        if radius < 1 {
            return Err(Error::InvalidParameter("truncation radius must be ≥ 1".into()));
        }
        if !(target > 0.0) {
            return Err(Error::InvalidParameter("tail target must be positive".into()));
        }
        Ok(TruncationParams { radius, target })
    }

    /// Smallest radius whose tail bound at `τ` is below `target`.
    pub fn auto(tau: &SiegelPoint, target: f64) -> Result<Self> {
        let lambda = tau.min_imag_eigenvalue();
        let g = tau.g();
        let mut radius = 1;
        while theta_tail_bound(g, lambda, radius) > target {
            radius += 1;
            if ((2 * radius + 1) as f64).powi(g as i32) > MAX_THETA_TERMS {
                return Err(Error::CostGuard(format!(
                    "theta summation at λ_min = {lambda:.3e} needs radius > {radius}"
                )));
            }
        }
        TruncationParams::new(radius, target)
    }
}

/// Bound on `Σ_{‖n‖∞ > R} |exp(πi ᵗ(n+ε′)τ(n+ε′))|`, using that at most
/// `2g(2k+1)^{g−1}` lattice points have sup-norm `k` and each term is at most
/// `exp(−π λ_min (k − ½)²)`.
pub fn theta_tail_bound(g: usize, lambda_min: f64, radius: usize) -> f64 {
    let mut total = 0.0;
    let mut k = radius + 1;
    loop {
        let kf = k as f64;
        let term = 2.0 * g as f64 * (2.0 * kf + 1.0).powi(g as i32 - 1) * (-PI * lambda_min * (kf - 0.5).powi(2)).exp();
        total += term;
        if term <= total * 1e-17 || term == 0.0 || k > radius + 10_000 {
            break;
        }
        k += 1;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// `θ[ε](τ) = Σ_n exp(πi ᵗ(n+ε′)τ(n+ε′) + 2πi ᵗ(n+ε′)ε″)`, summed over
/// `‖n‖∞ ≤ R`.
pub fn theta_constant(eps: &ThetaCharacteristic, tau: &SiegelPoint, params: TruncationParams) -> Result<ThetaValue> {
    let g = tau.g();
    if eps.g() != g {
        return Err(Error::DimensionMismatch { expected: g, got: eps.g() });
    }
    let tail = theta_tail_bound(g, tau.min_imag_eigenvalue(), params.radius);
    if tail > params.target {
        return Err(Error::Truncation {
            estimate: tail,
            target: params.target,
        });
    }
    let r = params.radius as i64;
    if ((2 * r + 1) as f64).powi(g as i32) > MAX_THETA_TERMS {
        return Err(Error::CostGuard(format!("radius {r} at genus {g}")));
    }
    let t = tau.tau();
    let mut n = vec![-r; g];
    let mut v = vec![0.0; g];
    let mut sum = Complex64::new(0.0, 0.0);
    loop {
        for i in 0..g {
            v[i] = n[i] as f64 + 0.5 * eps.a[i] as f64;
        }
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                quad += t[(i, j)] * (v[i] * v[j]);
            }
        }
        let lin: f64 = (0..g).map(|i| v[i] * eps.b[i] as f64).sum();
        sum += (Complex64::new(0.0, PI) * (quad + lin)).exp();

        let mut k = 0;
        while k < g {
            n[k] += 1;
            if n[k] <= r {
                break;
            }
            n[k] = -r;
            k += 1;
        }
        if k == g {
            break;
        }
    }
    Ok(ThetaValue { value: sum, tail_bound: tail })
}

fn even_theta_values(tau: &SiegelPoint, target: f64) -> Result<Vec<ThetaValue>> {
    let params = TruncationParams::auto(tau, target)?;
    even_characteristics(tau.g())?
        .iter()
        .map(|e| theta_constant(e, tau, params))
        .collect()
}

// ---------------------------------------------------------------------------
// χ10 and χ18

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chi10Normalization {
    /// `K` in `∏θ² ≈ K·q1q2·(πz)²`, from finite differences in `z`.
    pub measured: f64,
    /// `log2 |K|` when `K` is a signed power of two to within `1e−6`.
    pub power_of_two: Option<i32>,
    /// The constant applied to the theta product.
    pub c_norm: f64,
}

const CHI10_PROBE_T: f64 = 4.0;

fn theta_product_g2(tau: &SiegelPoint) -> Result<Complex64> {
    Ok(even_theta_values(tau, DEFAULT_THETA_TARGET)?
        .iter()
        .map(|t| t.value * t.value)
        .product())
}

fn probe_point(t: f64, z: f64) -> SiegelPoint {
    let tau = CMat::from_row_slice(2, 2, &[c(0.0, t), c(z, 0.0), c(z, 0.0), c(0.0, t)]);
    SiegelPoint::new(tau).expect("probe point lies in the Siegel space")
}

/// Measures the constant relating `∏_{10 even} θ²` to the development
/// `χ10 = (q1q2 + ⋯)(πz)² + ⋯`. The product is even in `z` and vanishes at
/// `z = 0`, so `P''(0) = lim 2P(h)/h²`; two step sizes are combined by
/// Richardson extrapolation.
pub fn measure_chi10_normalization() -> Result<Chi10Normalization> {
    let t = CHI10_PROBE_T;
    let q = (-2.0 * PI * t).exp();
    let d = |h: f64| -> Result<f64> { Ok(2.0 * theta_product_g2(&probe_point(t, h))?.re / (h * h)) };
    let h = 4e-3;
    let (d1, d2) = (d(h)?, d(h / 2.0)?);
    let second = (4.0 * d2 - d1) / 3.0;
    let measured = second / (2.0 * PI * PI * q * q);
    let exponent = measured.abs().log2().round();
    let snapped = measured.signum() * 2f64.powi(exponent as i32);
    let power_of_two = ((measured - snapped).abs() <= 1e-6 * measured.abs()).then_some(exponent as i32);
    let c_norm = match power_of_two {
        Some(_) => 1.0 / snapped,
        None => 1.0 / measured,
    };
    Ok(Chi10Normalization {
        measured,
        power_of_two,
        c_norm,
    })
}

pub fn chi10_normalization() -> Result<Chi10Normalization> {
    static NORM: OnceLock<std::result::Result<Chi10Normalization, Error>> = OnceLock::new();
    NORM.get_or_init(measure_chi10_normalization).clone()
}

/// `χ10(τ) = c_norm · ∏_{10 even ε} θ[ε](τ)²`.
pub fn chi10(tau: &SiegelPoint) -> Result<Complex64> {
    if tau.g() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: tau.g() });
    }
    Ok(theta_product_g2(tau)? * chi10_normalization()?.c_norm)
}

/// `χ18(τ) = ∏_{36 even ε} θ[ε](τ)`.
pub fn chi18(tau: &SiegelPoint) -> Result<Complex64> {
    if tau.g() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: tau.g() });
    }
    let params = TruncationParams::auto(tau, DEFAULT_THETA_TARGET)?;
    if params.radius > 6 {
        return Err(Error::CostGuard(format!(
            "χ18 needs radius {} > 6 at this point",
            params.radius
        )));
    }
    Ok(even_theta_values(tau, DEFAULT_THETA_TARGET)?.iter().map(|t| t.value).product())
}

/// Relative residual of `f(M·τ)·det(Cτ+D)^{−k} = f(τ)`.
pub fn slash_residual<F>(f: F, weight: i32, m: &nalgebra::DMatrix<f64>, tau: &SiegelPoint) -> Result<f64>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    let moved = moebius_act(m, tau)?;
    let lhs = f(&moved)? * cocycle(m, tau)?.powi(-weight);
    let rhs = f(tau)?;
    Ok((lhs - rhs).norm() / rhs.norm())
}

/// Least-squares exponent `p` in `|χ10(τ_z)| ~ |z|^p` at
/// `τ_z = ((τ1, z), (z, τ2))`.
pub fn chi10_vanishing_order(tau1: Complex64, tau2: Complex64, zs: &[f64]) -> Result<f64> {
    if zs.len() < 2 || zs.iter().any(|z| *z <= 0.0) {
        return Err(Error::InvalidParameter("need at least two positive z values".into()));
    }
    let mut xs = Vec::with_capacity(zs.len());
    let mut ys = Vec::with_capacity(zs.len());
    for &z in zs {
        let tau = SiegelPoint::new(CMat::from_row_slice(2, 2, &[tau1, c(z, 0.0), c(z, 0.0), tau2]))?;
        xs.push(z.ln());
        ys.push(chi10(&tau)?.norm().ln());
    }
    Ok(fit_slope(&xs, &ys))
}

// ---------------------------------------------------------------------------
// Lattices

pub const MAX_LATTICE_RANK: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeGram {
    pub name: String,
    gram: Vec<Vec<i64>>,
}

impl LatticeGram {
    /// Validates a symmetric, positive definite, even Gram matrix.
    pub fn new(name: impl Into<String>, gram: Vec<Vec<i64>>) -> Result<Self> {
        let r = gram.len();
        if r == 0 || r > MAX_LATTICE_RANK {
            return Err(Error::Unsupported(format!("lattice rank {r} outside 1..={MAX_LATTICE_RANK}")));
        }
        let q = QMatrix::from_i64_rows(&gram)?;
        if q != q.transpose() {
            return Err(Error::InvalidParameter("Gram matrix must be symmetric".into()));
        }
        if (0..r).any(|i| gram[i][i] % 2 != 0) {
            return Err(Error::InvalidParameter("Gram matrix must have even diagonal".into()));
        }
        // Sylvester: all leading minors positive.
        for k in 1..=r {
            let minor = QMatrix::from_i64_rows(&gram[..k].iter().map(|row| row[..k].to_vec()).collect::<Vec<_>>())?;
            if !minor.det()?.is_positive() {
                return Err(Error::InvalidParameter("Gram matrix must be positive definite".into()));
            }
        }
        Ok(LatticeGram { name: name.into(), gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn det(&self) -> i64 {
        let d = QMatrix::from_i64_rows(&self.gram).unwrap().det().unwrap();
        d.to_integer().try_into().expect("small determinant")
    }

    pub fn is_unimodular(&self) -> bool {
        self.det() == 1
    }

    /// The `E8` root lattice, Gram matrix = Cartan matrix.
    pub fn e8() -> Self {
        let mut g = vec![vec![0i64; 8]; 8];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (a, b) in [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)] {
            g[a][b] = -1;
            g[b][a] = -1;
        }
        LatticeGram::new("E8", g).expect("E8 Cartan matrix is valid")
    }

    pub fn e8_e8() -> Self {
        let e8 = LatticeGram::e8();
        let mut g = vec![vec![0i64; 16]; 16];
        for i in 0..8 {
            for j in 0..8 {
                g[i][j] = e8.gram[i][j];
                g[i + 8][j + 8] = e8.gram[i][j];
            }
        }
        LatticeGram::new("E8+E8", g).expect("E8+E8 is valid")
    }

    /// `D16⁺ = D16 ∪ (D16 + h)`, `h = (½, …, ½)`. Basis: `e_i − e_{i+1}` for
    /// `i = 2..15`, `e_15 + e_16` and `h` (coordinates doubled below to stay
    /// integral).
    pub fn e16() -> Self {
        let n = 16;
        let mut basis: Vec<Vec<i64>> = Vec::new();
        for i in 1..15 {
            let mut v = vec![0; n];
            v[i] = 2;
            v[i + 1] = -2;
            basis.push(v);
        }
        let mut v = vec![0; n];
        v[14] = 2;
        v[15] = 2;
        basis.push(v);
        basis.push(vec![1; n]);
        let gram = basis
            .iter()
            .map(|x| basis.iter().map(|y| x.iter().zip(y).map(|(p, q)| p * q).sum::<i64>() / 4).collect())
            .collect();
        LatticeGram::new("E16", gram).expect("D16+ basis is valid")
    }
}

type Coords = [i16; MAX_LATTICE_RANK];

/// Lattice vectors of bounded norm.
#[derive(Debug, Clone)]
pub struct ShortVectors {
    /// `counts[n]` = number of vectors of norm `n`.
    pub counts: Vec<u64>,
    /// Stored vectors (basis coordinates), sorted by norm.
    vectors: Vec<Coords>,
    norms: Vec<i64>,
}

impl ShortVectors {
    pub fn stored(&self) -> usize {
        self.vectors.len()
    }

    /// Stored vectors as coordinate vectors with their norms.
    pub fn iter(&self) -> impl Iterator<Item = (&[i16], i64)> + '_ {
        self.vectors.iter().zip(&self.norms).map(|(v, n)| (&v[..], *n))
    }

    fn range_of_norm(&self, lo: i64, hi: i64) -> std::ops::Range<usize> {
        let start = self.norms.partition_point(|&n| n < lo);
        let end = self.norms.partition_point(|&n| n <= hi);
        start..end
    }
}

/// Approximate count of lattice vectors of norm ≤ `bound`, from the volume of
/// the ball.
fn lattice_point_estimate(l: &LatticeGram, bound: i64) -> f64 {
    let r = l.rank() as f64;
    let ln_ball = (r / 2.0) * PI.ln() - ln_gamma(r / 2.0 + 1.0) + (r / 2.0) * (bound as f64).ln();
    (ln_ball - 0.5 * (l.det() as f64).ln()).exp()
}

fn ln_gamma(x: f64) -> f64 {
    // Only used at half-integers, where the recursion terminates exactly.
    if x == 1.0 || x == 2.0 {
        0.0
    } else if x == 0.5 {
        0.5 * PI.ln()
    } else {
        (x - 1.0).ln() + ln_gamma(x - 1.0)
    }
}

const MAX_ENUMERATED_VECTORS: f64 = 1e9;

struct Enumerator<'a> {
    gram: &'a [Vec<i64>],
    qdiag: Vec<f64>,
    qoff: Vec<Vec<f64>>,
    bound: i64,
    store_bound: i64,
    x: Vec<i64>,
    // s[level][k] = Σ_{j > level} G_kj x_j and f[level][k] = Σ_{j > level}
    // q_kj x_j, for k ≤ level
    s: Vec<Vec<i64>>,
    f: Vec<Vec<f64>>,
    counts: Vec<u64>,
    found: Vec<(i64, Coords)>,
}

impl<'a> Enumerator<'a> {
    fn new(gram: &'a [Vec<i64>], qdiag: &[f64], qoff: &[Vec<f64>], bound: i64, store_bound: i64) -> Self {
        let r = gram.len();
        Enumerator {
            gram,
            qdiag: qdiag.to_vec(),
            qoff: qoff.to_vec(),
            bound,
            store_bound,
            x: vec![0; r],
            s: vec![vec![0; r]; r],
            f: vec![vec![0.0; r]; r],
            counts: vec![0; bound as usize + 1],
            found: Vec::new(),
        }
    }

    /// Records `±x` (or `0` once).
    fn emit(&mut self, norm: i64) {
        let weight = if norm == 0 { 1 } else { 2 };
        self.counts[norm as usize] += weight;
        if norm <= self.store_bound {
            let mut c = [0i16; MAX_LATTICE_RANK];
            for (dst, &src) in c.iter_mut().zip(&self.x) {
                *dst = src as i16;
            }
            self.found.push((norm, c));
            if norm > 0 {
                self.found.push((norm, c.map(|v| -v)));
            }
        }
    }

    fn range(&self, i: usize, rem: f64, nonneg: bool) -> (i64, i64) {
        let center = -self.f[i][i];
        let width = (rem.max(0.0) / self.qdiag[i]).sqrt() + 1e-7;
        let lo = (center - width).ceil() as i64;
        (if nonneg { lo.max(0) } else { lo }, (center + width).floor() as i64)
    }

    /// Enumerates coordinates `i, i−1, …, 0`. While every coordinate above is
    /// zero, `x_i` is restricted to be non-negative, so that only one of `±x`
    /// is visited.
    fn descend(&mut self, i: usize, rem: f64, partial: i64, zero_above: bool) {
        let (lo, hi) = self.range(i, rem, zero_above);
        let center = -self.f[i][i];
        let gii = self.gram[i][i];
        let si = self.s[i][i];
        if i == 0 {
            for xi in lo..=hi {
                let norm = partial + gii * xi * xi + 2 * xi * si;
                if norm <= self.bound {
                    self.x[0] = xi;
                    self.emit(norm);
                }
            }
            self.x[0] = 0;
            return;
        }
        for xi in lo..=hi {
            let d = xi as f64 - center;
            let rem_next = rem - self.qdiag[i] * d * d;
            if rem_next < -1e-6 {
                continue;
            }
            self.x[i] = xi;
            let next_partial = partial + gii * xi * xi + 2 * xi * si;
            let xf = xi as f64;
            for k in 0..i {
                self.s[i - 1][k] = self.s[i][k] + self.gram[k][i] * xi;
                self.f[i - 1][k] = self.f[i][k] + self.qoff[k][i] * xf;
            }
            self.descend(i - 1, rem_next, next_partial, zero_above && xi == 0);
        }
        self.x[i] = 0;
    }
}

/// All lattice vectors of norm ≤ `bound`, counted by norm; those of norm ≤
/// `store_bound` are also returned. The outer coordinate is split across
/// workers and the results merged in a fixed order.
pub fn short_vectors(l: &LatticeGram, bound: i64, store_bound: i64) -> Result<ShortVectors> {
    if bound < 0 {
        return Err(Error::InvalidParameter("norm bound must be non-negative".into()));
    }
    let est = lattice_point_estimate(l, bound);
    if est > MAX_ENUMERATED_VECTORS {
        return Err(Error::CostGuard(format!(
            "about {est:.2e} vectors of norm ≤ {bound} in {}",
            l.name
        )));
    }
    let r = l.rank();
    let g = nalgebra::DMatrix::from_fn(r, r, |i, j| l.gram[i][j] as f64);
    let chol = g.cholesky().ok_or(Error::Singular)?;
    // G = RᵀR with R upper triangular.
    let rm = chol.l().transpose();
    let qdiag: Vec<f64> = (0..r).map(|i| rm[(i, i)] * rm[(i, i)]).collect();
    let qoff: Vec<Vec<f64>> = (0..r).map(|i| (0..r).map(|j| rm[(i, j)] / rm[(i, i)]).collect()).collect();

    let top = r - 1;
    let rem = bound as f64 + 1e-6 * (1.0 + bound as f64);
    let (lo, hi) = Enumerator::new(&l.gram, &qdiag, &qoff, bound, store_bound).range(top, rem, true);
    let parts: Vec<Enumerator> = (lo..=hi)
        .into_par_iter()
        .map(|xt| {
            let mut e = Enumerator::new(&l.gram, &qdiag, &qoff, bound, store_bound);
            let norm = l.gram[top][top] * xt * xt;
            if top == 0 {
                if norm <= bound {
                    e.x[0] = xt;
                    e.emit(norm);
                }
                return e;
            }
            let d = xt as f64;
            let rem_next = rem - qdiag[top] * d * d;
            if rem_next < -1e-6 {
                return e;
            }
            e.x[top] = xt;
            for k in 0..top {
                e.s[top - 1][k] = l.gram[k][top] * xt;
                e.f[top - 1][k] = qoff[k][top] * d;
            }
            e.descend(top - 1, rem_next, norm, xt == 0);
            e
        })
        .collect();

    let mut counts = vec![0u64; bound as usize + 1];
    let mut found = Vec::new();
    for p in parts {
        for (c, v) in counts.iter_mut().zip(&p.counts) {
            *c += v;
        }
        found.extend(p.found);
    }
    found.sort();
    let (norms, vectors) = found.into_iter().unzip();
    Ok(ShortVectors { counts, vectors, norms })
}

fn gram_times(l: &LatticeGram, x: &Coords) -> Coords {
    let mut out = [0i16; MAX_LATTICE_RANK];
    for i in 0..l.rank() {
        out[i] = (0..l.rank()).map(|j| l.gram[i][j] * x[j] as i64).sum::<i64>() as i16;
    }
    out
}

#[inline]
fn dot(a: &Coords, b: &Coords) -> i32 {
    a.iter().zip(b).map(|(x, y)| i32::from(*x) * i32::from(*y)).sum()
}

fn first_nonzero_positive(x: &Coords) -> bool {
    x.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

const MAX_TUPLE_WORK: f64 = 6e9;

fn check_lattice_theta_args(l: &LatticeGram, genus: usize, trace_bound: u64) -> Result<()> {
    if genus == 0 || trace_bound == 0 {
        return Err(Error::InvalidParameter("genus and trace bound must be positive".into()));
    }
    if trace_bound > 8 {
        return Err(Error::CostGuard(format!("trace bound {trace_bound} > 8")));
    }
    let max_genus = if l.rank() > 8 { 2 } else { 3 };
    if genus > max_genus {
        return Err(Error::CostGuard(format!(
            "genus {genus} for the rank-{} lattice {} (limit {max_genus})",
            l.rank(),
            l.name
        )));
    }
    Ok(())
}

/// Exact Fourier coefficients `c(A) = #{(x_1, …, x_g) : (x_i·x_j) = 2A}` of
/// the genus-`g` theta series of `l`, for `Tr(A) ≤ trace_bound`.
///
/// Genus 2 tallies only GL(2, Z)-reduced Gram matrices and fills the rest of
/// the window by reduction; other genera count tuples directly.
pub fn lattice_theta_coefficients(l: &LatticeGram, genus: usize, trace_bound: u64) -> Result<FourierExpansion> {
    check_lattice_theta_args(l, genus, trace_bound)?;
    match genus {
        1 => genus_one(l, trace_bound),
        2 => genus_two_reduced(l, trace_bound),
        _ => lattice_theta_direct(l, genus, trace_bound),
    }
}

fn new_expansion(l: &LatticeGram, genus: usize, trace_bound: u64) -> Result<FourierExpansion> {
    if !l.rank().is_multiple_of(2) {
        return Err(Error::Unsupported("odd-rank lattice has half-integral weight".into()));
    }
    FourierExpansion::new(genus, 1, (l.rank() / 2) as u64, trace_bound)
}

fn genus_one(l: &LatticeGram, trace_bound: u64) -> Result<FourierExpansion> {
    let bound = 2 * trace_bound as i64;
    let sv = short_vectors(l, bound, -1)?;
    let mut f = new_expansion(l, 1, trace_bound)?;
    for (n, &count) in sv.counts.iter().enumerate() {
        if count > 0 {
            f.insert(HalfIntegralMatrix::from_two_a(&[vec![n as i64]])?, exact_int(count as i64))?;
        }
    }
    Ok(f)
}

/// Gauss reduction of the binary form `[[p, b], [b, q]]` under GL(2, Z):
/// returns `(p′, |b′|, q′)` with `2|b′| ≤ p′ ≤ q′`.
pub fn reduce_binary(mut p: i64, mut b: i64, mut q: i64) -> (i64, i64, i64) {
    loop {
        if p > q {
            std::mem::swap(&mut p, &mut q);
        }
        if p == 0 {
            return (0, 0, q);
        }
        if 2 * b.abs() > p {
            let k = (2 * b + p).div_euclid(2 * p);
            q = q - 2 * k * b + k * k * p;
            b -= k * p;
            continue;
        }
        if p <= q {
            return (p, b.abs(), q);
        }
    }
}

fn genus_two_reduced(l: &LatticeGram, trace_bound: u64) -> Result<FourierExpansion> {
    let t2 = 2 * trace_bound as i64;
    let sv = short_vectors(l, t2, t2 - 2)?;
    let n = |k: i64| sv.counts.get(k as usize).copied().unwrap_or(0) as f64;
    let work: f64 = (2..=trace_bound as i64)
        .map(|n1| n(n1) / 2.0 * (n1..=t2 - n1).map(n).sum::<f64>())
        .sum();
    if work > MAX_TUPLE_WORK {
        return Err(Error::CostGuard(format!("about {work:.2e} vector pairs")));
    }
    let gx: Vec<Coords> = sv.vectors.iter().map(|x| gram_times(l, x)).collect();

    // Pairs (x1, x2) with n1 = |x1|² ≤ n2 = |x2|² and 2|x1·x2| ≤ n1. Only
    // x1 with positive leading coordinate is visited; (−x1, x2) contributes
    // the opposite inner product.
    let x1_range = sv.range_of_norm(2, trace_bound as i64);
    let side = t2 as usize + 1;
    let tallies: Vec<Vec<u64>> = x1_range
        .into_par_iter()
        .filter(|&i| first_nonzero_positive(&sv.vectors[i]))
        .fold(
            || vec![0u64; side * side * side],
            |mut acc, i| {
                let x1 = &sv.vectors[i];
                let n1 = sv.norms[i];
                let mut local = vec![0u64; side * side];
                for j in sv.range_of_norm(n1, t2 - n1) {
                    let b = dot(x1, &gx[j]).unsigned_abs() as usize;
                    if 2 * b <= n1 as usize {
                        local[sv.norms[j] as usize * side + b] += 1;
                    }
                }
                let base = n1 as usize * side * side;
                for (dst, v) in acc[base..base + side * side].iter_mut().zip(&local) {
                    *dst += v;
                }
                acc
            },
        )
        .collect();
    let mut half: HashMap<(i64, i64, i64), u64> = HashMap::new();
    for t in tallies {
        for (idx, v) in t.into_iter().enumerate().filter(|(_, v)| *v > 0) {
            let (n1, rest) = (idx / (side * side), idx % (side * side));
            let key = (n1 as i64, (rest % side) as i64, (rest / side) as i64);
            *half.entry(key).or_insert(0) += v;
        }
    }
    let reduced = |key: (i64, i64, i64)| -> u64 {
        match key {
            (0, _, n2) => sv.counts[n2 as usize],
            (_, 0, _) => 2 * half.get(&key).copied().unwrap_or(0),
            _ => half.get(&key).copied().unwrap_or(0),
        }
    };

    let mut f = new_expansion(l, 2, trace_bound)?;
    for p in (0..=t2).step_by(2) {
        for q in (0..=t2 - p).step_by(2) {
            let bmax = ((p * q) as f64).sqrt() as i64 + 1;
            for b in -bmax..=bmax {
                if b * b > p * q {
                    continue;
                }
                let count = reduced(reduce_binary(p, b, q));
                if count > 0 {
                    let a = HalfIntegralMatrix::from_two_a(&[vec![p, b], vec![b, q]])?;
                    f.insert(a, exact_int(count as i64))?;
                }
            }
        }
    }
    Ok(f)
}

/// Direct tuple enumeration, for any genus within the cost guard.
pub fn lattice_theta_direct(l: &LatticeGram, genus: usize, trace_bound: u64) -> Result<FourierExpansion> {
    check_lattice_theta_args(l, genus, trace_bound)?;
    let t2 = 2 * trace_bound as i64;
    let sv = short_vectors(l, t2, t2)?;

    // Number of tuples with Σ|x_i|² ≤ 2T, by dynamic programming on norms.
    let mut ways = vec![0f64; t2 as usize + 1];
    ways[0] = 1.0;
    for _ in 0..genus {
        let mut next = vec![0f64; t2 as usize + 1];
        for (s, w) in ways.iter().enumerate() {
            for (n, c) in sv.counts.iter().enumerate() {
                if s + n <= t2 as usize {
                    next[s + n] += w * *c as f64;
                }
            }
        }
        ways = next;
    }
    let work: f64 = ways.iter().sum();
    if work > MAX_TUPLE_WORK {
        return Err(Error::CostGuard(format!("about {work:.2e} vector tuples")));
    }

    let gx: Vec<Coords> = sv.vectors.iter().map(|x| gram_times(l, x)).collect();
    let upper_len = genus * (genus + 1) / 2;

    fn rec(
        sv: &ShortVectors,
        gx: &[Coords],
        genus: usize,
        chosen: &mut Vec<usize>,
        budget: i64,
        upper: &mut Vec<i64>,
        acc: &mut HashMap<Vec<i64>, u64>,
    ) {
        let k = chosen.len();
        if k == genus {
            *acc.entry(upper.clone()).or_insert(0) += 1;
            return;
        }
        for j in sv.range_of_norm(0, budget) {
            // row i of the triangle holds (i, i..genus); entry (i, k) sits at
            // offset start(i) + k − i
            for (i, &ci) in chosen.iter().enumerate() {
                let pos = i * genus - i * i.saturating_sub(1) / 2 + (k - i);
                upper[pos] = i64::from(dot(&sv.vectors[ci], &gx[j]));
            }
            let pos = k * genus - k * k.saturating_sub(1) / 2;
            upper[pos] = sv.norms[j];
            chosen.push(j);
            rec(sv, gx, genus, chosen, budget - sv.norms[j], upper, acc);
            chosen.pop();
        }
    }

    let first = sv.range_of_norm(0, t2);
    let tallies: Vec<HashMap<Vec<i64>, u64>> = first
        .into_par_iter()
        .fold(HashMap::new, |mut acc, j| {
            let mut upper = vec![0i64; upper_len];
            upper[0] = sv.norms[j];
            let mut chosen = vec![j];
            rec(&sv, &gx, genus, &mut chosen, t2 - sv.norms[j], &mut upper, &mut acc);
            acc
        })
        .collect();
    let mut total: HashMap<Vec<i64>, u64> = HashMap::new();
    for t in tallies {
        for (k, v) in t {
            *total.entry(k).or_insert(0) += v;
        }
    }
    let mut f = new_expansion(l, genus, trace_bound)?;
    for (upper, count) in total {
        let mut m = vec![vec![0i64; genus]; genus];
        let mut idx = 0;
        for i in 0..genus {
            for j in i..genus {
                m[i][j] = upper[idx];
                m[j][i] = upper[idx];
                idx += 1;
            }
        }
        f.insert(HalfIntegralMatrix::from_two_a(&m)?, exact_int(count as i64))?;
    }
    Ok(f)
}

/// `θ_{E8⊕E8} − θ_{E16}` at genus ≤ 2.
pub fn schottky_chi8_coefficients(genus: usize, trace_bound: u64) -> Result<FourierExpansion> {
    if genus > 2 {
        return Err(Error::Unsupported(format!(
            "Schottky coefficients at genus {genus}; only genus ≤ 2 is computed"
        )));
    }
    let a = lattice_theta_coefficients(&LatticeGram::e8_e8(), genus, trace_bound)?;
    let b = lattice_theta_coefficients(&LatticeGram::e16(), genus, trace_bound)?;
    a.difference(&b)
}
