//! Fourier expansions of Siegel modular forms.
//!
//! A form of level `n` is stored as a finite map `A ↦ c(A)` over half-integral
//! positive semidefinite `A` (`2A ∈ Sym_g(Z)`), representing
//! `Σ c(A) exp(2πi Tr(Aτ) / n)`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, QMatrix};
use crate::numeric::fit_slope;
use crate::siegelspace::SiegelPoint;
use crate::symplectic::{congruence_membership, CongruenceLevel, SymplecticMatrix};

pub type ExactComplex = Complex<BigRational>;

pub fn exact_int(n: i64) -> ExactComplex {
    Complex::new(BigRational::from_integer(n.into()), BigRational::zero())
}

fn exact_to_f64(z: &ExactComplex) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// A half-integral symmetric matrix `A`, stored as the upper triangle of the
/// integral matrix `2A` in row-major order.
///
/// The derived ordering is the canonical key order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfIntegralMatrix {
    upper: Vec<i64>,
    g: usize,
}

impl HalfIntegralMatrix {
    /// Validates symmetry and positive semidefiniteness of `2A`.
    pub fn from_two_a(two_a: &[Vec<i64>]) -> Result<Self> {
        let g = two_a.len();
        if let Some(row) = two_a.iter().find(|r| r.len() != g) {
            return Err(Error::DimensionMismatch {
                expected: g,
                got: row.len(),
            });
        }
        for i in 0..g {
            for j in 0..i {
                if two_a[i][j] != two_a[j][i] {
                    return Err(Error::InvalidParameter("2A must be symmetric".into()));
                }
            }
        }
        let upper = (0..g).flat_map(|i| (i..g).map(move |j| (i, j))).map(|(i, j)| two_a[i][j]).collect();
        let m = HalfIntegralMatrix { upper, g };
        if !m.is_positive_semidefinite() {
            return Err(Error::InvalidParameter(format!("{:?} is not positive semidefinite", m.two_a())));
        }
        Ok(m)
    }

    /// The genus-0 (empty) matrix.
    pub fn empty() -> Self {
        HalfIntegralMatrix { upper: Vec::new(), g: 0 }
    }

    pub fn zero(g: usize) -> Self {
        HalfIntegralMatrix {
            upper: vec![0; g * (g + 1) / 2],
            g,
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    /// Entry `(2A)_{ij}`.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // rows 0..i of the triangle have lengths g, g-1, ...
        let start = i * self.g - i * i.saturating_sub(1) / 2;
        self.upper[start + (j - i)]
    }

    pub fn two_a(&self) -> Vec<Vec<i64>> {
        (0..self.g).map(|i| (0..self.g).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// `Tr(2A)`.
    pub fn trace_two_a(&self) -> i64 {
        (0..self.g).map(|i| self.entry(i, i)).sum()
    }

    /// `det(2A)`, exactly.
    pub fn det_two_a(&self) -> BigInt {
        if self.g == 0 {
            return BigInt::one();
        }
        let q = QMatrix::from_i64_rows(&self.two_a()).expect("square");
        q.det().expect("square").to_integer()
    }

    pub fn is_singular(&self) -> bool {
        self.g > 0 && self.det_two_a().is_zero()
    }

    /// Exact semidefiniteness by symmetric elimination over `Q`. A zero pivot
    /// forces its whole row to vanish; the row then lies in the kernel and is
    /// dropped.
    pub fn is_positive_semidefinite(&self) -> bool {
        let mut a = QMatrix::from_i64_rows(&self.two_a()).expect("square");
        let g = self.g;
        let mut active: Vec<usize> = (0..g).collect();
        while let Some(&k) = active.first() {
            active.remove(0);
            let pivot = a[(k, k)].clone();
            if pivot.is_negative() {
                return false;
            }
            if pivot.is_zero() {
                if active.iter().any(|&j| !a[(k, j)].is_zero()) {
                    return false;
                }
                continue;
            }
            for &i in &active {
                let f = &a[(i, k)] / &pivot;
                for &j in &active {
                    let t = &f * &a[(k, j)];
                    a[(i, j)] -= t;
                }
            }
        }
        true
    }

    /// `ᵗV A V`.
    pub fn transform(&self, v: &[Vec<i64>]) -> Self {
        let g = self.g;
        let a = self.two_a();
        let mut out = vec![vec![0i64; g]; g];
        for i in 0..g {
            for j in 0..g {
                let mut s = 0i64;
                for k in 0..g {
                    for l in 0..g {
                        s += v[k][i] * a[k][l] * v[l][j];
                    }
                }
                out[i][j] = s;
            }
        }
        let upper = (0..g).flat_map(|i| (i..g).map(move |j| (i, j))).map(|(i, j)| out[i][j]).collect();
        HalfIntegralMatrix { upper, g }
    }

    /// `diag(A, 0)`.
    pub fn pad_zero(&self) -> Self {
        let g = self.g + 1;
        let upper = (0..g)
            .flat_map(|i| (i..g).map(move |j| (i, j)))
            .map(|(i, j)| if j < self.g { self.entry(i, j) } else { 0 })
            .collect();
        HalfIntegralMatrix { upper, g }
    }

    /// `A′` if `A = diag(A′, 0)`.
    pub fn strip_last(&self) -> Option<Self> {
        let g = self.g;
        if g == 0 || (0..g).any(|i| self.entry(i, g - 1) != 0) {
            return None;
        }
        let h = g - 1;
        let upper = (0..h).flat_map(|i| (i..h).map(move |j| (i, j))).map(|(i, j)| self.entry(i, j)).collect();
        Some(HalfIntegralMatrix { upper, g: h })
    }

    /// `Tr(2A · M)` for an integral matrix `M`.
    pub fn trace_with(&self, m: &[Vec<i64>]) -> i64 {
        let g = self.g;
        (0..g).map(|i| (0..g).map(|j| self.entry(i, j) * m[j][i]).sum::<i64>()).sum()
    }
}

/// Coefficient symmetry context: `M(V, U) = (V⁻¹, U; 0, ᵗV) ∈ Γ_g(n)`.
#[derive(Debug, Clone)]
pub struct SlashContext {
    v: Vec<Vec<i64>>,
    u: Vec<Vec<i64>>,
    det_v: i64,
    level: u64,
}

impl SlashContext {
    pub fn new(v: Vec<Vec<i64>>, u: Vec<Vec<i64>>, level: u64) -> Result<Self> {
        let vq = QMatrix::from_i64_rows(&v)?;
        let uq = QMatrix::from_i64_rows(&u)?;
        let det_v = vq.det()?;
        if det_v.abs() != BigRational::one() {
            return Err(Error::InvalidParameter("V must lie in GL(g, Z)".into()));
        }
        let m = SymplecticMatrix::parabolic(&vq, &uq)?;
        if !congruence_membership(&m, CongruenceLevel::new(level)?)? {
            return Err(Error::InvalidParameter(format!("M(V, U) is not in Γ_g({level})")));
        }
        Ok(SlashContext {
            det_v: det_v.to_integer().to_i64().expect("±1"),
            v,
            u,
            level,
        })
    }

    pub fn gl(v: Vec<Vec<i64>>) -> Result<Self> {
        let g = v.len();
        Self::new(v, vec![vec![0; g]; g], 1)
    }

    pub fn g(&self) -> usize {
        self.v.len()
    }

    fn vu(&self) -> Vec<Vec<i64>> {
        let g = self.g();
        (0..g)
            .map(|i| (0..g).map(|j| (0..g).map(|k| self.v[i][k] * self.u[k][j]).sum()).collect())
            .collect()
    }

    fn v_inverse(&self) -> Vec<Vec<i64>> {
        let inv = QMatrix::from_i64_rows(&self.v).unwrap().inverse().unwrap();
        inv.to_i64().expect("GL(g, Z) inverse is integral")
    }
}

/// A finite set of `GL(g, Z)` elements used for symmetry tests: the identity,
/// `−I`, sign flips, permutations of adjacent coordinates and elementary
/// transvections.
pub fn gl_test_set(g: usize) -> Vec<Vec<Vec<i64>>> {
    let id = |g: usize| -> Vec<Vec<i64>> { (0..g).map(|i| (0..g).map(|j| i64::from(i == j)).collect()).collect() };
    let mut out = vec![id(g)];
    let mut neg = id(g);
    neg.iter_mut().enumerate().for_each(|(i, r)| r[i] = -1);
    out.push(neg);
    for i in 0..g {
        let mut m = id(g);
        m[i][i] = -1;
        out.push(m);
    }
    for i in 0..g.saturating_sub(1) {
        let mut m = id(g);
        m.swap(i, i + 1);
        out.push(m);
    }
    for i in 0..g {
        for j in 0..g {
            if i != j {
                for s in [1, -1] {
                    let mut m = id(g);
                    m[i][j] = s;
                    out.push(m);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// A truncated Fourier expansion. Keys absent from `coeffs` carry coefficient
/// zero; the support is complete for `Tr(A) ≤ trace_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierExpansion {
    pub genus: usize,
    pub level: u64,
    pub weight: u64,
    pub trace_bound: u64,
    coeffs: BTreeMap<HalfIntegralMatrix, ExactComplex>,
}

impl FourierExpansion {
    pub fn new(genus: usize, level: u64, weight: u64, trace_bound: u64) -> Result<Self> {
        CongruenceLevel::new(level)?;
        Ok(FourierExpansion {
            genus,
            level,
            weight,
            trace_bound,
            coeffs: BTreeMap::new(),
        })
    }

    /// `{0 ↦ c}`.
    pub fn constant(genus: usize, weight: u64, value: ExactComplex) -> Self {
        let mut f = FourierExpansion::new(genus, 1, weight, 0).expect("level 1");
        f.insert(HalfIntegralMatrix::zero(genus), value).expect("zero key fits");
        f
    }

    pub fn insert(&mut self, a: HalfIntegralMatrix, c: ExactComplex) -> Result<()> {
        if a.g() != self.genus {
            return Err(Error::DimensionMismatch {
                expected: self.genus,
                got: a.g(),
            });
        }
        if c.is_zero() {
            self.coeffs.remove(&a);
        } else {
            self.coeffs.insert(a, c);
        }
        Ok(())
    }

    pub fn coefficient(&self, a: &HalfIntegralMatrix) -> ExactComplex {
        self.coeffs.get(a).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<HalfIntegralMatrix, ExactComplex> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Whether `A` lies inside the window where the support is complete.
    pub fn in_window(&self, a: &HalfIntegralMatrix) -> bool {
        a.trace_two_a() <= 2 * self.trace_bound as i64
    }

    /// Coefficientwise `self − other` on the common window.
    pub fn difference(&self, other: &FourierExpansion) -> Result<FourierExpansion> {
        if (self.genus, self.level, self.weight) != (other.genus, other.level, other.weight) {
            return Err(Error::InvalidParameter("expansions have different genus, level or weight".into()));
        }
        let bound = self.trace_bound.min(other.trace_bound);
        let mut out = FourierExpansion::new(self.genus, self.level, self.weight, bound)?;
        let keys: BTreeSet<_> = self.coeffs.keys().chain(other.coeffs.keys()).cloned().collect();
        for a in keys {
            if out.in_window(&a) {
                out.insert(a.clone(), self.coefficient(&a) - other.coefficient(&a))?;
            }
        }
        Ok(out)
    }

    /// Restriction to `Tr(A) ≤ bound`.
    pub fn truncate(&self, bound: u64) -> FourierExpansion {
        let mut out = self.clone();
        out.trace_bound = bound.min(self.trace_bound);
        let b = out.trace_bound as i64;
        out.coeffs.retain(|a, _| a.trace_two_a() <= 2 * b);
        out
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Serialize, Deserialize)]
struct CoeffJson {
    #[serde(rename = "twoA")]
    two_a: Vec<Vec<i64>>,
    re: String,
    im: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExpansionJson {
    genus: usize,
    level: u64,
    weight: u64,
    trace_bound: u64,
    coeffs: Vec<CoeffJson>,
}

impl FourierExpansion {
    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = ExpansionJson {
            genus: self.genus,
            level: self.level,
            weight: self.weight,
            trace_bound: self.trace_bound,
            coeffs: self
                .coeffs
                .iter()
                .map(|(a, c)| CoeffJson {
                    two_a: a.two_a(),
                    re: format_rational(&c.re),
                    im: format_rational(&c.im),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("plain data serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ExpansionJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut f = FourierExpansion::new(doc.genus, doc.level, doc.weight, doc.trace_bound)?;
        for c in doc.coeffs {
            let a = if doc.genus == 0 {
                HalfIntegralMatrix::empty()
            } else {
                HalfIntegralMatrix::from_two_a(&c.two_a)?
            };
            let value = Complex::new(parse_rational(&c.re)?, parse_rational(&c.im)?);
            f.insert(a, value)?;
        }
        Ok(f)
    }
}

// ---------------------------------------------------------------------------
// Operations

#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub value: Complex64,
    /// Largest term magnitude among keys of maximal trace; a proxy for the
    /// truncation tail.
    pub last_shell: f64,
}

/// `Σ c(A) exp(2πi Tr(Aτ) / n)` over the stored support.
pub fn evaluate(f: &FourierExpansion, tau: &SiegelPoint) -> Result<Complex64> {
    Ok(evaluate_with_tail(f, tau)?.value)
}

pub fn evaluate_with_tail(f: &FourierExpansion, tau: &SiegelPoint) -> Result<Evaluation> {
    if f.genus != tau.g() {
        return Err(Error::DimensionMismatch {
            expected: f.genus,
            got: tau.g(),
        });
    }
    let t = tau.tau();
    let n = f.level as f64;
    let max_trace = f.coeffs.keys().map(HalfIntegralMatrix::trace_two_a).max().unwrap_or(0);
    let mut value = Complex64::new(0.0, 0.0);
    let mut last_shell: f64 = 0.0;
    for (a, c) in &f.coeffs {
        // Tr(Aτ) = ½ Σ_ij (2A)_ij τ_ji
        let mut tr = Complex64::new(0.0, 0.0);
        for i in 0..f.genus {
            for j in 0..f.genus {
                tr += t[(j, i)] * (a.entry(i, j) as f64);
            }
        }
        let phase = (Complex64::new(0.0, PI) * tr / n).exp();
        let term = exact_to_f64(c) * phase;
        if a.trace_two_a() == max_trace {
            last_shell = last_shell.max(term.norm());
        }
        value += term;
    }
    Ok(Evaluation { value, last_shell })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryViolation {
    #[serde(rename = "twoA")]
    pub two_a: Vec<Vec<i64>>,
    pub residual: f64,
}

/// Checks `c(ᵗVAV) = det(V)^k exp(−2πi Tr(AVU)/n) c(A)` exactly, on every `A`
/// for which both sides lie in the truncation window.
pub fn symmetry_check(f: &FourierExpansion, ctx: &SlashContext) -> Result<Vec<SymmetryViolation>> {
    if ctx.g() != f.genus {
        return Err(Error::DimensionMismatch {
            expected: f.genus,
            got: ctx.g(),
        });
    }
    if ctx.level != f.level {
        return Err(Error::InvalidParameter("context level differs from expansion level".into()));
    }
    let v_inv = ctx.v_inverse();
    let vu = ctx.vu();
    let n = f.level as i64;
    let sign_det = if f.weight.is_multiple_of(2) { 1 } else { ctx.det_v };

    let mut candidates: BTreeSet<HalfIntegralMatrix> = f.coeffs.keys().cloned().collect();
    for b in f.coeffs.keys() {
        candidates.insert(b.transform(&v_inv));
    }
    let mut violations = Vec::new();
    for a in candidates {
        let image = a.transform(&ctx.v);
        if !f.in_window(&a) || !f.in_window(&image) {
            continue;
        }
        // Tr(2A·VU) = n·m with m integral, so the phase is (−1)^m.
        let t = a.trace_with(&vu);
        if t % n != 0 {
            return Err(Error::InvalidParameter("VU is not divisible by the level".into()));
        }
        let sign = if (t / n).rem_euclid(2) == 0 { 1 } else { -1 };
        let expected = f.coefficient(&a) * BigRational::from_integer((sign * sign_det).into());
        let actual = f.coefficient(&image);
        if expected != actual {
            violations.push(SymmetryViolation {
                two_a: a.two_a(),
                residual: exact_to_f64(&(actual - expected)).norm(),
            });
        }
    }
    Ok(violations)
}

/// The Siegel operator: `c′(A′) = c(diag(A′, 0))`.
pub fn siegel_phi(f: &FourierExpansion) -> Result<FourierExpansion> {
    if f.genus == 0 {
        return Err(Error::InvalidParameter("Φ is undefined on genus-0 expansions".into()));
    }
    let mut out = FourierExpansion::new(f.genus - 1, f.level, f.weight, f.trace_bound)?;
    for (a, c) in &f.coeffs {
        if let Some(stripped) = a.strip_last() {
            out.insert(stripped, c.clone())?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CuspTest {
    pub is_cusp: bool,
    /// A singular index with nonzero coefficient; nonzero indices are
    /// preferred over the constant term.
    #[serde(rename = "witness_twoA")]
    pub witness: Option<Vec<Vec<i64>>>,
    pub witness_coefficient: Option<String>,
    pub violations: usize,
    pub checked_trace_bound: u64,
}

/// Level-one cusp test: every singular `A` in the support has `c(A) = 0`.
pub fn is_cusp_level1(f: &FourierExpansion) -> Result<CuspTest> {
    if f.level != 1 {
        return Err(Error::Unsupported(format!(
            "cusp test for level {} needs all Γ_g-translates; only level 1 is supported",
            f.level
        )));
    }
    let bad: Vec<_> = f.coeffs.iter().filter(|(a, _)| a.is_singular() || a.g() == 0).collect();
    let witness = bad
        .iter()
        .find(|(a, _)| a.trace_two_a() > 0)
        .or_else(|| bad.first())
        .map(|(a, c)| (a.two_a(), c));
    Ok(CuspTest {
        is_cusp: bad.is_empty(),
        witness_coefficient: witness.as_ref().map(|(_, c)| format_rational(&c.re)),
        witness: witness.map(|(a, _)| a),
        violations: bad.len(),
        checked_trace_bound: f.trace_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DecayExpectation {
    /// Expect `|f| = O(exp(−π t / 2))`.
    Cusp,
    /// Expect `f → Φ(f)(τ′)`, with this limit value.
    NonCusp { limit_re: f64, limit_im: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub t_grid: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Least-squares slope of `log|f|` against `t`; `None` when `f` vanishes
    /// on the grid.
    pub slope: Option<f64>,
    pub limit_relative_error: Option<f64>,
    pub passed: bool,
}

/// The slope bound for cusp forms.
pub const CUSP_DECAY_SLOPE: f64 = -PI / 2.0;

/// Probes `f` on `τ_t = ((τ′, w), (ᵗw, it))` for `t` in the grid.
///
/// `w` defaults to zero. Forms that vanish on the reducible locus need a
/// nonzero `w` to see their decay rate.
pub fn decay_check<F>(
    evaluator: F,
    tau_prime: &SiegelPoint,
    offdiag: Option<&[Complex64]>,
    t_grid: &[f64],
    expectation: DecayExpectation,
) -> Result<DecayReport>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    if t_grid.len() < 4 {
        return Err(Error::InvalidParameter("decay grid needs at least 4 points".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("decay grid must be increasing".into()));
    }
    let h = tau_prime.g();
    let g = h + 1;
    let zero = vec![Complex64::new(0.0, 0.0); h];
    let w = offdiag.unwrap_or(&zero);
    if w.len() != h {
        return Err(Error::DimensionMismatch { expected: h, got: w.len() });
    }
    let mut magnitudes = Vec::with_capacity(t_grid.len());
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut tau = crate::numeric::CMat::zeros(g, g);
        tau.view_mut((0, 0), (h, h)).copy_from(tau_prime.tau());
        for i in 0..h {
            tau[(i, h)] = w[i];
            tau[(h, i)] = w[i];
        }
        tau[(h, h)] = Complex64::new(0.0, t);
        let point = SiegelPoint::new(tau)?;
        let v = evaluator(&point)?;
        magnitudes.push(v.norm());
        values.push(v);
    }
    let slope = if magnitudes.iter().all(|m| *m > 0.0) {
        let ys: Vec<f64> = magnitudes.iter().map(|m| m.ln()).collect();
        Some(fit_slope(t_grid, &ys))
    } else {
        None
    };
    let (limit_relative_error, passed) = match expectation {
        DecayExpectation::Cusp => {
            let ok = match slope {
                Some(s) => s <= CUSP_DECAY_SLOPE,
                None => magnitudes.iter().all(|m| *m == 0.0),
            };
            (None, ok)
        }
        DecayExpectation::NonCusp { limit_re, limit_im } => {
            let limit = Complex64::new(limit_re, limit_im);
            let last = *values.last().expect("non-empty grid");
            let err = (last - limit).norm() / limit.norm();
            (Some(err), limit.norm() > 0.0 && magnitudes.iter().all(|m| *m > 0.5 * limit.norm()))
        }
    };
    Ok(DecayReport {
        t_grid: t_grid.to_vec(),
        magnitudes,
        slope,
        limit_relative_error,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;

    fn key(rows: &[&[i64]]) -> HalfIntegralMatrix {
        HalfIntegralMatrix::from_two_a(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn entries_round_trip() {
        let a = key(&[&[2, 1, 0], &[1, 4, -1], &[0, -1, 6]]);
        assert_eq!(a.two_a(), vec![vec![2, 1, 0], vec![1, 4, -1], vec![0, -1, 6]]);
        assert_eq!(a.upper(), &[2, 1, 0, 4, -1, 6]);
        assert_eq!(a.trace_two_a(), 12);
    }

    #[test]
    fn psd_check_exact() {
        assert!(HalfIntegralMatrix::from_two_a(&[vec![2, 1], vec![1, 2]]).is_ok());
        assert!(HalfIntegralMatrix::from_two_a(&[vec![2, 2], vec![2, 2]]).is_ok());
        assert!(HalfIntegralMatrix::from_two_a(&[vec![1, 2], vec![2, 1]]).is_err());
        assert!(HalfIntegralMatrix::from_two_a(&[vec![0, 1], vec![1, 2]]).is_err());
        assert!(HalfIntegralMatrix::from_two_a(&[vec![0, 0], vec![0, 2]]).is_ok());
        assert!(HalfIntegralMatrix::from_two_a(&[vec![-2]]).is_err());
        assert!(HalfIntegralMatrix::from_two_a(&[vec![1, 0], vec![1, 1]]).is_err());
        // Singular 3×3 with zero leading minor and a kernel row.
        assert!(HalfIntegralMatrix::from_two_a(&[vec![0, 0, 0], vec![0, 2, 1], vec![0, 1, 2]]).is_ok());
    }

    #[test]
    fn canonical_order_is_upper_triangle_lexicographic() {
        let a = key(&[&[0, 0], &[0, 2]]);
        let b = key(&[&[2, -1], &[-1, 2]]);
        let c = key(&[&[2, 0], &[0, 0]]);
        let mut v = vec![c.clone(), b.clone(), a.clone()];
        v.sort();
        assert_eq!(v, vec![a, b, c]);
    }

    #[test]
    fn evaluate_constant_and_single_term() {
        let f = FourierExpansion::constant(2, 4, exact_int(1));
        let tau = SiegelPoint::scaled_identity(2, 1.0);
        assert!((evaluate(&f, &tau).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let mut f = FourierExpansion::new(2, 1, 4, 1).unwrap();
        f.insert(key(&[&[2, 0], &[0, 0]]), exact_int(1)).unwrap();
        let v = evaluate(&f, &tau).unwrap();
        assert!((v - c((-2.0 * PI).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phi_of_constant() {
        let f = FourierExpansion::constant(2, 4, exact_int(7));
        let p = siegel_phi(&f).unwrap();
        assert_eq!(p.genus, 1);
        assert_eq!(p.coefficient(&HalfIntegralMatrix::zero(1)), exact_int(7));
        let p0 = siegel_phi(&p).unwrap();
        assert_eq!(p0.coefficient(&HalfIntegralMatrix::empty()), exact_int(7));
    }

    #[test]
    fn cusp_test_examples() {
        let zero = FourierExpansion::new(2, 1, 10, 3).unwrap();
        assert!(is_cusp_level1(&zero).unwrap().is_cusp);
        let mut f = FourierExpansion::new(2, 1, 10, 3).unwrap();
        f.insert(key(&[&[2, 1], &[1, 2]]), exact_int(1)).unwrap();
        assert!(is_cusp_level1(&f).unwrap().is_cusp);
        f.insert(key(&[&[2, 2], &[2, 2]]), exact_int(3)).unwrap();
        let t = is_cusp_level1(&f).unwrap();
        assert!(!t.is_cusp);
        assert_eq!(t.witness, Some(vec![vec![2, 2], vec![2, 2]]));
        let mut lvl = FourierExpansion::new(2, 3, 10, 3).unwrap();
        lvl.insert(key(&[&[2, 1], &[1, 2]]), exact_int(1)).unwrap();
        assert!(matches!(is_cusp_level1(&lvl), Err(Error::Unsupported(_))));
    }

    #[test]
    fn symmetry_trivial_context() {
        let mut f = FourierExpansion::new(2, 1, 5, 2).unwrap();
        f.insert(key(&[&[2, 1], &[1, 2]]), exact_int(4)).unwrap();
        let ctx = SlashContext::gl(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(symmetry_check(&f, &ctx).unwrap().is_empty());
    }

    #[test]
    fn symmetry_sign_flip_odd_weight() {
        let a = key(&[&[2, 1], &[1, 2]]);
        let b = key(&[&[2, -1], &[-1, 2]]);
        let ctx = SlashContext::gl(vec![vec![-1, 0], vec![0, 1]]).unwrap();
        let mut f = FourierExpansion::new(2, 1, 5, 2).unwrap();
        f.insert(a.clone(), exact_int(4)).unwrap();
        f.insert(b.clone(), exact_int(-4)).unwrap();
        assert!(symmetry_check(&f, &ctx).unwrap().is_empty());
        f.insert(b, exact_int(4)).unwrap();
        let v = symmetry_check(&f, &ctx).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|x| (x.residual - 8.0).abs() < 1e-12));
    }

    #[test]
    fn slash_context_validation() {
        assert!(SlashContext::new(vec![vec![2, 0], vec![0, 1]], vec![vec![0, 0], vec![0, 0]], 1).is_err());
        // U must be ≡ 0 mod n.
        assert!(SlashContext::new(vec![vec![1, 0], vec![0, 1]], vec![vec![1, 0], vec![0, 0]], 2).is_err());
        // VU must be symmetric.
        assert!(SlashContext::new(vec![vec![1, 1], vec![0, 1]], vec![vec![2, 0], vec![0, 0]], 2).is_err());
        assert!(SlashContext::new(vec![vec![1, 0], vec![0, 1]], vec![vec![2, 0], vec![0, 4]], 2).is_ok());
    }

    #[test]
    fn translation_phase_at_level_two() {
        // Half-integral diagonal allowed at level 2: A = diag(1/2, 0).
        let mut f = FourierExpansion::new(2, 2, 2, 2).unwrap();
        f.insert(key(&[&[1, 0], &[0, 0]]), exact_int(1)).unwrap();
        let ctx = SlashContext::new(vec![vec![1, 0], vec![0, 1]], vec![vec![2, 0], vec![0, 0]], 2).unwrap();
        // exp(−2πi·(1/2)·2/2) = −1, so the lone coefficient violates the rule.
        assert_eq!(symmetry_check(&f, &ctx).unwrap().len(), 1);
        let ctx = SlashContext::new(vec![vec![1, 0], vec![0, 1]], vec![vec![4, 0], vec![0, 0]], 2).unwrap();
        assert!(symmetry_check(&f, &ctx).unwrap().is_empty());
    }

    #[test]
    fn json_round_trip_exact() {
        let mut f = FourierExpansion::new(2, 1, 4, 2).unwrap();
        f.insert(key(&[&[2, 1], &[1, 2]]), exact_int(13440)).unwrap();
        f.insert(key(&[&[0, 0], &[0, 0]]), exact_int(1)).unwrap();
        f.insert(
            key(&[&[2, 0], &[0, 2]]),
            Complex::new(BigRational::new((-3).into(), 7.into()), BigRational::from_integer(2.into())),
        )
        .unwrap();
        let s = f.to_json();
        let back = FourierExpansion::from_json(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn decay_of_zero_form() {
        let tau = SiegelPoint::scaled_identity(1, 1.0);
        let r = decay_check(|_| Ok(c(0.0, 0.0)), &tau, None, &[1.0, 2.0, 3.0, 4.0], DecayExpectation::Cusp).unwrap();
        assert!(r.passed);
        assert!(r.magnitudes.iter().all(|m| *m == 0.0));
        assert!(decay_check(|_| Ok(c(0.0, 0.0)), &tau, None, &[1.0, 2.0, 3.0], DecayExpectation::Cusp).is_err());
    }

    #[test]
    fn decay_of_single_exponential() {
        // f = exp(2πi τ_22) decays with slope −2π.
        let tau = SiegelPoint::scaled_identity(1, 1.0);
        let f = |t: &SiegelPoint| Ok((Complex64::new(0.0, 2.0 * PI) * t.tau()[(1, 1)]).exp());
        let r = decay_check(f, &tau, None, &[2.0, 3.0, 4.0, 5.0], DecayExpectation::Cusp).unwrap();
        assert!((r.slope.unwrap() + 2.0 * PI).abs() < 1e-9);
        assert!(r.passed);
    }
}
