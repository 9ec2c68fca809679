//! Weight-one Hodge structures on `(V_C, ψ)`, the Hodge metric and the Higgs
//! field of the universal variation over `𝔥_g`.
//!
//! Frames: at `τ` the columns `f_j` of `F = (τ; I)` span `H^{1,0}` and their
//! conjugates span `H^{0,1}`. Maps `H^{1,0} → H^{0,1}` are written as `g×g`
//! matrices in these two frames. Sesquilinear forms are linear in the first
//! argument.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{self, c, condition_number, max_abs, to_complex, CMat, CVec};
use crate::siegelspace::{borel_embed, period_basis, tangent_basis, PeriodPoint, SiegelPoint, TangentDirection};
use crate::symplectic::psi_matrix;

/// Largest acceptable condition number of `[F | F̄]`.
pub const MAX_DECOMPOSITION_CONDITION: f64 = 1e8;

fn psi_c(g: usize) -> CMat {
    to_complex(&psi_matrix(g).to_f64())
}

/// `ᵗu ψ v` on complex vectors (bilinear, no conjugation).
fn psi_bilinear(psi: &CMat, u: &CVec, v: &CVec) -> Complex64 {
    (u.transpose() * psi * v)[(0, 0)]
}

/// A weight-one Hodge structure `V_C = F¹ ⊕ F̄¹`.
#[derive(Debug, Clone)]
pub struct HodgeStructureW1 {
    f1: PeriodPoint,
    /// `[F | F̄]`, invertible.
    stacked: CMat,
    stacked_inv: CMat,
    psi: CMat,
}

impl HodgeStructureW1 {
    pub fn new(f1: PeriodPoint) -> Result<Self> {
        let g = f1.g();
        let f = f1.basis();
        let mut stacked = CMat::zeros(2 * g, 2 * g);
        stacked.view_mut((0, 0), (2 * g, g)).copy_from(f);
        stacked.view_mut((0, g), (2 * g, g)).copy_from(&f.conjugate());
        let cond = condition_number(&stacked);
        if !(cond <= MAX_DECOMPOSITION_CONDITION) {
            return Err(Error::NumericalDegeneracy(format!(
                "F¹ ⊕ F̄¹ is ill-conditioned (condition number {cond:e})"
            )));
        }
        let stacked_inv = stacked.clone().try_inverse().ok_or(Error::Singular)?;
        Ok(HodgeStructureW1 {
            f1,
            stacked,
            stacked_inv,
            psi: psi_c(g),
        })
    }

    pub fn at(tau: &SiegelPoint) -> Result<Self> {
        Self::new(borel_embed(tau))
    }

    pub fn g(&self) -> usize {
        self.f1.g()
    }

    pub fn f1(&self) -> &PeriodPoint {
        &self.f1
    }

    /// Coordinates `(a, b)` with `u = F a + F̄ b`.
    pub fn decompose(&self, u: &CVec) -> Result<(CVec, CVec)> {
        let g = self.g();
        if u.len() != 2 * g {
            return Err(Error::DimensionMismatch {
                expected: 2 * g,
                got: u.len(),
            });
        }
        let ab = &self.stacked_inv * u;
        Ok((ab.rows(0, g).into_owned(), ab.rows(g, g).into_owned()))
    }

    /// The Weil operator: `√−1` on `H^{1,0}`, `−√−1` on `H^{0,1}`.
    pub fn weil(&self, u: &CVec) -> Result<CVec> {
        let (a, b) = self.decompose(u)?;
        let g = self.g();
        let mut ab = CVec::zeros(2 * g);
        ab.rows_mut(0, g).copy_from(&(a * numeric::I));
        ab.rows_mut(g, g).copy_from(&(b * -numeric::I));
        Ok(&self.stacked * ab)
    }

    /// Gram matrix `G_{kj} = <s_j, s_k>` of the columns of `frame`, so that
    /// `<S x, S y> = y^H G x`.
    pub fn gram(&self, frame: &CMat) -> Result<CMat> {
        let n = frame.ncols();
        let mut gram = CMat::zeros(n, n);
        for j in 0..n {
            let sj = frame.column(j).into_owned();
            let csj = self.weil(&sj)?;
            for k in 0..n {
                let sk = frame.column(k).into_owned();
                gram[(k, j)] = psi_bilinear(&self.psi, &csj, &sk.conjugate());
            }
        }
        Ok(gram)
    }

    /// Frame of `H^{1,0}`.
    pub fn frame_10(&self) -> CMat {
        self.f1.basis().clone()
    }

    /// Frame of `H^{0,1}`.
    pub fn frame_01(&self) -> CMat {
        self.f1.basis().conjugate()
    }

    /// `ψ`-polarised matrix `ψ(f_k, f̄_j)`, equal to `−2√−1 Im τ` in the
    /// standard frame.
    fn cross_pairing(&self) -> CMat {
        let f = self.f1.basis();
        f.transpose() * &self.psi * f.conjugate()
    }
}

/// `<u, v̄>_H = ψ(C u, v̄)`.
pub fn hodge_inner(hs: &HodgeStructureW1, u: &CVec, v: &CVec) -> Result<Complex64> {
    let cu = hs.weil(u)?;
    if v.len() != cu.len() {
        return Err(Error::DimensionMismatch {
            expected: cu.len(),
            got: v.len(),
        });
    }
    Ok(psi_bilinear(&hs.psi, &cu, &v.conjugate()))
}

/// A map `H^{1,0} → H^{0,1}` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct HiggsElement {
    /// Matrix in the frames `F → F̄`.
    pub matrix: CMat,
    /// The bilinear form `(u, v) ↦ ψ(u, θ v)` on `H^{1,0}` in the frame `F`;
    /// symmetric, which is the `Sym²` description of the image.
    pub polarized: CMat,
}

impl HiggsElement {
    pub fn symmetry_residual(&self) -> f64 {
        max_abs(&(&self.polarized - self.polarized.transpose()))
    }
}

/// Derivative of the Hodge filtration `F¹_{τ+tX}` at `t = 0`, projected to
/// `V_C / F¹ ≅ H^{0,1}`.
pub fn kodaira_spencer(tau: &SiegelPoint, x: &TangentDirection) -> Result<HiggsElement> {
    if x.g() != tau.g() {
        return Err(Error::DimensionMismatch {
            expected: tau.g(),
            got: x.g(),
        });
    }
    let hs = HodgeStructureW1::at(tau)?;
    kodaira_spencer_in(&hs, tau, x)
}

fn kodaira_spencer_in(hs: &HodgeStructureW1, tau: &SiegelPoint, x: &TangentDirection) -> Result<HiggsElement> {
    let g = tau.g();
    // τ ↦ (τ; I) is affine, so the symmetric difference quotient is exact.
    let plus = period_basis(&(tau.tau() + x.matrix()));
    let minus = period_basis(&(tau.tau() - x.matrix()));
    let d_f = (plus - minus) * c(0.5, 0.0);
    let mut matrix = CMat::zeros(g, g);
    for j in 0..g {
        let (_, b) = hs.decompose(&d_f.column(j).into_owned())?;
        matrix.column_mut(j).copy_from(&b);
    }
    let polarized = hs.cross_pairing() * &matrix;
    Ok(HiggsElement { matrix, polarized })
}

/// Hilbert–Schmidt pairing of two maps `H^{1,0} → H^{0,1}` under the Hodge
/// metric: `Tr(φ₂* φ₁)`.
fn hs_pairing(hs: &HodgeStructureW1, p1: &CMat, p2: &CMat) -> Result<Complex64> {
    let g10 = hs.gram(&hs.frame_10())?;
    let g01 = hs.gram(&hs.frame_01())?;
    let g10_inv = g10.try_inverse().ok_or(Error::Singular)?;
    Ok((g10_inv * p2.adjoint() * g01 * p1).trace())
}

/// `H(X, Ȳ) = <θ(X), θ(Y)>_H`.
pub fn hodge_metric_tangent(tau: &SiegelPoint, x: &TangentDirection, y: &TangentDirection) -> Result<Complex64> {
    let hs = HodgeStructureW1::at(tau)?;
    let tx = kodaira_spencer_in(&hs, tau, x)?;
    let ty = kodaira_spencer_in(&hs, tau, y)?;
    hs_pairing(&hs, &tx.matrix, &ty.matrix)
}

/// The matrix `H_{ab} = H(l_a, l̄_b)` in the coordinate frame.
pub fn hodge_metric_matrix(tau: &SiegelPoint) -> Result<CMat> {
    let hs = HodgeStructureW1::at(tau)?;
    let basis = tangent_basis(tau.g());
    let thetas = basis
        .iter()
        .map(|l| kodaira_spencer_in(&hs, tau, l).map(|t| t.matrix))
        .collect::<Result<Vec<_>>>()?;
    let m = basis.len();
    let mut h = CMat::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            h[(a, b)] = hs_pairing(&hs, &thetas[a], &thetas[b])?;
        }
    }
    Ok(h)
}

// ---------------------------------------------------------------------------
// Finite differences in the coordinates τ_ij (i ≤ j).

/// Real direction of a coordinate perturbation: `x_a` or `y_a`.
#[derive(Debug, Clone, Copy)]
enum Part {
    Re,
    Im,
}

fn shift(tau: &SiegelPoint, a: usize, part: Part, h: f64) -> Result<SiegelPoint> {
    let basis = tangent_basis(tau.g());
    let t = match part {
        Part::Re => c(h, 0.0),
        Part::Im => c(0.0, h),
    };
    tau.offset(basis[a].matrix(), t)
}

fn shift2(tau: &SiegelPoint, a: (usize, Part, f64), b: (usize, Part, f64)) -> Result<SiegelPoint> {
    shift(&shift(tau, a.0, a.1, a.2)?, b.0, b.1, b.2)
}

/// `∂_a F = ½(∂_{x_a} − i ∂_{y_a}) F` by central differences.
fn holo_derivative<F>(tau: &SiegelPoint, a: usize, h: f64, f: &F) -> Result<CMat>
where
    F: Fn(&SiegelPoint) -> Result<CMat>,
{
    let dx = (f(&shift(tau, a, Part::Re, h)?)? - f(&shift(tau, a, Part::Re, -h)?)?) / c(2.0 * h, 0.0);
    let dy = (f(&shift(tau, a, Part::Im, h)?)? - f(&shift(tau, a, Part::Im, -h)?)?) / c(2.0 * h, 0.0);
    Ok((dx - dy * numeric::I) * c(0.5, 0.0))
}

/// `∂̄_b F = ½(∂_{x_b} + i ∂_{y_b}) F` by central differences.
fn antiholo_derivative<F>(tau: &SiegelPoint, b: usize, h: f64, f: &F) -> Result<CMat>
where
    F: Fn(&SiegelPoint) -> Result<CMat>,
{
    let dx = (f(&shift(tau, b, Part::Re, h)?)? - f(&shift(tau, b, Part::Re, -h)?)?) / c(2.0 * h, 0.0);
    let dy = (f(&shift(tau, b, Part::Im, h)?)? - f(&shift(tau, b, Part::Im, -h)?)?) / c(2.0 * h, 0.0);
    Ok((dx + dy * numeric::I) * c(0.5, 0.0))
}

/// Second real partial derivative of a scalar function.
fn second_partial<F>(tau: &SiegelPoint, u: (usize, Part), v: (usize, Part), h: f64, f: &F) -> Result<f64>
where
    F: Fn(&SiegelPoint) -> Result<f64>,
{
    let same = u.0 == v.0 && matches!((u.1, v.1), (Part::Re, Part::Re) | (Part::Im, Part::Im));
    if same {
        let p = f(&shift(tau, u.0, u.1, h)?)?;
        let m = f(&shift(tau, u.0, u.1, -h)?)?;
        Ok((p - 2.0 * f(tau)? + m) / (h * h))
    } else {
        let pp = f(&shift2(tau, (u.0, u.1, h), (v.0, v.1, h))?)?;
        let pm = f(&shift2(tau, (u.0, u.1, h), (v.0, v.1, -h))?)?;
        let mp = f(&shift2(tau, (u.0, u.1, -h), (v.0, v.1, h))?)?;
        let mm = f(&shift2(tau, (u.0, u.1, -h), (v.0, v.1, -h))?)?;
        Ok((pp - pm - mp + mm) / (4.0 * h * h))
    }
}

/// The matrix `∂_a ∂̄_b f` of a real function.
fn complex_hessian<F>(tau: &SiegelPoint, h: f64, f: &F) -> Result<CMat>
where
    F: Fn(&SiegelPoint) -> Result<f64>,
{
    let m = tangent_basis(tau.g()).len();
    let mut out = CMat::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            let xx = second_partial(tau, (a, Part::Re), (b, Part::Re), h, f)?;
            let yy = second_partial(tau, (a, Part::Im), (b, Part::Im), h, f)?;
            let xy = second_partial(tau, (a, Part::Re), (b, Part::Im), h, f)?;
            let yx = second_partial(tau, (a, Part::Im), (b, Part::Re), h, f)?;
            out[(a, b)] = c(xx + yy, xy - yx) * 0.25;
        }
    }
    Ok(out)
}

fn log_det_metric(tau: &SiegelPoint) -> Result<f64> {
    let det = hodge_metric_matrix(tau)?.determinant();
    Ok(det.re.ln())
}

/// `max_{a,b,c} |∂_c H_{ab̄} − ∂_a H_{cb̄}|`: vanishing of `∂ω_H`.
fn closedness_residual(tau: &SiegelPoint, h: f64) -> Result<f64> {
    let m = tangent_basis(tau.g()).len();
    let grads = (0..m)
        .map(|cidx| holo_derivative(tau, cidx, h, &hodge_metric_matrix))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            for cc in 0..m {
                let r = (grads[cc][(a, b)] - grads[a][(cc, b)]).norm();
                worst = worst.max(r);
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct EinsteinSample {
    pub tau: Vec<Vec<[f64; 2]>>,
    pub dw_residual: f64,
    pub lambda: f64,
    /// `max |∂∂̄ log det H − λ H|`.
    pub einstein_residual: f64,
    /// `|λ(h) − λ(2h)| / |λ(h)|`.
    pub richardson_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EinsteinReport {
    pub samples: Vec<EinsteinSample>,
    pub max_dw_residual: f64,
    pub max_einstein_residual: f64,
    pub lambda: Vec<f64>,
    pub lambda_relative_spread: f64,
}

fn tau_rows(tau: &SiegelPoint) -> Vec<Vec<[f64; 2]>> {
    let t = tau.tau();
    (0..t.nrows())
        .map(|i| (0..t.ncols()).map(|j| [t[(i, j)].re, t[(i, j)].im]).collect())
        .collect()
}

fn einstein_lambda(tau: &SiegelPoint, h: f64) -> Result<(f64, f64)> {
    let metric = hodge_metric_matrix(tau)?;
    // Ric = −∂∂̄ log det H = −λ ω_H  ⇔  ∂∂̄ log det H = λ H.
    let hess = complex_hessian(tau, h, &log_det_metric)?;
    let num: f64 = hess.iter().zip(metric.iter()).map(|(a, b)| (a * b.conj()).re).sum();
    let den: f64 = metric.iter().map(|b| b.norm_sqr()).sum();
    let lambda = num / den;
    let residual = max_abs(&(hess - metric * c(lambda, 0.0)));
    Ok((lambda, residual))
}

/// Numerical Kähler–Einstein check of the Hodge metric on the tangent bundle.
///
/// The Ricci form is `−∂∂̄ log det H` with `∂ = ½(∂_x − i∂_y)`; in this
/// normalisation `λ = g + 1`.
pub fn kahler_einstein_check(samples: &[SiegelPoint], h: f64) -> Result<EinsteinReport> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step {h:e} outside [1e-6, 1e-2]"
        )));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no sample points".into()));
    }
    let results = samples
        .par_iter()
        .map(|tau| -> Result<EinsteinSample> {
            let dw = closedness_residual(tau, h)?;
            let (lambda, einstein_residual) = einstein_lambda(tau, h)?;
            let (lambda_2h, _) = einstein_lambda(tau, 2.0 * h)?;
            let gap = (lambda - lambda_2h).abs() / lambda.abs();
            if gap > 1e-3 {
                return Err(Error::NumericalDegeneracy(format!(
                    "step h = {h:e}: λ(h) and λ(2h) disagree by {gap:e}; roundoff dominates"
                )));
            }
            Ok(EinsteinSample {
                tau: tau_rows(tau),
                dw_residual: dw,
                lambda,
                einstein_residual,
                richardson_gap: gap,
            })
        })
        .collect::<Vec<_>>();
    let samples = results.into_iter().collect::<Result<Vec<_>>>()?;
    let lambda: Vec<f64> = samples.iter().map(|s| s.lambda).collect();
    Ok(EinsteinReport {
        max_dw_residual: samples.iter().map(|s| s.dw_residual).fold(0.0, f64::max),
        max_einstein_residual: samples.iter().map(|s| s.einstein_residual).fold(0.0, f64::max),
        lambda_relative_spread: numeric::relative_spread(&lambda),
        lambda,
        samples,
    })
}

// ---------------------------------------------------------------------------
// Curvature of the system of Hodge bundles.

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    /// `max |Θ_{ab̄} + (θθ* + θ*θ)_{ab̄}|` over all components.
    pub curvature_residual: f64,
    /// `max ‖θ_a θ_b − θ_b θ_a‖` as endomorphisms of `E`.
    pub theta_wedge_theta: f64,
    /// `max ‖θ*_a θ*_b − θ*_b θ*_a‖`.
    pub theta_star_wedge_theta_star: f64,
    /// `max ‖P − ᵗP‖` for the polarised Higgs matrices.
    pub sym2_residual: f64,
    pub step: f64,
}

/// Grams of the holomorphic frames of `E^{1,0} = F¹` (columns of `(τ; I)`)
/// and of `E^{0,1} = V/F¹` (images of the constant vectors `(e_j; 0)`), plus
/// the `F̄`-coordinates of those images.
fn hodge_bundle_grams(tau: &SiegelPoint) -> Result<(CMat, CMat, CMat)> {
    let hs = HodgeStructureW1::at(tau)?;
    let g = tau.g();
    let g10 = hs.gram(&hs.frame_10())?;
    let mut b0 = CMat::zeros(g, g);
    for j in 0..g {
        let mut s = CVec::zeros(2 * g);
        s[j] = c(1.0, 0.0);
        let (_, b) = hs.decompose(&s)?;
        b0.column_mut(j).copy_from(&b);
    }
    let projected = hs.frame_01() * &b0;
    let g01 = hs.gram(&projected)?;
    Ok((g10, g01, b0))
}

fn chern_connection(tau: &SiegelPoint, a: usize, h: f64, which: usize) -> Result<CMat> {
    let gram = |t: &SiegelPoint| -> Result<CMat> {
        let (g10, g01, _) = hodge_bundle_grams(t)?;
        Ok(if which == 0 { g10 } else { g01 })
    };
    let g0 = gram(tau)?;
    let dg = holo_derivative(tau, a, h, &gram)?;
    Ok(g0.try_inverse().ok_or(Error::Singular)? * dg)
}

fn block_endo(g: usize, lower_left: Option<&CMat>, upper_right: Option<&CMat>) -> CMat {
    let mut m = CMat::zeros(2 * g, 2 * g);
    if let Some(ll) = lower_left {
        m.view_mut((g, 0), (g, g)).copy_from(ll);
    }
    if let Some(ur) = upper_right {
        m.view_mut((0, g), (g, g)).copy_from(ur);
    }
    m
}

/// Compares the Chern curvature of `(E^{1,0} ⊕ E^{0,1}, H)` with
/// `−(θ∧θ* + θ*∧θ)` at `τ`.
pub fn higgs_curvature_identity_check(tau: &SiegelPoint, h: f64) -> Result<CurvatureReport> {
    let g = tau.g();
    if g > 2 {
        return Err(Error::CostGuard(format!("curvature check limited to g ≤ 2, got g = {g}")));
    }
    if !(1e-5..=1e-2).contains(&h) {
        return Err(Error::InvalidParameter(format!("step {h:e} outside [1e-5, 1e-2]")));
    }
    let basis = tangent_basis(g);
    let m = basis.len();
    let hs = HodgeStructureW1::at(tau)?;
    let (g10, g01, b0) = hodge_bundle_grams(tau)?;
    let g10_inv = g10.clone().try_inverse().ok_or(Error::Singular)?;
    let b0_inv = b0.try_inverse().ok_or(Error::Singular)?;

    let mut sym2: f64 = 0.0;
    let mut theta = Vec::with_capacity(m);
    let mut theta_star = Vec::with_capacity(m);
    for l in &basis {
        let ks = kodaira_spencer_in(&hs, tau, l)?;
        sym2 = sym2.max(ks.symmetry_residual());
        // From the F̄ frame to the quotient frame.
        let t = &b0_inv * &ks.matrix;
        let t_star = &g10_inv * t.adjoint() * &g01;
        theta.push(block_endo(g, Some(&t), None));
        theta_star.push(block_endo(g, None, Some(&t_star)));
    }

    let mut wedge: f64 = 0.0;
    let mut wedge_star: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            wedge = wedge.max(max_abs(&(&theta[a] * &theta[b] - &theta[b] * &theta[a])));
            wedge_star = wedge_star
                .max(max_abs(&(&theta_star[a] * &theta_star[b] - &theta_star[b] * &theta_star[a])));
        }
    }

    let mut residual: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let mut curvature = CMat::zeros(2 * g, 2 * g);
            for which in 0..2 {
                let conn = |t: &SiegelPoint| chern_connection(t, a, h, which);
                let theta_ab = -antiholo_derivative(tau, b, h, &conn)?;
                curvature
                    .view_mut((which * g, which * g), (g, g))
                    .copy_from(&theta_ab);
            }
            // Coefficient of dz_a ∧ dz̄_b in −(θ∧θ* + θ*∧θ).
            let rhs = -(&theta[a] * &theta_star[b]) + &theta_star[b] * &theta[a];
            residual = residual.max(max_abs(&(curvature - rhs)));
        }
    }
    Ok(CurvatureReport {
        curvature_residual: residual,
        theta_wedge_theta: wedge,
        theta_star_wedge_theta_star: wedge_star,
        sym2_residual: sym2,
        step: h,
    })
}

/// Gram matrix of the Kodaira–Spencer images of the coordinate frame under
/// the Hodge metric; full rank means the map is injective.
pub fn kodaira_spencer_gram(tau: &SiegelPoint) -> Result<DMatrix<Complex64>> {
    hodge_metric_matrix(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::siegelspace::{bergman_metric, moebius_act, pushforward};
    use crate::symplectic::SymplecticMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_vec<R: rand::Rng>(n: usize, rng: &mut R) -> CVec {
        CVec::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn hodge_inner_on_frame_at_i() {
        let tau = SiegelPoint::scaled_identity(2, 1.0);
        let hs = HodgeStructureW1::at(&tau).unwrap();
        for j in 0..2 {
            let f = hs.frame_10().column(j).into_owned();
            let v = hodge_inner(&hs, &f, &f).unwrap();
            assert!((v - c(2.0, 0.0)).norm() < 1e-14);
            let fbar = f.conjugate();
            assert!(hodge_inner(&hs, &f, &fbar).unwrap().norm() < 1e-14);
            assert!((hodge_inner(&hs, &fbar, &fbar).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn hodge_inner_positive_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let tau = SiegelPoint::random(2, &mut rng);
            let hs = HodgeStructureW1::at(&tau).unwrap();
            let u = rand_vec(4, &mut rng);
            let v = hodge_inner(&hs, &u, &u).unwrap();
            assert!(v.re > 0.0 && v.im.abs() < 1e-10 * v.re);
            let a = hs.frame_10() * rand_vec(2, &mut rng);
            let b = hs.frame_01() * rand_vec(2, &mut rng);
            assert!(hodge_inner(&hs, &a, &b).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn kodaira_spencer_basic() {
        let tau = SiegelPoint::scaled_identity(2, 1.0);
        let zero = kodaira_spencer(&tau, &TangentDirection::zero(2)).unwrap();
        assert!(max_abs(&zero.matrix) == 0.0);
        let gram = kodaira_spencer_gram(&tau).unwrap();
        let sv = numeric::singular_values(&gram);
        assert_eq!(sv.len(), 3);
        assert!(sv[2] > 0.1);
    }

    #[test]
    fn kodaira_spencer_is_symmetric_after_polarisation() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let tau = SiegelPoint::random(3, &mut rng);
            let x = TangentDirection::random(3, &mut rng);
            let ks = kodaira_spencer(&tau, &x).unwrap();
            assert!(ks.symmetry_residual() < 1e-9);
        }
    }

    #[test]
    fn kodaira_spencer_linear_and_injective() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let tau = SiegelPoint::random(2, &mut rng);
        let x = TangentDirection::random(2, &mut rng);
        let y = TangentDirection::random(2, &mut rng);
        let s = c(0.3, -1.2);
        let xy = TangentDirection::new(x.matrix() * s + y.matrix()).unwrap();
        let lhs = kodaira_spencer(&tau, &xy).unwrap().matrix;
        let rhs = kodaira_spencer(&tau, &x).unwrap().matrix * s + kodaira_spencer(&tau, &y).unwrap().matrix;
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
        assert!(max_abs(&kodaira_spencer(&tau, &x).unwrap().matrix) > 1e-3);
    }

    #[test]
    fn hodge_metric_is_constant_multiple_of_bergman() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let ratios: Vec<f64> = (0..25)
            .map(|_| {
                let tau = SiegelPoint::random(2, &mut rng);
                let x = TangentDirection::random(2, &mut rng);
                let hm = hodge_metric_tangent(&tau, &x, &x).unwrap();
                let bm = bergman_metric(&tau, &x, &x);
                hm.re / bm.re
            })
            .collect();
        assert!(numeric::relative_spread(&ratios) < 1e-8);
        assert!((ratios[0] - 0.25).abs() < 1e-10);
        let tau = SiegelPoint::scaled_identity(2, 1.0);
        assert_eq!(hodge_metric_tangent(&tau, &TangentDirection::zero(2), &TangentDirection::zero(2)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn hodge_metric_invariant_under_j() {
        let tau = SiegelPoint::scaled_identity(2, 1.0);
        let j = SymplecticMatrix::j(2).to_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let x = TangentDirection::random(2, &mut rng);
        let tau = tau.offset(&numeric::to_complex(&numeric::random_real_symmetric(2, 0.3, &mut rng)), c(1.0, 0.0)).unwrap();
        let before = hodge_metric_tangent(&tau, &x, &x).unwrap();
        let image = moebius_act(&j, &tau).unwrap();
        let px = pushforward(&j, &tau, &x).unwrap();
        let after = hodge_metric_tangent(&image, &px, &px).unwrap();
        assert!((before - after).norm() < 1e-9 * before.norm());
    }

    #[test]
    fn einstein_g1_closed_form() {
        let samples = vec![
            SiegelPoint::scaled_identity(1, 1.0),
            SiegelPoint::diagonal(&[c(0.3, 2.5)]).unwrap(),
        ];
        let report = kahler_einstein_check(&samples, 1e-3).unwrap();
        for l in &report.lambda {
            assert!((l - 2.0).abs() < 1e-4, "λ = {l}");
        }
    }

    #[test]
    fn einstein_g2_lambda_consistent() {
        let samples = vec![
            SiegelPoint::scaled_identity(2, 1.0),
            SiegelPoint::diagonal(&[c(0.0, 1.0), c(0.0, 2.0)]).unwrap(),
        ];
        let report = kahler_einstein_check(&samples, 1e-3).unwrap();
        assert!(report.max_dw_residual <= 1e-4);
        assert!(report.lambda_relative_spread <= 1e-3);
        assert!(report.max_einstein_residual <= 1e-3);
        assert!((report.lambda[0] - 3.0).abs() < 1e-3);
    }

    #[test]
    fn einstein_rejects_bad_step() {
        let samples = vec![SiegelPoint::scaled_identity(1, 1.0)];
        assert!(kahler_einstein_check(&samples, 1e-8).is_err());
        assert!(kahler_einstein_check(&samples, 0.5).is_err());
    }

    #[test]
    fn curvature_identity_at_i() {
        let tau = SiegelPoint::scaled_identity(2, 1.0);
        let report = higgs_curvature_identity_check(&tau, 1e-3).unwrap();
        assert!(report.curvature_residual <= 1e-3, "{report:?}");
        assert!(report.theta_wedge_theta <= 1e-10);
        assert!(report.theta_star_wedge_theta_star <= 1e-10);
        assert!(report.sym2_residual <= 1e-10);
    }

    #[test]
    fn curvature_g1_closed_form() {
        // Θ(E^{1,0}) = 1/(4y²) for the Hodge metric 2y.
        let tau = SiegelPoint::diagonal(&[c(0.2, 1.5)]).unwrap();
        let report = higgs_curvature_identity_check(&tau, 1e-3).unwrap();
        assert!(report.curvature_residual < 1e-5);
    }

    #[test]
    fn curvature_cost_guard() {
        let tau = SiegelPoint::scaled_identity(3, 1.0);
        assert!(matches!(higgs_curvature_identity_check(&tau, 1e-3), Err(Error::CostGuard(_))));
    }
}
