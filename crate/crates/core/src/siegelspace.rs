//! The Siegel upper half space `𝔥_g`, the action of `Sp(g, R)`, the Borel
//! embedding into the period domain and the invariant Bergman metric.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{
    self, c, condition_number, fit_slope, im_part, max_abs, to_complex, CMat, RMat,
};
use crate::symplectic::psi_matrix;
use crate::TOL_STRUCTURAL;

/// Largest condition number of `Cτ + D` accepted by the action.
pub const MAX_COCYCLE_CONDITION: f64 = 1e12;

/// A symmetric complex `g×g` matrix with positive definite imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    tau: CMat,
}

impl SiegelPoint {
    pub fn new(tau: CMat) -> Result<Self> {
        if !tau.is_square() || tau.nrows() == 0 {
            return Err(Error::NotInSiegelSpace("τ must be a non-empty square matrix".into()));
        }
        let asym = max_abs(&(&tau - tau.transpose()));
        if asym > TOL_STRUCTURAL * (1.0 + max_abs(&tau)) {
            return Err(Error::NotInSiegelSpace(format!("τ is not symmetric (residual {asym:e})")));
        }
        // Exact symmetrisation removes rounding noise below the tolerance.
        let tau = (&tau + tau.transpose()) * c(0.5, 0.0);
        let lo = numeric::sym_eigenvalues(&im_part(&tau))[0];
        if !(lo > 0.0) {
            return Err(Error::NotInSiegelSpace(format!(
                "Im τ is not positive definite (smallest eigenvalue {lo:e})"
            )));
        }
        Ok(SiegelPoint { tau })
    }

    /// `x + iy` from real and imaginary parts.
    pub fn from_parts(x: &RMat, y: &RMat) -> Result<Self> {
        Self::new(CMat::from_fn(x.nrows(), x.ncols(), |i, j| c(x[(i, j)], y[(i, j)])))
    }

    /// `i·s·I_g`.
    pub fn scaled_identity(g: usize, s: f64) -> Self {
        SiegelPoint {
            tau: CMat::from_diagonal_element(g, g, c(0.0, s)),
        }
    }

    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        let g = entries.len();
        Self::new(CMat::from_fn(g, g, |i, j| if i == j { entries[i] } else { c(0.0, 0.0) }))
    }

    pub fn random<R: Rng + ?Sized>(g: usize, rng: &mut R) -> Self {
        let x = numeric::random_real_symmetric(g, 1.0, rng);
        let y = numeric::random_positive_definite(g, 0.5, rng);
        Self::from_parts(&x, &y).expect("random point is valid by construction")
    }

    pub fn g(&self) -> usize {
        self.tau.nrows()
    }

    pub fn tau(&self) -> &CMat {
        &self.tau
    }

    pub fn imag(&self) -> RMat {
        im_part(&self.tau)
    }

    pub fn imag_inverse(&self) -> RMat {
        self.imag()
            .try_inverse()
            .expect("positive definite imaginary part is invertible")
    }

    pub fn min_imag_eigenvalue(&self) -> f64 {
        numeric::sym_eigenvalues(&self.imag())[0]
    }

    /// `τ + t·X` without validation of the result.
    pub fn offset(&self, x: &CMat, t: Complex64) -> Result<Self> {
        Self::new(&self.tau + x * t)
    }
}

/// `F¹ ⊂ C^{2g}` given by a `2g×g` basis matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodPoint {
    basis: CMat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodResiduals {
    /// `max |ᵗF ψ F|`.
    pub isotropy: f64,
    /// Eigenvalues of the Hermitian matrix `√−1 ᵗF ψ F̄`, ascending.
    pub min_positivity: f64,
    pub max_positivity: f64,
}

impl PeriodPoint {
    pub fn new(basis: CMat) -> Result<Self> {
        let res = Self::residuals_of(&basis)?;
        let scale = 1.0 + max_abs(&basis).powi(2);
        if res.isotropy > 1e-10 * scale {
            return Err(Error::NotInSiegelSpace(format!(
                "F¹ is not isotropic (residual {:e})",
                res.isotropy
            )));
        }
        if !(res.min_positivity > 0.0) {
            return Err(Error::NotInSiegelSpace(format!(
                "√−1 ψ(F¹, F̄¹) is not positive (smallest eigenvalue {:e})",
                res.min_positivity
            )));
        }
        Ok(PeriodPoint { basis })
    }

    pub fn residuals_of(basis: &CMat) -> Result<PeriodResiduals> {
        let n = basis.nrows();
        let g = basis.ncols();
        if n != 2 * g || g == 0 {
            return Err(Error::DimensionMismatch { expected: 2 * g, got: n });
        }
        if numeric::singular_values(basis).last().copied().unwrap_or(0.0) <= 1e-12 {
            return Err(Error::NotInSiegelSpace("basis of F¹ is rank deficient".into()));
        }
        let psi = to_complex(&psi_matrix(g).to_f64());
        let iso = basis.transpose() * &psi * basis;
        let herm = basis.transpose() * &psi * basis.conjugate() * numeric::I;
        let ev = numeric::hermitian_eigenvalues(&herm);
        Ok(PeriodResiduals {
            isotropy: max_abs(&iso),
            min_positivity: ev[0],
            max_positivity: ev[ev.len() - 1],
        })
    }

    pub fn g(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn residuals(&self) -> PeriodResiduals {
        Self::residuals_of(&self.basis).expect("validated on construction")
    }
}

/// A holomorphic tangent vector at a point of `𝔥_g`, in the coordinates
/// `∂/∂τ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDirection {
    x: CMat,
}

impl TangentDirection {
    pub fn new(x: CMat) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::NotSquare {
                rows: x.nrows(),
                cols: x.ncols(),
            });
        }
        let asym = max_abs(&(&x - x.transpose()));
        if asym > TOL_STRUCTURAL * (1.0 + max_abs(&x)) {
            return Err(Error::InvalidParameter(format!(
                "tangent direction is not symmetric (residual {asym:e})"
            )));
        }
        Ok(TangentDirection {
            x: (&x + x.transpose()) * c(0.5, 0.0),
        })
    }

    pub fn zero(g: usize) -> Self {
        TangentDirection { x: CMat::zeros(g, g) }
    }

    /// `E_ii` for `i = j`, `E_ij + E_ji` otherwise (0-based).
    pub fn coordinate(g: usize, i: usize, j: usize) -> Self {
        let mut x = CMat::zeros(g, g);
        x[(i, j)] = c(1.0, 0.0);
        x[(j, i)] = c(1.0, 0.0);
        if i == j {
            x[(i, i)] = c(1.0, 0.0);
        }
        TangentDirection { x }
    }

    pub fn random<R: Rng + ?Sized>(g: usize, rng: &mut R) -> Self {
        TangentDirection {
            x: numeric::random_complex_symmetric(g, rng),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.x
    }

    pub fn g(&self) -> usize {
        self.x.nrows()
    }
}

/// The coordinate frame `{∂/∂τ_ij : i ≤ j}` in row-major order; it has
/// `g(g+1)/2` elements.
pub fn tangent_basis(g: usize) -> Vec<TangentDirection> {
    coordinate_pairs(g)
        .into_iter()
        .map(|(i, j)| TangentDirection::coordinate(g, i, j))
        .collect()
}

pub fn coordinate_pairs(g: usize) -> Vec<(usize, usize)> {
    (0..g).flat_map(|i| (i..g).map(move |j| (i, j))).collect()
}

struct Blocks {
    a: CMat,
    b: CMat,
    c: CMat,
    d: CMat,
}

fn split_blocks(m: &DMatrix<f64>, g: usize) -> Result<Blocks> {
    if m.nrows() != 2 * g || m.ncols() != 2 * g {
        return Err(Error::DimensionMismatch {
            expected: 2 * g,
            got: m.nrows(),
        });
    }
    let blk = |r, c0| to_complex(&m.view((r, c0), (g, g)).into_owned());
    Ok(Blocks {
        a: blk(0, 0),
        b: blk(0, g),
        c: blk(g, 0),
        d: blk(g, g),
    })
}

/// `Cτ + D`, with the near-singularity guard.
pub fn cocycle_matrix(m: &DMatrix<f64>, tau: &SiegelPoint) -> Result<CMat> {
    let bl = split_blocks(m, tau.g())?;
    let j = &bl.c * tau.tau() + &bl.d;
    let cond = condition_number(&j);
    if !(cond <= MAX_COCYCLE_CONDITION) {
        return Err(Error::NumericalDegeneracy(format!(
            "Cτ+D has condition number {cond:e}"
        )));
    }
    Ok(j)
}

/// `(Aτ + B)(Cτ + D)⁻¹`.
pub fn moebius_act(m: &DMatrix<f64>, tau: &SiegelPoint) -> Result<SiegelPoint> {
    let bl = split_blocks(m, tau.g())?;
    let j = cocycle_matrix(m, tau)?;
    let j_inv = j.try_inverse().ok_or(Error::Singular)?;
    let num = &bl.a * tau.tau() + &bl.b;
    SiegelPoint::new(num * j_inv)
}

/// `det(Cτ + D)`.
pub fn cocycle(m: &DMatrix<f64>, tau: &SiegelPoint) -> Result<Complex64> {
    Ok(cocycle_matrix(m, tau)?.determinant())
}

/// Residual of `Im(M·τ) = ᵗ(Cτ̄+D)⁻¹ Im τ (Cτ+D)⁻¹`, relative to `‖Im(M·τ)‖`.
pub fn im_transform_residual(m: &DMatrix<f64>, tau: &SiegelPoint) -> Result<f64> {
    let image = moebius_act(m, tau)?;
    let j = cocycle_matrix(m, tau)?;
    let j_inv = j.clone().try_inverse().ok_or(Error::Singular)?;
    let predicted = j_inv.conjugate().transpose() * to_complex(&tau.imag()) * j_inv;
    let actual = to_complex(&image.imag());
    Ok(max_abs(&(&predicted - &actual)) / max_abs(&actual))
}

/// `τ ↦ F¹_τ`, the column span of `(τ; I_g)`.
pub fn borel_embed(tau: &SiegelPoint) -> PeriodPoint {
    PeriodPoint::new(period_basis(tau.tau())).expect("points of 𝔥_g embed into the period domain")
}

/// The stacked `2g×g` matrix `(τ; I_g)` for any square `τ`.
pub fn period_basis(tau: &CMat) -> CMat {
    let g = tau.nrows();
    let mut f = CMat::zeros(2 * g, g);
    f.view_mut((0, 0), (g, g)).copy_from(tau);
    f.view_mut((g, 0), (g, g)).fill_with_identity();
    f
}

/// Pushforward of a tangent vector under `τ ↦ M·τ`:
/// `X ↦ ᵗ(Cτ+D)⁻¹ X (Cτ+D)⁻¹`.
pub fn pushforward(m: &DMatrix<f64>, tau: &SiegelPoint, x: &TangentDirection) -> Result<TangentDirection> {
    let j_inv = cocycle_matrix(m, tau)?
        .try_inverse()
        .ok_or(Error::Singular)?;
    TangentDirection::new(j_inv.transpose() * x.matrix() * j_inv)
}

/// `Tr((Im τ)⁻¹ X (Im τ)⁻¹ Ȳ)`.
pub fn bergman_metric(tau: &SiegelPoint, x: &TangentDirection, y: &TangentDirection) -> Complex64 {
    let yi = to_complex(&tau.imag_inverse());
    (&yi * x.matrix() * &yi * y.matrix().conjugate()).trace()
}

/// `det(Im τ)^{-(g+1)}`.
pub fn bergman_volume_density(tau: &SiegelPoint) -> f64 {
    let g = tau.g() as i32;
    tau.imag().determinant().powi(-(g + 1))
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentGrowth {
    pub name: String,
    /// `|h|` at each sample radius.
    pub values: Vec<f64>,
    /// Fitted exponent `M` in `|h| ~ (−log|q|)^M`.
    pub exponent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub g: usize,
    pub radii: Vec<f64>,
    /// `−log|q|` at each radius.
    pub log_depth: Vec<f64>,
    pub components: Vec<ComponentGrowth>,
    pub max_exponent: f64,
    /// Exponent `p` in `|h_qq| ~ |q|^{−p}` for the cusp component in the
    /// `∂/∂q` frame; the logarithmic frame removes this power.
    pub q_frame_power: f64,
}

/// Bergman metric components near the cusp `Im τ_gg → ∞`, written in the
/// chart `q = exp(2πi τ_gg)` with the logarithmic frame `q ∂/∂q` for the
/// cusp direction and `∂/∂τ_ij` for the others.
///
/// Supported for `g = 1` (`τ = τ_11`) and `g = 2` on the family
/// `τ = diag(i, τ_22)`.
pub fn boundary_growth_probe(g: usize, radii: &[f64]) -> Result<GrowthReport> {
    if g != 1 && g != 2 {
        return Err(Error::Unsupported("boundary growth probe is implemented for g = 1, 2".into()));
    }
    let r_max = (-2.0 * PI).exp();
    if radii.len() < 2 {
        return Err(Error::InvalidParameter("need at least two sample radii".into()));
    }
    if let Some(r) = radii.iter().find(|&&r| !(r > 0.0 && r < r_max)) {
        return Err(Error::InvalidParameter(format!(
            "radius {r} outside (0, e^(-2π))"
        )));
    }
    let log_depth: Vec<f64> = radii.iter().map(|r| -r.ln()).collect();

    // The log frame vector q∂/∂q equals (2πi)⁻¹ ∂/∂τ_gg.
    let to_log = c(0.0, -1.0 / (2.0 * PI));
    let mut frame: Vec<(String, TangentDirection)> = Vec::new();
    for (i, j) in coordinate_pairs(g) {
        let mut v = TangentDirection::coordinate(g, i, j);
        let name = if (i, j) == (g - 1, g - 1) {
            v.x *= to_log;
            "q d/dq".to_string()
        } else {
            format!("d/dtau_{}{}", i + 1, j + 1)
        };
        frame.push((name, v));
    }

    let mut samples: Vec<Vec<Complex64>> = Vec::new();
    let mut cusp_q_frame = Vec::new();
    for &depth in &log_depth {
        let t = depth / (2.0 * PI);
        let mut diag = vec![c(0.0, 1.0); g];
        diag[g - 1] = c(0.0, t);
        let tau = SiegelPoint::diagonal(&diag)?;
        let mut row = Vec::new();
        for (_, a) in &frame {
            for (_, b) in &frame {
                row.push(bergman_metric(&tau, a, b));
            }
        }
        samples.push(row);
        // ∂/∂q = (2πi q)⁻¹ ∂/∂τ_gg, so |h_qq| = |h_{τ_gg τ_gg}| / (2π|q|)².
        let e = TangentDirection::coordinate(g, g - 1, g - 1);
        let r = (-depth).exp();
        cusp_q_frame.push(bergman_metric(&tau, &e, &e).norm() / (2.0 * PI * r).powi(2));
    }

    let xs: Vec<f64> = log_depth.iter().map(|d| d.ln()).collect();
    let m = frame.len();
    let mut components = Vec::new();
    for a in 0..m {
        for b in a..m {
            let values: Vec<f64> = samples.iter().map(|row| row[a * m + b].norm()).collect();
            if values.iter().all(|v| *v == 0.0) {
                continue;
            }
            let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
            components.push(ComponentGrowth {
                name: format!("<{}, {}>", frame[a].0, frame[b].0),
                exponent: fit_slope(&xs, &ys),
                values,
            });
        }
    }
    let max_exponent = components
        .iter()
        .map(|cg| cg.exponent)
        .fold(f64::NEG_INFINITY, f64::max);
    let inv_r: Vec<f64> = log_depth.clone();
    let ys: Vec<f64> = cusp_q_frame.iter().map(|v| v.ln()).collect();
    Ok(GrowthReport {
        g,
        radii: radii.to_vec(),
        log_depth,
        components,
        max_exponent,
        q_frame_power: fit_slope(&inv_r, &ys),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{random_word, SymplecticMatrix};
    use crate::exact::QMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn i_identity(g: usize) -> SiegelPoint {
        SiegelPoint::scaled_identity(g, 1.0)
    }

    #[test]
    fn rejects_invalid_points() {
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert!(SiegelPoint::new(m).is_err());
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
        assert!(SiegelPoint::new(m).is_err());
    }

    #[test]
    fn identity_and_translation_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tau = SiegelPoint::random(2, &mut rng);
        let id = SymplecticMatrix::identity(2).to_f64();
        assert!(max_abs(&(moebius_act(&id, &tau).unwrap().tau() - tau.tau())) < 1e-14);
        assert_eq!(cocycle(&id, &tau).unwrap(), c(1.0, 0.0));

        let b = numeric::random_real_symmetric(2, 3.0, &mut rng);
        let mut m = RMat::identity(4, 4);
        m.view_mut((0, 2), (2, 2)).copy_from(&b);
        let moved = moebius_act(&m, &tau).unwrap();
        assert!(max_abs(&(moved.tau() - (tau.tau() + to_complex(&b)))) < 1e-13);
        assert!((cocycle(&m, &tau).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn j_fixes_i_identity() {
        for g in 1..=3 {
            let j = SymplecticMatrix::j(g).to_f64();
            let tau = i_identity(g);
            let image = moebius_act(&j, &tau).unwrap();
            assert!(max_abs(&(image.tau() - tau.tau())) < 1e-14);
            let expected = c(0.0, 1.0).powu(g as u32);
            assert!((cocycle(&j, &tau).unwrap() - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn degenerate_cocycle_rejected() {
        let mut m = RMat::zeros(2, 2);
        m[(0, 0)] = 1.0;
        m[(1, 1)] = 0.0;
        // C = D = 0 is not symplectic but exercises the guard.
        let tau = i_identity(1);
        assert!(matches!(moebius_act(&m, &tau), Err(Error::NumericalDegeneracy(_))));
    }

    #[test]
    fn left_action_and_chain_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let m = random_word(2, 4, &mut rng);
            let n = random_word(2, 4, &mut rng);
            let tau = SiegelPoint::random(2, &mut rng);
            let mn = m.compose(&n).unwrap().to_f64();
            let (mf, nf) = (m.to_f64(), n.to_f64());
            let lhs = moebius_act(&mn, &tau).unwrap();
            let ntau = moebius_act(&nf, &tau).unwrap();
            let rhs = moebius_act(&mf, &ntau).unwrap();
            assert!(max_abs(&(lhs.tau() - rhs.tau())) <= 1e-9 * (1.0 + max_abs(lhs.tau())));
            let c_mn = cocycle(&mn, &tau).unwrap();
            let c_chain = cocycle(&mf, &ntau).unwrap() * cocycle(&nf, &tau).unwrap();
            assert!((c_mn - c_chain).norm() <= 1e-9 * c_mn.norm());
            assert!(im_transform_residual(&mn, &tau).unwrap() < 1e-9);
        }
    }

    #[test]
    fn borel_embedding_at_i_identity() {
        let p = borel_embed(&i_identity(3));
        let r = p.residuals();
        assert!(r.isotropy < 1e-12);
        assert!((r.min_positivity - 2.0).abs() < 1e-12);
        assert!((r.max_positivity - 2.0).abs() < 1e-12);
    }

    #[test]
    fn period_point_rejects_indefinite_imaginary_part() {
        let tau = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
        let err = PeriodPoint::new(period_basis(&tau)).unwrap_err();
        assert!(matches!(err, Error::NotInSiegelSpace(msg) if msg.contains("positive")));
    }

    #[test]
    fn borel_embedding_is_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let tau = SiegelPoint::random(2, &mut rng);
            let m = random_word(2, 5, &mut rng).to_f64();
            let lhs = to_complex(&m) * borel_embed(&tau).basis();
            let rhs = borel_embed(&moebius_act(&m, &tau).unwrap());
            assert!(numeric::subspace_distance(&lhs, rhs.basis()) < 1e-9);
        }
    }

    #[test]
    fn bergman_examples() {
        let e11 = TangentDirection::coordinate(2, 0, 0);
        let v = bergman_metric(&i_identity(2), &e11, &e11);
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        let v = bergman_metric(&SiegelPoint::scaled_identity(2, 2.0), &e11, &e11);
        assert!((v - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bergman_invariance_under_j() {
        let tau = i_identity(2);
        let x = TangentDirection::coordinate(2, 0, 1);
        let j = SymplecticMatrix::j(2).to_f64();
        let before = bergman_metric(&tau, &x, &x);
        let image = moebius_act(&j, &tau).unwrap();
        let px = pushforward(&j, &tau, &x).unwrap();
        let after = bergman_metric(&image, &px, &px);
        assert!((before - after).norm() <= 1e-12 * before.norm());
        assert!((before - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn bergman_hermitian_and_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let tau = SiegelPoint::random(2, &mut rng);
            let x = TangentDirection::random(2, &mut rng);
            let y = TangentDirection::random(2, &mut rng);
            let hxy = bergman_metric(&tau, &x, &y);
            let hyx = bergman_metric(&tau, &y, &x);
            assert!((hxy - hyx.conj()).norm() < 1e-12 * (1.0 + hxy.norm()));
            let hxx = bergman_metric(&tau, &x, &x);
            assert!(hxx.re > 0.0 && hxx.im.abs() < 1e-12 * hxx.re);
            let m = random_word(2, 5, &mut rng).to_f64();
            let image = moebius_act(&m, &tau).unwrap();
            let (px, py) = (pushforward(&m, &tau, &x).unwrap(), pushforward(&m, &tau, &y).unwrap());
            let moved = bergman_metric(&image, &px, &py);
            assert!((moved - hxy).norm() <= 1e-8 * (1.0 + hxy.norm()));
        }
    }

    #[test]
    fn volume_density_examples() {
        assert!((bergman_volume_density(&i_identity(3)) - 1.0).abs() < 1e-15);
        let v = bergman_volume_density(&SiegelPoint::scaled_identity(2, 2.0));
        assert!((v - 1.0 / 64.0).abs() < 1e-16);
    }

    #[test]
    fn tangent_basis_dimension() {
        for g in 1..=4 {
            assert_eq!(tangent_basis(g).len(), g * (g + 1) / 2);
        }
    }

    #[test]
    fn growth_probe_g1_closed_form() {
        let radii: Vec<f64> = [3.0, 5.0, 8.0, 12.0].iter().map(|t: &f64| (-2.0 * PI * t).exp()).collect();
        let report = boundary_growth_probe(1, &radii).unwrap();
        assert_eq!(report.components.len(), 1);
        // |h| = (−log|q|)^{-2} exactly in the log frame.
        for (v, d) in report.components[0].values.iter().zip(&report.log_depth) {
            assert!((v - d.powi(-2)).abs() < 1e-12 * v);
        }
        assert!((report.max_exponent + 2.0).abs() < 1e-9);
        assert!(report.q_frame_power > 1.9);
    }

    #[test]
    fn growth_probe_rejects_bad_radii() {
        assert!(boundary_growth_probe(1, &[0.5, 1e-4]).is_err());
        assert!(boundary_growth_probe(3, &[1e-4, 1e-5]).is_err());
    }

    #[test]
    fn gl_embedding_acts_by_congruence() {
        let u = QMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let m = SymplecticMatrix::gl_embedding(&u).unwrap().to_f64();
        let tau = i_identity(2);
        let image = moebius_act(&m, &tau).unwrap();
        let uf = to_complex(&u.to_f64());
        let ut_inv = uf.transpose().try_inverse().unwrap();
        let expected = &ut_inv * tau.tau() * uf.try_inverse().unwrap();
        assert!(max_abs(&(image.tau() - expected)) < 1e-14);
    }
}
