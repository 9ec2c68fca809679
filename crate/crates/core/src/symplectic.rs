//! The standard symplectic lattice `(V_Z, ψ)`, the group `Sp(g, Q)` and the
//! principal congruence subgroups `Γ_g(n)`.
//!
//! Everything here is exact. The form is fixed to `ψ = (0, -I_g; I_g, 0)`, so
//! that `ψ(e_i, e_{g+i}) = -1` for `1 ≤ i ≤ g` and all other pairings between
//! basis vectors vanish.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rat, QMatrix};

/// The fixed alternating form on `Q^{2g}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    g: usize,
}

impl SymplecticForm {
    pub fn new(g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidParameter("degree g must be positive".into()));
        }
        Ok(SymplecticForm { g })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn matrix(&self) -> QMatrix {
        psi_matrix(self.g)
    }

    /// `ᵗu ψ v`.
    pub fn pairing(&self, u: &[BigRational], v: &[BigRational]) -> Result<BigRational> {
        let n = 2 * self.g;
        for w in [u, v] {
            if w.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: w.len(),
                });
            }
        }
        // ᵗu ψ v = Σ_i (u_{g+i} v_i - u_i v_{g+i})
        let g = self.g;
        Ok((0..g).fold(BigRational::zero(), |acc, i| {
            acc + &u[g + i] * &v[i] - &u[i] * &v[g + i]
        }))
    }
}

pub fn psi_matrix(g: usize) -> QMatrix {
    let mut m = QMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        m[(i, g + i)] = rat(-1);
        m[(g + i, i)] = rat(1);
    }
    m
}

/// `ᵗM ψ M = ψ`, exactly.
pub fn is_symplectic(m: &QMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.rows().is_multiple_of(2) || m.rows() == 0 {
        return Err(Error::OddDimension(m.rows()));
    }
    let psi = psi_matrix(m.rows() / 2);
    Ok(&(&m.transpose() * &psi) * m == psi)
}

/// A validated element of `Sp(g, Q)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymplecticMatrix {
    g: usize,
    m: QMatrix,
}

impl SymplecticMatrix {
    pub fn new(m: QMatrix) -> Result<Self> {
        if !is_symplectic(&m)? {
            return Err(Error::NotSymplectic);
        }
        Ok(SymplecticMatrix { g: m.rows() / 2, m })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(QMatrix::from_i64_rows(rows)?)
    }

    pub fn identity(g: usize) -> Self {
        SymplecticMatrix {
            g,
            m: QMatrix::identity(2 * g),
        }
    }

    /// `J = (0, -I; I, 0)`.
    pub fn j(g: usize) -> Self {
        SymplecticMatrix { g, m: psi_matrix(g) }
    }

    /// `(I, B; 0, I)` for symmetric `B`.
    pub fn translation(b: &QMatrix) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::NotSquare {
                rows: b.rows(),
                cols: b.cols(),
            });
        }
        if *b != b.transpose() {
            return Err(Error::InvalidParameter("translation block must be symmetric".into()));
        }
        let g = b.rows();
        let m = QMatrix::from_blocks(
            &QMatrix::identity(g),
            b,
            &QMatrix::zeros(g, g),
            &QMatrix::identity(g),
        );
        Ok(SymplecticMatrix { g, m })
    }

    /// `(ᵗU⁻¹, 0; 0, U)` for invertible `U`.
    pub fn gl_embedding(u: &QMatrix) -> Result<Self> {
        let g = u.rows();
        let ut_inv = u.transpose().inverse()?;
        let m = QMatrix::from_blocks(&ut_inv, &QMatrix::zeros(g, g), &QMatrix::zeros(g, g), u);
        Ok(SymplecticMatrix { g, m })
    }

    /// `(A, B; 0, D)` with `D = ᵗA⁻¹` and `ᵗB D` symmetric; used by the
    /// Fourier coefficient symmetry rule with `A = V⁻¹, B = U, D = ᵗV`.
    pub fn parabolic(v: &QMatrix, u: &QMatrix) -> Result<Self> {
        let g = v.rows();
        let m = QMatrix::from_blocks(&v.inverse()?, u, &QMatrix::zeros(g, g), &v.transpose());
        Self::new(m)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.m
    }

    pub fn a(&self) -> QMatrix {
        self.m.block(0, 0, self.g, self.g)
    }
    pub fn b(&self) -> QMatrix {
        self.m.block(0, self.g, self.g, self.g)
    }
    pub fn c(&self) -> QMatrix {
        self.m.block(self.g, 0, self.g, self.g)
    }
    pub fn d(&self) -> QMatrix {
        self.m.block(self.g, self.g, self.g, self.g)
    }

    pub fn is_integral(&self) -> bool {
        self.m.is_integral()
    }

    pub fn det(&self) -> BigRational {
        self.m.det().expect("symplectic matrices are square")
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Result<Self> {
        if self.g != other.g {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.g,
                got: 2 * other.g,
            });
        }
        Ok(SymplecticMatrix {
            g: self.g,
            m: &self.m * &other.m,
        })
    }

    /// `M⁻¹ = -ψ ᵗM ψ`.
    pub fn inverse(&self) -> Self {
        let psi = psi_matrix(self.g);
        let m = (&(&psi * &self.m.transpose()) * &psi).scale(&rat(-1));
        SymplecticMatrix { g: self.g, m }
    }

    pub fn apply(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        self.m.mul_vec(v)
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        self.m.to_f64()
    }
}

/// The level `n ≥ 1` of `Γ_g(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CongruenceLevel(u64);

impl CongruenceLevel {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("level must be at least 1".into()));
        }
        Ok(CongruenceLevel(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `Γ_g(n)` for `n ≥ 3` is taken to be neat; no torsion test is run.
    pub fn is_neat(self) -> bool {
        self.0 >= 3
    }
}

/// `M ≡ I_{2g} (mod n)`.
pub fn congruence_membership(m: &SymplecticMatrix, level: CongruenceLevel) -> Result<bool> {
    if !m.is_integral() {
        return Err(Error::NotIntegral);
    }
    let n = BigInt::from(level.get());
    let diff = m.matrix() - &QMatrix::identity(2 * m.g());
    let size = 2 * m.g();
    Ok((0..size).all(|i| (0..size).all(|j| diff[(i, j)].numer().is_multiple_of(&n))))
}

/// Generators used to sample `Sp(2g, Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    J,
    Translation,
    GlEmbedding,
}

pub fn random_symmetric_integral<R: Rng + ?Sized>(g: usize, bound: i64, rng: &mut R) -> QMatrix {
    let mut b = QMatrix::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            let x = rat(rng.gen_range(-bound..=bound));
            b[(i, j)] = x.clone();
            b[(j, i)] = x;
        }
    }
    b
}

/// An elementary `GL(g, Z)` matrix: a transvection `I ± E_ij` or a sign flip.
pub fn random_elementary_gl<R: Rng + ?Sized>(g: usize, rng: &mut R) -> QMatrix {
    let mut u = QMatrix::identity(g);
    if g == 1 || rng.gen_bool(0.2) {
        let i = rng.gen_range(0..g);
        u[(i, i)] = rat(-1);
    } else {
        let i = rng.gen_range(0..g);
        let mut j = rng.gen_range(0..g - 1);
        if j >= i {
            j += 1;
        }
        u[(i, j)] = rat(if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    u
}

pub fn random_generator<R: Rng + ?Sized>(g: usize, rng: &mut R) -> (GeneratorKind, SymplecticMatrix) {
    match rng.gen_range(0..3) {
        0 => (GeneratorKind::J, SymplecticMatrix::j(g)),
        1 => {
            let b = random_symmetric_integral(g, 2, rng);
            (
                GeneratorKind::Translation,
                SymplecticMatrix::translation(&b).expect("symmetric by construction"),
            )
        }
        _ => {
            let u = random_elementary_gl(g, rng);
            (
                GeneratorKind::GlEmbedding,
                SymplecticMatrix::gl_embedding(&u).expect("elementary matrices are invertible"),
            )
        }
    }
}

/// A random product of `len` generators of `Sp(2g, Z)`.
pub fn random_word<R: Rng + ?Sized>(g: usize, len: usize, rng: &mut R) -> SymplecticMatrix {
    (0..len).fold(SymplecticMatrix::identity(g), |acc, _| {
        let (_, s) = random_generator(g, rng);
        acc.compose(&s).expect("same degree")
    })
}

/// `(I, nB; 0, I)` for a random symmetric integral `B`: an element of `Γ_g(n)`.
pub fn random_level_translation<R: Rng + ?Sized>(g: usize, n: u64, rng: &mut R) -> SymplecticMatrix {
    let b = random_symmetric_integral(g, 2, rng).scale(&BigRational::from_integer(BigInt::from(n)));
    SymplecticMatrix::translation(&b).expect("symmetric by construction")
}

pub fn unit_vector(n: usize, i: usize) -> Vec<BigRational> {
    (0..n)
        .map(|k| if k == i { BigRational::one() } else { BigRational::zero() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(g: usize, i: usize) -> Vec<BigRational> {
        unit_vector(2 * g, i - 1)
    }

    #[test]
    fn pairing_on_basis_vectors() {
        let psi = SymplecticForm::new(2).unwrap();
        assert_eq!(psi.pairing(&e(2, 1), &e(2, 3)).unwrap(), rat(-1));
        assert_eq!(psi.pairing(&e(2, 3), &e(2, 1)).unwrap(), rat(1));
        assert_eq!(psi.pairing(&e(2, 1), &e(2, 2)).unwrap(), rat(0));
        assert_eq!(psi.pairing(&e(2, 2), &e(2, 4)).unwrap(), rat(-1));
    }

    #[test]
    fn pairing_matches_matrix_product() {
        let psi = SymplecticForm::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let u: Vec<_> = (0..6).map(|_| rat(rng.gen_range(-9..=9))).collect();
            let v: Vec<_> = (0..6).map(|_| rat(rng.gen_range(-9..=9))).collect();
            let mv = psi.matrix().mul_vec(&v).unwrap();
            let direct = u.iter().zip(&mv).fold(BigRational::zero(), |a, (x, y)| a + x * y);
            assert_eq!(psi.pairing(&u, &v).unwrap(), direct);
            assert!(psi.pairing(&u, &u).unwrap().is_zero());
        }
    }

    #[test]
    fn pairing_dimension_mismatch() {
        let psi = SymplecticForm::new(2).unwrap();
        assert_eq!(
            psi.pairing(&e(2, 1), &unit_vector(3, 0)),
            Err(Error::DimensionMismatch { expected: 4, got: 3 })
        );
    }

    #[test]
    fn form_invariants() {
        let m = psi_matrix(3);
        assert_eq!(m.transpose().scale(&rat(-1)), m);
        assert_eq!(m.det().unwrap(), rat(1));
    }

    #[test]
    fn symplectic_examples() {
        assert!(is_symplectic(&QMatrix::identity(4)).unwrap());
        assert!(is_symplectic(&psi_matrix(2)).unwrap());
        let mut m = QMatrix::identity(4);
        // 1-based (g+1, 2) = (3, 2)
        m[(2, 1)] = rat(1);
        assert!(!is_symplectic(&m).unwrap());
        assert_eq!(is_symplectic(&QMatrix::identity(3)), Err(Error::OddDimension(3)));
    }

    #[test]
    fn congruence_examples() {
        let id = SymplecticMatrix::identity(2);
        for n in 1..8 {
            assert!(congruence_membership(&id, CongruenceLevel::new(n).unwrap()).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6 {
            let t = random_level_translation(2, n, &mut rng);
            assert!(is_symplectic(t.matrix()).unwrap());
            assert!(congruence_membership(&t, CongruenceLevel::new(n).unwrap()).unwrap());
        }
        let j = SymplecticMatrix::j(2);
        assert!(!congruence_membership(&j, CongruenceLevel::new(2).unwrap()).unwrap());
        assert!(congruence_membership(&j, CongruenceLevel::new(1).unwrap()).unwrap());
    }

    #[test]
    fn congruence_rejects_rational_matrix() {
        let half = QMatrix::from_rows(vec![
            vec![BigRational::new(1.into(), 2.into()), rat(0)],
            vec![rat(0), rat(2)],
        ])
        .unwrap();
        let m = SymplecticMatrix::gl_embedding(&half).unwrap();
        assert!(is_symplectic(m.matrix()).unwrap());
        assert_eq!(
            congruence_membership(&m, CongruenceLevel::new(2).unwrap()),
            Err(Error::NotIntegral)
        );
    }

    #[test]
    fn level_zero_rejected() {
        assert!(CongruenceLevel::new(0).is_err());
        assert!(!CongruenceLevel::new(2).unwrap().is_neat());
        assert!(CongruenceLevel::new(3).unwrap().is_neat());
    }

    #[test]
    fn inverse_is_two_sided() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let m = random_word(2, 6, &mut rng);
            let inv = m.inverse();
            assert_eq!(m.compose(&inv).unwrap(), SymplecticMatrix::identity(2));
            assert!(is_symplectic(inv.matrix()).unwrap());
        }
    }

    #[test]
    fn normality_of_congruence_subgroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2u64, 3, 5] {
            let level = CongruenceLevel::new(n).unwrap();
            for _ in 0..10 {
                let m = random_level_translation(2, n, &mut rng);
                let gamma = random_word(2, 5, &mut rng);
                let conj = gamma.compose(&m).unwrap().compose(&gamma.inverse()).unwrap();
                assert!(congruence_membership(&conj, level).unwrap());
            }
        }
    }
}
