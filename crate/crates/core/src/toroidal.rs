//! Cone and monoid combinatorics of toroidal charts at the standard minimal
//! cusp, and the level-change monomial maps between them.
//!
//! Symmetric matrices are written in ζ-coordinates: the `g` diagonal entries
//! first, then the entries above the diagonal in row-major order. For `g = 2`
//! the form `[[a, b], [b, c]]` has coordinates `(a, c, b)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{format_rational, rat, QMatrix};

pub fn zeta_dim(g: usize) -> usize {
    g * (g + 1) / 2
}

fn zeta_pairs(g: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..g).map(|i| (i, i)).collect();
    for i in 0..g {
        for j in i + 1..g {
            out.push((i, j));
        }
    }
    out
}

pub fn sym_to_zeta(m: &[Vec<i64>]) -> Vec<i64> {
    zeta_pairs(m.len()).into_iter().map(|(i, j)| m[i][j]).collect()
}

pub fn zeta_to_sym(g: usize, z: &[i64]) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0; g]; g];
    for ((i, j), &v) in zeta_pairs(g).into_iter().zip(z) {
        m[i][j] = v;
        m[j][i] = v;
    }
    m
}

/// `ᵗV Q V` in ζ-coordinates.
pub fn gl_act(v: &[Vec<i64>], z: &[i64]) -> Vec<i64> {
    let g = v.len();
    let q = zeta_to_sym(g, z);
    let mut out = vec![vec![0; g]; g];
    for i in 0..g {
        for j in 0..g {
            out[i][j] = (0..g)
                .flat_map(|k| (0..g).map(move |l| (k, l)))
                .map(|(k, l)| v[k][i] * q[k][l] * v[l][j])
                .sum();
        }
    }
    sym_to_zeta(&out)
}

/// The lattice `L(l) = l·L` at the standard cusp, with its dual `M(l)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspLattice {
    pub g: usize,
    pub level: u64,
}

impl CuspLattice {
    pub fn new(g: usize, level: u64) -> Result<Self> {
        if g == 0 || level == 0 {
            return Err(Error::InvalidParameter("genus and level must be positive".into()));
        }
        Ok(CuspLattice { g, level })
    }

    /// Columns `ζ^l_α = l·ζ_α`.
    pub fn basis(&self) -> QMatrix {
        QMatrix::identity(zeta_dim(self.g)).scale(&rat(self.level as i64))
    }

    /// Rows `δ^l_α = δ_α / l`.
    pub fn dual_basis(&self) -> QMatrix {
        let l = BigRational::new(BigInt::one(), BigInt::from(self.level));
        QMatrix::identity(zeta_dim(self.g)).scale(&l)
    }

    /// `⟨δ^l_α, ζ^l_β⟩`; the identity.
    pub fn pairing(&self) -> QMatrix {
        &self.dual_basis() * &self.basis()
    }
}

/// A rational polyhedral cone in ζ-coordinates, given by its rays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeSigma {
    pub g: usize,
    pub rays: Vec<Vec<i64>>,
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |a, &b| a.gcd(&b))
}

impl ConeSigma {
    /// Validates primitive, linearly independent rays. Independence makes the
    /// cone simplicial and hence strongly convex.
    pub fn new(g: usize, rays: Vec<Vec<i64>>) -> Result<Self> {
        let d = zeta_dim(g);
        if rays.is_empty() {
            return Err(Error::InvalidParameter("a cone needs at least one ray".into()));
        }
        for r in &rays {
            if r.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: r.len() });
            }
            if gcd_all(r) != 1 {
                return Err(Error::InvalidParameter(format!("ray {r:?} is not primitive")));
            }
        }
        let cone = ConeSigma { g, rays };
        if cone.rank() != cone.rays.len() {
            return Err(Error::Unsupported("non-simplicial cones are not supported".into()));
        }
        Ok(cone)
    }

    pub fn dimension(&self) -> usize {
        self.rays.len()
    }

    pub fn is_top_dimensional(&self) -> bool {
        self.dimension() == zeta_dim(self.g)
    }

    fn ray_matrix(&self) -> QMatrix {
        // rays as columns
        let d = zeta_dim(self.g);
        QMatrix::from_fn(d, self.rays.len(), |i, j| rat(self.rays[j][i]))
    }

    fn rank(&self) -> usize {
        let m = self.ray_matrix();
        let gram = &m.transpose() * &m;
        if gram.det().map(|d| d.is_zero()).unwrap_or(true) {
            0
        } else {
            self.rays.len()
        }
    }

    /// `det` of the ray matrix, for top-dimensional cones.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_top_dimensional() {
            return Err(Error::Unsupported("determinant of a cone that is not top-dimensional".into()));
        }
        Ok(self.ray_matrix().det()?.to_integer())
    }

    /// Rays extend to a lattice basis: the maximal minors have gcd 1.
    pub fn is_smooth(&self) -> bool {
        let m = self.ray_matrix();
        let (d, k) = (zeta_dim(self.g), self.rays.len());
        let mut g = BigInt::zero();
        for rows in combinations(d, k) {
            let minor = QMatrix::from_fn(k, k, |i, j| m[(rows[i], j)].clone());
            g = g.gcd(&minor.det().expect("square").to_integer());
        }
        g.is_one()
    }

    /// The cone's image under `Q ↦ ᵗVQV`.
    pub fn transform(&self, v: &[Vec<i64>]) -> ConeSigma {
        ConeSigma {
            g: self.g,
            rays: self.rays.iter().map(|r| gl_act(v, r)).collect(),
        }
    }

    fn ray_set(&self) -> Vec<Vec<i64>> {
        let mut r = self.rays.clone();
        r.sort();
        r
    }

    pub fn same_cone(&self, other: &ConeSigma) -> bool {
        self.ray_set() == other.ray_set()
    }

    /// Coordinates of `p` in the ray basis (top-dimensional cones).
    fn ray_coordinates(&self, p: &[i64]) -> Result<Vec<BigRational>> {
        let inv = self.ray_matrix().inverse()?;
        let pv: Vec<BigRational> = p.iter().map(|&x| rat(x)).collect();
        inv.mul_vec(&pv)
    }

    pub fn contains_in_interior(&self, p: &[i64]) -> Result<bool> {
        Ok(self.ray_coordinates(p)?.iter().all(|x| x.is_positive()))
    }

    fn require_smooth_top(&self) -> Result<()> {
        if !self.is_top_dimensional() {
            return Err(Error::Unsupported("cone is not top-dimensional".into()));
        }
        if !self.is_smooth() {
            return Err(Error::Unsupported(
                "cone is not smooth; Hilbert bases of singular cones are not implemented".into(),
            ));
        }
        Ok(())
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Faces of a simplicial cone, as sets of ray indices, grouped by dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceLattice {
    pub faces_by_dimension: Vec<Vec<Vec<usize>>>,
}

impl FaceLattice {
    pub fn of(cone: &ConeSigma) -> Self {
        let n = cone.dimension();
        FaceLattice {
            faces_by_dimension: (0..=n).map(|k| combinations(n, k)).collect(),
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.faces_by_dimension.iter().map(Vec::len).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Neighbor {
    /// Rays of the principal cone on the shared facet.
    pub shared_facet: Vec<usize>,
    pub v: Vec<Vec<i64>>,
    pub cone: ConeSigma,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrincipalConeFixture {
    pub cone: ConeSigma,
    pub faces: FaceLattice,
    pub neighbors: Vec<Neighbor>,
    /// Sampled interior points, each of which lies in the interior of exactly
    /// one of the principal cone and its neighbors.
    pub samples_checked: usize,
    pub locally_admissible: bool,
}

/// GL(2, Z) matrices with entries in `[−bound, bound]`, in a fixed order.
fn small_gl2(bound: i64) -> Vec<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    let r = -bound..=bound;
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    if (a * d - b * c).abs() == 1 {
                        out.push(vec![vec![a, b], vec![c, d]]);
                    }
                }
            }
        }
    }
    out
}

/// `r(v) = v·ᵗv` for `v ∈ Z²`, in ζ-coordinates.
fn rank_one(v: [i64; 2]) -> Vec<i64> {
    vec![v[0] * v[0], v[1] * v[1], v[0] * v[1]]
}

/// The cone spanned by `x²`, `y²` and `(x − y)²` in `Sym²(R²)`, its three
/// neighbors across its facets, and GL(2, Z) elements carrying it onto each.
pub fn principal_cone_fixture(g: usize) -> Result<PrincipalConeFixture> {
    if g != 2 {
        return Err(Error::Unsupported(format!("principal cone fixture exists for g = 2 only, got {g}")));
    }
    let u = [[1, 0], [0, 1], [1, -1]];
    let cone = ConeSigma::new(2, u.iter().map(|&v| rank_one(v)).collect())?;
    let faces = FaceLattice::of(&cone);

    // Across the facet {u_i, u_j}, the Farey neighbor of u_k = ±(u_i ∓ u_j)
    // is the other combination.
    let mut neighbors = Vec::new();
    let candidates = small_gl2(2);
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (0, 2, 1)] {
        let (a, b) = (u[i], u[j]);
        let plus = [a[0] + b[0], a[1] + b[1]];
        let minus = [a[0] - b[0], a[1] - b[1]];
        let third = if rank_one(plus) == cone.rays[k] { minus } else { plus };
        let target = ConeSigma::new(2, vec![rank_one(a), rank_one(b), rank_one(third)])?;
        let v = candidates
            .iter()
            .find(|v| cone.transform(v).same_cone(&target))
            .cloned()
            .ok_or_else(|| Error::NumericalDegeneracy("no small GL(2, Z) element reaches a neighbor".into()))?;
        neighbors.push(Neighbor {
            shared_facet: vec![i, j],
            v,
            cone: target,
        });
    }

    // Points near each facet on both sides, plus generic interior points.
    let mut all = vec![cone.clone()];
    all.extend(neighbors.iter().map(|n| n.cone.clone()));
    let mut samples: Vec<Vec<i64>> = Vec::new();
    for c in &all {
        for w in [[1, 1, 1], [5, 5, 1], [5, 1, 5], [1, 5, 5], [2, 3, 7]] {
            samples.push((0..3).map(|t| (0..3).map(|r| w[r] * c.rays[r][t]).sum()).collect());
        }
    }
    let mut ok = true;
    for p in &samples {
        let hits = all.iter().filter(|c| c.contains_in_interior(p).unwrap_or(false)).count();
        ok &= hits == 1;
    }
    Ok(PrincipalConeFixture {
        cone,
        faces,
        neighbors,
        samples_checked: samples.len(),
        locally_admissible: ok,
    })
}

/// Generators of `σ^∨ ∩ M(l)` for a smooth top cone: the dual basis of the
/// rays, scaled by `1/l`. Taking the rays as the basis `ζ_α`, these are the
/// `δ^l_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualGenerators {
    pub level: u64,
    /// One generator per row, in δ-coordinates.
    pub generators: QMatrix,
}

impl DualGenerators {
    /// `⟨generator_α, l·ray_β⟩`, the identity for the level-`l` rays.
    pub fn pairing_with_level_rays(&self, cone: &ConeSigma) -> QMatrix {
        let rays = cone.ray_matrix().scale(&rat(self.level as i64));
        &self.generators * &rays
    }

    /// Every generator is non-negative on every ray, and vanishes on exactly
    /// the rays of one facet.
    pub fn check_duality(&self, cone: &ConeSigma) -> bool {
        let p = &self.generators * &cone.ray_matrix();
        let n = cone.dimension();
        (0..n).all(|a| {
            let row: Vec<_> = (0..n).map(|b| p[(a, b)].clone()).collect();
            row.iter().all(|x| !x.is_negative()) && row.iter().filter(|x| x.is_zero()).count() == n - 1
        })
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.generators.to_string_rows()
    }
}

pub fn dual_monoid_generators(cone: &ConeSigma, level: u64) -> Result<DualGenerators> {
    if level == 0 {
        return Err(Error::InvalidParameter("level must be positive".into()));
    }
    cone.require_smooth_top()?;
    let inv = cone.ray_matrix().inverse()?;
    let scale = BigRational::new(BigInt::one(), BigInt::from(level));
    Ok(DualGenerators {
        level,
        generators: inv.scale(&scale),
    })
}

/// The chart map `A(n) → A(m)` on a smooth top cone: target coordinate
/// `x_α` pulls back to `∏_β y_β^{E_αβ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialChartMap {
    pub n: u64,
    pub m: u64,
    pub exponents: QMatrix,
}

impl MonomialChartMap {
    pub fn exponents_i64(&self) -> Vec<Vec<i64>> {
        self.exponents.to_i64().expect("exponents are integral")
    }

    /// Exponents of the composite `A(n) → A(m) → A(k)` given `self = (n, m)`
    /// and `outer = (m, k)`.
    pub fn then(&self, outer: &MonomialChartMap) -> Result<MonomialChartMap> {
        if outer.n != self.m {
            return Err(Error::InvalidParameter("chart maps do not compose".into()));
        }
        Ok(MonomialChartMap {
            n: self.n,
            m: outer.m,
            exponents: &outer.exponents * &self.exponents,
        })
    }
}

pub fn monomial_map(n: u64, m: u64, cone: &ConeSigma) -> Result<MonomialChartMap> {
    if m == 0 || n == 0 || !n.is_multiple_of(m) {
        return Err(Error::InvalidParameter(format!("{m} does not divide {n}")));
    }
    let target = dual_monoid_generators(cone, m)?.generators;
    let source = dual_monoid_generators(cone, n)?.generators;
    // target rows = E · source rows
    let exponents = &target * &source.inverse()?;
    let d = exponents.rows();
    for a in 0..d {
        for b in 0..d {
            let e = &exponents[(a, b)];
            if !e.is_integer() || e.is_negative() {
                return Err(Error::NumericalDegeneracy(format!(
                    "exponent {} is not a non-negative integer",
                    format_rational(e)
                )));
            }
        }
    }
    Ok(MonomialChartMap { n, m, exponents })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorPullback {
    pub n: u64,
    pub m: u64,
    pub expected: u64,
    /// Multiplicity of `{y_α = 0}` in the pullback of `{x_α = 0}`.
    pub multiplicities: Vec<i64>,
    /// Each target divisor pulls back to its own source divisor only.
    pub diagonal: bool,
    pub consistent: bool,
}

pub fn verify_divisor_pullback(n: u64, m: u64, cone: &ConeSigma) -> Result<DivisorPullback> {
    let map = monomial_map(n, m, cone)?;
    let e = map.exponents_i64();
    let d = e.len();
    let multiplicities: Vec<i64> = (0..d).map(|a| e[a][a]).collect();
    let diagonal = (0..d).all(|a| (0..d).all(|b| a == b || e[a][b] == 0));
    let expected = n / m;
    let consistent = diagonal && multiplicities.iter().all(|&x| x.to_u64() == Some(expected));
    Ok(DivisorPullback {
        n,
        m,
        expected,
        multiplicities,
        diagonal,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> PrincipalConeFixture {
        principal_cone_fixture(2).unwrap()
    }

    #[test]
    fn lattice_pairing_is_identity() {
        for l in [1, 2, 5] {
            let c = CuspLattice::new(3, l).unwrap();
            assert_eq!(c.pairing(), QMatrix::identity(6));
        }
    }

    #[test]
    fn principal_cone_is_smooth() {
        let f = fixture();
        assert_eq!(f.cone.rays.len(), 3);
        assert_eq!(f.cone.determinant().unwrap().abs(), BigInt::one());
        assert!(f.cone.is_smooth());
        assert_eq!(f.faces.sizes(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn upper_unipotent_gives_adjacent_cone() {
        let f = fixture();
        let v = vec![vec![1, 1], vec![0, 1]];
        let image = f.cone.transform(&v);
        assert!(!image.same_cone(&f.cone));
        let shared = image.rays.iter().filter(|r| f.cone.rays.contains(r)).count();
        assert_eq!(shared, 2);
        assert!(f.neighbors.iter().any(|n| n.cone.same_cone(&image)));
    }

    #[test]
    fn neighbors_tile_locally() {
        let f = fixture();
        assert_eq!(f.neighbors.len(), 3);
        assert!(f.locally_admissible);
        for n in &f.neighbors {
            assert!(f.cone.transform(&n.v).same_cone(&n.cone));
        }
    }

    #[test]
    fn dual_generators() {
        let f = fixture();
        let d1 = dual_monoid_generators(&f.cone, 1).unwrap();
        assert_eq!(d1.generators.rows(), 3);
        assert!(d1.check_duality(&f.cone));
        let d2 = dual_monoid_generators(&f.cone, 2).unwrap();
        assert_eq!(d2.generators, d1.generators.scale(&BigRational::new(1.into(), 2.into())));
        assert_eq!(d2.pairing_with_level_rays(&f.cone), QMatrix::identity(3));
    }

    #[test]
    fn singular_cone_is_declined() {
        let c = ConeSigma::new(2, vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 2]]).unwrap();
        assert!(!c.is_smooth());
        assert!(matches!(dual_monoid_generators(&c, 1), Err(Error::Unsupported(_))));
        assert!(ConeSigma::new(2, vec![vec![2, 0, 0]]).is_err());
    }

    #[test]
    fn monomial_maps() {
        let f = fixture();
        let id = monomial_map(4, 4, &f.cone).unwrap();
        assert_eq!(id.exponents, QMatrix::identity(3));
        let m = monomial_map(6, 2, &f.cone).unwrap();
        assert_eq!(m.exponents_i64(), vec![vec![3, 0, 0], vec![0, 3, 0], vec![0, 0, 3]]);
        assert!(monomial_map(6, 4, &f.cone).is_err());
    }

    #[test]
    fn functoriality() {
        let f = fixture();
        for (n, m) in [(6, 2), (6, 3), (4, 2), (12, 4)] {
            let composite = monomial_map(n, m, &f.cone).unwrap().then(&monomial_map(m, 1, &f.cone).unwrap()).unwrap();
            assert_eq!(composite.exponents, monomial_map(n, 1, &f.cone).unwrap().exponents);
        }
    }

    #[test]
    fn pullback_tables() {
        let f = fixture();
        for (n, m, k) in [(2, 1, 2), (3, 1, 3), (4, 2, 2), (6, 2, 3), (6, 3, 2), (5, 5, 1)] {
            let t = verify_divisor_pullback(n, m, &f.cone).unwrap();
            assert!(t.consistent);
            assert_eq!(t.multiplicities, vec![k; 3]);
        }
    }

    #[test]
    fn fixture_requires_genus_two() {
        assert!(matches!(principal_cone_fixture(3), Err(Error::Unsupported(_))));
    }
}
