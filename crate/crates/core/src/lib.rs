//! Computational toolkit for Siegel modular varieties.
//!
//! The crate is organised bottom-up:
//!
//! * [`symplectic`]: exact arithmetic in `Sp(g, Q)` and the congruence
//!   subgroups `Γ_g(n)`.
//! * [`siegelspace`]: the Siegel upper half space, the Möbius action, the
//!   Borel embedding into the period domain and the Bergman metric.
//! * [`hodge`]: weight-one Hodge structures, the Hodge metric, the
//!   Kodaira–Spencer (Higgs) map and finite-difference curvature checks.
//! * [`fourier`]: Fourier expansions indexed by half-integral matrices, the
//!   Siegel Φ operator and cusp tests.
//! * [`thetaforms`]: theta constants, lattice theta series and the named
//!   cusp forms χ10, χ18 and the Schottky difference.
//! * [`toroidal`]: cone and monoid combinatorics of toroidal charts.
//! * [`generaltype`]: general-type certificates from cusp-form evidence.

// Index loops mirror the matrix formulas; `!(x > 0.0)` also rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod fourier;
pub mod generaltype;
pub mod hodge;
pub mod numeric;
pub mod siegelspace;
pub mod symplectic;
pub mod thetaforms;
pub mod toroidal;

pub use error::{Error, Result};

/// Tolerance for structural identities (symmetry, isotropy).
pub const TOL_STRUCTURAL: f64 = 1e-12;
/// Tolerance for algebraic identities evaluated in floating point.
pub const TOL_ALGEBRAIC: f64 = 1e-9;
/// Tolerance for claims checked through finite differences.
pub const TOL_FINITE_DIFF: f64 = 1e-4;
