//! Construction, enumeration, classification and numerical discovery of
//! off-shell representations of N-extended one-dimensional supersymmetry.
//!
//! The crate is organized around a handful of exact facts:
//!
//! * a tuple of matrix pairs `(L_I, R_I)` is a representation exactly when
//!   the relations `L_I R_J + L_J R_I = 2 delta_IJ 1` (and the mirrored
//!   `R L` relations) hold — [`algebra`];
//! * among signed permutation matrices (the group BC_d, [`perm`]) those
//!   tuples can be enumerated exhaustively, and for d = 4 their
//!   permutation parts fill one of six quartets of S4 — [`enumerate`];
//! * every such tuple draws as a bipartite edge-colored graph with
//!   dashing parity rules — [`adinkra`];
//! * four-dimensional supermultiplets project onto such tuples by setting
//!   spatial derivatives to zero — [`reduce`];
//! * and representations can be rediscovered numerically by minimizing
//!   the residual as a cost over matrix entries — [`solve`].
//!
//! Core arithmetic is generic over the scalar ([`scalar::Scalar`]); the
//! aliases below name the concrete instantiations used throughout.

pub mod adinkra;
pub mod algebra;
pub mod enumerate;
pub mod mat;
pub mod perm;
pub mod reduce;
pub mod scalar;
pub mod solve;

pub use algebra::{GardenRep, DEFAULT_VERIFY_TOL};
pub use mat::Mat;
pub use perm::{Permutation, QuartetId, SignedPermutation};
pub use scalar::Scalar;

/// Exact rational scalar used by the reduction backend.
pub type Rat = num_rational::Rational64;
/// Exact complex rational scalar for gamma-matrix arithmetic.
pub type CRat = num_complex::Complex<Rat>;

/// Integer matrices: the exact enumeration backend.
pub type ExactMat = Mat<i64>;
/// Floating-point matrices: the solver backend.
pub type RealMat = Mat<f64>;
/// Exact integer representation tuple.
pub type ExactRep = GardenRep<i64>;
/// Floating-point representation tuple.
pub type RealRep = GardenRep<f64>;
