//! Lattice basis reduction with exact unimodular bookkeeping.
//!
//! The crate reduces an upper-triangular factor `R` of a lattice basis
//! through unimodular column transforms, maintaining the integer
//! transform `Z` in arbitrary precision so that `det(Z) = +-1` can be
//! certified exactly after any run:
//!
//! * [`matcore`] — dense real matrices, Householder QR, Givens rotations,
//!   2-norm condition numbers.
//! * [`intlat`] — exact integer matrices, extended Euclid, 2x2 unimodular
//!   building blocks, fraction-free determinants.
//! * [`lll`] — LLL reduction and the size-reduced/Lovasz predicates.
//! * [`svp`] — Schnorr-Euchner shortest-vector enumeration, a brute-force
//!   oracle, and the LLL-aided solver.
//! * [`kz`] — the two KZ reduction algorithms (baseline expansion on the
//!   original block vs. expansion on the LLL-reduced block) and the KZ
//!   verification predicate.
//! * [`bench`] — reproducible instance generators and the benchmark
//!   harness with CSV reporting.

pub mod bench;
pub mod error;
pub mod intlat;
pub mod kz;
pub mod lll;
pub mod matcore;
pub mod svp;

pub use error::{Error, Result};
pub use intlat::{det_exact, ext_gcd, is_unimodular, unimodular_from_pair, ExtGcdResult, IntMatrix};
pub use kz::{
    expand_basis, is_kz_reduced, kz_reduce_baseline, kz_reduce_modified, KzOptions, KzResult,
    KzStep,
};
pub use lll::{is_lll_reduced, is_size_reduced, lll_reduce, size_reduce, QrzFactorization};
pub use matcore::{
    apply_givens_rows, cond2, givens, qr_factorize, singular_values, GivensRotation, RealMatrix,
};
pub use svp::{
    brute_force_svp, enumerate_shortest, lll_aided_svp, theorem1_bound, SearchLimits, SvpSolution,
};
