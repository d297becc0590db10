//! Exact-arithmetic engine for Virasoro Verma modules.
//!
//! Everything here is computed over arbitrary-precision rationals (or a
//! quadratic extension of them where the Feigin-Fuchs line demands it);
//! there is no floating-point path anywhere. The crate is `no_std`
//! compatible (it needs `alloc` only), so the algorithmic core carries no
//! IO. File formats and the command line live in the companion
//! `virasoro-cli` crate.
//!
//! Module map:
//! - [`scalar`]: exact rationals and `a + b*sqrt(d)` quadratic scalars.
//! - [`verma`]: PBW monomials, sparse Verma vectors, the mode action
//!   `L(m)`, standard expressions, the index, and vertex-operator modes
//!   of vacuum-module vectors.
//! - [`linalg`]: dense exact linear algebra (kernels, solving, determinants).
//! - [`structure`]: Gram matrices, the Kac determinant, singular vectors,
//!   Feigin-Fuchs block classification, and the `(W1, W2, pi)` projection
//!   split together with its submodule/quotient closures.
//! - [`echelon`]: submodules of finite direct sums of Verma modules,
//!   their row-echelon singular generators, and the conjugated projection
//!   `rho . pi_N . rho^{-1}`.
//! - [`laurent`]: multivariate Laurent polynomials and rational functions
//!   with poles confined to `x_i = 0` and `x_i = x_j`.
//! - [`correlator`]: closed-form projected products of stress-tensor
//!   insertions, exact matrix coefficients with a projection insertion,
//!   brute-force truncated series oracles, and the N-weight-degree check.
//! - [`ext`]: level-truncated homs, derivations/1-cocycles, the extension
//!   glue in both directions, inner-derivation detection, and the
//!   extension/cohomology round trip.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod correlator;
pub mod echelon;
pub mod ext;
pub mod laurent;
pub mod linalg;
pub mod scalar;
pub mod structure;
pub mod verma;

pub use scalar::{QuadScalar, Scalar};
pub use verma::{ModuleParams, PBWMonomial, VermaVector};
