//! Numerical evaluation of the real pole-free solution y(x, t) of the
//! second Painleve-I hierarchy equation in its four asymptotic regimes:
//! algebraic, elliptic (theta-function oscillations), the Painleve-II left
//! edge, and the soliton-chain right edge.
//!
//! The crate is organized as an internally verified stack:
//!
//! * [`specfn`] — elliptic integrals, Jacobi theta, Airy, adaptive quadrature;
//! * [`algebraic`] — the cubic root z0(s), the algebraic g-function and its
//!   sign conditions, regime classification, and the algebraic evaluation;
//! * [`modulation`] — the three modulation equations for the branch points
//!   (beta3, beta2, beta1) solved by Newton continuation, plus a residual
//!   harness for the associated Whitham system;
//! * [`elliptic`] — derived elliptic data, the elliptic g-function with its
//!   jump identities, the Abel map, theta-quotient building blocks, and the
//!   elliptic evaluation in two independently computed forms;
//! * [`critical`] — the Hastings-McLeod boundary-value solver and both
//!   critical-edge expansions;
//! * [`verify`] — the named cross-module consistency checks behind the
//!   `verify` CLI subcommand.
//!
//! All public evaluations are deterministic pure functions, safe to call
//! concurrently.

// reference constants are written with their full decimal expansions, and
// negated comparisons are used deliberately so NaN falls into error paths
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebraic;
pub mod critical;
pub mod elliptic;
pub mod error;
pub mod modulation;
pub mod specfn;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use types::{
    ErrorOrder, ExpansionResult, RegimeLabel, ScalePoint, DEFAULT_EDGE_WIDTH, S_LEFT, S_RIGHT,
};
