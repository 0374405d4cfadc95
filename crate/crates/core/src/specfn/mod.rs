//! Special-function and quadrature kernel.
//!
//! Everything here is a pure, reentrant evaluation with no shared mutable
//! state: complete elliptic integrals (AGM), the third Jacobi theta function
//! with derivatives, the Airy function, and adaptive Gauss-Kronrod
//! quadrature with endpoint-singularity regularization.

pub mod airy;
pub mod elliptic;
pub mod quad;
pub mod theta;

pub use airy::{airy_ai, AIRY_AI_0, AIRY_AI_PRIME_0};
pub use elliptic::{elliptic_e, elliptic_k, elliptic_k_prime};
pub use quad::{integrate, integrate_complex, QuadResult, QuadratureSpec};
pub use theta::Theta;
