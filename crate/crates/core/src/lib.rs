//! Numerical laboratory for the real-axis Tauberian route to the prime
//! number theorem.
//!
//! The crate sieves the von Mangoldt function, tabulates Chebyshev's ψ,
//! evaluates ζ on the real axis with error bounds, computes the Laplace
//! transform g(s) of ψ(eˣ) by three routes, and checks the hypotheses and
//! conclusions of Tauberian theorems on sampled functions.
//!
//! ```
//! use tauberlab::psi::psi;
//! use tauberlab::zeta::zeta_remainder;
//!
//! let p = psi(100.0).unwrap();
//! assert!((p.psi - 94.0453112293574).abs() < 1e-10);
//!
//! // ζ(s) − 1/(s−1) stays finite as s → 1⁺.
//! let r = zeta_remainder(1.0 + 1e-9, 1e-12).unwrap();
//! assert!((r.value - 0.5772156649).abs() < 1e-8);
//! ```

pub mod error;
pub mod extrapolate;
pub mod format;
pub mod psi;
pub mod quad;
pub mod sieve;
pub mod sum;
pub mod tauber;
pub mod transforms;
pub mod zeta;

pub use error::{Error, Result};
pub use psi::PsiTable;
pub use sieve::{MangoldtBlock, MangoldtSieve};
pub use zeta::{BoundedValue, Method};
