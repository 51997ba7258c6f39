//! Guide chapters compiled as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/sieve.md")]
pub mod sieve {}

#[doc = include_str!("../../../book/src/psi.md")]
pub mod psi {}

#[doc = include_str!("../../../book/src/zeta.md")]
pub mod zeta {}

#[doc = include_str!("../../../book/src/transforms.md")]
pub mod transforms {}

#[doc = include_str!("../../../book/src/tauberian.md")]
pub mod tauberian {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
