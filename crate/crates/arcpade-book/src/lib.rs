//! The chapters of the book under `book/src`, one module each, so that
//! `cargo test --doc` runs every listing against the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/geometry.md")]
pub mod geometry {}
#[doc = include_str!("../../../book/src/cauchy.md")]
pub mod cauchy {}
#[doc = include_str!("../../../book/src/schemes.md")]
pub mod schemes {}
#[doc = include_str!("../../../book/src/orthopoly.md")]
pub mod orthopoly {}
#[doc = include_str!("../../../book/src/pade.md")]
pub mod pade {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/acceptance.md")]
pub mod acceptance {}
