//! The guide's chapters, included here so that `cargo test` compiles and
//! runs every Rust listing in them.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/topology.md")]
pub mod topology {}

#[doc = include_str!("../../../book/src/signal.md")]
pub mod signal {}

#[doc = include_str!("../../../book/src/compression.md")]
pub mod compression {}

#[doc = include_str!("../../../book/src/recovery.md")]
pub mod recovery {}

#[doc = include_str!("../../../book/src/estimators.md")]
pub mod estimators {}

#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}

#[doc = include_str!("../../../book/src/harness.md")]
pub mod harness {}
