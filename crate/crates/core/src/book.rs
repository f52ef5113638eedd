//! The book's chapters, compiled here so every code fence runs under
//! `cargo test --doc`. One module per chapter keeps failures attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/surfaces.md")]
pub mod surfaces {}
#[doc = include_str!("../../../book/src/quivers.md")]
pub mod quivers {}
#[doc = include_str!("../../../book/src/differentials.md")]
pub mod differentials {}
#[doc = include_str!("../../../book/src/periods.md")]
pub mod periods {}
#[doc = include_str!("../../../book/src/coordinates.md")]
pub mod coordinates {}
#[doc = include_str!("../../../book/src/vortex.md")]
pub mod vortex {}
#[doc = include_str!("../../../book/src/experiment.md")]
pub mod experiment {}
