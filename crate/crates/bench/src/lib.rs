//! Benchmark-only crate; see `benches/`.
pub use dotqip_core as core;
