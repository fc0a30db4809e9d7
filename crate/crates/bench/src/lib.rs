//! Benchmark-only package; see `benches/simulation.rs`.
