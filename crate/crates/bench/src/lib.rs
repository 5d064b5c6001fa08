//! Criterion benchmarks for the evolver; see `benches/evolution.rs`.
