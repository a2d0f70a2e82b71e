//! Criterion benchmarks for the mechanisms; see `benches/`.
