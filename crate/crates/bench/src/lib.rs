//! Criterion benchmarks for the chibar library; see `benches/`.
