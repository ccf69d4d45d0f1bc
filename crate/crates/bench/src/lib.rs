//! Criterion benchmarks for `gelfand-core`; see `benches/`.
