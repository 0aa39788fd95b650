//! Criterion benchmarks for the laboratory; see the `benches` directory.
