//! Criterion benchmarks for anomaly-core live under `benches/`.
