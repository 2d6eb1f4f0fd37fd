//! Criterion benchmarks for the operator engines.
