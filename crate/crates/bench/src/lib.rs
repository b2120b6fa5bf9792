//! Benchmarks for the decohere kernels; see `benches/`.
