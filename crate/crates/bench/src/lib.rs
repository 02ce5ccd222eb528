//! Criterion benchmarks for the abelbank spectral kernels; see `benches/`.
