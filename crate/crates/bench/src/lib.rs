//! Criterion benchmarks for the vlcsim kernels live under `benches/`.
