//! Benchmark-only crate; see `benches/`.

/// Probe shapes exercised by every benchmark group.
pub const BENCH_ALPHAS: [f64; 4] = [0.8, 1.0, 2.0, 20.0];
