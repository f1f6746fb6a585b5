//! Benchmark-only crate; the timed code lives under benches/.
