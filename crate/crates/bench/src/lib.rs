//! Benchmark-only crate; see `benches/pipeline.rs`. The library target exists
//! so the package builds in workspace-wide `cargo build` invocations.
