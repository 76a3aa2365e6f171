//! Criterion benchmarks for the solver, the causality checker, the prover and the lattice companion; see `benches/engine.rs`.
