//! Criterion benchmarks for `lgn-core`; see `benches/`.
//!
//! Run with `cargo bench -p lgn-bench`.

use std::sync::Arc;

use lgn_core::{LgnAlgebra, Mode, Surface};

/// The algebra of `(g, n)` in the given mode.
pub fn algebra(g: u32, n: u32, mode: Mode) -> Arc<LgnAlgebra> {
    LgnAlgebra::get(Surface::new(g, n).expect("valid surface"), mode).expect("algebra builds")
}
