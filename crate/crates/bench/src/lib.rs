//! Workloads shared by the criterion benches.

use kgplanar::closure::{run_closure, ClosureConfig};
use kgplanar::qspace::{evaluation_matrix, q_orbit_basis};
use kgplanar::{boxes, Result};

/// Builds the catalog for `n` and returns the rank of its evaluation matrix.
pub fn catalog_rank(n: usize) -> Result<usize> {
    let basis = q_orbit_basis(n)?;
    Ok(evaluation_matrix(&boxes::q_catalog(n)?, &basis)?.rank())
}

/// Dimensions of the closure of `1, I, J, A` up to arity `k`.
pub fn closure_dims(n: usize, k: usize) -> Result<Vec<usize>> {
    let mut cfg = ClosureConfig::new(n);
    cfg.max_arity = k;
    Ok(run_closure(&cfg)?.dims)
}

/// A fixed arity-6 tuple of 2-subsets of `{1..8}`.
pub const SAMPLE_TUPLE: [[u8; 2]; 6] = [[3, 7], [1, 2], [5, 8], [3, 4], [2, 6], [1, 7]];
