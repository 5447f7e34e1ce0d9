//! Rayon-backed table construction. Cells are independent, written to their
//! own slots and assembled in storage order, so the result is bit-identical
//! to the sequential build at any worker count.

use rayon::prelude::*;
use sig_core::curve::Curve;
use sig_core::engine::{self, CoeffTable, EngineError};
use sig_core::kernel::KernelIndex;
use sig_core::quad::QuadConfig;

/// Caps the global worker pool from `SIG_THREADS` (ignored if the pool is
/// already initialized or the variable is unset/invalid).
pub fn configure_threads() {
    if let Ok(value) = std::env::var("SIG_THREADS") {
        if let Ok(threads) = value.trim().parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

/// `engine::build_table` with the independent cells fanned out over the
/// worker pool.
pub fn build_table_parallel(
    curve: &Curve,
    n_max: usize,
    cfg: &QuadConfig,
) -> Result<CoeffTable, EngineError> {
    if n_max == 0 {
        return Err(EngineError::BadTruncation { n_max });
    }
    let coords = engine::cell_coords(curve.dim(), curve.axial_index(), n_max);
    let cells: Result<Vec<f64>, EngineError> = coords
        .par_iter()
        .map(|&(j, k, l)| engine::scaled_coefficient(curve, j, KernelIndex::new(k, l), cfg))
        .collect();
    CoeffTable::from_parts(
        curve.dim(),
        curve.axial_index(),
        curve.axial_speed(),
        n_max,
        cfg.rel_tol,
        curve.non_axial_sup_estimate(1024),
        cells?,
    )
}
