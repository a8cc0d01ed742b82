//! Benchmark-only crate; see `benches/amg.rs`.
//!
//! Holds shared fixtures so the criterion targets stay small.

use amgrid::problem::poisson3d;
use amgrid::CsrMatrix;

/// The benchmark model problem.
pub fn poisson_matrix(n: usize) -> CsrMatrix<f64> {
    poisson3d::<f64>(n).expect("benchmark problem fits in memory").matrix
}
