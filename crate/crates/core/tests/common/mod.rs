//! Shared generators and dense oracles for the integration tests.
#![allow(dead_code)] // each test target uses a different subset

use amgrid::{CsrMatrix, Scalar, Triplet};
use rand::Rng;

/// Random sparse matrix with roughly `fill` density and entries in [-1, 1].
pub fn random_sparse<R: Rng>(rng: &mut R, nrows: usize, ncols: usize, fill: f64) -> CsrMatrix<f64> {
    let mut t = Vec::new();
    for i in 0..nrows {
        for j in 0..ncols {
            if rng.gen::<f64>() < fill {
                t.push(Triplet::new(i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    // keep at least one entry so the matrix is never degenerate
    if t.is_empty() {
        t.push(Triplet::new(
            rng.gen_range(0..nrows),
            rng.gen_range(0..ncols),
            rng.gen_range(-1.0..1.0),
        ));
    }
    CsrMatrix::from_triplets(&t, nrows, ncols).unwrap()
}

/// Random symmetric positive definite matrix: symmetric sparse off-diagonal
/// pattern made diagonally dominant.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize, fill: f64) -> CsrMatrix<f64> {
    let mut dense = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < fill {
                let v = rng.gen_range(-1.0..1.0);
                dense[i * n + j] = v;
                dense[j * n + i] = v;
            }
        }
    }
    let mut t = Vec::new();
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| dense[i * n + j].abs()).sum();
        for j in 0..n {
            if i == j {
                t.push(Triplet::new(i, i, off + 1.0 + rng.gen::<f64>()));
            } else if dense[i * n + j] != 0.0 {
                t.push(Triplet::new(i, j, dense[i * n + j]));
            }
        }
    }
    CsrMatrix::from_triplets(&t, n, n).unwrap()
}

/// Dense row-major product of two dense row-major matrices.
pub fn dense_matmul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        for l in 0..k {
            let av = a[i * k + l];
            if av != 0.0 {
                for j in 0..n {
                    out[i * n + j] += av * b[l * n + j];
                }
            }
        }
    }
    out
}

/// Largest absolute entry.
pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Asserts elementwise agreement of a sparse result with a dense oracle,
/// relative to the largest oracle entry.
pub fn assert_matches_dense<S: Scalar>(sparse: &CsrMatrix<S>, dense: &[f64], rel: f64, what: &str) {
    assert_eq!(sparse.nrows() * sparse.ncols(), dense.len(), "{what}: shape");
    let got: Vec<f64> = sparse.to_dense().iter().map(|v| v.to_f64_lossy()).collect();
    let scale = max_abs(dense).max(1e-300);
    for (idx, (g, e)) in got.iter().zip(dense).enumerate() {
        assert!(
            (g - e).abs() <= rel * scale,
            "{what}: entry {idx} differs: {g} vs {e} (scale {scale})"
        );
    }
}
