//! Model problem generation: the 3D Poisson benchmark matrix.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// An assembled linear system ready to solve.
#[derive(Debug, Clone)]
pub struct ProblemBundle<S: Scalar = f64> {
    pub matrix: CsrMatrix<S>,
    pub rhs: Vec<S>,
    /// Known solution, when the generator has one.
    pub solution: Option<Vec<S>>,
}

/// Finite-difference discretization of `-laplace(u) = 1` on the unit cube
/// with homogeneous Dirichlet boundary conditions.
///
/// Seven-point stencil over the `n^3` interior nodes of a uniform mesh with
/// spacing `h = 1/(n+1)`; boundary nodes are eliminated. The matrix has
/// `n^3` rows and `7 n^3 - 6 n^2` stored entries, with `6/h^2` on the
/// diagonal and `-1/h^2` toward each interior neighbor. The right-hand side
/// is the constant one.
pub fn poisson3d<S: Scalar>(n: usize) -> Result<ProblemBundle<S>> {
    if n == 0 {
        return Err(Error::InvalidParam {
            name: "n",
            detail: "grid extent must be at least 1".into(),
        });
    }
    // size the allocation up front so oversized requests fail cleanly
    let rows = n
        .checked_mul(n)
        .and_then(|n2| n2.checked_mul(n))
        .ok_or_else(|| Error::ProblemTooLarge(format!("{n}^3 overflows the address space")))?;
    let nnz = rows
        .checked_mul(7)
        .and_then(|x| x.checked_sub(6 * n * n))
        .ok_or_else(|| Error::ProblemTooLarge(format!("stencil count for n = {n} overflows")))?;
    let bytes = nnz
        .checked_mul(std::mem::size_of::<S>() + std::mem::size_of::<usize>())
        .ok_or_else(|| Error::ProblemTooLarge(format!("storage for n = {n} overflows")))?;
    if bytes > (1usize << 40) {
        return Err(Error::ProblemTooLarge(format!(
            "n = {n} needs about {} GiB of matrix storage",
            bytes >> 30
        )));
    }

    let h = 1.0 / (n as f64 + 1.0);
    let inv_h2 = S::from_f64_lossy(1.0 / (h * h));
    let diag = S::from_f64_lossy(6.0 / (h * h));
    let off = -inv_h2;

    let mut row_ptr = Vec::with_capacity(rows + 1);
    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    row_ptr.push(0);
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                let idx = ix + n * (iy + n * iz);
                if iz > 0 {
                    col_idx.push(idx - n * n);
                    values.push(off);
                }
                if iy > 0 {
                    col_idx.push(idx - n);
                    values.push(off);
                }
                if ix > 0 {
                    col_idx.push(idx - 1);
                    values.push(off);
                }
                col_idx.push(idx);
                values.push(diag);
                if ix + 1 < n {
                    col_idx.push(idx + 1);
                    values.push(off);
                }
                if iy + 1 < n {
                    col_idx.push(idx + n);
                    values.push(off);
                }
                if iz + 1 < n {
                    col_idx.push(idx + n * n);
                    values.push(off);
                }
                row_ptr.push(col_idx.len());
            }
        }
    }
    debug_assert_eq!(col_idx.len(), nnz);

    let matrix = CsrMatrix::new(rows, rows, row_ptr, col_idx, values)?;
    Ok(ProblemBundle {
        matrix,
        rhs: vec![S::one(); rows],
        solution: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_interior_node() {
        let p = poisson3d::<f64>(1).unwrap();
        assert_eq!(p.matrix.nrows(), 1);
        assert_eq!(p.matrix.nnz(), 1);
        // h = 1/2, so the diagonal is 6 * 4
        assert_eq!(p.matrix.get(0, 0), Some(24.0));
        assert_eq!(p.rhs, vec![1.0]);
    }

    #[test]
    fn two_cube_has_three_neighbors_per_node() {
        let p = poisson3d::<f64>(2).unwrap();
        assert_eq!(p.matrix.nrows(), 8);
        assert_eq!(p.matrix.nnz(), 32);
        for i in 0..8 {
            assert_eq!(p.matrix.row(i).0.len(), 4, "row {i}");
        }
    }

    #[test]
    fn stencil_counts_match_formula() {
        for n in [1usize, 2, 3, 5, 8] {
            let p = poisson3d::<f64>(n).unwrap();
            assert_eq!(p.matrix.nrows(), n * n * n);
            assert_eq!(p.matrix.nnz(), 7 * n * n * n - 6 * n * n);
        }
    }

    #[test]
    fn matrix_is_exactly_symmetric() {
        let p = poisson3d::<f64>(4).unwrap();
        assert_eq!(p.matrix.transpose(), p.matrix);
    }

    #[test]
    fn weak_diagonal_dominance_with_strict_boundary_rows() {
        let n = 3;
        let p = poisson3d::<f64>(n).unwrap();
        for i in 0..p.matrix.nrows() {
            let (cols, vals) = p.matrix.row(i);
            let diag = p.matrix.get(i, i).unwrap();
            let off: f64 = cols
                .iter()
                .zip(vals)
                .filter(|(&j, _)| j != i)
                .map(|(_, v)| v.abs())
                .sum();
            assert!(diag >= off);
            // interior of the 3^3 grid is the single center node
            let center = 1 + n * (1 + n);
            if i != center {
                assert!(diag > off, "boundary-adjacent row {i} not strictly dominant");
            }
        }
    }

    #[test]
    fn zero_extent_rejected() {
        assert!(poisson3d::<f64>(0).is_err());
    }

    #[test]
    fn oversized_request_fails_before_allocating() {
        assert!(matches!(
            poisson3d::<f64>(1 << 22),
            Err(Error::ProblemTooLarge(_))
        ));
    }
}
