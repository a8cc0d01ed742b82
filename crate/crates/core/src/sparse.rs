//! Compressed sparse row storage and the structural kernels of the setup
//! phase: assembly, transpose, sparse products, and the Galerkin triple
//! product.
//!
//! A single matrix representation is used everywhere: system matrices,
//! transfer operators, and every level of the multigrid hierarchy are
//! [`CsrMatrix`] values. Matrices are immutable once assembled and safe to
//! share across threads; the kernels here may parallelize over rows
//! internally but produce results that do not depend on the worker count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One assembly entry: `value` added at `(row, col)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triplet<S> {
    pub row: usize,
    pub col: usize,
    pub value: S,
}

impl<S> Triplet<S> {
    pub fn new(row: usize, col: usize, value: S) -> Self {
        Self { row, col, value }
    }
}

/// Sparse matrix in compressed sparse row format.
///
/// Invariants (checked by [`CsrMatrix::new`], maintained by every kernel):
/// `row_ptr` is non-decreasing with `row_ptr[0] == 0` and
/// `row_ptr[nrows] == nnz`; within each row the column indices are strictly
/// increasing and in `[0, ncols)`. Rows may be empty. Explicitly stored
/// zeros are legal and are kept by all kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<S: Scalar = f64> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<S>,
}

impl<S: Scalar> CsrMatrix<S> {
    /// Builds a matrix from raw CSR arrays, validating the invariants.
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<S>,
    ) -> Result<Self> {
        if row_ptr.len() != nrows + 1 {
            return Err(Error::InvalidCsr(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                nrows + 1
            )));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidCsr("row_ptr[0] must be 0".into()));
        }
        if col_idx.len() != values.len() {
            return Err(Error::InvalidCsr(format!(
                "col_idx length {} != values length {}",
                col_idx.len(),
                values.len()
            )));
        }
        if row_ptr[nrows] != col_idx.len() {
            return Err(Error::InvalidCsr(format!(
                "row_ptr[{}] = {} != nnz = {}",
                nrows,
                row_ptr[nrows],
                col_idx.len()
            )));
        }
        for i in 0..nrows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidCsr(format!("row_ptr decreases at row {i}")));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for (k, &c) in cols.iter().enumerate() {
                if c >= ncols {
                    return Err(Error::InvalidCsr(format!(
                        "column {c} out of range in row {i}"
                    )));
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::InvalidCsr(format!(
                        "columns not strictly increasing in row {i}"
                    )));
                }
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Internal constructor for kernels that build valid CSR by construction.
    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<S>,
    ) -> Self {
        debug_assert!(
            Self::new(nrows, ncols, row_ptr.clone(), col_idx.clone(), values.clone()).is_ok()
        );
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Assembles a matrix from triplets. Duplicate `(row, col)` pairs are
    /// summed; rows come out sorted by column. The result does not depend on
    /// the order of the input list, bit for bit.
    pub fn from_triplets(triplets: &[Triplet<S>], nrows: usize, ncols: usize) -> Result<Self> {
        for (index, t) in triplets.iter().enumerate() {
            if t.row >= nrows || t.col >= ncols {
                return Err(Error::TripletOutOfRange {
                    index,
                    row: t.row,
                    col: t.col,
                    nrows,
                    ncols,
                });
            }
        }

        let mut counts = vec![0usize; nrows + 1];
        for t in triplets {
            counts[t.row + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut slots: Vec<(usize, S)> = vec![(0, S::zero()); triplets.len()];
        let mut next = counts.clone();
        for t in triplets {
            let pos = next[t.row];
            slots[pos] = (t.col, t.value);
            next[t.row] += 1;
        }

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for i in 0..nrows {
            let row = &mut slots[counts[i]..counts[i + 1]];
            // Canonical order (column, then value) makes duplicate summation
            // independent of the input permutation.
            row.sort_unstable_by(|a, b| {
                a.0.cmp(&b.0)
                    .then_with(|| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            });
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut sum = row[k].1;
                k += 1;
                while k < row.len() && row[k].0 == col {
                    sum += row[k].1;
                    k += 1;
                }
                col_idx.push(col);
                values.push(sum);
            }
            row_ptr[i + 1] = col_idx.len();
        }
        col_idx.shrink_to_fit();
        values.shrink_to_fit();
        Ok(Self::from_parts_unchecked(
            nrows, ncols, row_ptr, col_idx, values,
        ))
    }

    /// The `n`-by-`n` identity.
    pub fn identity(n: usize) -> Self {
        Self::from_parts_unchecked(n, n, (0..=n).collect(), (0..n).collect(), vec![S::one(); n])
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diag(diag: &[S]) -> Self {
        let n = diag.len();
        Self::from_parts_unchecked(n, n, (0..=n).collect(), (0..n).collect(), diag.to_vec())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[S]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    /// Stored value at `(i, j)`, or `None` if the entry is structurally zero.
    pub fn get(&self, i: usize, j: usize) -> Option<S> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    /// Diagonal entries; positions without a stored diagonal yield zero.
    pub fn diagonal(&self) -> Vec<S> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i).unwrap_or_else(S::zero))
            .collect()
    }

    /// Dense row-major copy. Intended for small matrices (coarse solves,
    /// oracle checks).
    pub fn to_dense(&self) -> Vec<S> {
        let mut dense = vec![S::zero(); self.nrows * self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                dense[i * self.ncols + j] = v;
            }
        }
        dense
    }

    /// Exact structural transpose: `(i, j, v)` is stored in the result iff
    /// `(j, i, v)` is stored in `self`.
    pub fn transpose(&self) -> Self {
        let nnz = self.nnz();
        let mut row_ptr = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            row_ptr[c + 1] += 1;
        }
        for i in 0..self.ncols {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut col_idx = vec![0usize; nnz];
        let mut values = vec![S::zero(); nnz];
        let mut next = row_ptr.clone();
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let pos = next[j];
                col_idx[pos] = i;
                values[pos] = v;
                next[j] += 1;
            }
        }
        Self::from_parts_unchecked(self.ncols, self.nrows, row_ptr, col_idx, values)
    }
}

/// Splits `0..nrows` into contiguous ranges of roughly equal stored-entry
/// count, for parallel kernels that write disjoint row blocks.
fn row_blocks(row_ptr: &[usize], max_blocks: usize) -> Vec<(usize, usize)> {
    let nrows = row_ptr.len() - 1;
    if nrows == 0 {
        return Vec::new();
    }
    let nnz = row_ptr[nrows] as u128;
    let nblocks = max_blocks.clamp(1, nrows);
    let mut blocks = Vec::with_capacity(nblocks);
    let mut start = 0usize;
    for b in 1..=nblocks {
        let end = if b == nblocks {
            nrows
        } else {
            let target = (nnz * b as u128 / nblocks as u128) as usize;
            row_ptr.partition_point(|&x| x < target).clamp(start, nrows)
        };
        if end > start {
            blocks.push((start, end));
            start = end;
        }
    }
    if start < nrows {
        blocks.push((start, nrows));
    }
    blocks
}

/// Sparse matrix product `A * B`.
///
/// The result pattern is the full structural product: entries whose value
/// cancels to zero are kept, so the sparsity structure is deterministic and
/// independent of the numerical values.
pub fn spgemm<S: Scalar>(a: &CsrMatrix<S>, b: &CsrMatrix<S>) -> Result<CsrMatrix<S>> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            op: "spgemm",
            detail: format!(
                "left is {}x{}, right is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            ),
        });
    }
    let nrows = a.nrows();
    let ncols = b.ncols();

    // Symbolic pass: per-row result size.
    let mut counts = vec![0usize; nrows];
    let chunk = (nrows / (4 * rayon::current_num_threads().max(1))).max(512);
    counts
        .par_chunks_mut(chunk)
        .enumerate()
        .for_each(|(ci, out)| {
            let base = ci * chunk;
            let mut marker = vec![usize::MAX; ncols];
            for (k, slot) in out.iter_mut().enumerate() {
                let i = base + k;
                let (acols, _) = a.row(i);
                let mut n = 0usize;
                for &ak in acols {
                    let (bcols, _) = b.row(ak);
                    for &j in bcols {
                        if marker[j] != i {
                            marker[j] = i;
                            n += 1;
                        }
                    }
                }
                *slot = n;
            }
        });

    let mut row_ptr = vec![0usize; nrows + 1];
    for i in 0..nrows {
        row_ptr[i + 1] = row_ptr[i] + counts[i];
    }
    let nnz = row_ptr[nrows];
    let mut col_idx = vec![0usize; nnz];
    let mut values = vec![S::zero(); nnz];

    // Numeric pass over disjoint row blocks.
    let blocks = row_blocks(&row_ptr, 4 * rayon::current_num_threads().max(1));
    let mut tasks = Vec::with_capacity(blocks.len());
    {
        let mut rest_c = col_idx.as_mut_slice();
        let mut rest_v = values.as_mut_slice();
        for &(r0, r1) in &blocks {
            let len = row_ptr[r1] - row_ptr[r0];
            let (c, rc) = rest_c.split_at_mut(len);
            let (v, rv) = rest_v.split_at_mut(len);
            rest_c = rc;
            rest_v = rv;
            tasks.push((r0, r1, c, v));
        }
    }
    tasks.into_par_iter().for_each(|(r0, r1, cslice, vslice)| {
        let mut marker = vec![usize::MAX; ncols];
        let mut acc = vec![S::zero(); ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut offset = 0usize;
        for i in r0..r1 {
            touched.clear();
            let (acols, avals) = a.row(i);
            for (&ak, &av) in acols.iter().zip(avals) {
                let (bcols, bvals) = b.row(ak);
                for (&j, &bv) in bcols.iter().zip(bvals) {
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = av * bv;
                        touched.push(j);
                    } else {
                        acc[j] += av * bv;
                    }
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                cslice[offset] = j;
                vslice[offset] = acc[j];
                offset += 1;
            }
        }
        debug_assert_eq!(offset, cslice.len());
    });

    Ok(CsrMatrix::from_parts_unchecked(
        nrows, ncols, row_ptr, col_idx, values,
    ))
}

/// Galerkin triple product `R * A * P`, the coarse-level operator.
pub fn galerkin_product<S: Scalar>(
    r: &CsrMatrix<S>,
    a: &CsrMatrix<S>,
    p: &CsrMatrix<S>,
) -> Result<CsrMatrix<S>> {
    if r.ncols() != a.nrows() || a.ncols() != p.nrows() {
        return Err(Error::DimensionMismatch {
            op: "galerkin_product",
            detail: format!(
                "R is {}x{}, A is {}x{}, P is {}x{}",
                r.nrows(),
                r.ncols(),
                a.nrows(),
                a.ncols(),
                p.nrows(),
                p.ncols()
            ),
        });
    }
    let ra = spgemm(r, a)?;
    spgemm(&ra, p)
}
