//! Strength of connection, greedy aggregation, and construction of the
//! prolongation/restriction pair (plain or smoothed aggregation).
//!
//! Coarsening works purely from the matrix entries. The transfer operators
//! are built in three steps: a strength graph restricts the pattern to the
//! couplings that matter, a greedy pass groups rows into aggregates, and the
//! aggregate indicator matrix is optionally smoothed with one damped Jacobi
//! step on the filtered matrix.

use crate::error::{Error, Result};
use crate::relaxation::estimate_spectral_radius;
use crate::scalar::Scalar;
use crate::sparse::{spgemm, CsrMatrix};

/// Knobs for one coarsening step.
#[derive(Debug, Clone, Copy)]
pub struct CoarseningParams<S: Scalar = f64> {
    /// Strength threshold: `(i, j)` is strong iff
    /// `a_ij^2 > eps_strong^2 * a_ii * a_jj`.
    pub eps_strong: S,
    /// Damping of the prolongation smoothing step.
    pub smoothing_omega: S,
    /// Smoothed aggregation when true, plain aggregation otherwise.
    pub smooth: bool,
    /// Replace `smoothing_omega` by `4/3` divided by the estimated spectral
    /// radius of the diagonally scaled filtered matrix.
    pub adaptive_omega: bool,
}

impl<S: Scalar> Default for CoarseningParams<S> {
    fn default() -> Self {
        Self {
            eps_strong: S::from_f64_lossy(0.08),
            smoothing_omega: S::from_f64_lossy(2.0 / 3.0),
            smooth: true,
            adaptive_omega: false,
        }
    }
}

impl<S: Scalar> CoarseningParams<S> {
    fn validate(&self) -> Result<()> {
        let eps = self.eps_strong.to_f64_lossy();
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidParam {
                name: "eps_strong",
                detail: format!("{eps} outside [0, 1)"),
            });
        }
        let omega = self.smoothing_omega.to_f64_lossy();
        if !(omega > 0.0 && omega < 2.0) {
            return Err(Error::InvalidParam {
                name: "smoothing_omega",
                detail: format!("{omega} outside (0, 2)"),
            });
        }
        Ok(())
    }
}

/// The matrix pattern restricted to strong connections, with the coupling
/// values retained. The diagonal is always present.
#[derive(Debug, Clone)]
pub struct StrengthGraph<S: Scalar = f64> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<S>,
}

impl<S: Scalar> StrengthGraph<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[S]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    /// True iff `(i, j)` is a retained (strong) connection.
    pub fn is_strong(&self, i: usize, j: usize) -> bool {
        self.row(i).0.binary_search(&j).is_ok()
    }
}

/// Builds the strength graph of a square matrix.
///
/// An off-diagonal `(i, j)` is strong iff `a_ij^2 > eps^2 * a_ii * a_jj`;
/// the criterion is symmetric for symmetric input. Requires a positive
/// diagonal, otherwise the criterion is undefined.
#[allow(clippy::needless_range_loop)]
pub fn strength_graph<S: Scalar>(a: &CsrMatrix<S>, eps_strong: S) -> Result<StrengthGraph<S>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            op: "strength_graph",
            detail: format!("matrix is {}x{}", a.nrows(), a.ncols()),
        });
    }
    let n = a.nrows();
    let diag = a.diagonal();
    for (i, &d) in diag.iter().enumerate() {
        if d <= S::zero() {
            return Err(Error::NonPositiveDiagonal {
                row: i,
                value: d.to_f64_lossy(),
            });
        }
    }
    // The positivity check above guarantees a stored diagonal in every row,
    // so marking it strong is a plain keep.
    let eps2 = eps_strong * eps_strong;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i || v * v > eps2 * diag[i] * diag[j] {
                col_idx.push(j);
                values.push(v);
            }
        }
        row_ptr.push(col_idx.len());
    }
    Ok(StrengthGraph {
        n,
        row_ptr,
        col_idx,
        values,
    })
}

/// Disjoint grouping of rows into aggregates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregates {
    /// Aggregate index of every row.
    pub id: Vec<usize>,
    /// Number of aggregates.
    pub count: usize,
}

const UNAGGREGATED: usize = usize::MAX;

/// Greedy aggregation over the strength graph.
///
/// Pass 1 scans rows in ascending order; a row whose strong neighbors are
/// all untouched becomes a root and absorbs them. Pass 2 joins each leftover
/// row to the aggregate of its strongest pass-1 neighbor (ties break toward
/// the lowest column index). Pass 3 turns anything still unassigned into a
/// singleton. The result is deterministic for a fixed input.
#[allow(clippy::needless_range_loop)]
pub fn aggregate<S: Scalar>(s: &StrengthGraph<S>) -> Aggregates {
    let n = s.n();
    let mut id = vec![UNAGGREGATED; n];
    let mut count = 0usize;

    for i in 0..n {
        if id[i] != UNAGGREGATED {
            continue;
        }
        let (cols, _) = s.row(i);
        if cols.iter().any(|&j| j != i && id[j] != UNAGGREGATED) {
            continue;
        }
        id[i] = count;
        for &j in cols {
            if j != i {
                id[j] = count;
            }
        }
        count += 1;
    }

    // Pass 2 reads the pass-1 assignment only, so rows adopted here do not
    // recruit their own neighbors.
    let pass1 = id.clone();
    for i in 0..n {
        if id[i] != UNAGGREGATED {
            continue;
        }
        let (cols, vals) = s.row(i);
        let mut best: Option<(S, usize)> = None;
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i || pass1[j] == UNAGGREGATED {
                continue;
            }
            let w = v.abs();
            if best.is_none_or(|(bw, _)| w > bw) {
                best = Some((w, pass1[j]));
            }
        }
        if let Some((_, agg)) = best {
            id[i] = agg;
        }
    }

    for i in 0..n {
        if id[i] == UNAGGREGATED {
            id[i] = count;
            count += 1;
        }
    }

    Aggregates { id, count }
}

/// Unit indicator matrix of the aggregation: one entry per row, at the
/// column of the row's aggregate.
pub fn tentative_prolongation<S: Scalar>(agg: &Aggregates, nrows: usize) -> CsrMatrix<S> {
    assert_eq!(agg.id.len(), nrows, "aggregate ids vs row count");
    let row_ptr: Vec<usize> = (0..=nrows).collect();
    let col_idx = agg.id.clone();
    let values = vec![S::one(); nrows];
    CsrMatrix::from_parts_unchecked(nrows, agg.count, row_ptr, col_idx, values)
}

/// `A` filtered to strong connections; dropped weak off-diagonals are lumped
/// onto the diagonal so row sums are preserved.
pub(crate) fn filtered_matrix<S: Scalar>(
    a: &CsrMatrix<S>,
    s: &StrengthGraph<S>,
) -> Result<CsrMatrix<S>> {
    let n = a.nrows();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        let (cols, vals) = a.row(i);
        let (scols, _) = s.row(i);
        let mut diag = S::zero();
        let mut kept: Vec<(usize, S)> = Vec::with_capacity(scols.len());
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i {
                diag += v;
            } else if scols.binary_search(&j).is_ok() {
                kept.push((j, v));
            } else {
                diag += v;
            }
        }
        if diag.is_zero() {
            return Err(Error::ZeroFilteredDiagonal { row: i });
        }
        let pos = kept.partition_point(|&(c, _)| c < i);
        kept.insert(pos, (i, diag));
        for (j, v) in kept {
            col_idx.push(j);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    Ok(CsrMatrix::from_parts_unchecked(
        n, n, row_ptr, col_idx, values,
    ))
}

fn smooth_from_filtered<S: Scalar>(
    af: &CsrMatrix<S>,
    pt: &CsrMatrix<S>,
    omega: S,
) -> Result<CsrMatrix<S>> {
    // M = I - omega * D^{-1} * A_F, same pattern as A_F
    let n = af.nrows();
    let diag = af.diagonal();
    let mut values = Vec::with_capacity(af.nnz());
    for (i, &d) in diag.iter().enumerate() {
        let (cols, vals) = af.row(i);
        let scale = omega / d;
        for (&j, &v) in cols.iter().zip(vals) {
            let m = if j == i {
                S::one() - scale * v
            } else {
                -(scale * v)
            };
            values.push(m);
        }
    }
    let m = CsrMatrix::from_parts_unchecked(
        n,
        n,
        af.row_ptr().to_vec(),
        af.col_idx().to_vec(),
        values,
    );
    spgemm(&m, pt)
}

/// Smooths a tentative prolongation: `P = (I - omega * D^{-1} * A_F) * Pt`,
/// where `A_F` is the strength-filtered matrix and `D` its diagonal.
pub fn smooth_prolongation<S: Scalar>(
    a: &CsrMatrix<S>,
    s: &StrengthGraph<S>,
    pt: &CsrMatrix<S>,
    omega: S,
) -> Result<CsrMatrix<S>> {
    if a.nrows() != a.ncols() || a.nrows() != pt.nrows() || s.n() != a.nrows() {
        return Err(Error::DimensionMismatch {
            op: "smooth_prolongation",
            detail: format!(
                "A is {}x{}, S has {} rows, Pt has {} rows",
                a.nrows(),
                a.ncols(),
                s.n(),
                pt.nrows()
            ),
        });
    }
    let af = filtered_matrix(a, s)?;
    smooth_from_filtered(&af, pt, omega)
}

/// Builds the transfer pair `(P, R = P^T)` for one coarsening step.
///
/// Fails with a stagnation error when aggregation cannot reduce the size
/// (every aggregate a singleton), which the hierarchy setup treats as "stop
/// here and solve directly".
pub fn coarsen<S: Scalar>(
    a: &CsrMatrix<S>,
    params: &CoarseningParams<S>,
) -> Result<(CsrMatrix<S>, CsrMatrix<S>)> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            op: "coarsen",
            detail: format!("matrix is {}x{}", a.nrows(), a.ncols()),
        });
    }
    params.validate()?;
    let n = a.nrows();
    let s = strength_graph(a, params.eps_strong)?;
    let agg = aggregate(&s);
    if agg.count == n {
        return Err(Error::CoarseningStagnated {
            aggregates: agg.count,
            nrows: n,
        });
    }
    let pt = tentative_prolongation(&agg, n);
    let p = if params.smooth {
        let af = filtered_matrix(a, &s)?;
        let omega = if params.adaptive_omega {
            let est = estimate_spectral_radius(&af, true, 20)?;
            if est.value <= S::zero() {
                return Err(Error::SpectralBound);
            }
            S::from_f64_lossy(4.0 / 3.0) / est.value
        } else {
            params.smoothing_omega
        };
        smooth_from_filtered(&af, &pt, omega)?
    } else {
        pt
    };
    let r = p.transpose();
    Ok((p, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::Triplet;

    fn poisson1d(n: usize) -> CsrMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push(Triplet::new(i, i, 2.0));
            if i > 0 {
                t.push(Triplet::new(i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push(Triplet::new(i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(&t, n, n).unwrap()
    }

    fn dense_mul(a: &CsrMatrix<f64>, b: &CsrMatrix<f64>) -> Vec<f64> {
        let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
        let da = a.to_dense();
        let db = b.to_dense();
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..k {
                    s += da[i * k + l] * db[l * n + j];
                }
                out[i * n + j] = s;
            }
        }
        out
    }

    #[test]
    fn strength_zero_threshold_keeps_all_nonzeros() {
        let a = poisson1d(4);
        let s = strength_graph(&a, 0.0).unwrap();
        assert_eq!(s.nnz(), a.nnz());
    }

    #[test]
    fn strength_poisson_neighbors_are_strong() {
        let a = poisson1d(3);
        let s = strength_graph(&a, 0.08).unwrap();
        assert!(s.is_strong(1, 0));
        assert!(s.is_strong(1, 2));
    }

    #[test]
    fn strength_weak_coupling_dropped() {
        let a = CsrMatrix::from_triplets(
            &[
                Triplet::new(0, 0, 4.0),
                Triplet::new(0, 1, 0.01),
                Triplet::new(1, 0, 0.01),
                Triplet::new(1, 1, 4.0),
            ],
            2,
            2,
        )
        .unwrap();
        let s = strength_graph(&a, 0.08).unwrap();
        assert!(!s.is_strong(0, 1));
        assert!(!s.is_strong(1, 0));
        // diagonal always kept
        assert!(s.is_strong(0, 0));
        assert_eq!(s.nnz(), 2);
    }

    #[test]
    fn strength_rejects_non_positive_diagonal() {
        let a = CsrMatrix::from_triplets(
            &[Triplet::new(0, 0, -2.0), Triplet::new(1, 1, 1.0)],
            2,
            2,
        )
        .unwrap();
        assert!(matches!(
            strength_graph(&a, 0.08),
            Err(Error::NonPositiveDiagonal { row: 0, .. })
        ));
    }

    #[test]
    fn aggregate_single_row() {
        let a = CsrMatrix::from_triplets(&[Triplet::new(0, 0, 1.0)], 1, 1).unwrap();
        let s = strength_graph(&a, 0.08).unwrap();
        let agg = aggregate(&s);
        assert_eq!(agg.count, 1);
        assert_eq!(agg.id, vec![0]);
    }

    #[test]
    fn aggregate_chain_of_six() {
        let a = poisson1d(6);
        let s = strength_graph(&a, 0.08).unwrap();
        let agg = aggregate(&s);
        assert_eq!(agg.count, 2);
        assert_eq!(agg.id, vec![0, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn aggregate_diagonal_matrix_gives_singletons() {
        let a = CsrMatrix::from_diag(&[1.0, 2.0, 3.0, 4.0]);
        let s = strength_graph(&a, 0.08).unwrap();
        let agg = aggregate(&s);
        assert_eq!(agg.count, 4);
        assert_eq!(agg.id, vec![0, 1, 2, 3]);
    }

    #[test]
    fn tentative_indicator_structure() {
        let agg = Aggregates {
            id: vec![0, 0, 1, 1, 1, 1],
            count: 2,
        };
        let pt: CsrMatrix<f64> = tentative_prolongation(&agg, 6);
        assert_eq!((pt.nrows(), pt.ncols()), (6, 2));
        for i in 0..6 {
            let (cols, vals) = pt.row(i);
            assert_eq!(cols, &[agg.id[i]]);
            assert_eq!(vals, &[1.0]);
        }
        // P^T P counts aggregate sizes
        let gram = spgemm(&pt.transpose(), &pt).unwrap();
        assert_eq!(gram.get(0, 0), Some(2.0));
        assert_eq!(gram.get(1, 1), Some(4.0));
    }

    #[test]
    fn tentative_singletons_give_identity() {
        let agg = Aggregates {
            id: vec![0, 1, 2],
            count: 3,
        };
        let pt: CsrMatrix<f64> = tentative_prolongation(&agg, 3);
        assert_eq!(pt, CsrMatrix::identity(3));
    }

    #[test]
    fn smoothing_with_zero_omega_is_identity() {
        let a = poisson1d(6);
        let s = strength_graph(&a, 0.08).unwrap();
        let agg = aggregate(&s);
        let pt = tentative_prolongation(&agg, 6);
        let p = smooth_prolongation(&a, &s, &pt, 0.0).unwrap();
        // structural zeros are retained, so compare as dense values
        assert_eq!(p.to_dense(), pt.to_dense());
    }

    #[test]
    fn smoothing_two_point_example() {
        let a = poisson1d(2);
        let s = strength_graph(&a, 0.08).unwrap();
        let pt = tentative_prolongation(
            &Aggregates {
                id: vec![0, 0],
                count: 1,
            },
            2,
        );
        let p = smooth_prolongation(&a, &s, &pt, 2.0 / 3.0).unwrap();
        let dense = p.to_dense();
        assert!((dense[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((dense[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn smoothing_diagonal_matrix_scales_indicator() {
        let a = CsrMatrix::from_diag(&[2.0, 5.0, 3.0]);
        let s = strength_graph(&a, 0.08).unwrap();
        let pt = tentative_prolongation(
            &Aggregates {
                id: vec![0, 0, 0],
                count: 1,
            },
            3,
        );
        let omega: f64 = 2.0 / 3.0;
        let p = smooth_prolongation(&a, &s, &pt, omega).unwrap();
        for &v in p.to_dense().iter() {
            assert!((v - (1.0 - omega)).abs() < 1e-15);
        }
    }

    #[test]
    fn smoothed_matches_dense_formula_on_poisson() {
        let a = poisson1d(6);
        let s = strength_graph(&a, 0.08).unwrap();
        let agg = aggregate(&s);
        let pt = tentative_prolongation(&agg, 6);
        let omega = 2.0 / 3.0;
        let p = smooth_prolongation(&a, &s, &pt, omega).unwrap();

        // dense oracle: M = I - omega D^{-1} A (all connections strong here)
        let mut m_entries = Vec::new();
        for i in 0..6 {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let mij = if i == j { 1.0 - omega * v / 2.0 } else { -omega * v / 2.0 };
                m_entries.push(Triplet::new(i, j, mij));
            }
        }
        let m = CsrMatrix::from_triplets(&m_entries, 6, 6).unwrap();
        let expected = dense_mul(&m, &pt);
        let got = p.to_dense();
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-14);
        }
        // frozen hand-computed values
        assert!((p.get(0, 0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.get(1, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.get(3, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coarsen_plain_aggregation() {
        let a = poisson1d(6);
        let params = CoarseningParams {
            smooth: false,
            ..CoarseningParams::default()
        };
        let (p, r) = coarsen(&a, &params).unwrap();
        assert_eq!((p.nrows(), p.ncols()), (6, 2));
        assert_eq!(r, p.transpose());
        // constant preservation: each row of the indicator sums to one
        for i in 0..6 {
            let sum: f64 = p.row(i).1.iter().sum();
            assert_eq!(sum, 1.0);
        }
    }

    #[test]
    fn coarsen_single_row_stagnates() {
        let a = CsrMatrix::from_triplets(&[Triplet::new(0, 0, 1.0)], 1, 1).unwrap();
        assert!(matches!(
            coarsen(&a, &CoarseningParams::default()),
            Err(Error::CoarseningStagnated {
                aggregates: 1,
                nrows: 1
            })
        ));
    }

    #[test]
    fn coarsen_identity_matrix_stagnates() {
        let a = CsrMatrix::from_diag(&[1.0; 10]);
        assert!(matches!(
            coarsen(&a, &CoarseningParams::default()),
            Err(Error::CoarseningStagnated {
                aggregates: 10,
                nrows: 10
            })
        ));
    }

    #[test]
    fn coarsen_validates_parameters() {
        let a = poisson1d(6);
        let bad_eps = CoarseningParams {
            eps_strong: 1.5,
            ..CoarseningParams::default()
        };
        assert!(matches!(
            coarsen(&a, &bad_eps),
            Err(Error::InvalidParam { name: "eps_strong", .. })
        ));
        let bad_omega = CoarseningParams {
            smoothing_omega: 2.0,
            ..CoarseningParams::default()
        };
        assert!(matches!(
            coarsen(&a, &bad_omega),
            Err(Error::InvalidParam { name: "smoothing_omega", .. })
        ));
    }

    #[test]
    fn coarsen_is_deterministic() {
        let a = poisson1d(40);
        let params = CoarseningParams::default();
        let (p1, _) = coarsen(&a, &params).unwrap();
        let (p2, _) = coarsen(&a, &params).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn coarsen_has_no_empty_rows() {
        let a = poisson1d(33);
        for smooth in [false, true] {
            let params = CoarseningParams {
                smooth,
                ..CoarseningParams::default()
            };
            let (p, _) = coarsen(&a, &params).unwrap();
            for i in 0..p.nrows() {
                assert!(!p.row(i).0.is_empty(), "row {i} of P is empty");
            }
        }
    }
}
