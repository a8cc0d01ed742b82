//! Multigrid hierarchy: setup, the V-cycle, the dense coarsest-level solve,
//! and the preconditioner wrapper handed to the Krylov solvers.
//!
//! Setup runs entirely on host data structures: it repeatedly coarsens,
//! forms the Galerkin operator, and prepares a smoother per level, then
//! factorizes the coarsest matrix with partially pivoted LU. The finished
//! [`Hierarchy`] is immutable; V-cycles write only into a per-caller
//! [`Workspace`], so any number of solves may share one hierarchy.

use rayon::prelude::*;

use crate::backend::Backend;
use crate::coarsening::{coarsen, CoarseningParams};
use crate::error::{Error, Result};
use crate::krylov::Precondition;
use crate::relaxation::{build_smoother, relax, Direction, RelaxParams, Smoother, SmootherScratch};
use crate::scalar::Scalar;
use crate::sparse::{galerkin_product, CsrMatrix};

/// Parameters of the whole multigrid preconditioner, nesting the knobs of
/// its parts.
#[derive(Debug, Clone, Copy)]
pub struct AmgParams<S: Scalar = f64> {
    pub coarsening: CoarseningParams<S>,
    pub relax: RelaxParams<S>,
    /// Pre-relaxation sweeps per level.
    pub npre: usize,
    /// Post-relaxation sweeps per level.
    pub npost: usize,
    /// Stop coarsening once a level has at most this many rows.
    pub coarse_enough: usize,
    /// Hard cap on the number of levels, the coarsest included.
    pub max_levels: usize,
}

impl<S: Scalar> Default for AmgParams<S> {
    fn default() -> Self {
        Self {
            coarsening: CoarseningParams::default(),
            relax: RelaxParams::default(),
            npre: 1,
            npost: 1,
            coarse_enough: 3000,
            max_levels: 30,
        }
    }
}

impl<S: Scalar> AmgParams<S> {
    fn validate(&self) -> Result<()> {
        if self.npre + self.npost == 0 {
            return Err(Error::InvalidParam {
                name: "npre/npost",
                detail: "at least one smoothing sweep per level is required".into(),
            });
        }
        if self.coarse_enough == 0 {
            return Err(Error::InvalidParam {
                name: "coarse_enough",
                detail: "must be at least 1".into(),
            });
        }
        if self.max_levels == 0 {
            return Err(Error::InvalidParam {
                name: "max_levels",
                detail: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// One non-coarsest level: its operator, transfer pair, and smoother.
#[derive(Debug, Clone)]
pub struct Level<S: Scalar = f64> {
    a: CsrMatrix<S>,
    p: CsrMatrix<S>,
    r: CsrMatrix<S>,
    smoother: Smoother<S>,
}

impl<S: Scalar> Level<S> {
    pub fn a(&self) -> &CsrMatrix<S> {
        &self.a
    }

    pub fn p(&self) -> &CsrMatrix<S> {
        &self.p
    }

    pub fn r(&self) -> &CsrMatrix<S> {
        &self.r
    }

    pub fn smoother(&self) -> &Smoother<S> {
        &self.smoother
    }
}

/// Dense LU factorization with partial pivoting, for the coarsest system.
#[derive(Debug, Clone)]
pub struct DenseLu<S: Scalar = f64> {
    n: usize,
    /// Combined factors, row-major: strict lower part holds L (unit
    /// diagonal implied), the rest holds U.
    lu: Vec<S>,
    /// `perm[k]` is the original row moved to position `k`.
    perm: Vec<usize>,
}

impl<S: Scalar> DenseLu<S> {
    /// Factorizes a square sparse matrix densely.
    pub fn factor(a: &CsrMatrix<S>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                op: "dense_lu",
                detail: format!("matrix is {}x{}", a.nrows(), a.ncols()),
            });
        }
        let n = a.nrows();
        let mut lu = a.to_dense();
        let mut perm: Vec<usize> = (0..n).collect();
        let max_abs = lu
            .iter()
            .fold(S::zero(), |acc, &v| if v.abs() > acc { v.abs() } else { acc });
        let pivot_floor = S::from_f64_lossy(1e-14) * max_abs;

        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = lu[k * n + k].abs();
            for i in k + 1..n {
                let mag = lu[i * n + k].abs();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_mag <= pivot_floor {
                return Err(Error::SingularCoarseMatrix {
                    step: k,
                    pivot: pivot_mag.to_f64_lossy(),
                });
            }
            if pivot_row != k {
                perm.swap(k, pivot_row);
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
            }
            let (top, bottom) = lu.split_at_mut((k + 1) * n);
            let row_k = &top[k * n..(k + 1) * n];
            let pk = row_k[k];
            let eliminate = |row: &mut [S]| {
                let l = row[k] / pk;
                row[k] = l;
                for j in k + 1..n {
                    row[j] -= l * row_k[j];
                }
            };
            if n - k > 256 {
                bottom.par_chunks_mut(n).for_each(eliminate);
            } else {
                bottom.chunks_mut(n).for_each(eliminate);
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A u = f` from the stored factors.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, f: &[S], u: &mut [S]) {
        let n = self.n;
        assert_eq!(f.len(), n, "dense solve: rhs length");
        assert_eq!(u.len(), n, "dense solve: solution length");
        for k in 0..n {
            let mut sum = f[self.perm[k]];
            for j in 0..k {
                sum -= self.lu[k * n + j] * u[j];
            }
            u[k] = sum;
        }
        for k in (0..n).rev() {
            let mut sum = u[k];
            for j in k + 1..n {
                sum -= self.lu[k * n + j] * u[j];
            }
            u[k] = sum / self.lu[k * n + k];
        }
    }
}

/// The assembled multigrid hierarchy, finest level first.
#[derive(Debug, Clone)]
pub struct Hierarchy<S: Scalar = f64> {
    levels: Vec<Level<S>>,
    coarse_a: CsrMatrix<S>,
    coarse_lu: DenseLu<S>,
    params: AmgParams<S>,
    stagnated: bool,
}

/// Per-caller scratch vectors for V-cycles. Clone it to run concurrent
/// solves over one shared hierarchy.
#[derive(Debug, Clone)]
pub struct Workspace<S: Scalar> {
    levels: Vec<LevelWorkspace<S>>,
}

#[derive(Debug, Clone)]
struct LevelWorkspace<S: Scalar> {
    /// Residual at this level.
    e: Vec<S>,
    /// Right-hand side handed to the next coarser level.
    cf: Vec<S>,
    /// Correction computed by the next coarser level.
    cu: Vec<S>,
    smoother: SmootherScratch<S>,
}

/// Builds the hierarchy for a square matrix.
///
/// Coarsens until the level is small enough, the level cap is reached, or
/// coarsening stagnates — either by failing outright (all-singleton
/// aggregates) or by shrinking less than 5% twice in a row. The matrix
/// reached at that point is factorized densely.
pub fn setup<S: Scalar>(a: &CsrMatrix<S>, params: &AmgParams<S>) -> Result<Hierarchy<S>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            op: "setup",
            detail: format!("matrix is {}x{}", a.nrows(), a.ncols()),
        });
    }
    params.validate()?;

    let mut levels: Vec<Level<S>> = Vec::new();
    let mut current = a.clone();
    let mut stagnated = false;
    let mut slow_streak = 0usize;
    // Couplings spread over more neighbors on every Galerkin level, so the
    // strength threshold is halved as the hierarchy deepens; a fixed
    // threshold classifies nearly everything weak from the second level on.
    let mut coarsening = params.coarsening;

    while current.nrows() > params.coarse_enough && levels.len() + 1 < params.max_levels {
        let (p, r) = match coarsen(&current, &coarsening) {
            Ok(pair) => pair,
            Err(Error::CoarseningStagnated { .. }) => {
                stagnated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let coarse = galerkin_product(&r, &current, &p)?;
        let ratio = coarse.nrows() as f64 / current.nrows() as f64;
        let smoother = build_smoother(&current, &params.relax)?;
        levels.push(Level {
            a: current,
            p,
            r,
            smoother,
        });
        current = coarse;
        coarsening.eps_strong *= S::from_f64_lossy(0.5);
        if ratio > 0.95 {
            slow_streak += 1;
            if slow_streak >= 2 {
                stagnated = true;
                break;
            }
        } else {
            slow_streak = 0;
        }
    }

    let coarse_lu = DenseLu::factor(&current)?;
    Ok(Hierarchy {
        levels,
        coarse_a: current,
        coarse_lu,
        params: *params,
        stagnated,
    })
}

impl<S: Scalar> Hierarchy<S> {
    /// Number of levels, the coarsest included.
    pub fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    /// Non-coarsest levels, finest first.
    pub fn levels(&self) -> &[Level<S>] {
        &self.levels
    }

    /// The coarsest operator.
    pub fn coarsest(&self) -> &CsrMatrix<S> {
        &self.coarse_a
    }

    pub fn coarse_lu(&self) -> &DenseLu<S> {
        &self.coarse_lu
    }

    pub fn params(&self) -> &AmgParams<S> {
        &self.params
    }

    /// True when setup stopped because coarsening could not shrink the
    /// problem, rather than because a level got small enough.
    pub fn stagnated(&self) -> bool {
        self.stagnated
    }

    /// Number of rows at level `i`.
    pub fn rows_at(&self, i: usize) -> usize {
        if i < self.levels.len() {
            self.levels[i].a.nrows()
        } else {
            self.coarse_a.nrows()
        }
    }

    /// Allocates the scratch set one caller needs for V-cycles.
    pub fn workspace(&self) -> Workspace<S> {
        let levels = self
            .levels
            .iter()
            .map(|lvl| {
                let n = lvl.a.nrows();
                let nc = lvl.p.ncols();
                LevelWorkspace {
                    e: vec![S::zero(); n],
                    cf: vec![S::zero(); nc],
                    cu: vec![S::zero(); nc],
                    smoother: SmootherScratch::new(n),
                }
            })
            .collect();
        Workspace { levels }
    }

    /// Runs one V-cycle at `level`, improving `u` in place for the
    /// right-hand side `f`. At the coarsest level this is the direct solve.
    pub fn vcycle<B: Backend<S>>(
        &self,
        backend: &B,
        level: usize,
        f: &[S],
        u: &mut [S],
        ws: &mut Workspace<S>,
    ) {
        assert!(level < self.num_levels(), "level out of range");
        assert_eq!(f.len(), self.rows_at(level), "vcycle: rhs length");
        assert_eq!(u.len(), self.rows_at(level), "vcycle: solution length");
        self.cycle(backend, level, f, u, &mut ws.levels[level..]);
    }

    fn cycle<B: Backend<S>>(
        &self,
        backend: &B,
        level: usize,
        f: &[S],
        u: &mut [S],
        ws: &mut [LevelWorkspace<S>],
    ) {
        if level == self.levels.len() {
            self.coarse_lu.solve(f, u);
            return;
        }
        let lvl = &self.levels[level];
        let (cur, deeper) = ws.split_first_mut().expect("workspace depth");

        for _ in 0..self.params.npre {
            relax(
                &lvl.smoother,
                &lvl.a,
                f,
                u,
                Direction::Pre,
                backend,
                &mut cur.smoother,
            );
        }

        backend.residual(&lvl.a, u, f, &mut cur.e);
        backend.spmv(S::one(), &lvl.r, &cur.e, S::zero(), &mut cur.cf);
        backend.set_zero(&mut cur.cu);
        self.cycle(backend, level + 1, &cur.cf, &mut cur.cu, deeper);
        backend.spmv(S::one(), &lvl.p, &cur.cu, S::one(), u);

        for _ in 0..self.params.npost {
            relax(
                &lvl.smoother,
                &lvl.a,
                f,
                u,
                Direction::Post,
                backend,
                &mut cur.smoother,
            );
        }
    }

    /// One V-cycle from a zero initial guess: `z <- M r`. Linear in `r`.
    pub fn apply_preconditioner<B: Backend<S>>(
        &self,
        backend: &B,
        r: &[S],
        z: &mut [S],
        ws: &mut Workspace<S>,
    ) {
        backend.set_zero(z);
        self.vcycle(backend, 0, r, z, ws);
    }

    /// Per-level size table and the derived complexity figures.
    pub fn report(&self) -> HierarchyReport {
        let mut levels: Vec<(usize, usize)> = self
            .levels
            .iter()
            .map(|lvl| (lvl.a.nrows(), lvl.a.nnz()))
            .collect();
        levels.push((self.coarse_a.nrows(), self.coarse_a.nnz()));
        let rows0 = levels[0].0 as f64;
        let nnz0 = levels[0].1 as f64;
        let grid_complexity = levels.iter().map(|&(r, _)| r as f64).sum::<f64>() / rows0;
        let operator_complexity = levels.iter().map(|&(_, z)| z as f64).sum::<f64>() / nnz0;
        HierarchyReport {
            levels,
            operator_complexity,
            grid_complexity,
        }
    }
}

/// Size counts per level plus the standard complexity metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyReport {
    /// `(rows, nnz)` per level, finest first.
    pub levels: Vec<(usize, usize)>,
    /// Total stored entries over the finest level's.
    pub operator_complexity: f64,
    /// Total rows over the finest level's.
    pub grid_complexity: f64,
}

impl std::fmt::Display for HierarchyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "level        rows          nnz")?;
        for (i, (rows, nnz)) in self.levels.iter().enumerate() {
            writeln!(f, "{i:>5} {rows:>11} {nnz:>12}")?;
        }
        writeln!(f, "grid complexity:     {:.4}", self.grid_complexity)?;
        write!(f, "operator complexity: {:.4}", self.operator_complexity)
    }
}

/// Ready-to-use preconditioner: one V-cycle over a shared hierarchy with a
/// private workspace.
pub struct AmgPreconditioner<'a, S: Scalar, B: Backend<S>> {
    hierarchy: &'a Hierarchy<S>,
    backend: &'a B,
    workspace: Workspace<S>,
}

impl<'a, S: Scalar, B: Backend<S>> AmgPreconditioner<'a, S, B> {
    pub fn new(hierarchy: &'a Hierarchy<S>, backend: &'a B) -> Self {
        Self {
            hierarchy,
            backend,
            workspace: hierarchy.workspace(),
        }
    }

    pub fn hierarchy(&self) -> &Hierarchy<S> {
        self.hierarchy
    }
}

impl<'a, S: Scalar, B: Backend<S>> Precondition<S> for AmgPreconditioner<'a, S, B> {
    fn apply(&mut self, r: &[S], z: &mut [S]) {
        self.hierarchy
            .apply_preconditioner(self.backend, r, z, &mut self.workspace);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::BuiltinBackend;
    use crate::problem::poisson3d;
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

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn dense_lu_roundtrip_and_reconstruction() {
        // deterministic diagonally dominant test matrix
        let n = 20;
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = if i == j {
                    10.0 + i as f64
                } else {
                    ((i * 31 + j * 17) % 7) as f64 * 0.3 - 0.9
                };
                if v != 0.0 {
                    t.push(Triplet::new(i, j, v));
                }
            }
        }
        let a = CsrMatrix::from_triplets(&t, n, n).unwrap();
        let lu = DenseLu::factor(&a).unwrap();

        // PA = LU, reconstructed from the packed factors
        let dense = a.to_dense();
        let mut max_err: f64 = 0.0;
        let mut max_mag: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                // L has an implied unit diagonal, U is the upper part
                let mut prod = 0.0;
                for k in 0..n {
                    let lik = if k < i {
                        lu.lu[i * n + k]
                    } else if k == i {
                        1.0
                    } else {
                        0.0
                    };
                    let ukj = if k <= j { lu.lu[k * n + j] } else { 0.0 };
                    prod += lik * ukj;
                }
                let pa = dense[lu.perm[i] * n + j];
                max_err = max_err.max((prod - pa).abs());
                max_mag = max_mag.max(pa.abs());
            }
        }
        assert!(max_err <= 1e-10 * max_mag, "PA = LU off by {max_err}");

        // solve against a known solution
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).cos()).collect();
        let mut f = vec![0.0; n];
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            let (cols, vals) = a.row(i);
            f[i] = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
        let mut u = vec![0.0; n];
        lu.solve(&f, &mut u);
        for (ui, xi) in u.iter().zip(&x) {
            assert!((ui - xi).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_lu_rejects_singular() {
        let a = CsrMatrix::from_triplets(
            &[
                Triplet::new(0, 0, 1.0),
                Triplet::new(0, 1, 2.0),
                Triplet::new(1, 0, 2.0),
                Triplet::new(1, 1, 4.0),
            ],
            2,
            2,
        )
        .unwrap();
        assert!(matches!(
            DenseLu::factor(&a),
            Err(Error::SingularCoarseMatrix { .. })
        ));
    }

    #[test]
    fn small_matrix_gives_single_level() {
        let a = poisson1d(10);
        let h = setup(&a, &AmgParams::default()).unwrap();
        assert_eq!(h.num_levels(), 1);
        assert!(!h.stagnated());

        // the V-cycle is then exactly the direct solve
        let be = BuiltinBackend::new(1);
        let mut ws = h.workspace();
        let f = vec![1.0; 10];
        let mut u = vec![0.0; 10];
        h.vcycle(&be, 0, &f, &mut u, &mut ws);
        let mut r = vec![0.0; 10];
        be.residual(&a, &u, &f, &mut r);
        assert!(norm(&r) <= 1e-10 * norm(&f));
    }

    #[test]
    fn poisson_16_builds_decreasing_levels() {
        let problem = poisson3d::<f64>(16).unwrap();
        let params = AmgParams {
            coarse_enough: 100,
            ..AmgParams::default()
        };
        let h = setup(&problem.matrix, &params).unwrap();
        assert!(h.num_levels() >= 2);
        let mut prev = usize::MAX;
        for i in 0..h.num_levels() {
            let rows = h.rows_at(i);
            assert!(rows < prev, "level {i} did not shrink");
            prev = rows;
        }
        assert!(h.rows_at(h.num_levels() - 1) <= 100 || h.stagnated());
    }

    #[test]
    fn identity_matrix_stagnates_into_direct_solve() {
        let a = CsrMatrix::from_diag(&[1.0; 10]);
        let params = AmgParams {
            coarse_enough: 1,
            ..AmgParams::default()
        };
        let h = setup(&a, &params).unwrap();
        assert!(h.stagnated());
        assert_eq!(h.num_levels(), 1);

        let be = BuiltinBackend::new(1);
        let mut ws = h.workspace();
        let f = vec![3.0; 10];
        let mut u = vec![0.0; 10];
        h.vcycle(&be, 0, &f, &mut u, &mut ws);
        assert_eq!(u, f);
    }

    #[test]
    fn vcycle_reduces_poisson_residual() {
        let a = poisson1d(64);
        let params = AmgParams {
            coarse_enough: 8,
            ..AmgParams::default()
        };
        let h = setup(&a, &params).unwrap();
        assert!(h.num_levels() >= 2);
        let be = BuiltinBackend::new(1);
        let mut ws = h.workspace();
        let f: Vec<f64> = (0..64).map(|i| ((i * 37 % 11) as f64) / 11.0 - 0.4).collect();
        let mut u = vec![0.0; 64];
        h.vcycle(&be, 0, &f, &mut u, &mut ws);
        let mut r = vec![0.0; 64];
        be.residual(&a, &u, &f, &mut r);
        assert!(norm(&r) < norm(&f));
    }

    #[test]
    fn zero_rhs_keeps_zero_solution() {
        let a = poisson1d(32);
        let params = AmgParams {
            coarse_enough: 8,
            ..AmgParams::default()
        };
        let h = setup(&a, &params).unwrap();
        let be = BuiltinBackend::new(1);
        let mut ws = h.workspace();
        let f = vec![0.0; 32];
        let mut u = vec![0.0; 32];
        h.vcycle(&be, 0, &f, &mut u, &mut ws);
        assert_eq!(u, vec![0.0; 32]);
    }

    #[test]
    fn preconditioner_is_linear() {
        let a = poisson1d(48);
        let params = AmgParams {
            coarse_enough: 6,
            ..AmgParams::default()
        };
        let h = setup(&a, &params).unwrap();
        let be = BuiltinBackend::new(1);
        let mut ws = h.workspace();
        let n = 48;
        let r1: Vec<f64> = (0..n).map(|i| ((i * 13 % 17) as f64) / 17.0 - 0.5).collect();
        let r2: Vec<f64> = (0..n).map(|i| ((i * 29 % 23) as f64) / 23.0 - 0.3).collect();
        let (alpha, beta) = (0.7, -1.9);

        let mut z1 = vec![0.0; n];
        let mut z2 = vec![0.0; n];
        let mut z12 = vec![0.0; n];
        h.apply_preconditioner(&be, &r1, &mut z1, &mut ws);
        h.apply_preconditioner(&be, &r2, &mut z2, &mut ws);
        let combo: Vec<f64> = r1
            .iter()
            .zip(&r2)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        h.apply_preconditioner(&be, &combo, &mut z12, &mut ws);
        let scale = norm(&z12);
        for i in 0..n {
            let expect = alpha * z1[i] + beta * z2[i];
            assert!((z12[i] - expect).abs() <= 1e-11 * scale.max(1.0));
        }
    }

    #[test]
    fn preconditioner_is_self_adjoint_with_spai0() {
        let a = poisson1d(40);
        let params = AmgParams {
            coarse_enough: 6,
            ..AmgParams::default()
        };
        let h = setup(&a, &params).unwrap();
        let be = BuiltinBackend::new(1);
        let mut ws = h.workspace();
        let n = 40;
        let r1: Vec<f64> = (0..n).map(|i| ((i * 7 % 19) as f64) / 19.0 - 0.5).collect();
        let r2: Vec<f64> = (0..n).map(|i| ((i * 11 % 29) as f64) / 29.0 - 0.5).collect();
        let mut z1 = vec![0.0; n];
        let mut z2 = vec![0.0; n];
        h.apply_preconditioner(&be, &r1, &mut z1, &mut ws);
        h.apply_preconditioner(&be, &r2, &mut z2, &mut ws);
        let lhs: f64 = z1.iter().zip(&r2).map(|(a, b)| a * b).sum();
        let rhs: f64 = r1.iter().zip(&z2).map(|(a, b)| a * b).sum();
        assert!(
            (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1e-30),
            "{lhs} vs {rhs}"
        );
    }

    #[test]
    fn setup_validates_parameters() {
        let a = poisson1d(6);
        let no_sweeps = AmgParams {
            npre: 0,
            npost: 0,
            ..AmgParams::default()
        };
        assert!(matches!(
            setup(&a, &no_sweeps),
            Err(Error::InvalidParam { name: "npre/npost", .. })
        ));
        let bad_coarse = AmgParams {
            coarse_enough: 0,
            ..AmgParams::default()
        };
        assert!(matches!(
            setup(&a, &bad_coarse),
            Err(Error::InvalidParam { name: "coarse_enough", .. })
        ));
    }

    #[test]
    fn report_single_level_complexities_are_one() {
        let a = poisson1d(10);
        let h = setup(&a, &AmgParams::default()).unwrap();
        let rep = h.report();
        assert_eq!(rep.levels.len(), 1);
        assert_eq!(rep.operator_complexity, 1.0);
        assert_eq!(rep.grid_complexity, 1.0);
    }

    #[test]
    fn report_two_level_arithmetic() {
        // quarter-size coarse level gives grid complexity 1.25
        let a = poisson1d(64);
        let params = AmgParams {
            coarse_enough: 40,
            coarsening: CoarseningParams {
                smooth: false,
                ..CoarseningParams::default()
            },
            max_levels: 2,
            ..AmgParams::default()
        };
        let h = setup(&a, &params).unwrap();
        let rep = h.report();
        assert_eq!(rep.levels.len(), 2);
        let expected_grid = 1.0 + rep.levels[1].0 as f64 / rep.levels[0].0 as f64;
        assert!((rep.grid_complexity - expected_grid).abs() < 1e-12);
        let expected_op = 1.0 + rep.levels[1].1 as f64 / rep.levels[0].1 as f64;
        assert!((rep.operator_complexity - expected_op).abs() < 1e-12);
    }
}
