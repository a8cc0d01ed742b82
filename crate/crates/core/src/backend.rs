//! Solve-phase primitives and the builtin shared-memory backend.
//!
//! Everything the smoothers and Krylov solvers do is expressed through the
//! [`Backend`] trait: sparse matrix-vector products, residuals, dot products,
//! and linear vector combinations. Alternative implementations (different
//! threading or vectorization strategies) can be swapped in without touching
//! any solver code.
//!
//! The builtin backend parallelizes over rows and elements with a private
//! thread pool. Reductions use a fixed block size, with the partial sums
//! combined in block order, so every primitive returns bit-identical results
//! for any worker count.

use rayon::prelude::*;

use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Fixed reduction block; independent of the worker count on purpose.
const REDUCTION_BLOCK: usize = 4096;
/// Rows handed to one parallel task at a time.
const ROW_BLOCK: usize = 1024;

/// The primitive set required by the solve phase.
///
/// Vectors are contiguous scalar slices; operators are CSR matrices. Every
/// primitive is linear in its vector arguments, and implementations must be
/// deterministic for a fixed worker count. Length or shape disagreement is a
/// caller bug and panics.
pub trait Backend<S: Scalar>: Send + Sync {
    /// `y <- alpha * A * x + beta * y`. `beta == 0` overwrites `y`.
    fn spmv(&self, alpha: S, a: &CsrMatrix<S>, x: &[S], beta: S, y: &mut [S]);

    /// `r <- f - A * x`.
    fn residual(&self, a: &CsrMatrix<S>, x: &[S], f: &[S], r: &mut [S]);

    /// Inner product `sum_i x_i * y_i`.
    fn dot(&self, x: &[S], y: &[S]) -> S;

    /// Euclidean norm `sqrt(dot(x, x))`.
    fn norm2(&self, x: &[S]) -> S {
        self.dot(x, x).sqrt()
    }

    /// `y <- a * x + b * y`.
    fn axpby(&self, a: S, x: &[S], b: S, y: &mut [S]);

    /// `z <- a * x + b * y + c * z`.
    fn axpbypcz(&self, a: S, x: &[S], b: S, y: &[S], c: S, z: &mut [S]);

    /// `y <- a * (d ∘ x) + b * y`, elementwise product with a diagonal.
    fn vmul(&self, a: S, d: &[S], x: &[S], b: S, y: &mut [S]);

    /// `y <- x`.
    fn copy(&self, x: &[S], y: &mut [S]);

    /// `y <- 0`.
    fn set_zero(&self, y: &mut [S]);
}

/// Shared-memory backend with a private worker pool.
///
/// One worker means strictly sequential execution with no pool at all;
/// results are bit-identical either way.
pub struct BuiltinBackend {
    workers: usize,
    pool: Option<rayon::ThreadPool>,
}

impl BuiltinBackend {
    /// Creates a backend with `workers` threads (clamped to at least one).
    pub fn new(workers: usize) -> Self {
        let workers = workers.max(1);
        let pool = if workers > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .expect("failed to build backend thread pool"),
            )
        } else {
            None
        };
        Self { workers, pool }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }
}

impl Default for BuiltinBackend {
    fn default() -> Self {
        let workers = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1);
        Self::new(workers)
    }
}

#[inline]
fn row_sum<S: Scalar>(a: &CsrMatrix<S>, i: usize, x: &[S]) -> S {
    let (cols, vals) = a.row(i);
    let mut sum = S::zero();
    for (&j, &v) in cols.iter().zip(vals) {
        sum += v * x[j];
    }
    sum
}

#[inline]
fn block_dot<S: Scalar>(x: &[S], y: &[S]) -> S {
    let mut sum = S::zero();
    for (&a, &b) in x.iter().zip(y) {
        sum += a * b;
    }
    sum
}

impl<S: Scalar> Backend<S> for BuiltinBackend {
    fn spmv(&self, alpha: S, a: &CsrMatrix<S>, x: &[S], beta: S, y: &mut [S]) {
        assert_eq!(x.len(), a.ncols(), "spmv: x length vs matrix columns");
        assert_eq!(y.len(), a.nrows(), "spmv: y length vs matrix rows");
        let update = |base: usize, out: &mut [S]| {
            for (k, yi) in out.iter_mut().enumerate() {
                let s = row_sum(a, base + k, x);
                *yi = if beta.is_zero() {
                    alpha * s
                } else {
                    alpha * s + beta * *yi
                };
            }
        };
        if self.pool.is_some() {
            self.install(|| {
                y.par_chunks_mut(ROW_BLOCK)
                    .enumerate()
                    .for_each(|(ci, out)| update(ci * ROW_BLOCK, out));
            });
        } else {
            update(0, y);
        }
    }

    fn residual(&self, a: &CsrMatrix<S>, x: &[S], f: &[S], r: &mut [S]) {
        assert_eq!(x.len(), a.ncols(), "residual: x length vs matrix columns");
        assert_eq!(f.len(), a.nrows(), "residual: f length vs matrix rows");
        assert_eq!(r.len(), a.nrows(), "residual: r length vs matrix rows");
        let update = |base: usize, out: &mut [S]| {
            for (k, ri) in out.iter_mut().enumerate() {
                let i = base + k;
                *ri = f[i] - row_sum(a, i, x);
            }
        };
        if self.pool.is_some() {
            self.install(|| {
                r.par_chunks_mut(ROW_BLOCK)
                    .enumerate()
                    .for_each(|(ci, out)| update(ci * ROW_BLOCK, out));
            });
        } else {
            update(0, r);
        }
    }

    fn dot(&self, x: &[S], y: &[S]) -> S {
        assert_eq!(x.len(), y.len(), "dot: length mismatch");
        let partials: Vec<S> = if self.pool.is_some() {
            self.install(|| {
                x.par_chunks(REDUCTION_BLOCK)
                    .zip(y.par_chunks(REDUCTION_BLOCK))
                    .map(|(cx, cy)| block_dot(cx, cy))
                    .collect()
            })
        } else {
            x.chunks(REDUCTION_BLOCK)
                .zip(y.chunks(REDUCTION_BLOCK))
                .map(|(cx, cy)| block_dot(cx, cy))
                .collect()
        };
        let mut sum = S::zero();
        for p in partials {
            sum += p;
        }
        sum
    }

    fn axpby(&self, a: S, x: &[S], b: S, y: &mut [S]) {
        assert_eq!(x.len(), y.len(), "axpby: length mismatch");
        let update = |xs: &[S], ys: &mut [S]| {
            for (yi, &xi) in ys.iter_mut().zip(xs) {
                *yi = if b.is_zero() { a * xi } else { a * xi + b * *yi };
            }
        };
        if self.pool.is_some() {
            self.install(|| {
                y.par_chunks_mut(REDUCTION_BLOCK)
                    .zip(x.par_chunks(REDUCTION_BLOCK))
                    .for_each(|(ys, xs)| update(xs, ys));
            });
        } else {
            update(x, y);
        }
    }

    fn axpbypcz(&self, a: S, x: &[S], b: S, y: &[S], c: S, z: &mut [S]) {
        assert_eq!(x.len(), z.len(), "axpbypcz: length mismatch");
        assert_eq!(y.len(), z.len(), "axpbypcz: length mismatch");
        let update = |xs: &[S], ys: &[S], zs: &mut [S]| {
            for ((zi, &xi), &yi) in zs.iter_mut().zip(xs).zip(ys) {
                *zi = if c.is_zero() {
                    a * xi + b * yi
                } else {
                    a * xi + b * yi + c * *zi
                };
            }
        };
        if self.pool.is_some() {
            self.install(|| {
                z.par_chunks_mut(REDUCTION_BLOCK)
                    .zip(x.par_chunks(REDUCTION_BLOCK))
                    .zip(y.par_chunks(REDUCTION_BLOCK))
                    .for_each(|((zs, xs), ys)| update(xs, ys, zs));
            });
        } else {
            update(x, y, z);
        }
    }

    fn vmul(&self, a: S, d: &[S], x: &[S], b: S, y: &mut [S]) {
        assert_eq!(d.len(), y.len(), "vmul: length mismatch");
        assert_eq!(x.len(), y.len(), "vmul: length mismatch");
        let update = |ds: &[S], xs: &[S], ys: &mut [S]| {
            for ((yi, &di), &xi) in ys.iter_mut().zip(ds).zip(xs) {
                *yi = if b.is_zero() {
                    a * (di * xi)
                } else {
                    a * (di * xi) + b * *yi
                };
            }
        };
        if self.pool.is_some() {
            self.install(|| {
                y.par_chunks_mut(REDUCTION_BLOCK)
                    .zip(d.par_chunks(REDUCTION_BLOCK))
                    .zip(x.par_chunks(REDUCTION_BLOCK))
                    .for_each(|((ys, ds), xs)| update(ds, xs, ys));
            });
        } else {
            update(d, x, y);
        }
    }

    fn copy(&self, x: &[S], y: &mut [S]) {
        assert_eq!(x.len(), y.len(), "copy: length mismatch");
        y.copy_from_slice(x);
    }

    fn set_zero(&self, y: &mut [S]) {
        for yi in y.iter_mut() {
            *yi = S::zero();
        }
    }
}
