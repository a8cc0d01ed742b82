//! Preconditioned Krylov solvers: conjugate gradients and BiCGStab.
//!
//! Both solvers own their workspace, so a solve allocates nothing; one
//! solver object runs one solve at a time, and distinct objects may run
//! concurrently against shared matrices and hierarchies. Convergence is
//! decided on the true residual — recomputed from scratch at every
//! convergence candidate and every 50 iterations — relative to the norm of
//! the right-hand side.

use crate::backend::Backend;
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Something that can be applied as a preconditioner: `z <- M r`.
///
/// Takes `&mut self` because implementations carry their own scratch
/// vectors.
pub trait Precondition<S: Scalar> {
    fn apply(&mut self, r: &[S], z: &mut [S]);
}

/// The identity preconditioner.
pub struct IdentityPrecond;

impl<S: Scalar> Precondition<S> for IdentityPrecond {
    fn apply(&mut self, r: &[S], z: &mut [S]) {
        z.copy_from_slice(r);
    }
}

/// Stopping controls shared by the solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverParams<S: Scalar = f64> {
    /// Relative residual target: stop once `||f - A u|| <= tol * ||f||`.
    pub tol: S,
    /// Absolute residual target; zero disables it.
    pub abstol: S,
    pub maxiter: usize,
}

impl<S: Scalar> Default for SolverParams<S> {
    fn default() -> Self {
        Self {
            tol: S::from_f64_lossy(1e-8),
            abstol: S::zero(),
            maxiter: 100,
        }
    }
}

impl<S: Scalar> SolverParams<S> {
    fn assert_valid(&self) {
        assert!(
            self.tol >= S::zero() && self.abstol >= S::zero(),
            "tolerances must be nonnegative"
        );
        assert!(
            !(self.tol.is_zero() && self.abstol.is_zero()),
            "tol and abstol cannot both be zero"
        );
        assert!(self.maxiter >= 1, "maxiter must be at least 1");
    }

    fn threshold(&self, fnorm: S) -> S {
        let rel = self.tol * fnorm;
        if rel > self.abstol {
            rel
        } else {
            self.abstol
        }
    }
}

/// Outcome of a solve. `relative_residual` is `||f - A u|| / ||f||`
/// recomputed from the final iterate, not the recurrence value.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<S: Scalar = f64> {
    pub iterations: usize,
    pub relative_residual: S,
    pub converged: bool,
    /// Why the iteration stopped early, if it broke down.
    pub breakdown: Option<String>,
}

const RECOMPUTE_INTERVAL: usize = 50;

/// Preconditioned conjugate gradients.
///
/// Requires a symmetric positive definite operator and a self-adjoint
/// positive definite preconditioner; that is the caller's responsibility.
/// Indefiniteness encountered during the iteration is flagged as a
/// breakdown in the result rather than a panic.
pub struct Cg<S: Scalar = f64> {
    params: SolverParams<S>,
    r: Vec<S>,
    z: Vec<S>,
    p: Vec<S>,
    q: Vec<S>,
}

impl<S: Scalar> Cg<S> {
    pub fn new(n: usize, params: SolverParams<S>) -> Self {
        params.assert_valid();
        Self {
            params,
            r: vec![S::zero(); n],
            z: vec![S::zero(); n],
            p: vec![S::zero(); n],
            q: vec![S::zero(); n],
        }
    }

    pub fn params(&self) -> &SolverParams<S> {
        &self.params
    }

    pub fn solve<B: Backend<S>, M: Precondition<S>>(
        &mut self,
        backend: &B,
        a: &CsrMatrix<S>,
        precond: &mut M,
        f: &[S],
        u: &mut [S],
    ) -> SolveResult<S> {
        let n = a.nrows();
        assert_eq!(a.ncols(), n, "cg: operator must be square");
        assert_eq!(f.len(), n, "cg: rhs length");
        assert_eq!(u.len(), n, "cg: solution length");
        assert_eq!(self.r.len(), n, "cg: solver sized for a different n");

        let fnorm = backend.norm2(f);
        if fnorm.is_zero() {
            backend.set_zero(u);
            return SolveResult {
                iterations: 0,
                relative_residual: S::zero(),
                converged: true,
                breakdown: None,
            };
        }
        let threshold = self.params.threshold(fnorm);

        backend.residual(a, u, f, &mut self.r);
        precond.apply(&self.r, &mut self.z);
        backend.copy(&self.z, &mut self.p);
        let mut rho = backend.dot(&self.r, &self.z);

        let mut iterations = 0;
        let mut converged = backend.norm2(&self.r) <= threshold;
        let mut breakdown = None;

        if !converged && rho <= S::zero() {
            breakdown = Some(format!("non-positive preconditioned product rho = {rho}"));
        }

        while !converged && breakdown.is_none() && iterations < self.params.maxiter {
            backend.spmv(S::one(), a, &self.p, S::zero(), &mut self.q);
            let pq = backend.dot(&self.p, &self.q);
            if pq <= S::zero() {
                breakdown = Some(format!("indefinite operator: p'Ap = {pq}"));
                break;
            }
            let alpha = rho / pq;
            backend.axpby(alpha, &self.p, S::one(), u);
            iterations += 1;

            if iterations % RECOMPUTE_INTERVAL == 0 {
                backend.residual(a, u, f, &mut self.r);
            } else {
                backend.axpby(-alpha, &self.q, S::one(), &mut self.r);
            }

            if backend.norm2(&self.r) <= threshold {
                // accept only on the true residual
                backend.residual(a, u, f, &mut self.r);
                if backend.norm2(&self.r) <= threshold {
                    converged = true;
                    break;
                }
            }

            precond.apply(&self.r, &mut self.z);
            let rho_next = backend.dot(&self.r, &self.z);
            if rho_next <= S::zero() {
                breakdown = Some(format!(
                    "non-positive preconditioned product rho = {rho_next}"
                ));
                break;
            }
            let beta = rho_next / rho;
            backend.axpby(S::one(), &self.z, beta, &mut self.p);
            rho = rho_next;
        }

        backend.residual(a, u, f, &mut self.r);
        let relative_residual = backend.norm2(&self.r) / fnorm;
        SolveResult {
            iterations,
            relative_residual,
            converged,
            breakdown,
        }
    }
}

/// Preconditioned BiCGStab with the shadow residual fixed at the initial
/// residual. Works for general nonsingular operators.
pub struct BiCgStab<S: Scalar = f64> {
    params: SolverParams<S>,
    r: Vec<S>,
    rhat: Vec<S>,
    p: Vec<S>,
    v: Vec<S>,
    phat: Vec<S>,
    shat: Vec<S>,
    t: Vec<S>,
}

impl<S: Scalar> BiCgStab<S> {
    pub fn new(n: usize, params: SolverParams<S>) -> Self {
        params.assert_valid();
        Self {
            params,
            r: vec![S::zero(); n],
            rhat: vec![S::zero(); n],
            p: vec![S::zero(); n],
            v: vec![S::zero(); n],
            phat: vec![S::zero(); n],
            shat: vec![S::zero(); n],
            t: vec![S::zero(); n],
        }
    }

    pub fn params(&self) -> &SolverParams<S> {
        &self.params
    }

    pub fn solve<B: Backend<S>, M: Precondition<S>>(
        &mut self,
        backend: &B,
        a: &CsrMatrix<S>,
        precond: &mut M,
        f: &[S],
        u: &mut [S],
    ) -> SolveResult<S> {
        let n = a.nrows();
        assert_eq!(a.ncols(), n, "bicgstab: operator must be square");
        assert_eq!(f.len(), n, "bicgstab: rhs length");
        assert_eq!(u.len(), n, "bicgstab: solution length");
        assert_eq!(self.r.len(), n, "bicgstab: solver sized for a different n");

        let fnorm = backend.norm2(f);
        if fnorm.is_zero() {
            backend.set_zero(u);
            return SolveResult {
                iterations: 0,
                relative_residual: S::zero(),
                converged: true,
                breakdown: None,
            };
        }
        let threshold = self.params.threshold(fnorm);
        let tiny = S::from_f64_lossy(1e-30);

        backend.residual(a, u, f, &mut self.r);
        backend.copy(&self.r, &mut self.rhat);
        let rhat_norm = backend.norm2(&self.rhat);

        let mut rho = S::one();
        let mut alpha = S::one();
        let mut omega = S::one();
        backend.set_zero(&mut self.p);
        backend.set_zero(&mut self.v);

        let mut iterations = 0;
        let mut converged = backend.norm2(&self.r) <= threshold;
        let mut breakdown: Option<String> = None;

        while !converged && breakdown.is_none() && iterations < self.params.maxiter {
            let rho_next = backend.dot(&self.rhat, &self.r);
            let rnorm = backend.norm2(&self.r);
            if rho_next.abs() < tiny * rhat_norm * rnorm {
                breakdown = Some(format!("shadow residual orthogonal: rho = {rho_next}"));
                break;
            }
            if iterations == 0 {
                backend.copy(&self.r, &mut self.p);
            } else {
                let beta = (rho_next / rho) * (alpha / omega);
                // p <- r + beta * (p - omega * v)
                backend.axpbypcz(
                    S::one(),
                    &self.r,
                    -(beta * omega),
                    &self.v,
                    beta,
                    &mut self.p,
                );
            }
            rho = rho_next;

            precond.apply(&self.p, &mut self.phat);
            backend.spmv(S::one(), a, &self.phat, S::zero(), &mut self.v);
            let rv = backend.dot(&self.rhat, &self.v);
            if rv.abs() < tiny * rhat_norm * backend.norm2(&self.v) {
                breakdown = Some(format!("stalled search direction: rhat'v = {rv}"));
                break;
            }
            alpha = rho / rv;

            // s lives in r from here on
            backend.axpby(-alpha, &self.v, S::one(), &mut self.r);
            iterations += 1;

            if backend.norm2(&self.r) <= threshold {
                // half-step convergence candidate: u + alpha * phat
                backend.axpby(alpha, &self.phat, S::one(), u);
                backend.residual(a, u, f, &mut self.r);
                if backend.norm2(&self.r) <= threshold {
                    converged = true;
                    break;
                }
                // roll the update back; the recomputed residual of the
                // half-step iterate is exactly the refreshed s
                backend.axpby(-alpha, &self.phat, S::one(), u);
            }

            precond.apply(&self.r, &mut self.shat);
            backend.spmv(S::one(), a, &self.shat, S::zero(), &mut self.t);
            let tt = backend.dot(&self.t, &self.t);
            let ts = backend.dot(&self.t, &self.r);
            if tt.is_zero() {
                breakdown = Some("t vanished before convergence".into());
                break;
            }
            omega = ts / tt;

            backend.axpby(alpha, &self.phat, S::one(), u);
            backend.axpby(omega, &self.shat, S::one(), u);
            backend.axpby(-omega, &self.t, S::one(), &mut self.r);

            if iterations % RECOMPUTE_INTERVAL == 0 {
                backend.residual(a, u, f, &mut self.r);
            }
            if backend.norm2(&self.r) <= threshold {
                backend.residual(a, u, f, &mut self.r);
                if backend.norm2(&self.r) <= threshold {
                    converged = true;
                    break;
                }
            }
            if omega.abs() < tiny {
                breakdown = Some(format!("omega underflow: {omega}"));
                break;
            }
        }

        backend.residual(a, u, f, &mut self.r);
        let relative_residual = backend.norm2(&self.r) / fnorm;
        SolveResult {
            iterations,
            relative_residual,
            converged,
            breakdown,
        }
    }
}
