//! Per-level smoothers: damped Jacobi, SPAI-0, Gauss-Seidel, and Chebyshev,
//! plus the power-iteration spectral estimate the Chebyshev bounds rely on.
//!
//! A [`Smoother`] is built once per level during setup; applying it
//! allocates nothing. Jacobi, SPAI-0, and Chebyshev are expressed through
//! backend primitives and parallelize over rows. Gauss-Seidel is an
//! in-place sequential sweep over the CSR structure (forward for
//! pre-relaxation, backward for post-relaxation).

use crate::backend::Backend;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Relaxation method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxKind {
    DampedJacobi,
    Spai0,
    GaussSeidel,
    Chebyshev,
}

impl RelaxKind {
    pub fn name(&self) -> &'static str {
        match self {
            RelaxKind::DampedJacobi => "damped_jacobi",
            RelaxKind::Spai0 => "spai0",
            RelaxKind::GaussSeidel => "gauss_seidel",
            RelaxKind::Chebyshev => "chebyshev",
        }
    }
}

/// Smoother construction knobs.
#[derive(Debug, Clone, Copy)]
pub struct RelaxParams<S: Scalar = f64> {
    pub kind: RelaxKind,
    /// Damping for Jacobi; ignored by the other kinds.
    pub omega: S,
    /// Chebyshev polynomial degree.
    pub cheb_degree: usize,
    /// Lower spectral bound as a fraction of the upper bound.
    pub cheb_lower_fraction: S,
    /// Power iteration count for the spectral estimate.
    pub power_iters: usize,
}

impl<S: Scalar> Default for RelaxParams<S> {
    fn default() -> Self {
        Self {
            kind: RelaxKind::Spai0,
            omega: S::from_f64_lossy(0.72),
            cheb_degree: 5,
            cheb_lower_fraction: S::from_f64_lossy(1.0 / 30.0),
            power_iters: 20,
        }
    }
}

impl<S: Scalar> RelaxParams<S> {
    fn validate(&self) -> Result<()> {
        let omega = self.omega.to_f64_lossy();
        if !(omega > 0.0 && omega < 2.0) {
            return Err(Error::InvalidParam {
                name: "omega",
                detail: format!("{omega} outside (0, 2)"),
            });
        }
        if self.cheb_degree == 0 {
            return Err(Error::InvalidParam {
                name: "cheb_degree",
                detail: "must be at least 1".into(),
            });
        }
        let frac = self.cheb_lower_fraction.to_f64_lossy();
        if !(frac > 0.0 && frac < 1.0) {
            return Err(Error::InvalidParam {
                name: "cheb_lower_fraction",
                detail: format!("{frac} outside (0, 1)"),
            });
        }
        if self.power_iters == 0 {
            return Err(Error::InvalidParam {
                name: "power_iters",
                detail: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Sweep direction; relevant for Gauss-Seidel only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Pre,
    Post,
}

#[derive(Debug, Clone)]
enum SmootherData<S: Scalar> {
    DampedJacobi { inv_diag: Vec<S>, omega: S },
    Spai0 { diag: Vec<S> },
    GaussSeidel,
    Chebyshev(Chebyshev<S>),
}

#[derive(Debug, Clone)]
struct Chebyshev<S: Scalar> {
    lambda_min: S,
    lambda_max: S,
    /// Per-step recurrence coefficients `(c_d, c_r)`:
    /// `d <- c_d * d + c_r * r`.
    coeffs: Vec<(S, S)>,
    /// True when the power iteration did not settle and the Gershgorin
    /// bound was used instead.
    spectral_fallback: bool,
}

/// Prepared relaxation state for one matrix.
#[derive(Debug, Clone)]
pub struct Smoother<S: Scalar = f64> {
    n: usize,
    data: SmootherData<S>,
}

impl<S: Scalar> Smoother<S> {
    pub fn kind(&self) -> RelaxKind {
        match &self.data {
            SmootherData::DampedJacobi { .. } => RelaxKind::DampedJacobi,
            SmootherData::Spai0 { .. } => RelaxKind::Spai0,
            SmootherData::GaussSeidel => RelaxKind::GaussSeidel,
            SmootherData::Chebyshev(_) => RelaxKind::Chebyshev,
        }
    }

    /// Inverse diagonal of a Jacobi smoother.
    pub fn inv_diag(&self) -> Option<&[S]> {
        match &self.data {
            SmootherData::DampedJacobi { inv_diag, .. } => Some(inv_diag),
            _ => None,
        }
    }

    /// Approximate-inverse diagonal of a SPAI-0 smoother.
    pub fn spai0_diag(&self) -> Option<&[S]> {
        match &self.data {
            SmootherData::Spai0 { diag } => Some(diag),
            _ => None,
        }
    }

    /// `(lambda_min, lambda_max)` of a Chebyshev smoother.
    pub fn chebyshev_bounds(&self) -> Option<(S, S)> {
        match &self.data {
            SmootherData::Chebyshev(c) => Some((c.lambda_min, c.lambda_max)),
            _ => None,
        }
    }

    /// True when the Chebyshev bounds came from the Gershgorin fallback.
    pub fn spectral_fallback(&self) -> bool {
        match &self.data {
            SmootherData::Chebyshev(c) => c.spectral_fallback,
            _ => false,
        }
    }
}

/// Scratch vectors for [`relax`]; sized once per level.
#[derive(Debug, Clone)]
pub struct SmootherScratch<S: Scalar> {
    r: Vec<S>,
    d: Vec<S>,
}

impl<S: Scalar> SmootherScratch<S> {
    pub fn new(n: usize) -> Self {
        Self {
            r: vec![S::zero(); n],
            d: vec![S::zero(); n],
        }
    }
}

fn nonzero_diagonal<S: Scalar>(a: &CsrMatrix<S>) -> Result<Vec<S>> {
    let diag = a.diagonal();
    for (i, d) in diag.iter().enumerate() {
        if d.is_zero() {
            return Err(Error::ZeroDiagonal { row: i });
        }
    }
    Ok(diag)
}

/// Precomputes the per-matrix state of a smoother.
pub fn build_smoother<S: Scalar>(a: &CsrMatrix<S>, params: &RelaxParams<S>) -> Result<Smoother<S>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            op: "build_smoother",
            detail: format!("matrix is {}x{}", a.nrows(), a.ncols()),
        });
    }
    params.validate()?;
    let n = a.nrows();
    let data = match params.kind {
        RelaxKind::DampedJacobi => {
            let inv_diag = nonzero_diagonal(a)?
                .into_iter()
                .map(|d| S::one() / d)
                .collect();
            SmootherData::DampedJacobi {
                inv_diag,
                omega: params.omega,
            }
        }
        RelaxKind::Spai0 => {
            // minimizer of ||I - M A||_F over diagonal M: m_i = a_ii / sum_j a_ij^2
            let diag = nonzero_diagonal(a)?;
            let m = (0..n)
                .map(|i| {
                    let (_, vals) = a.row(i);
                    let mut norm2 = S::zero();
                    for &v in vals {
                        norm2 += v * v;
                    }
                    diag[i] / norm2
                })
                .collect();
            SmootherData::Spai0 { diag: m }
        }
        RelaxKind::GaussSeidel => {
            nonzero_diagonal(a)?;
            SmootherData::GaussSeidel
        }
        RelaxKind::Chebyshev => {
            let est = estimate_spectral_radius(a, false, params.power_iters)?;
            // 2% safety margin on top of the estimated radius
            let lambda_max = est.value * S::from_f64_lossy(1.02);
            if lambda_max <= S::zero() {
                return Err(Error::SpectralBound);
            }
            let lambda_min = lambda_max * params.cheb_lower_fraction;
            SmootherData::Chebyshev(Chebyshev {
                lambda_min,
                lambda_max,
                coeffs: chebyshev_coeffs(lambda_min, lambda_max, params.cheb_degree),
                spectral_fallback: !est.converged,
            })
        }
    };
    Ok(Smoother { n, data })
}

fn chebyshev_coeffs<S: Scalar>(lambda_min: S, lambda_max: S, degree: usize) -> Vec<(S, S)> {
    let two = S::from_f64_lossy(2.0);
    let theta = (lambda_max + lambda_min) / two;
    let delta = (lambda_max - lambda_min) / two;
    let sigma = theta / delta;
    let mut coeffs = Vec::with_capacity(degree);
    coeffs.push((S::zero(), S::one() / theta));
    let mut rho_prev = S::one() / sigma;
    for _ in 1..degree {
        let rho = S::one() / (two * sigma - rho_prev);
        coeffs.push((rho * rho_prev, two * rho / delta));
        rho_prev = rho;
    }
    coeffs
}

/// Applies one smoothing iteration, updating `u` in place.
///
/// Jacobi and SPAI-0 do `u <- u + omega * M * (f - A u)` with the
/// precomputed diagonal `M` (`omega` already absorbed for SPAI-0).
/// Gauss-Seidel performs one forward sweep when `direction` is `Pre` and one
/// backward sweep when it is `Post`. Chebyshev applies its degree-p residual
/// polynomial through the three-term recurrence.
pub fn relax<S: Scalar, B: Backend<S>>(
    smoother: &Smoother<S>,
    a: &CsrMatrix<S>,
    f: &[S],
    u: &mut [S],
    direction: Direction,
    backend: &B,
    scratch: &mut SmootherScratch<S>,
) {
    assert_eq!(u.len(), smoother.n, "relax: solution length");
    assert_eq!(f.len(), smoother.n, "relax: right-hand side length");
    match &smoother.data {
        SmootherData::DampedJacobi { inv_diag, omega } => {
            backend.residual(a, u, f, &mut scratch.r);
            backend.vmul(*omega, inv_diag, &scratch.r, S::one(), u);
        }
        SmootherData::Spai0 { diag } => {
            backend.residual(a, u, f, &mut scratch.r);
            backend.vmul(S::one(), diag, &scratch.r, S::one(), u);
        }
        SmootherData::GaussSeidel => {
            let sweep = |i: usize, u: &mut [S]| {
                let (cols, vals) = a.row(i);
                let mut sum = S::zero();
                let mut diag = S::one();
                for (&j, &v) in cols.iter().zip(vals) {
                    if j == i {
                        diag = v;
                    } else {
                        sum += v * u[j];
                    }
                }
                u[i] = (f[i] - sum) / diag;
            };
            match direction {
                Direction::Pre => {
                    for i in 0..smoother.n {
                        sweep(i, u);
                    }
                }
                Direction::Post => {
                    for i in (0..smoother.n).rev() {
                        sweep(i, u);
                    }
                }
            }
        }
        SmootherData::Chebyshev(cheb) => {
            for (k, &(cd, cr)) in cheb.coeffs.iter().enumerate() {
                backend.residual(a, u, f, &mut scratch.r);
                if k == 0 {
                    backend.axpby(cr, &scratch.r, S::zero(), &mut scratch.d);
                } else {
                    backend.axpby(cr, &scratch.r, cd, &mut scratch.d);
                }
                backend.axpby(S::one(), &scratch.d, S::one(), u);
            }
        }
    }
}

/// Power-iteration estimate of a spectral radius.
#[derive(Debug, Clone, Copy)]
pub struct SpectralEstimate<S> {
    pub value: S,
    /// False when the iteration did not settle and `value` is the
    /// Gershgorin row-sum bound instead.
    pub converged: bool,
}

/// Estimates `rho(A)`, or `rho(D^{-1} A)` when `diag_scaled` is set, with
/// `iters` power iterations from a fixed seeded start vector. Falls back to
/// the Gershgorin bound when the iteration has not settled to 1%.
pub fn estimate_spectral_radius<S: Scalar>(
    a: &CsrMatrix<S>,
    diag_scaled: bool,
    iters: usize,
) -> Result<SpectralEstimate<S>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            op: "estimate_spectral_radius",
            detail: format!("matrix is {}x{}", a.nrows(), a.ncols()),
        });
    }
    let n = a.nrows();
    let inv_diag: Option<Vec<S>> = if diag_scaled {
        Some(
            nonzero_diagonal(a)?
                .into_iter()
                .map(|d| S::one() / d)
                .collect(),
        )
    } else {
        None
    };

    // Fixed splitmix64-seeded start. A constant vector would be exactly
    // orthogonal to the dominant (oscillatory) eigenvector of the model
    // operators this gets used on, so it must vary per entry.
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut v: Vec<S> = (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^= z >> 31;
            S::from_f64_lossy((z >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        })
        .collect();
    let norm = v.iter().map(|&x| x * x).sum::<S>().sqrt();
    if norm.is_zero() {
        return Ok(SpectralEstimate {
            value: S::zero(),
            converged: false,
        });
    }
    for x in v.iter_mut() {
        *x /= norm;
    }

    let mut w = vec![S::zero(); n];
    let mut lambda = S::zero();
    let mut converged = false;
    for _ in 0..iters {
        for i in 0..n {
            let (cols, vals) = a.row(i);
            let mut sum = S::zero();
            for (&j, &av) in cols.iter().zip(vals) {
                sum += av * v[j];
            }
            if let Some(inv) = &inv_diag {
                sum *= inv[i];
            }
            w[i] = sum;
        }
        let rayleigh: S = v.iter().zip(&w).map(|(&a, &b)| a * b).sum();
        let wnorm = w.iter().map(|&x| x * x).sum::<S>().sqrt();
        if wnorm.is_zero() {
            return Ok(SpectralEstimate {
                value: S::zero(),
                converged: false,
            });
        }
        converged = !lambda.is_zero()
            && (rayleigh - lambda).abs() <= S::from_f64_lossy(0.01) * rayleigh.abs();
        lambda = rayleigh;
        for (vi, &wi) in v.iter_mut().zip(&w) {
            *vi = wi / wnorm;
        }
    }

    if converged {
        Ok(SpectralEstimate {
            value: lambda.abs(),
            converged: true,
        })
    } else {
        Ok(SpectralEstimate {
            value: gershgorin_bound(a, inv_diag.as_deref()),
            converged: false,
        })
    }
}

fn gershgorin_bound<S: Scalar>(a: &CsrMatrix<S>, inv_diag: Option<&[S]>) -> S {
    let mut bound = S::zero();
    for i in 0..a.nrows() {
        let (_, vals) = a.row(i);
        let mut sum = S::zero();
        for &v in vals {
            sum += v.abs();
        }
        if let Some(inv) = inv_diag {
            sum *= inv[i].abs();
        }
        if sum > bound {
            bound = sum;
        }
    }
    bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::BuiltinBackend;
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

    fn params(kind: RelaxKind) -> RelaxParams<f64> {
        RelaxParams {
            kind,
            ..RelaxParams::default()
        }
    }

    #[test]
    fn jacobi_stores_inverse_diagonal() {
        let a = CsrMatrix::from_diag(&[2.0, 4.0]);
        let s = build_smoother(&a, &params(RelaxKind::DampedJacobi)).unwrap();
        assert_eq!(s.inv_diag().unwrap(), &[0.5, 0.25]);
    }

    #[test]
    fn spai0_closed_form_small() {
        let a = poisson1d(2);
        let s = build_smoother(&a, &params(RelaxKind::Spai0)).unwrap();
        let diag = s.spai0_diag().unwrap();
        assert!((diag[0] - 0.4).abs() < 1e-15);
        assert!((diag[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_bounds_on_identity() {
        let a = CsrMatrix::<f64>::identity(20);
        let s = build_smoother(&a, &params(RelaxKind::Chebyshev)).unwrap();
        let (lo, hi) = s.chebyshev_bounds().unwrap();
        assert!((hi - 1.0).abs() < 0.05, "lambda_max = {hi}");
        assert!((lo - hi / 30.0).abs() < 1e-15);
        assert!(!s.spectral_fallback());
    }

    #[test]
    fn build_rejects_zero_diagonal() {
        let a = CsrMatrix::from_triplets(
            &[Triplet::new(0, 1, 1.0), Triplet::new(1, 0, 1.0)],
            2,
            2,
        )
        .unwrap();
        for kind in [RelaxKind::DampedJacobi, RelaxKind::Spai0, RelaxKind::GaussSeidel] {
            assert!(matches!(
                build_smoother(&a, &params(kind)),
                Err(Error::ZeroDiagonal { row: 0 })
            ));
        }
    }

    #[test]
    fn jacobi_solves_diagonal_system_in_one_sweep() {
        let a = CsrMatrix::from_diag(&[2.0, 4.0]);
        let mut p = params(RelaxKind::DampedJacobi);
        p.omega = 1.0;
        let s = build_smoother(&a, &p).unwrap();
        let be = BuiltinBackend::new(1);
        let mut scratch = SmootherScratch::new(2);
        let mut u = vec![0.0, 0.0];
        relax(&s, &a, &[2.0, 4.0], &mut u, Direction::Pre, &be, &mut scratch);
        assert_eq!(u, vec![1.0, 1.0]);
    }

    #[test]
    fn gauss_seidel_forward_solves_lower_triangular() {
        let a = CsrMatrix::from_triplets(
            &[
                Triplet::new(0, 0, 2.0),
                Triplet::new(1, 0, -1.0),
                Triplet::new(1, 1, 2.0),
            ],
            2,
            2,
        )
        .unwrap();
        let s = build_smoother(&a, &params(RelaxKind::GaussSeidel)).unwrap();
        let be = BuiltinBackend::new(1);
        let mut scratch = SmootherScratch::new(2);
        let mut u = vec![0.0, 0.0];
        relax(&s, &a, &[2.0, 3.0], &mut u, Direction::Pre, &be, &mut scratch);
        assert_eq!(u, vec![1.0, 2.0]);
    }

    #[test]
    fn zero_residual_is_a_fixed_point() {
        let a = poisson1d(8);
        let be = BuiltinBackend::new(1);
        let u_star: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut f = vec![0.0; 8];
        be.spmv(1.0, &a, &u_star, 0.0, &mut f);
        for kind in [
            RelaxKind::DampedJacobi,
            RelaxKind::Spai0,
            RelaxKind::GaussSeidel,
            RelaxKind::Chebyshev,
        ] {
            let s = build_smoother(&a, &params(kind)).unwrap();
            let mut scratch = SmootherScratch::new(8);
            let mut u = u_star.clone();
            relax(&s, &a, &f, &mut u, Direction::Pre, &be, &mut scratch);
            for (ui, si) in u.iter().zip(&u_star) {
                assert!(
                    (ui - si).abs() <= 1e-12 * si.abs().max(1.0),
                    "{kind:?} moved a converged iterate"
                );
            }
        }
    }

    #[test]
    fn gauss_seidel_pair_matches_symmetric_sweep_oracle() {
        // dense oracle: forward (D+L) solve, then backward (D+U) solve
        let a = CsrMatrix::from_triplets(
            &[
                Triplet::new(0, 0, 4.0),
                Triplet::new(0, 1, -1.0),
                Triplet::new(0, 2, -0.5),
                Triplet::new(1, 0, -1.0),
                Triplet::new(1, 1, 3.0),
                Triplet::new(1, 2, -1.0),
                Triplet::new(2, 0, -0.5),
                Triplet::new(2, 1, -1.0),
                Triplet::new(2, 2, 5.0),
            ],
            3,
            3,
        )
        .unwrap();
        let n = 3;
        let f = [1.0, -2.0, 0.25];
        let dense = a.to_dense();

        // oracle
        let mut w = vec![0.2, -0.1, 0.4];
        for i in 0..n {
            let mut sum = f[i];
            for j in 0..n {
                if j != i {
                    sum -= dense[i * n + j] * w[j];
                }
            }
            w[i] = sum / dense[i * n + i];
        }
        for i in (0..n).rev() {
            let mut sum = f[i];
            for j in 0..n {
                if j != i {
                    sum -= dense[i * n + j] * w[j];
                }
            }
            w[i] = sum / dense[i * n + i];
        }

        let s = build_smoother(&a, &params(RelaxKind::GaussSeidel)).unwrap();
        let be = BuiltinBackend::new(1);
        let mut scratch = SmootherScratch::new(n);
        let mut u = vec![0.2, -0.1, 0.4];
        relax(&s, &a, &f, &mut u, Direction::Pre, &be, &mut scratch);
        relax(&s, &a, &f, &mut u, Direction::Post, &be, &mut scratch);
        for (ui, wi) in u.iter().zip(&w) {
            assert!((ui - wi).abs() < 1e-14);
        }
    }

    #[test]
    fn smoothers_are_shift_invariant() {
        let a = poisson1d(12);
        let be = BuiltinBackend::new(1);
        let n = 12;
        let u0: Vec<f64> = (0..n).map(|i| ((i * 7 % 5) as f64) * 0.3 - 0.6).collect();
        let f0: Vec<f64> = (0..n).map(|i| ((i * 3 % 7) as f64) * 0.25 - 0.8).collect();
        let delta: Vec<f64> = (0..n).map(|i| ((i * 11 % 13) as f64) * 0.1 - 0.5).collect();
        let mut a_delta = vec![0.0; n];
        be.spmv(1.0, &a, &delta, 0.0, &mut a_delta);
        let f1: Vec<f64> = f0.iter().zip(&a_delta).map(|(a, b)| a + b).collect();

        for kind in [
            RelaxKind::DampedJacobi,
            RelaxKind::Spai0,
            RelaxKind::GaussSeidel,
            RelaxKind::Chebyshev,
        ] {
            let s = build_smoother(&a, &params(kind)).unwrap();
            let mut scratch = SmootherScratch::new(n);
            let mut ua = u0.clone();
            relax(&s, &a, &f0, &mut ua, Direction::Pre, &be, &mut scratch);
            let mut ub: Vec<f64> = u0.iter().zip(&delta).map(|(a, b)| a + b).collect();
            relax(&s, &a, &f1, &mut ub, Direction::Pre, &be, &mut scratch);
            for ((&xa, &xb), &d) in ua.iter().zip(&ub).zip(&delta) {
                assert!(
                    ((xa + d) - xb).abs() <= 1e-12 * xb.abs().max(1.0),
                    "{kind:?} is not shift invariant"
                );
            }
        }
    }

    #[test]
    fn smoothers_contract_on_poisson() {
        let a = poisson1d(32);
        let be = BuiltinBackend::new(1);
        let f = vec![0.0; 32];
        let u0: Vec<f64> = (0..32).map(|i| ((i * 2654435761_usize % 1000) as f64) / 500.0 - 1.0).collect();
        for kind in [
            RelaxKind::DampedJacobi,
            RelaxKind::Spai0,
            RelaxKind::GaussSeidel,
            RelaxKind::Chebyshev,
        ] {
            let s = build_smoother(&a, &params(kind)).unwrap();
            let mut scratch = SmootherScratch::new(32);
            let mut u = u0.clone();
            let norm0: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            for _ in 0..10 {
                relax(&s, &a, &f, &mut u, Direction::Pre, &be, &mut scratch);
            }
            let norm1: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(norm1 < norm0, "{kind:?} did not contract: {norm0} -> {norm1}");
        }
    }

    #[test]
    fn spectral_radius_identity() {
        let a = CsrMatrix::<f64>::identity(16);
        let est = estimate_spectral_radius(&a, false, 20).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_radius_diagonal() {
        let a = CsrMatrix::from_diag(&[1.0, 2.0, 3.0]);
        let est = estimate_spectral_radius::<f64>(&a, false, 60).unwrap();
        assert!((est.value - 3.0).abs() < 1e-3, "estimate {}", est.value);
    }

    #[test]
    fn spectral_radius_poisson_matches_analytic() {
        // eigenvalues of D^{-1} A for the n=10 chain: 1 - cos(k pi / 11)
        let a = poisson1d(10);
        let exact = 1.0 + (std::f64::consts::PI / 11.0).cos();
        let est = estimate_spectral_radius(&a, true, 20).unwrap();
        assert!(
            (est.value - exact).abs() <= 0.05 * exact,
            "estimate {} vs exact {exact}",
            est.value
        );
    }

    #[test]
    fn spectral_radius_rejects_zero_diagonal_when_scaled() {
        let a = CsrMatrix::from_triplets(
            &[Triplet::new(0, 1, 1.0), Triplet::new(1, 0, 1.0)],
            2,
            2,
        )
        .unwrap();
        assert!(matches!(
            estimate_spectral_radius(&a, true, 10),
            Err(Error::ZeroDiagonal { row: 0 })
        ));
    }
}
