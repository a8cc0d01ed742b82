//! Runtime solver composition from a parameter tree.
//!
//! Mirrors the compile-time API: every knob reachable through the module
//! parameter structs is also reachable through a string key, so the choice
//! of Krylov method, coarsening, and smoother can be deferred until the
//! program knows what it is solving. Unknown *keys* are collected as
//! warnings; unknown *component names* are hard errors.

use crate::backend::Backend;
use crate::coarsening::CoarseningParams;
use crate::config::ParamTree;
use crate::error::{Error, Result};
use crate::hierarchy::{setup, AmgParams, Hierarchy, Workspace};
use crate::krylov::{BiCgStab, Cg, Precondition, SolveResult, SolverParams};
use crate::relaxation::{RelaxKind, RelaxParams};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Which Krylov method drives the solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrylovKind {
    Cg,
    BiCgStab,
}

impl KrylovKind {
    pub fn name(&self) -> &'static str {
        match self {
            KrylovKind::Cg => "cg",
            KrylovKind::BiCgStab => "bicgstab",
        }
    }
}

/// Leaf type a registry key expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyKind {
    Str,
    Int,
    Real,
    Bool,
}

/// One recognized configuration key.
#[derive(Debug, Clone, Copy)]
pub struct KeyInfo {
    pub path: &'static str,
    pub kind: KeyKind,
    pub default: &'static str,
    pub doc: &'static str,
}

/// Every key the runtime builder reads. The builder reads exclusively
/// through this table, so documentation and code cannot diverge.
pub const REGISTRY: &[KeyInfo] = &[
    KeyInfo {
        path: "solver.type",
        kind: KeyKind::Str,
        default: "cg",
        doc: "Krylov method: cg | bicgstab",
    },
    KeyInfo {
        path: "solver.tol",
        kind: KeyKind::Real,
        default: "1e-8",
        doc: "relative residual target",
    },
    KeyInfo {
        path: "solver.abstol",
        kind: KeyKind::Real,
        default: "0",
        doc: "absolute residual target (0 disables)",
    },
    KeyInfo {
        path: "solver.maxiter",
        kind: KeyKind::Int,
        default: "100",
        doc: "iteration cap",
    },
    KeyInfo {
        path: "precond.coarsening.type",
        kind: KeyKind::Str,
        default: "smoothed_aggregation",
        doc: "coarsening: aggregation | smoothed_aggregation",
    },
    KeyInfo {
        path: "precond.coarsening.eps_strong",
        kind: KeyKind::Real,
        default: "0.08",
        doc: "strength-of-connection threshold",
    },
    KeyInfo {
        path: "precond.coarsening.omega",
        kind: KeyKind::Real,
        default: "2/3",
        doc: "prolongation smoothing damping",
    },
    KeyInfo {
        path: "precond.coarsening.adaptive_omega",
        kind: KeyKind::Bool,
        default: "false",
        doc: "derive the damping from a spectral estimate instead",
    },
    KeyInfo {
        path: "precond.relax.type",
        kind: KeyKind::Str,
        default: "spai0",
        doc: "smoother: spai0 | damped_jacobi | gauss_seidel | chebyshev",
    },
    KeyInfo {
        path: "precond.relax.omega",
        kind: KeyKind::Real,
        default: "0.72",
        doc: "Jacobi damping",
    },
    KeyInfo {
        path: "precond.relax.cheb_degree",
        kind: KeyKind::Int,
        default: "5",
        doc: "Chebyshev polynomial degree",
    },
    KeyInfo {
        path: "precond.relax.cheb_lower_fraction",
        kind: KeyKind::Real,
        default: "1/30",
        doc: "Chebyshev lower bound as a fraction of the upper",
    },
    KeyInfo {
        path: "precond.relax.power_iters",
        kind: KeyKind::Int,
        default: "20",
        doc: "power iterations for spectral estimates",
    },
    KeyInfo {
        path: "precond.npre",
        kind: KeyKind::Int,
        default: "1",
        doc: "pre-relaxation sweeps per level",
    },
    KeyInfo {
        path: "precond.npost",
        kind: KeyKind::Int,
        default: "1",
        doc: "post-relaxation sweeps per level",
    },
    KeyInfo {
        path: "precond.coarse_enough",
        kind: KeyKind::Int,
        default: "3000",
        doc: "stop coarsening at this many rows",
    },
    KeyInfo {
        path: "precond.max_levels",
        kind: KeyKind::Int,
        default: "30",
        doc: "hierarchy level cap",
    },
];

fn key(path: &'static str) -> &'static KeyInfo {
    REGISTRY
        .iter()
        .find(|k| k.path == path)
        .expect("key must be registered")
}

/// Validated, fully typed runtime configuration.
#[derive(Debug, Clone, Copy)]
pub struct RuntimeSolverSpec<S: Scalar = f64> {
    pub kind: KrylovKind,
    pub solver: SolverParams<S>,
    pub amg: AmgParams<S>,
}

impl<S: Scalar> RuntimeSolverSpec<S> {
    /// Reads every registered key from the tree, falling back to the module
    /// defaults. Returns the spec plus one warning per unrecognized key.
    pub fn from_tree(tree: &ParamTree) -> Result<(Self, Vec<String>)> {
        let solver_defaults = SolverParams::<S>::default();
        let amg_defaults = AmgParams::<S>::default();

        let kind = match tree.get_str(key("solver.type").path, "cg")?.as_str() {
            "cg" => KrylovKind::Cg,
            "bicgstab" => KrylovKind::BiCgStab,
            other => {
                return Err(Error::UnknownComponent {
                    path: "solver.type".into(),
                    value: other.into(),
                    expected: "cg, bicgstab",
                })
            }
        };
        let solver = SolverParams {
            tol: S::from_f64_lossy(
                tree.get_real(key("solver.tol").path, solver_defaults.tol.to_f64_lossy())?,
            ),
            abstol: S::from_f64_lossy(tree.get_real(
                key("solver.abstol").path,
                solver_defaults.abstol.to_f64_lossy(),
            )?),
            maxiter: tree.get_count(key("solver.maxiter").path, solver_defaults.maxiter)?,
        };

        let smooth = match tree
            .get_str(
                key("precond.coarsening.type").path,
                "smoothed_aggregation",
            )?
            .as_str()
        {
            "aggregation" => false,
            "smoothed_aggregation" => true,
            other => {
                return Err(Error::UnknownComponent {
                    path: "precond.coarsening.type".into(),
                    value: other.into(),
                    expected: "aggregation, smoothed_aggregation",
                })
            }
        };
        let coarsening = CoarseningParams {
            eps_strong: S::from_f64_lossy(tree.get_real(
                key("precond.coarsening.eps_strong").path,
                amg_defaults.coarsening.eps_strong.to_f64_lossy(),
            )?),
            smoothing_omega: S::from_f64_lossy(tree.get_real(
                key("precond.coarsening.omega").path,
                amg_defaults.coarsening.smoothing_omega.to_f64_lossy(),
            )?),
            smooth,
            adaptive_omega: tree.get_bool(
                key("precond.coarsening.adaptive_omega").path,
                amg_defaults.coarsening.adaptive_omega,
            )?,
        };

        let relax_kind = match tree
            .get_str(key("precond.relax.type").path, "spai0")?
            .as_str()
        {
            "spai0" => RelaxKind::Spai0,
            "damped_jacobi" => RelaxKind::DampedJacobi,
            "gauss_seidel" => RelaxKind::GaussSeidel,
            "chebyshev" => RelaxKind::Chebyshev,
            other => {
                return Err(Error::UnknownComponent {
                    path: "precond.relax.type".into(),
                    value: other.into(),
                    expected: "spai0, damped_jacobi, gauss_seidel, chebyshev",
                })
            }
        };
        let relax = RelaxParams {
            kind: relax_kind,
            omega: S::from_f64_lossy(tree.get_real(
                key("precond.relax.omega").path,
                amg_defaults.relax.omega.to_f64_lossy(),
            )?),
            cheb_degree: tree.get_count(
                key("precond.relax.cheb_degree").path,
                amg_defaults.relax.cheb_degree,
            )?,
            cheb_lower_fraction: S::from_f64_lossy(tree.get_real(
                key("precond.relax.cheb_lower_fraction").path,
                amg_defaults.relax.cheb_lower_fraction.to_f64_lossy(),
            )?),
            power_iters: tree.get_count(
                key("precond.relax.power_iters").path,
                amg_defaults.relax.power_iters,
            )?,
        };

        let amg = AmgParams {
            coarsening,
            relax,
            npre: tree.get_count(key("precond.npre").path, amg_defaults.npre)?,
            npost: tree.get_count(key("precond.npost").path, amg_defaults.npost)?,
            coarse_enough: tree.get_count(
                key("precond.coarse_enough").path,
                amg_defaults.coarse_enough,
            )?,
            max_levels: tree.get_count(key("precond.max_levels").path, amg_defaults.max_levels)?,
        };

        let warnings = tree
            .iter()
            .filter(|(path, _)| !REGISTRY.iter().any(|k| k.path == *path))
            .map(|(path, value)| format!("unrecognized key \"{path}\" (value {value}) ignored"))
            .collect();

        Ok((
            Self { kind, solver, amg },
            warnings,
        ))
    }

    /// The tree that reproduces this spec explicitly.
    pub fn to_tree(&self) -> ParamTree {
        let mut t = ParamTree::new();
        t.put("solver.type", self.kind.name());
        t.put("solver.tol", self.solver.tol.to_f64_lossy());
        t.put("solver.abstol", self.solver.abstol.to_f64_lossy());
        t.put("solver.maxiter", self.solver.maxiter);
        t.put(
            "precond.coarsening.type",
            if self.amg.coarsening.smooth {
                "smoothed_aggregation"
            } else {
                "aggregation"
            },
        );
        t.put(
            "precond.coarsening.eps_strong",
            self.amg.coarsening.eps_strong.to_f64_lossy(),
        );
        t.put(
            "precond.coarsening.omega",
            self.amg.coarsening.smoothing_omega.to_f64_lossy(),
        );
        t.put(
            "precond.coarsening.adaptive_omega",
            self.amg.coarsening.adaptive_omega,
        );
        t.put("precond.relax.type", self.amg.relax.kind.name());
        t.put("precond.relax.omega", self.amg.relax.omega.to_f64_lossy());
        t.put("precond.relax.cheb_degree", self.amg.relax.cheb_degree);
        t.put(
            "precond.relax.cheb_lower_fraction",
            self.amg.relax.cheb_lower_fraction.to_f64_lossy(),
        );
        t.put("precond.relax.power_iters", self.amg.relax.power_iters);
        t.put("precond.npre", self.amg.npre);
        t.put("precond.npost", self.amg.npost);
        t.put("precond.coarse_enough", self.amg.coarse_enough);
        t.put("precond.max_levels", self.amg.max_levels);
        t
    }
}

impl<S: Scalar> Default for RuntimeSolverSpec<S> {
    fn default() -> Self {
        Self {
            kind: KrylovKind::Cg,
            solver: SolverParams::default(),
            amg: AmgParams::default(),
        }
    }
}

enum KrylovState<S: Scalar> {
    Cg(Cg<S>),
    BiCgStab(BiCgStab<S>),
}

/// A hierarchy bound to a Krylov method, ready to solve repeatedly.
pub struct ComposedSolver<S: Scalar = f64> {
    spec: RuntimeSolverSpec<S>,
    hierarchy: Hierarchy<S>,
    workspace: Workspace<S>,
    krylov: KrylovState<S>,
}

struct HierarchyPrecond<'a, S: Scalar, B: Backend<S>> {
    hierarchy: &'a Hierarchy<S>,
    backend: &'a B,
    workspace: &'a mut Workspace<S>,
}

impl<'a, S: Scalar, B: Backend<S>> Precondition<S> for HierarchyPrecond<'a, S, B> {
    fn apply(&mut self, r: &[S], z: &mut [S]) {
        self.hierarchy
            .apply_preconditioner(self.backend, r, z, self.workspace);
    }
}

impl<S: Scalar> ComposedSolver<S> {
    /// Runs the setup phase for `a` and binds the selected Krylov method.
    pub fn from_spec(a: &CsrMatrix<S>, spec: RuntimeSolverSpec<S>) -> Result<Self> {
        let hierarchy = setup(a, &spec.amg)?;
        let workspace = hierarchy.workspace();
        let n = a.nrows();
        let krylov = match spec.kind {
            KrylovKind::Cg => KrylovState::Cg(Cg::new(n, spec.solver)),
            KrylovKind::BiCgStab => KrylovState::BiCgStab(BiCgStab::new(n, spec.solver)),
        };
        Ok(Self {
            spec,
            hierarchy,
            workspace,
            krylov,
        })
    }

    pub fn spec(&self) -> &RuntimeSolverSpec<S> {
        &self.spec
    }

    pub fn hierarchy(&self) -> &Hierarchy<S> {
        &self.hierarchy
    }

    /// Solves for `f`, improving `u` in place from its initial value.
    pub fn solve<B: Backend<S>>(&mut self, backend: &B, f: &[S], u: &mut [S]) -> SolveResult<S> {
        let a = self
            .hierarchy
            .levels()
            .first()
            .map(|lvl| lvl.a())
            .unwrap_or_else(|| self.hierarchy.coarsest());
        let mut precond = HierarchyPrecond {
            hierarchy: &self.hierarchy,
            backend,
            workspace: &mut self.workspace,
        };
        match &mut self.krylov {
            KrylovState::Cg(cg) => cg.solve(backend, a, &mut precond, f, u),
            KrylovState::BiCgStab(b) => b.solve(backend, a, &mut precond, f, u),
        }
    }
}

/// Composed solver plus any configuration warnings.
pub struct RuntimeBuild<S: Scalar = f64> {
    pub solver: ComposedSolver<S>,
    pub warnings: Vec<String>,
}

/// Builds a solver for `a` as configured by `tree`. Unspecified knobs take
/// the module defaults; unknown component names fail; unrecognized keys are
/// returned as warnings.
pub fn build_runtime_solver<S: Scalar>(a: &CsrMatrix<S>, tree: &ParamTree) -> Result<RuntimeBuild<S>> {
    let (spec, warnings) = RuntimeSolverSpec::from_tree(tree)?;
    let solver = ComposedSolver::from_spec(a, spec)?;
    Ok(RuntimeBuild { solver, warnings })
}
