//! Algebraic multigrid preconditioning and Krylov solvers for large sparse
//! linear systems `A u = f`.
//!
//! The library is split along the classic two-phase structure of multigrid:
//!
//! * the **setup phase** ([`hierarchy::setup`]) runs on host data structures
//!   and builds a grid hierarchy from the matrix alone — strength of
//!   connection, aggregation, transfer operators, Galerkin coarse matrices,
//!   and per-level smoothers;
//! * the **solve phase** (V-cycles inside [`krylov`] iterations) is expressed
//!   through a small set of parallel primitives behind the
//!   [`backend::Backend`] trait, so the iteration kernels never touch matrix
//!   internals directly.
//!
//! Components are composed either at compile time, by calling the module
//! APIs, or at run time from a string-keyed parameter tree (see [`config`]
//! and [`runtime`]).
//!
//! ```
//! use amgrid::{AmgParams, BuiltinBackend, Cg, SolverParams};
//! use amgrid::hierarchy::{setup, AmgPreconditioner};
//! use amgrid::problem::poisson3d;
//!
//! let problem = poisson3d::<f64>(8).unwrap();
//! let backend = BuiltinBackend::new(1);
//! let hierarchy = setup(&problem.matrix, &AmgParams::default()).unwrap();
//! let mut precond = AmgPreconditioner::new(&hierarchy, &backend);
//! let mut cg = Cg::new(problem.matrix.nrows(), SolverParams::default());
//! let mut u = vec![0.0; problem.matrix.nrows()];
//! let result = cg.solve(&backend, &problem.matrix, &mut precond, &problem.rhs, &mut u);
//! assert!(result.converged);
//! ```

pub mod backend;
pub mod coarsening;
pub mod config;
mod error;
pub mod hierarchy;
pub mod krylov;
pub mod problem;
pub mod relaxation;
pub mod runtime;
mod scalar;
pub mod sparse;

pub use backend::{Backend, BuiltinBackend};
pub use coarsening::CoarseningParams;
pub use config::ParamTree;
pub use error::{Error, Result};
pub use hierarchy::{AmgParams, Hierarchy};
pub use krylov::{BiCgStab, Cg, SolveResult, SolverParams};
pub use relaxation::{RelaxKind, RelaxParams};
pub use runtime::{build_runtime_solver, ComposedSolver};
pub use scalar::Scalar;
pub use sparse::{galerkin_product, spgemm, CsrMatrix, Triplet};
