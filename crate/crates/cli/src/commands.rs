//! Command implementations behind the CLI: problem loading, the solve
//! report, and the benchmark harness.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};

use amgrid::problem::{poisson3d, ProblemBundle};
use amgrid::runtime::RuntimeSolverSpec;
use amgrid::{build_runtime_solver, BuiltinBackend, ParamTree};

use crate::mtx;

/// Loads the system to solve from a file or the Poisson generator.
/// A file matrix without an explicit right-hand side gets all ones.
pub fn load_problem(
    matrix: Option<&Path>,
    rhs: Option<&Path>,
    poisson: Option<usize>,
) -> Result<ProblemBundle> {
    match (matrix, poisson) {
        (Some(_), Some(_)) => bail!("pass either --matrix or --poisson, not both"),
        (None, None) => bail!("one of --matrix or --poisson is required"),
        (None, Some(n)) => {
            let bundle = poisson3d(n).context("generating the Poisson problem")?;
            Ok(bundle)
        }
        (Some(path), None) => {
            let a = mtx::read_matrix_market(path)
                .with_context(|| format!("reading matrix {}", path.display()))?;
            let rhs = match rhs {
                Some(rhs_path) => {
                    let v = mtx::read_rhs(rhs_path)
                        .with_context(|| format!("reading rhs {}", rhs_path.display()))?;
                    if v.len() != a.nrows() {
                        bail!(
                            "rhs length {} does not match the {} matrix rows",
                            v.len(),
                            a.nrows()
                        );
                    }
                    v
                }
                None => vec![1.0; a.nrows()],
            };
            Ok(ProblemBundle {
                matrix: a,
                rhs,
                solution: None,
            })
        }
    }
}

/// Merges `--config` file contents and repeatable `--set path=value`
/// overrides into one tree (overrides win).
pub fn assemble_config(config: Option<&Path>, sets: &[String]) -> Result<ParamTree> {
    let mut tree = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            ParamTree::parse(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ParamTree::new(),
    };
    for set in sets {
        let sub = ParamTree::parse(set).with_context(|| format!("parsing --set {set:?}"))?;
        if sub.is_empty() {
            bail!("--set {set:?} assigns nothing");
        }
        for (path, leaf) in sub.iter() {
            tree.put(path, leaf.clone());
        }
    }
    Ok(tree)
}

/// Everything the solve command reports: the per-phase wall times, the
/// iteration outcome, and a summary of the hierarchy and configuration.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub unknowns: usize,
    pub nonzeros: usize,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    pub total_seconds: f64,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    pub breakdown: Option<String>,
    pub levels: usize,
    pub grid_complexity: f64,
    pub operator_complexity: f64,
    pub level_table: Vec<(usize, usize)>,
    /// The effective configuration, defaults filled in.
    pub config_echo: String,
    pub warnings: Vec<String>,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "unknowns:            {}", self.unknowns)?;
        writeln!(f, "nonzeros:            {}", self.nonzeros)?;
        writeln!(f, "levels:              {}", self.levels)?;
        writeln!(f, "grid complexity:     {:.4}", self.grid_complexity)?;
        writeln!(f, "operator complexity: {:.4}", self.operator_complexity)?;
        writeln!(f, "level        rows          nnz")?;
        for (i, (rows, nnz)) in self.level_table.iter().enumerate() {
            writeln!(f, "{i:>5} {rows:>11} {nnz:>12}")?;
        }
        writeln!(f, "setup time:          {:.4} s", self.setup_seconds)?;
        writeln!(f, "solve time:          {:.4} s", self.solve_seconds)?;
        writeln!(f, "total time:          {:.4} s", self.total_seconds)?;
        writeln!(f, "iterations:          {}", self.iterations)?;
        writeln!(f, "relative residual:   {:.3e}", self.relative_residual)?;
        writeln!(
            f,
            "converged:           {}",
            if self.converged { "yes" } else { "no" }
        )?;
        if let Some(reason) = &self.breakdown {
            writeln!(f, "breakdown:           {reason}")?;
        }
        writeln!(f, "configuration:")?;
        for line in self.config_echo.lines() {
            writeln!(f, "    {line}")?;
        }
        Ok(())
    }
}

/// Builds the configured solver for the bundle and runs it once.
/// Returns the report and the computed solution vector.
pub fn run_solve(
    bundle: &ProblemBundle,
    tree: &ParamTree,
    backend: &BuiltinBackend,
) -> Result<(SolveReport, Vec<f64>)> {
    let total_start = Instant::now();
    let setup_start = Instant::now();
    let mut build = build_runtime_solver(&bundle.matrix, tree)?;
    let setup_seconds = setup_start.elapsed().as_secs_f64();

    let mut u = vec![0.0; bundle.matrix.nrows()];
    let solve_start = Instant::now();
    let result = build.solver.solve(backend, &bundle.rhs, &mut u);
    let solve_seconds = solve_start.elapsed().as_secs_f64();
    let total_seconds = total_start.elapsed().as_secs_f64();

    let hrep = build.solver.hierarchy().report();
    let report = SolveReport {
        unknowns: bundle.matrix.nrows(),
        nonzeros: bundle.matrix.nnz(),
        setup_seconds,
        solve_seconds,
        total_seconds,
        iterations: result.iterations,
        relative_residual: result.relative_residual,
        converged: result.converged,
        breakdown: result.breakdown,
        levels: hrep.levels.len(),
        grid_complexity: hrep.grid_complexity,
        operator_complexity: hrep.operator_complexity,
        level_table: hrep.levels,
        config_echo: build.solver.spec().to_tree().to_text(),
        warnings: build.warnings,
    };
    Ok((report, u))
}

/// One benchmark table row.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n: usize,
    pub unknowns: usize,
    pub nonzeros: usize,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    pub total_seconds: f64,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    pub notes: Vec<String>,
}

/// Runs the Poisson benchmark for each size. Timings are best-of-`repeats`;
/// iteration counts must agree across repeats and a disagreement or a
/// failed convergence marks the row while the harness continues.
pub fn run_bench(
    sizes: &[usize],
    tree: &ParamTree,
    repeats: usize,
    backend: &BuiltinBackend,
) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() {
        bail!("at least one benchmark size is required");
    }
    let repeats = repeats.max(1);
    // fail fast on configuration mistakes instead of once per size
    RuntimeSolverSpec::<f64>::from_tree(tree)?;

    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let bundle = poisson3d::<f64>(n).with_context(|| format!("generating poisson {n}"))?;
        let mut best: Option<SolveReport> = None;
        let mut counts = Vec::with_capacity(repeats);
        let mut notes = Vec::new();
        for _ in 0..repeats {
            let (report, _) = run_solve(&bundle, tree, backend)?;
            counts.push(report.iterations);
            if !report.converged {
                let reason = report
                    .breakdown
                    .clone()
                    .unwrap_or_else(|| "did not converge".to_string());
                if !notes.contains(&reason) {
                    notes.push(reason);
                }
            }
            best = match best {
                Some(prev) if prev.total_seconds <= report.total_seconds => Some(prev),
                _ => Some(report),
            };
        }
        if counts.windows(2).any(|w| w[0] != w[1]) {
            notes.push(format!("iteration counts varied across repeats: {counts:?}"));
        }
        let best = best.expect("at least one repeat ran");
        rows.push(BenchRow {
            n,
            unknowns: best.unknowns,
            nonzeros: best.nonzeros,
            setup_seconds: best.setup_seconds,
            solve_seconds: best.solve_seconds,
            total_seconds: best.total_seconds,
            iterations: best.iterations,
            relative_residual: best.relative_residual,
            converged: best.converged && counts.windows(2).all(|w| w[0] == w[1]),
            notes,
        });
    }
    Ok(rows)
}

/// Tab-separated benchmark table with a header line.
pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "n\tunknowns\tnnz\tsetup_s\tsolve_s\ttotal_s\titerations\tresidual\tstatus\n",
    );
    for row in rows {
        let status = if row.converged {
            "ok".to_string()
        } else if row.notes.is_empty() {
            "failed".to_string()
        } else {
            format!("failed: {}", row.notes.join("; "))
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}\t{:.3e}\t{}\n",
            row.n,
            row.unknowns,
            row.nonzeros,
            row.setup_seconds,
            row.solve_seconds,
            row.total_seconds,
            row.iterations,
            row.relative_residual,
            status
        ));
    }
    out
}
