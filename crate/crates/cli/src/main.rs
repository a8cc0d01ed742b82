use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use amgrid::problem::poisson3d;
use amgrid::BuiltinBackend;
use amgrid_cli::{assemble_config, bench_table, load_problem, mtx, run_bench, run_solve};

/// Sparse linear solver with algebraic multigrid preconditioning.
#[derive(Parser)]
#[command(name = "amgrid", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Configuration file (`path = value` lines)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one configuration key, e.g. --set solver.tol=1e-10
    #[arg(long, value_name = "PATH=VALUE")]
    set: Vec<String>,

    /// Backend worker count (default: all cores)
    #[arg(long, value_name = "K")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a system and print the timing/iteration report
    Solve {
        /// MatrixMarket coordinate file with the system matrix
        #[arg(long, value_name = "PATH")]
        matrix: Option<PathBuf>,

        /// MatrixMarket array file with the right-hand side
        #[arg(long, value_name = "PATH")]
        rhs: Option<PathBuf>,

        /// Generate the N^3 Poisson benchmark problem instead
        #[arg(long, value_name = "N")]
        poisson: Option<usize>,

        /// Write the solution vector to this MatrixMarket array file
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,

        #[command(flatten)]
        common: CommonOpts,
    },

    /// Benchmark the Poisson problem over a list of sizes
    Bench {
        /// Comma-separated grid extents, e.g. 16,32,64
        #[arg(long, value_name = "N,N,...", value_delimiter = ',', required = true)]
        sizes: Vec<usize>,

        /// Repetitions per size; timings report the best run
        #[arg(long, default_value_t = 1, value_name = "R")]
        repeats: usize,

        /// Also print the full per-size solve reports
        #[arg(long)]
        detail: bool,

        #[command(flatten)]
        common: CommonOpts,
    },

    /// Write the generated Poisson system to MatrixMarket files
    PoissonDump {
        /// Grid extent N (the system has N^3 unknowns)
        #[arg(long, value_name = "N", required = true)]
        poisson: usize,

        /// Matrix output path
        #[arg(long, value_name = "PATH", required = true)]
        output: PathBuf,

        /// Also write the right-hand side here
        #[arg(long, value_name = "PATH")]
        rhs: Option<PathBuf>,
    },
}

fn backend_for(threads: Option<usize>) -> BuiltinBackend {
    match threads {
        Some(k) => {
            // keep setup-phase parallelism within the same budget
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build_global();
            BuiltinBackend::new(k)
        }
        None => BuiltinBackend::default(),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve {
            matrix,
            rhs,
            poisson,
            output,
            common,
        } => {
            let tree = assemble_config(common.config.as_deref(), &common.set)?;
            let backend = backend_for(common.threads);
            let bundle = load_problem(matrix.as_deref(), rhs.as_deref(), poisson)?;
            let (report, solution) = run_solve(&bundle, &tree, &backend)?;
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            print!("{report}");
            if let Some(path) = output {
                mtx::write_rhs(&solution, &path)
                    .with_context(|| format!("writing solution {}", path.display()))?;
            }
            Ok(if report.converged {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }

        Command::Bench {
            sizes,
            repeats,
            detail,
            common,
        } => {
            let tree = assemble_config(common.config.as_deref(), &common.set)?;
            let (_, warnings) = amgrid::runtime::RuntimeSolverSpec::<f64>::from_tree(&tree)?;
            for warning in &warnings {
                eprintln!("warning: {warning}");
            }
            let backend = backend_for(common.threads);
            let rows = run_bench(&sizes, &tree, repeats, &backend)?;
            print!("{}", bench_table(&rows));
            if detail {
                for &n in &sizes {
                    let bundle = poisson3d::<f64>(n)?;
                    let (report, _) = run_solve(&bundle, &tree, &backend)?;
                    println!("\n# poisson {n}");
                    print!("{report}");
                }
            }
            Ok(if rows.iter().all(|r| r.converged) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }

        Command::PoissonDump {
            poisson,
            output,
            rhs,
        } => {
            if poisson == 0 {
                bail!("--poisson must be at least 1");
            }
            let bundle = poisson3d::<f64>(poisson)?;
            mtx::write_matrix_market(&bundle.matrix, &output)
                .with_context(|| format!("writing matrix {}", output.display()))?;
            if let Some(path) = rhs {
                mtx::write_rhs(&bundle.rhs, &path)
                    .with_context(|| format!("writing rhs {}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
