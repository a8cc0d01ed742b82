//! Library side of the `amgrid` command-line tool: MatrixMarket I/O and the
//! solve/bench command implementations, kept callable for tests.

pub mod commands;
pub mod mtx;

pub use commands::{
    assemble_config, bench_table, load_problem, run_bench, run_solve, BenchRow, SolveReport,
};
pub use mtx::{read_matrix_market, read_rhs, write_matrix_market, write_rhs, MtxError};
