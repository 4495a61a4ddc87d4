//! Library side of the `walkprep` command-line tool: random instances,
//! ordering selection, benchmarks, QASM and verification.

pub mod bench;
pub mod qasm;
pub mod random;
pub mod verify;

pub use bench::{
    order_for, prepare, run_bench, write_csv, BenchConfig, BenchRecord, BenchReport, MSpec, OrderKind, SummaryRow,
};
pub use qasm::{emit_qasm, parse_qasm};
pub use random::random_sparse_state;
pub use verify::{verify, VerifyReport, FIDELITY_THRESHOLD};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] walkprep::Error),
    #[error("line {line}: {msg}")]
    Qasm { line: usize, msg: String },
    #[error("out of range: {0}")]
    Range(String),
    #[error("verification failed for n={n} m={m} order={order} seed={seed}: fidelity {fidelity}")]
    Verification {
        n: usize,
        m: usize,
        order: String,
        seed: u64,
        fidelity: f64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
