//! Exact fidelity check of a circuit against a target state.

use walkprep::sim::{fidelity, run_circuit, StateVector};
use walkprep::{Circuit, SparseState};

use crate::CliError;

pub const FIDELITY_THRESHOLD: f64 = 1.0 - 1e-9;

/// Largest register verified by dense simulation.
pub const MAX_VERIFY_QUBITS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyReport {
    pub fidelity: f64,
    pub pass: bool,
}

/// Runs `circuit` on `|0…0⟩` and compares with `target`.
pub fn verify(target: &SparseState, circuit: &Circuit) -> Result<VerifyReport, CliError> {
    if target.n() != circuit.n() {
        return Err(CliError::Core(walkprep::Error::Dimension(format!(
            "state has {} qubits, circuit {}",
            target.n(),
            circuit.n()
        ))));
    }
    if target.n() > MAX_VERIFY_QUBITS {
        return Err(CliError::Range(format!(
            "verification limited to {MAX_VERIFY_QUBITS} qubits"
        )));
    }
    let out = run_circuit(circuit, &StateVector::zero(target.n())?)?;
    let f = fidelity(target, &out)?;
    Ok(VerifyReport {
        fidelity: f,
        pass: f >= FIDELITY_THRESHOLD,
    })
}
