//! Sparse quantum state preparation with single-edge and self-loop quantum
//! walks.
//!
//! A target state with `m` nonzero amplitudes is prepared by walking over a
//! tree on its basis states. Each walk is compiled to a (multi-)controlled
//! single-qubit gate, conjugated by CX gates when the two basis states are
//! more than one bit apart, and then lowered to X, CX and 1-qubit gates.
//!
//! Qubit 0 is the leftmost character of a bitstring and the most significant
//! bit of a statevector index.

pub mod basis;
pub mod circuit;
pub mod combinat;
pub mod decomp;
pub mod error;
pub mod ordering;
pub mod sim;
pub mod state;
pub mod synth;
pub mod walk;

pub use basis::{diff_bits, hamming_distance, BasisState, QubitSet, MAX_QUBITS};
pub use circuit::{Body, Circuit, Control, Gate};
pub use error::{Error, Result};
pub use ordering::WalkOrder;
pub use state::SparseState;
pub use synth::{synthesize, synthesize_lowered, SynthOptions};
pub use walk::{MergeStep, WalkStep};
