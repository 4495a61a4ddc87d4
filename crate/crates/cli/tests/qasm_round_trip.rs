//! Emitted circuits parse back to the same unitary.

use walkprep::sim::{circuit_unitary, max_abs_diff_up_to_phase};
use walkprep::SynthOptions;
use walkprep_cli::{emit_qasm, parse_qasm, prepare, random_sparse_state, verify, OrderKind};

const ALLOWED: [&str; 7] = ["x", "cx", "rx", "ry", "rz", "u1", "u3"];

#[test]
fn synthesized_circuits_round_trip() {
    for seed in 0..20 {
        let s = random_sparse_state(4, 3 + seed as usize % 10, seed).unwrap();
        let (_, c) = prepare(&s, OrderKind::MhsNonlinear, seed, SynthOptions::default()).unwrap();
        let text = emit_qasm(&c).unwrap();
        for line in text.lines().skip(3) {
            let name = line.split([' ', '(']).next().unwrap();
            assert!(ALLOWED.contains(&name), "{line}");
        }
        let back = parse_qasm(&text).unwrap();
        assert_eq!(back.cx_count().unwrap(), c.cx_count().unwrap());
        let (u, v) = (circuit_unitary(&c).unwrap(), circuit_unitary(&back).unwrap());
        assert!(max_abs_diff_up_to_phase(&u, &v) < 1e-12);
        assert!(verify(&s, &back).unwrap().pass);
    }
}

#[test]
fn bell_circuit_round_trips() {
    let s = walkprep::SparseState::from_json(
        r#"{"n":2,"amplitudes":{"00":[0.7071067811865476,0],"11":[0.7071067811865476,0]}}"#,
    )
    .unwrap();
    let (_, c) = prepare(&s, OrderKind::Sorted, 0, SynthOptions::default()).unwrap();
    assert_eq!(c.cx_count().unwrap(), 1);
    let back = parse_qasm(&emit_qasm(&c).unwrap()).unwrap();
    let report = verify(&s, &back).unwrap();
    assert!((report.fidelity - 1.0).abs() < 1e-12);
}
