//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walkprep::ordering::{
    order_combined, order_greedy_insertion, order_mhs_linear, order_mhs_nonlinear, order_mst, order_random, order_shp,
    order_sorted,
};
use walkprep::sim::{fidelity, run_circuit, StateVector};
use walkprep::synth::synthesized_cx_count;
use walkprep::{synthesize_lowered, BasisState, SparseState, SynthOptions, WalkOrder};

/// `m` distinct basis states with random complex amplitudes bounded away
/// from zero.
pub fn random_state(n: usize, m: usize, seed: u64) -> SparseState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = sample(&mut rng, 1 << n, m);
    let entries: Vec<(BasisState, Complex64)> = idx
        .iter()
        .map(|v| {
            let r = rng.random_range(0.2..1.0);
            let phi = rng.random_range(-3.2..3.2);
            (BasisState::new(n, v as u32).unwrap(), Complex64::from_polar(r, phi))
        })
        .collect();
    SparseState::normalized(n, entries).unwrap()
}

pub fn all_options() -> [SynthOptions; 4] {
    [(true, true), (true, false), (false, true), (false, false)].map(|(c, f)| SynthOptions {
        control_reduction: c,
        frame_propagation: f,
    })
}

/// Every ordering heuristic, the greedy ones costed under `opts`.
pub fn all_orders(s: &SparseState, seed: u64, opts: SynthOptions) -> Vec<(&'static str, WalkOrder)> {
    let cost = move |st: &SparseState, o: &WalkOrder| synthesized_cx_count(st, o, opts);
    let lin = order_mhs_linear(s);
    let greedy_mhs = order_greedy_insertion(s, &lin, &cost).unwrap();
    let combined = order_combined(s, greedy_mhs.clone(), lin.clone(), &cost).unwrap();
    vec![
        ("sorted", order_sorted(s)),
        ("random", order_random(s, seed)),
        ("mst", order_mst(s)),
        ("shp", order_shp(s)),
        ("mhs-nonlinear", order_mhs_nonlinear(s)),
        (
            "greedy-sorted",
            order_greedy_insertion(s, &order_sorted(s), &cost).unwrap(),
        ),
        ("mhs-linear", lin),
        ("greedy-mhs", greedy_mhs),
        ("combined", combined),
    ]
}

/// Fidelity of the lowered circuit's output with the target.
pub fn prepared_fidelity(s: &SparseState, order: &WalkOrder, opts: SynthOptions) -> f64 {
    let c = synthesize_lowered(s, order, opts).unwrap();
    let out = run_circuit(&c, &StateVector::zero(s.n()).unwrap()).unwrap();
    fidelity(s, &out).unwrap()
}

pub fn b(s: &str) -> BasisState {
    s.parse().unwrap()
}
