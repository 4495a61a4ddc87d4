//! Invariants checked on generated inputs.

mod common;

use common::{all_options, all_orders, prepared_fidelity, random_state};
use num_complex::Complex64;
use proptest::prelude::*;
use walkprep::decomp::{lower, lowered_cx_count, su2_cx_bound, u2_cx_bound};
use walkprep::sim::{
    circuit_unitary, edge_propagator, embed_controlled, max_abs_diff, run_walks, self_loop_propagator, StateVector,
};
use walkprep::synth::reduce_controls;
use walkprep::{diff_bits, hamming_distance, BasisState, Body, Control, Gate, WalkStep};

fn basis(n: usize) -> impl Strategy<Value = BasisState> {
    (0..1u32 << n).prop_map(move |v| BasisState::new(n, v).unwrap())
}

fn amplitudes(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n).prop_filter_map("nonzero", |v| {
        let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| {
            StateVector::from_amplitudes(v.iter().map(|&(a, b)| Complex64::new(a, b) / norm).collect()).unwrap()
        })
    })
}

fn su2() -> impl Strategy<Value = Body> {
    (0.0..6.3f64, 0.0..6.3f64, 0.0..1.6f64).prop_map(|(p, q, th)| Body::Su2 {
        alpha: Complex64::from_polar(th.cos(), p),
        beta: Complex64::from_polar(th.sin(), q),
    })
}

fn u2() -> impl Strategy<Value = Body> {
    (su2(), 0.0..6.3f64).prop_map(|(b, g)| Body::U2(b.matrix() * Complex64::from_polar(1.0, g)))
}

/// A gate on `n` qubits with `k` controls of random polarity.
fn controlled(n: usize, k: usize, body: impl Strategy<Value = Body>) -> impl Strategy<Value = Gate> {
    (
        Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        prop::collection::vec(any::<bool>(), k),
        body,
    )
        .prop_map(move |(qs, pol, body)| {
            let controls = qs[1..=k].iter().zip(pol).map(|(&q, p)| Control::new(q, p)).collect();
            Gate::controlled(controls, qs[0], body).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hamming_is_a_metric(a in basis(7), b in basis(7), c in basis(7)) {
        let d = |x, y| hamming_distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &b) == 0, a == b);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn diff_bits_cardinality(a in basis(6), b in basis(6), ex in 0usize..6) {
        let h = hamming_distance(&a, &b).unwrap();
        prop_assert_eq!(diff_bits(&a, &b, None).unwrap().len(), h);
        let excluded = usize::from(a.bit(ex) != b.bit(ex));
        prop_assert_eq!(diff_bits(&a, &b, Some(ex)).unwrap().len(), h - excluded);
    }

    #[test]
    fn propagators_compose(j in basis(3), k in basis(3), t1 in -4.0..4.0f64, t2 in -4.0..4.0f64) {
        prop_assume!(j != k);
        let e = |t| edge_propagator(&j, &k, t, 3).unwrap();
        prop_assert!(max_abs_diff(&(e(t1) * e(t2)), &e(t1 + t2)) < 1e-12);
        let l = |t| self_loop_propagator(&j, t, 3).unwrap();
        prop_assert!(max_abs_diff(&(l(t1) * l(t2)), &l(t1 + t2)) < 1e-12);
    }

    #[test]
    fn walks_preserve_norm(psi in amplitudes(4), j in basis(4), k in basis(4), t in -7.0..7.0f64) {
        prop_assume!(j != k);
        let walks = [WalkStep::edge(j, k, t).unwrap(), WalkStep::self_loop(k, 2.0 * t)];
        let out = run_walks(&walks, &psi).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn failed_polarity_is_identity(z in basis(5), g in controlled(5, 3, u2())) {
        let Gate::Controlled { ref controls, .. } = g else { unreachable!() };
        prop_assume!(controls.iter().any(|c| z.bit(c.qubit) != c.polarity));
        let mut psi = StateVector::basis(z).unwrap();
        psi.apply_gate(&g);
        prop_assert!((psi.amplitude(&z) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn su2_lowering_is_exact((k, g) in (0usize..5).prop_flat_map(|k| (Just(k), controlled(6, k, su2())))) {
        let c = lower(&g, 6).unwrap();
        prop_assert!(c.is_lowered());
        prop_assert!(max_abs_diff(&circuit_unitary(&c).unwrap(), &embed_controlled(6, &g).unwrap()) < 1e-9);
        prop_assert_eq!(c.cx_count().unwrap(), lowered_cx_count(&g));
        prop_assert!(c.cx_count().unwrap() <= su2_cx_bound(k));
    }

    #[test]
    fn u2_lowering_is_exact((k, g) in (0usize..5).prop_flat_map(|k| (Just(k), controlled(6, k, u2())))) {
        let c = lower(&g, 6).unwrap();
        prop_assert!(c.is_lowered());
        prop_assert!(max_abs_diff(&circuit_unitary(&c).unwrap(), &embed_controlled(6, &g).unwrap()) < 1e-9);
        prop_assert!(c.cx_count().unwrap() <= u2_cx_bound(k));
    }

    #[test]
    fn reduced_controls_act_like_full_controls(
        (n, m) in (2usize..=6).prop_flat_map(|n| (Just(n), 2usize..=(1 << n).min(10))),
        seed in any::<u64>(),
        body in u2(),
    ) {
        let s = random_state(n, m, seed);
        let live: Vec<BasisState> = s.support().collect();
        let z1 = live[(seed % m as u64) as usize];
        let target = (seed as usize / 7) % n;
        // The partner differing only on the target is the state being merged.
        let others: Vec<BasisState> = live.iter().copied().filter(|z| *z != z1.flip(target)).collect();
        let reduced = Gate::controlled(reduce_controls(&z1, target, &others).unwrap(), target, body).unwrap();
        let full_controls = (0..n).filter(|&q| q != target).map(|q| Control::new(q, z1.bit(q))).collect();
        let full = Gate::controlled(full_controls, target, body).unwrap();
        let (mut a, mut b) = (StateVector::from(&s), StateVector::from(&s));
        a.apply_gate(&reduced);
        b.apply_gate(&full);
        let diff = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_ordering_prepares_the_state(n in 2usize..=6, frac in 0.0..1.0f64, seed in any::<u64>()) {
        let m = 1 + (frac * ((1usize << n).min(n * n) as f64)) as usize;
        let s = random_state(n, m.min(1 << n), seed);
        for opts in all_options() {
            for (name, order) in all_orders(&s, seed, opts) {
                order.validate(&s).unwrap();
                prop_assert_eq!(order.states().len(), s.m());
                let f = prepared_fidelity(&s, &order, opts);
                prop_assert!(f >= 1.0 - 1e-9, "{} {:?}: fidelity {}", name, opts, f);
            }
        }
    }
}
