//! Exact reference semantics: walk propagators, statevector execution and
//! fidelity. Everything else in the crate is checked against this module.
//!
//! Basis index = big-endian value of the bitstring, so qubit `q` of an
//! `n`-qubit register lives at bit `n - 1 - q` of the index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{hamming_distance, BasisState, MAX_QUBITS};
use crate::circuit::{Circuit, Gate, Mat2};
use crate::error::{Error, Result};
use crate::state::SparseState;
use crate::walk::WalkStep;

/// Largest register for which dense matrices are built.
pub const MAX_DENSE_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(BasisState::zero(n)?)
    }

    pub fn basis(z: BasisState) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << z.n()];
        amps[z.index()] = ONE;
        Ok(Self { n: z.n(), amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::Dimension(format!("{len} amplitudes")));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, z: &BasisState) -> Complex64 {
        self.amps[z.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_width(self.n, other.n)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        let n = self.n;
        let mask = |q: usize| 1usize << (n - 1 - q);
        match gate {
            Gate::X { qubit } => {
                let m = mask(*qubit);
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        self.amps.swap(i, i | m);
                    }
                }
            }
            Gate::Cx { control, target } => {
                let (cm, tm) = (mask(*control), mask(*target));
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
            Gate::Controlled { controls, target, body } => {
                let (mut cmask, mut cval) = (0usize, 0usize);
                for c in controls {
                    cmask |= mask(c.qubit);
                    if c.polarity {
                        cval |= mask(c.qubit);
                    }
                }
                let tm = mask(*target);
                let u = body.matrix();
                apply_2x2(&mut self.amps, tm, cmask, cval, &u);
            }
        }
    }

    fn apply_edge_walk(&mut self, j: usize, k: usize, t: f64) {
        let (s, c) = t.sin_cos();
        let (a, b) = (self.amps[j], self.amps[k]);
        let mis = Complex64::new(0.0, -s);
        self.amps[j] = a * c + b * mis;
        self.amps[k] = a * mis + b * c;
    }

    fn apply_self_loop(&mut self, j: usize, t: f64) {
        self.amps[j] *= Complex64::from_polar(1.0, -t);
    }
}

fn apply_2x2(amps: &mut [Complex64], tm: usize, cmask: usize, cval: usize, u: &Mat2) {
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    for i in 0..amps.len() {
        if i & tm == 0 && i & cmask == cval {
            let j = i | tm;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = u00 * a + u01 * b;
            amps[j] = u10 * a + u11 * b;
        }
    }
}

fn check_width(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("{a} vs {b} qubits")));
    }
    Ok(())
}

fn check_dense(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "dense {n}-qubit matrices exceed the {MAX_DENSE_QUBITS}-qubit limit"
        )));
    }
    Ok(())
}

/// Dense `e^{-it(|j⟩⟨k| + |k⟩⟨j|)}` on `n` qubits, from its closed form.
pub fn edge_propagator(j: &BasisState, k: &BasisState, t: f64, n: usize) -> Result<DMatrix<Complex64>> {
    check_width(j.n(), n)?;
    check_dense(n)?;
    if hamming_distance(j, k)? == 0 {
        return Err(Error::InvalidWalk(format!("edge walk from {j} to itself")));
    }
    let mut u = DMatrix::identity(1 << n, 1 << n);
    let (s, c) = t.sin_cos();
    let (a, b) = (j.index(), k.index());
    u[(a, a)] = Complex64::new(c, 0.0);
    u[(b, b)] = Complex64::new(c, 0.0);
    u[(a, b)] = Complex64::new(0.0, -s);
    u[(b, a)] = Complex64::new(0.0, -s);
    Ok(u)
}

/// Dense `e^{-it|j⟩⟨j|}`: identity except `e^{-it}` at `j`.
pub fn self_loop_propagator(j: &BasisState, t: f64, n: usize) -> Result<DMatrix<Complex64>> {
    check_width(j.n(), n)?;
    check_dense(n)?;
    let mut u = DMatrix::identity(1 << n, 1 << n);
    u[(j.index(), j.index())] = Complex64::from_polar(1.0, -t);
    Ok(u)
}

/// Applies the walks to `psi0` in sequence order (first walk acts first).
pub fn run_walks(walks: &[WalkStep], psi0: &StateVector) -> Result<StateVector> {
    let mut psi = psi0.clone();
    for w in walks {
        check_width(w.n(), psi.n)?;
        match *w {
            WalkStep::Edge { j, k, t } => {
                if j == k {
                    return Err(Error::InvalidWalk(format!("edge walk from {j} to itself")));
                }
                psi.apply_edge_walk(j.index(), k.index(), t)
            }
            WalkStep::SelfLoop { j, t } => psi.apply_self_loop(j.index(), t),
            WalkStep::Merge(_) => return Err(Error::UnsupportedStep("merge steps have no fixed walk time".into())),
        }
    }
    Ok(psi)
}

pub fn run_circuit(circuit: &Circuit, psi0: &StateVector) -> Result<StateVector> {
    check_width(circuit.n(), psi0.n)?;
    let mut psi = psi0.clone();
    for g in circuit.gates() {
        psi.apply_gate(g);
    }
    Ok(psi)
}

/// Dense unitary of a circuit, built column by column.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DMatrix<Complex64>> {
    let n = circuit.n();
    check_dense(n)?;
    let dim = 1 << n;
    let mut u = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let psi = run_circuit(circuit, &StateVector::basis(BasisState::new(n, col as u32)?)?)?;
        for (row, a) in psi.amps.iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}

/// Dense product of the walk propagators, later walks on the left.
pub fn walks_unitary(walks: &[WalkStep], n: usize) -> Result<DMatrix<Complex64>> {
    check_dense(n)?;
    let mut u = DMatrix::identity(1 << n, 1 << n);
    for w in walks {
        let step = match *w {
            WalkStep::Edge { j, k, t } => edge_propagator(&j, &k, t, n)?,
            WalkStep::SelfLoop { j, t } => self_loop_propagator(&j, t, n)?,
            WalkStep::Merge(_) => return Err(Error::UnsupportedStep("merge steps have no fixed walk time".into())),
        };
        u = step * u;
    }
    Ok(u)
}

/// Dense matrix of a single-qubit body acting on `target` of `n` qubits
/// under the given controls.
pub fn embed_controlled(n: usize, gate: &Gate) -> Result<DMatrix<Complex64>> {
    circuit_unitary(&Circuit::from_gates(n, [gate.clone()])?)
}

/// Something that can be overlapped with a dense statevector.
pub trait Overlap {
    fn qubits(&self) -> usize;
    /// `⟨self|other⟩`.
    fn overlap(&self, other: &StateVector) -> Result<Complex64>;
}

impl Overlap for StateVector {
    fn qubits(&self) -> usize {
        self.n
    }

    fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        self.inner(other)
    }
}

impl Overlap for SparseState {
    fn qubits(&self) -> usize {
        self.n()
    }

    fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        check_width(self.n(), other.n)?;
        Ok(self.entries().iter().map(|(z, c)| c.conj() * other.amplitude(z)).sum())
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity<A: Overlap + ?Sized>(a: &A, b: &StateVector) -> Result<f64> {
    check_width(a.qubits(), b.n)?;
    Ok(a.overlap(b)?.norm_sqr().min(1.0))
}

impl From<&SparseState> for StateVector {
    fn from(s: &SparseState) -> Self {
        let mut amps = vec![ZERO; 1 << s.n()];
        for (z, c) in s.entries() {
            amps[z.index()] = *c;
        }
        StateVector { n: s.n(), amps }
    }
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entry-wise deviation after removing the best global phase.
pub fn max_abs_diff_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let tr: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    if tr.norm() == 0.0 {
        return max_abs_diff(a, b);
    }
    let phase = tr / tr.norm();
    let shifted = a.map(|x| x * phase);
    max_abs_diff(&shifted, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Body, Control};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn b(s: &str) -> BasisState {
        s.parse().unwrap()
    }

    fn cplx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn edge_propagator_cx_factor() {
        let u = edge_propagator(&b("10"), &b("11"), FRAC_PI_2, 2).unwrap();
        let mi = cplx(0.0, -1.0);
        let want = DMatrix::from_row_slice(
            4,
            4,
            &[
                ONE, ZERO, ZERO, ZERO, //
                ZERO, ONE, ZERO, ZERO, //
                ZERO, ZERO, ZERO, mi, //
                ZERO, ZERO, mi, ZERO,
            ],
        );
        assert!(max_abs_diff(&u, &want) < 1e-15);
    }

    #[test]
    fn edge_propagator_small_cases() {
        let u = edge_propagator(&b("01"), &b("10"), 0.0, 2).unwrap();
        assert!(max_abs_diff(&u, &DMatrix::identity(4, 4)) < 1e-15);

        let u = edge_propagator(&b("0"), &b("1"), FRAC_PI_4, 1).unwrap();
        let (s, c) = FRAC_PI_4.sin_cos();
        let want = DMatrix::from_row_slice(2, 2, &[cplx(c, 0.0), cplx(0.0, -s), cplx(0.0, -s), cplx(c, 0.0)]);
        assert!(max_abs_diff(&u, &want) < 1e-15);

        assert!(matches!(
            edge_propagator(&b("01"), &b("01"), 1.0, 2),
            Err(Error::InvalidWalk(_))
        ));
    }

    #[test]
    fn self_loop_propagator_cases() {
        let u =
            self_loop_propagator(&b("10"), 1.5 * PI, 2).unwrap() * self_loop_propagator(&b("11"), 1.5 * PI, 2).unwrap();
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            ONE,
            ONE,
            cplx(0.0, 1.0),
            cplx(0.0, 1.0),
        ]));
        assert!(max_abs_diff(&u, &want) < 1e-15);

        let u = self_loop_propagator(&b("0"), PI, 1).unwrap();
        assert!((u[(0, 0)] - cplx(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(u[(1, 1)], ONE);
        let u = self_loop_propagator(&b("101"), 0.0, 3).unwrap();
        assert!(max_abs_diff(&u, &DMatrix::identity(8, 8)) < 1e-15);
    }

    #[test]
    fn fig2_walks_swap_last_two_amplitudes() {
        let psi0 = StateVector::from_amplitudes(vec![cplx(0.1, 0.2), cplx(0.3, -0.1), cplx(-0.5, 0.4), cplx(0.2, 0.6)])
            .unwrap();
        let walks = [
            WalkStep::edge(b("10"), b("11"), FRAC_PI_2).unwrap(),
            WalkStep::self_loop(b("10"), 1.5 * PI),
            WalkStep::self_loop(b("11"), 1.5 * PI),
        ];
        let out = run_walks(&walks, &psi0).unwrap();
        let want = [psi0.amps[0], psi0.amps[1], psi0.amps[3], psi0.amps[2]];
        for (x, y) in out.amps.iter().zip(want) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn run_walks_edge_cases() {
        let psi0 = StateVector::basis(b("010")).unwrap();
        assert_eq!(run_walks(&[], &psi0).unwrap(), psi0);
        let out = run_walks(&[WalkStep::edge(b("010"), b("111"), FRAC_PI_2).unwrap()], &psi0).unwrap();
        assert!((out.amplitude(&b("111")) - cplx(0.0, -1.0)).norm() < 1e-15);
        assert!(out.amplitude(&b("010")).norm() < 1e-15);

        let merge = crate::walk::MergeStep::new(b("010"), b("111"), None).unwrap();
        assert!(matches!(
            run_walks(&[WalkStep::Merge(merge)], &psi0),
            Err(Error::UnsupportedStep(_))
        ));
    }

    #[test]
    fn run_circuit_conventions() {
        let zero = StateVector::zero(2).unwrap();
        assert_eq!(run_circuit(&Circuit::new(2), &zero).unwrap(), zero);

        let c = Circuit::from_gates(2, [Gate::x(0)]).unwrap();
        assert_eq!(run_circuit(&c, &zero).unwrap(), StateVector::basis(b("10")).unwrap());

        let c = Circuit::from_gates(2, [Gate::cx(1, 0)]).unwrap();
        let out = run_circuit(&c, &StateVector::basis(b("11")).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(b("01")).unwrap());

        let c = Circuit::from_gates(3, [Gate::cx(1, 0)]).unwrap();
        let out = run_circuit(&c, &StateVector::basis(b("111")).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(b("011")).unwrap());
    }

    #[test]
    fn controlled_gate_skips_failed_polarity() {
        let g = Gate::controlled(vec![Control::new(0, false), Control::new(2, true)], 1, Body::Rx(0.9)).unwrap();
        let c = Circuit::from_gates(3, [g]).unwrap();
        for s in ["100", "110", "000", "010", "101", "111"] {
            let psi = StateVector::basis(b(s)).unwrap();
            assert_eq!(run_circuit(&c, &psi).unwrap(), psi, "{s}");
        }
        let psi = StateVector::basis(b("001")).unwrap();
        assert_ne!(run_circuit(&c, &psi).unwrap(), psi);
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::zero(1).unwrap();
        let one = StateVector::basis(b("1")).unwrap();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-15);
        let h = 0.5f64.sqrt();
        let plus = SparseState::new(1, [(b("0"), cplx(h, 0.0)), (b("1"), cplx(h, 0.0))]).unwrap();
        assert!((fidelity(&plus, &zero).unwrap() - 0.5).abs() < 1e-15);
        let plus_dense = StateVector::from(&plus);
        assert!((fidelity(&plus_dense, &zero).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(&zero, &StateVector::zero(2).unwrap()).is_err());
    }
}
