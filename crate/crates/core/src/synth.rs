//! Conversion of walks and walk orders into circuits.
//!
//! `synthesize` runs in the merging direction: starting from the target
//! state it repeatedly folds one basis state's amplitude into another with a
//! controlled SU(2) gate until a single basis state is left, then maps that
//! state to `|0…0⟩` with X gates. The preparation circuit is the inverse.

use num_complex::Complex64;

use crate::basis::{diff_bits, BasisState, QubitSet};
use crate::circuit::{Body, Circuit, Control, Gate, Mat2};
use crate::combinat::{hitting_set, hitting_set_masks, DiffFamily};
use crate::decomp::{lower_circuit, su2_cx_cost};
use crate::error::{Error, Result};
use crate::ordering::WalkOrder;
use crate::state::SparseState;
use crate::walk::MergeStep;

/// A sequence of CX gates viewed as a relabeling of basis states.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Frame {
    cxs: Vec<(usize, usize)>,
}

impl Frame {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends CX(control, target) after the gates already in the frame.
    pub fn push(&mut self, control: usize, target: usize) {
        self.cxs.push((control, target));
    }

    pub fn cxs(&self) -> &[(usize, usize)] {
        &self.cxs
    }

    pub fn len(&self) -> usize {
        self.cxs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cxs.is_empty()
    }

    pub fn apply(&self, b: &BasisState) -> BasisState {
        apply_cxs(&self.cxs, b)
    }

    pub fn gates(&self) -> impl Iterator<Item = Gate> + '_ {
        self.cxs.iter().map(|&(c, t)| Gate::cx(c, t))
    }
}

fn apply_cxs(cxs: &[(usize, usize)], b: &BasisState) -> BasisState {
    let mut out = *b;
    for &(c, t) in cxs {
        if out.bit(c) {
            out = out.flip(t);
        }
    }
    out
}

/// Maps both endpoints of `step` through `f`. The target is kept.
pub fn frame_apply(f: &Frame, step: &MergeStep) -> MergeStep {
    MergeStep {
        z1: f.apply(&step.z1),
        z2: f.apply(&step.z2),
        target: step.target,
    }
}

/// The CX gates that bring `a` and `b` to Hamming distance 1 on `pivot`:
/// control `pivot`, targets the other differing bits in ascending order.
pub fn conjugation_cxs(a: &BasisState, b: &BasisState, pivot: usize) -> Result<Vec<(usize, usize)>> {
    let d = diff_bits(a, b, None)?;
    if !d.contains(pivot) {
        return Err(Error::InvalidWalk(format!("{a} and {b} agree on qubit {pivot}")));
    }
    Ok(d.iter().filter(|&q| q != pivot).map(|q| (pivot, q)).collect())
}

/// A 2×2 special unitary folding `(a1, a2)` into `(r, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MergeGate {
    pub matrix: Mat2,
    pub a1: Complex64,
    pub a2: Complex64,
}

impl MergeGate {
    pub fn r(&self) -> f64 {
        (self.a1.norm_sqr() + self.a2.norm_sqr()).sqrt()
    }

    pub fn body(&self) -> Body {
        Body::Su2 {
            alpha: self.matrix[(0, 0)],
            beta: self.matrix[(1, 0)],
        }
    }
}

pub fn compute_merge_gate(a1: Complex64, a2: Complex64) -> Result<MergeGate> {
    let r = (a1.norm_sqr() + a2.norm_sqr()).sqrt();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::DegenerateMerge);
    }
    let matrix = Mat2::new(a1.conj() / r, a2.conj() / r, -a2 / r, a1 / r);
    Ok(MergeGate { matrix, a1, a2 })
}

/// Controls for a gate on `target` that must leave every state of `live`
/// other than `z1` untouched: a hitting set of their differences from `z1`
/// (excluding `target`), with polarities read off `z1`.
pub fn reduce_controls(z1: &BasisState, target: usize, live: &[BasisState]) -> Result<Vec<Control>> {
    let sets = live
        .iter()
        .filter(|s| *s != z1)
        .map(|s| diff_bits(s, z1, Some(target)))
        .collect::<Result<Vec<_>>>()?;
    let family = DiffFamily::new(QubitSet::range(z1.n()), sets)?;
    Ok(controls_on(z1, hitting_set(&family)))
}

fn controls_on(z: &BasisState, qubits: QubitSet) -> Vec<Control> {
    qubits.iter().map(|q| Control::new(q, z.bit(q))).collect()
}

fn all_controls(z: &BasisState, target: usize) -> Vec<Control> {
    let mut qs = QubitSet::range(z.n());
    qs.remove(target);
    controls_on(z, qs)
}

fn wrap_cxs(n: usize, cxs: &[(usize, usize)], middle: Gate) -> Result<Circuit> {
    let mut gates: Vec<Gate> = cxs.iter().map(|&(c, t)| Gate::cx(c, t)).collect();
    gates.push(middle);
    gates.extend(cxs.iter().rev().map(|&(c, t)| Gate::cx(c, t)));
    Circuit::from_gates(n, gates)
}

/// Circuit for the single-edge walk `U(j,k;t)`, pivoting on the highest
/// differing qubit.
pub fn convert_edge_walk(j: &BasisState, k: &BasisState, t: f64) -> Result<Circuit> {
    let pivot = diff_bits(j, k, None)?
        .last()
        .ok_or_else(|| Error::InvalidWalk(format!("edge walk from {j} to itself")))?;
    convert_edge_walk_on(j, k, t, pivot)
}

/// As `convert_edge_walk`, with the controlled rotation on `pivot`.
pub fn convert_edge_walk_on(j: &BasisState, k: &BasisState, t: f64, pivot: usize) -> Result<Circuit> {
    let cxs = conjugation_cxs(j, k, pivot)?;
    let j1 = apply_cxs(&cxs, j);
    let gate = Gate::controlled(all_controls(&j1, pivot), pivot, Body::Rx(2.0 * t))?;
    wrap_cxs(j.n(), &cxs, gate)
}

/// Circuit for the self-loop walk `U(j;t)`.
///
/// Without a partner this is a controlled phase on a set bit of `j` and is
/// exact. With a `zero_partner` it is a controlled Rz, exact only on states
/// where the partner has zero amplitude.
pub fn convert_self_loop_walk(j: &BasisState, t: f64, zero_partner: Option<&BasisState>) -> Result<Circuit> {
    let n = j.n();
    if t == 0.0 {
        return Ok(Circuit::new(n));
    }
    match zero_partner {
        None => {
            let (target, flip) = match j.ones().first() {
                Some(q) => (q, false),
                None => (n - 1, true),
            };
            let j1 = if flip { j.flip(target) } else { *j };
            let gate = Gate::controlled(all_controls(&j1, target), target, Body::P(-t))?;
            let mut gates = Vec::new();
            if flip {
                gates.push(Gate::x(target));
            }
            gates.push(gate);
            if flip {
                gates.push(Gate::x(target));
            }
            Circuit::from_gates(n, gates)
        }
        Some(p) => {
            let pivot = diff_bits(j, p, None)?
                .last()
                .ok_or_else(|| Error::InvalidWalk(format!("{j} is its own partner")))?;
            let cxs = conjugation_cxs(j, p, pivot)?;
            let j1 = apply_cxs(&cxs, j);
            let theta = if j1.bit(pivot) { -2.0 * t } else { 2.0 * t };
            let gate = Gate::controlled(all_controls(&j1, pivot), pivot, Body::Rz(theta))?;
            wrap_cxs(n, &cxs, gate)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthOptions {
    /// Control each merge on a hitting set instead of all other qubits.
    pub control_reduction: bool,
    /// Allow conjugating CX gates to be absorbed into a frame that relabels
    /// the remaining states instead of being undone right away. Absorbing
    /// every conjugation is not always cheaper, because relabeling can move
    /// later pairs further apart; when enabled, the absorbed and the undone
    /// compilations are both costed and the cheaper one is built, ties going
    /// to the absorbed one.
    pub frame_propagation: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            control_reduction: true,
            frame_propagation: true,
        }
    }
}

/// One merge of the trace, in qubit-mask form (bit `q` is qubit `q`).
#[derive(Clone, Copy, Debug)]
struct Merge {
    i1: usize,
    i2: usize,
    target: usize,
    /// CX targets of the conjugation; the control is `target`.
    cx_targets: u32,
    /// Label of `z1` after conjugation.
    z1: u32,
    controls: u32,
}

#[derive(Clone, Debug)]
struct Trace {
    merges: Vec<Merge>,
    root: usize,
    root_label: u32,
    cx: usize,
}

fn to_mask(z: &BasisState) -> u32 {
    z.ones().mask()
}

/// Relabeling by CX(`pivot` → each bit of `targets`).
#[inline]
fn conj(x: u32, pivot: usize, targets: u32) -> u32 {
    if x >> pivot & 1 == 1 {
        x ^ targets
    } else {
        x
    }
}

fn reduced_controls(z1: u32, target: usize, others: &[u32], scratch: &mut Vec<u32>) -> u32 {
    scratch.clear();
    let keep = !(1u32 << target);
    scratch.extend(others.iter().map(|s| (s ^ z1) & keep));
    hitting_set_masks(scratch)
}

/// Runs the merge loop on labels only: which qubit each merge targets, its
/// conjugation and its controls, plus the lowered CX total.
fn trace(
    n: usize,
    labels: &[u32],
    steps: &[(usize, usize, Option<usize>)],
    control_reduction: bool,
    propagate: bool,
) -> Trace {
    let all = ((1u64 << n) - 1) as u32;
    let mut cur = labels.to_vec();
    let mut alive: Vec<usize> = (0..labels.len()).collect();
    let mut merges = Vec::with_capacity(steps.len());
    let mut others: Vec<u32> = Vec::with_capacity(labels.len());
    let mut moved: Vec<u32> = Vec::with_capacity(labels.len());
    let mut scratch: Vec<u32> = Vec::with_capacity(labels.len());
    let mut cx = 0;
    for &(i1, i2, preset) in steps.iter().rev() {
        let (z1, z2) = (cur[i1], cur[i2]);
        let d = z1 ^ z2;
        others.clear();
        others.extend(alive.iter().filter(|&&i| i != i1 && i != i2).map(|&i| cur[i]));
        let mut choose = |q: usize| {
            let t = d & !(1 << q);
            let z1c = conj(z1, q, t);
            let controls = if control_reduction {
                moved.clear();
                moved.extend(others.iter().map(|&s| conj(s, q, t)));
                reduced_controls(z1c, q, &moved, &mut scratch)
            } else {
                all & !(1 << q)
            };
            (q, t, z1c, controls)
        };
        let (target, cx_targets, z1c, controls) = match preset {
            Some(q) if d >> q & 1 == 1 => choose(q),
            _ if !control_reduction || d.count_ones() == 1 => choose(d.trailing_zeros() as usize),
            _ => {
                // fewest controls, ties to the lowest qubit
                let mut best: Option<(usize, u32, u32, u32)> = None;
                let mut m = d;
                while m != 0 {
                    let q = m.trailing_zeros() as usize;
                    m &= m - 1;
                    let cand = choose(q);
                    if best.is_none_or(|b| cand.3.count_ones() < b.3.count_ones()) {
                        best = Some(cand);
                    }
                }
                best.expect("distinct states differ")
            }
        };
        let conj_cx = cx_targets.count_ones() as usize;
        cx += if propagate { conj_cx } else { 2 * conj_cx };
        cx += su2_cx_cost(controls.count_ones() as usize);
        merges.push(Merge {
            i1,
            i2,
            target,
            cx_targets,
            z1: z1c,
            controls,
        });
        let pos = alive.iter().position(|&i| i == i2).expect("z2 is live");
        alive.swap_remove(pos);
        if propagate && cx_targets != 0 {
            for &i in &alive {
                cur[i] = conj(cur[i], target, cx_targets);
            }
        }
    }
    let root = alive[0];
    Trace {
        merges,
        root,
        root_label: cur[root],
        cx,
    }
}

struct Prepared {
    n: usize,
    labels: Vec<u32>,
    steps: Vec<(usize, usize, Option<usize>)>,
}

fn prepare(s: &SparseState, order: &WalkOrder) -> Result<Prepared> {
    order.validate(s)?;
    let entries = s.entries();
    let index = |z: &BasisState| {
        entries
            .binary_search_by_key(&z.value(), |(b, _)| b.value())
            .map_err(|_| Error::Coverage(format!("{z} is not in the state's support")))
    };
    let steps = order
        .steps()
        .iter()
        .map(|st| Ok((index(&st.z1)?, index(&st.z2)?, st.target)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared {
        n: s.n(),
        labels: entries.iter().map(|(b, _)| to_mask(b)).collect(),
        steps,
    })
}

/// The trace to build and whether it absorbs conjugations.
fn best_trace(p: &Prepared, opts: SynthOptions) -> (Trace, bool) {
    let mirrored = trace(p.n, &p.labels, &p.steps, opts.control_reduction, false);
    if !opts.frame_propagation {
        return (mirrored, false);
    }
    let absorbed = trace(p.n, &p.labels, &p.steps, opts.control_reduction, true);
    if absorbed.cx <= mirrored.cx {
        (absorbed, true)
    } else {
        (mirrored, false)
    }
}

/// Whether synthesis absorbs conjugating CX gates for this instance.
pub fn propagates(s: &SparseState, order: &WalkOrder, opts: SynthOptions) -> Result<bool> {
    Ok(best_trace(&prepare(s, order)?, opts).1)
}

fn mask_controls(controls: u32, z: u32) -> Vec<Control> {
    QubitSet::from_mask(controls)
        .iter()
        .map(|q| Control::new(q, z >> q & 1 == 1))
        .collect()
}

fn cx_gates(pivot: usize, targets: u32) -> impl DoubleEndedIterator<Item = Gate> {
    QubitSet::from_mask(targets)
        .iter()
        .map(move |q| Gate::cx(pivot, q))
        .collect::<Vec<_>>()
        .into_iter()
}

/// Synthesizes a circuit preparing `s` from `|0…0⟩` along `order`. The
/// result still contains multi-controlled gates; see `synthesize_lowered`.
pub fn synthesize(s: &SparseState, order: &WalkOrder, opts: SynthOptions) -> Result<Circuit> {
    let (tr, absorbed) = best_trace(&prepare(s, order)?, opts);
    build(s, &tr, absorbed)
}

fn build(s: &SparseState, tr: &Trace, absorbed: bool) -> Result<Circuit> {
    let n = s.n();
    let mut amps: Vec<Complex64> = s.entries().iter().map(|(_, a)| *a).collect();
    let mut gates: Vec<Gate> = Vec::new();
    for mg in &tr.merges {
        gates.extend(cx_gates(mg.target, mg.cx_targets));
        let merge = compute_merge_gate(amps[mg.i1], amps[mg.i2])?;
        let m = merge.matrix;
        let body = if mg.z1 >> mg.target & 1 == 1 {
            // basis order on the target is (z2, z1): conjugate by X
            Body::Su2 {
                alpha: m[(1, 1)],
                beta: m[(0, 1)],
            }
        } else {
            merge.body()
        };
        gates.push(Gate::controlled(mask_controls(mg.controls, mg.z1), mg.target, body)?);
        if !absorbed {
            gates.extend(cx_gates(mg.target, mg.cx_targets).rev());
        }
        amps[mg.i1] = Complex64::new(merge.r(), 0.0);
    }
    let amp = amps[tr.root];
    // Merges leave a real positive amplitude; a lone basis state keeps its
    // phase, which is global.
    if (amp.norm() - 1.0).abs() > 1e-9 || (!tr.merges.is_empty() && amp.im.abs() > 1e-9) {
        return Err(Error::InvalidState(format!("residual amplitude {amp} after merging")));
    }
    gates.extend(QubitSet::from_mask(tr.root_label).iter().map(Gate::x));
    Ok(Circuit::from_gates(n, gates)?.inverse())
}

/// `synthesize` followed by lowering to {X, CX, 1-qubit}.
pub fn synthesize_lowered(s: &SparseState, order: &WalkOrder, opts: SynthOptions) -> Result<Circuit> {
    lower_circuit(&synthesize(s, order, opts)?)
}

/// CX count of `synthesize_lowered(s, order, opts)` without building any
/// gates. Depends only on the support of `s`, not its amplitudes.
pub fn synthesized_cx_count(s: &SparseState, order: &WalkOrder, opts: SynthOptions) -> Result<usize> {
    Ok(best_trace(&prepare(s, order)?, opts).0.cx)
}

/// Number of CX gates in a lowered circuit.
pub fn cx_count(c: &Circuit) -> Result<usize> {
    c.cx_count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{circuit_unitary, edge_propagator, fidelity, max_abs_diff, run_circuit, StateVector};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn b(s: &str) -> BasisState {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn frame_apply_reproduces_rewrite() {
        let mut f = Frame::new();
        f.push(1, 0);
        let step = MergeStep::new(b("011"), b("110"), None).unwrap();
        let out = frame_apply(&f, &step);
        assert_eq!((out.z1, out.z2), (b("111"), b("010")));
        assert_eq!(f.apply(&b("111")), b("011"));
        assert_eq!(frame_apply(&Frame::new(), &step), step);
        f.push(1, 0);
        assert_eq!(frame_apply(&f, &step), step);
    }

    #[test]
    fn conjugation_of_the_distance_two_pair() {
        assert_eq!(conjugation_cxs(&b("001"), &b("111"), 1).unwrap(), vec![(1, 0)]);
        let circ = convert_edge_walk(&b("001"), &b("111"), 0.3).unwrap();
        assert_eq!(circ.gates()[0], Gate::cx(1, 0));
        assert_eq!(circ.gates()[2], Gate::cx(1, 0));
    }

    #[test]
    fn merge_gate_examples() {
        let g = compute_merge_gate(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((g.matrix - Mat2::identity()).iter().all(|z| z.norm() < 1e-15));
        let h = FRAC_1_SQRT_2;
        let g = compute_merge_gate(c(0.0, h), c(h, 0.0)).unwrap();
        let want = Mat2::new(c(0.0, -h), c(h, 0.0), c(-h, 0.0), c(0.0, h));
        assert!((g.matrix - want).iter().all(|z| z.norm() < 1e-15));
        let v = g.matrix * nalgebra::Vector2::new(g.a1, g.a2);
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-12 && v[1].norm() < 1e-12);
        assert!(matches!(
            compute_merge_gate(c(0.0, 0.0), c(0.0, 0.0)),
            Err(Error::DegenerateMerge)
        ));
    }

    #[test]
    fn reduce_controls_example() {
        let ctl = reduce_controls(&b("111"), 2, &[b("001"), b("111")]).unwrap();
        assert_eq!(ctl, vec![Control::new(0, true)]);
        assert!(reduce_controls(&b("111"), 2, &[b("111")]).unwrap().is_empty());
    }

    #[test]
    fn edge_walk_matches_propagator() {
        for (j, k) in [("10", "11"), ("001", "111"), ("0110", "1001"), ("000", "111")] {
            let (j, k) = (b(j), b(k));
            let circ = convert_edge_walk(&j, &k, 0.7).unwrap();
            let got = circuit_unitary(&circ).unwrap();
            let want = edge_propagator(&j, &k, 0.7, j.n()).unwrap();
            assert!(max_abs_diff(&got, &want) < 1e-12);
        }
    }

    #[test]
    fn self_loop_without_partner() {
        let circ = convert_self_loop_walk(&b("10"), 1.5 * PI, None).unwrap();
        let u = circuit_unitary(&circ).unwrap();
        for i in 0..4 {
            let want = if i == 2 { c(0.0, 1.0) } else { c(1.0, 0.0) };
            assert!((u[(i, i)] - want).norm() < 1e-12);
        }
        assert!(convert_self_loop_walk(&b("00"), 0.0, None).unwrap().is_empty());
        let circ = convert_self_loop_walk(&b("00"), 0.4, None).unwrap();
        let u = circuit_unitary(&circ).unwrap();
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -0.4)).norm() < 1e-12);
        assert!((u[(3, 3)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bell_and_ghz() {
        let h = FRAC_1_SQRT_2;
        let bell = SparseState::new(2, [(b("00"), c(h, 0.0)), (b("11"), c(h, 0.0))]).unwrap();
        let order = WalkOrder::linear(&[b("00"), b("11")]).unwrap();
        let circ = synthesize_lowered(&bell, &order, SynthOptions::default()).unwrap();
        assert_eq!(circ.cx_count().unwrap(), 1);
        let out = run_circuit(&circ, &StateVector::zero(2).unwrap()).unwrap();
        assert!((fidelity(&bell, &out).unwrap() - 1.0).abs() < 1e-12);

        for n in 2..=6 {
            let z = BasisState::zero(n).unwrap();
            let o = BasisState::new(n, (1 << n) - 1).unwrap();
            let ghz = SparseState::new(n, [(z, c(h, 0.0)), (o, c(h, 0.0))]).unwrap();
            let order = WalkOrder::linear(&[z, o]).unwrap();
            assert_eq!(
                synthesized_cx_count(&ghz, &order, SynthOptions::default()).unwrap(),
                n - 1
            );
        }
    }

    #[test]
    fn single_basis_state_needs_only_x() {
        let s = SparseState::basis(b("1011"));
        let order = WalkOrder::linear(&[b("1011")]).unwrap();
        let circ = synthesize_lowered(&s, &order, SynthOptions::default()).unwrap();
        assert_eq!(circ.cx_count().unwrap(), 0);
        assert_eq!(circ.len(), 3);
    }

    #[test]
    fn analytic_count_matches_lowering() {
        let s = SparseState::normalized(
            4,
            [
                (b("0000"), c(0.3, 0.1)),
                (b("0111"), c(-0.2, 0.5)),
                (b("1010"), c(0.4, -0.4)),
                (b("1101"), c(0.1, 0.2)),
                (b("0011"), c(0.6, 0.0)),
            ],
        )
        .unwrap();
        let order = WalkOrder::linear(&s.support().collect::<Vec<_>>()).unwrap();
        for (cr, fp) in [(true, true), (true, false), (false, true), (false, false)] {
            let opts = SynthOptions {
                control_reduction: cr,
                frame_propagation: fp,
            };
            let lowered = synthesize_lowered(&s, &order, opts).unwrap();
            assert_eq!(
                lowered.cx_count().unwrap(),
                synthesized_cx_count(&s, &order, opts).unwrap()
            );
            let out = run_circuit(&lowered, &StateVector::zero(4).unwrap()).unwrap();
            assert!(fidelity(&s, &out).unwrap() > 1.0 - 1e-12);
        }
    }
}
