//! Lowering of multi-controlled single-qubit gates to {X, CX, 1-qubit}, and
//! the constructive split of a two-level unitary into walks.
//!
//! # Special-unitary lowering
//!
//! A special unitary `W` is diagonalised as `W = V Rz(φ) V†`. With the
//! controls split into two halves `g1`, `g2` and `A = Rz(φ/4)`,
//!
//! ```text
//! C_k(Rz(φ)) = A · X^{g1} · A† · X^{g2} · A · X^{g1} · A† · X^{g2}
//! ```
//!
//! where `X^{g}` flips the target when every qubit of `g` is set: with only
//! one half satisfied the factors cancel pairwise, with both satisfied the
//! product is `(Rz(φ/4) X Rz(-φ/4) X)² = Rz(φ)`. Each multi-controlled X
//! borrows the other half as dirty ancillas and only needs to be correct up
//! to a diagonal phase on non-target qubits, because its second occurrence is
//! the adjoint and the phases cancel.
//!
//! CX counts (`k` controls): relative-phase multi-controlled X costs
//! `r(1) = 1`, `r(2) = 4`, `r(c) = 12c - 22` for `c ≥ 3`; the special-unitary
//! lowering costs `B(0) = 0`, `B(1) = 2`, `B(k) = 2r(⌈k/2⌉) + 2r(⌊k/2⌋)`.
//! That gives `B = 0, 2, 4, 10, 16, 36, 56, 80, 104, …` and `B(k) = 24k - 88`
//! for `k ≥ 6`. A general unitary peels off its determinant as a controlled
//! phase on the controls, recursively, for `Σ_{j≤k} B(j)` CX.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::basis::{hamming_distance, BasisState};
use crate::circuit::{is_unitary, Body, Circuit, Control, Gate, Mat2};
use crate::error::{Error, Result};
use crate::walk::WalkStep;

const TINY: f64 = 1e-14;

/// CX count of a relative-phase multi-controlled X with `c` controls.
fn relative_mcx_cost(c: usize) -> usize {
    match c {
        0 => 0,
        1 => 1,
        2 => 4,
        c => 12 * c - 22,
    }
}

/// CX count of the special-unitary lowering with `k` controls.
pub fn su2_cx_cost(k: usize) -> usize {
    match k {
        0 => 0,
        1 => 2,
        k => {
            let (c1, c2) = split(k);
            2 * relative_mcx_cost(c1) + 2 * relative_mcx_cost(c2)
        }
    }
}

/// CX count of the general-unitary lowering with `k` controls.
pub fn u2_cx_cost(k: usize) -> usize {
    (1..=k).map(su2_cx_cost).sum()
}

/// The documented linear bound for special-unitary bodies:
/// `B(k) ≤ 24k` for every `k`, and `B(k) ≤ 16k` up to `k = 11`.
pub fn su2_cx_bound(k: usize) -> usize {
    if k <= 11 {
        16 * k
    } else {
        24 * k
    }
}

/// The documented quadratic bound for general bodies: `12k²`.
pub fn u2_cx_bound(k: usize) -> usize {
    12 * k * k
}

/// CX count `lower` produces for this gate, without building it.
pub fn lowered_cx_count(gate: &Gate) -> usize {
    match gate {
        Gate::X { .. } => 0,
        Gate::Cx { .. } => 1,
        Gate::Controlled { controls, body, .. } => {
            if body.is_special() {
                su2_cx_cost(controls.len())
            } else {
                u2_cx_cost(controls.len())
            }
        }
    }
}

fn split(k: usize) -> (usize, usize) {
    (k.div_ceil(2), k / 2)
}

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Lowers a controlled gate with a special-unitary body.
pub fn lower_mcsu2(gate: &Gate, n: usize) -> Result<Circuit> {
    let (controls, target, body) = controlled_parts(gate)?;
    if !body.is_special() {
        return Err(Error::WrongLowering);
    }
    let mut out = Vec::new();
    with_polarity(controls, &mut out, |cs, out| {
        su2_all_ones(cs, target, &body.matrix(), out)
    });
    finish(n, out)
}

/// Lowers a controlled gate with an arbitrary unitary body, exactly
/// (including the phase the body contributes on the controlled subspace).
pub fn lower_mcu2(gate: &Gate, n: usize) -> Result<Circuit> {
    let (controls, target, body) = controlled_parts(gate)?;
    let mut out = Vec::new();
    with_polarity(controls, &mut out, |cs, out| {
        u2_all_ones(cs, target, &body.matrix(), out)
    });
    finish(n, out)
}

/// Lowers any gate, routing by body type.
pub fn lower(gate: &Gate, n: usize) -> Result<Circuit> {
    match gate {
        Gate::Controlled { controls, .. } if !controls.is_empty() => {
            if let Gate::Controlled { body, .. } = gate {
                if body.is_special() {
                    return lower_mcsu2(gate, n);
                }
            }
            lower_mcu2(gate, n)
        }
        g => Circuit::from_gates(n, [g.clone()]),
    }
}

/// Lowers every gate of `circuit`.
pub fn lower_circuit(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.n());
    for g in circuit.gates() {
        out.extend(&lower(g, circuit.n())?)?;
    }
    Ok(out)
}

fn controlled_parts(gate: &Gate) -> Result<(&[Control], usize, Body)> {
    match gate {
        Gate::Controlled { controls, target, body } => {
            gate.validate()?;
            Ok((controls, *target, *body))
        }
        g => Err(Error::InvalidGate(format!("{g:?} is not a controlled gate"))),
    }
}

fn finish(n: usize, gates: Vec<Gate>) -> Result<Circuit> {
    Circuit::from_gates(n, gates)
}

/// Conjugates 0-polarity controls with X and hands over all-ones controls.
fn with_polarity(controls: &[Control], out: &mut Vec<Gate>, body: impl FnOnce(&[usize], &mut Vec<Gate>)) {
    let flips: Vec<usize> = controls.iter().filter(|c| !c.polarity).map(|c| c.qubit).collect();
    out.extend(flips.iter().map(|&q| Gate::x(q)));
    let cs: Vec<usize> = controls.iter().map(|c| c.qubit).collect();
    body(&cs, out);
    out.extend(flips.iter().map(|&q| Gate::x(q)));
}

fn single(target: usize, m: Mat2) -> Gate {
    Gate::single(target, Body::U2(m))
}

fn su2_all_ones(cs: &[usize], target: usize, w: &Mat2, out: &mut Vec<Gate>) {
    if cs.is_empty() {
        out.push(single(target, *w));
        return;
    }
    let (v, phi) = rz_diagonalize(w);
    out.push(single(target, v.adjoint()));
    controlled_rz(cs, target, phi, out);
    out.push(single(target, v));
}

/// `W = V · Rz(φ) · V†` for a special unitary `W`, read off the rotation
/// axis `n` of `W = cos h − i sin h (n·σ)`; `V` maps the Z axis onto `n`.
fn rz_diagonalize(w: &Mat2) -> (Mat2, f64) {
    let a = w[(0, 0)];
    let b = w[(1, 0)];
    let s = a.im.hypot(b.norm());
    if s < TINY {
        return (Mat2::identity(), -2.0 * a.arg());
    }
    let h = s.atan2(a.re);
    let nz = -a.im / s;
    let nxy = b * cplx(0.0, 1.0) / s;
    let theta = nxy.norm().atan2(nz);
    let (c, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Complex64::from_polar(1.0, nxy.arg());
    let v = Mat2::new(cplx(c, 0.0), -e.conj() * sn, e * sn, cplx(c, 0.0));
    (v, 2.0 * h)
}

fn controlled_rz(cs: &[usize], target: usize, phi: f64, out: &mut Vec<Gate>) {
    let rz = |t: f64| Gate::single(target, Body::Rz(t));
    if cs.len() == 1 {
        out.push(rz(phi / 2.0));
        out.push(Gate::cx(cs[0], target));
        out.push(rz(-phi / 2.0));
        out.push(Gate::cx(cs[0], target));
        return;
    }
    let (c1, _) = split(cs.len());
    let (g1, g2) = cs.split_at(c1);
    let m1 = relative_mcx(g1, target, g2);
    let m2 = relative_mcx(g2, target, g1);
    let a = phi / 4.0;
    out.extend(m2.iter().cloned());
    out.push(rz(-a));
    out.extend(m1.iter().cloned());
    out.push(rz(a));
    out.extend(adjoint(&m2));
    out.push(rz(-a));
    out.extend(adjoint(&m1));
    out.push(rz(a));
}

fn adjoint(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// Multi-controlled X on `target`, correct up to a diagonal phase that does
/// not depend on `target`. `dirty` qubits are borrowed and restored.
fn relative_mcx(cs: &[usize], target: usize, dirty: &[usize]) -> Vec<Gate> {
    match cs.len() {
        0 => vec![Gate::x(target)],
        1 => vec![Gate::cx(cs[0], target)],
        2 => toffoli_up_to_control_phase(cs[0], cs[1], target),
        c => {
            assert!(dirty.len() >= c - 2, "not enough borrowed qubits");
            let anc = &dirty[..c - 2];
            let top = toffoli_up_to_control_phase(cs[c - 1], anc[c - 3], target);
            let mut ladder = Vec::new();
            for i in (3..c).rev() {
                // controls x_i and a_{i-2}, target a_{i-1} (1-based names)
                ladder.extend(margolus(cs[i - 1], anc[i - 3], anc[i - 2]));
            }
            ladder.extend(margolus(cs[0], cs[1], anc[0]));
            for i in 3..c {
                ladder.extend(margolus(cs[i - 1], anc[i - 3], anc[i - 2]));
            }
            let mut out = top.clone();
            out.extend(ladder.iter().cloned());
            out.extend(top);
            out.extend(adjoint(&ladder));
            out
        }
    }
}

fn tgate(q: usize, dagger: bool) -> Gate {
    Gate::single(q, Body::P(if dagger { -FRAC_PI_4 } else { FRAC_PI_4 }))
}

/// Toffoli times a diagonal on the two controls (4 CX).
fn toffoli_up_to_control_phase(c1: usize, c2: usize, t: usize) -> Vec<Gate> {
    vec![
        Gate::single(t, Body::hadamard()),
        Gate::cx(c2, t),
        tgate(t, true),
        Gate::cx(c1, t),
        tgate(t, false),
        Gate::cx(c2, t),
        tgate(t, true),
        Gate::cx(c1, t),
        tgate(t, false),
        Gate::single(t, Body::hadamard()),
    ]
}

/// Toffoli up to a diagonal (3 CX).
fn margolus(c1: usize, c2: usize, t: usize) -> Vec<Gate> {
    let ry = |a: f64| Gate::single(t, Body::Ry(a));
    vec![
        ry(FRAC_PI_4),
        Gate::cx(c2, t),
        ry(FRAC_PI_4),
        Gate::cx(c1, t),
        ry(-FRAC_PI_4),
        Gate::cx(c2, t),
        ry(-FRAC_PI_4),
    ]
}

fn u2_all_ones(cs: &[usize], target: usize, u: &Mat2, out: &mut Vec<Gate>) {
    if cs.is_empty() {
        out.push(single(target, *u));
        return;
    }
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let gamma = det.arg() / 2.0;
    let w = u * Complex64::from_polar(1.0, -gamma);
    su2_all_ones(cs, target, &w, out);
    // e^{iγ} on the all-ones subspace of the controls
    let (last, rest) = cs.split_last().expect("nonempty");
    let p = Mat2::new(
        cplx(1.0, 0.0),
        cplx(0.0, 0.0),
        cplx(0.0, 0.0),
        Complex64::from_polar(1.0, gamma),
    );
    u2_all_ones(rest, *last, &p, out);
}

/// Euler angles `(α, β, γ, δ)` with `u = e^{iα} Rz(β) Rx(γ) Rz(δ)`.
pub fn euler_zxz(u: &Mat2) -> (f64, f64, f64, f64) {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let alpha = det.arg() / 2.0;
    let w = u * Complex64::from_polar(1.0, -alpha);
    let a = w[(0, 0)];
    let ib = w[(1, 0)] * cplx(0.0, 1.0);
    let gamma = 2.0 * ib.norm().atan2(a.norm());
    let (beta, delta) = if ib.norm() < TINY {
        (-2.0 * a.arg(), 0.0)
    } else if a.norm() < TINY {
        (2.0 * ib.arg(), 0.0)
    } else {
        (-a.arg() + ib.arg(), -a.arg() - ib.arg())
    };
    (alpha, beta, gamma, delta)
}

/// Maps a walk time into `(-π, π]`; self-loop phases are `2π`-periodic.
fn wrap(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Splits the two-level unitary `u` acting on `span{|j⟩, |k⟩}` (with `|j⟩`
/// as the first basis vector) into self-loop and single-edge walks, in
/// application order.
pub fn two_level_to_walks(u: &Mat2, j: &BasisState, k: &BasisState) -> Result<Vec<WalkStep>> {
    if hamming_distance(j, k)? == 0 {
        return Err(Error::InvalidWalk(format!("two-level unitary on {j} alone")));
    }
    if !u.iter().all(|z| z.re.is_finite() && z.im.is_finite()) || !is_unitary(u, 1e-10) {
        return Err(Error::NotUnitary("two-level block".into()));
    }
    let (alpha, beta, gamma, delta) = euler_zxz(u);
    let mut walks = Vec::new();
    let loops = |tj: f64, tk: f64, walks: &mut Vec<WalkStep>| {
        for (z, t) in [(*j, wrap(tj)), (*k, wrap(tk))] {
            if t.abs() > TINY {
                walks.push(WalkStep::self_loop(z, t));
            }
        }
    };
    if gamma.abs() > TINY {
        loops(delta / 2.0, -delta / 2.0, &mut walks);
        walks.push(WalkStep::edge(*j, *k, gamma / 2.0)?);
        loops(beta / 2.0 - alpha, -beta / 2.0 - alpha, &mut walks);
    } else {
        // Without the edge every factor is diagonal and they all merge.
        loops((beta + delta) / 2.0 - alpha, -(beta + delta) / 2.0 - alpha, &mut walks);
    }
    Ok(walks)
}
