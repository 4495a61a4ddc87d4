//! Gate-level circuit representation.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for unitarity and determinant checks on gate bodies.
pub const GATE_TOLERANCE: f64 = 1e-12;

pub type Mat2 = Matrix2<Complex64>;

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The single-qubit operation a controlled gate applies to its target.
#[derive(Clone, Copy, PartialEq)]
pub enum Body {
    Rx(f64),
    Ry(f64),
    Rz(f64),
    /// Phase gate `diag(1, e^{iθ})`.
    P(f64),
    /// `[[alpha, -conj(beta)], [beta, conj(alpha)]]` with `|alpha|² + |beta|² = 1`.
    Su2 {
        alpha: Complex64,
        beta: Complex64,
    },
    U2(Mat2),
}

impl Body {
    pub fn hadamard() -> Self {
        let h = c(FRAC_1_SQRT_2, 0.0);
        Body::U2(Mat2::new(h, h, h, -h))
    }

    pub fn matrix(&self) -> Mat2 {
        match *self {
            Body::Rx(theta) => {
                let (s, co) = (theta / 2.0).sin_cos();
                Mat2::new(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
            }
            Body::Ry(theta) => {
                let (s, co) = (theta / 2.0).sin_cos();
                Mat2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
            }
            Body::Rz(theta) => Mat2::new(
                Complex64::from_polar(1.0, -theta / 2.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                Complex64::from_polar(1.0, theta / 2.0),
            ),
            Body::P(theta) => Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, theta)),
            Body::Su2 { alpha, beta } => Mat2::new(alpha, -beta.conj(), beta, alpha.conj()),
            Body::U2(m) => m,
        }
    }

    /// Whether the body has determinant 1 (by construction for rotations and
    /// `Su2`, numerically for `U2`).
    pub fn is_special(&self) -> bool {
        match self {
            Body::Rx(_) | Body::Ry(_) | Body::Rz(_) | Body::Su2 { .. } => true,
            Body::P(theta) => (Complex64::from_polar(1.0, *theta) - c(1.0, 0.0)).norm() <= GATE_TOLERANCE,
            Body::U2(m) => (m.determinant() - c(1.0, 0.0)).norm() <= GATE_TOLERANCE,
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            Body::Rx(t) => Body::Rx(-t),
            Body::Ry(t) => Body::Ry(-t),
            Body::Rz(t) => Body::Rz(-t),
            Body::P(t) => Body::P(-t),
            Body::Su2 { alpha, beta } => Body::Su2 {
                alpha: alpha.conj(),
                beta: -beta,
            },
            Body::U2(m) => Body::U2(m.adjoint()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.matrix();
        if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidGate("non-finite gate body".into()));
        }
        if !is_unitary(&m, GATE_TOLERANCE) {
            return Err(Error::NotUnitary(format!("{self:?}")));
        }
        if let Body::Su2 { alpha, beta } = self {
            let det = alpha.norm_sqr() + beta.norm_sqr();
            if (det - 1.0).abs() > GATE_TOLERANCE {
                return Err(Error::InvalidGate(format!("SU(2) body with determinant {det}")));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::Rx(t) => write!(f, "Rx({t})"),
            Body::Ry(t) => write!(f, "Ry({t})"),
            Body::Rz(t) => write!(f, "Rz({t})"),
            Body::P(t) => write!(f, "P({t})"),
            Body::Su2 { alpha, beta } => write!(f, "SU2({alpha}, {beta})"),
            Body::U2(m) => write!(f, "U2[[{}, {}], [{}, {}]]", m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]),
        }
    }
}

pub(crate) fn is_unitary(m: &Mat2, tol: f64) -> bool {
    let prod = m.adjoint() * m;
    (prod - Mat2::identity()).iter().all(|z| z.norm() <= tol)
}

/// A control qubit and the value it must hold for the gate to act.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Control {
    pub qubit: usize,
    pub polarity: bool,
}

impl Control {
    pub fn new(qubit: usize, polarity: bool) -> Self {
        Self { qubit, polarity }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    X {
        qubit: usize,
    },
    Cx {
        control: usize,
        target: usize,
    },
    /// `body` applied to `target` when every control holds its polarity.
    /// With no controls this is a plain single-qubit gate.
    Controlled {
        controls: Vec<Control>,
        target: usize,
        body: Body,
    },
}

impl Gate {
    pub fn x(qubit: usize) -> Self {
        Gate::X { qubit }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::Cx { control, target }
    }

    pub fn single(target: usize, body: Body) -> Self {
        Gate::Controlled {
            controls: Vec::new(),
            target,
            body,
        }
    }

    /// Builds a controlled gate, checking qubit distinctness and the body.
    pub fn controlled(controls: Vec<Control>, target: usize, body: Body) -> Result<Self> {
        let gate = Gate::Controlled { controls, target, body };
        gate.validate()?;
        Ok(gate)
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X { qubit } => vec![*qubit],
            Gate::Cx { control, target } => vec![*control, *target],
            Gate::Controlled { controls, target, .. } => controls
                .iter()
                .map(|c| c.qubit)
                .chain(std::iter::once(*target))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let qubits = self.qubits();
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Error::InvalidGate(format!("qubit {q} used twice in {self:?}")));
            }
        }
        if let Gate::Controlled { body, .. } = self {
            body.validate()?;
        }
        Ok(())
    }

    pub fn inverse(&self) -> Self {
        match self {
            Gate::Controlled { controls, target, body } => Gate::Controlled {
                controls: controls.clone(),
                target: *target,
                body: body.inverse(),
            },
            g => g.clone(),
        }
    }

    /// True for X, CX and uncontrolled single-qubit gates.
    pub fn is_lowered(&self) -> bool {
        match self {
            Gate::Controlled { controls, .. } => controls.is_empty(),
            _ => true,
        }
    }
}

/// An ordered gate sequence on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut circuit = Self::new(n);
        for g in gates {
            circuit.push(g)?;
        }
        Ok(circuit)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate()?;
        if let Some(q) = gate.qubits().into_iter().find(|&q| q >= self.n) {
            return Err(Error::InvalidGate(format!(
                "qubit {q} out of range for {} qubits",
                self.n
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::Dimension(format!(
                "appending a {}-qubit circuit to a {}-qubit circuit",
                other.n, self.n
            )));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn inverse(&self) -> Self {
        Self {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn is_lowered(&self) -> bool {
        self.gates.iter().all(Gate::is_lowered)
    }

    /// Number of CX gates; the circuit must be lowered.
    pub fn cx_count(&self) -> Result<usize> {
        let mut count = 0;
        for (i, g) in self.gates.iter().enumerate() {
            match g {
                Gate::Cx { .. } => count += 1,
                g if !g.is_lowered() => {
                    return Err(Error::NotLowered(format!("gate {i}: {g:?}")));
                }
                _ => {}
            }
        }
        Ok(count)
    }
}
