//! Sparse target states and their JSON document format.
//!
//! ```json
//! { "n": 2, "amplitudes": { "00": [0.7071067811865476, 0.0], "11": [0.7071067811865476, 0.0] } }
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisState, MAX_QUBITS};
use crate::error::{Error, Result};

/// Amplitudes with modulus at or below this are rejected.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;
/// Allowed deviation of the squared norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// A normalized state with `m` nonzero amplitudes on `n` qubits.
///
/// Entries are kept sorted by basis value.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    n: usize,
    entries: Vec<(BasisState, Complex64)>,
}

impl SparseState {
    pub fn new(n: usize, amplitudes: impl IntoIterator<Item = (BasisState, Complex64)>) -> Result<Self> {
        let state = Self::collect(n, amplitudes)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("squared norm {norm} differs from 1")));
        }
        Ok(state)
    }

    /// Builds a state from unnormalized amplitudes, rescaling to unit norm.
    pub fn normalized(n: usize, amplitudes: impl IntoIterator<Item = (BasisState, Complex64)>) -> Result<Self> {
        let mut state = Self::collect(n, amplitudes)?;
        let scale = state.norm_sqr().sqrt().recip();
        for (_, c) in &mut state.entries {
            *c *= scale;
        }
        state.check_floor()?;
        Ok(state)
    }

    /// The single basis state `|z⟩`.
    pub fn basis(z: BasisState) -> Self {
        Self {
            n: z.n(),
            entries: vec![(z, Complex64::new(1.0, 0.0))],
        }
    }

    fn collect(n: usize, amplitudes: impl IntoIterator<Item = (BasisState, Complex64)>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let mut map = BTreeMap::new();
        for (z, c) in amplitudes {
            if z.n() != n {
                return Err(Error::Dimension(format!("basis state {z} on {n} qubits")));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidState(format!("non-finite amplitude at {z}")));
            }
            if map.insert(z, c).is_some() {
                return Err(Error::InvalidState(format!("duplicate basis state {z}")));
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidState("no amplitudes".into()));
        }
        let state = Self {
            n,
            entries: map.into_iter().collect(),
        };
        state.check_floor()?;
        Ok(state)
    }

    fn check_floor(&self) -> Result<()> {
        match self.entries.iter().find(|(_, c)| c.norm() <= AMPLITUDE_FLOOR) {
            Some((z, c)) => Err(Error::InvalidState(format!(
                "amplitude {c} at {z} is below {AMPLITUDE_FLOOR}"
            ))),
            None => Ok(()),
        }
    }

    fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nonzero amplitudes.
    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn is_dense(&self) -> bool {
        self.m() == 1usize << self.n
    }

    pub fn entries(&self) -> &[(BasisState, Complex64)] {
        &self.entries
    }

    /// Basis states in increasing integer order.
    pub fn support(&self) -> impl ExactSizeIterator<Item = BasisState> + '_ {
        self.entries.iter().map(|(z, _)| *z)
    }

    pub fn amplitude(&self, z: &BasisState) -> Complex64 {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(z))
            .map(|i| self.entries[i].1)
            .unwrap_or_default()
    }

    pub fn contains(&self, z: &BasisState) -> bool {
        self.entries.binary_search_by(|(k, _)| k.cmp(z)).is_ok()
    }

    /// The state restricted to `keep`, renormalized.
    pub fn restrict(&self, keep: &[BasisState]) -> Result<Self> {
        let picked = keep
            .iter()
            .map(|z| {
                if self.contains(z) {
                    Ok((*z, self.amplitude(z)))
                } else {
                    Err(Error::Coverage(format!("{z} is not in the support")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::normalized(self.n, picked)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StateDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut amps = Vec::with_capacity(doc.amplitudes.len());
        for (key, [re, im]) in doc.amplitudes {
            if key.len() != doc.n {
                return Err(Error::Parse(format!(
                    "key {key:?} has length {} but n = {}",
                    key.len(),
                    doc.n
                )));
            }
            amps.push((key.parse()?, Complex64::new(re, im)));
        }
        Self::new(doc.n, amps)
    }

    pub fn to_json(&self) -> String {
        let doc = StateDocument {
            n: self.n,
            amplitudes: self
                .entries
                .iter()
                .map(|(z, c)| (z.to_string(), [c.re, c.im]))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("state document serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDocument {
    n: usize,
    amplitudes: BTreeMap<String, [f64; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BasisState {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_tiny_amplitudes_instead_of_dropping() {
        let r = SparseState::new(
            2,
            [
                (b("00"), Complex64::new(1.0, 0.0)),
                (b("11"), Complex64::new(1e-13, 0.0)),
            ],
        );
        assert!(matches!(r, Err(Error::InvalidState(_))));
    }

    #[test]
    fn rejects_duplicates_and_bad_norm() {
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        assert!(SparseState::new(2, [(b("00"), h), (b("00"), h)]).is_err());
        assert!(SparseState::new(2, [(b("00"), h)]).is_err());
        assert!(SparseState::new(2, [(b("00"), h), (b("01"), h)]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let s = SparseState::normalized(
            3,
            [
                (b("001"), Complex64::new(0.3, -0.1)),
                (b("110"), Complex64::new(-0.2, 0.7)),
            ],
        )
        .unwrap();
        let back = SparseState::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_key_length_must_match_n() {
        let text = r#"{"n": 3, "amplitudes": {"01": [1.0, 0.0]}}"#;
        assert!(matches!(SparseState::from_json(text), Err(Error::Parse(_))));
    }

    #[test]
    fn restrict_renormalizes() {
        let s = SparseState::normalized(
            2,
            [
                (b("00"), Complex64::new(1.0, 0.0)),
                (b("01"), Complex64::new(1.0, 0.0)),
                (b("11"), Complex64::new(0.0, 2.0)),
            ],
        )
        .unwrap();
        let r = s.restrict(&[b("11"), b("00")]).unwrap();
        assert_eq!(r.m(), 2);
        assert!((r.amplitude(&b("11")).im - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!(s.restrict(&[b("10")]).is_err());
    }
}
