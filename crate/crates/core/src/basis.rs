//! Computational basis states and qubit sets.
//!
//! A basis state is written as a bitstring whose leftmost character is qubit 0.
//! Internally the bitstring is stored as its big-endian integer value, so qubit 0
//! is the most significant bit and the integer doubles as the dense statevector
//! index.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported register width.
pub const MAX_QUBITS: usize = 24;

/// A computational basis state on `n` qubits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    // Ordering compares `n` first, then `value`; states of one register sort
    // by integer value.
    n: u8,
    value: u32,
}

impl BasisState {
    pub fn new(n: usize, value: u32) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        if (value as u64) >> n != 0 {
            return Err(Error::Dimension(format!("value {value} does not fit in {n} qubits")));
        }
        Ok(Self { n: n as u8, value })
    }

    /// The all-zeros state.
    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Big-endian integer value (qubit 0 is the most significant bit).
    #[inline]
    pub fn value(&self) -> u32 {
        self.value
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.value as usize
    }

    /// Bit mask selecting qubit `q` inside [`value`](Self::value).
    #[inline]
    pub fn mask_of(n: usize, q: usize) -> u32 {
        1 << (n - 1 - q)
    }

    #[inline]
    pub fn bit(&self, q: usize) -> bool {
        debug_assert!(q < self.n());
        self.value & Self::mask_of(self.n(), q) != 0
    }

    pub fn with_bit(&self, q: usize, bit: bool) -> Self {
        let mask = Self::mask_of(self.n(), q);
        let value = if bit { self.value | mask } else { self.value & !mask };
        Self { n: self.n, value }
    }

    pub fn flip(&self, q: usize) -> Self {
        Self {
            n: self.n,
            value: self.value ^ Self::mask_of(self.n(), q),
        }
    }

    /// Qubits set to 1, in increasing qubit order.
    pub fn ones(&self) -> QubitSet {
        QubitSet::from_value(self.n(), self.value)
    }

    fn check_same_width(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "basis states of width {} and {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n() {
            f.write_str(if self.bit(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}⟩")
    }
}

impl FromStr for BasisState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let mut value = 0u32;
        for c in s.chars() {
            value <<= 1;
            match c {
                '0' => {}
                '1' => value |= 1,
                _ => return Err(Error::Parse(format!("invalid bitstring {s:?}"))),
            }
        }
        Self::new(n, value)
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming_distance(a: &BasisState, b: &BasisState) -> Result<usize> {
    a.check_same_width(b)?;
    Ok((a.value ^ b.value).count_ones() as usize)
}

/// Qubits where `a` and `b` differ, with `exclude` removed.
pub fn diff_bits(a: &BasisState, b: &BasisState, exclude: Option<usize>) -> Result<QubitSet> {
    a.check_same_width(b)?;
    let mut set = QubitSet::from_value(a.n(), a.value ^ b.value);
    if let Some(q) = exclude {
        set.remove(q);
    }
    Ok(set)
}

/// A set of qubit indices, stored as a bit mask (bit `q` ↔ qubit `q`).
///
/// Note the mask layout is independent of the big-endian layout used by
/// [`BasisState`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct QubitSet(u32);

impl QubitSet {
    pub const EMPTY: QubitSet = QubitSet(0);

    pub fn from_mask(mask: u32) -> Self {
        Self(mask)
    }

    /// Converts a big-endian basis value into the set of its 1 qubits.
    pub fn from_value(n: usize, value: u32) -> Self {
        let mut mask = 0;
        for q in 0..n {
            if value & BasisState::mask_of(n, q) != 0 {
                mask |= 1 << q;
            }
        }
        Self(mask)
    }

    pub fn range(n: usize) -> Self {
        Self(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(q: usize) -> Self {
        Self(1 << q)
    }

    #[inline]
    pub fn mask(&self) -> u32 {
        self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(&self, q: usize) -> bool {
        q < 32 && self.0 & (1 << q) != 0
    }

    pub fn insert(&mut self, q: usize) {
        self.0 |= 1 << q;
    }

    pub fn remove(&mut self, q: usize) {
        self.0 &= !(1 << q);
    }

    pub fn union(&self, other: &Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.0 & !other.0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member.
    pub fn first(&self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Largest member.
    pub fn last(&self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    pub fn iter(&self) -> QubitIter {
        QubitIter(self.0)
    }
}

impl fmt::Debug for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for QubitSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = QubitSet::EMPTY;
        for q in iter {
            set.insert(q);
        }
        set
    }
}

impl IntoIterator for QubitSet {
    type Item = usize;
    type IntoIter = QubitIter;

    fn into_iter(self) -> QubitIter {
        self.iter()
    }
}

/// Iterates qubits of a [`QubitSet`] in increasing order.
pub struct QubitIter(u32);

impl Iterator for QubitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let q = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(q)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let len = self.0.count_ones() as usize;
        (len, Some(len))
    }
}

impl ExactSizeIterator for QubitIter {}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BasisState {
        s.parse().unwrap()
    }

    #[test]
    fn leftmost_character_is_qubit_zero() {
        let s = b("100");
        assert!(s.bit(0));
        assert!(!s.bit(1));
        assert_eq!(s.value(), 4);
        assert_eq!(s.to_string(), "100");
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&b("001"), &b("111")).unwrap(), 2);
        assert_eq!(hamming_distance(&b("101"), &b("101")).unwrap(), 0);
        assert_eq!(hamming_distance(&b("000"), &b("111")).unwrap(), 3);
    }

    #[test]
    fn diff_bits_examples() {
        let want: QubitSet = [0, 1].into_iter().collect();
        assert_eq!(diff_bits(&b("001"), &b("111"), Some(2)).unwrap(), want);
        assert_eq!(diff_bits(&b("001"), &b("111"), None).unwrap(), want);
        assert!(diff_bits(&b("0110"), &b("0110"), Some(1)).unwrap().is_empty());
        assert!(diff_bits(&b("0110"), &b("0110"), None).unwrap().is_empty());
    }

    #[test]
    fn width_mismatch_is_rejected() {
        assert!(matches!(
            hamming_distance(&b("01"), &b("011")),
            Err(Error::Dimension(_))
        ));
        assert!(diff_bits(&b("01"), &b("011"), None).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("01a".parse::<BasisState>().is_err());
        assert!("".parse::<BasisState>().is_err());
        assert!(BasisState::new(2, 4).is_err());
        assert!(BasisState::new(25, 0).is_err());
    }

    #[test]
    fn qubit_set_iteration_is_sorted() {
        let s: QubitSet = [5, 1, 3].into_iter().collect();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 3, 5]);
        assert_eq!(s.first(), Some(1));
        assert_eq!(s.last(), Some(5));
        assert_eq!(QubitSet::from_value(3, 0b110), [0, 1].into_iter().collect());
    }
}
