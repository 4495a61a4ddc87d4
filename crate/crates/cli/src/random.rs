//! Seeded random sparse states.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use walkprep::{BasisState, SparseState, MAX_QUBITS};

use crate::CliError;

/// `m` distinct uniformly chosen basis states on `n` qubits with independent
/// standard complex Gaussian amplitudes, normalized.
pub fn random_sparse_state(n: usize, m: usize, seed: u64) -> Result<SparseState, CliError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(CliError::Range(format!("n = {n} outside 1..={MAX_QUBITS}")));
    }
    let dim = 1usize << n;
    if m == 0 || m > dim {
        return Err(CliError::Range(format!("m = {m} outside 1..={dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, dim, m).into_vec();
    idx.sort_unstable();
    let mut entries = Vec::with_capacity(m);
    for i in idx {
        // Rejection of near-zero draws keeps the amplitude floor satisfied.
        let amp = loop {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let c = Complex64::new(re, im);
            if c.norm() > 1e-6 {
                break c;
            }
        };
        entries.push((BasisState::new(n, i as u32)?, amp));
    }
    Ok(SparseState::normalized(n, entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_normalized() {
        let a = random_sparse_state(5, 5, 42).unwrap();
        assert_eq!(a, random_sparse_state(5, 5, 42).unwrap());
        assert_eq!(a.m(), 5);
        let norm: f64 = a.entries().iter().map(|(_, c)| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert_ne!(a, random_sparse_state(5, 5, 43).unwrap());
    }

    #[test]
    fn range_checks() {
        assert!(random_sparse_state(3, 9, 0).is_err());
        assert!(random_sparse_state(3, 0, 0).is_err());
        assert_eq!(random_sparse_state(3, 8, 0).unwrap().m(), 8);
    }
}
