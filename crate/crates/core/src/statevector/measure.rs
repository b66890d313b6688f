use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::RealStatevector;
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

/// Default shot count per measured group.
pub const DEFAULT_SHOTS: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasurementBasis {
    X,
    Y,
    Z,
}

impl MeasurementBasis {
    pub fn from_letter(l: Letter) -> Option<Self> {
        match l {
            Letter::I => None,
            Letter::X => Some(Self::X),
            Letter::Y => Some(Self::Y),
            Letter::Z => Some(Self::Z),
        }
    }
}

/// Seeded multinomial sampler.
#[derive(Clone, Debug)]
pub struct ShotSampler {
    rng: ChaCha8Rng,
    shots: u64,
}

impl ShotSampler {
    pub fn new(seed: u64, shots: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), shots }
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Draw `shots` outcomes from an (unnormalized) probability vector.
    pub fn sample_distribution(&mut self, probs: &[f64]) -> Result<BTreeMap<u64, u64>> {
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in probs {
            acc += p.max(0.0);
            cdf.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::Config("cannot sample from an all-zero distribution".into()));
        }
        let mut counts = BTreeMap::new();
        for _ in 0..self.shots {
            let u = self.rng.random::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
            *counts.entry(idx as u64).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// Computational-basis counts.
pub fn sample_counts(state: &RealStatevector, sampler: &mut ShotSampler) -> Result<BTreeMap<u64, u64>> {
    sampler.sample_distribution(&state.probabilities())
}

/// Outcome distribution after rotating each listed qubit into its measurement
/// basis (`X` via `H`, `Y` via `S^dagger H`). Unlisted qubits are read in `Z`.
pub fn rotate_for_group(state: &RealStatevector, bases: &[(usize, MeasurementBasis)]) -> Result<Vec<f64>> {
    let n = state.num_qubits();
    let mut assigned: BTreeMap<usize, MeasurementBasis> = BTreeMap::new();
    for &(q, b) in bases {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, num_qubits: n });
        }
        match assigned.get(&q) {
            Some(&prev) if prev != b => return Err(Error::ConflictingBasis(q)),
            _ => {
                assigned.insert(q, b);
            }
        }
    }
    if assigned.values().all(|&b| b == MeasurementBasis::Z) {
        return Ok(state.probabilities());
    }
    let mut psi: Vec<Complex64> = state.amplitudes().iter().map(|&a| Complex64::new(a, 0.0)).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (&q, &b) in &assigned {
        if b == MeasurementBasis::Z {
            continue;
        }
        let stride = 1usize << q;
        for blk in psi.chunks_mut(stride << 1) {
            let (lo, hi) = blk.split_at_mut(stride);
            for (a, c) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, mut y) = (*a, *c);
                if b == MeasurementBasis::Y {
                    // S^dagger
                    y *= Complex64::new(0.0, -1.0);
                }
                *a = (x + y) * h;
                *c = (x - y) * h;
            }
        }
    }
    Ok(psi.iter().map(|c| c.norm_sqr()).collect())
}

/// Estimate `<P>` from counts taken in a basis compatible with `p` (each
/// non-identity letter of `p` read in its own basis).
pub fn estimate_from_counts(counts: &BTreeMap<u64, u64>, p: &PauliString) -> f64 {
    let support = p.x_mask() | p.z_mask();
    let mut total = 0u64;
    let mut acc = 0i64;
    for (&outcome, &c) in counts {
        total += c;
        if (outcome & support).count_ones().is_multiple_of(2) {
            acc += c as i64;
        } else {
            acc -= c as i64;
        }
    }
    if total == 0 {
        0.0
    } else {
        acc as f64 / total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::init_plus_state;

    #[test]
    fn basis_state_counts_are_deterministic() {
        let s = RealStatevector::basis(3, 5).unwrap();
        let counts = sample_counts(&s, &mut ShotSampler::new(1, 100)).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&5], 100);
    }

    #[test]
    fn plus_state_frequency_and_replay() {
        let s = init_plus_state(1).unwrap();
        let shots = DEFAULT_SHOTS;
        let a = sample_counts(&s, &mut ShotSampler::new(7, shots)).unwrap();
        let b = sample_counts(&s, &mut ShotSampler::new(7, shots)).unwrap();
        assert_eq!(a, b);
        let f = *a.get(&0).unwrap_or(&0) as f64 / shots as f64;
        let sigma = (0.25 / shots as f64).sqrt();
        assert!((f - 0.5).abs() < 5.0 * sigma);
    }

    #[test]
    fn group_rotation_examples() {
        let s = init_plus_state(2).unwrap();
        assert_eq!(rotate_for_group(&s, &[(0, MeasurementBasis::Z)]).unwrap(), s.probabilities());
        let p = rotate_for_group(&s, &[(0, MeasurementBasis::X)]).unwrap();
        assert!((p[0] + p[2] - 1.0).abs() < 1e-14);
        assert!(matches!(
            rotate_for_group(&s, &[(1, MeasurementBasis::X), (1, MeasurementBasis::Z)]),
            Err(Error::ConflictingBasis(1))
        ));
    }

    #[test]
    fn zero_shots_rejected() {
        let s = init_plus_state(1).unwrap();
        assert!(sample_counts(&s, &mut ShotSampler::new(0, 0)).is_err());
    }
}
