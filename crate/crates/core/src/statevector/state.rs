use rayon::prelude::*;

use super::kernels::{chunked_sum, for_each_block, for_each_pair, pairs_in_span, parity, CACHE_BLOCK_BITS, PAR_MIN_LEN};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::problem::{GroundStateReport, IsingHamiltonian};

/// Largest register the statevector accepts (8 GiB of amplitudes).
pub const STATEVECTOR_CAP: usize = 30;

/// Two-qubit rotation generators realizable with real amplitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TwoQubitAxis {
    /// `Z_c Y_t`
    ZY,
    /// `X_c Y_t`
    XY,
}

impl TwoQubitAxis {
    pub fn control_letter(self) -> Letter {
        match self {
            TwoQubitAxis::ZY => Letter::Z,
            TwoQubitAxis::XY => Letter::X,
        }
    }
}

/// Real-amplitude pure state. Qubit `r` is bit `r` of the basis index and
/// bit value 0 is the `Z = +1` eigenstate.
#[derive(Clone, Debug, PartialEq)]
pub struct RealStatevector {
    num_qubits: usize,
    amps: Vec<f64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInstance("statevector needs at least one qubit".into()));
    }
    if n > STATEVECTOR_CAP {
        return Err(Error::CapExceeded { what: "statevector", n, cap: STATEVECTOR_CAP });
    }
    Ok(())
}

/// `|+>^N`.
pub fn init_plus_state(num_qubits: usize) -> Result<RealStatevector> {
    RealStatevector::plus(num_qubits)
}

impl RealStatevector {
    pub fn plus(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let len = 1usize << num_qubits;
        let a = (len as f64).sqrt().recip();
        Ok(Self { num_qubits, amps: vec![a; len] })
    }

    pub fn basis(num_qubits: usize, index: u64) -> Result<Self> {
        check_qubits(num_qubits)?;
        let len = 1usize << num_qubits;
        if index as usize >= len {
            return Err(Error::DimensionMismatch { expected: len, actual: index as usize });
        }
        let mut amps = vec![0.0; len];
        amps[index as usize] = 1.0;
        Ok(Self { num_qubits, amps })
    }

    /// Wrap raw amplitudes. The length must be a power of two; normalization is not enforced.
    pub fn from_amplitudes(amps: Vec<f64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: len.next_power_of_two().max(2), actual: len });
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubits(num_qubits)?;
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [f64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<f64> {
        self.amps
    }

    /// Reset to `|+>^N` without reallocating.
    pub fn reset_plus(&mut self) {
        let a = (self.amps.len() as f64).sqrt().recip();
        if self.amps.len() < PAR_MIN_LEN {
            self.amps.fill(a);
        } else {
            self.amps.par_iter_mut().for_each(|v| *v = a);
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        chunked_sum(&self.amps, |_, c| c.iter().map(|v| v * v).sum())
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let inv = n.recip();
            self.amps.iter_mut().for_each(|v| *v *= inv);
        }
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_size(other.num_qubits)?;
        let o = &other.amps;
        Ok(chunked_sum(&self.amps, |base, c| c.iter().zip(&o[base..base + c.len()]).map(|(a, b)| a * b).sum()))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.powi(2))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|v| v * v).collect()
    }

    fn same_size(&self, n: usize) -> Result<()> {
        if n != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, actual: n });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    /// `R_Y(theta) = exp(-i theta/2 Y)` on qubit `q`.
    pub fn apply_ry(&mut self, q: usize, theta: f64) -> Result<()> {
        self.check_qubit(q)?;
        let (s, c) = (0.5 * theta).sin_cos();
        for_each_pair(&mut self.amps, q, move |_, a, b| {
            let (x, y) = (*a, *b);
            *a = c * x - s * y;
            *b = s * x + c * y;
        });
        Ok(())
    }

    /// `exp(-i theta/2 P_c Y_t)` with `P` given by `axis`.
    pub fn apply_two_pauli_rotation(&mut self, axis: TwoQubitAxis, control: usize, target: usize, theta: f64) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::QubitCollision(control));
        }
        match axis {
            TwoQubitAxis::ZY => {
                let (s, c) = (0.5 * theta).sin_cos();
                for_each_pair(&mut self.amps, target, move |i, a, b| {
                    let s = if i >> control & 1 == 0 { s } else { -s };
                    let (x, y) = (*a, *b);
                    *a = c * x - s * y;
                    *b = s * x + c * y;
                });
                Ok(())
            }
            TwoQubitAxis::XY => {
                let p = PauliString::pair(self.num_qubits, control, Letter::X, target, Letter::Y);
                self.apply_pauli_rotation(&p, theta)
            }
        }
    }

    /// `exp(-i theta/2 P)` for any Pauli string with an odd number of Y letters.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        self.same_size(p.num_qubits())?;
        if !p.has_odd_y() {
            return Err(Error::InvalidAnsatz(format!("{p} has an even number of Y letters and does not preserve real amplitudes")));
        }
        let x = p.x_mask();
        let z = p.z_mask();
        // -i P psi (b) = kappa (-1)^{|(b^x)&z|} psi(b^x), kappa = (-1)^{(y-1)/2}.
        let kappa = if ((p.y_count() - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let (s, c) = (0.5 * theta).sin_cos();
        let ks = kappa * s;
        let hi_bit = 63 - x.leading_zeros() as usize;
        let half = 1usize << hi_bit;
        let xr = (x as usize) & (half - 1);
        let kernel = move |base: usize, blk: &mut [f64]| {
            let (lo, hi) = blk.split_at_mut(half);
            for o in 0..half {
                let b = (base + o) as u64;
                let o2 = o ^ xr;
                // Visit each pair once: lower half index o pairs with upper index o2.
                let (pa, pb) = (lo[o], hi[o2]);
                let sb = if parity(b & z) { -1.0 } else { 1.0 };
                let sb2 = if parity((b ^ x) & z) { -1.0 } else { 1.0 };
                lo[o] = c * pa + ks * sb2 * pb;
                hi[o2] = c * pb + ks * sb * pa;
            }
        };
        for_each_block(&mut self.amps, hi_bit + 1, kernel);
        Ok(())
    }

    /// `R_Y(angles[q])` on every qubit, ascending. Low qubits are processed
    /// inside cache-sized blocks; the result is identical to sequential gates.
    pub fn apply_ry_layer(&mut self, angles: &[f64]) -> Result<()> {
        self.same_size(angles.len())?;
        let cs: Vec<(f64, f64)> = angles.iter().map(|t| (0.5 * t).sin_cos()).collect();
        let low = self.num_qubits.min(CACHE_BLOCK_BITS);
        let low_gates: Vec<(usize, f64, f64)> =
            (0..low).filter(|&q| angles[q] != 0.0).map(|q| (q, cs[q].0, cs[q].1)).collect();
        if !low_gates.is_empty() {
            for_each_block(&mut self.amps, low, |base, blk| {
                for &(q, s, c) in &low_gates {
                    pairs_in_span(blk, base, 1 << q, &|_, a: &mut f64, b: &mut f64| {
                        let (x, y) = (*a, *b);
                        *a = c * x - s * y;
                        *b = s * x + c * y;
                    });
                }
            });
        }
        for q in low..self.num_qubits {
            if angles[q] != 0.0 {
                self.apply_ry(q, angles[q])?;
            }
        }
        Ok(())
    }

    /// `exp(-i theta_t/2 Z_control Y_t)` for each `(t, theta_t)`, ascending in `t`.
    /// The gates commute; low targets are fused inside cache-sized blocks.
    pub fn apply_zy_fan(&mut self, control: usize, targets: &[(usize, f64)]) -> Result<()> {
        self.check_qubit(control)?;
        let mut sorted = targets.to_vec();
        for &(t, _) in &sorted {
            self.check_qubit(t)?;
            if t == control {
                return Err(Error::QubitCollision(t));
            }
        }
        sorted.sort_by_key(|&(t, _)| t);
        let low = self.num_qubits.min(CACHE_BLOCK_BITS);
        let low_gates: Vec<(usize, f64, f64)> = sorted
            .iter()
            .filter(|&&(t, th)| t < low && th != 0.0)
            .map(|&(t, th)| {
                let (s, c) = (0.5 * th).sin_cos();
                (t, s, c)
            })
            .collect();
        if !low_gates.is_empty() {
            for_each_block(&mut self.amps, low, |base, blk| {
                for &(t, s0, c) in &low_gates {
                    pairs_in_span(blk, base, 1 << t, &|i, a: &mut f64, b: &mut f64| {
                        let s = if i >> control & 1 == 0 { s0 } else { -s0 };
                        let (x, y) = (*a, *b);
                        *a = c * x - s * y;
                        *b = s * x + c * y;
                    });
                }
            });
        }
        for &(t, th) in sorted.iter().filter(|&&(t, th)| t >= low && th != 0.0) {
            self.apply_two_pauli_rotation(TwoQubitAxis::ZY, control, t, th)?;
        }
        Ok(())
    }

    /// `<psi|P|psi>`. Odd-Y strings return exactly 0.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<f64> {
        self.same_size(p.num_qubits())?;
        if p.has_odd_y() {
            return Ok(0.0);
        }
        let x = p.x_mask();
        let z = p.z_mask();
        // P psi(b) = i^y (-1)^{|(b^x)&z|} psi(b^x); y even so i^y = +-1.
        let sign = if (p.y_count() / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let amps = &self.amps;
        let total = if x == 0 {
            chunked_sum(amps, |base, c| {
                c.iter()
                    .enumerate()
                    .map(|(o, v)| {
                        let s = if parity((base + o) as u64 & z) { -1.0 } else { 1.0 };
                        s * v * v
                    })
                    .sum()
            })
        } else {
            chunked_sum(amps, |base, c| {
                c.iter()
                    .enumerate()
                    .map(|(o, v)| {
                        let b2 = (base + o) as u64 ^ x;
                        let s = if parity(b2 & z) { -1.0 } else { 1.0 };
                        s * v * amps[b2 as usize]
                    })
                    .sum()
            })
        };
        Ok(sign * total)
    }

    /// `<psi|H|psi>` for a diagonal Hamiltonian, streamed block by block.
    pub fn expectation_diagonal(&self, h: &IsingHamiltonian) -> Result<f64> {
        self.same_size(h.num_qubits())?;
        let ev = h.evaluator();
        let bl = ev.block_len();
        let partial = |(high, c): (usize, &[f64])| {
            let mut e = vec![0.0; bl];
            ev.fill_block(high, &mut e);
            c.iter().zip(&e).map(|(v, e)| v * v * e).sum::<f64>()
        };
        let partials: Vec<f64> = if self.amps.len() < PAR_MIN_LEN {
            self.amps.chunks(bl).enumerate().map(partial).collect()
        } else {
            self.amps.par_chunks(bl).enumerate().map(partial).collect()
        };
        Ok(partials.iter().sum())
    }

    /// `sum_x psi(x)^2 d(x)` against a precomputed diagonal.
    pub fn expectation_with_diagonal(&self, diag: &[f64]) -> Result<f64> {
        if diag.len() != self.amps.len() {
            return Err(Error::DimensionMismatch { expected: self.amps.len(), actual: diag.len() });
        }
        Ok(chunked_sum(&self.amps, |base, c| c.iter().zip(&diag[base..base + c.len()]).map(|(v, d)| v * v * d).sum()))
    }

    /// Probability mass on the ground-state set.
    pub fn success_probability(&self, gs: &GroundStateReport) -> Result<f64> {
        let mut p = 0.0;
        for &x in &gs.ground_states {
            let a = *self
                .amps
                .get(x as usize)
                .ok_or(Error::DimensionMismatch { expected: self.amps.len(), actual: x as usize })?;
            p += a * a;
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn plus_state_examples() {
        let s = init_plus_state(1).unwrap();
        assert!(close(s.amplitudes(), &[0.5f64.sqrt(); 2], 1e-15));
        let s = init_plus_state(2).unwrap();
        assert!(close(s.amplitudes(), &[0.5; 4], 1e-15));
        let s = init_plus_state(20).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(matches!(init_plus_state(31), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn ry_examples() {
        let mut s = RealStatevector::basis(1, 0).unwrap();
        s.apply_ry(0, 0.0).unwrap();
        assert_eq!(s.amplitudes(), &[1.0, 0.0]);
        s.apply_ry(0, std::f64::consts::PI).unwrap();
        assert!(close(s.amplitudes(), &[0.0, 1.0], 1e-15));
        assert!(matches!(s.apply_ry(1, 0.1), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn zy_control_selects_sign() {
        for (ctrl_bit, sign) in [(0u64, 1.0), (1, -1.0)] {
            let mut a = RealStatevector::basis(2, ctrl_bit).unwrap();
            a.apply_ry(1, 0.3).unwrap();
            let mut b = a.clone();
            let mut c = a.clone();
            b.apply_two_pauli_rotation(TwoQubitAxis::ZY, 0, 1, 0.7).unwrap();
            c.apply_ry(1, sign * 0.7).unwrap();
            assert!(close(b.amplitudes(), c.amplitudes(), 1e-14));
        }
        let mut s = init_plus_state(2).unwrap();
        assert!(matches!(s.apply_two_pauli_rotation(TwoQubitAxis::ZY, 1, 1, 0.1), Err(Error::QubitCollision(1))));
    }

    #[test]
    fn pauli_expectations_on_plus() {
        let s = init_plus_state(3).unwrap();
        assert!((s.expectation_pauli(&"XXX".parse().unwrap()).unwrap() - 1.0).abs() < 1e-15);
        assert!((s.expectation_pauli(&"XIX".parse().unwrap()).unwrap() - 1.0).abs() < 1e-15);
        for p in ["ZII", "XZI", "YYI", "YXY", "IIY"] {
            assert!(s.expectation_pauli(&p.parse().unwrap()).unwrap().abs() < 1e-15, "{p}");
        }
    }

    #[test]
    fn diagonal_expectation_examples() {
        let h = IsingHamiltonian::new(2, vec![0.0, 0.0], [((0, 1), 0.5)].into_iter().collect(), 0.0).unwrap();
        let s = RealStatevector::basis(2, 0b10).unwrap();
        assert!((s.expectation_diagonal(&h).unwrap() + 0.5).abs() < 1e-15);
        let plus = init_plus_state(2).unwrap();
        let h2 = IsingHamiltonian::new(2, vec![0.3, -0.2], [((0, 1), 0.5)].into_iter().collect(), 1.25).unwrap();
        assert!((plus.expectation_diagonal(&h2).unwrap() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn success_probability_examples() {
        let gs = GroundStateReport { min_energy: -0.5, max_energy: 0.5, ground_states: vec![0b01, 0b10] };
        let s = RealStatevector::from_amplitudes(vec![0.0, 0.5f64.sqrt(), 0.5f64.sqrt(), 0.0]).unwrap();
        assert!((s.success_probability(&gs).unwrap() - 1.0).abs() < 1e-15);
        let single = GroundStateReport { ground_states: vec![3], ..gs.clone() };
        assert!((init_plus_state(2).unwrap().success_probability(&single).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(RealStatevector::basis(2, 3).unwrap().success_probability(&single).unwrap(), 1.0);
    }

    #[test]
    fn pauli_rotation_rejects_even_y() {
        let mut s = init_plus_state(2).unwrap();
        assert!(s.apply_pauli_rotation(&"YY".parse().unwrap(), 0.1).is_err());
    }
}
