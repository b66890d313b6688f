//! Sources of Pauli expectation values for the linear-system assembly.

use num_complex::Complex64;
use rayon::prelude::*;

use super::realize::LayerOrder;
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::statevector::RealStatevector;

/// Anything that can report `<P>` for even-Y Pauli strings.
pub trait ExpectationSource: Sync {
    fn num_qubits(&self) -> usize;

    fn expectation(&self, p: &PauliString) -> Result<f64>;

    fn expectations(&self, ps: &[PauliString]) -> Result<Vec<f64>> {
        ps.iter().map(|p| self.expectation(p)).collect()
    }
}

impl ExpectationSource for RealStatevector {
    fn num_qubits(&self) -> usize {
        RealStatevector::num_qubits(self)
    }

    fn expectation(&self, p: &PauliString) -> Result<f64> {
        self.expectation_pauli(p)
    }

    fn expectations(&self, ps: &[PauliString]) -> Result<Vec<f64>> {
        // Small registers: parallel over strings. Large ones: each expectation
        // is parallel internally.
        if self.len() < 1 << 16 {
            ps.par_iter().map(|p| self.expectation_pauli(p)).collect()
        } else {
            ps.iter().map(|p| self.expectation_pauli(p)).collect()
        }
    }
}

fn ry_plus(theta: f64) -> [f64; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [h * (c - s), h * (s + c)]
}

fn ry_apply(theta: f64, v: [f64; 2]) -> [f64; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// `<u|L|v>` for real single-qubit vectors.
fn element(l: Letter, u: [f64; 2], v: [f64; 2]) -> Complex64 {
    match l {
        Letter::I => Complex64::new(u[0] * v[0] + u[1] * v[1], 0.0),
        Letter::X => Complex64::new(u[0] * v[1] + u[1] * v[0], 0.0),
        Letter::Z => Complex64::new(u[0] * v[0] - u[1] * v[1], 0.0),
        Letter::Y => Complex64::new(0.0, u[1] * v[0] - u[0] * v[1]),
    }
}

/// State of the form `sum_s |p_s>_k (x) prod_{i != k} |phi^s_i>`, which is what a
/// single layer of `Y_i` rotations and pivot-controlled `P_k Y_i` rotations
/// prepares from `|+>^N`. Expectations cost `O(N)` per string.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchProductState {
    num_qubits: usize,
    pivot: usize,
    pivot_vecs: [[f64; 2]; 2],
    factors: [Vec<[f64; 2]>; 2],
}

impl BranchProductState {
    /// `|+>^N`.
    pub fn plus(num_qubits: usize) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            num_qubits,
            pivot: 0,
            pivot_vecs: [[h, h], [0.0, 0.0]],
            factors: [vec![[h, h]; num_qubits], vec![[0.0, 0.0]; num_qubits]],
        }
    }

    /// One layer with `R_Y(alpha_i)` on every qubit and `exp(-i beta_i/2 C_k Y_i)`
    /// for `i != k`, where `C` is `Z` or `X`. `beta[pivot]` is ignored.
    pub fn single_pivot_layer(
        pivot: usize,
        control: Letter,
        alpha: &[f64],
        beta: &[f64],
        order: LayerOrder,
    ) -> Result<Self> {
        let n = alpha.len();
        if beta.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: beta.len() });
        }
        if pivot >= n {
            return Err(Error::QubitOutOfRange { index: pivot, num_qubits: n });
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // Eigenvectors of the control letter for eigenvalues +1 and -1.
        let eig: [[f64; 2]; 2] = match control {
            Letter::Z => [[1.0, 0.0], [0.0, 1.0]],
            Letter::X => [[h, h], [h, -h]],
            other => return Err(Error::InvalidAnsatz(format!("unsupported control letter {other:?}"))),
        };
        let project = |s: usize, v: [f64; 2]| {
            let e = eig[s];
            let d = e[0] * v[0] + e[1] * v[1];
            [d * e[0], d * e[1]]
        };
        let plus = [h, h];
        let pivot_vecs = match order {
            LayerOrder::RyFirst => {
                let r = ry_plus(alpha[pivot]);
                [project(0, r), project(1, r)]
            }
            LayerOrder::TwoQubitFirst => [ry_apply(alpha[pivot], project(0, plus)), ry_apply(alpha[pivot], project(1, plus))],
        };
        let mut factors = [vec![[0.0; 2]; n], vec![[0.0; 2]; n]];
        for i in 0..n {
            if i == pivot {
                continue;
            }
            // R_Y(alpha) and R_Y(+-beta) commute on the target.
            factors[0][i] = ry_plus(alpha[i] + beta[i]);
            factors[1][i] = ry_plus(alpha[i] - beta[i]);
        }
        Ok(Self { num_qubits: n, pivot, pivot_vecs, factors })
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    /// Dense amplitudes.
    pub fn to_statevector(&self) -> Result<RealStatevector> {
        let n = self.num_qubits;
        let mut total = vec![0.0; 1usize << n];
        for s in 0..2 {
            let mut v = vec![1.0];
            for q in 0..n {
                let u = if q == self.pivot { self.pivot_vecs[s] } else { self.factors[s][q] };
                let mut next = Vec::with_capacity(v.len() * 2);
                next.extend(v.iter().map(|a| a * u[0]));
                next.extend(v.iter().map(|a| a * u[1]));
                v = next;
            }
            for (t, a) in total.iter_mut().zip(&v) {
                *t += a;
            }
        }
        RealStatevector::from_amplitudes(total)
    }
}

impl ExpectationSource for BranchProductState {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, actual: p.num_qubits() });
        }
        if p.has_odd_y() {
            return Ok(0.0);
        }
        let mut total = Complex64::new(0.0, 0.0);
        for s in 0..2 {
            for t in 0..2 {
                let mut acc = element(p.letter(self.pivot), self.pivot_vecs[s], self.pivot_vecs[t]);
                if acc == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for q in 0..self.num_qubits {
                    if q == self.pivot {
                        continue;
                    }
                    acc *= element(p.letter(q), self.factors[s][q], self.factors[t][q]);
                }
                total += acc;
            }
        }
        Ok(total.re)
    }
}
