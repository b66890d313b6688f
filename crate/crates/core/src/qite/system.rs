//! Per-step linear system `S a = b`.
//!
//! With `w_I = i sigma_I |psi>` (a real vector for odd-Y `sigma_I` and real
//! `psi`), `S_IJ = <w_I, w_J> = <sigma_I sigma_J>` and
//! `b_I = <w_I, H psi> / sqrt(c) = Im<sigma_I H> / sqrt(c)`, with
//! `c = 1 - 2 dtau <H>`. The rotation `exp(-i dtau sum_I a_I sigma_I)` then
//! moves `psi` along the projection of `-dtau H psi / sqrt(c)` onto the span
//! of the `w_I`, which is the first-order imaginary-time update.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::ansatz::OperatorBasis;
use super::expect::ExpectationSource;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::problem::IsingHamiltonian;

/// Default ridge added to `S` before solving.
pub const DEFAULT_RIDGE: f64 = 1e-8;

/// State-independent expansion of `S` and `b` into Pauli expectations.
#[derive(Clone, Debug)]
pub struct SymbolicSystem {
    basis_len: usize,
    strings: Vec<PauliString>,
    /// `(I, J, coefficient, string)` with `I <= J`.
    s_terms: Vec<(usize, usize, f64, usize)>,
    /// Constant contributions to `S` (products proportional to the identity).
    s_const: Vec<(usize, usize, f64)>,
    /// `(I, coefficient, string)`; `b` before the `1/sqrt(c)` factor.
    b_terms: Vec<(usize, f64, usize)>,
}

fn re_unit(phase: u8) -> f64 {
    match phase % 4 {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    }
}

impl SymbolicSystem {
    pub fn new(basis: &OperatorBasis, h: &IsingHamiltonian) -> Result<Self> {
        let n = basis.num_qubits();
        if h.num_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: h.num_qubits() });
        }
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        let mut strings = Vec::new();
        let mut intern = |p: PauliString| -> usize {
            *index.entry(p).or_insert_with(|| {
                strings.push(p);
                strings.len() - 1
            })
        };
        let gens = basis.generators();
        let mut s_terms = Vec::new();
        let mut s_const = Vec::new();
        for i in 0..gens.len() {
            for j in i..gens.len() {
                let prod = gens[i].mul(&gens[j]);
                let re = re_unit(prod.phase);
                if re == 0.0 || prod.pauli.has_odd_y() {
                    continue;
                }
                if prod.pauli.is_identity() {
                    s_const.push((i, j, re));
                } else {
                    s_terms.push((i, j, re, intern(prod.pauli)));
                }
            }
        }
        let terms: Vec<(PauliString, f64)> = h.terms().map(|(qs, g)| (PauliString::z_string(n, &qs), g)).collect();
        let mut b_terms = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            for (t, coef) in &terms {
                if g.commutes_with(t) {
                    continue;
                }
                // Im(i^ph <Q>) = Re(i^{ph-1}) <Q>.
                let prod = g.mul(t);
                let re = re_unit((prod.phase + 3) % 4);
                if re == 0.0 || prod.pauli.has_odd_y() {
                    continue;
                }
                if prod.pauli.is_identity() {
                    return Err(Error::Solver("unexpected identity in commutator expansion".into()));
                }
                b_terms.push((i, re * coef, intern(prod.pauli)));
            }
        }
        Ok(Self { basis_len: gens.len(), strings, s_terms, s_const, b_terms })
    }

    pub fn basis_len(&self) -> usize {
        self.basis_len
    }

    /// Distinct Pauli strings whose expectations determine `S` and `b`.
    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    /// Combine expectation values (aligned with [`Self::strings`]) into `S` and unnormalized `b`.
    pub fn combine(&self, values: &[f64]) -> Result<(DMatrix<f64>, DVector<f64>)> {
        if values.len() != self.strings.len() {
            return Err(Error::DimensionMismatch { expected: self.strings.len(), actual: values.len() });
        }
        let m = self.basis_len;
        let mut s = DMatrix::zeros(m, m);
        for &(i, j, c) in &self.s_const {
            s[(i, j)] += c;
        }
        for &(i, j, c, k) in &self.s_terms {
            s[(i, j)] += c * values[k];
        }
        for i in 0..m {
            for j in 0..i {
                s[(i, j)] = s[(j, i)];
            }
        }
        let mut b = DVector::zeros(m);
        for &(i, c, k) in &self.b_terms {
            b[i] += c * values[k];
        }
        Ok((s, b))
    }
}

/// `S`, `b` (already divided by `sqrt(c)`) and `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub s: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: f64,
}

/// How the normalization `c = 1 - 2 dtau <H>` treats the constant offset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OffsetMode {
    /// Use `<H> - offset`.
    #[default]
    Subtract,
    Include,
}

pub fn normalization(energy: f64, h: &IsingHamiltonian, dtau: f64, mode: OffsetMode) -> Result<f64> {
    let e = match mode {
        OffsetMode::Subtract => energy - h.constant_offset(),
        OffsetMode::Include => energy,
    };
    let c = 1.0 - 2.0 * dtau * e;
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::NonPositiveNormalization { c, dtau });
    }
    Ok(c)
}

/// Assemble from precomputed expectations and the energy `<H>`.
pub fn assemble_from_values(
    sym: &SymbolicSystem,
    values: &[f64],
    energy: f64,
    h: &IsingHamiltonian,
    dtau: f64,
    mode: OffsetMode,
) -> Result<LinearSystem> {
    let c = normalization(energy, h, dtau, mode)?;
    let (s, mut b) = sym.combine(values)?;
    b /= c.sqrt();
    Ok(LinearSystem { s, b, c })
}

/// Full assembly for one state.
pub fn assemble_linear_system<S: ExpectationSource + ?Sized>(
    source: &S,
    energy: f64,
    h: &IsingHamiltonian,
    basis: &OperatorBasis,
    dtau: f64,
    mode: OffsetMode,
) -> Result<LinearSystem> {
    let sym = SymbolicSystem::new(basis, h)?;
    let values = source.expectations(sym.strings())?;
    assemble_from_values(&sym, &values, energy, h, dtau, mode)
}

/// Solution and diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub coefficients: Vec<f64>,
    /// `||S a - b||`
    pub residual: f64,
    /// Numerical rank of `S`.
    pub rank: usize,
}

/// Minimum-norm solution of `(S + ridge I) a = b` by symmetric eigendecomposition.
pub fn solve_coefficients(sys: &LinearSystem, ridge: f64) -> Result<SolveReport> {
    let m = sys.s.nrows();
    if sys.s.ncols() != m || sys.b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, actual: sys.b.len() });
    }
    if !(ridge >= 0.0) {
        return Err(Error::Config(format!("ridge must be nonnegative, got {ridge}")));
    }
    if m == 0 {
        return Ok(SolveReport { coefficients: Vec::new(), residual: 0.0, rank: 0 });
    }
    if sys.s.iter().chain(sys.b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Solver("non-finite entries in the linear system".into()));
    }
    let eig = SymmetricEigen::new(sys.s.clone());
    let max_eig = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let rank_tol = max_eig.max(1.0) * 1e-10;
    let rank = eig.eigenvalues.iter().filter(|v| v.abs() > rank_tol).count();
    let cutoff = (max_eig + ridge) * 1e-14;
    let proj = eig.eigenvectors.transpose() * &sys.b;
    let mut scaled = DVector::zeros(m);
    for k in 0..m {
        let lam = eig.eigenvalues[k] + ridge;
        if lam.abs() > cutoff {
            scaled[k] = proj[k] / lam;
        }
    }
    let a = &eig.eigenvectors * scaled;
    let residual = (&sys.s * &a - &sys.b).norm();
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver(format!("solution is not finite (rank {rank})")));
    }
    Ok(SolveReport { coefficients: a.iter().copied().collect(), residual, rank })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let sys = LinearSystem { s: DMatrix::identity(3, 3), b: DVector::from_vec(vec![1.0, -2.0, 0.5]), c: 1.0 };
        let r = solve_coefficients(&sys, 1e-8).unwrap();
        for (a, b) in r.coefficients.iter().zip([1.0, -2.0, 0.5]) {
            assert!((a - b / (1.0 + 1e-8)).abs() < 1e-15);
        }
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn singular_system_in_range() {
        let v = DVector::from_vec(vec![1.0, 2.0, -1.0]);
        let u = DVector::from_vec(vec![0.0, 1.0, 2.0]);
        let s = &v * v.transpose() + &u * u.transpose();
        let b = &s * DVector::from_vec(vec![0.3, -0.1, 0.7]);
        let sys = LinearSystem { s: s.clone(), b: b.clone(), c: 1.0 };
        let r = solve_coefficients(&sys, 1e-8).unwrap();
        assert_eq!(r.rank, 2);
        assert!(r.residual <= 1e-6 * b.norm());
    }

    #[test]
    fn negative_ridge_rejected() {
        let sys = LinearSystem { s: DMatrix::identity(1, 1), b: DVector::from_vec(vec![1.0]), c: 1.0 };
        assert!(solve_coefficients(&sys, -1.0).is_err());
    }

    #[test]
    fn normalization_rejects_large_step() {
        let h = IsingHamiltonian::zero(1);
        assert!(matches!(normalization(1.0, &h, 0.5, OffsetMode::Subtract), Err(Error::NonPositiveNormalization { .. })));
        assert_eq!(normalization(1.0, &h, 0.25, OffsetMode::Subtract).unwrap(), 0.5);
    }
}
