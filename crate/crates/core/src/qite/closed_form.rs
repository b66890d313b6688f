//! Closed forms for the reduced ZY ansatz.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ansatz::{AnsatzSpec, AnsatzVariant};
use crate::error::{Error, Result};
use crate::problem::IsingHamiltonian;

/// Reduced ZY coefficients split by family: `a[i]` for `Y_i`, `b[i]` for `Z_k Y_i`
/// (`b[k]` is always 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedZyCoefficients {
    pub pivot: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ReducedZyCoefficients {
    /// Split a basis-ordered vector (`Y_0..Y_{N-1}`, then `Z_k Y_i` for `i != k` ascending).
    pub fn from_basis_vector(pivot: usize, v: &[f64]) -> Result<Self> {
        if v.is_empty() || v.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: 2 * v.len().div_ceil(2) + 1, actual: v.len() });
        }
        let n = v.len().div_ceil(2);
        if pivot >= n {
            return Err(Error::QubitOutOfRange { index: pivot, num_qubits: n });
        }
        let a = v[..n].to_vec();
        let mut b = vec![0.0; n];
        for (slot, &val) in (0..n).filter(|&i| i != pivot).zip(&v[n..]) {
            b[slot] = val;
        }
        Ok(Self { pivot, a, b })
    }

    pub fn to_basis_vector(&self) -> Vec<f64> {
        let mut out = self.a.clone();
        out.extend((0..self.a.len()).filter(|&i| i != self.pivot).map(|i| self.b[i]));
        out
    }
}

/// First-step parameters on `|+>^N`: `dtau * g_i` for `Y_i` and `dtau * K_ki`
/// for `Z_k Y_i`, where `g_i` and `K_ki` are the `Z_i` and `Z_k Z_i` coefficients of `H`.
pub fn first_step_closed_form(h: &IsingHamiltonian, dtau: f64, spec: &AnsatzSpec) -> Result<ReducedZyCoefficients> {
    if spec.variant != AnsatzVariant::ReducedZY {
        return Err(Error::InvalidAnsatz("closed form exists only for the reduced ZY ansatz".into()));
    }
    let n = h.num_qubits();
    spec.validate(n)?;
    let k = spec.pivot.expect("validated");
    let a = h.linear().iter().map(|g| dtau * g).collect();
    let b = (0..n).map(|i| if i == k { 0.0 } else { dtau * h.coupling(k, i) }).collect();
    Ok(ReducedZyCoefficients { pivot: k, a, b })
}

/// Coefficients `c_i = a_k' sum b_i - b_i' sum a_k` of the leading merge error
/// `[A', sum A] = sum_{i != k} 2i c_i X_k Y_i`, keyed by `(k, i)`.
///
/// `next` is the coefficient set of the layer being merged and `history` the
/// summed coefficients of the earlier layers.
pub fn compression_error_leading_term(
    history: &ReducedZyCoefficients,
    next: &ReducedZyCoefficients,
) -> Result<BTreeMap<(usize, usize), f64>> {
    if history.pivot != next.pivot || history.a.len() != next.a.len() {
        return Err(Error::InvalidAnsatz("history and next layer must share pivot and size".into()));
    }
    let k = history.pivot;
    Ok((0..history.a.len())
        .filter(|&i| i != k)
        .map(|i| ((k, i), next.a[k] * history.b[i] - next.b[i] * history.a[k]))
        .collect())
}
