//! Parameter bookkeeping and circuit realization of QITE layers.

use serde::{Deserialize, Serialize};

use super::ansatz::{AnsatzSpec, AnsatzVariant, OperatorBasis};
use super::expect::BranchProductState;
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::statevector::RealStatevector;

/// Gate order inside one layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerOrder {
    /// Single-qubit `R_Y` block, then the multi-qubit rotations.
    #[default]
    RyFirst,
    TwoQubitFirst,
}

/// Per-layer step parameters `theta/2 = dtau * a_I` and their running sum.
///
/// A generator `sigma_I` with step parameter `t` is applied as `exp(-i t sigma_I)`,
/// i.e. a rotation by angle `2 t`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParameters {
    /// One entry per step taken.
    pub layers: Vec<Vec<f64>>,
    /// Imaginary-time step of each layer.
    pub dtaus: Vec<f64>,
    /// Sum over layers, one entry per generator.
    pub accumulated: Vec<f64>,
}

impl AnsatzParameters {
    pub fn new(basis_len: usize) -> Self {
        Self { layers: Vec::new(), dtaus: Vec::new(), accumulated: vec![0.0; basis_len] }
    }

    pub fn steps(&self) -> usize {
        self.layers.len()
    }

    /// Record the solver output `a` for step length `dtau`.
    pub fn push_layer(&mut self, a: &[f64], dtau: f64) -> Result<()> {
        if a.len() != self.accumulated.len() {
            return Err(Error::DimensionMismatch { expected: self.accumulated.len(), actual: a.len() });
        }
        let layer: Vec<f64> = a.iter().map(|v| dtau * v).collect();
        for (acc, v) in self.accumulated.iter_mut().zip(&layer) {
            *acc += v;
        }
        self.layers.push(layer);
        self.dtaus.push(dtau);
        Ok(())
    }

    /// Rotation angles of the merged layer.
    pub fn accumulated_angles(&self) -> Vec<f64> {
        self.accumulated.iter().map(|t| 2.0 * t).collect()
    }

    /// Largest absolute accumulated rotation angle.
    pub fn max_abs_angle(&self) -> f64 {
        self.accumulated.iter().fold(0.0, |m, t| m.max((2.0 * t).abs()))
    }
}

/// Apply one layer `prod_I exp(-i angles_I/2 sigma_I)` in the configured order.
pub fn apply_layer(state: &mut RealStatevector, basis: &OperatorBasis, angles: &[f64], order: LayerOrder) -> Result<()> {
    let n = state.num_qubits();
    if basis.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: basis.num_qubits() });
    }
    if angles.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), actual: angles.len() });
    }
    let mut ry = vec![0.0; n];
    let mut has_ry = false;
    let mut multi: Vec<(PauliString, f64)> = Vec::new();
    for (g, &th) in basis.iter().zip(angles) {
        if g.weight() == 1 {
            // Odd-Y single-qubit generators are exactly Y_q.
            let q = g.y_mask().trailing_zeros() as usize;
            ry[q] += th;
            has_ry = true;
        } else {
            multi.push((*g, th));
        }
    }
    match order {
        LayerOrder::RyFirst => {
            if has_ry {
                state.apply_ry_layer(&ry)?;
            }
            apply_multi(state, &multi)
        }
        LayerOrder::TwoQubitFirst => {
            apply_multi(state, &multi)?;
            if has_ry {
                state.apply_ry_layer(&ry)?;
            }
            Ok(())
        }
    }
}

/// `(control, target)` when `p` is `Z_c Y_t`.
fn as_zy(p: &PauliString) -> Option<(usize, usize)> {
    if p.weight() != 2 || p.y_count() != 1 {
        return None;
    }
    let t = p.y_mask().trailing_zeros() as usize;
    let rest = p.z_mask() & !p.y_mask();
    if p.x_mask() & !p.y_mask() != 0 || rest.count_ones() != 1 {
        return None;
    }
    Some((rest.trailing_zeros() as usize, t))
}

fn apply_multi(state: &mut RealStatevector, gates: &[(PauliString, f64)]) -> Result<()> {
    let mut i = 0;
    while i < gates.len() {
        if let Some((c, _)) = as_zy(&gates[i].0) {
            // Consecutive ZY gates with a common control commute: apply as one fan.
            let mut fan = Vec::new();
            while i < gates.len() {
                match as_zy(&gates[i].0) {
                    Some((c2, t)) if c2 == c => {
                        fan.push((t, gates[i].1));
                        i += 1;
                    }
                    _ => break,
                }
            }
            state.apply_zy_fan(c, &fan)?;
        } else {
            let (g, th) = &gates[i];
            if *th != 0.0 {
                state.apply_pauli_rotation(g, *th)?;
            }
            i += 1;
        }
    }
    Ok(())
}

/// State prepared by the circuit for `params`: merged single layer when
/// `spec.compressed`, otherwise every layer replayed in order, always from `|+>^N`.
pub fn realize_state(
    basis: &OperatorBasis,
    spec: &AnsatzSpec,
    params: &AnsatzParameters,
    order: LayerOrder,
) -> Result<RealStatevector> {
    let mut state = RealStatevector::plus(basis.num_qubits())?;
    realize_into(&mut state, basis, spec, params, order)?;
    Ok(state)
}

/// [`realize_state`] reusing an existing buffer.
pub fn realize_into(
    state: &mut RealStatevector,
    basis: &OperatorBasis,
    spec: &AnsatzSpec,
    params: &AnsatzParameters,
    order: LayerOrder,
) -> Result<()> {
    state.reset_plus();
    if spec.compressed {
        apply_layer(state, basis, &params.accumulated_angles(), order)
    } else {
        for layer in &params.layers {
            let angles: Vec<f64> = layer.iter().map(|t| 2.0 * t).collect();
            apply_layer(state, basis, &angles, order)?;
        }
        Ok(())
    }
}

/// Factorized form of a merged single-pivot layer, if the ansatz has one.
pub fn branch_product_form(
    basis: &OperatorBasis,
    spec: &AnsatzSpec,
    params: &AnsatzParameters,
    order: LayerOrder,
) -> Result<Option<BranchProductState>> {
    let control = match spec.variant {
        AnsatzVariant::ReducedZY => Letter::Z,
        AnsatzVariant::ReducedXY => Letter::X,
        _ => return Ok(None),
    };
    if !spec.compressed && params.steps() > 1 {
        return Ok(None);
    }
    let k = spec.pivot.ok_or_else(|| Error::InvalidAnsatz("pivot required".into()))?;
    let n = basis.num_qubits();
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    for (g, t) in basis.iter().zip(params.accumulated_angles()) {
        let t_q = g.y_mask().trailing_zeros() as usize;
        if g.weight() == 1 {
            alpha[t_q] = t;
        } else {
            beta[t_q] = t;
        }
    }
    BranchProductState::single_pivot_layer(k, control, &alpha, &beta, order).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qite::ansatz::build_operator_basis;
    use crate::qite::expect::ExpectationSource;

    #[test]
    fn zero_dtau_keeps_parameters() {
        let mut p = AnsatzParameters::new(3);
        p.push_layer(&[1.0, -2.0, 0.5], 0.0).unwrap();
        assert_eq!(p.accumulated, vec![0.0; 3]);
        assert_eq!(p.steps(), 1);
    }

    #[test]
    fn branch_form_matches_gates() {
        for order in [LayerOrder::RyFirst, LayerOrder::TwoQubitFirst] {
            for spec in [AnsatzSpec::reduced_zy(1, true), AnsatzSpec::new(AnsatzVariant::ReducedXY).with_pivot(2).with_compressed(true)] {
                let basis = build_operator_basis(&spec, 4).unwrap();
                let mut params = AnsatzParameters::new(basis.len());
                let a: Vec<f64> = (0..basis.len()).map(|i| 0.3 * (i as f64 + 1.0).sin()).collect();
                params.push_layer(&a, 0.7).unwrap();
                params.push_layer(&a.iter().map(|v| v * v).collect::<Vec<_>>(), 0.5).unwrap();
                let dense = realize_state(&basis, &spec, &params, order).unwrap();
                let branch = branch_product_form(&basis, &spec, &params, order).unwrap().unwrap();
                let from_branch = branch.to_statevector().unwrap();
                for (x, y) in dense.amplitudes().iter().zip(from_branch.amplitudes()) {
                    assert!((x - y).abs() < 1e-13);
                }
                for p in ["XXII", "ZYYI", "YIYZ", "XZXZ", "IIZZ"] {
                    let p: PauliString = p.parse().unwrap();
                    let e1 = dense.expectation_pauli(&p).unwrap();
                    let e2 = branch.expectation(&p).unwrap();
                    assert!((e1 - e2).abs() < 1e-13, "{p}: {e1} vs {e2}");
                }
            }
        }
    }
}
