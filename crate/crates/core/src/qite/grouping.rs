//! Qubit-wise commuting measurement groups and their estimation from shots.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::statevector::{estimate_from_counts, rotate_for_group, MeasurementBasis, RealStatevector, ShotSampler};

/// Observables measured together. `bases[q]` is `None` when no member acts on `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementGroup {
    /// Indices into the grouped observable list.
    pub members: Vec<usize>,
    pub bases: Vec<Option<MeasurementBasis>>,
}

impl MeasurementGroup {
    fn accepts(&self, p: &PauliString) -> bool {
        p.support().all(|q| match (self.bases[q], MeasurementBasis::from_letter(p.letter(q))) {
            (None, _) => true,
            (Some(b), Some(l)) => b == l,
            (Some(_), None) => true,
        })
    }

    fn add(&mut self, idx: usize, p: &PauliString) {
        for q in p.support() {
            self.bases[q] = MeasurementBasis::from_letter(p.letter(q));
        }
        self.members.push(idx);
    }

    /// `(qubit, basis)` pairs for [`rotate_for_group`].
    pub fn assignments(&self) -> Vec<(usize, MeasurementBasis)> {
        self.bases.iter().enumerate().filter_map(|(q, b)| b.map(|b| (q, b))).collect()
    }

    /// Basis on qubit `q`.
    pub fn basis(&self, q: usize) -> Option<MeasurementBasis> {
        self.bases.get(q).copied().flatten()
    }
}

/// Greedy first-fit over observables sorted by descending weight, ties by
/// letters from qubit 0 upward.
pub fn qwc_group(observables: &[PauliString]) -> Result<Vec<MeasurementGroup>> {
    let Some(first) = observables.first() else {
        return Err(Error::Config("cannot group an empty observable list".into()));
    };
    let n = first.num_qubits();
    if let Some(p) = observables.iter().find(|p| p.num_qubits() != n) {
        return Err(Error::DimensionMismatch { expected: n, actual: p.num_qubits() });
    }
    let mut order: Vec<usize> = (0..observables.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&observables[a], &observables[b]);
        pb.weight().cmp(&pa.weight()).then_with(|| pa.sort_key().1.cmp(&pb.sort_key().1)).then(a.cmp(&b))
    });
    let mut groups: Vec<MeasurementGroup> = Vec::new();
    for idx in order {
        let p = &observables[idx];
        match groups.iter_mut().find(|g| g.accepts(p)) {
            Some(g) => g.add(idx, p),
            None => {
                let mut g = MeasurementGroup { members: Vec::new(), bases: vec![None; n] };
                g.add(idx, p);
                groups.push(g);
            }
        }
    }
    Ok(groups)
}

/// Groups that read the pivot in `Z` (or not at all) can use the semi-classical
/// fan-out; the rest need the unitary or dynamic circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalSplit {
    pub eligible: Vec<usize>,
    pub unitary_required: Vec<usize>,
}

pub fn semiclassical_split(groups: &[MeasurementGroup], pivot: usize) -> SemiclassicalSplit {
    let mut split = SemiclassicalSplit { eligible: Vec::new(), unitary_required: Vec::new() };
    for (i, g) in groups.iter().enumerate() {
        match g.basis(pivot) {
            None | Some(MeasurementBasis::Z) => split.eligible.push(i),
            _ => split.unitary_required.push(i),
        }
    }
    split
}

/// Estimate every observable from `sampler.shots()` shots per group. Groups are
/// sampled in order, so results are reproducible for a given sampler seed.
pub fn estimate_grouped(
    state: &RealStatevector,
    observables: &[PauliString],
    groups: &[MeasurementGroup],
    sampler: &mut ShotSampler,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; observables.len()];
    for g in groups {
        let probs = rotate_for_group(state, &g.assignments())?;
        let counts: BTreeMap<u64, u64> = sampler.sample_distribution(&probs)?;
        for &m in &g.members {
            out[m] = estimate_from_counts(&counts, &observables[m]);
        }
    }
    Ok(out)
}
