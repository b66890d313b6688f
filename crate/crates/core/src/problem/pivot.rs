use serde::{Deserialize, Serialize};

use super::hamiltonian::{GroundStateReport, RawCouplings};
use super::instance::ProblemInstance;
use crate::error::{Error, Result};

/// Routes ordered by the lowest-total-weight heuristic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PivotRanking {
    /// Qubit indices, best candidate first.
    pub order: Vec<usize>,
    /// `w_k` indexed by qubit (not by rank).
    pub weights: Vec<f64>,
}

/// Rank pivot candidates by `w_k = h_k + sum_{r' != k} J_kr'` using the
/// unpenalized coefficients (no `mu`, no cost term). Ties break on index.
pub fn pivot_ranking(inst: &ProblemInstance) -> PivotRanking {
    let raw = RawCouplings::from_instance(inst);
    let mut weights = raw.h.clone();
    for (&(a, b), &j) in &raw.j {
        weights[a] += j;
        weights[b] += j;
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
    PivotRanking { order, weights }
}

/// Number of rejected candidates before the first one that is `|0>` (route
/// selected) in at least one ground state.
pub fn restart_count(ranking: &PivotRanking, gs: &GroundStateReport) -> Result<usize> {
    ranking
        .order
        .iter()
        .position(|&k| gs.ground_states.iter().any(|&x| x >> k & 1 == 0))
        .ok_or(Error::UndefinedRestarts)
}

/// First ranked qubit that is selected in some ground state.
pub fn ground_state_pivot(ranking: &PivotRanking, gs: &GroundStateReport) -> Result<usize> {
    restart_count(ranking, gs).map(|pos| ranking.order[pos])
}
