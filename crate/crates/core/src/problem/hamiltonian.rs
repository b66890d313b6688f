//! Penalized Ising form of set partitioning and brute-force diagonal oracles.
//!
//! With spins `s_r = 2 x_r - 1` (so `|0>_r` means route `r` is selected), the
//! quadratic penalty `sum_f (sum_r a_fr x_r - 1)^2` expands to
//!
//! ```text
//! sum_r h_r s_r + sum_{r<r'} J_rr' s_r s_r' + sum_f [ (A_f/2 - 1)^2 + A_f/4 ]
//! h_r   = sum_f a_fr (A_f/2 - 1),   J_rr' = sum_f a_fr a_fr' / 2,   A_f = sum_r a_fr
//! ```
//!
//! and the cost `sum_r c_r x_r` contributes `c_r/2` to each linear term plus
//! `sum_r c_r/2`. The Ising Hamiltonian keeps the row penalty `mu_r` on the
//! couplings (`mu_r J_rr'` for `r < r'`). `constant_offset` adds back the
//! dropped constants, so every feasible assignment evaluates to its objective
//! `sum_r c_r x_r` when the penalties are uniform. For non-uniform penalties
//! the per-flight constant is weighted by the mean penalty of the routes
//! covering that flight, which keeps the offset well defined but makes the
//! identity approximate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::instance::ProblemInstance;
use crate::error::{Error, Result};

/// Default qubit cap for exhaustive enumeration of the diagonal.
pub const BRUTE_FORCE_CAP: usize = 26;

/// Low-bit block used by the streaming diagonal evaluator.
const LOW_BLOCK_BITS: usize = 12;

/// Unpenalized `h_r` and `J_rr'` derived from the coverage matrix alone.
#[derive(Clone, Debug, PartialEq)]
pub struct RawCouplings {
    pub h: Vec<f64>,
    /// Keys `(r, r')` with `r < r'`; only nonzero couplings are stored.
    pub j: BTreeMap<(usize, usize), f64>,
}

impl RawCouplings {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let n = inst.num_routes();
        let mut h = vec![0.0; n];
        let mut j = BTreeMap::new();
        for row in inst.coverage() {
            let a_f = row.len() as f64;
            for (idx, &r) in row.iter().enumerate() {
                h[r] += a_f / 2.0 - 1.0;
                for &r2 in &row[idx + 1..] {
                    *j.entry((r, r2)).or_insert(0.0) += 0.5;
                }
            }
        }
        Self { h, j }
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let key = if a < b { (a, b) } else { (b, a) };
        self.j.get(&key).copied().unwrap_or(0.0)
    }
}

/// Diagonal Hamiltonian `offset + sum_r g_r Z_r + sum_{r<r'} K_rr' Z_r Z_r'`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingHamiltonian {
    num_qubits: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    constant_offset: f64,
}

impl IsingHamiltonian {
    pub fn new(
        num_qubits: usize,
        linear: Vec<f64>,
        quadratic: BTreeMap<(usize, usize), f64>,
        constant_offset: f64,
    ) -> Result<Self> {
        if linear.len() != num_qubits {
            return Err(Error::DimensionMismatch { expected: num_qubits, actual: linear.len() });
        }
        for &(a, b) in quadratic.keys() {
            if !(a < b && b < num_qubits) {
                return Err(Error::InvalidInstance(format!(
                    "quadratic key ({a}, {b}) must satisfy a < b < {num_qubits}"
                )));
            }
        }
        Ok(Self { num_qubits, linear, quadratic, constant_offset })
    }

    /// All-zero Hamiltonian.
    pub fn zero(num_qubits: usize) -> Self {
        Self { num_qubits, linear: vec![0.0; num_qubits], quadratic: BTreeMap::new(), constant_offset: 0.0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn constant_offset(&self) -> f64 {
        self.constant_offset
    }

    /// Coefficient of `Z_a Z_b` (symmetric accessor).
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let key = if a < b { (a, b) } else { (b, a) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    /// Same operator without the constant shift.
    pub fn traceless(&self) -> Self {
        Self { constant_offset: 0.0, ..self.clone() }
    }

    /// Nonzero `Z`-string terms as `(qubits, coefficient)`: linear terms first
    /// (ascending qubit), then couplings in key order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let lin = self
            .linear
            .iter()
            .enumerate()
            .filter(|(_, &g)| g != 0.0)
            .map(|(r, &g)| (vec![r], g));
        let quad = self.quadratic.iter().filter(|(_, &k)| k != 0.0).map(|(&(a, b), &k)| (vec![a, b], k));
        lin.chain(quad)
    }

    /// Energy of basis state `x` by direct evaluation of the formula.
    pub fn energy_of(&self, x: u64) -> f64 {
        let spin = |r: usize| if x >> r & 1 == 0 { 1.0 } else { -1.0 };
        let mut e = self.constant_offset;
        for (r, &g) in self.linear.iter().enumerate() {
            e += g * spin(r);
        }
        for (&(a, b), &k) in &self.quadratic {
            e += k * spin(a) * spin(b);
        }
        e
    }

    /// Largest absolute coefficient; used for tolerance scaling.
    pub fn coefficient_scale(&self) -> f64 {
        self.linear
            .iter()
            .chain(self.quadratic.values())
            .fold(self.constant_offset.abs(), |m, v| m.max(v.abs()))
    }

    /// Streaming evaluator over the diagonal.
    pub fn evaluator(&self) -> DiagonalEvaluator {
        DiagonalEvaluator::new(self)
    }
}

/// Ising form of `inst`, exactly as the penalized set-partitioning mapping.
pub fn build_hamiltonian(inst: &ProblemInstance) -> IsingHamiltonian {
    let raw = RawCouplings::from_instance(inst);
    let mu = inst.penalties();
    let c = inst.costs();
    let linear: Vec<f64> = (0..inst.num_routes()).map(|r| mu[r] * raw.h[r] + c[r] / 2.0).collect();
    let quadratic = raw.j.iter().map(|(&(a, b), &j)| ((a, b), mu[a] * j)).collect();

    let mut offset: f64 = c.iter().sum::<f64>() / 2.0;
    for row in inst.coverage() {
        let a_f = row.len() as f64;
        let mean_mu = row.iter().map(|&r| mu[r]).sum::<f64>() / a_f;
        offset += mean_mu * ((a_f / 2.0 - 1.0).powi(2) + a_f / 4.0);
    }
    IsingHamiltonian { num_qubits: inst.num_routes(), linear, quadratic, constant_offset: offset }
}

/// Evaluates diagonal energies block by block without materializing the full
/// vector. Index `x = (high << low_bits) | low`; every entry is summed in the
/// same fixed order regardless of how blocks are scheduled.
pub struct DiagonalEvaluator {
    num_qubits: usize,
    low_bits: usize,
    offset: f64,
    linear: Vec<f64>,
    /// Dense symmetric coupling matrix, row-major.
    dense: Vec<f64>,
    low_table: Vec<f64>,
}

impl DiagonalEvaluator {
    fn new(h: &IsingHamiltonian) -> Self {
        let n = h.num_qubits;
        let low_bits = n.min(LOW_BLOCK_BITS);
        let mut dense = vec![0.0; n * n];
        for (&(a, b), &k) in &h.quadratic {
            dense[a * n + b] = k;
            dense[b * n + a] = k;
        }
        let mut low_table = vec![0.0; 1usize << low_bits];
        for (l, slot) in low_table.iter_mut().enumerate() {
            let spin = |r: usize| if l >> r & 1 == 0 { 1.0 } else { -1.0 };
            let mut e = 0.0;
            for r in 0..low_bits {
                e += h.linear[r] * spin(r);
            }
            for a in 0..low_bits {
                for b in a + 1..low_bits {
                    e += dense[a * n + b] * spin(a) * spin(b);
                }
            }
            *slot = e;
        }
        Self { num_qubits: n, low_bits, offset: h.constant_offset, linear: h.linear.clone(), dense, low_table }
    }

    pub fn block_len(&self) -> usize {
        1 << self.low_bits
    }

    pub fn num_blocks(&self) -> usize {
        1 << (self.num_qubits - self.low_bits)
    }

    /// Fill `out` (length [`Self::block_len`]) with energies of block `high`.
    pub fn fill_block(&self, high: usize, out: &mut [f64]) {
        assert_eq!(out.len(), self.block_len());
        let n = self.num_qubits;
        let lb = self.low_bits;
        let spin_h = |r: usize| if (high >> (r - lb)) & 1 == 0 { 1.0 } else { -1.0 };
        let mut e_high = self.offset;
        for r in lb..n {
            e_high += self.linear[r] * spin_h(r);
        }
        for a in lb..n {
            for b in a + 1..n {
                let k = self.dense[a * n + b];
                if k != 0.0 {
                    e_high += k * spin_h(a) * spin_h(b);
                }
            }
        }
        // Cross term sum_{r low} s_r F_r with F_r = sum_{r' high} K_rr' s_r'.
        let mut cross = vec![0.0; out.len()];
        let mut all_up = 0.0;
        let fields: Vec<f64> = (0..lb)
            .map(|r| (lb..n).map(|r2| self.dense[r * n + r2] * spin_h(r2)).sum())
            .collect();
        for f in &fields {
            all_up += f;
        }
        cross[0] = all_up;
        for (r, f) in fields.iter().enumerate() {
            let half = 1usize << r;
            for l in 0..half {
                cross[l | half] = cross[l] - 2.0 * f;
            }
        }
        for ((o, &low), &x) in out.iter_mut().zip(&self.low_table).zip(&cross) {
            *o = e_high + low + x;
        }
    }
}

/// Full diagonal, entry `x` is the energy of basis state `x`.
pub fn diagonal_energies(h: &IsingHamiltonian) -> Result<Vec<f64>> {
    diagonal_energies_capped(h, BRUTE_FORCE_CAP)
}

pub fn diagonal_energies_capped(h: &IsingHamiltonian, cap: usize) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    let n = h.num_qubits();
    if n > cap {
        return Err(Error::CapExceeded { what: "diagonal enumeration", n, cap });
    }
    let ev = h.evaluator();
    let mut out = vec![0.0; 1usize << n];
    out.par_chunks_mut(ev.block_len()).enumerate().for_each(|(high, block)| ev.fill_block(high, block));
    Ok(out)
}

/// Exhaustive minimum over the diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateReport {
    pub min_energy: f64,
    pub max_energy: f64,
    /// Ascending basis indices attaining `min_energy`.
    pub ground_states: Vec<u64>,
}

impl GroundStateReport {
    pub fn contains(&self, x: u64) -> bool {
        self.ground_states.binary_search(&x).is_ok()
    }

    /// `(E - E_min) / (E_max - E_min)`; zero for a flat spectrum.
    pub fn normalize(&self, energy: f64) -> f64 {
        let span = self.max_energy - self.min_energy;
        if span > 0.0 {
            (energy - self.min_energy) / span
        } else {
            0.0
        }
    }

    /// Route selection `x_r = 1 - bit_r` of ground state `x`.
    pub fn selection(x: u64, num_qubits: usize) -> Vec<bool> {
        (0..num_qubits).map(|r| x >> r & 1 == 0).collect()
    }
}

pub fn ground_states(h: &IsingHamiltonian) -> Result<GroundStateReport> {
    ground_states_capped(h, BRUTE_FORCE_CAP)
}

pub fn ground_states_capped(h: &IsingHamiltonian, cap: usize) -> Result<GroundStateReport> {
    let diag = diagonal_energies_capped(h, cap)?;
    Ok(report_from_diagonal(h, &diag))
}

/// Ground-state report from an already materialized diagonal. Energies within
/// `1e-9 * max(1, coefficient scale)` of the minimum count as degenerate.
pub fn report_from_diagonal(h: &IsingHamiltonian, diag: &[f64]) -> GroundStateReport {
    let (min, max) = diag.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let tol = 1e-9 * h.coefficient_scale().max(1.0) * (h.num_qubits().max(1) as f64);
    let ground_states = diag
        .iter()
        .enumerate()
        .filter(|(_, &e)| e <= min + tol)
        .map(|(x, _)| x as u64)
        .collect();
    GroundStateReport { min_energy: min, max_energy: max, ground_states }
}

/// Mean conflict-graph degree over the maximum degree `N - 1`.
pub fn conflict_density(inst: &ProblemInstance) -> f64 {
    let n = inst.num_routes();
    if n < 2 {
        return 0.0;
    }
    let raw = RawCouplings::from_instance(inst);
    let mut degree = vec![0usize; n];
    for (&(a, b), &j) in &raw.j {
        if j != 0.0 {
            degree[a] += 1;
            degree[b] += 1;
        }
    }
    let mean = degree.iter().sum::<usize>() as f64 / n as f64;
    mean / (n - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_instance;

    fn zz_half() -> IsingHamiltonian {
        let mut q = BTreeMap::new();
        q.insert((0, 1), 0.5);
        IsingHamiltonian::new(2, vec![0.0, 0.0], q, 0.0).unwrap()
    }

    #[test]
    fn toy_instance_coefficients() {
        let inst = parse_instance("1 2\n0 1\n").unwrap();
        let h = build_hamiltonian(&inst);
        assert_eq!(h.linear(), &[0.0, 0.0]);
        assert_eq!(h.coupling(0, 1), 0.5);
        // (A/2 - 1)^2 + A/4 with A = 2
        assert_eq!(h.constant_offset(), 0.5);
        let diag = diagonal_energies(&h).unwrap();
        assert_eq!(diag, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn zz_energies_and_ground_states() {
        let h = zz_half();
        assert_eq!(diagonal_energies(&h).unwrap(), vec![0.5, -0.5, -0.5, 0.5]);
        let gs = ground_states(&h).unwrap();
        assert_eq!(gs.ground_states, vec![1, 2]);
        assert_eq!(gs.min_energy, -0.5);
        assert_eq!(gs.max_energy, 0.5);
    }

    #[test]
    fn zero_and_single_qubit() {
        let zero = IsingHamiltonian::zero(3);
        assert!(diagonal_energies(&zero).unwrap().iter().all(|&e| e == 0.0));
        assert_eq!(ground_states(&zero).unwrap().ground_states.len(), 8);

        let g = 0.7;
        let single = IsingHamiltonian::new(1, vec![g], BTreeMap::new(), 0.0).unwrap();
        assert_eq!(diagonal_energies(&single).unwrap(), vec![g, -g]);
    }

    #[test]
    fn uncovered_route_decouples() {
        let inst = parse_instance("2 4\n0 1\n1 2\n").unwrap();
        let h = build_hamiltonian(&inst);
        assert_eq!(h.linear()[3], 0.0);
        assert!((0..4).all(|r| h.coupling(r, 3) == 0.0));
    }

    #[test]
    fn cap_enforced() {
        let h = IsingHamiltonian::zero(30);
        assert!(matches!(diagonal_energies(&h), Err(Error::CapExceeded { .. })));
        assert!(diagonal_energies_capped(&IsingHamiltonian::zero(4), 3).is_err());
    }

    #[test]
    fn streaming_matches_direct_formula() {
        // 15 qubits crosses the low-block boundary.
        let inst = parse_instance(
            "6 15\n0 3 7 11\n1 3 8\n2 4 9 12 14\n5 6 10\n0 13 14\n2 6 7 8 9\ncosts: 1 2 3 4 5 6 7 8 9 10 11 12 13 14 15\n",
        )
        .unwrap();
        let h = build_hamiltonian(&inst);
        let diag = diagonal_energies(&h).unwrap();
        for x in (0..1u64 << 15).step_by(37) {
            assert!((diag[x as usize] - h.energy_of(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn ground_states_select_one_route() {
        let inst = parse_instance("1 2\n0 1\n").unwrap();
        let gs = ground_states(&build_hamiltonian(&inst)).unwrap();
        for &x in &gs.ground_states {
            let sel = GroundStateReport::selection(x, 2);
            assert!(inst.is_exact_cover(&sel));
        }
        assert_eq!(gs.min_energy, 0.0);
    }

    #[test]
    fn density_examples() {
        assert_eq!(conflict_density(&parse_instance("1 2\n0 1\n").unwrap()), 1.0);
        assert_eq!(conflict_density(&parse_instance("2 2\n0\n1\n").unwrap()), 0.0);
        let d = conflict_density(&parse_instance("2 3\n0 1\n2\n").unwrap());
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
    }
}
