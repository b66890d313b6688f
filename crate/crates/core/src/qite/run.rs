//! QITE steps, full runs and the exact imaginary-time reference.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::ansatz::{build_operator_basis, AnsatzSpec, AnsatzVariant, OperatorBasis};
use super::closed_form::ReducedZyCoefficients;
use super::expect::{BranchProductState, ExpectationSource};
use super::grouping::{estimate_grouped, qwc_group, MeasurementGroup};
use super::realize::{branch_product_form, realize_into, AnsatzParameters, LayerOrder};
use super::system::{assemble_from_values, solve_coefficients, OffsetMode, SymbolicSystem, DEFAULT_RIDGE};
use crate::analysis::compression_step_diagnostic;
use crate::error::{Error, Result};
use crate::problem::{diagonal_energies, GroundStateReport, IsingHamiltonian};
use crate::statevector::{sample_counts, RealStatevector, ShotSampler, DEFAULT_SHOTS};

/// Largest-step search for the adaptive rule: `max * ratio^j`, `j = 0, 1, ...`,
/// down to `min`, keeping the largest first-step rotation angle below `limit`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveDtau {
    pub max: f64,
    pub ratio: f64,
    pub min: f64,
    pub limit: f64,
}

impl Default for AdaptiveDtau {
    fn default() -> Self {
        Self { max: 0.5, ratio: 2f64.powf(-1.0 / 32.0), min: 1e-7, limit: FRAC_PI_4 }
    }
}

impl AdaptiveDtau {
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..).map(move |j| self.max * self.ratio.powi(j)).take_while(move |&d| d >= self.min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DtauRule {
    Fixed(f64),
    Adaptive(AdaptiveDtau),
}

/// Run options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiteConfig {
    pub steps: usize,
    pub dtau: DtauRule,
    pub ridge: f64,
    pub offset_mode: OffsetMode,
    pub layer_order: LayerOrder,
    /// Stop once `p_GS` reaches this value.
    pub early_stop: Option<f64>,
    /// Estimate expectations from this many shots per measurement group.
    pub shots: Option<u64>,
    pub seed: u64,
    /// Record the leading merge-error norm per step (reduced ZY only).
    pub compression_diagnostics: bool,
}

impl Default for QiteConfig {
    fn default() -> Self {
        Self {
            steps: 50,
            dtau: DtauRule::Fixed(0.05),
            ridge: DEFAULT_RIDGE,
            offset_mode: OffsetMode::Subtract,
            layer_order: LayerOrder::RyFirst,
            early_stop: None,
            shots: None,
            seed: 0,
            compression_diagnostics: false,
        }
    }
}

impl QiteConfig {
    pub fn fixed(steps: usize, dtau: f64) -> Self {
        Self { steps, dtau: DtauRule::Fixed(dtau), ..Self::default() }
    }

    pub fn adaptive(steps: usize) -> Self {
        Self { steps, dtau: DtauRule::Adaptive(AdaptiveDtau::default()), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        match self.dtau {
            DtauRule::Fixed(d) if !(d >= 0.0 && d.is_finite()) => {
                return Err(Error::Config(format!("dtau must be finite and nonnegative, got {d}")))
            }
            DtauRule::Adaptive(a) if !(a.max > 0.0 && a.min > 0.0 && a.ratio > 0.0 && a.ratio < 1.0 && a.limit > 0.0) => {
                return Err(Error::Config("adaptive dtau needs max, min, limit > 0 and ratio in (0, 1)".into()))
            }
            _ => {}
        }
        if !(self.ridge >= 0.0) {
            return Err(Error::Config("ridge must be nonnegative".into()));
        }
        if self.shots == Some(0) {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if let Some(t) = self.early_stop {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Config(format!("early-stop threshold {t} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Metrics of the prepared state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateMetrics {
    pub energy: f64,
    pub normalized_energy: Option<f64>,
    pub p_gs: Option<f64>,
}

fn metrics(state: &RealStatevector, h: &IsingHamiltonian, gs: Option<&GroundStateReport>) -> Result<StateMetrics> {
    let energy = state.expectation_diagonal(h)?;
    let (normalized_energy, p_gs) = match gs {
        Some(g) => (Some(g.normalize(energy)), Some(state.success_probability(g)?)),
        None => (None, None),
    };
    Ok(StateMetrics { energy, normalized_energy, p_gs })
}

/// One entry per QITE step; metrics refer to the state prepared after the step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub m: usize,
    pub energy: f64,
    pub normalized_energy: Option<f64>,
    pub p_gs: Option<f64>,
    /// Largest absolute accumulated rotation angle.
    pub max_abs_param: f64,
    pub solver_residual: f64,
    pub solver_rank: usize,
    pub c: f64,
    pub dtau: f64,
    /// Norm of the leading merge-error term for this step.
    pub compression_error: Option<f64>,
}

pub const TRACE_CSV_HEADER: [&str; 10] = [
    "m",
    "energy",
    "normalized_energy",
    "p_gs",
    "max_abs_param",
    "solver_residual",
    "solver_rank",
    "c",
    "dtau",
    "compression_error",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiteTrace {
    pub spec: AnsatzSpec,
    pub dtau: f64,
    pub initial: StateMetrics,
    pub steps: Vec<StepRecord>,
    pub early_stopped: bool,
    /// Computational-basis counts of the final state in shot mode.
    pub final_counts: Option<BTreeMap<u64, u64>>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

impl QiteTrace {
    pub fn final_p_gs(&self) -> Option<f64> {
        self.steps.last().map(|s| s.p_gs).unwrap_or(self.initial.p_gs)
    }

    pub fn final_energy(&self) -> f64 {
        self.steps.last().map(|s| s.energy).unwrap_or(self.initial.energy)
    }

    /// Largest `p_GS` over the trace, including the initial state.
    pub fn best_p_gs(&self) -> Option<f64> {
        let init = self.initial.p_gs?;
        Some(self.steps.iter().filter_map(|s| s.p_gs).fold(init, f64::max))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Per-step table, numbers in round-trip exponent notation.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(TRACE_CSV_HEADER)?;
        for s in &self.steps {
            w.write_record([
                s.m.to_string(),
                format!("{:e}", s.energy),
                opt(s.normalized_energy),
                opt(s.p_gs),
                format!("{:e}", s.max_abs_param),
                format!("{:e}", s.solver_residual),
                s.solver_rank.to_string(),
                format!("{:e}", s.c),
                format!("{:e}", s.dtau),
                opt(s.compression_error),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Prepared basis, symbolic expansion and measurement plan for one Hamiltonian.
pub struct QiteEngine<'a> {
    h: &'a IsingHamiltonian,
    spec: AnsatzSpec,
    basis: OperatorBasis,
    sym: SymbolicSystem,
    config: QiteConfig,
    gs: Option<&'a GroundStateReport>,
    groups: Option<Vec<MeasurementGroup>>,
    sampler: Option<ShotSampler>,
}

impl<'a> QiteEngine<'a> {
    pub fn new(
        h: &'a IsingHamiltonian,
        spec: &AnsatzSpec,
        config: &QiteConfig,
        gs: Option<&'a GroundStateReport>,
    ) -> Result<Self> {
        config.validate()?;
        let basis = build_operator_basis(spec, h.num_qubits())?;
        let sym = SymbolicSystem::new(&basis, h)?;
        let (groups, sampler) = match config.shots {
            Some(shots) => {
                let groups = if sym.strings().is_empty() { Vec::new() } else { qwc_group(sym.strings())? };
                (Some(groups), Some(ShotSampler::new(config.seed, shots)))
            }
            None => (None, None),
        };
        Ok(Self { h, spec: spec.clone(), basis, sym, config: config.clone(), gs, groups, sampler })
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    pub fn symbolic(&self) -> &SymbolicSystem {
        &self.sym
    }

    pub fn measurement_groups(&self) -> Option<&[MeasurementGroup]> {
        self.groups.as_deref()
    }

    /// Step-size from the config; adaptive rules inspect the first step on `|+>^N`.
    pub fn choose_dtau(&self) -> Result<f64> {
        match self.config.dtau {
            DtauRule::Fixed(d) => Ok(d),
            DtauRule::Adaptive(rule) => {
                let plus = BranchProductState::plus(self.h.num_qubits());
                let values = plus.expectations(self.sym.strings())?;
                let energy = self.h.constant_offset();
                for d in rule.grid() {
                    let Ok(sys) = assemble_from_values(&self.sym, &values, energy, self.h, d, self.config.offset_mode)
                    else {
                        continue;
                    };
                    let a = solve_coefficients(&sys, self.config.ridge)?;
                    let max_angle = a.coefficients.iter().fold(0.0f64, |m, v| m.max((2.0 * d * v).abs()));
                    if max_angle < rule.limit {
                        return Ok(d);
                    }
                }
                Err(Error::Config(format!("no step size >= {} keeps the first-step angle below {}", rule.min, rule.limit)))
            }
        }
    }

    fn expectation_values(&mut self, state: &RealStatevector, params: &AnsatzParameters) -> Result<Vec<f64>> {
        if let (Some(groups), Some(sampler)) = (&self.groups, self.sampler.as_mut()) {
            return estimate_grouped(state, self.sym.strings(), groups, sampler);
        }
        match branch_product_form(&self.basis, &self.spec, params, self.config.layer_order)? {
            Some(b) => b.expectations(self.sym.strings()),
            None => state.expectations(self.sym.strings()),
        }
    }

    fn energy_for_normalization(&mut self, state: &RealStatevector) -> Result<f64> {
        match self.sampler.as_mut() {
            Some(sampler) => {
                let counts = sample_counts(state, sampler)?;
                let total: u64 = counts.values().sum();
                Ok(counts.iter().map(|(&x, &c)| self.h.energy_of(x) * c as f64).sum::<f64>() / total as f64)
            }
            None => state.expectation_diagonal(self.h),
        }
    }

    /// Assemble, solve, append the layer and re-prepare `state` from `|+>^N`.
    /// `state` must hold the circuit state for `params` on entry.
    pub fn step(&mut self, params: &mut AnsatzParameters, state: &mut RealStatevector, dtau: f64) -> Result<StepRecord> {
        let energy = self.energy_for_normalization(state)?;
        let values = self.expectation_values(state, params)?;
        let sys = assemble_from_values(&self.sym, &values, energy, self.h, dtau, self.config.offset_mode)?;
        let sol = solve_coefficients(&sys, self.config.ridge)?;
        let compression_error = if self.config.compression_diagnostics && self.spec.variant == AnsatzVariant::ReducedZY {
            let k = self.spec.pivot.expect("validated");
            let history = ReducedZyCoefficients::from_basis_vector(k, &params.accumulated)?;
            let layer: Vec<f64> = sol.coefficients.iter().map(|a| dtau * a).collect();
            let next = ReducedZyCoefficients::from_basis_vector(k, &layer)?;
            Some(compression_step_diagnostic(&history, &next)?)
        } else {
            None
        };
        params.push_layer(&sol.coefficients, dtau)?;
        realize_into(state, &self.basis, &self.spec, params, self.config.layer_order)?;
        let m = metrics(state, self.h, self.gs)?;
        Ok(StepRecord {
            m: params.steps(),
            energy: m.energy,
            normalized_energy: m.normalized_energy,
            p_gs: m.p_gs,
            max_abs_param: params.max_abs_angle(),
            solver_residual: sol.residual,
            solver_rank: sol.rank,
            c: sys.c,
            dtau,
            compression_error,
        })
    }
}

/// Convenience single step with a throwaway engine.
pub fn qite_step(
    state: &mut RealStatevector,
    h: &IsingHamiltonian,
    spec: &AnsatzSpec,
    params: &mut AnsatzParameters,
    dtau: f64,
    config: &QiteConfig,
) -> Result<StepRecord> {
    let mut engine = QiteEngine::new(h, spec, config, None)?;
    engine.step(params, state, dtau)
}

/// Outcome of [`run_qite`].
#[derive(Clone, Debug)]
pub struct QiteRun {
    pub trace: QiteTrace,
    pub params: AnsatzParameters,
    pub basis: OperatorBasis,
    pub final_state: RealStatevector,
}

pub fn run_qite(
    h: &IsingHamiltonian,
    spec: &AnsatzSpec,
    config: &QiteConfig,
    gs: Option<&GroundStateReport>,
) -> Result<QiteRun> {
    let mut engine = QiteEngine::new(h, spec, config, gs)?;
    let dtau = engine.choose_dtau()?;
    let mut params = AnsatzParameters::new(engine.basis.len());
    let mut state = RealStatevector::plus(h.num_qubits())?;
    let initial = metrics(&state, h, gs)?;
    let mut steps = Vec::with_capacity(config.steps);
    let mut early_stopped = false;
    let reached = |p: Option<f64>| matches!((p, config.early_stop), (Some(p), Some(t)) if p >= t);
    if reached(initial.p_gs) {
        early_stopped = true;
    } else {
        for _ in 0..config.steps {
            let rec = engine.step(&mut params, &mut state, dtau)?;
            let done = reached(rec.p_gs);
            steps.push(rec);
            if done {
                early_stopped = true;
                break;
            }
        }
    }
    let final_counts = match engine.sampler.as_mut() {
        Some(s) => Some(sample_counts(&state, s)?),
        None => None,
    };
    let trace = QiteTrace { spec: spec.clone(), dtau, initial, steps, early_stopped, final_counts };
    Ok(QiteRun { trace, params, basis: engine.basis, final_state: state })
}

/// Exact normalized `e^{-tau H}|+>^N` at one imaginary time.
#[derive(Clone, Debug)]
pub struct IteSnapshot {
    pub tau: f64,
    pub state: RealStatevector,
    pub metrics: StateMetrics,
}

/// Damp `|+>^N` by `e^{-tau d(x)}` and renormalize, for each `tau`.
pub fn exact_ite_reference(
    h: &IsingHamiltonian,
    taus: &[f64],
    gs: Option<&GroundStateReport>,
) -> Result<Vec<IteSnapshot>> {
    let diag = diagonal_energies(h)?;
    let e_min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    taus.iter()
        .map(|&tau| {
            let amps: Vec<f64> = diag.iter().map(|&e| (-tau * (e - e_min)).exp()).collect();
            let mut state = RealStatevector::from_amplitudes(amps)?;
            state.normalize();
            let metrics = metrics(&state, h, gs)?;
            Ok(IteSnapshot { tau, state, metrics })
        })
        .collect()
}

/// Default shot count re-exported for configuration defaults.
pub const SHOTS_DEFAULT: u64 = DEFAULT_SHOTS;
