//! Resource, runtime and process-fidelity models of one compressed QITE layer
//! for the unitary (SWAP network), dynamic (measured fan-out) and
//! semi-classical realizations.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Implementation {
    Unitary,
    Dynamic,
    SemiClassical,
}

impl Implementation {
    pub const ALL: [Implementation; 3] = [Self::Unitary, Self::Dynamic, Self::SemiClassical];

    pub fn name(self) -> &'static str {
        match self {
            Self::Unitary => "unitary",
            Self::Dynamic => "dynamic",
            Self::SemiClassical => "semi-classical",
        }
    }
}

impl fmt::Display for Implementation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Implementation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "unitary" => Ok(Self::Unitary),
            "dynamic" => Ok(Self::Dynamic),
            "semiclassical" | "sc" => Ok(Self::SemiClassical),
            _ => Err(Error::Config(format!("unknown implementation '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Connectivity {
    Line,
    Any,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceProfile {
    pub implementation: Implementation,
    pub qubits: u64,
    pub cnot_depth: u64,
    pub cnot_count: u64,
    pub midcircuit_measurements: u64,
    pub classical_ops: u64,
    pub connectivity: Connectivity,
}

/// Gate and measurement counts for `n >= 2` system qubits.
pub fn resource_profile(implementation: Implementation, n: u64) -> Result<ResourceProfile> {
    if n < 2 {
        return Err(Error::Config(format!("resource model needs at least 2 qubits, got {n}")));
    }
    Ok(match implementation {
        Implementation::Unitary => ResourceProfile {
            implementation,
            qubits: n,
            cnot_depth: 3 * n - 4,
            cnot_count: 3 * n - 4,
            midcircuit_measurements: 0,
            classical_ops: 0,
            connectivity: Connectivity::Line,
        },
        Implementation::Dynamic => ResourceProfile {
            implementation,
            qubits: 2 * n - 1,
            cnot_depth: 10,
            cnot_count: 6 * n - 8,
            midcircuit_measurements: 2 * n - 2,
            classical_ops: 3 * n / 4,
            connectivity: Connectivity::Line,
        },
        Implementation::SemiClassical => ResourceProfile {
            implementation,
            qubits: n,
            cnot_depth: 0,
            cnot_count: 0,
            midcircuit_measurements: 1,
            classical_ops: 0,
            connectivity: Connectivity::Any,
        },
    })
}

/// Durations in seconds and dimensionless Pauli error rates. `lambda_idle`
/// is per CNOT duration of idling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardwareParams {
    pub t_cnot: f64,
    pub t_measure: f64,
    pub t_feedback: f64,
    pub lambda_cnot: f64,
    pub lambda_meas: f64,
    pub lambda_idle: f64,
}

impl HardwareParams {
    /// Published median timings of a heavy-hex superconducting device, error rates zero.
    pub fn quoted_timings() -> Self {
        Self { t_cnot: 88e-9, t_measure: 1.288e-6, t_feedback: 0.6e-6, lambda_cnot: 0.0, lambda_meas: 0.0, lambda_idle: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t_cnot", self.t_cnot), ("t_measure", self.t_measure), ("t_feedback", self.t_feedback)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if !(self.t_cnot > 0.0) {
            return Err(Error::Config("t_cnot must be positive".into()));
        }
        for (name, v) in [("lambda_cnot", self.lambda_cnot), ("lambda_meas", self.lambda_meas), ("lambda_idle", self.lambda_idle)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// `j = t_measure / (3 t_cnot)`
    pub fn j(&self) -> f64 {
        self.t_measure / (3.0 * self.t_cnot)
    }

    /// `(2 t_measure + 3 t_feedback) / t_cnot`
    pub fn mu_dynamic(&self) -> f64 {
        (2.0 * self.t_measure + 3.0 * self.t_feedback) / self.t_cnot
    }

    /// `(t_measure + 2 t_feedback) / t_cnot`
    pub fn mu_semiclassical(&self) -> f64 {
        (self.t_measure + 2.0 * self.t_feedback) / self.t_cnot
    }
}

/// Sequential measurement and feedback rounds per layer for the runtime model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuntimeModel {
    pub dynamic_measure_rounds: u32,
    pub dynamic_feedback_rounds: u32,
    pub semiclassical_measure_rounds: u32,
    pub semiclassical_feedback_rounds: u32,
}

impl Default for RuntimeModel {
    fn default() -> Self {
        Self {
            dynamic_measure_rounds: 2,
            dynamic_feedback_rounds: 2,
            semiclassical_measure_rounds: 2,
            semiclassical_feedback_rounds: 2,
        }
    }
}

/// Wall-clock time of one layer in seconds.
pub fn layer_runtime(implementation: Implementation, n: u64, hw: &HardwareParams, model: &RuntimeModel) -> f64 {
    match implementation {
        Implementation::Unitary => (3.0 * n as f64 - 4.0) * hw.t_cnot,
        Implementation::Dynamic => {
            10.0 * hw.t_cnot
                + model.dynamic_measure_rounds as f64 * hw.t_measure
                + model.dynamic_feedback_rounds as f64 * hw.t_feedback
        }
        Implementation::SemiClassical => {
            model.semiclassical_measure_rounds as f64 * hw.t_measure
                + model.semiclassical_feedback_rounds as f64 * hw.t_feedback
        }
    }
}

/// Smallest `n` in `range` where `implementation` is strictly faster than the unitary layer.
pub fn runtime_crossover(
    implementation: Implementation,
    hw: &HardwareParams,
    model: &RuntimeModel,
    range: RangeInclusive<u64>,
) -> Option<u64> {
    range.into_iter().find(|&n| {
        layer_runtime(implementation, n, hw, model) < layer_runtime(Implementation::Unitary, n, hw, model)
    })
}

/// Idle time in units of the CNOT duration.
pub fn idle_time(implementation: Implementation, n: u64, hw: &HardwareParams) -> f64 {
    let n = n as f64;
    match implementation {
        Implementation::Unitary => 1.5 * (n - 1.0) * (n + hw.j() - 1.0),
        Implementation::Dynamic => 4.0 + 2.0 * n + n * hw.mu_dynamic(),
        Implementation::SemiClassical => (n - 1.0) * hw.mu_semiclassical(),
    }
}

/// `lambda_tot = t_idle lambda_idle + N_CNOT lambda_CNOT + N_meas lambda_meas`.
pub fn lambda_total(implementation: Implementation, n: u64, hw: &HardwareParams) -> Result<f64> {
    let p = resource_profile(implementation, n)?;
    Ok(idle_time(implementation, n, hw) * hw.lambda_idle
        + p.cnot_count as f64 * hw.lambda_cnot
        + p.midcircuit_measurements as f64 * hw.lambda_meas)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub implementation: Implementation,
    pub n: u64,
    pub t_idle: f64,
    pub lambda_total: f64,
    /// `exp(-lambda_total)`
    pub fidelity_lower_bound: f64,
}

pub fn fidelity_report(implementation: Implementation, n: u64, hw: &HardwareParams) -> Result<FidelityReport> {
    hw.validate()?;
    let lambda = lambda_total(implementation, n, hw)?;
    Ok(FidelityReport {
        implementation,
        n,
        t_idle: idle_time(implementation, n, hw),
        lambda_total: lambda,
        fidelity_lower_bound: (-lambda).exp(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub n: u64,
    /// Dynamic bound at `n`.
    pub bound: f64,
    pub unitary_bound: f64,
}

/// Default system-size range searched for crossovers.
pub const CROSSOVER_RANGE: RangeInclusive<u64> = 2..=400;

/// Smallest `n` where the dynamic bound is at least the unitary bound.
pub fn fidelity_crossover(hw: &HardwareParams, range: RangeInclusive<u64>) -> Result<Option<Crossover>> {
    hw.validate()?;
    if range.is_empty() {
        return Err(Error::Config("empty system-size range".into()));
    }
    for n in range {
        if n < 2 {
            continue;
        }
        let d = lambda_total(Implementation::Dynamic, n, hw)?;
        let u = lambda_total(Implementation::Unitary, n, hw)?;
        if d <= u {
            return Ok(Some(Crossover { n, bound: (-d).exp(), unitary_bound: (-u).exp() }));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRow {
    pub proportion: f64,
    pub feedback_s: f64,
    pub crossover_n: Option<u64>,
    pub bound: Option<f64>,
}

pub const HEATMAP_CSV_HEADER: [&str; 4] = ["proportion", "feedback_s", "crossover_n", "bound"];

/// Crossovers with `lambda_cnot` and `lambda_meas` scaled by each proportion and
/// `t_feedback` set to each feedback latency. Rows are proportion-major.
pub fn crossover_heatmap(
    base: &HardwareParams,
    proportions: &[f64],
    feedbacks: &[f64],
    range: RangeInclusive<u64>,
) -> Result<Vec<HeatmapRow>> {
    if proportions.is_empty() || feedbacks.is_empty() {
        return Err(Error::Config("heatmap grids must be nonempty".into()));
    }
    let cells: Vec<(f64, f64)> = proportions.iter().flat_map(|&p| feedbacks.iter().map(move |&f| (p, f))).collect();
    cells
        .par_iter()
        .map(|&(p, f)| {
            let hw = HardwareParams { lambda_cnot: base.lambda_cnot * p, lambda_meas: base.lambda_meas * p, t_feedback: f, ..*base };
            let c = fidelity_crossover(&hw, range.clone())?;
            Ok(HeatmapRow { proportion: p, feedback_s: f, crossover_n: c.map(|c| c.n), bound: c.map(|c| c.bound) })
        })
        .collect()
}

pub fn heatmap_csv(rows: &[HeatmapRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEATMAP_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            format!("{}", r.proportion),
            format!("{:e}", r.feedback_s),
            r.crossover_n.map(|n| n.to_string()).unwrap_or_default(),
            r.bound.map(|b| format!("{b:.6}")).unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Fitted parameter sets for the fidelity model.
pub mod fixtures {
    use super::*;

    /// Improved two-qubit gate and measurement error rates.
    pub const IMPROVED_LAMBDA_CNOT: f64 = 0.6e-3;
    pub const IMPROVED_LAMBDA_MEAS: f64 = 1.4e-3;
    /// Improved rates are this fraction of the baseline rates.
    pub const IMPROVEMENT_PROPORTION: f64 = 0.35;

    pub const BASELINE_TARGET_N: u64 = 45;
    pub const BASELINE_TARGET_BOUND: f64 = 0.15;

    /// Baseline error rates implied by the improved rates and the 65% reduction.
    pub fn baseline_rates() -> (f64, f64) {
        (IMPROVED_LAMBDA_CNOT / IMPROVEMENT_PROPORTION, IMPROVED_LAMBDA_MEAS / IMPROVEMENT_PROPORTION)
    }

    /// Result of [`calibrate`].
    #[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
    pub struct Calibration {
        pub params: HardwareParams,
        pub crossover: Crossover,
    }

    /// `lambda_U(n) - lambda_D(n)` is linear in `lambda_idle`: returns `(slope, intercept)`.
    fn gap_terms(hw: &HardwareParams, n: f64) -> (f64, f64) {
        let idle_u = 1.5 * (n - 1.0) * (n + hw.j() - 1.0);
        let idle_d = 4.0 + 2.0 * n + n * hw.mu_dynamic();
        let gates = (3.0 * n - 4.0) * hw.lambda_cnot - (6.0 * n - 8.0) * hw.lambda_cnot - (2.0 * n - 2.0) * hw.lambda_meas;
        (idle_u - idle_d, gates)
    }

    /// `lambda_idle` putting the continuous crossover exactly at `n_cross`.
    fn idle_for_crossing(hw: &HardwareParams, n_cross: f64) -> Option<f64> {
        let (slope, intercept) = gap_terms(hw, n_cross);
        let li = -intercept / slope;
        (slope > 0.0 && li.is_finite() && li >= 0.0).then_some(li)
    }

    fn dynamic_bound(hw: &HardwareParams, n: f64) -> f64 {
        let idle = 4.0 + 2.0 * n + n * hw.mu_dynamic();
        (-(idle * hw.lambda_idle + (6.0 * n - 8.0) * hw.lambda_cnot + (2.0 * n - 2.0) * hw.lambda_meas)).exp()
    }

    /// Fit `lambda_idle` and the mid-circuit measurement time so the integer
    /// crossover lands on `target_n` with dynamic bound `target_bound` there.
    ///
    /// The continuous crossing is placed at `target_n - 1/2`; for each trial
    /// measurement time `lambda_idle` follows in closed form and the bound at
    /// `target_n` is matched by bisection over the measurement time.
    pub fn calibrate(base: &HardwareParams, target_n: u64, target_bound: f64) -> Result<Calibration> {
        base.validate()?;
        let n_cross = target_n as f64 - 0.5;
        let n_eval = target_n as f64;
        let eval = |t_measure: f64| -> Option<(HardwareParams, f64)> {
            let mut hw = HardwareParams { t_measure, ..*base };
            hw.lambda_idle = idle_for_crossing(&hw, n_cross)?;
            Some((hw, dynamic_bound(&hw, n_eval)))
        };
        // Scan a log grid for a feasible sign change of `bound - target`.
        let grid: Vec<f64> = (0..=400).map(|k| 1e-9 * 2e4f64.powf(k as f64 / 400.0)).collect();
        let mut bracket = None;
        let mut prev: Option<f64> = None;
        for &t in &grid {
            match eval(t) {
                Some((_, b)) if b >= target_bound => prev = Some(t),
                Some(_) => {
                    if let Some(p) = prev {
                        bracket = Some((p, t));
                        break;
                    }
                }
                None => prev = None,
            }
        }
        let Some((mut lo, mut hi)) = bracket else {
            return Err(Error::Config(format!(
                "no measurement time gives bound {target_bound} with crossover at {target_n}"
            )));
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            match eval(mid) {
                Some((_, b)) if b >= target_bound => lo = mid,
                _ => hi = mid,
            }
        }
        let (params, _) = eval(0.5 * (lo + hi)).expect("bracket endpoint is feasible");
        let crossover = fidelity_crossover(&params, CROSSOVER_RANGE)?
            .ok_or_else(|| Error::Config("calibrated parameters have no crossover".into()))?;
        Ok(Calibration { params, crossover })
    }

    /// Baseline: rates implied by the 65% reduction, quoted CNOT and feedback
    /// times, fitted `lambda_idle` and measurement time.
    pub fn baseline() -> HardwareParams {
        let (lc, lm) = baseline_rates();
        let base = HardwareParams { lambda_cnot: lc, lambda_meas: lm, ..HardwareParams::quoted_timings() };
        calibrate(&base, BASELINE_TARGET_N, BASELINE_TARGET_BOUND).expect("baseline calibration is feasible").params
    }

    /// Improved: reduced gate and measurement errors and feedback latency
    /// halved, idle rate and timings otherwise as the baseline.
    pub fn improved() -> HardwareParams {
        let b = baseline();
        HardwareParams {
            lambda_cnot: IMPROVED_LAMBDA_CNOT,
            lambda_meas: IMPROVED_LAMBDA_MEAS,
            t_feedback: b.t_feedback / 2.0,
            ..b
        }
    }

    /// Improved error rates with a literal 3 us feedback latency.
    pub fn improved_literal_3us() -> HardwareParams {
        HardwareParams { t_feedback: 3e-6, ..improved() }
    }

    pub fn by_name(name: &str) -> Result<HardwareParams> {
        match name.to_ascii_lowercase().as_str() {
            "baseline" => Ok(baseline()),
            "improved" => Ok(improved()),
            "improved-3us" | "improved_3us" => Ok(improved_literal_3us()),
            "quoted" | "timings" => Ok(HardwareParams::quoted_timings()),
            _ => Err(Error::Config(format!("unknown hardware fixture '{name}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows_n6() {
        let u = resource_profile(Implementation::Unitary, 6).unwrap();
        assert_eq!((u.cnot_depth, u.cnot_count), (14, 14));
        let d = resource_profile(Implementation::Dynamic, 6).unwrap();
        assert_eq!((d.qubits, d.cnot_count, d.midcircuit_measurements, d.classical_ops), (11, 28, 10, 4));
        let s = resource_profile(Implementation::SemiClassical, 6).unwrap();
        assert_eq!((s.cnot_count, s.midcircuit_measurements), (0, 1));
        assert!(resource_profile(Implementation::Unitary, 1).is_err());
    }

    #[test]
    fn idle_examples() {
        let hw = HardwareParams { t_cnot: 1.0, t_measure: 3.0, t_feedback: 0.0, ..HardwareParams::quoted_timings() };
        assert!((idle_time(Implementation::Unitary, 3, &hw) - 9.0).abs() < 1e-12);
        let zero = HardwareParams { t_measure: 0.0, t_feedback: 0.0, ..hw };
        assert_eq!(idle_time(Implementation::SemiClassical, 7, &zero), 0.0);
        assert!((idle_time(Implementation::Dynamic, 1, &hw) - (6.0 + hw.mu_dynamic())).abs() < 1e-12);
    }

    #[test]
    fn runtime_limit_case() {
        let hw = HardwareParams { t_measure: 0.0, t_feedback: 0.0, ..HardwareParams::quoted_timings() };
        assert_eq!(runtime_crossover(Implementation::Dynamic, &hw, &RuntimeModel::default(), 2..=100), Some(5));
    }

    #[test]
    fn zero_rates_give_unit_bound() {
        let hw = HardwareParams::quoted_timings();
        let r = fidelity_report(Implementation::Dynamic, 10, &hw).unwrap();
        assert_eq!(r.lambda_total, 0.0);
        assert_eq!(r.fidelity_lower_bound, 1.0);
    }

    #[test]
    fn heavy_measurement_error_never_crosses() {
        let hw = HardwareParams { lambda_meas: 10.0, lambda_cnot: 1e-3, lambda_idle: 1e-4, ..HardwareParams::quoted_timings() };
        assert_eq!(fidelity_crossover(&hw, 2..=200).unwrap(), None);
    }
}
