//! Single runs and deterministic sweeps.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qite_core::problem::{
    build_hamiltonian, ground_state_pivot, ground_states_capped, parse_instance, pivot_ranking, ProblemInstance,
};
use qite_core::qite::{run_qite, QiteTrace};

use crate::config::{PenaltyPolicy, PivotPolicy, RunConfig, VariantLabel};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub instance_id: String,
    pub num_qubits: usize,
    pub config: RunConfig,
    pub pivot: Option<usize>,
    pub trace: QiteTrace,
    pub final_p_gs: Option<f64>,
    pub solved: Option<bool>,
    pub wall_time_s: f64,
    pub toolkit_version: String,
}

/// Instance id from the file stem.
pub fn instance_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into())
}

pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading instance {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing instance {}", path.display()))
}

fn apply_penalty(inst: &mut ProblemInstance, policy: PenaltyPolicy) -> Result<()> {
    let n = inst.num_routes();
    match policy {
        PenaltyPolicy::File => Ok(()),
        PenaltyPolicy::Conservative => {
            let mu = inst.conservative_penalty();
            if mu <= 0.0 {
                bail!("conservative penalty needs positive total cost, got {mu}");
            }
            Ok(inst.set_penalties(vec![mu; n])?)
        }
        PenaltyPolicy::Uniform(mu) => Ok(inst.set_penalties(vec![mu; n])?),
    }
}

/// Run one configuration on one instance.
pub fn solve_instance(inst: &ProblemInstance, id: &str, cfg: &RunConfig) -> Result<ResultRecord> {
    cfg.validate()?;
    let mut inst = inst.clone();
    apply_penalty(&mut inst, cfg.penalty)?;
    let h = build_hamiltonian(&inst);
    let n = h.num_qubits();
    let gs = if n <= cfg.brute_force_cap { Some(ground_states_capped(&h, cfg.brute_force_cap)?) } else { None };
    let pivot = if cfg.variant.variant().needs_pivot() {
        Some(match cfg.pivot {
            PivotPolicy::Explicit(k) => k,
            PivotPolicy::Heuristic => pivot_ranking(&inst).order[0],
            PivotPolicy::Oracle => {
                let gs = gs.as_ref().context("oracle pivot needs the brute-force ground states")?;
                ground_state_pivot(&pivot_ranking(&inst), gs)?
            }
        })
    } else {
        None
    };
    let start = Instant::now();
    let run = run_qite(&h, &cfg.ansatz(pivot), &cfg.qite_config(), gs.as_ref())?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let final_p_gs = run.trace.final_p_gs();
    Ok(ResultRecord {
        instance_id: id.to_string(),
        num_qubits: n,
        config: cfg.clone(),
        pivot,
        final_p_gs,
        solved: final_p_gs.map(|p| p >= cfg.solved_threshold),
        trace: run.trace,
        wall_time_s,
        toolkit_version: TOOLKIT_VERSION.to_string(),
    })
}

/// Instance files (`*.txt`) of a directory in file-name order.
pub fn list_instances(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn record_file_name(id: &str, variant: VariantLabel, seed: Option<u64>) -> String {
    match seed {
        Some(s) => format!("{id}__{variant}__s{s}.json"),
        None => format!("{id}__{variant}.json"),
    }
}

pub const RUNS_CSV_HEADER: [&str; 9] =
    ["instance", "num_qubits", "variant", "seed", "pivot", "dtau", "steps", "final_p_gs", "status"];
pub const AGGREGATE_CSV_HEADER: [&str; 7] =
    ["num_qubits", "variant", "instances", "solved", "failed", "mean_p_gs", "var_p_gs"];

/// Outcome of one sweep job; failures keep the error text.
#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub instance_id: String,
    pub num_qubits: Option<usize>,
    pub variant: VariantLabel,
    pub result: std::result::Result<ResultRecord, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub num_qubits: usize,
    pub variant: VariantLabel,
    pub instances: usize,
    pub solved: usize,
    pub failed: usize,
    pub mean_p_gs: Option<f64>,
    /// Population variance over instances.
    pub var_p_gs: Option<f64>,
}

pub struct SweepOutput {
    pub entries: Vec<SweepEntry>,
    pub aggregate: Vec<AggregateRow>,
    pub aggregate_path: PathBuf,
}

/// Run every variant on every instance of `dir` and write per-run records,
/// `runs.csv` and `aggregate.csv` into `out`. Jobs run on `threads` workers;
/// results are folded in instance-then-variant order.
pub fn run_sweep(
    dir: &Path,
    base: &RunConfig,
    variants: &[VariantLabel],
    out: &Path,
    threads: Option<usize>,
) -> Result<SweepOutput> {
    if variants.is_empty() {
        bail!("sweep needs at least one variant");
    }
    let files = list_instances(dir)?;
    if files.is_empty() {
        bail!("no instance files (*.txt) in {}", dir.display());
    }
    let jobs: Vec<(PathBuf, VariantLabel)> =
        files.iter().flat_map(|f| variants.iter().map(move |&v| (f.clone(), v))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
    let entries: Vec<SweepEntry> = pool.install(|| {
        jobs.par_iter()
            .map(|(path, variant)| {
                let id = instance_id(path);
                let cfg = RunConfig { variant: *variant, ..base.clone() };
                let inst = load_instance(path);
                let num_qubits = inst.as_ref().ok().map(|i| i.num_routes());
                let result = inst.and_then(|i| solve_instance(&i, &id, &cfg)).map_err(|e| format!("{e:#}"));
                SweepEntry { instance_id: id, num_qubits, variant: *variant, result }
            })
            .collect()
    });

    let runs_dir = out.join("runs");
    fs::create_dir_all(&runs_dir).with_context(|| format!("creating {}", runs_dir.display()))?;
    let mut runs = csv::Writer::from_path(out.join("runs.csv"))?;
    runs.write_record(RUNS_CSV_HEADER)?;
    for e in &entries {
        let seed = base.seed.map(|s| s.to_string()).unwrap_or_default();
        match &e.result {
            Ok(r) => {
                let path = runs_dir.join(record_file_name(&e.instance_id, e.variant, base.seed));
                fs::write(&path, serde_json::to_string_pretty(r)?)?;
                runs.write_record([
                    e.instance_id.clone(),
                    r.num_qubits.to_string(),
                    e.variant.to_string(),
                    seed,
                    r.pivot.map(|k| k.to_string()).unwrap_or_default(),
                    r.trace.dtau.to_string(),
                    r.trace.steps.len().to_string(),
                    r.final_p_gs.map(|p| p.to_string()).unwrap_or_default(),
                    match r.solved {
                        Some(true) => "solved".into(),
                        Some(false) => "unsolved".into(),
                        None => "unknown".into(),
                    },
                ])?;
            }
            Err(msg) => {
                runs.write_record([
                    e.instance_id.clone(),
                    e.num_qubits.map(|n| n.to_string()).unwrap_or_default(),
                    e.variant.to_string(),
                    seed,
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("error: {msg}"),
                ])?;
            }
        }
    }
    runs.flush()?;

    let aggregate = aggregate(&entries);
    let aggregate_path = out.join("aggregate.csv");
    let mut w = csv::Writer::from_path(&aggregate_path)?;
    w.write_record(AGGREGATE_CSV_HEADER)?;
    for r in &aggregate {
        w.write_record([
            r.num_qubits.to_string(),
            r.variant.to_string(),
            r.instances.to_string(),
            r.solved.to_string(),
            r.failed.to_string(),
            r.mean_p_gs.map(|v| v.to_string()).unwrap_or_default(),
            r.var_p_gs.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(SweepOutput { entries, aggregate, aggregate_path })
}

/// Group by (qubit count, variant); sequential fold in sorted key order.
pub fn aggregate(entries: &[SweepEntry]) -> Vec<AggregateRow> {
    #[derive(Default)]
    struct Acc {
        instances: usize,
        solved: usize,
        failed: usize,
        ps: Vec<f64>,
    }
    let mut groups: std::collections::BTreeMap<(usize, VariantLabel), Acc> = Default::default();
    for e in entries {
        let Some(n) = e.num_qubits else { continue };
        let g = groups.entry((n, e.variant)).or_default();
        g.instances += 1;
        match &e.result {
            Ok(r) => {
                if r.solved == Some(true) {
                    g.solved += 1;
                }
                if let Some(p) = r.final_p_gs {
                    g.ps.push(p);
                }
            }
            Err(_) => g.failed += 1,
        }
    }
    groups
        .into_iter()
        .map(|((num_qubits, variant), Acc { instances, solved, failed, ps })| {
            let (mean, var) = if ps.is_empty() {
                (None, None)
            } else {
                let k = ps.len() as f64;
                let mean = ps.iter().sum::<f64>() / k;
                (Some(mean), Some(ps.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / k))
            };
            AggregateRow {
                num_qubits,
                variant,
                instances,
                solved,
                failed,
                mean_p_gs: mean,
                var_p_gs: var,
            }
        })
        .collect()
}
