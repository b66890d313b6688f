//! Subcommand implementations. Each returns the process exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use qite_core::hardware::{
    self, crossover_heatmap, fidelity_crossover, fidelity_report, fixtures, heatmap_csv, layer_runtime,
    resource_profile, runtime_crossover, HardwareParams, Implementation, RuntimeModel,
};
use qite_core::problem::{
    build_hamiltonian, generate_instance, ground_states_capped, pivot_ranking, restart_count, GeneratorConfig,
    GeneratorStyle, BRUTE_FORCE_CAP,
};
use qite_core::qite::SHOTS_DEFAULT;

use crate::cli::{Cli, Command, GlobalArgs, HardwareArgs, RunArgs};
use crate::config::{ConfigFile, RunConfig, VariantLabel};
use crate::convert::{convert, InputFormat};
use crate::runner::{instance_id, list_instances, load_instance, record_file_name, run_sweep, solve_instance, ResultRecord};

pub const EXIT_SOLVED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNSOLVED: i32 = 2;

pub const RESOURCES_CSV_HEADER: [&str; 9] = [
    "implementation",
    "n",
    "qubits",
    "cnot_depth",
    "cnot_count",
    "midcircuit_measurements",
    "classical_ops",
    "connectivity",
    "layer_runtime_s",
];
pub const FIDELITY_CSV_HEADER: [&str; 5] = ["implementation", "n", "t_idle", "lambda_total", "fidelity_lower_bound"];

/// Default heatmap axes.
pub const HEATMAP_PROPORTIONS: [f64; 10] = [0.1, 0.2, 0.3, 0.35, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0];
pub const HEATMAP_FEEDBACKS: [f64; 8] = [0.05e-6, 0.1e-6, 0.2e-6, 0.3e-6, 0.4e-6, 0.6e-6, 1e-6, 3e-6];

/// Merge the config document, global flags and run flags.
pub fn resolve_run_config(file: &ConfigFile, global: &GlobalArgs, args: &RunArgs) -> RunConfig {
    let mut cfg = file.run.clone();
    if let Some(s) = global.seed.or(file.seed) {
        cfg.seed = Some(s);
    }
    let shots = global.shots.or(file.shots).or(cfg.shots);
    let sampled = !global.exact && (global.sampled || file.sampled == Some(true) || shots.is_some());
    cfg.shots = sampled.then(|| shots.unwrap_or(SHOTS_DEFAULT));
    if let Some(v) = args.variant {
        cfg.variant = v;
    }
    if let Some(p) = args.pivot {
        cfg.pivot = p;
    }
    if let Some(m) = args.steps {
        cfg.steps = m;
    }
    if let Some(d) = args.dtau {
        cfg.dtau = Some(d);
        cfg.adaptive = false;
    }
    if args.adaptive {
        cfg.dtau = None;
        cfg.adaptive = true;
    }
    if let Some(r) = args.ridge {
        cfg.ridge = r;
    }
    if let Some(o) = args.offset_mode {
        cfg.offset_mode = o;
    }
    if let Some(o) = args.layer_order {
        cfg.layer_order = o;
    }
    if args.early_stop.is_some() {
        cfg.early_stop = args.early_stop;
    }
    if let Some(t) = args.threshold {
        cfg.solved_threshold = t;
    }
    if let Some(p) = args.penalty {
        cfg.penalty = p;
    }
    if let Some(c) = args.brute_force_cap {
        cfg.brute_force_cap = c;
    }
    if args.compression_diagnostics {
        cfg.compression_diagnostics = true;
    }
    cfg
}

/// Fixture then per-field overrides; flags win over the config document.
pub fn resolve_hardware(file: &ConfigFile, args: &HardwareArgs, default_fixture: &str) -> Result<(HardwareParams, u64)> {
    let sec = &file.hardware;
    let name = args.fixture.clone().or_else(|| sec.fixture.clone()).unwrap_or_else(|| default_fixture.to_string());
    let mut hw = fixtures::by_name(&name)?;
    let pick = |flag: Option<f64>, cfg: Option<f64>, slot: &mut f64| {
        if let Some(v) = flag.or(cfg) {
            *slot = v;
        }
    };
    pick(args.t_cnot, sec.t_cnot, &mut hw.t_cnot);
    pick(args.t_measure, sec.t_measure, &mut hw.t_measure);
    pick(args.t_feedback, sec.t_feedback, &mut hw.t_feedback);
    pick(args.lambda_cnot, sec.lambda_cnot, &mut hw.lambda_cnot);
    pick(args.lambda_meas, sec.lambda_meas, &mut hw.lambda_meas);
    pick(args.lambda_idle, sec.lambda_idle, &mut hw.lambda_idle);
    hw.validate()?;
    let n_max = args.n_max.or(sec.n_max).unwrap_or(*hardware::CROSSOVER_RANGE.end());
    if n_max < 2 {
        bail!("n-max must be at least 2");
    }
    Ok((hw, n_max))
}

fn write_or_print(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?)
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    let file = match &cli.global.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let g = &cli.global;
    let out = g.out.clone().or_else(|| file.out.clone());
    let threads = g.threads.or(file.threads);
    match cli.command {
        Command::Solve { instance, run, replay } => {
            let cfg = match replay {
                Some(p) => {
                    let text = fs::read_to_string(&p).with_context(|| format!("reading record {}", p.display()))?;
                    serde_json::from_str::<ResultRecord>(&text).context("parsing record")?.config
                }
                None => resolve_run_config(&file, g, &run),
            };
            let id = instance_id(&instance);
            let inst = load_instance(&instance)?;
            let record = solve_instance(&inst, &id, &cfg)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("results"));
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(record_file_name(&id, cfg.variant, cfg.seed));
            fs::write(&path, serde_json::to_string_pretty(&record)?)?;
            let p = record.final_p_gs.map(|p| format!("{p:.6}")).unwrap_or_else(|| "n/a".into());
            writeln!(
                stdout,
                "{id}: N={} variant={} pivot={} dtau={} steps={} energy={:.6} p_gs={p} -> {}",
                record.num_qubits,
                cfg.variant,
                record.pivot.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
                record.trace.dtau,
                record.trace.steps.len(),
                record.trace.final_energy(),
                path.display()
            )?;
            Ok(if record.solved == Some(true) { EXIT_SOLVED } else { EXIT_UNSOLVED })
        }
        Command::Sweep { dir, run, variants } => {
            let cfg = resolve_run_config(&file, g, &run);
            let variants = variants.or_else(|| file.sweep.variants.clone()).unwrap_or_else(|| VariantLabel::SWEEP_DEFAULT.to_vec());
            let out = out.unwrap_or_else(|| PathBuf::from("sweep"));
            let res = run_sweep(&dir, &cfg, &variants, &out, threads)?;
            for r in &res.aggregate {
                writeln!(
                    stdout,
                    "N={:<3} {:<14} instances={} solved={} failed={} mean_p_gs={} var_p_gs={}",
                    r.num_qubits,
                    r.variant.name(),
                    r.instances,
                    r.solved,
                    r.failed,
                    r.mean_p_gs.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into()),
                    r.var_p_gs.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into()),
                )?;
            }
            writeln!(stdout, "aggregate: {}", res.aggregate_path.display())?;
            Ok(EXIT_SOLVED)
        }
        Command::Resources { n, hw } => {
            let (params, n_max) = resolve_hardware(&file, &hw, "quoted")?;
            let model = RuntimeModel::default();
            let mut rows = Vec::new();
            for &size in &n {
                for imp in Implementation::ALL {
                    let p = resource_profile(imp, size)?;
                    rows.push(vec![
                        imp.to_string(),
                        size.to_string(),
                        p.qubits.to_string(),
                        p.cnot_depth.to_string(),
                        p.cnot_count.to_string(),
                        p.midcircuit_measurements.to_string(),
                        p.classical_ops.to_string(),
                        format!("{:?}", p.connectivity).to_ascii_lowercase(),
                        format!("{:e}", layer_runtime(imp, size, &params, &model)),
                    ]);
                }
            }
            let text = csv_string(&RESOURCES_CSV_HEADER, &rows)?;
            if out.is_some() {
                write_or_print(out.as_deref(), &text, stdout)?;
            }
            writeln!(stdout, "{:<15} {:>5} {:>7} {:>10} {:>10} {:>6} {:>10} {:>12}", "implementation", "N", "qubits", "cnot_depth", "cnot_count", "meas", "classical", "runtime_s")?;
            for r in &rows {
                writeln!(stdout, "{:<15} {:>5} {:>7} {:>10} {:>10} {:>6} {:>10} {:>12}", r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[8])?;
            }
            for imp in [Implementation::Dynamic, Implementation::SemiClassical] {
                let c = runtime_crossover(imp, &params, &model, 2..=n_max);
                writeln!(stdout, "runtime crossover {imp}: {}", c.map(|n| n.to_string()).unwrap_or_else(|| "none".into()))?;
            }
            Ok(EXIT_SOLVED)
        }
        Command::Fidelity { hw, n } => {
            let (params, n_max) = resolve_hardware(&file, &hw, "baseline")?;
            writeln!(
                stdout,
                "t_cnot={:e} t_measure={:e} t_feedback={:e} lambda_cnot={:e} lambda_meas={:e} lambda_idle={:e}",
                params.t_cnot, params.t_measure, params.t_feedback, params.lambda_cnot, params.lambda_meas, params.lambda_idle
            )?;
            match fidelity_crossover(&params, 2..=n_max)? {
                Some(c) => writeln!(stdout, "crossover N*={} bound={:.4} unitary_bound={:.4}", c.n, c.bound, c.unitary_bound)?,
                None => writeln!(stdout, "crossover N*=none (searched 2..={n_max})")?,
            }
            let sizes: Vec<u64> = if n.is_empty() { (2..=n_max).collect() } else { n.clone() };
            let mut rows = Vec::new();
            for &size in &sizes {
                for imp in Implementation::ALL {
                    let r = fidelity_report(imp, size, &params)?;
                    rows.push(vec![
                        imp.to_string(),
                        size.to_string(),
                        r.t_idle.to_string(),
                        r.lambda_total.to_string(),
                        r.fidelity_lower_bound.to_string(),
                    ]);
                }
            }
            if !n.is_empty() {
                for r in &rows {
                    writeln!(stdout, "{:<15} N={:<4} lambda={:.6} bound={:.6}", r[0], r[1], r[3].parse::<f64>()?, r[4].parse::<f64>()?)?;
                }
            }
            if out.is_some() {
                write_or_print(out.as_deref(), &csv_string(&FIDELITY_CSV_HEADER, &rows)?, stdout)?;
            }
            Ok(EXIT_SOLVED)
        }
        Command::Heatmap { hw, proportions, feedbacks } => {
            let (params, n_max) = resolve_hardware(&file, &hw, "baseline")?;
            let props = proportions.or_else(|| file.heatmap.proportions.clone()).unwrap_or_else(|| HEATMAP_PROPORTIONS.to_vec());
            let fbs = feedbacks.or_else(|| file.heatmap.feedbacks.clone()).unwrap_or_else(|| HEATMAP_FEEDBACKS.to_vec());
            let rows = crossover_heatmap(&params, &props, &fbs, 2..=n_max)?;
            write_or_print(out.as_deref(), &heatmap_csv(&rows)?, stdout)?;
            Ok(EXIT_SOLVED)
        }
        Command::Pivot { paths, brute_force_cap } => {
            let cap = brute_force_cap.or(Some(file.run.brute_force_cap)).unwrap_or(BRUTE_FORCE_CAP);
            let mut files = Vec::new();
            for p in &paths {
                if p.is_dir() {
                    files.extend(list_instances(p)?);
                } else {
                    files.push(p.clone());
                }
            }
            let mut restarts = Vec::new();
            for f in &files {
                let inst = load_instance(f)?;
                let ranking = pivot_ranking(&inst);
                let h = build_hamiltonian(&inst);
                let r = if h.num_qubits() <= cap {
                    let gs = ground_states_capped(&h, cap)?;
                    restart_count(&ranking, &gs).ok()
                } else {
                    None
                };
                if let Some(r) = r {
                    restarts.push(r);
                }
                let w: Vec<String> = ranking.order.iter().map(|&k| format!("{:.3}", ranking.weights[k])).collect();
                writeln!(
                    stdout,
                    "{}: ranking {:?} weights [{}] restarts {}",
                    instance_id(f),
                    ranking.order,
                    w.join(", "),
                    r.map(|r| r.to_string()).unwrap_or_else(|| "n/a".into())
                )?;
            }
            if files.len() > 1 && !restarts.is_empty() {
                let mean = restarts.iter().sum::<usize>() as f64 / restarts.len() as f64;
                let worst = restarts.iter().max().copied().unwrap_or(0);
                writeln!(stdout, "mean restarts {mean:.3} over {} instances, worst {worst}", restarts.len())?;
            }
            Ok(EXIT_SOLVED)
        }
        Command::Convert { input, format, name } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let mut inst = convert(&text, format.parse::<InputFormat>()?)?;
            if let Some(n) = name {
                inst = inst.with_name(n);
            }
            write_or_print(out.as_deref(), &inst.to_text(), stdout)?;
            Ok(EXIT_SOLVED)
        }
        Command::Generate { style, routes, flights, planted, cost_max, unique, name } => {
            let seed = g.seed.or(file.seed).unwrap_or(0);
            let mut cfg = match style.as_str() {
                "tail" => GeneratorConfig::tail_assignment(routes, seed),
                "sparse" => GeneratorConfig::sparse(routes, seed),
                _ => bail!("unknown style '{style}' (expected tail or sparse)"),
            };
            if let Some(f) = flights {
                cfg.num_flights = f;
                if let GeneratorStyle::RandomSubsets { max_size, .. } = &mut cfg.style {
                    *max_size = (*max_size).min(f);
                }
            }
            if let Some(p) = planted {
                cfg.planted_routes = p;
            }
            cfg.cost_max = cost_max;
            cfg.unique = unique;
            let name = name.unwrap_or_else(|| format!("{style} n={routes} seed={seed}"));
            let inst = generate_instance(&cfg)?.with_name(name);
            write_or_print(out.as_deref(), &inst.to_text(), stdout)?;
            Ok(EXIT_SOLVED)
        }
    }
}
