//! Ingestion of externally formatted instances.
//!
//! `matrix`: one line per flight holding the 0/1 entries `a_fr` for every
//! route, separated by whitespace or commas. An optional line starting with
//! `cost` (e.g. `costs: 3 5 2`) gives the route costs, and one starting with
//! `penalt` the route penalties. `#` starts a comment.
//!
//! `json`: an object with either `"A"` (flights x routes 0/1 matrix) or
//! `"routes"` (per-route flight index lists, with `"num_flights"`), plus
//! optional `"costs"` (alias `"c"`), `"penalties"` (alias `"mu"`) and `"name"`.

use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use qite_core::problem::ProblemInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Matrix,
    Json,
}

impl FromStr for InputFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "matrix" | "csv" => Ok(Self::Matrix),
            "json" => Ok(Self::Json),
            _ => bail!("unknown input format '{s}' (expected matrix or json)"),
        }
    }
}

fn coverage_from_matrix(rows: &[Vec<u8>]) -> Result<(usize, Vec<Vec<usize>>)> {
    let Some(first) = rows.first() else { bail!("matrix has no flight rows") };
    let n = first.len();
    let mut coverage = Vec::with_capacity(rows.len());
    for (f, row) in rows.iter().enumerate() {
        if row.len() != n {
            bail!("flight row {f} has {} entries, expected {n}", row.len());
        }
        coverage.push(row.iter().enumerate().filter(|(_, &v)| v == 1).map(|(r, _)| r).collect());
    }
    Ok((n, coverage))
}

fn parse_numbers(line: &str) -> Result<Vec<f64>> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("invalid number '{t}'")))
        .collect()
}

pub fn convert_matrix(text: &str) -> Result<ProblemInstance> {
    let mut rows = Vec::new();
    let (mut costs, mut penalties) = (None, None);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        let body = |l: &str| l.split_once([':', ',']).map(|(_, b)| b.to_string()).unwrap_or_default();
        if lower.starts_with("cost") {
            costs = Some(parse_numbers(&body(line)).with_context(|| format!("line {}", i + 1))?);
        } else if lower.starts_with("penalt") {
            penalties = Some(parse_numbers(&body(line)).with_context(|| format!("line {}", i + 1))?);
        } else {
            let row = parse_numbers(line).with_context(|| format!("line {}", i + 1))?;
            let row = row
                .into_iter()
                .map(|v| match v {
                    v if v == 0.0 => Ok(0u8),
                    v if v == 1.0 => Ok(1u8),
                    _ => bail!("line {}: coverage entries must be 0 or 1, got {v}", i + 1),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
    }
    let (n, coverage) = coverage_from_matrix(&rows)?;
    Ok(ProblemInstance::new(n, coverage, costs, penalties)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonInstance {
    name: Option<String>,
    #[serde(rename = "A")]
    matrix: Option<Vec<Vec<u8>>>,
    routes: Option<Vec<Vec<usize>>>,
    num_flights: Option<usize>,
    #[serde(alias = "c")]
    costs: Option<Vec<f64>>,
    #[serde(alias = "mu")]
    penalties: Option<Vec<f64>>,
}

pub fn convert_json(text: &str) -> Result<ProblemInstance> {
    let doc: JsonInstance = serde_json::from_str(text).context("parsing JSON instance")?;
    let (n, coverage) = match (doc.matrix, doc.routes) {
        (Some(m), None) => {
            if m.iter().flatten().any(|&v| v > 1) {
                bail!("coverage entries must be 0 or 1");
            }
            coverage_from_matrix(&m)?
        }
        (None, Some(routes)) => {
            let f = doc.num_flights.context("\"routes\" form needs \"num_flights\"")?;
            let mut coverage = vec![Vec::new(); f];
            for (r, flights) in routes.iter().enumerate() {
                for &fl in flights {
                    if fl >= f {
                        bail!("route {r} references flight {fl} >= {f}");
                    }
                    coverage[fl].push(r);
                }
            }
            (routes.len(), coverage)
        }
        _ => bail!("exactly one of \"A\" and \"routes\" is required"),
    };
    let inst = ProblemInstance::new(n, coverage, doc.costs, doc.penalties)?;
    Ok(match doc.name {
        Some(name) => inst.with_name(name),
        None => inst,
    })
}

pub fn convert(text: &str, format: InputFormat) -> Result<ProblemInstance> {
    match format {
        InputFormat::Matrix => convert_matrix(text),
        InputFormat::Json => convert_json(text),
    }
}
