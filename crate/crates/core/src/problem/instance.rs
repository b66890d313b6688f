use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set-partitioning instance: flights covered by routes.
///
/// `coverage[f]` lists the (sorted, distinct) routes that contain flight `f`,
/// i.e. the nonzero columns of row `f` of the binary matrix `a_{fr}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    #[serde(default)]
    pub name: Option<String>,
    num_routes: usize,
    coverage: Vec<Vec<usize>>,
    costs: Vec<f64>,
    penalties: Vec<f64>,
}

impl ProblemInstance {
    /// Validating constructor. `costs` defaults to zeros and `penalties` to ones.
    pub fn new(
        num_routes: usize,
        coverage: Vec<Vec<usize>>,
        costs: Option<Vec<f64>>,
        penalties: Option<Vec<f64>>,
    ) -> Result<Self> {
        if num_routes == 0 {
            return Err(Error::InvalidInstance("number of routes must be at least 1".into()));
        }
        if coverage.is_empty() {
            return Err(Error::InvalidInstance("number of flights must be at least 1".into()));
        }
        let mut rows = Vec::with_capacity(coverage.len());
        for (f, mut row) in coverage.into_iter().enumerate() {
            row.sort_unstable();
            if row.is_empty() {
                return Err(Error::InvalidInstance(format!("flight {f} has an empty coverage row")));
            }
            if let Some(&r) = row.iter().find(|&&r| r >= num_routes) {
                return Err(Error::InvalidInstance(format!(
                    "flight {f}: route index out of range ({r} >= {num_routes})"
                )));
            }
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInstance(format!("flight {f}: duplicate route index")));
            }
            rows.push(row);
        }
        let costs = costs.unwrap_or_else(|| vec![0.0; num_routes]);
        let penalties = penalties.unwrap_or_else(|| vec![1.0; num_routes]);
        if costs.len() != num_routes {
            return Err(Error::DimensionMismatch { expected: num_routes, actual: costs.len() });
        }
        if penalties.len() != num_routes {
            return Err(Error::DimensionMismatch { expected: num_routes, actual: penalties.len() });
        }
        if costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInstance("costs must be finite".into()));
        }
        if penalties.iter().any(|&m| !(m.is_finite() && m > 0.0)) {
            return Err(Error::InvalidInstance("penalties must be finite and strictly positive".into()));
        }
        Ok(Self { name: None, num_routes, coverage: rows, costs, penalties })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn num_flights(&self) -> usize {
        self.coverage.len()
    }

    pub fn num_routes(&self) -> usize {
        self.num_routes
    }

    pub fn coverage(&self) -> &[Vec<usize>] {
        &self.coverage
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn penalties(&self) -> &[f64] {
        &self.penalties
    }

    /// `a_{fr}`.
    pub fn covers(&self, flight: usize, route: usize) -> bool {
        self.coverage[flight].binary_search(&route).is_ok()
    }

    /// Dense `F x N` 0/1 matrix.
    pub fn coverage_matrix(&self) -> Vec<Vec<u8>> {
        self.coverage
            .iter()
            .map(|row| {
                let mut dense = vec![0u8; self.num_routes];
                for &r in row {
                    dense[r] = 1;
                }
                dense
            })
            .collect()
    }

    /// Replace the penalty vector (e.g. with a tightened bound computed elsewhere).
    pub fn set_penalties(&mut self, penalties: Vec<f64>) -> Result<()> {
        let rebuilt = Self::new(self.num_routes, self.coverage.clone(), Some(self.costs.clone()), Some(penalties))?;
        self.penalties = rebuilt.penalties;
        Ok(())
    }

    /// Conservative uniform penalty `mu = sum_r c_r`, falling back to 1 for
    /// instances without (positive) costs.
    pub fn conservative_penalty(&self) -> f64 {
        let total: f64 = self.costs.iter().map(|c| c.abs()).sum();
        if total > 0.0 {
            total
        } else {
            1.0
        }
    }

    pub fn has_costs(&self) -> bool {
        self.costs.iter().any(|&c| c != 0.0)
    }

    /// Is `selected` (indexed by route) an exact cover?
    pub fn is_exact_cover(&self, selected: &[bool]) -> bool {
        self.coverage.iter().all(|row| row.iter().filter(|&&r| selected[r]).count() == 1)
    }

    /// `sum_r c_r x_r`.
    pub fn objective(&self, selected: &[bool]) -> f64 {
        self.costs.iter().zip(selected).filter(|(_, &s)| s).map(|(c, _)| c).sum()
    }

    /// Serialize to the instance text format accepted by [`parse_instance`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            let _ = writeln!(out, "# {name}");
        }
        let _ = writeln!(out, "{} {}", self.num_flights(), self.num_routes);
        for row in &self.coverage {
            let line: Vec<String> = row.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        if self.has_costs() {
            let _ = writeln!(out, "costs: {}", join_floats(&self.costs));
        }
        if self.penalties.iter().any(|&m| m != 1.0) {
            let _ = writeln!(out, "penalties: {}", join_floats(&self.penalties));
        }
        out
    }
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_vector(line_no: usize, body: &str, expected: usize, what: &str) -> Result<Vec<f64>> {
    let values = body
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(|_| parse_err(line_no, format!("invalid {what} value '{tok}'"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(parse_err(
            line_no,
            format!("dimension mismatch: {what} has {} entries, expected {expected}", values.len()),
        ));
    }
    Ok(values)
}

/// Parse the plain-text instance format.
///
/// ```text
/// # comment lines and blank lines are ignored
/// F N
/// <routes covering flight 0, 0-based, space separated>
/// ...                       (F rows; a row of "-" denotes an empty row)
/// costs: c_0 ... c_{N-1}        (optional)
/// penalties: m_0 ... m_{N-1}    (optional)
/// ```
pub fn parse_instance(text: &str) -> Result<ProblemInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| parse_err(1, "missing header \"F N\""))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(header_line, "malformed header: expected \"F N\""));
    }
    let parse_dim = |tok: &str| {
        tok.parse::<usize>()
            .map_err(|_| parse_err(header_line, format!("malformed header: '{tok}' is not a non-negative integer")))
    };
    let num_flights = parse_dim(dims[0])?;
    let num_routes = parse_dim(dims[1])?;
    if num_flights == 0 || num_routes == 0 {
        return Err(parse_err(header_line, "malformed header: F and N must be at least 1"));
    }

    let mut coverage = Vec::with_capacity(num_flights);
    let mut costs = None;
    let mut penalties = None;
    for (line_no, line) in lines {
        if let Some(body) = line.strip_prefix("costs:") {
            if coverage.len() < num_flights {
                return Err(parse_err(
                    line_no,
                    format!("dimension mismatch: expected {num_flights} flight rows, found {}", coverage.len()),
                ));
            }
            if costs.is_some() {
                return Err(parse_err(line_no, "duplicate costs line"));
            }
            costs = Some(parse_vector(line_no, body, num_routes, "cost")?);
            continue;
        }
        if let Some(body) = line.strip_prefix("penalties:") {
            if coverage.len() < num_flights {
                return Err(parse_err(
                    line_no,
                    format!("dimension mismatch: expected {num_flights} flight rows, found {}", coverage.len()),
                ));
            }
            if penalties.is_some() {
                return Err(parse_err(line_no, "duplicate penalties line"));
            }
            let values = parse_vector(line_no, body, num_routes, "penalty")?;
            if values.iter().any(|&m| !(m.is_finite() && m > 0.0)) {
                return Err(parse_err(line_no, "penalties must be strictly positive"));
            }
            penalties = Some(values);
            continue;
        }
        if coverage.len() == num_flights {
            return Err(parse_err(
                line_no,
                format!("dimension mismatch: more than {num_flights} flight rows"),
            ));
        }
        let flight = coverage.len();
        if line == "-" {
            return Err(parse_err(line_no, format!("flight {flight} has an empty coverage row")));
        }
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let r: usize = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid route index '{tok}'")))?;
            if r >= num_routes {
                return Err(parse_err(
                    line_no,
                    format!("route index out of range: {r} (N = {num_routes})"),
                ));
            }
            if row.contains(&r) {
                return Err(parse_err(line_no, format!("duplicate route index {r}")));
            }
            row.push(r);
        }
        coverage.push(row);
    }
    if coverage.len() != num_flights {
        let last = text.lines().count().max(1);
        return Err(parse_err(
            last,
            format!("dimension mismatch: expected {num_flights} flight rows, found {}", coverage.len()),
        ));
    }
    ProblemInstance::new(num_routes, coverage, costs, penalties)
}
