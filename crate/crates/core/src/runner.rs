//! Sweeps over families and over the positivity domain, run in parallel and
//! reported in a fixed order.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{self, expand, FamilyInfo, Level, ParamRange};
use crate::error::{QError, Result};
use crate::gsum::{g_eval, GParams};
use crate::positivity::{boundary_cells, check_nonneg, enumerate_bounds, ScanBounds, Verdict};
use crate::record::{FamilyParams, Status, VerificationRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub level: Level,
    /// Overrides the grid truncation of series families.
    pub trunc: Option<usize>,
    pub jobs: usize,
    pub format: Format,
    pub resume: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            level: Level::Smoke,
            trunc: None,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            format: Format::Text,
            resume: None,
        }
    }
}

impl RunConfig {
    pub fn check(&self) -> Result<()> {
        if self.trunc == Some(0) {
            return Err(QError::InvalidParams("truncation must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(QError::InvalidParams("need at least one job".into()));
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| QError::InvalidParams(e.to_string()))
    }
}

/// One verification to run.
#[derive(Debug, Clone)]
pub struct Task<'a> {
    pub family: &'a FamilyInfo,
    pub params: FamilyParams,
    pub trunc: usize,
}

/// Tasks for one family over explicit ranges. Ranges are applied in schema
/// order so bounds like `i=1..v` resolve. With no ranges the family's grid at
/// `level` is used. Out-of-constraint tuples are an error, not a verdict.
pub fn plan_family<'a>(
    f: &'a FamilyInfo,
    ranges: &[ParamRange],
    level: Level,
    trunc: Option<usize>,
) -> Result<Vec<Task<'a>>> {
    let gr = catalog::grid(f, level);
    let t = trunc.unwrap_or(if gr.trunc > 0 { gr.trunc } else { catalog::DEFAULT_TRUNCATION });
    let params = if ranges.is_empty() {
        gr.params
    } else {
        if let Some(r) = ranges.iter().find(|r| !f.param_names().any(|n| n == r.name)) {
            return Err(QError::InvalidParams(format!("{} takes no parameter {}", f.id, r.name)));
        }
        let mut ordered = Vec::new();
        for n in f.param_names() {
            let r = ranges
                .iter()
                .find(|r| r.name == n)
                .ok_or_else(|| QError::InvalidParams(format!("{} needs a range for {n}", f.id)))?;
            ordered.push(r.clone());
        }
        let ps = expand(&ordered)?;
        for p in &ps {
            f.validate(p)?;
        }
        ps
    };
    Ok(params.into_iter().map(|params| Task { family: f, params, trunc: t }).collect())
}

/// Every family over its grid, in registry order.
pub fn plan_all(families: &[FamilyInfo], level: Level, trunc: Option<usize>) -> Vec<Task<'_>> {
    families
        .iter()
        .flat_map(|f| plan_family(f, &[], level, trunc).expect("grids satisfy their own constraints"))
        .collect()
}

/// Runs the tasks on `jobs` threads; results come back in task order.
pub fn run(tasks: &[Task<'_>], cfg: &RunConfig) -> Result<Vec<VerificationRecord>> {
    cfg.check()?;
    Ok(cfg.pool()?.install(|| {
        tasks.par_iter().map(|t| catalog::verify_family(t.family, &t.params, t.trunc)).collect()
    }))
}

/// 0 when everything passed, 3 on any engine error, 1 otherwise.
pub fn exit_code(records: &[VerificationRecord]) -> i32 {
    if records.iter().any(|r| r.status == Status::Error) {
        3
    } else if records.iter().all(|r| r.passed()) {
        0
    } else {
        1
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    family: &'a str,
    params: String,
    status: String,
    first_mismatch: Option<i64>,
    lhs_coeff: Option<&'a str>,
    rhs_coeff: Option<&'a str>,
    truncation: Option<usize>,
    elapsed_ms: f64,
}

fn text_line(r: &VerificationRecord) -> String {
    let mut s = format!("{:<14} {:<28} {}", r.family, r.params.to_string(), r.status);
    if let Some(e) = r.first_mismatch {
        s += &format!(" at q^{e}");
        if let Some(c) = &r.lhs_coeff {
            s += &format!(" lhs={c}");
        }
        if let Some(c) = &r.rhs_coeff {
            s += &format!(" rhs={c}");
        }
    }
    if let Some(t) = r.truncation {
        s += &format!(" T={t}");
    }
    if let Some(d) = &r.detail {
        s += &format!(" ({d})");
    }
    s
}

/// Renders records. Text ends with a summary line.
pub fn render(records: &[VerificationRecord], format: Format) -> Result<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(records).map(|s| s + "\n").map_err(|e| QError::Report(e.to_string())),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in records {
                w.serialize(CsvRow {
                    family: &r.family,
                    params: r.params.to_string(),
                    status: r.status.to_string(),
                    first_mismatch: r.first_mismatch,
                    lhs_coeff: r.lhs_coeff.as_deref(),
                    rhs_coeff: r.rhs_coeff.as_deref(),
                    truncation: r.truncation,
                    elapsed_ms: r.elapsed_ms,
                })
                .map_err(|e| QError::Report(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| QError::Report(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| QError::Report(e.to_string()))
        }
        Format::Text => {
            let mut out = String::new();
            for r in records {
                out += &text_line(r);
                out.push('\n');
            }
            let pass = records.iter().filter(|r| r.passed()).count();
            out += &format!("{pass}/{} passed\n", records.len());
            Ok(out)
        }
    }
}

/// A cell with its outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    #[serde(rename = "K")]
    pub k: i64,
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "M")]
    pub m: i64,
    #[serde(rename = "alphaK")]
    pub alpha_k: i64,
    #[serde(rename = "betaK")]
    pub beta_k: i64,
    pub exponent: Option<i64>,
    pub value: Option<String>,
}

impl CellResult {
    fn new(p: &GParams, v: &Verdict) -> Self {
        let (exponent, value) = match v {
            Verdict::NonNegative => (None, None),
            Verdict::Negative { exponent, value } => (Some(*exponent), Some(value.to_string())),
        };
        CellResult { k: p.k, n: p.n, m: p.m, alpha_k: p.alpha_k, beta_k: p.beta_k, exponent, value }
    }

    pub fn params(&self) -> GParams {
        GParams::new(self.n, self.m, self.alpha_k, self.beta_k, self.k)
    }

    pub fn is_negative(&self) -> bool {
        self.exponent.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ScanReport {
    /// domain cells within the bounds
    pub cells: usize,
    /// cells taken from the checkpoint
    pub resumed: usize,
    /// cells evaluated in this run
    pub checked: usize,
    pub violations: Vec<CellResult>,
    /// `K = 2` cells excluded only by strictness, with their own outcome
    pub boundary: Vec<CellResult>,
}

impl ScanReport {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| QError::Report(e.to_string())),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for (kind, list) in [("violation", &self.violations), ("boundary", &self.boundary)] {
                    for c in list {
                        w.serialize((kind, c.k, c.n, c.m, c.alpha_k, c.beta_k, c.exponent, c.value.as_deref()))
                            .map_err(|e| QError::Report(e.to_string()))?;
                    }
                }
                let bytes = w.into_inner().map_err(|e| QError::Report(e.to_string()))?;
                let body = String::from_utf8(bytes).map_err(|e| QError::Report(e.to_string()))?;
                Ok(format!("kind,K,N,M,alphaK,betaK,exponent,value\n{body}"))
            }
            Format::Text => {
                let mut out = String::new();
                for c in &self.violations {
                    out += &format!(
                        "VIOLATION {} at q^{} coefficient {}\n",
                        c.params(),
                        c.exponent.unwrap_or_default(),
                        c.value.as_deref().unwrap_or("")
                    );
                }
                let neg_boundary = self.boundary.iter().filter(|c| c.is_negative()).count();
                out += &format!(
                    "{} cells ({} resumed, {} checked), {} violations; {} boundary cells at K=2, {} with a negative coefficient\n",
                    self.cells,
                    self.resumed,
                    self.checked,
                    self.violations.len(),
                    self.boundary.len(),
                    neg_boundary
                );
                Ok(out)
            }
        }
    }
}

fn verdict_token(v: &Verdict) -> String {
    match v {
        Verdict::NonNegative => "NonNegative".into(),
        Verdict::Negative { exponent, value } => format!("NegativeCoefficient@{exponent}:{value}"),
    }
}

fn parse_token(tok: &str, line: usize) -> Result<Verdict> {
    let bad = |msg: &str| QError::Checkpoint { line, msg: msg.to_string() };
    if tok == "NonNegative" {
        return Ok(Verdict::NonNegative);
    }
    let rest = tok.strip_prefix("NegativeCoefficient@").ok_or_else(|| bad("unknown verdict"))?;
    let (e, v) = rest.split_once(':').ok_or_else(|| bad("verdict needs exponent:value"))?;
    Ok(Verdict::Negative {
        exponent: e.parse().map_err(|_| bad("bad exponent"))?,
        value: v.parse().map_err(|_| bad("bad value"))?,
    })
}

/// Reads `K N M alphaK betaK verdict` lines.
pub fn read_checkpoint(path: &Path) -> Result<HashMap<GParams, Verdict>> {
    let mut done = HashMap::new();
    if !path.exists() {
        return Ok(done);
    }
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        if f.len() != 6 {
            return Err(QError::Checkpoint { line: i + 1, msg: format!("expected 6 fields, got {}", f.len()) });
        }
        let mut n = [0i64; 5];
        for (slot, s) in n.iter_mut().zip(&f) {
            *slot = s.parse().map_err(|_| QError::Checkpoint { line: i + 1, msg: format!("bad integer {s}") })?;
        }
        done.insert(GParams::new(n[1], n[2], n[3], n[4], n[0]), parse_token(f[5], i + 1)?);
    }
    Ok(done)
}

fn eval_cell(p: &GParams) -> Result<Verdict> {
    g_eval(p).map(|x| check_nonneg(&x))
}

/// Cells per checkpoint flush.
const CHUNK: usize = 2048;

/// Checks every domain cell and the `K = 2` boundary cells. With a checkpoint
/// path, completed cells are read from it and new ones appended as they finish.
pub fn scan(bounds: ScanBounds, cfg: &RunConfig) -> Result<ScanReport> {
    cfg.check()?;
    let pool = cfg.pool()?;
    let done = match &cfg.resume {
        Some(p) => read_checkpoint(p)?,
        None => HashMap::new(),
    };
    let mut ckpt = match &cfg.resume {
        Some(p) => Some(OpenOptions::new().create(true).append(true).open(p)?),
        None => None,
    };
    let mut report = ScanReport::default();
    let cells: Vec<GParams> = enumerate_bounds(bounds).collect();
    report.cells = cells.len();
    let todo: Vec<GParams> = cells.iter().filter(|c| !done.contains_key(*c)).copied().collect();
    report.resumed = cells.len() - todo.len();
    let mut results: HashMap<GParams, Verdict> = HashMap::new();
    for chunk in todo.chunks(CHUNK) {
        let out: Vec<Result<Verdict>> = pool.install(|| chunk.par_iter().map(eval_cell).collect());
        let mut lines = String::new();
        for (c, v) in chunk.iter().zip(out) {
            let v = v?;
            lines += &format!("{} {} {} {} {} {}\n", c.k, c.n, c.m, c.alpha_k, c.beta_k, verdict_token(&v));
            results.insert(*c, v);
        }
        if let Some(f) = ckpt.as_mut() {
            f.write_all(lines.as_bytes())?;
            f.flush()?;
        }
        report.checked += chunk.len();
    }
    for c in &cells {
        let v = results.get(c).or_else(|| done.get(c)).expect("every cell resolved");
        if matches!(v, Verdict::Negative { .. }) {
            report.violations.push(CellResult::new(c, v));
        }
    }
    let edge: Vec<GParams> = boundary_cells(bounds).collect();
    let out: Vec<Result<Verdict>> = pool.install(|| edge.par_iter().map(eval_cell).collect());
    for (c, v) in edge.iter().zip(out) {
        report.boundary.push(CellResult::new(c, &v?));
    }
    Ok(report)
}
