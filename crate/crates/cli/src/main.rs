use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use qverify_core::catalog::{self, ParamRange};
use qverify_core::positivity::ScanBounds;
use qverify_core::qexpr;
use qverify_core::runner::{self, Format, RunConfig};
use qverify_core::QError;

/// Verify q-binomial identities and positivity of alternating sums.
#[derive(Parser, Debug)]
#[command(name = "qverify", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List registered families and their parameters.
    Families {
        #[arg(long)]
        json: bool,
    },
    /// Verify one family over parameter ranges, e.g. `--v 2..3 --i 1..v --L 0..8`.
    Verify(VerifyArgs),
    /// Verify every family over its grid.
    VerifyAll(CommonArgs),
    /// Check the admissible domain for negative coefficients.
    Scan(ScanArgs),
    /// Print the coefficients of an expression up to q^T.
    Series {
        expr: String,
        #[arg(long, default_value_t = catalog::DEFAULT_TRUNCATION)]
        truncate: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Truncation order for series families; defaults to the grid's.
    #[arg(long)]
    truncate: Option<usize>,
    #[arg(long, default_value = "smoke", value_parser = ["smoke", "full"])]
    level: String,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    family: String,
    #[command(flatten)]
    common: CommonArgs,
    /// `NAME=RANGE`; `--NAME RANGE` is accepted as shorthand.
    #[arg(long = "param", value_name = "NAME=RANGE")]
    params: Vec<String>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long = "K", default_value = "1..4")]
    k: String,
    #[arg(long = "N", default_value = "0..8")]
    n: String,
    #[arg(long = "M", default_value = "0..8")]
    m: String,
    /// Checkpoint file, created if missing.
    #[arg(long)]
    resume: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

enum Failure {
    Usage(String),
    Engine(String),
}

impl From<QError> for Failure {
    fn from(e: QError) -> Self {
        match e {
            QError::NotFound(_)
            | QError::InvalidParams(_)
            | QError::InvalidTag(_)
            | QError::Syntax(_)
            | QError::Checkpoint { .. }
            | QError::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Engine(e.to_string()),
        }
    }
}

fn format(json: bool, csv: bool) -> Format {
    if json {
        Format::Json
    } else if csv {
        Format::Csv
    } else {
        Format::Text
    }
}

fn config(c: &CommonArgs) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig {
        level: c.level.parse()?,
        trunc: c.truncate,
        format: format(c.json, c.csv),
        ..RunConfig::default()
    };
    if let Some(j) = c.jobs {
        cfg.jobs = j;
    }
    cfg.check()?;
    Ok(cfg)
}

/// Rewrites `verify ... --v 2..3` into `--param v=2..3` for names clap does not know.
fn desugar(args: Vec<OsString>) -> Vec<OsString> {
    let Some(pos) = args.iter().position(|a| a == "verify") else {
        return args;
    };
    let cmd = Cli::command();
    let known: Vec<String> = cmd
        .find_subcommand("verify")
        .map(|s| s.get_arguments().filter_map(|a| a.get_long().map(str::to_string)).collect())
        .unwrap_or_default();
    let mut out: Vec<OsString> = args[..=pos].to_vec();
    let mut it = args[pos + 1..].iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        match s.strip_prefix("--") {
            Some(name) if !name.is_empty() && !name.contains('=') && !known.iter().any(|k| k == name) && name != "help" => {
                match it.next() {
                    Some(v) => {
                        out.push("--param".into());
                        out.push(format!("{name}={}", v.to_string_lossy()).into());
                    }
                    None => out.push(a.clone()),
                }
            }
            _ => out.push(a.clone()),
        }
    }
    out
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error worth reporting
    let _ = out.write_all(text.as_bytes());
}

fn plain_range(name: &str, text: &str) -> Result<(i64, i64), Failure> {
    let r = ParamRange::parse(name, text)?;
    match (r.lo.param.is_none(), r.hi.param.is_none()) {
        (true, true) => Ok((r.lo.offset, r.hi.offset)),
        _ => Err(Failure::Usage(format!("--{name} needs integer bounds"))),
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.cmd {
        Cmd::Families { json } => {
            let reg = catalog::registry();
            if json {
                emit(&(serde_json::to_string_pretty(reg).map_err(|e| Failure::Engine(e.to_string()))? + "\n"));
            } else {
                let mut s = String::new();
                for f in reg {
                    let ps: Vec<String> = f.params.iter().map(|p| p.to_string()).collect();
                    s += &format!("{:<18} {:<10} {:<40} {}\n", f.id, f.kind, ps.join(", "), f.tag);
                }
                emit(&s);
            }
            Ok(0)
        }
        Cmd::Verify(a) => {
            let cfg = config(&a.common)?;
            let f = catalog::lookup(&a.family)?;
            let ranges = a
                .params
                .iter()
                .map(|s| {
                    let (n, r) = s.split_once('=').ok_or_else(|| Failure::Usage(format!("expected NAME=RANGE, got {s}")))?;
                    Ok(ParamRange::parse(n, r)?)
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let trunc = cfg.trunc.or(Some(catalog::DEFAULT_TRUNCATION));
            let tasks = runner::plan_family(f, &ranges, cfg.level, trunc)?;
            let recs = runner::run(&tasks, &cfg)?;
            emit(&runner::render(&recs, cfg.format)?);
            Ok(runner::exit_code(&recs))
        }
        Cmd::VerifyAll(c) => {
            let cfg = config(&c)?;
            let tasks = runner::plan_all(catalog::registry(), cfg.level, cfg.trunc);
            let recs = runner::run(&tasks, &cfg)?;
            emit(&runner::render(&recs, cfg.format)?);
            Ok(runner::exit_code(&recs))
        }
        Cmd::Scan(s) => {
            let bounds = ScanBounds { k: plain_range("K", &s.k)?, n: plain_range("N", &s.n)?, m: plain_range("M", &s.m)? };
            if bounds.n.0 < 0 || bounds.m.0 < 0 || bounds.k.0 < 0 {
                return Err(Failure::Usage("scan bounds must be nonnegative".into()));
            }
            let mut cfg = RunConfig { format: format(s.json, s.csv), resume: s.resume, ..RunConfig::default() };
            if let Some(j) = s.jobs {
                cfg.jobs = j;
            }
            let report = runner::scan(bounds, &cfg)?;
            emit(&report.render(cfg.format)?);
            Ok(report.exit_code())
        }
        Cmd::Series { expr, truncate, json } => {
            if truncate == 0 {
                return Err(Failure::Usage("truncation must be at least 1".into()));
            }
            let ast = qexpr::parse(&expr).map_err(|e| Failure::Usage(e.to_string()))?;
            let s = qexpr::eval_expr(&ast, truncate)?;
            let coeffs: Vec<String> = s.coeffs().iter().map(|c| c.to_string()).collect();
            if json {
                let rows: Vec<(usize, &str)> = coeffs.iter().enumerate().map(|(e, c)| (e, c.as_str())).collect();
                emit(&(serde_json::to_string(&rows).map_err(|e| Failure::Engine(e.to_string()))? + "\n"));
            } else {
                let body: String = coeffs.iter().enumerate().map(|(e, c)| format!("{e} {c}\n")).collect();
                emit(&body);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(desugar(std::env::args_os().collect())) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Engine(m)) => {
            eprintln!("engine error: {m}");
            ExitCode::from(3)
        }
    }
}
