//! Command-line front end for `colsel`: CSV matrix ingestion, subcommand
//! dispatch and JSON reports.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use colsel::oracle::brute_force;
use colsel::{greedy_select, verify_bound, DenseMatrix, SelectionProblem, SelectionReport, DEFAULT_EPS};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: line {line}: {message}")]
    Format {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Library(#[from] colsel::Error),

    #[error("writing report: {0}")]
    Output(String),
}

impl CliError {
    /// 1 for bad input, 2 when the algorithm itself gave up.
    pub fn exit_code(&self) -> i32 {
        use colsel::Error::*;
        match self {
            CliError::Library(DeflationFailure { .. } | NotRealRooted | AlgorithmFailure { .. }) => 2,
            CliError::Output(_) => 2,
            _ => 1,
        }
    }
}

/// Reads a headerless CSV of decimal numbers into a matrix.
pub fn parse_matrix_csv(path: &Path) -> Result<DenseMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix_str(&text, &path.display().to_string())
}

/// Same as [`parse_matrix_csv`] on in-memory text; `name` labels errors.
pub fn parse_matrix_str(text: &str, name: &str) -> Result<DenseMatrix, CliError> {
    let format_err = |line: u64, message: String| CliError::Format {
        path: name.to_string(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut cols = None;
    let mut rows = 0;
    let mut data = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            format_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let width = *cols.get_or_insert(record.len());
        if record.len() != width {
            return Err(format_err(
                line,
                format!("expected {width} values, found {}", record.len()),
            ));
        }
        for token in record.iter() {
            let value: f64 = token
                .parse()
                .map_err(|_| format_err(line, format!("cannot parse {token:?} as a number")))?;
            if !value.is_finite() {
                return Err(format_err(line, format!("non-finite value {token:?}")));
            }
            data.push(value);
        }
        rows += 1;
    }
    let Some(cols) = cols else {
        return Err(format_err(1, "no rows".into()));
    };
    Ok(DenseMatrix::new(rows, cols, data)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "colsel", version, about = "Deterministic column subset selection")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Matrices {
    /// CSV file with the candidate columns B
    #[arg(long = "b", value_name = "B.csv")]
    pub path_b: PathBuf,

    /// CSV file with the fixed block A (same number of rows as B)
    #[arg(long = "a", value_name = "A.csv")]
    pub path_a: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Greedily pick k columns of B
    Select {
        #[command(flatten)]
        matrices: Matrices,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Write the JSON report here instead of stdout
        #[arg(long = "out", value_name = "R.json")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check a given subset against the guaranteed bound
    Verify {
        #[command(flatten)]
        matrices: Matrices,
        /// Comma-separated 0-based column indices of B
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Enumerate every subset and compare with the greedy choice
    Oracle {
        #[command(flatten)]
        matrices: Matrices,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print the approximation factor Γ(m, n, k, r)
    Gamma {
        #[arg(short)]
        m: usize,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        #[arg(short)]
        r: usize,
    },
}

fn load_problem(matrices: &Matrices, k: usize, eps: f64) -> Result<SelectionProblem, CliError> {
    let b = parse_matrix_csv(&matrices.path_b)?;
    let prob = match &matrices.path_a {
        Some(path) => SelectionProblem::new(parse_matrix_csv(path)?, b, k, eps)?,
        None => SelectionProblem::without_fixed(b, k, eps)?,
    };
    Ok(prob)
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(|e| CliError::Output(e.to_string()))
}

/// Oracle comparison as printed by `colsel oracle`.
#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub subsets: usize,
    pub best_subset_frob: Vec<usize>,
    pub best_frob_sq: f64,
    pub best_subset_spec: Vec<usize>,
    pub best_spec_sq: f64,
    pub greedy_subset: Vec<usize>,
    pub greedy_frob_sq: f64,
    pub greedy_spec_sq: f64,
    pub bound: f64,
}

fn report_text(r: &SelectionReport) -> String {
    let mut s = format!("subset: {:?}\n", r.subset);
    s += &format!("frob_sq: {} (baseline {})\n", r.frob_sq, r.baseline_frob_sq);
    s += &format!("spec_sq: {} (baseline {})\n", r.spec_sq, r.baseline_spec_sq);
    s += &format!("gamma: {}  bound_factor: {}  eps: {}\n", r.gamma, r.bound_factor, r.eps);
    for (step, t) in r.trace.iter().enumerate() {
        s += &format!("step {step}: column {} lambda_min {}\n", t.index, t.lambda_min);
    }
    s.pop();
    s
}

/// Executes one subcommand, writing its result to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    match &config.command {
        Command::Select {
            matrices,
            k,
            eps,
            output,
            format,
        } => {
            let prob = load_problem(matrices, *k, *eps)?;
            let report = greedy_select(&prob)?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            let body = match format {
                Format::Json => json(&report)?,
                Format::Text => report_text(&report),
            };
            match output {
                Some(path) => fs::write(path, body + "\n").map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?,
                None => emit(out, &body)?,
            }
        }
        Command::Verify {
            matrices,
            subset,
            eps,
            format,
        } => {
            let prob = load_problem(matrices, subset.len(), *eps)?;
            let check = verify_bound(&prob, subset, true)?;
            let body = match format {
                Format::Json => json(&check)?,
                Format::Text => format!(
                    "holds: {}\nratio_frob: {}\nratio_spec: {}\nbound: {}",
                    check.holds, check.ratio_frob, check.ratio_spec, check.bound
                ),
            };
            emit(out, &body)?;
        }
        Command::Oracle {
            matrices,
            k,
            eps,
            format,
        } => {
            let prob = load_problem(matrices, *k, *eps)?;
            let best = brute_force(&prob)?;
            let greedy = greedy_select(&prob)?;
            let summary = OracleSummary {
                subsets: best.all_values.len(),
                best_subset_frob: best.best_subset_frob,
                best_frob_sq: best.best_frob_sq,
                best_subset_spec: best.best_subset_spec,
                best_spec_sq: best.best_spec_sq,
                greedy_subset: greedy.subset,
                greedy_frob_sq: greedy.frob_sq,
                greedy_spec_sq: greedy.spec_sq,
                bound: greedy.bound_factor,
            };
            let body = match format {
                Format::Json => json(&summary)?,
                Format::Text => format!(
                    "subsets enumerated: {}\n\
                     optimum frob_sq: {} at {:?}\n\
                     optimum spec_sq: {} at {:?}\n\
                     greedy {:?}: frob_sq {} ({:.4}x optimum), spec_sq {} ({:.4}x optimum)",
                    summary.subsets,
                    summary.best_frob_sq,
                    summary.best_subset_frob,
                    summary.best_spec_sq,
                    summary.best_subset_spec,
                    summary.greedy_subset,
                    summary.greedy_frob_sq,
                    summary.greedy_frob_sq / summary.best_frob_sq,
                    summary.greedy_spec_sq,
                    summary.greedy_spec_sq / summary.best_spec_sq,
                ),
            };
            emit(out, &body)?;
        }
        Command::Gamma { m, n, k, r } => {
            let g = colsel::gamma(*m, *n, *k, *r)?;
            emit(out, &format!("{g:?}"))?;
        }
    }
    Ok(())
}
