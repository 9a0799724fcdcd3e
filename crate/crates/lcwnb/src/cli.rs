//! The `lcwnb` command line: `preprocess`, `evaluate` and `compare`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lcwnb_core::eval::{AccuracyMatrix, EvalResult};

use crate::arff::write_arff;
use crate::csv_input::CsvOptions;
use crate::error::{Error, Result};
use crate::formats::{read_characteristics, read_folds_tsv, read_matrix_tsv, switching_column, write_folds_tsv, write_matrix_tsv};
use crate::harness::{evaluate, load_dataset, parse_method, read_raw, with_thread_pool, CvConfig};
use crate::preprocess::{preprocess, PreprocessOptions, DEFAULT_BINS, DEFAULT_PRUNE_RATIO};
use crate::report::{compare, ranks_tsv, render_text, CompareOptions, TestKind};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "lcwnb", version, about = "Locally weighted naive Bayes: preprocessing, evaluation and comparison")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fill missing values, discretize and prune a dataset, writing ARFF.
    Preprocess(PreprocessArgs),
    /// Repeated stratified cross-validation of one or more methods.
    Evaluate(EvaluateArgs),
    /// Rank tests, paired tests and permutation bounds over an accuracy table.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Class column name or 0-based index (default: last column).
    #[arg(long)]
    class: Option<String>,
    /// CSV input has no header row.
    #[arg(long)]
    no_header: bool,
    /// CSV token for a missing value.
    #[arg(long, default_value = "?")]
    missing: String,
    /// CSV field delimiter (a single byte).
    #[arg(long, default_value = ",")]
    delimiter: String,
    /// Equal-width bins for numeric attributes.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// Drop attributes with at least this fraction of distinct values.
    #[arg(long, default_value_t = DEFAULT_PRUNE_RATIO)]
    prune_ratio: f64,
}

impl InputArgs {
    fn csv(&self) -> Result<CsvOptions> {
        let delimiter = match self.delimiter.as_str() {
            "\\t" | "tab" => b'\t',
            d if d.len() == 1 => d.as_bytes()[0],
            d => return Err(Error::Usage(format!("delimiter must be one byte, got `{d}`"))),
        };
        Ok(CsvOptions {
            has_header: !self.no_header,
            class_column: self.class.clone(),
            missing_token: self.missing.clone(),
            delimiter,
        })
    }

    fn preprocess(&self) -> Result<PreprocessOptions> {
        if self.bins < 1 {
            return Err(Error::Usage("--bins must be at least 1".into()));
        }
        if !(self.prune_ratio > 0.0 && self.prune_ratio <= 1.0) {
            return Err(Error::Usage(format!("--prune-ratio must lie in (0, 1], got {}", self.prune_ratio)));
        }
        Ok(PreprocessOptions {
            bins: self.bins,
            prune_ratio: self.prune_ratio,
        })
    }
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// Input ARFF, CSV or TSV file.
    #[arg(long)]
    data: PathBuf,
    /// Output ARFF path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report of the action taken on each attribute.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Input dataset; repeat for several.
    #[arg(long, required = true)]
    data: Vec<PathBuf>,
    /// `nb`, `lcwnb:<kappa>` or `lcwnb:auto`; repeat for several.
    #[arg(long, required = true)]
    method: Vec<String>,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Per-fold accuracies (TSV, long format).
    #[arg(long)]
    folds_out: Option<PathBuf>,
    /// JSON summary with mean and sd per dataset and method.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Mean accuracies in percent as a datasets × methods TSV.
    #[arg(long)]
    matrix_out: Option<PathBuf>,
    /// Format of the summary on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Accuracy matrix TSV (datasets × methods).
    #[arg(long, conflicts_with = "fold_results", required_unless_present = "fold_results")]
    matrix: Option<PathBuf>,
    /// Per-fold results TSV as written by `evaluate --folds-out`.
    #[arg(long)]
    fold_results: Option<PathBuf>,
    /// Methods to compare, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// Tests to run, comma separated: friedman, id, quade, wilcoxon, ttest,
    /// ranks, ztest, permutation, rank-counts.
    #[arg(long, value_delimiter = ',', default_value = "friedman,id,quade,ranks")]
    tests: Vec<String>,
    /// Method whose mean rank the z-test examines (default: first method).
    #[arg(long)]
    target: Option<String>,
    /// Method the paired tests compare against the others (default: first).
    #[arg(long)]
    baseline: Option<String>,
    /// Significance level of the paired t-tests.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 9999)]
    permutations: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Dataset characteristics TSV (dataset, n, m, r); adds a column chosen
    /// per dataset by the attribute-count rule for kappa.
    #[arg(long)]
    switching: Option<PathBuf>,
    /// Columns holding kappa = 20, 10 and 5, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "LCWNB20,LCWNB10,LCWNB5")]
    switching_columns: Vec<String>,
    /// Name of the added column.
    #[arg(long, default_value = "LCWNB*")]
    switching_name: String,
    /// JSON report path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Per-dataset ranks of the compared methods (TSV).
    #[arg(long)]
    ranks_out: Option<PathBuf>,
    /// Format of the report on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn cmd_preprocess(args: &PreprocessArgs, out: &mut dyn Write) -> Result<()> {
    let raw = read_raw(&args.data, &args.input.csv()?, args.input.class.as_deref())?;
    let (data, report) = preprocess(&raw, &args.input.preprocess()?)?;
    let arff = write_arff(&data, &raw.relation, &raw.class_column().name);
    match &args.out {
        Some(p) => write(p, &arff)?,
        None => out.write_all(arff.as_bytes()).map_err(|e| Error::io("<stdout>", e))?,
    }
    if let Some(p) = &args.report {
        write(p, &json(&report)?)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct EvalConfigJson {
    folds: usize,
    runs: usize,
    seed: u64,
    bins: usize,
    prune_ratio: f64,
}

#[derive(Debug, Serialize)]
struct EvalSummaryRow<'a> {
    dataset: &'a str,
    method: &'a str,
    folds: usize,
    mean: f64,
    sd: f64,
}

#[derive(Debug, Serialize)]
struct EvalSummary<'a> {
    config: EvalConfigJson,
    results: Vec<EvalSummaryRow<'a>>,
}

fn percent_matrix(results: &[EvalResult]) -> Result<AccuracyMatrix> {
    let m = AccuracyMatrix::from_results(results)?;
    let means = m.means().iter().map(|r| r.iter().map(|v| 100.0 * v).collect()).collect();
    Ok(AccuracyMatrix::new(m.datasets().to_vec(), m.methods().to_vec(), means)?)
}

fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    if args.runs < 1 {
        return Err(Error::Usage("--runs must be at least 1".into()));
    }
    if args.folds < 2 {
        return Err(Error::Usage("--folds must be at least 2".into()));
    }
    let methods = args.method.iter().map(|m| parse_method(m)).collect::<Result<Vec<_>>>()?;
    let csv = args.input.csv()?;
    let popts = args.input.preprocess()?;
    let loaded = args
        .data
        .iter()
        .map(|p| load_dataset(p, &csv, args.input.class.as_deref(), &popts))
        .collect::<Result<Vec<_>>>()?;
    for (i, d) in loaded.iter().enumerate() {
        if loaded[..i].iter().any(|e| e.name == d.name) {
            return Err(lcwnb_core::Error::DuplicateId(d.name.clone()).into());
        }
    }
    let config = CvConfig {
        folds: args.folds,
        runs: args.runs,
        seed: args.seed,
    };
    let datasets: Vec<(&str, &lcwnb_core::Dataset)> = loaded.iter().map(|d| (d.name.as_str(), &d.data)).collect();
    let refs: Vec<&dyn lcwnb_core::eval::Classifier> = methods.iter().map(|m| m.as_ref()).collect();
    let results = with_thread_pool(|| evaluate(&datasets, &refs, config))??;

    let summary = EvalSummary {
        config: EvalConfigJson {
            folds: args.folds,
            runs: args.runs,
            seed: args.seed,
            bins: popts.bins,
            prune_ratio: popts.prune_ratio,
        },
        results: results
            .iter()
            .map(|r| EvalSummaryRow {
                dataset: &r.dataset,
                method: &r.method,
                folds: r.folds.len(),
                mean: r.mean,
                sd: r.sd,
            })
            .collect(),
    };
    let summary_json = json(&summary)?;
    if let Some(p) = &args.folds_out {
        write(p, &write_folds_tsv(&results))?;
    }
    if let Some(p) = &args.json {
        write(p, &summary_json)?;
    }
    if let Some(p) = &args.matrix_out {
        let comment = format!(
            "mean accuracy (%) over {} runs of {}-fold stratified cross-validation, seed {}",
            args.runs, args.folds, args.seed
        );
        write(p, &write_matrix_tsv(&percent_matrix(&results)?, &[comment]))?;
    }
    let text = match args.format {
        Format::Json => summary_json,
        Format::Text => {
            let mut s = String::new();
            for r in &results {
                s.push_str(&format!(
                    "{:<16} {:<14} {:>6.2} ± {:.2}\n",
                    r.dataset,
                    r.method,
                    100.0 * r.mean,
                    100.0 * r.sd
                ));
            }
            s
        }
    };
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> Result<()> {
    let mut matrix = match (&args.matrix, &args.fold_results) {
        (Some(p), _) => read_matrix_tsv(&read(p)?).map_err(|e| Error::Ingest(format!("{}: {e}", p.display())))?,
        (None, Some(p)) => {
            let results = read_folds_tsv(&read(p)?).map_err(|e| Error::Ingest(format!("{}: {e}", p.display())))?;
            AccuracyMatrix::from_results(&results)?
        }
        (None, None) => return Err(Error::Usage("one of --matrix or --fold-results is required".into())),
    };
    if let Some(p) = &args.switching {
        let cols: Vec<&str> = args.switching_columns.iter().map(String::as_str).collect();
        let cols: [&str; 3] = cols
            .try_into()
            .map_err(|_| Error::Usage("--switching-columns needs exactly three names".into()))?;
        let ch = read_characteristics(&read(p)?).map_err(|e| Error::Ingest(format!("{}: {e}", p.display())))?;
        let column = switching_column(&matrix, &ch, cols)?;
        matrix = matrix.with_column(args.switching_name.clone(), column)?;
    }
    if !args.methods.is_empty() {
        matrix = matrix.select_methods(&args.methods)?;
    }
    let tests = args.tests.iter().map(|t| TestKind::parse(t)).collect::<Result<Vec<_>>>()?;
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Error::Usage(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
    }
    let options = CompareOptions {
        tests,
        target: args.target.clone(),
        baseline: args.baseline.clone(),
        alpha: args.alpha,
        permutations: args.permutations,
        seed: args.seed,
    };
    let report = with_thread_pool(|| compare(&matrix, &options))??;
    let report_json = json(&report)?;
    if let Some(p) = &args.json {
        write(p, &report_json)?;
    }
    if let Some(p) = &args.ranks_out {
        write(p, &ranks_tsv(&lcwnb_core::stats::mean_ranks(&matrix)))?;
    }
    let text = match args.format {
        Format::Json => report_json,
        Format::Text => render_text(&report),
    };
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Usage(_) => EXIT_USAGE,
        Error::Parse { .. } | Error::Ingest(_) | Error::Core(_) | Error::Io { .. } => EXIT_DATA,
        Error::Json(_) | Error::Threads(_) => EXIT_INTERNAL,
    }
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Preprocess(a) => cmd_preprocess(a, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Compare(a) => cmd_compare(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
