use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fused_spacing::experiments::{run_experiment, ExperimentConfig, ExperimentKind};

use fused_spacing_cli::{
    fit_csv, fit_report, ingest_csv, run_checks, test_csv, test_report, to_json, NaPolicy,
    TestOptions,
};

/// Changepoint detection on 1-D series with exact post-selection inference.
#[derive(Parser)]
#[command(name = "fused-spacing", version, about, propagate_version = true)]
struct RunConfig {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the solution path: one knot per detected changepoint.
    Fit(FitArgs),
    /// Fit the path and test every step, with selective confidence intervals.
    Test(TestArgs),
    /// Run one of the built-in replication studies and emit its JSON report.
    Experiment(ExperimentArgs),
    /// Cross-check the solver against the independent oracles.
    Verify(VerifyArgs),
    /// Walk through the four-sample worked example.
    Toy(ToyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NaArg {
    Drop,
    Fail,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct InputArgs {
    /// CSV file with one numeric column; `-` reads standard input.
    input: PathBuf,
    /// Column to read: a header name or a 0-based index.
    #[arg(long)]
    column: Option<String>,
    /// Missing-value policy; `drop` skips rows and re-indexes.
    #[arg(long, value_enum, default_value_t = NaArg::Fail)]
    na: NaArg,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Stop after this many changepoints (default: min(n - 1, 50)).
    #[arg(long)]
    max_steps: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Noise standard deviation; estimated from first differences when
    /// omitted.
    #[arg(long)]
    sigma: Option<f64>,
    /// Test level and confidence-interval complement.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Stop after this many changepoints (default: min(n - 1, 50)).
    #[arg(long)]
    max_steps: Option<usize>,
    /// Report 2 * min(T, 1 - T) as the headline p-value.
    #[arg(long)]
    two_sided: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Equivalence,
    Calibration,
    Power,
    Complexity,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Samples per replicate (study-specific default when omitted).
    #[arg(long)]
    n: Option<usize>,
    /// Monte-Carlo replicates (study-specific default when omitted).
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Base seed for the randomized cross-checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ToyFormat {
    Text,
    Json,
}

#[derive(Args)]
struct ToyArgs {
    #[arg(long, value_enum, default_value_t = ToyFormat::Text)]
    format: ToyFormat,
    /// Write the walkthrough here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn read_input(args: &InputArgs) -> Result<Vec<f64>> {
    let ingested = if args.input == Path::new("-") {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).context("E-IO: reading standard input")?;
        ingest_csv(buf.as_bytes(), args.column.as_deref(), na_policy(args.na))?
    } else {
        let file = File::open(&args.input)
            .with_context(|| format!("E-IO: opening {}", args.input.display()))?;
        ingest_csv(file, args.column.as_deref(), na_policy(args.na))?
    };
    if !ingested.dropped_lines.is_empty() {
        eprintln!(
            "warning: dropped {} missing row(s) at line(s) {:?}; remaining rows were re-indexed \
             and changepoint positions refer to the compacted series",
            ingested.dropped_lines.len(),
            ingested.dropped_lines
        );
    }
    Ok(ingested.values)
}

fn na_policy(arg: NaArg) -> NaPolicy {
    match arg {
        NaArg::Drop => NaPolicy::Drop,
        NaArg::Fail => NaPolicy::Fail,
    }
}

fn emit(out: &OutputArgs, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("E-IO: writing {}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes()).context("E-IO: writing report")?,
    }
    Ok(())
}

fn run_fit(args: &FitArgs) -> Result<()> {
    let values = read_input(&args.input)?;
    let report = fit_report(&values, args.max_steps)?;
    if report.no_changepoints {
        eprintln!("note: no changepoints detected");
    }
    let text = match args.out.format {
        FormatArg::Json => to_json(&report)?,
        FormatArg::Csv => fit_csv(&report)?,
    };
    emit(&args.out, &text)
}

fn run_test(args: &TestArgs) -> Result<()> {
    let values = read_input(&args.input)?;
    let opts = TestOptions {
        sigma: args.sigma,
        alpha: args.alpha,
        max_steps: args.max_steps,
        two_sided: args.two_sided,
    };
    let report = test_report(&values, &opts)?;
    if report.no_changepoints {
        eprintln!("note: no changepoints detected");
    }
    let text = match args.out.format {
        FormatArg::Json => to_json(&report)?,
        FormatArg::Csv => test_csv(&report)?,
    };
    emit(&args.out, &text)
}

fn run_experiment_cmd(args: &ExperimentArgs) -> Result<()> {
    let kind = match args.kind {
        KindArg::Equivalence => ExperimentKind::Equivalence,
        KindArg::Calibration => ExperimentKind::Calibration,
        KindArg::Power => ExperimentKind::Power,
        KindArg::Complexity => ExperimentKind::Complexity,
    };
    let mut config = ExperimentConfig::defaults(kind);
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(r) = args.replicates {
        config.replicates = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(a) = args.alpha {
        config.alpha = a;
    }
    let report = run_experiment(&config)?;
    let mut text = serde_json::to_string_pretty(&report).context("serializing report")?;
    text.push('\n');
    match &args.output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("E-IO: writing {}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes()).context("E-IO: writing report")?,
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<bool> {
    let checks = run_checks(args.seed)?;
    let mut all = true;
    for c in &checks {
        let tag = if c.pass { "ok  " } else { "FAIL" };
        println!("{tag} {} ({})", c.name, c.detail);
        all &= c.pass;
    }
    Ok(all)
}

fn run_toy(args: &ToyArgs) -> Result<()> {
    let config = ExperimentConfig::defaults(ExperimentKind::Toy);
    let report = run_experiment(&config)?;
    let toy = report.toy.as_ref().expect("toy section present");
    let text = match args.format {
        ToyFormat::Json => {
            let mut t = serde_json::to_string_pretty(toy).context("serializing report")?;
            t.push('\n');
            t
        }
        ToyFormat::Text => {
            let mut t = String::from("values:");
            for v in &toy.values {
                t.push_str(&format!(" {v}"));
            }
            t.push('\n');
            for row in &toy.enumeration {
                t.push_str(&format!("state before step {} | active {:?}\n", row.step, row.active));
                for c in &row.candidates {
                    let mark = if row.chosen.is_some_and(|ch| ch.cut == c.cut) {
                        " <- taken"
                    } else {
                        ""
                    };
                    t.push_str(&format!(
                        "  cut {} sign {:+} crosses at lambda = {}{mark}\n",
                        c.cut, c.sign, c.lambda
                    ));
                }
                if row.candidates.is_empty() {
                    t.push_str("  no crossings left\n");
                }
            }
            t.push_str(&format!(
                "trailing lambda = {} | first-step p-value at sigma 1 = {:.6} | \
                 exact-solver scan agrees: {}\n",
                toy.trailing_lambda, toy.first_step_pivot, toy.oracle_agrees
            ));
            t
        }
    };
    match &args.output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("E-IO: writing {}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes()).context("E-IO: writing report")?,
    }
    Ok(())
}

fn main() {
    let cli = RunConfig::parse();
    let outcome = match &cli.command {
        Command::Fit(args) => run_fit(args),
        Command::Test(args) => run_test(args),
        Command::Experiment(args) => run_experiment_cmd(args),
        Command::Verify(args) => match run_verify(args) {
            Ok(true) => Ok(()),
            Ok(false) => {
                eprintln!("E-VERIFY: at least one oracle cross-check failed");
                std::process::exit(1);
            }
            Err(e) => Err(e),
        },
        Command::Toy(args) => run_toy(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
