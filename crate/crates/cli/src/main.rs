use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use anomaly_core::lowest_weight::{scan_to_csv, unitarity_scan, ScanOptions, GRADE_CAP};
use anomaly_core::jets::series_to_csv;
use anomaly_core::{build_su, run_suite, CentralForm, CheckReport, Error, JetRunConfig, SuiteConfig, SuiteName};

#[derive(Parser)]
#[command(name = "anomaly-lab", version, about = "Check suites for current algebras and their anomalies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite Lie algebra data: Jacobi, d-symbols, Killing form.
    Algebra(SuiteArgs),
    /// 3j symbols, Gaunt coefficients, harmonic products.
    Harmonics(SuiteArgs),
    /// Current-algebra bracket, filtration, bump functions.
    Currents(SuiteArgs),
    /// Affine, toroidal and Mickelsson-Faddeev cocycles.
    Cocycles(SuiteArgs),
    /// Shapovalov forms and the unitarity scan.
    Unitarity(SuiteArgs),
    /// p-jet Klein-Gordon hierarchy.
    Jets(SuiteArgs),
    /// Every suite.
    All(SuiteArgs),
    /// Unitarity scan table over levels and spins.
    Scan(ScanArgs),
    /// Integrate a jet hierarchy from a run config and write the time series.
    JetRun(JetRunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct SuiteArgs {
    /// JSON suite config; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutFormat,
    /// Quadrature nodes for the toroidal reduction.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    max_grade: Option<usize>,
    /// Largest jet truncation order.
    #[arg(long)]
    p: Option<u32>,
    /// Record per-check wall-clock times.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Trace,
    Killing,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    levels: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    spins: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    max_grade: usize,
    #[arg(long, value_enum, default_value = "trace")]
    central_form: FormArg,
    /// Drop the lowest-weight requirement; rows are marked, not computed.
    #[arg(long)]
    relax_lowest_weight: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
}

#[derive(Args)]
struct JetRunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_out(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run_named(name: SuiteName, args: &SuiteArgs) -> anyhow::Result<bool> {
    let mut config = match &args.config {
        Some(path) => SuiteConfig::load(path).map_err(|e| match e {
            Error::Config(msg) => anyhow::anyhow!("bad config {}: {msg}", path.display()),
            other => anyhow::Error::new(other).context(format!("cannot read {}", path.display())),
        })?,
        None => SuiteConfig::default(),
    };
    if let Some(n) = args.samples {
        config.samples = n;
    }
    if let Some(g) = args.max_grade {
        if g > GRADE_CAP {
            bail!("--max-grade {g} exceeds the cap of {GRADE_CAP}");
        }
        config.max_grade = g;
    }
    if let Some(p) = args.p {
        config.p = p;
    }
    config.timings |= args.timings;

    let report = run_suite(name, &config, args.seed)?;
    let text = match args.format {
        OutFormat::Json => report.to_json(),
        OutFormat::Csv => report.to_csv()?,
    };
    write_out(args.out.as_deref(), &text)?;
    summarize(&report);
    Ok(report.passed())
}

fn summarize(report: &CheckReport) {
    let failed: Vec<_> = report.failures().collect();
    eprintln!(
        "{}: {} checks, {} failed",
        report.suite,
        report.records.len(),
        failed.len()
    );
    for f in failed {
        eprintln!("  FAIL {} measured={:?} tolerance={:e}", f.name, f.measured, f.tolerance);
    }
}

fn run_scan(args: &ScanArgs) -> anyhow::Result<bool> {
    if args.max_grade > GRADE_CAP {
        bail!("--max-grade {} exceeds the cap of {GRADE_CAP}", args.max_grade);
    }
    let su2 = build_su(2)?;
    let opts = ScanOptions {
        central_form: match args.central_form {
            FormArg::Trace => CentralForm::Trace,
            FormArg::Killing => CentralForm::Killing,
        },
        relax_lowest_weight: args.relax_lowest_weight,
    };
    let rows = unitarity_scan(&su2, &args.levels, &args.spins, args.max_grade, opts)?;
    let text = match args.format {
        OutFormat::Csv => scan_to_csv(&rows),
        OutFormat::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    write_out(args.out.as_deref(), &text)?;
    Ok(true)
}

fn run_jets(args: &JetRunArgs) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(&args.config).with_context(|| format!("cannot read {}", args.config.display()))?;
    let cfg = JetRunConfig::from_json(&text).map_err(|e| anyhow::anyhow!("bad config {}: {e}", args.config.display()))?;
    let series = cfg.run()?;
    write_out(args.out.as_deref(), &series_to_csv(&series, &cfg.output))?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Algebra(a) => run_named(SuiteName::Algebra, a),
        Command::Harmonics(a) => run_named(SuiteName::Harmonics, a),
        Command::Currents(a) => run_named(SuiteName::Currents, a),
        Command::Cocycles(a) => run_named(SuiteName::Cocycles, a),
        Command::Unitarity(a) => run_named(SuiteName::Unitarity, a),
        Command::Jets(a) => run_named(SuiteName::Jets, a),
        Command::All(a) => run_named(SuiteName::All, a),
        Command::Scan(a) => run_scan(a),
        Command::JetRun(a) => run_jets(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
