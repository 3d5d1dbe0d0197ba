//! Command-line entry point: run verification suites, compute norms of grid
//! functions, certify kernels, and list the available experiment kinds.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use vexan::config::{ExponentDesc, RunConfig};
use vexan::gridio::read_grid_csv;
use vexan::report_io::{write_csv_summary, write_jsonl};
use vexan::run_suite_parallel;
use vexan_core::harness::{aggregate_pass, all_kind_names};
use vexan_core::norms::luxemburg_norm;
use vexan_core::operators::{
    kernel_size_check, kernel_smoothness_check, make_fractional_kernel, make_mollified_cz_kernel,
};

#[derive(Parser)]
#[command(name = "vexan", about = "Variable-exponent analysis verification harness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment suite from a JSON config and write JSONL + CSV
    /// reports; exits 0 only if every experiment passes.
    Verify(VerifyArgs),
    /// Print the Luxemburg norm of a grid function stored as CSV.
    Norm(NormArgs),
    /// Certify a kernel: print measured size and smoothness constants.
    KernelCert(KernelCertArgs),
    /// List the available experiment kinds.
    ListSuites,
}

#[derive(Args)]
struct VerifyArgs {
    /// Path to the JSON run config.
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config output prefix.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads (default: config, then VEXAN_JOBS, then 1).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct NormArgs {
    /// Grid-function CSV (3-line header: dim, N, L; then flat values).
    csv: PathBuf,
    /// Exponent descriptor: inline JSON or a path to a JSON file.
    #[arg(long)]
    exponent: String,
    /// Bisection tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct KernelCertArgs {
    /// Kernel descriptor: inline JSON or a path, e.g.
    /// {"kind":"mollified_cz","m":2,"n":1,"rho":0.1}.
    spec: String,
    /// Sample budget for the certification sweeps.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// RNG seed for the sampled configurations.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify(args) => verify(args),
        Command::Norm(args) => norm(args),
        Command::KernelCert(args) => kernel_cert(args),
        Command::ListSuites => {
            for name in all_kind_names() {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.output = out;
    }
    let jobs = args
        .jobs
        .or(cfg.parallelism)
        .or_else(|| {
            std::env::var("VEXAN_JOBS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1);

    let specs = cfg.build_specs()?;
    let reports = run_suite_parallel(&specs, jobs);

    let prefix = PathBuf::from(&cfg.output);
    if let Some(parent) = prefix.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating output directory {}", parent.display()))?;
        }
    }
    let jsonl_path = with_suffix(&prefix, "jsonl");
    let csv_path = with_suffix(&prefix, "csv");
    write_jsonl(&jsonl_path, &reports)?;
    write_csv_summary(&csv_path, &reports)?;

    let pass = aggregate_pass(&reports);
    for r in &reports {
        let status = if r.pass { "pass" } else { "FAIL" };
        match &r.error {
            Some(e) => println!("{:<22} {status}  error: {e}", r.kind),
            None => match r.asserted_bound {
                Some(b) => println!(
                    "{:<22} {status}  measured {:.6e} <= bound {:.6e}",
                    r.kind, r.measured_constant, b
                ),
                None => println!(
                    "{:<22} {status}  measured {:.6e} (stability criterion)",
                    r.kind, r.measured_constant
                ),
            },
        }
    }
    println!(
        "wrote {} and {} ({} experiments, aggregate: {})",
        jsonl_path.display(),
        csv_path.display(),
        reports.len(),
        if pass { "pass" } else { "FAIL" }
    );
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn with_suffix(prefix: &std::path::Path, ext: &str) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    name.push('.');
    name.push_str(ext);
    prefix.with_file_name(name)
}

/// Inline JSON if it parses, otherwise treat the argument as a file path.
fn json_arg(arg: &str) -> Result<String> {
    if serde_json::from_str::<serde_json::Value>(arg).is_ok() {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).with_context(|| format!("reading {arg} (not inline JSON either)"))
}

fn norm(args: NormArgs) -> Result<ExitCode> {
    let f = read_grid_csv(&args.csv)?;
    let desc: ExponentDesc = serde_json::from_str(&json_arg(&args.exponent)?)
        .context("parsing exponent descriptor")?;
    let p = desc.build()?;
    let r = luxemburg_norm(&f, &p, args.tol, None)?;
    println!("{:.15e}", r.value);
    Ok(ExitCode::SUCCESS)
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelDesc {
    kind: String,
    m: usize,
    n: usize,
    #[serde(default)]
    rho: Option<f64>,
    #[serde(default)]
    alpha: Option<f64>,
}

fn kernel_cert(args: KernelCertArgs) -> Result<ExitCode> {
    let desc: KernelDesc =
        serde_json::from_str(&json_arg(&args.spec)?).context("parsing kernel descriptor")?;
    let kernel = match desc.kind.as_str() {
        "mollified_cz" => {
            let rho = desc.rho.context("mollified_cz needs \"rho\"")?;
            make_mollified_cz_kernel(desc.m, desc.n, rho)?
        }
        "fractional" => {
            let alpha = desc.alpha.context("fractional needs \"alpha\"")?;
            make_fractional_kernel(desc.m, desc.n, alpha)?
        }
        other => bail!("unknown kernel kind {other:?}"),
    };
    let measured_a = kernel_size_check(&kernel, args.samples, args.seed);
    let (ax, ay) = kernel_smoothness_check(&kernel, args.samples, args.seed);
    let out = serde_json::json!({
        "kernel": kernel,
        "measured_size_constant": measured_a,
        "measured_smoothness_x": ax,
        "measured_smoothness_y": ay,
        "samples": args.samples,
        "seed": args.seed,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}
