//! Command line driver: run named check suites and emit machine-readable
//! JSON reports.
//!
//! Exit status: 0 when every check passes (inapplicable checks do not
//! fail), 1 when at least one check fails, 2 on usage errors, 3 on
//! numerical build failures (a shipped construction failed its own
//! defining equation).
//!
//! The default report directory, used when `--report` is not given, comes
//! from the `SPINGEO_REPORT_DIR` environment variable; without either, the
//! report is printed to standard output only as a summary.

use clap::{Parser, Subcommand};
use spingeo::report::list_checks;
use spingeo::suite::{run_suite, SuiteConfig, SuiteError, SUITES};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "verify",
    about = "Pointwise verification of generalized Killing spinor identities on model manifolds",
    subcommand_negates_reqs = true
)]
struct Cli {
    /// Suite to run: clifford, models, s3, hypersurface, dim2, dim4, dim5,
    /// identities, all
    #[arg(required = true)]
    suite: Option<String>,

    /// Candidate or model name (e.g. s3-gks, killing:s4:+, restrict:ellipsoid3)
    #[arg(long)]
    model: Option<String>,

    /// Sample points per check
    #[arg(long, default_value_t = 100)]
    samples: usize,

    /// Seed for the point sampler
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Tolerance override, repeatable: `--tol <check-id>=<value>`
    #[arg(long = "tol", value_name = "CHECK=VALUE")]
    tol: Vec<String>,

    /// Report output path (JSON)
    #[arg(long)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// List every check id with its module and anchor
    ListChecks,
}

fn parse_tols(raw: &[String]) -> Result<Vec<(String, f64)>, String> {
    let mut out = Vec::new();
    for item in raw {
        let Some((id, val)) = item.split_once('=') else {
            return Err(format!("bad --tol '{item}': expected <check-id>=<value>"));
        };
        let v: f64 = val
            .parse()
            .map_err(|_| format!("bad --tol '{item}': '{val}' is not a number"))?;
        if v <= 0.0 {
            return Err(format!("bad --tol '{item}': tolerance must be positive"));
        }
        out.push((id.to_string(), v));
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(Command::ListChecks) = cli.command {
        print!("{}", list_checks());
        return ExitCode::SUCCESS;
    }

    let suite = cli.suite.expect("suite argument is required by clap");
    if !SUITES.contains(&suite.as_str()) {
        eprintln!(
            "error: unknown suite '{suite}'; expected one of {}",
            SUITES.join(", ")
        );
        return ExitCode::from(2);
    }
    let tol_overrides = match parse_tols(&cli.tol) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let cfg = SuiteConfig {
        suite,
        model: cli.model,
        samples: cli.samples,
        seed: cli.seed,
        tol_overrides,
    };

    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(SuiteError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(SuiteError::Build(msg)) => {
            eprintln!("build failure: {msg}");
            return ExitCode::from(3);
        }
    };

    print!("{}", report.summary_text());

    let report_path = cli.report.or_else(|| {
        std::env::var_os("SPINGEO_REPORT_DIR").map(|dir| {
            let mut p = PathBuf::from(dir);
            let model_part = cfg
                .model
                .as_deref()
                .map(|m| format!("-{}", m.replace([':', '/'], "_")))
                .unwrap_or_default();
            p.push(format!("{}{}.json", cfg.suite, model_part));
            p
        })
    });
    if let Some(path) = report_path {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                if let Err(e) = std::fs::create_dir_all(parent) {
                    eprintln!(
                        "error: cannot create report directory {}: {e}",
                        parent.display()
                    );
                    return ExitCode::from(2);
                }
            }
        }
        if let Err(e) = std::fs::write(&path, report.to_json()) {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return ExitCode::from(2);
        }
        println!("report written to {}", path.display());
    }

    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
