use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use enriched::output::{emit_report, emit_trace_csv, fmt_f64};
use enriched::runner::{
    analyze_scenario, demo_scenario, demo_source, error_exit_code, format_analysis, run_scenario, ScenarioRun,
    DEMO_NAMES, EXIT_CONVERGED, EXIT_ERROR, EXIT_NOT_CERTIFIED,
};
use enriched::scenario::{parse_scenario, ScenarioConfig};
use enriched::space::{check_axioms, AxiomReport, FnNorm, TwoNormSpace};
use enriched::Error;

/// Exit code for `check-norm` when an axiom is violated.
const EXIT_AXIOM_VIOLATION: u8 = 6;

#[derive(Parser)]
#[command(name = "enriched", version, about = "Fixed points of enriched contractions in 2-normed spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify and solve a scenario file.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        /// Write the iteration trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Estimate theta and b for a scenario without solving.
    Analyze {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Sample the four 2-norm axioms.
    CheckNorm {
        /// `cross2`, `gram:N`, or `mutant` (u1*v2 + u2*v1, which is not a 2-norm).
        #[arg(long, default_value = "cross2")]
        space: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run a built-in scenario: reflection, picard-oscillation, asymptotic-piecewise.
    Demo {
        name: String,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Print the scenario file instead of running it.
        #[arg(long)]
        show: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<Error>()
                .map_or(EXIT_ERROR, error_exit_code);
            ExitCode::from(code as u8)
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Solve {
            scenario,
            trace,
            report,
        } => {
            let cfg = load(&scenario)?;
            solve(&cfg, trace.as_deref(), report.as_deref())
        }
        Command::Analyze { scenario } => {
            let cfg = load(&scenario)?;
            let analysis = analyze_scenario(&cfg)?;
            print!("{}", format_analysis(&analysis));
            Ok(if analysis.certificate.is_ok() {
                EXIT_CONVERGED
            } else {
                EXIT_NOT_CERTIFIED
            } as u8)
        }
        Command::CheckNorm {
            space,
            samples,
            seed,
            tol,
        } => check_norm(&space, samples, seed, tol),
        Command::Demo {
            name,
            trace,
            report,
            show,
        } => {
            if show {
                let text = demo_source(&name)
                    .with_context(|| format!("unknown demo `{name}`; expected one of {}", DEMO_NAMES.join(", ")))?;
                print!("{text}");
                return Ok(0);
            }
            let cfg = demo_scenario(&name)?;
            solve(&cfg, trace.as_deref(), report.as_deref())
        }
    }
}

fn load(path: &Path) -> anyhow::Result<ScenarioConfig> {
    Ok(parse_scenario(path)?)
}

fn solve(cfg: &ScenarioConfig, trace: Option<&Path>, report: Option<&Path>) -> anyhow::Result<u8> {
    let ScenarioRun { report: result, exit_code, .. } = run_scenario(cfg)?;
    if let Some(path) = trace {
        let witnesses = cfg.witness_set()?;
        emit_trace_csv(&result.trace, &witnesses, path)?;
    }
    emit_report(&result, report)?;
    Ok(exit_code as u8)
}

fn check_norm(space: &str, samples: usize, seed: u64, tol: f64) -> anyhow::Result<u8> {
    let report = match space {
        "cross2" => check_axioms(&TwoNormSpace::cross2(), samples, seed, tol),
        "mutant" => {
            let mutant = FnNorm {
                dimension: 2,
                f: |u: &[f64], v: &[f64]| u[0] * v[1] + u[1] * v[0],
            };
            check_axioms(&mutant, samples, seed, tol)
        }
        other => match other.strip_prefix("gram:") {
            Some(n) => {
                let n: usize = n.parse().with_context(|| format!("bad gram dimension `{n}`"))?;
                check_axioms(&TwoNormSpace::gram(n)?, samples, seed, tol)
            }
            None => bail!("unknown space `{other}`; expected cross2, gram:N, or mutant"),
        },
    };
    print_axioms(space, &report);
    Ok(if report.passed { 0 } else { EXIT_AXIOM_VIOLATION })
}

fn print_axioms(space: &str, report: &AxiomReport) {
    println!("space={space}");
    println!("samples={}", report.samples_tested);
    println!("violations={}", report.violation_count);
    println!("passed={}", report.passed);
    for v in report.violations.iter().take(5) {
        let triple: Vec<String> = v
            .triple
            .iter()
            .map(|p| p.iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(","))
            .collect();
        println!(
            "violation axiom={:?} sample={} magnitude={} x={} y={} z={}",
            v.axiom,
            v.sample,
            fmt_f64(v.magnitude),
            triple[0],
            triple[1],
            triple[2]
        );
    }
}
