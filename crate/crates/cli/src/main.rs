use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Parser, Subcommand};

use glab_cli::report::suite_json;
use glab_cli::{run_scenario, RunOptions, Verdict};
use glab_core::suites::{run_suite, SUITES};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "glab", version, about = "Verify group gradings of matrix algebras over finite fields")]
struct Cli {
    /// Write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized checks; overrides the scenario's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Include per-check wall time in reports (makes them nondeterministic).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run { scenario: PathBuf },
    /// Run a named verification sweep.
    Suite { name: String },
    /// List suite names.
    Suites,
}

fn write_report(path: &Option<PathBuf>, value: &impl serde::Serialize) -> anyhow::Result<()> {
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Run { scenario } => {
            let text = match std::fs::read_to_string(scenario) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("glab: cannot read {}: {e}", scenario.display());
                    return Ok(ExitCode::from(EXIT_USAGE));
                }
            };
            let opts = RunOptions { seed: cli.seed, timings: cli.timings };
            let report = match run_scenario(&text, &opts) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("glab: {}: {e}", scenario.display());
                    return Ok(ExitCode::from(EXIT_USAGE));
                }
            };
            for c in &report.checks {
                let verdict = match c.verdict {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "FAIL",
                    Verdict::Error => "ERROR",
                };
                match &c.detail {
                    Some(d) => println!("[{}] {:<22} {verdict}  {d}", c.index, c.op),
                    None => println!("[{}] {:<22} {verdict}", c.index, c.op),
                }
            }
            let s = &report.summary;
            println!("{} pass, {} fail, {} error", s.pass, s.fail, s.error);
            write_report(&cli.report, &report)?;
            Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAIL) })
        }
        Command::Suite { name } => {
            let seed = cli.seed.unwrap_or(0);
            let report = match run_suite(name, seed) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("glab: {e}; known suites: {}", SUITES.join(", "));
                    return Ok(ExitCode::from(EXIT_USAGE));
                }
            };
            print!("{}", report.table());
            write_report(&cli.report, &suite_json(&report))?;
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAIL) })
        }
        Command::Suites => {
            for s in SUITES {
                println!("{s}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("glab: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("glab: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
