//! `hypam`: run one job against the amoeba library and write a JSON report.

mod commands;
mod job;
mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::builder::PossibleValuesParser;
use clap::Parser;
use hypam::Error;

use crate::commands::{dispatch, COMMANDS};
use crate::job::{Job, Report, Timing};

const EXIT_VERDICT: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "hypam", version, about = "Hyperbolic amoebas in PSL2(C)")]
#[command(after_help = "Tolerances are overridden with --tol.<name> <value>, e.g. --tol.eps_q 1e-6.")]
struct Cli {
    /// Subcommand, or `run` to take it from the job file.
    #[arg(value_parser = PossibleValuesParser::new(COMMANDS.iter().copied().chain(["run"])))]
    command: String,
    #[arg(long)]
    job: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    density: Option<usize>,
    #[arg(long)]
    starts: Option<usize>,
    /// PLY or CSV output for commands that produce points.
    #[arg(long)]
    artifact: Option<PathBuf>,
    #[arg(long)]
    selftest: bool,
}

type Overrides = Vec<(String, f64)>;

/// Pulls `--tol.NAME V` and `--tol.NAME=V` out of argv before clap sees it.
fn split_tolerances(args: Vec<String>) -> anyhow::Result<(Vec<String>, Overrides)> {
    let (mut rest, mut tols) = (Vec::new(), Vec::new());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(flag) = a.strip_prefix("--tol.") else {
            rest.push(a);
            continue;
        };
        let (name, value) = match flag.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => (flag.to_string(), it.next().ok_or_else(|| anyhow!("--tol.{flag} needs a value"))?),
        };
        let v: f64 = value.parse().with_context(|| format!("--tol.{name}: bad value {value}"))?;
        tols.push((name, v));
    }
    Ok((rest, tols))
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::NoComplementFound(_) | Error::IllConditioned(_)) => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}

fn set_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("HYPAM_THREADS") {
        let n: usize = v.parse().with_context(|| format!("HYPAM_THREADS={v}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn emit(path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

fn selftest(cli: &Cli) -> anyhow::Result<u8> {
    let commands: Vec<&str> = if cli.command == "run" { COMMANDS.to_vec() } else { vec![cli.command.as_str()] };
    let mut all = true;
    let mut rows = Vec::new();
    for c in commands {
        for (name, ok, err) in selftest::run(c)? {
            all &= ok;
            rows.push(serde_json::json!({ "command": c, "case": name, "passed": ok, "error": err }));
        }
    }
    let text = serde_json::to_string_pretty(&serde_json::json!({ "selftest": rows, "passed": all }))?;
    emit(cli.out.as_ref(), &text)?;
    Ok(if all { 0 } else { EXIT_VERDICT })
}

fn run(cli: Cli, tols: Overrides) -> anyhow::Result<u8> {
    set_threads()?;
    if cli.selftest {
        return selftest(&cli);
    }
    let mut job = match &cli.job {
        Some(p) => Job::load(p)?,
        None => Job::default(),
    };
    let command = match (cli.command.as_str(), job.command.as_deref()) {
        ("run", Some(c)) if COMMANDS.contains(&c) => c.to_string(),
        ("run", Some(c)) => bail!("unknown command {c} in job"),
        ("run", None) => bail!("`run` needs a job with a command field"),
        (c, Some(j)) if c != j => bail!("command {c} disagrees with job command {j}"),
        (c, _) => c.to_string(),
    };
    job.seed = cli.seed.or(job.seed);
    job.density = cli.density.or(job.density);
    job.starts = cli.starts.or(job.starts);
    job.out = cli.out.or(job.out);
    job.artifact = cli.artifact.or(job.artifact);
    job.tol.extend(tols);

    let start = Instant::now();
    let outcome = dispatch(&command, &job)?;
    let passed = outcome.passed();
    let report = Report {
        command,
        version: hypam::VERSION,
        seed: job.seed,
        tolerances: job.tolerances()?,
        result: outcome.result,
        residuals: outcome.residuals,
        verdicts: outcome.verdicts,
        passed,
        artifacts: outcome.artifacts,
        timing: Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 },
    };
    emit(job.out.as_ref(), &serde_json::to_string_pretty(&report)?)?;
    Ok(if passed { 0 } else { EXIT_VERDICT })
}

fn main() -> ExitCode {
    let parsed = split_tolerances(std::env::args().collect()).and_then(|(args, tols)| match Cli::try_parse_from(args) {
        Ok(cli) => Ok((cli, tols)),
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => Err(anyhow!(e.to_string())),
    });
    let result = parsed.and_then(|(cli, tols)| run(cli, tols));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hypam: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
