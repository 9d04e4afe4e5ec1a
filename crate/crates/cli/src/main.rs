use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperlab_cli::config::{parse_f64_list, parse_generators, parse_u64_list, parse_vector, parse_window};
use hyperlab_cli::repro::{repro, IDS};
use hyperlab_cli::{
    commands, write_atomic, CliError, CommandKind, ExperimentConfig, Report, Result, EXIT_MISMATCH, EXIT_OK,
};
use hyperlab_core::constructions::LatticeCosetSet;
use hyperlab_core::density::Verdict;
use hyperlab_core::dynamics::SemigroupJson;
use hyperlab_core::linalg::Mode;
use serde_json::json;

/// Density experiments for lattice cosets and abelian matrix semigroups.
#[derive(Debug, Parser)]
#[command(name = "hyperlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Sample a lattice coset set and measure its coverage.
    Kronecker(RunArgs),
    /// Enumerate a semigroup orbit and measure its coverage.
    Orbit(RunArgs),
    /// Normal form, hypercyclicity probe and subspace probes.
    Probe(RunArgs),
    /// Simultaneous normal form of the generators.
    Normalform(RunArgs),
    /// Run a canned reproduction suite.
    Repro(ReproArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON experiment config; inline flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// A_alpha | A_alpha_beta | A2 | B | Z_module
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    primes: Option<String>,
    #[arg(long)]
    beta_primes: Option<String>,
    #[arg(long)]
    theta1: Option<String>,
    #[arg(long)]
    theta2: Option<String>,
    #[arg(long)]
    radial_step: Option<f64>,
    #[arg(long)]
    radial_count: Option<usize>,
    #[arg(long)]
    angle_count: Option<usize>,
    /// Z-module generators, rows separated by `;`.
    #[arg(long)]
    gens: Option<String>,
    /// Semigroup descriptor JSON file.
    #[arg(long)]
    semigroup: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    /// Spanning vectors of a user subspace, separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    subspace: Option<String>,
    /// `lo,hi` per axis joined by `x`, e.g. `0,1x0,1`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    subspace_window: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    random_starts: Option<usize>,
    /// Also write points.csv.
    #[arg(long)]
    points_csv: bool,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Directory for report.json and points.csv; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 1 unless the primary verdict equals this.
    #[arg(long, value_parser = parse_verdict)]
    expect: Option<Verdict>,
}

#[derive(Debug, Args)]
struct ReproArgs {
    /// One of the suite ids, or `all`.
    id: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    match s {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        other => Err(format!("mode must be exact or float, got {other:?}")),
    }
}

fn parse_verdict(s: &str) -> std::result::Result<Verdict, String> {
    s.parse().map_err(|e: hyperlab_core::Error| e.to_string())
}

fn build_set(a: &RunArgs, kind: &str) -> Result<LatticeCosetSet> {
    let need = |v: &Option<String>, flag: &str| {
        v.clone().ok_or_else(|| CliError::Config(format!("--kind {kind} needs --{flag}")))
    };
    Ok(match kind {
        "A_alpha" => LatticeCosetSet::AAlpha { alpha_primes: parse_u64_list(&need(&a.primes, "primes")?)? },
        "A_alpha_beta" => LatticeCosetSet::AAlphaBeta {
            alpha_primes: parse_u64_list(&need(&a.primes, "primes")?)?,
            beta_primes: parse_u64_list(&need(&a.beta_primes, "beta-primes")?)?,
        },
        "A2" => LatticeCosetSet::A2 {
            theta1: a.theta1.clone().unwrap_or_else(|| "√2".into()),
            theta2: a.theta2.clone().unwrap_or_else(|| "√3".into()),
            radial_step: a.radial_step.unwrap_or(0.05),
            radial_count: a.radial_count.unwrap_or(40),
        },
        "B" => LatticeCosetSet::B {
            radial_step: a.radial_step.unwrap_or(0.01),
            radial_count: a.radial_count.unwrap_or(141),
            angle_count: a.angle_count.unwrap_or(720),
        },
        "Z_module" => LatticeCosetSet::ZModule { generators: parse_generators(&need(&a.gens, "gens")?)? },
        other => return Err(CliError::Config(format!("unknown set kind {other:?}"))),
    })
}

fn build_config(kind: CommandKind, a: &RunArgs) -> Result<ExperimentConfig> {
    let mut c = match &a.config {
        Some(p) => {
            let c = ExperimentConfig::from_json(&fs::read_to_string(p)?)?;
            if c.command != kind {
                return Err(CliError::Config(format!(
                    "config is for '{}', not '{}'",
                    c.command.name(),
                    kind.name()
                )));
            }
            c
        }
        None => ExperimentConfig::new(kind),
    };
    if let Some(k) = &a.kind {
        c.set = Some(build_set(a, k)?);
    }
    if let Some(p) = &a.semigroup {
        let g: SemigroupJson =
            serde_json::from_str(&fs::read_to_string(p)?).map_err(|e| CliError::Config(e.to_string()))?;
        c.semigroup = Some(g);
    }
    if let Some(s) = &a.start {
        c.start = Some(parse_vector(s)?);
    }
    if let Some(s) = &a.subspace {
        c.subspace = Some(s.split(';').map(parse_vector).collect::<Result<_>>()?);
    }
    if let Some(w) = &a.window {
        c.window = Some(parse_window(w)?);
    }
    if let Some(w) = &a.subspace_window {
        c.subspace_window = Some(parse_window(w)?);
    }
    if let Some(e) = a.eps {
        c.epsilon = e;
    }
    if let Some(s) = &a.schedule {
        c.schedule = Some(parse_u64_list(s)?);
    }
    if let Some(w) = &a.weights {
        c.weights = Some(parse_f64_list(w)?);
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
    if let Some(r) = a.random_starts {
        c.random_starts = r;
    }
    if let Some(m) = a.mode {
        c.mode = m;
    }
    c.points_csv |= a.points_csv;
    Ok(c)
}

fn emit(out: Option<&Path>, report: &Report, csv: Option<&str>) -> Result<()> {
    let text = report.to_json_string();
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_atomic(&dir.join("report.json"), text.as_bytes())?;
            if let Some(csv) = csv {
                write_atomic(&dir.join("points.csv"), csv.as_bytes())?;
            }
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn run_command(kind: CommandKind, a: &RunArgs) -> Result<i32> {
    let outcome = commands::run(build_config(kind, a)?)?;
    let mut report = Report::new(kind.name(), serde_json::to_value(&outcome.config)?, outcome.result);
    report.verdict = outcome.verdict;
    report.expected = a.output.expect;
    report.flags = outcome.flags;
    emit(a.output.out.as_deref(), &report, outcome.csv.as_deref())?;
    if let Some(v) = report.verdict {
        eprintln!("verdict: {v}");
    }
    Ok(if report.matches() { EXIT_OK } else { EXIT_MISMATCH })
}

fn run_repro(a: &ReproArgs) -> Result<i32> {
    let ids: Vec<&str> = if a.id == "all" { IDS.to_vec() } else { vec![a.id.as_str()] };
    let mut suites = Vec::new();
    let mut all_pass = true;
    for id in ids {
        let r = repro(id, a.seed)?;
        for c in &r.checks {
            eprintln!("{} {id}: {} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        all_pass &= r.passed();
        suites.push(r);
    }
    let config = json!({ "id": a.id, "seed": a.seed, "suites": suites.iter().map(|s| json!({ "id": s.id, "config": s.config })).collect::<Vec<_>>() });
    let result = json!({ "passed": all_pass, "suites": suites });
    let report = Report::new("repro", config, result);
    let out = a.out.as_ref().map(|d| d.to_path_buf());
    emit(out.as_deref(), &report, None)?;
    Ok(if all_pass { EXIT_OK } else { EXIT_MISMATCH })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Cmd::Kronecker(a) => run_command(CommandKind::Kronecker, a),
        Cmd::Orbit(a) => run_command(CommandKind::Orbit, a),
        Cmd::Probe(a) => run_command(CommandKind::Probe, a),
        Cmd::Normalform(a) => run_command(CommandKind::Normalform, a),
        Cmd::Repro(a) => run_repro(a),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
