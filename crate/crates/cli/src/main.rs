use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use universal_committee::committee::{
    construct_multiwinner, construct_screening, construct_universal,
};
use universal_committee::experiment::{
    adversary_report, bounds_csv, bounds_table, rows_to_csv, run_experiment, verify_instance,
    DomainKind, ExperimentConfig, Rule,
};
use universal_committee::geometry::Norm;
use universal_committee::io::{parse_committee, parse_instance, CommitteeDoc};

#[derive(Parser)]
#[command(
    name = "ucommittee",
    version,
    about = "Universal expert committees for metric voting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a committee and write it as JSON.
    BuildCommittee {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Mode::Universal)]
        mode: Mode,
    },
    /// Run seeded random trials and write one CSV row per trial.
    Experiment {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value = "minimal_regret")]
        rule: String,
    },
    /// Look for a sparse ball in a committee and attack it.
    Adversary {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        committee: PathBuf,
    },
    /// Tabulate the explicit size windows on the unit hypercube.
    Bounds {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        dim: Vec<usize>,
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 2000)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the minimal regret rule on an instance file and certify it.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Norm exponent, a number at least 1 or `inf`.
    #[arg(long, default_value = "2")]
    p: String,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, default_value_t = 5)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// `box` (unit box) or `ball` (radius 1/2 about its center).
    #[arg(long, default_value = "box")]
    domain: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Universal,
    Multiwinner,
    Screening,
}

fn parse_norm(p: &str) -> Result<Norm> {
    let value: f64 = p.parse().with_context(|| format!("norm exponent {p:?}"))?;
    Ok(Norm::lp(value)?)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        bail!("epsilon must be positive, got {epsilon}");
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::BuildCommittee { common, mode } => {
            check_epsilon(common.epsilon)?;
            let norm = parse_norm(&common.p)?;
            let domain = common.domain.parse::<DomainKind>()?.build(common.dim)?;
            let bp = match mode {
                Mode::Universal => {
                    construct_universal(&domain, norm, common.epsilon, common.m, common.k)?
                }
                Mode::Multiwinner => construct_multiwinner(
                    &domain,
                    norm,
                    common.epsilon,
                    common.m,
                    common.k,
                    common.ell,
                )?,
                Mode::Screening => construct_screening(&domain, norm, common.epsilon)?,
            };
            let json = serde_json::to_string_pretty(&CommitteeDoc::from_blueprint(&bp))?;
            emit(common.out.as_deref(), &(json + "\n"))?;
            Ok(true)
        }
        Command::Experiment {
            common,
            seed,
            trials,
            rule,
        } => {
            check_epsilon(common.epsilon)?;
            let cfg = ExperimentConfig {
                seed,
                trials,
                dim: common.dim,
                norm: parse_norm(&common.p)?,
                epsilon: common.epsilon,
                m: common.m,
                k: common.k,
                ell: common.ell,
                rule: rule.parse::<Rule>()?,
                domain: common.domain.parse()?,
            };
            let rows = run_experiment(&cfg)?;
            emit(common.out.as_deref(), &rows_to_csv(&rows))?;
            Ok(rows.iter().all(|r| r.pass))
        }
        Command::Adversary { common, committee } => {
            check_epsilon(common.epsilon)?;
            let norm = parse_norm(&common.p)?;
            let domain = common.domain.parse::<DomainKind>()?.build(common.dim)?;
            let text = fs::read_to_string(&committee)
                .with_context(|| format!("reading {}", committee.display()))?;
            let experts = parse_committee(&text)?.experts(common.dim)?;
            let report =
                adversary_report(&experts, &domain, norm, common.epsilon, common.m, common.k)?;
            emit(
                common.out.as_deref(),
                &(serde_json::to_string_pretty(&report)? + "\n"),
            )?;
            Ok(true)
        }
        Command::Bounds {
            dim,
            p,
            epsilon,
            m,
            k,
            out,
        } => {
            check_epsilon(epsilon)?;
            let rows = bounds_table(&dim, parse_norm(&p)?, epsilon, m, k)?;
            emit(out.as_deref(), &bounds_csv(&rows))?;
            Ok(true)
        }
        Command::Verify { instance, out } => {
            let text = fs::read_to_string(&instance)
                .with_context(|| format!("reading {}", instance.display()))?;
            let report = verify_instance(&parse_instance(&text)?)?;
            emit(
                out.as_deref(),
                &(serde_json::to_string_pretty(&report)? + "\n"),
            )?;
            Ok(report.sound && report.certification_failures.is_empty())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
