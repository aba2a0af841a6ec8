use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use committee::io::{self, InstanceDocument};
use committee::rational::{self, Rational};
use committee::reductions::kernelize_with;
use committee::report::{Parameters, RunReport, Stats, Verdict};
use committee::solvers;
use committee::testkit::{gen_kdd_free, GenRule, GeneratorSpec};
use committee::{Instance, Overrides, SolveOutcome};

#[derive(Parser)]
#[command(name = "committee", version, about = "Committee selection under Thiele scoring rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverName {
    Exact,
    Greedy,
    Fptas,
    Additive,
    Colorcoding,
    Pav,
    Delta,
}

#[derive(clap::Args)]
struct OverrideArgs {
    /// Degree bound W for the sunflower rule.
    #[arg(long = "override-W", value_parser = parse_rational)]
    degree_bound: Option<Rational>,
    /// Sunflower size w.
    #[arg(long = "override-w")]
    sunflower_size: Option<usize>,
    /// Number of top candidates r.
    #[arg(long = "override-r")]
    r: Option<usize>,
}

impl OverrideArgs {
    fn build(&self) -> Overrides {
        Overrides {
            degree_bound: self.degree_bound.clone(),
            sunflower_size: self.sunflower_size,
            r: self.r,
            case: None,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print a JSON report.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        solver: SolverName,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Option<Rational>,
        /// Threshold, replacing the one in the document.
        #[arg(long, value_parser = parse_rational)]
        t: Option<Rational>,
        /// Committee size, replacing the one in the document.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        reps: Option<u64>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Write a (1 - ε)-approximate kernel and print the trace.
    Kernelize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Print d, Δ_C, δ and λ_min.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate a random K_{d,d}-free instance.
    Gen {
        #[arg(long)]
        candidates: usize,
        #[arg(long)]
        voters: usize,
        #[arg(long)]
        max_d: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        duplicates: usize,
        #[arg(long, default_value_t = 3)]
        max_voter_degree: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "pav")]
        rule: GenRule,
        /// Write here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    rational::parse(text).map_err(|e| e.to_string())
}

fn load(path: &PathBuf) -> Result<(InstanceDocument, Instance)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = InstanceDocument::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    let instance = io::document_to_instance(&doc).with_context(|| format!("loading {}", path.display()))?;
    Ok((doc, instance))
}

#[allow(clippy::too_many_arguments)]
fn solve(
    input: &PathBuf,
    solver: SolverName,
    epsilon: Option<Rational>,
    t: Option<Rational>,
    k: Option<usize>,
    seed: u64,
    reps: Option<u64>,
    overrides: Overrides,
) -> Result<RunReport> {
    let (doc, mut instance) = load(input)?;
    if let Some(k) = k {
        instance = instance.with_k(k);
    }
    if let Some(t) = &t {
        instance = instance.with_threshold(Some(instance.to_internal(t)));
    }
    if !overrides.is_empty() && !matches!(solver, SolverName::Fptas) {
        bail!("--override-* flags only apply to the fptas solver");
    }
    let need_eps = || epsilon.clone().context("--epsilon is required for this solver");
    let outcome: SolveOutcome = match solver {
        SolverName::Exact => solvers::brute_force(&instance)?,
        SolverName::Greedy => solvers::greedy_outcome(&instance),
        SolverName::Fptas => solvers::fptas_with(&instance, &need_eps()?, &overrides)?,
        SolverName::Additive => solvers::additive(&instance)?,
        SolverName::Colorcoding => solvers::color_coding(&instance, seed, reps)?,
        SolverName::Pav => solvers::pav_dispatch(&instance, seed, reps)?,
        SolverName::Delta => solvers::decide_by_delta(&instance)?,
    };
    let mut report = outcome.report;
    report.input = Some(serde_json::to_value(&doc)?);
    Ok(report)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { input, solver, epsilon, t, k, seed, reps, overrides } => {
            let report = solve(&input, solver, epsilon, t, k, seed, reps, overrides.build())?;
            println!("{}", report.to_json());
            Ok(match report.verdict {
                Verdict::Committee => ExitCode::SUCCESS,
                Verdict::NoInstance => ExitCode::from(1),
            })
        }
        Command::Kernelize { input, epsilon, output, overrides } => {
            let (doc, instance) = load(&input)?;
            let overrides = overrides.build();
            let reduced = kernelize_with(&instance, &epsilon, &overrides)?;
            fs::write(&output, io::write_instance(&reduced.instance))
                .with_context(|| format!("writing {}", output.display()))?;
            let report = RunReport {
                solver: "kernelize".into(),
                verdict: Verdict::Committee,
                committee: None,
                score: None,
                parameters: Parameters {
                    k: instance.k(),
                    t: instance.threshold().map(|t| instance.to_original(t)),
                    epsilon: Some(epsilon),
                    seed: None,
                    reps: None,
                    overrides,
                },
                stats: Stats::for_instance(&instance, instance.degree_stats()),
                trace: Some(reduced.trace),
                input: Some(serde_json::to_value(&doc)?),
            };
            println!("{}", report.to_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { input } => {
            let (_, instance) = load(&input)?;
            let stats = instance.degree_stats();
            let summary = json!({
                "candidates": instance.graph().candidate_count(),
                "voters": instance.graph().voter_count(),
                "d": stats.d,
                "d_determined": stats.d_determined,
                "delta_c": stats.delta_c,
                "delta_v": stats.delta_v,
                "lambda_min": rational::format(&instance.to_original(instance.family().lambda_min())),
                "lambda_max": rational::format(instance.scale()),
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { candidates, voters, max_d, seed, duplicates, max_voter_degree, k, rule, output } => {
            let spec = GeneratorSpec { candidates, voters, max_d, max_voter_degree, duplicates, rule, k, seed };
            let text = io::write_instance(&gen_kdd_free(&spec)?);
            match output {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
