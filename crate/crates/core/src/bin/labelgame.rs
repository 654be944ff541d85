//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on bad
//! input or configuration.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use labelgame::combination::{binary_oracle, CompositeConcept, CompoundConcept, DEFAULT_ENUMERATION_CAP};
use labelgame::experiment::{run_sweep, summarize, write_csv, ExperimentConfig, DEFAULT_THIN};
use labelgame::game::{positive_region_probability, predicted_fixed_point, ElementDistribution};
use labelgame::{verify, Error};

#[derive(Parser)]
#[command(name = "labelgame", version, about = "Concept combination and language-game experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a composite or compound membership from a JSON description.
    Combine {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a reliability sweep and write per-timestep statistics as CSV.
    Simulate(SimulateArgs),
    /// Closed-form and Monte Carlo p+ for an element distribution.
    FixedPoint(FixedPointArgs),
    /// Run the oracle-equivalence suites.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Record every K timesteps.
    #[arg(long, default_value_t = DEFAULT_THIN)]
    thin: usize,
    /// Print a per-reliability summary of the final timestep to stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct FixedPointArgs {
    /// Experiment config; only `element_distribution` is used.
    #[arg(long, conflicts_with_all = ["x1", "x2"])]
    config: Option<PathBuf>,
    /// Interval for x1 as `A,B`.
    #[arg(long, value_parser = parse_interval, requires = "x2")]
    x1: Option<(f64, f64)>,
    /// Interval for x2 as `A,B`.
    #[arg(long, value_parser = parse_interval, requires = "x1")]
    x2: Option<(f64, f64)>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Current weight at which the positive region is evaluated.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `A,B`, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum CombineRequest {
    Composite {
        concept: CompositeConcept,
        #[serde(default)]
        points: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        memberships: Option<Vec<f64>>,
    },
    Compound {
        concept: CompoundConcept,
        #[serde(default)]
        left_points: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        right_points: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        left_memberships: Option<Vec<f64>>,
        #[serde(default)]
        right_memberships: Option<Vec<f64>>,
    },
}

#[derive(Debug, Serialize)]
struct CombineResult {
    membership: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flattened_membership: Option<f64>,
}

enum Failure {
    Verification,
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn memberships_for(
    concept: &CompositeConcept,
    points: Option<Vec<Vec<f64>>>,
    memberships: Option<Vec<f64>>,
    what: &str,
) -> Result<Vec<f64>, Failure> {
    match (points, memberships) {
        (Some(p), None) => Ok(concept.label_memberships(&p)?),
        (None, Some(m)) => Ok(m),
        _ => Err(Failure::Input(format!(
            "give exactly one of {what}points or {what}memberships"
        ))),
    }
}

fn combine(config: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let req: CombineRequest = serde_json::from_str(&read(config)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", config.display())))?;
    let result = match req {
        CombineRequest::Composite {
            concept,
            points,
            memberships,
        } => {
            concept.validate()?;
            let ms = memberships_for(&concept, points, memberships, "")?;
            let membership = concept.membership(&ms)?;
            let oracle = (concept.len() <= DEFAULT_ENUMERATION_CAP)
                .then(|| binary_oracle(&concept.prototype_bits(), concept.weights(), &ms))
                .transpose()?;
            CombineResult {
                membership,
                oracle,
                coefficients: None,
                flattened_membership: None,
            }
        }
        CombineRequest::Compound {
            concept,
            left_points,
            right_points,
            left_memberships,
            right_memberships,
        } => {
            concept.validate()?;
            let left = memberships_for(concept.left(), left_points, left_memberships, "left_")?;
            let right = memberships_for(concept.right(), right_points, right_memberships, "right_")?;
            let membership = concept.membership_two_level(&left, &right)?;
            // the flattened form needs one membership per shared label
            let (coefficients, flattened_membership) = match concept.flatten() {
                Ok(c) if left == right => (Some(c), Some(concept.membership_flattened(&left)?)),
                Ok(c) => (Some(c), None),
                Err(_) => (None, None),
            };
            CombineResult {
                membership,
                oracle: None,
                coefficients,
                flattened_membership,
            }
        }
    };
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, &result).map_err(|e| Failure::Input(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::from_json(&read(&args.config)?)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if args.thin == 0 {
        return Err(Failure::Input("--thin must be at least 1".into()));
    }
    let records = run_sweep(&cfg, args.thin)?;
    write_csv(output(args.out.as_deref())?, &records)?;
    if args.summary {
        for s in summarize(&records)? {
            eprintln!(
                "w={} replicates={} mean_lambda={:.4} mean_sd={:.4}",
                s.w, s.replicates, s.mean_lambda, s.mean_sd
            );
        }
    }
    Ok(())
}

fn fixed_point(args: FixedPointArgs) -> Result<(), Failure> {
    let dist = match (&args.config, args.x1, args.x2) {
        (Some(path), _, _) => ExperimentConfig::from_json(&read(path)?)?.element_distribution,
        (None, Some(x1), Some(x2)) => ElementDistribution::new(x1, x2)?,
        _ => return Err(Failure::Input("give --config or both --x1 and --x2".into())),
    };
    if !(0.0..=1.0).contains(&args.lambda) {
        return Err(Failure::Input("--lambda must lie in [0, 1]".into()));
    }
    let predicted = predicted_fixed_point(&dist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mc = positive_region_probability(&dist, args.lambda, 1.0, args.samples, &mut rng)?;
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "predicted_fixed_point {predicted:.6}")?;
    writeln!(w, "monte_carlo_p_plus {mc:.6} (samples {})", args.samples)?;
    w.flush()?;
    Ok(())
}

fn run_verify(seed: u64) -> Result<(), Failure> {
    let reports = verify::run_all(seed)?;
    let mut ok = true;
    for r in &reports {
        println!("{r}");
        ok &= r.passed();
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Combine { config, out } => combine(&config, out.as_deref()),
        Command::Simulate(args) => simulate(args),
        Command::FixedPoint(args) => fixed_point(args),
        Command::Verify { seed } => run_verify(seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
