//! `tropfan`: check, build, transform, and count with exact tropical fans.
//!
//! Every command reads and writes the shared JSON encodings. Exit codes:
//! 0 on success, 2 when the sampled condition data stayed non generic
//! through all retries, 1 for every other failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use tropfan_core::enumeration::{
    count_with_retries, kontsevich_degree, sample_point_constraints, CountProblem, EnumError,
};
use tropfan_core::fan::ValidationConfig;
use tropfan_core::json::{
    count_problem_from_json, count_result_to_json, degree_from_json, morphism_from_json,
    weighted_fan_from_json, weighted_fan_to_json, JsonError,
};
use tropfan_core::moduli::{build_m0n, stable_maps_fan, ModuliError};
use tropfan_core::morphism::MorphismError;
use tropfan_core::tropical::{certify_irreducible, WeightedFan};

#[derive(Parser)]
#[command(name = "tropfan", version, about = "exact tropical fans, morphisms, moduli, and curve counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate, map, and measure weighted fans.
    Fan {
        #[command(subcommand)]
        cmd: FanCmd,
    },
    /// Build moduli fans of rational curves and of parameterized maps.
    Moduli {
        #[command(subcommand)]
        cmd: ModuliCmd,
    },
    /// Count curves through generic conditions.
    Count {
        #[command(subcommand)]
        cmd: CountCmd,
    },
}

#[derive(Subcommand)]
enum FanCmd {
    /// Parse a weighted fan and verify its structure.
    Check {
        /// fan JSON file
        path: PathBuf,
        /// also require the balancing condition
        #[arg(long)]
        balanced: bool,
    },
    /// Compute the image fan of a morphism with its induced weights.
    Image {
        /// morphism JSON file
        #[arg(long)]
        morphism: PathBuf,
        /// write the image here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the degree of a morphism over sampled generic points.
    Degree {
        /// morphism JSON file
        #[arg(long)]
        morphism: PathBuf,
        /// number of independent sample points that must agree
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ModuliCmd {
    /// Build the moduli fan of abstract rational curves with n ends.
    Build {
        #[arg(long)]
        n: usize,
        /// write the fan here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the moduli fan of parameterized maps with n contracted ends
    /// and the given degree into rank r space.
    StableMaps {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// degree JSON file
        #[arg(long)]
        degree: PathBuf,
        /// write the fan here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CountCmd {
    /// Count curves of a degree through sampled generic points.
    Curves {
        /// ambient rank
        #[arg(long)]
        r: usize,
        /// degree JSON file
        #[arg(long)]
        degree: PathBuf,
        /// only "auto" is supported: the point count balancing the dimension
        #[arg(long, default_value = "auto")]
        points: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// resampling attempts before giving up as non generic
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Evaluate the combined incidence and cross-ratio degree of a
    /// problem given explicitly in a config file.
    Kontsevich {
        /// count problem JSON file
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error("the fan is not balanced around a codimension one cone (residual {residual:?})")]
    Unbalanced { residual: Vec<String> },
    #[error("the target fan has no irreducibility certificate; its degree is not defined")]
    NotIrreducible,
    #[error("--points only supports \"auto\", got {0:?}")]
    BadPoints(String),
    #[error("no integer point count balances the dimension: r = {r}, degree has {m} directions")]
    NoBalancingPointCount { r: usize, m: usize },
}

impl CliError {
    /// 2 when genericity failed after all retries, 1 otherwise
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Enumeration(EnumError::NotGeneric)
            | CliError::Enumeration(EnumError::RetriesExhausted(_))
            | CliError::Morphism(MorphismError::NotGeneric(_)) => 2,
            CliError::Json(JsonError::Enumeration(EnumError::NotGeneric))
            | CliError::Json(JsonError::Enumeration(EnumError::RetriesExhausted(_))) => 2,
            _ => 1,
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(serde_json::from_str(&text).map_err(JsonError::from)?)
}

fn emit(value: &Value, out: Option<&Path>) -> Result<(), CliError> {
    let text = format!("{value:#}");
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_weighted_fan(path: &Path) -> Result<WeightedFan, CliError> {
    Ok(weighted_fan_from_json(&read_json(path)?, &ValidationConfig::default())?)
}

fn fan_check(path: &Path, balanced: bool) -> Result<(), CliError> {
    let fan = load_weighted_fan(path)?;
    println!(
        "valid weighted fan: ambient rank {}, dimension {}, {} maximal cones",
        fan.fan().ambient_rank(),
        fan.dim(),
        fan.weights().len(),
    );
    if balanced {
        if let Some(violation) = fan.balance_violation() {
            return Err(CliError::Unbalanced {
                residual: violation.residual.iter().map(|x| x.to_string()).collect(),
            });
        }
        println!("balanced");
    }
    Ok(())
}

fn fan_image(path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let f = morphism_from_json(&read_json(path)?, &ValidationConfig::default())?;
    emit(&weighted_fan_to_json(&f.image_fan()), out)
}

fn fan_degree(path: &Path, trials: usize, seed: u64) -> Result<(), CliError> {
    let f = morphism_from_json(&read_json(path)?, &ValidationConfig::default())?;
    let certificate = certify_irreducible(f.target()).ok_or(CliError::NotIrreducible)?;
    let degree = f.degree(&certificate, trials, seed)?;
    emit(
        &json!({ "degree": degree.to_string(), "trials": trials, "seed": seed }),
        None,
    )
}

fn moduli_build(n: usize, out: Option<&Path>) -> Result<(), CliError> {
    let marked = build_m0n(n)?;
    let fan = WeightedFan::with_unit_weights(marked.fan().clone());
    emit(&weighted_fan_to_json(&fan), out)
}

fn moduli_stable_maps(
    n: usize,
    r: usize,
    degree: &Path,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let delta = degree_from_json(&read_json(degree)?)?;
    let fan = stable_maps_fan(n, r, &delta)?;
    emit(&weighted_fan_to_json(&fan), out)
}

fn count_curves(
    r: usize,
    degree: &Path,
    points: &str,
    seed: u64,
    trials: usize,
) -> Result<(), CliError> {
    if points != "auto" {
        return Err(CliError::BadPoints(points.to_owned()));
    }
    let delta = degree_from_json(&read_json(degree)?)?;
    let m = delta.len();
    // with every contracted end pinned to a point, n ends cut n(r-1)
    // of the r + (n + m) - 3 moduli dimensions
    let n = (r > 1 && (r + m - 3).is_multiple_of(r - 1))
        .then(|| (r + m - 3) / (r - 1))
        .ok_or(CliError::NoBalancingPointCount { r, m })?;
    let make = |s: u64| {
        CountProblem::new(r, n, delta.clone(), sample_point_constraints(r, n, s), None)
    };
    let (result, used_seed) = count_with_retries(make, seed, trials)?;
    emit(&count_result_to_json(&result, used_seed), None)
}

fn count_kontsevich(config: &Path) -> Result<(), CliError> {
    let problem = count_problem_from_json(&read_json(config)?)?;
    let degree = kontsevich_degree(&problem)?;
    emit(&json!({ "degree": degree.to_string() }), None)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fan { cmd } => match cmd {
            FanCmd::Check { path, balanced } => fan_check(&path, balanced),
            FanCmd::Image { morphism, out } => fan_image(&morphism, out.as_deref()),
            FanCmd::Degree { morphism, trials, seed } => fan_degree(&morphism, trials, seed),
        },
        Command::Moduli { cmd } => match cmd {
            ModuliCmd::Build { n, out } => moduli_build(n, out.as_deref()),
            ModuliCmd::StableMaps { n, r, degree, out } => {
                moduli_stable_maps(n, r, &degree, out.as_deref())
            }
        },
        Command::Count { cmd } => match cmd {
            CountCmd::Curves { r, degree, points, seed, trials } => {
                count_curves(r, &degree, &points, seed, trials)
            }
            CountCmd::Kontsevich { config } => count_kontsevich(&config),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
