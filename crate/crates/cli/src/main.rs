//! Command-line front end: runs scenario sweeps, cross-validates the quantum
//! and classical bounds, and writes JSON/CSV reports.
//!
//! Exit codes: 0 when every requested scenario completed with agreement
//! between all oracles that ran, 2 on validation errors, 3 on oracle
//! disagreement, 4 when classical analysis was requested but no oracle could
//! run within its budget.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde::Deserialize;

use genbell::lhv::DEFAULT_BRUTE_FORCE_BUDGET;
use genbell::report::{exit_code, render_text, sweep, to_csv, to_json, Method, ScenarioOptions};

#[derive(Parser, Debug)]
#[command(name = "genbell", version, about = "Multi-setting Bell bound certification for qudit GHZ scenarios", long_about = None)]
struct Cli {
    /// Number of parties (classical bounds require 3)
    #[arg(long)]
    parties: Option<usize>,

    /// Settings per party; repeat or comma-separate for a sweep (e.g. 2,3,4)
    #[arg(long, value_delimiter = ',')]
    settings: Option<Vec<usize>>,

    /// Single outcome dimension
    #[arg(long)]
    dim: Option<usize>,

    /// Inclusive dimension range, e.g. 2..6
    #[arg(long)]
    dims: Option<String>,

    /// Classical oracle selection: brute, congruence, or both
    #[arg(long)]
    method: Option<Method>,

    /// Assignment budget for the exhaustive classical search
    #[arg(long)]
    budget: Option<u128>,

    /// Write the full JSON report to this path
    #[arg(long)]
    json: Option<PathBuf>,

    /// Write the CSV summary to this path
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Include minimal infeasible constraint subsets with certificates
    #[arg(long)]
    certificates: bool,

    /// Run the dense eigenvalue verification of the quantum bound
    #[arg(long)]
    eigencheck: bool,

    /// Optional JSON config file with the same keys as the flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    parties: Option<usize>,
    settings: Option<Vec<usize>>,
    dim: Option<usize>,
    dims: Option<String>,
    method: Option<String>,
    budget: Option<u128>,
    json: Option<PathBuf>,
    csv: Option<PathBuf>,
    certificates: Option<bool>,
    eigencheck: Option<bool>,
}

fn parse_dim_range(spec: &str) -> Result<Vec<usize>, String> {
    let (lo, hi) = spec
        .split_once("..")
        .ok_or_else(|| format!("invalid dimension range '{spec}' (expected a..b)"))?;
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|_| format!("invalid range start '{lo}'"))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|_| format!("invalid range end '{hi}'"))?;
    Ok((lo..=hi).collect())
}

fn run() -> Result<i32, String> {
    let cli = Cli::parse();

    let config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|err| format!("cannot read config {}: {err}", path.display()))?;
            serde_json::from_str::<ConfigFile>(&text)
                .map_err(|err| format!("invalid config {}: {err}", path.display()))?
        }
        None => ConfigFile::default(),
    };

    let parties = cli.parties.or(config.parties).unwrap_or(3);
    let settings = cli.settings.or(config.settings).unwrap_or_else(|| vec![3]);
    let method = match (cli.method, config.method) {
        (Some(method), _) => method,
        (None, Some(text)) => text.parse()?,
        (None, None) => Method::Both,
    };
    let budget = cli
        .budget
        .or(config.budget)
        .unwrap_or(DEFAULT_BRUTE_FORCE_BUDGET);
    let json_path = cli.json.or(config.json);
    let csv_path = cli.csv.or(config.csv);
    let certificates = cli.certificates || config.certificates.unwrap_or(false);
    let eigencheck = cli.eigencheck || config.eigencheck.unwrap_or(false);

    let dim = cli.dim.or(config.dim);
    let dims_spec = cli.dims.or(config.dims);
    let dims: Vec<usize> = match (dim, dims_spec) {
        (Some(_), Some(_)) => {
            return Err("specify either --dim or --dims, not both".into());
        }
        (Some(d), None) => vec![d],
        (None, Some(spec)) => parse_dim_range(&spec)?,
        (None, None) => {
            return Err("one of --dim or --dims is required".into());
        }
    };

    let options = ScenarioOptions {
        method,
        budget,
        eigencheck,
        certificates,
        ..ScenarioOptions::default()
    };
    let run = sweep(parties, &settings, &dims, &options);

    print!("{}", render_text(&run));
    if let Some(path) = json_path {
        fs::write(&path, to_json(&run))
            .map_err(|err| format!("cannot write {}: {err}", path.display()))?;
    }
    if let Some(path) = csv_path {
        fs::write(&path, to_csv(&run))
            .map_err(|err| format!("cannot write {}: {err}", path.display()))?;
    }
    Ok(exit_code(&run))
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
