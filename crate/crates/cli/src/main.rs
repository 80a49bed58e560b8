use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use polylip::io::ProblemFile;
use polylip::Error;

mod commands;
mod render;

/// Relative Lipschitz-like analysis of polyhedral set-valued mappings and piecewise-linear
/// functions.
///
/// Reads a JSON problem file, writes `report.json` and `report.md` into the output directory.
/// Exit status: 0 success, 1 acceptance or replay failure, 2 malformed input, 3 input outside
/// the domain of the analysis, 4 budget or resource exhausted.
#[derive(Parser, Debug)]
#[command(name = "polylip", version, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// Problem file, or `-` for standard input.
    #[arg(long = "in", value_name = "FILE", global = true)]
    input: Option<PathBuf>,
    /// Directory for report.json, report.md and witness files (default: current directory).
    #[arg(long, value_name = "DIR", global = true)]
    out: Option<PathBuf>,
    /// JSON file with defaults for any of the flags below; flags take precedence.
    #[arg(long, value_name = "FILE", global = true)]
    config: Option<PathBuf>,
    /// Comparison tolerance (overrides POLYLIP_TOL and the config file).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for sampling; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Sampling seed (overrides the problem's `sampling.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sampled pairs per radius (overrides `sampling.pairs_per_radius`).
    #[arg(long, global = true)]
    pairs: Option<usize>,
    /// Reference vector v̄, comma separated (overrides `query.v`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, global = true)]
    v: Option<Vec<f64>>,
    /// Candidate modulus κ to test (overrides `query.kappa`).
    #[arg(long, global = true)]
    kappa: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide the Lipschitz-like property relative to X and compute the modulus.
    Criterion,
    /// Exact modulus of a mapping or function relative to X.
    Modulus,
    /// Classical and projectional coderivatives as unions of cones.
    Coderivative,
    /// Basic, horizon and projectional subdifferentials of a function.
    Subdiff,
    /// Level-set mapping α ↦ {x : f(x) - ⟨v̄, x⟩ ≤ α} at (f(x̄) - ⟨v̄, x̄⟩, x̄).
    Levelset,
    /// Face-by-face analysis of a support function.
    Sublinear,
    /// Sampled lower bounds on the modulus from difference quotients.
    Estimate {
        /// Re-evaluate a witness file written by an earlier run instead of sampling.
        #[arg(long, value_name = "WITNESS")]
        replay: Option<PathBuf>,
    },
    /// Run the acceptance suite and print a pass/fail table.
    ReproducePaper {
        /// Criteria to run, comma separated (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
    },
}

/// Config-file equivalents of the flags.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct Config {
    out: Option<PathBuf>,
    tol: Option<f64>,
    threads: Option<usize>,
    seed: Option<u64>,
    pairs: Option<usize>,
    v: Option<Vec<f64>>,
    kappa: Option<f64>,
}

/// Settings after merging flags, environment and config file.
#[derive(Debug)]
pub struct Settings {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub pairs: Option<usize>,
    pub v: Option<Vec<f64>>,
    pub kappa: Option<f64>,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Schema(_) => 2,
            Error::Domain(_) | Error::Unsupported(_) => 3,
            Error::Budget(_) | Error::Numerical(_) => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

pub fn schema(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: format!("schema error: {}", msg.into()) }
}

/// What a subcommand produced.
pub struct Output {
    pub json: serde_json::Value,
    pub markdown: String,
    /// Extra files written next to the reports.
    pub files: Vec<(String, String)>,
    /// Printed to standard output.
    pub summary: String,
    pub success: bool,
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| schema(format!("standard input: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| schema(format!("{}: {e}", path.display())))
}

fn settings(opts: Opts) -> Result<Settings, Failure> {
    let config: Config = match &opts.config {
        Some(p) => serde_json::from_str(&read_text(p)?).map_err(|e| schema(format!("{}: {e}", p.display())))?,
        None => Config::default(),
    };
    if let Some(t) = opts.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(schema("--tol must be a positive number"));
        }
        polylip::tolerance::set_tau(t);
    } else if std::env::var_os(polylip::tolerance::ENV_VAR).is_none() {
        if let Some(t) = config.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(schema("config tol must be a positive number"));
            }
            polylip::tolerance::set_tau(t);
        }
    }
    if let Some(n) = opts.threads.or(config.threads) {
        if n == 0 {
            return Err(schema("threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure { code: 4, message: e.to_string() })?;
    }
    Ok(Settings {
        out: opts.out.or(config.out).unwrap_or_else(|| PathBuf::from(".")),
        seed: opts.seed.or(config.seed),
        pairs: opts.pairs.or(config.pairs),
        v: opts.v.or(config.v),
        kappa: opts.kappa.or(config.kappa),
    })
}

fn load_problem(input: Option<&Path>) -> Result<ProblemFile, Failure> {
    let path = input.ok_or_else(|| schema("--in is required for this subcommand"))?;
    Ok(ProblemFile::parse(&read_text(path)?)?)
}

fn write_outputs(dir: &Path, out: &Output) -> Result<(), Failure> {
    let io = |p: &Path, e: std::io::Error| Failure { code: 4, message: format!("{}: {e}", p.display()) };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut files = vec![
        ("report.json".to_string(), serde_json::to_string_pretty(&out.json).expect("plain data") + "\n"),
        ("report.md".to_string(), out.markdown.clone()),
    ];
    files.extend(out.files.iter().cloned());
    for (name, text) in files {
        let p = dir.join(name);
        fs::write(&p, text).map_err(|e| io(&p, e))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let input = cli.opts.input.clone();
    let st = settings(cli.opts)?;
    let out = match cli.command {
        Command::ReproducePaper { criteria } => commands::reproduce(criteria.as_deref())?,
        command => {
            let mut problem = load_problem(input.as_deref())?;
            commands::apply_overrides(&mut problem, &st)?;
            match command {
                Command::Criterion => commands::criterion(&problem)?,
                Command::Modulus => commands::modulus(&problem)?,
                Command::Coderivative => commands::coderivative(&problem)?,
                Command::Subdiff => commands::subdiff(&problem)?,
                Command::Levelset => commands::levelset(&problem)?,
                Command::Sublinear => commands::sublinear(&problem)?,
                Command::Estimate { replay: None } => commands::estimate(&problem)?,
                Command::Estimate { replay: Some(w) } => commands::replay(&problem, &read_text(&w)?)?,
                Command::ReproducePaper { .. } => unreachable!(),
            }
        }
    };
    write_outputs(&st.out, &out)?;
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.summary);
            if out.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("polylip: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
