//! `discsde` command line: Monte Carlo studies of Euler–Maruyama schemes for
//! SDEs with drift discontinuous across a hypersurface.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, Experiment, RawConfig, RunConfig};
use run::{RunError, EXIT_OK};

#[derive(Parser)]
#[command(name = "discsde", version, about = "Euler-Maruyama studies for SDEs with discontinuous drift")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named by `experiment` in the config file.
    Run(Common),
    /// Strong L^p error against a fine reference grid.
    RunError(Common),
    /// L^p differences between consecutive grids n and 2n.
    RunDiff(Common),
    /// L^p error of the uniform-in-time supremum.
    RunSupError(Common),
    /// Histogram of scaled differences n^exponent |X_n - X_2n|.
    RunHist(Common),
    /// Occupation time near the surface and its decay in n.
    RunOccupation(Common),
    /// Sample the transform bounds and write a certificate.
    CheckTransform(Common),
    /// Check the projection, normal and region properties of the surface.
    CheckGeometry(Common),
    /// List the built-in models.
    ListModels,
}

#[derive(Args, Default)]
struct Common {
    /// Key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
    /// Comma-separated step counts, `2^k` allowed.
    #[arg(long = "n")]
    n: Option<String>,
    /// Finest (reference) grid.
    #[arg(long = "N")]
    big_n: Option<String>,
    /// Number of Monte Carlo paths.
    #[arg(long)]
    m: Option<String>,
    /// Comma-separated moments.
    #[arg(long)]
    p: Option<String>,
    /// Width of the transform's tube.
    #[arg(long)]
    eps: Option<String>,
    /// em or em-transformed.
    #[arg(long)]
    scheme: Option<String>,
}

fn load(common: &Common, experiment: Option<Experiment>) -> Result<RunConfig, RunError> {
    let mut raw = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                ConfigError::Validation(format!("cannot read config {}: {e}", path.display()))
            })?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    let flags = [
        ("model", &common.model),
        ("seed", &common.seed),
        ("threads", &common.threads),
        ("out_dir", &common.out_dir),
        ("n", &common.n),
        ("N", &common.big_n),
        ("m", &common.m),
        ("p", &common.p),
        ("transform.eps", &common.eps),
        ("scheme", &common.scheme),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            raw.set(key, v.clone());
        }
    }
    if let Some(e) = experiment {
        raw.set("experiment", e.name());
    }
    Ok(RunConfig::from_raw(&raw)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, experiment) = match cli.command {
        Command::ListModels => {
            for (name, description) in discsde::model::builtin_models() {
                println!("{name:<10} {description}");
            }
            return ExitCode::from(EXIT_OK);
        }
        Command::Run(c) => (c, None),
        Command::RunError(c) => (c, Some(Experiment::Error)),
        Command::RunDiff(c) => (c, Some(Experiment::Diff)),
        Command::RunSupError(c) => (c, Some(Experiment::SupError)),
        Command::RunHist(c) => (c, Some(Experiment::Hist)),
        Command::RunOccupation(c) => (c, Some(Experiment::Occupation)),
        Command::CheckTransform(c) => (c, Some(Experiment::CheckTransform)),
        Command::CheckGeometry(c) => (c, Some(Experiment::CheckGeometry)),
    };
    let result = load(&common, experiment).and_then(|config| {
        let files = run::run(&config)?;
        Ok((config, files))
    });
    match result {
        Ok((config, files)) => {
            for f in files {
                println!("{}", config.out_dir.join(f).display());
            }
            ExitCode::from(EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
