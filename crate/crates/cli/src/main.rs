//! `qwalk`: run, fit and check two-dimensional coined quantum walks.

mod config;
mod run;
mod tools;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, NumberText, PartialConfig};

/// Exit status for a fit that did not reach the success threshold.
pub const EXIT_NOT_REACHABLE: u8 = 3;
/// Exit status for colliding frequency encodings.
pub const EXIT_COLLISION: u8 = 4;

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Two-dimensional coined quantum walk simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a walk and write the selected outputs.
    Run(RunArgs),
    /// Fit optical parameters to a 4x4 unitary given as a matrix JSON file.
    Fit(FitArgs),
    /// Check the built-in parameter presets against the reference coins.
    VerifyPresets,
    /// List sites sharing an encoding frequency.
    DetectCollisions(CollisionArgs),
    /// Print the default configuration as TOML.
    Defaults,
}

#[derive(Args)]
struct EncodingArgs {
    /// Carrier frequency. Integers and p/q are exact; other values are decimals.
    #[arg(long = "omega-0", allow_hyphen_values = true)]
    omega_0: Option<String>,
    /// Frequency step per unit of x.
    #[arg(long = "omega-x", allow_hyphen_values = true)]
    omega_x: Option<String>,
    /// Frequency step per unit of y.
    #[arg(long = "omega-y", allow_hyphen_values = true)]
    omega_y: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coin preset (grover, dft, dft-prime) or 4x4 matrix JSON file.
    #[arg(long, conflicts_with = "coin_params")]
    coin: Option<String>,
    /// Optical parameter preset (grover, dft) or parameter file.
    #[arg(long = "coin-params")]
    coin_params: Option<String>,
    #[arg(long)]
    steps: Option<u64>,
    /// plane or line-two-coins.
    #[arg(long)]
    mode: Option<String>,
    /// Initial state preset (symmetric, r, l, u, d) or state file.
    #[arg(long)]
    initial: Option<String>,
    #[command(flatten)]
    encoding: EncodingArgs,
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Comma list of state, probability, marginals, slices, spectrum, moments, coin.
    #[arg(long, value_delimiter = ',')]
    emit: Option<Vec<String>>,
    /// Swap the l and u rows and columns of the coin.
    #[arg(long = "permute-lu")]
    permute_lu: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Run on an L x L torus instead of the unbounded plane.
    #[arg(long, value_name = "L")]
    periodic: Option<usize>,
    /// Report coin deviations from the reference matrices.
    #[arg(long)]
    verify: bool,
}

impl RunArgs {
    fn into_partial(self) -> (Option<PathBuf>, PartialConfig) {
        let flags = PartialConfig {
            coin: self.coin,
            coin_params: self.coin_params,
            steps: self.steps,
            mode: self.mode,
            initial: self.initial,
            omega_0: self.encoding.omega_0.map(NumberText::Text),
            omega_x: self.encoding.omega_x.map(NumberText::Text),
            omega_y: self.encoding.omega_y.map(NumberText::Text),
            out_dir: self.out_dir,
            emit: self.emit,
            permute_lu: self.permute_lu.then_some(true),
            seed: self.seed,
            periodic: self.periodic,
            verify: self.verify.then_some(true),
        };
        (self.config, flags)
    }
}

#[derive(Args)]
struct FitArgs {
    /// Target matrix JSON file.
    target: PathBuf,
    /// Where to write the fitted parameters.
    #[arg(long, default_value = "fit_params.toml")]
    out: PathBuf,
    #[arg(long, default_value_t = config::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long = "max-iterations", default_value_t = 2000)]
    max_iterations: usize,
    /// Phase-free residual at or below which the fit counts as converged.
    #[arg(long, default_value_t = 1e-16)]
    threshold: f64,
}

#[derive(Args)]
struct CollisionArgs {
    /// TOML configuration file supplying the frequencies.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    encoding: EncodingArgs,
    /// Check sites with |x|, |y| <= extent.
    #[arg(long, default_value_t = 10)]
    extent: u32,
}

fn partial_from(config: Option<PathBuf>, flags: PartialConfig) -> anyhow::Result<PartialConfig> {
    let file = match config {
        Some(path) => PartialConfig::from_file(&path)?,
        None => PartialConfig::default(),
    };
    Ok(file.overridden_by(flags))
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run(args) => {
            let (config, flags) = args.into_partial();
            let cfg = partial_from(config, flags)?.resolve()?;
            run::run(&cfg)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit(args) => tools::fit(&args.target, &args.out, args.seed, args.starts, args.max_iterations, args.threshold),
        Command::VerifyPresets => tools::verify_presets(),
        Command::DetectCollisions(args) => {
            let flags = PartialConfig {
                omega_0: args.encoding.omega_0.map(NumberText::Text),
                omega_x: args.encoding.omega_x.map(NumberText::Text),
                omega_y: args.encoding.omega_y.map(NumberText::Text),
                ..Default::default()
            };
            let cfg = partial_from(args.config, flags)?.resolve()?;
            tools::detect(&cfg.encoding()?, args.extent)
        }
        Command::Defaults => {
            print!("{}", config::defaults_toml());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<qwalk_core::Error>() {
        Some(qwalk_core::Error::Collision { .. }) => EXIT_COLLISION,
        Some(qwalk_core::Error::InvalidArgument(_) | qwalk_core::Error::Parse { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if let Some(qwalk_core::Error::Collision { pairs }) = err.downcast_ref::<qwalk_core::Error>() {
                tools::print_pairs_to_stderr(pairs);
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
