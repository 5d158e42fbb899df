use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, CliError, Report, StarSelect, ZetaSelect};
use crate::config::{RunConfig, Scalar};

#[derive(Debug, Parser)]
#[command(name = "kappa", version, about = "Checks and reports for kappa-Minkowski space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan the weighted spectral zeta function, its poles and residues
    Zeta(ZetaArgs),
    /// Check the star algebra and the twisted trace on sampled packets
    Star(StarArgs),
    /// Twisted Chevalley-Eilenberg kernels of the truncated complex
    Homology(HomologyArgs),
    /// Summability and spectral dimension of the weighted resolvent
    Specdim(SpecdimArgs),
}

/// Flags shared by every subcommand. Values given here override `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON run configuration; explicit flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// deformation parameter, decimal or p/q
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// mass parameter; accepts multiples of lambda such as -3lambda
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// output directory (default kappa-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    #[command(flatten)]
    pub common: Common,
    /// z-line start:end:count, e.g. 4+0i:8+0i:17
    #[arg(long, allow_hyphen_values = true)]
    pub line: Option<String>,
    /// weight ω(f) multiplying the scan (default 1)
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub poles: bool,
    #[arg(long)]
    pub residue: bool,
    #[arg(long)]
    pub classical: bool,
}

#[derive(Debug, Args)]
pub struct StarArgs {
    #[command(flatten)]
    pub common: Common,
    /// scan the twist exponent s over 0..=n
    #[arg(long)]
    pub kms_scan: bool,
    /// write the three sampled fixtures as containers into the output directory
    #[arg(long)]
    pub save_fixtures: bool,
    /// load three fixture containers instead of sampling
    #[arg(long, num_args = 3, value_names = ["F", "G", "H"])]
    pub fixtures: Option<Vec<PathBuf>>,
    #[arg(long)]
    pub n0: Option<usize>,
    #[arg(long)]
    pub ns: Option<usize>,
    /// spectral or lagrange:K
    #[arg(long)]
    pub interpolation: Option<String>,
}

#[derive(Debug, Args)]
pub struct HomologyArgs {
    #[command(flatten)]
    pub common: Common,
    /// degree bound of the truncated complex
    #[arg(long)]
    pub d: Option<u32>,
    /// scan the top kernel over μ, as --mu-scan=LIST; without a value uses μ/λ ∈ {1, 0, −1/2, …}
    #[arg(long, num_args = 0..=1, require_equals = true, value_name = "LIST")]
    pub mu_scan: Option<Option<String>>,
}

#[derive(Debug, Args)]
pub struct SpecdimArgs {
    #[command(flatten)]
    pub common: Common,
    /// weight exponent
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
}

fn flags(c: &Common) -> RunConfig {
    RunConfig {
        n: c.n,
        lambda: c.lambda.clone().map(Scalar::Text),
        mu: c.mu.clone().map(Scalar::Text),
        tol: c.tol,
        seed: c.seed,
        out: c.out.clone(),
        ..RunConfig::default()
    }
}

fn resolve(c: &Common, top: RunConfig) -> Result<RunConfig, CliError> {
    let base = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    Ok(base.merged_under(flags(c).merged_under(top)))
}

fn dispatch(command: Command) -> Result<Report, CliError> {
    match command {
        Command::Zeta(a) => {
            let top = RunConfig {
                line: a.line,
                omega: a.omega,
                ..RunConfig::default()
            };
            let select = ZetaSelect {
                scan: false,
                poles: a.poles,
                residue: a.residue,
                classical: a.classical,
            };
            commands::cmd_zeta(resolve(&a.common, top)?, select)
        }
        Command::Star(a) => {
            let top = RunConfig {
                n0: a.n0,
                ns: a.ns,
                interpolation: a.interpolation,
                ..RunConfig::default()
            };
            let select = StarSelect {
                kms_scan: a.kms_scan,
                save_fixtures: a.save_fixtures,
                fixtures: a.fixtures,
            };
            commands::cmd_star(resolve(&a.common, top)?, select)
        }
        Command::Homology(a) => {
            let top = RunConfig {
                d: a.d,
                mu_scan: a
                    .mu_scan
                    .clone()
                    .flatten()
                    .map(|s| s.split(',').map(|t| Scalar::Text(t.to_string())).collect()),
                ..RunConfig::default()
            };
            commands::cmd_homology(resolve(&a.common, top)?, a.mu_scan.is_some())
        }
        Command::Specdim(a) => {
            let top = RunConfig {
                t: a.t,
                ..RunConfig::default()
            };
            commands::cmd_specdim(resolve(&a.common, top)?)
        }
    }
}

/// Run a parsed command line, print the report and return the exit code:
/// 0 when every check passes, 2 for configuration errors, 3 for numerical
/// or tolerance failures.
pub fn run(cli: Cli) -> u8 {
    match dispatch(cli.command) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.pass {
                0
            } else {
                eprintln!("error: {} checks failed", report.command);
                3
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
