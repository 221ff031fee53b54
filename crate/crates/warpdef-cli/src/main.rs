//! Batch front-end for the warpdef toolkit.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "warpdef", version, about = "Warped-convolution deformations of quantum operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deform an operator (the preset Hamiltonian by default).
    Deform,
    /// Run the identity suite.
    Verify,
    /// Low-lying spectrum on a transverse grid.
    Spectrum,
    /// Loop integrals of the induced gauge potential.
    Holonomy,
    /// Gauge potential and field strength by both routes.
    Gauge,
    /// Normal-ordered commutator of two expressions.
    Commutator { lhs: String, rhs: String },
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    model: Option<String>,
    /// Textbook matrix: nine row-major entries or an axial triple.
    #[arg(long = "B", global = true, allow_hyphen_values = true)]
    b: Option<String>,
    /// Generator: coordinate, radial:n or transverse.
    #[arg(long = "Q", global = true)]
    q: Option<String>,
    /// Field axis, 1 to 3.
    #[arg(long, global = true)]
    axis: Option<usize>,
    /// Textbook strength along the axis (default m*Omega).
    #[arg(long, global = true, allow_hyphen_values = true)]
    strength: Option<String>,
    /// Coupling g in P - gA (default -m).
    #[arg(long, global = true, allow_hyphen_values = true)]
    coupling: Option<String>,
    #[arg(long, global = true)]
    potential: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    operator: Option<String>,
    /// Comma-separated name=value pairs.
    #[arg(long, global = true)]
    constants: Option<String>,
    /// N,L
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// json or csv
    #[arg(long, global = true)]
    format: Option<String>,
    /// Comma-separated suite groups; empty selects none.
    #[arg(long, global = true)]
    only: Option<String>,
    /// Run under the reversed commutation sign.
    #[arg(long, global = true)]
    inject_sign_flip: bool,
    /// Comma-separated loop radii.
    #[arg(long, global = true)]
    radius: Option<String>,
    /// Quadrature points per loop.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Loop center x1,x2,x3.
    #[arg(long, global = true, allow_hyphen_values = true)]
    center: Option<String>,
    /// Clustering tolerance for degenerate levels.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Smallest cluster counted as a level.
    #[arg(long, global = true)]
    min_cluster: Option<usize>,
}

impl Flags {
    fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("model", self.model.clone());
        put("B", self.b.clone());
        put("Q", self.q.clone());
        put("axis", self.axis.map(|v| v.to_string()));
        put("strength", self.strength.clone());
        put("coupling", self.coupling.clone());
        put("potential", self.potential.clone());
        put("operator", self.operator.clone());
        put("constants", self.constants.clone());
        put("grid", self.grid.clone());
        put("k", self.k.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("format", self.format.clone());
        put("only", self.only.clone());
        put("inject_sign_flip", self.inject_sign_flip.then(|| "true".to_string()));
        put("radius", self.radius.clone());
        put("points", self.points.map(|v| v.to_string()));
        put("center", self.center.clone());
        put("tol", self.tol.map(|v| v.to_string()));
        put("min_cluster", self.min_cluster.map(|v| v.to_string()));
        m
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Some identity failed; the report is still written.
    Failure,
    Config(String),
    Unsupported(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failure => 1,
            CliError::Config(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.flags.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    cfg.overlay(cli.flags.to_map());
    match cli.command {
        Command::Deform => commands::deform(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Holonomy => commands::holonomy(&cfg),
        Command::Gauge => commands::gauge(&cfg),
        Command::Commutator { lhs, rhs } => commands::commutator(&cfg, &lhs, &rhs),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Failure => eprintln!("warpdef: one or more identities failed"),
                CliError::Config(m) => eprintln!("warpdef: configuration error: {}", m),
                CliError::Unsupported(m) => eprintln!("warpdef: unsupported operator: {}", m),
                CliError::Numeric(m) => eprintln!("warpdef: numeric failure: {}", m),
            }
            ExitCode::from(e.code())
        }
    }
}
