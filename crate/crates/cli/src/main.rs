mod artifact;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Exit status 1: a check ran and failed. Exit status 2: bad invocation or
/// unreadable input.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
}

impl From<l22embed::Error> for CliError {
    fn from(e: l22embed::Error) -> Self {
        use l22embed::Error::*;
        match e {
            ConstraintViolated(_) | Degenerate(_) => CliError::Verification(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

const SCHEMAS: &str = "\
File formats (all JSON; every written file also carries a `meta` object with
meta_version, tool_version, command, parameters, input_hashes (sha256) and,
unless --deterministic, timestamp_unix):

  points     {\"n\": int, \"d\": int, \"points\": [[f64; d]; n]}
  graph      {\"n\": int, \"edges\": [{\"i\": int, \"j\": int, \"w\": f64}]}
  instance   {\"cost\": graph, \"demand\": graph}
  gram       {\"n\": int, \"X\": [[f64; n]; n], \"phi_sdp\": f64}
  embedding  {\"method\": str, \"A\": [[f64]], \"p\": [f64] (optional)}
  outcome    {\"cut\": [int], \"phi\", \"phi_sdp\", \"ratio\", \"guarantee\" (null
             unless certified), \"lambda_r\", \"r\", \"delta\", ...}
  verify     {\"items\": [{\"claim\", \"measured\", \"bound\", \"ok\", \"witness\"}], \"ok\"}

Exit status: 0 success, 1 verification failure, 2 usage error or malformed input.";

#[derive(Parser, Debug)]
#[command(name = "l22embed", version, about = "Embeddings of l2-squared point sets and Sparsest Cut rounding", after_help = SCHEMAS)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Tolerance: solver accuracy for `sdp`/`round` (default 1e-6), l2-squared
    /// check tolerance elsewhere (default 1e-9)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for generators
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Iteration cap for the SDP solver and the ellipsoid computation
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Directory for output artifacts
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Omit the timestamp so repeated runs give byte-identical artifacts
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Worker threads for parallel loops (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a point set (points.json) or an instance (instance.json)
    Gen(commands::GenArgs),
    /// Check the l2-squared triangle inequalities (check.json)
    Check(commands::CheckArgs),
    /// Singular values and stable rank of the difference matrix (spectrum.json)
    Spectrum(commands::SpectrumArgs),
    /// Build an embedding and its distortion report (embedding.json, distortion.json)
    Embed(commands::EmbedArgs),
    /// Solve the Sparsest Cut SDP (gram.json, points.json, sdp_log.jsonl, sdp.json)
    Sdp(commands::SdpArgs),
    /// Round an SDP solution to a cut (outcome.json)
    Round(commands::RoundArgs),
    /// Run the theorem suite on a point set (verify.json)
    Verify(commands::VerifyArgs),
    /// Exact sparsest cut by enumeration, n <= 20 (oracle.json)
    Oracle(commands::OracleArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let g = &cli.global;
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(g, a),
        Command::Check(a) => commands::check(g, a),
        Command::Spectrum(a) => commands::spectrum(g, a),
        Command::Embed(a) => commands::embed(g, a),
        Command::Sdp(a) => commands::sdp(g, a),
        Command::Round(a) => commands::round(g, a),
        Command::Verify(a) => commands::verify(g, a),
        Command::Oracle(a) => commands::oracle(g, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
