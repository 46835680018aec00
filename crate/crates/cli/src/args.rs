use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "charsum", version, about = "Tails of mixed character sums: spectra, random model, constants")]
pub struct Cli {
    /// Worker threads; overrides CHARSUM_THREADS. Default: available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical tail curves Φ̂(V), one per order, as CSV.
    Tail(TailArgs),
    /// Per-residue spectrum values as CSV.
    Spectrum(SpectrumArgs),
    /// Constant records for a range of orders, as JSON.
    Constants(ConstantsArgs),
    /// Laplace transforms of the random model against the arithmetic values, as JSON.
    Randmodel(RandmodelArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Midpoint,
    Arcmax,
}

#[derive(Debug, Clone, Args)]
pub struct CharacterArgs {
    /// Prime modulus.
    #[arg(long, default_value_t = 200_003)]
    pub p: u64,
    /// Character index m, coprime to every order.
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    /// Cyclic coefficient shift a.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub shift: i64,
    #[arg(long, value_enum, default_value_t = Kind::Midpoint)]
    pub kind: Kind,
    /// Grid points per arc (arcmax).
    #[arg(long, default_value_t = charsum::spectrum::DEFAULT_GRID)]
    pub grid: usize,
    /// Refinement interval width (arcmax); 0 disables refinement.
    #[arg(long, default_value_t = charsum::spectrum::DEFAULT_REFINE_TOL)]
    pub refine_tol: f64,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub chi: CharacterArgs,
    /// Orders, e.g. `2,3,4` or `2-7`.
    #[arg(long, default_value = "2")]
    pub orders: String,
    #[arg(long, default_value_t = charsum::spectrum::DEFAULT_V_STEP)]
    pub vstep: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a plot of log(−log Φ̂) against V with the predicted envelopes.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub chi: CharacterArgs,
    /// Single order d.
    #[arg(long, default_value = "2")]
    pub orders: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long, default_value = "2-10")]
    pub orders: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RandmodelArgs {
    #[arg(long, default_value_t = 10_007)]
    pub p: u64,
    #[arg(long, default_value = "2")]
    pub orders: String,
    /// Comma-separated list of s values.
    #[arg(long, default_value = "0,1,2", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Character index m used for the arithmetic side.
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
    /// Constants fixture to check against instead of the built-in one.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Parses `2,3,5` and ranges such as `2-7` (mixed allowed).
pub fn parse_orders(s: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once('-') {
            let a: u32 = a.trim().parse().map_err(|_| format!("bad order range '{part}'"))?;
            let b: u32 = b.trim().parse().map_err(|_| format!("bad order range '{part}'"))?;
            if a > b {
                return Err(format!("empty order range '{part}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad order '{part}'"))?);
        }
    }
    if out.is_empty() {
        return Err("no orders given".into());
    }
    if let Some(d) = out.iter().find(|&&d| d < 2) {
        return Err(format!("orders must be at least 2, got {d}"));
    }
    Ok(out)
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| format!("bad number '{p}'")))
        .collect()
}
