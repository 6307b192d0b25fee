use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use wrlat_core::Precision;

#[derive(Debug, Parser)]
#[command(name = "wrlat", version, about = "Well-rounded lattices from cyclic fields of odd prime degree")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classification, trace table and character choices of a field
    FieldInfo(FieldInfoArgs),
    /// Build one module and report its Gram matrix, minimum and density
    Lattice(LatticeArgs),
    /// Sweep a family over a range of m
    Scan(ScanArgs),
    /// Run a named verification suite
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Degree (odd prime)
    #[arg(short = 'p')]
    pub p: u64,
    /// Conductor
    #[arg(short = 'n')]
    pub n: u64,
    /// Index into the enumerated character choices
    #[arg(long, default_value_t = 0)]
    pub choice: usize,
    #[command(flatten)]
    pub precision: PrecisionArg,
}

#[derive(Debug, Clone, Args)]
pub struct PrecisionArg {
    /// Working precision in bits (default: WRLAT_PRECISION_BITS, else 53)
    #[arg(long = "precision")]
    pub bits: Option<u32>,
}

impl PrecisionArg {
    pub fn resolve(&self) -> Precision {
        self.bits.map(Precision::new).unwrap_or_else(Precision::from_env)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Ok,
    Mm,
    Mmc,
    Orbit,
    Bj,
    Bram,
}

#[derive(Debug, Clone, Args)]
pub struct FieldInfoArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(short = 'm')]
    pub m: Option<u64>,
    /// Residue for the congruence family
    #[arg(short = 'c')]
    pub c: Option<u64>,
    /// Prime index for the unramified prime ideals
    #[arg(short = 'j')]
    pub j: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Inclusive range `a..b`
    #[arg(long = "m", value_parser = parse_range)]
    pub range: MRange,
    /// Keep only the well-rounded rows
    #[arg(long)]
    pub only_wr: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    TraceIdentities,
    Minima,
    WrWindow,
    Density,
    Circulant,
    Orbit,
    IdealIndex,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Seed for the random elements
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Random elements per field
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub precision: PrecisionArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MRange {
    pub start: u64,
    pub end: u64,
}

impl MRange {
    pub fn values(self) -> impl Iterator<Item = u64> {
        self.start..=self.end
    }
}

/// `a..b` and `a..=b` are both inclusive; a bare number is a single value.
pub fn parse_range(s: &str) -> Result<MRange, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad bound {t:?}: {e}"));
    let (start, end) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if start == 0 || start > end {
        return Err(format!("range {s:?} must satisfy 1 <= a <= b"));
    }
    Ok(MRange { start, end })
}
