//! Argument definitions and config-file merging.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use noonsim::pipelines::Method;

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "noonsim",
    version,
    about = "Simulate and tabulate multi-mode NOON state generation schemes",
    args_override_self = true
)]
pub struct Cli {
    /// key=value file with flag defaults (keys are long flag names)
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one generation scheme and print its NOON report
    Generate(GenerateArgs),
    /// Tabulate closed-form (and, where small enough, simulated) probabilities
    Sweep(SweepArgs),
    /// Compare simulation against the closed forms on a grid
    Verify(VerifyArgs),
    /// Count optical resources and loss-adjusted probabilities
    Resources(ResourcesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VaryKind {
    #[value(name = "d")]
    D,
    #[value(name = "N")]
    N,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; relative paths resolve against $NOONSIM_OUTPUT_DIR when set
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct LossArgs {
    #[arg(long, default_value_t = 1.0)]
    pub eta_detector: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta_single_photon: f64,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long)]
    pub d: usize,
    #[arg(long = "N")]
    pub n: u32,
    /// Coherent intensity |alpha|^2 for method 1 (default N/d)
    #[arg(long)]
    pub alpha_sq: Option<f64>,
    /// Per-mode Fock cutoff for method 1 (default N)
    #[arg(long)]
    pub cutoff: Option<u32>,
    /// Balance tolerance for the NOON check
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub loss: LossArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub vary: VaryKind,
    /// Fixed photon number when varying d
    #[arg(long = "N")]
    pub n: Option<u32>,
    /// Fixed mode number when varying N
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_name = "A:B", value_parser = parse_range::<usize>)]
    pub d_range: Option<(usize, usize)>,
    #[arg(long = "N-range", value_name = "A:B", value_parser = parse_range::<u32>)]
    pub n_range: Option<(u32, u32)>,
    /// `all` or a comma list such as `1,2`
    #[arg(long, default_value = "all", value_parser = parse_methods)]
    pub methods: MethodList,
    /// Fixed |alpha|^2 for method 1 (default N/d at each point)
    #[arg(long)]
    pub alpha_sq: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = parse_methods)]
    pub methods: MethodList,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, default_value = "2,4")]
    pub d_values: Vec<usize>,
    #[arg(long = "N-values", value_delimiter = ',', action = ArgAction::Set, default_value = "2,3,4,5,6")]
    pub n_values: Vec<u32>,
    /// Maximum relative error between simulation and closed form
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long)]
    pub alpha_sq: Option<f64>,
    /// Scale the closed form of these methods (testing aid)
    #[arg(long, hide = true, value_parser = parse_methods)]
    pub perturb_method: Option<MethodList>,
    #[arg(long, hide = true, default_value_t = 0.0)]
    pub perturb_rel: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ResourcesArgs {
    #[arg(long, default_value = "all", value_parser = parse_methods)]
    pub methods: MethodList,
    /// Mode numbers, comma separated
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, required = true)]
    pub d: Vec<usize>,
    /// Photon numbers, comma separated
    #[arg(long = "N", value_delimiter = ',', action = ArgAction::Set, required = true)]
    pub n: Vec<u32>,
    #[arg(long)]
    pub alpha_sq: Option<f64>,
    #[command(flatten)]
    pub loss: LossArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodList(pub Vec<Method>);

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
        .map_err(|e: noonsim::error::NoonError| e.to_string())
}

fn parse_methods(s: &str) -> Result<MethodList, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(MethodList(Method::ALL.to_vec()));
    }
    let mut out = s
        .split(',')
        .map(parse_method)
        .collect::<Result<Vec<_>, _>>()?;
    out.sort();
    out.dedup();
    Ok(MethodList(out))
}

fn parse_range<T>(s: &str) -> Result<(T, T), String>
where
    T: std::str::FromStr + PartialOrd + Copy,
{
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected a range A:B, got '{s}'"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<T>()
            .map_err(|_| format!("invalid range bound '{v}'"))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(format!("range '{s}' is empty"));
    }
    Ok((a, b))
}

const SUBCOMMANDS: [&str; 4] = ["generate", "sweep", "verify", "resources"];

/// Turns a key=value file into `--key value` arguments. Blank lines and
/// `#` comments are skipped.
pub fn config_args(text: &str) -> CliResult<Vec<OsString>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(CliError::Config(format!(
                "config line {}: invalid key '{key}'",
                lineno + 1
            )));
        }
        out.push(format!("--{key}").into());
        out.push(value.trim().into());
    }
    Ok(out)
}

fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

/// Inserts config-file arguments right after the subcommand name so that
/// flags given on the command line (which come later) override them.
pub fn merged_args(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = find_config(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let extra = config_args(&text)?;
    let pos = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let Some(pos) = pos else {
        return Ok(args);
    };
    let mut out = args[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}
