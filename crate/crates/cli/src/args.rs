use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use foldnet::network::InitRange;
use foldnet::{BackpropMode, ZipMode};

#[derive(Debug, Parser)]
#[command(
    name = "foldnet",
    version,
    about = "Train and evaluate networks built from folds and unfolds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit sin(x) on [0, 1) with the 1-3-3-3-1 network and write per-sample errors.
    TrainSine(TrainArgs),
    /// Train the convolutional X/O classifier and write per-sample errors.
    TrainXo(TrainArgs),
    /// Run a saved network on one input and print its output.
    Eval(EvalArgs),
    /// Write a generated X/O dataset as CSV.
    GenXo(GenArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Number of training samples.
    #[arg(long)]
    pub samples: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Learning rate; defaults to 0.1 for sine and 0.05 for X/O.
    #[arg(long)]
    pub lr: Option<f64>,

    #[arg(long, value_enum, default_value_t = Mode::Standard)]
    pub mode: Mode,

    /// Zip semantics of forward propagation.
    #[arg(long, value_enum, default_value_t = Zip::Strict)]
    pub zip: Zip,

    /// Uniform init range as LO:HI; defaults to 0:2 for sine and -0.5:0.5 for X/O.
    #[arg(long, value_parser = parse_init, allow_hyphen_values = true)]
    pub init: Option<InitRange>,

    /// CSV file for the per-sample errors.
    #[arg(long)]
    pub out: PathBuf,

    /// Where to write the trained network.
    #[arg(long)]
    pub save: Option<PathBuf>,

    /// Start from a saved network instead of a fresh one.
    #[arg(long)]
    pub load: Option<PathBuf>,

    /// Train the last sample first, in the order of a right fold.
    #[arg(long)]
    pub foldr_order: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub load: PathBuf,

    /// Comma-separated input values.
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "input_file",
        required_unless_present = "input_file"
    )]
    pub input: Option<String>,

    /// File holding the comma- or whitespace-separated input values.
    #[arg(long)]
    pub input_file: Option<PathBuf>,

    /// Input tensor shape W,H,D for convolutional networks.
    #[arg(long, default_value = "7,7,1")]
    pub shape: String,

    #[arg(long, value_enum, default_value_t = Zip::Strict)]
    pub zip: Zip,

    /// Write the output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 600)]
    pub samples: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Per-pixel noise amplitude.
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Paper,
    Standard,
}

impl From<Mode> for BackpropMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Paper => BackpropMode::PaperVerbatim,
            Mode::Standard => BackpropMode::Standard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Zip {
    Strict,
    Truncate,
}

impl From<Zip> for ZipMode {
    fn from(z: Zip) -> Self {
        match z {
            Zip::Strict => ZipMode::Strict,
            Zip::Truncate => ZipMode::Truncate,
        }
    }
}

pub fn parse_init(s: &str) -> Result<InitRange, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad LO `{lo}`: {e}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad HI `{hi}`: {e}"))?;
    InitRange::new(lo, hi).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_ranges() {
        assert_eq!(parse_init("-0.5:0.5"), Ok(InitRange { lo: -0.5, hi: 0.5 }));
        assert!(parse_init("1:0").is_err());
        assert!(parse_init("1").is_err());
        assert!(parse_init("a:1").is_err());
    }

    #[test]
    fn parses_train_flags() {
        let cli = Cli::try_parse_from([
            "foldnet",
            "train-sine",
            "--samples",
            "10",
            "--seed",
            "3",
            "--lr",
            "0.2",
            "--mode",
            "paper",
            "--zip",
            "truncate",
            "--init",
            "-1:1",
            "--out",
            "m.csv",
            "--foldr-order",
        ])
        .unwrap();
        let Command::TrainSine(a) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(a.samples, Some(10));
        assert_eq!(a.mode, Mode::Paper);
        assert_eq!(a.zip, Zip::Truncate);
        assert_eq!(a.init, Some(InitRange { lo: -1.0, hi: 1.0 }));
        assert!(a.foldr_order);
    }

    #[test]
    fn eval_needs_an_input() {
        assert!(Cli::try_parse_from(["foldnet", "eval", "--load", "n.json"]).is_err());
        assert!(
            Cli::try_parse_from(["foldnet", "eval", "--load", "n.json", "--input", "-0.5,1"])
                .is_ok()
        );
    }
}
