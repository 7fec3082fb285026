use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use foldnet::conv::{conv_network, xo_dataset, Tensor3};
use foldnet::network::{fc_network, forward, Signal};
use foldnet::{SplitMix64, Vector, ZipMode};

use crate::args::{Cli, Command, EvalArgs, GenArgs, TrainArgs};
use crate::experiment::{sine_dataset, train_recorded, ExperimentConfig, XO_NOISE};
use crate::metrics::to_csv;
use crate::store::{load_conv, load_dense, load_network, save_conv, save_dense, LoadedNetwork};

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::TrainSine(args) => train_sine(&args),
        Command::TrainXo(args) => train_xo(&args),
        Command::Eval(args) => eval(&args),
        Command::GenXo(args) => gen_xo(&args),
    }
}

pub fn experiment_config(args: &TrainArgs, defaults: ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig {
        samples: args.samples.unwrap_or(defaults.samples),
        seed: args.seed,
        learning_rate: args.lr.unwrap_or(defaults.learning_rate),
        backprop_mode: args.mode.into(),
        zip_mode: args.zip.into(),
        init: args.init.unwrap_or(defaults.init),
        foldr_order: args.foldr_order,
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// The dataset is drawn after a fresh network even when one is loaded, so
/// a seed always names the same samples.
pub fn train_sine(args: &TrainArgs) -> Result<()> {
    let cfg = experiment_config(args, ExperimentConfig::sine());
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let mut network = fc_network(&mut rng, cfg.init)?;
    if let Some(path) = &args.load {
        network = load_dense(path)?;
    }
    let dataset = sine_dataset(cfg.samples, &mut rng);
    let report = train_recorded(network, &dataset, &cfg)?;
    write_file(&args.out, &to_csv(&report.rows))?;
    if let Some(path) = &args.save {
        save_dense(&report.network, path)?;
    }
    Ok(())
}

pub fn train_xo(args: &TrainArgs) -> Result<()> {
    let cfg = experiment_config(args, ExperimentConfig::xo());
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let mut network = conv_network(&mut rng, cfg.init)?;
    if let Some(path) = &args.load {
        network = load_conv(path)?;
    }
    let dataset = xo_dataset(cfg.samples, rng.next_u64(), XO_NOISE)?;
    let report = train_recorded(network, &dataset, &cfg)?;
    write_file(&args.out, &to_csv(&report.rows))?;
    if let Some(path) = &args.save {
        save_conv(&report.network, path)?;
    }
    Ok(())
}

pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .with_context(|| format!("`{t}` is not a number"))
        })
        .collect()
}

fn parse_shape(text: &str) -> Result<(usize, usize, usize)> {
    let dims: Vec<usize> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .with_context(|| format!("bad shape component `{t}`"))
        })
        .collect::<Result<_>>()?;
    match dims[..] {
        [w, h, d] => Ok((w, h, d)),
        _ => bail!("--shape needs W,H,D, got `{text}`"),
    }
}

fn format_values(values: &[f64]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
    out
}

/// The network's output for one input, as a comma-separated line.
pub fn eval_output(
    network: &LoadedNetwork,
    input: Vec<f64>,
    shape: (usize, usize, usize),
    zip: ZipMode,
) -> Result<String> {
    let output = match network {
        LoadedNetwork::Dense(n) => forward(n, Vector::new(input)?, zip)?
            .swap_remove(0)
            .into_vec(),
        LoadedNetwork::Conv(n) => {
            let (w, h, d) = shape;
            let x = Tensor3::new(w, h, d, input)?;
            forward(n, x, zip)?.swap_remove(0).values().to_vec()
        }
    };
    Ok(format_values(&output))
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let network = load_network(&args.load)?;
    let text = match (&args.input, &args.input_file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => {
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        }
        (None, None) => bail!("either --input or --input-file is required"),
    };
    let input = parse_values(&text)?;
    let line = eval_output(&network, input, parse_shape(&args.shape)?, args.zip.into())?;
    match &args.out {
        Some(path) => write_file(path, &line),
        None => {
            print!("{line}");
            Ok(())
        }
    }
}

/// `label,p0,...,p48` with labels `X` and `O`; pixels in row-major order.
pub fn xo_csv(samples: usize, seed: u64, noise: f64) -> Result<String> {
    ensure!(samples >= 1, "--samples must be at least 1");
    let data = xo_dataset(samples, seed, noise)?;
    let mut out = String::from("label");
    for i in 0..data[0].0.as_slice().len() {
        write!(out, ",p{i}").unwrap();
    }
    out.push('\n');
    for (image, label) in &data {
        out.push_str(if label[0] == 1.0 { "X" } else { "O" });
        for v in image.as_slice() {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn gen_xo(args: &GenArgs) -> Result<()> {
    write_file(&args.out, &xo_csv(args.samples, args.seed, args.noise)?)
}
