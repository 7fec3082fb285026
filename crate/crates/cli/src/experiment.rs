use foldnet::conv::{conv_network, xo_dataset, ConvNetwork, Tensor3};
use foldnet::network::{
    fc_network, forward, output_error, train_fold, BackwardAlgebra, ForwardAlgebra, FullyConnected,
    InitRange, Input, Network, Sample, Signal, TrainConfig,
};
use foldnet::recursion::Member;
use foldnet::{BackpropMode, Error, Result, SplitMix64, Vector, ZipMode};

use crate::metrics::{index_error_correlation, MetricsRow, RunningCorrelation};

/// Noise amplitude of generated X/O images.
pub const XO_NOISE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub samples: usize,
    pub seed: u64,
    pub learning_rate: f64,
    pub backprop_mode: BackpropMode,
    pub zip_mode: ZipMode,
    pub init: InitRange,
    /// Train last sample first, as a right fold over the dataset does.
    pub foldr_order: bool,
}

impl ExperimentConfig {
    /// Initial parameters are drawn from `[0, 2)`, which starts the network
    /// near saturation. With `[0, 1)` it fits the mean of the targets within
    /// the first hundred samples and the error curve is mostly flat.
    pub fn sine() -> Self {
        ExperimentConfig {
            samples: 1400,
            seed: 0,
            learning_rate: 0.1,
            backprop_mode: BackpropMode::Standard,
            zip_mode: ZipMode::Strict,
            init: InitRange { lo: 0.0, hi: 2.0 },
            foldr_order: false,
        }
    }

    /// A centred init: with all-positive filters the 7×7 sums saturate the
    /// output sigmoid and the error stops changing.
    pub fn xo() -> Self {
        ExperimentConfig {
            samples: 600,
            learning_rate: 0.05,
            init: InitRange { lo: -0.5, hi: 0.5 },
            ..ExperimentConfig::sine()
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            backprop_mode: self.backprop_mode,
            zip_mode: self.zip_mode,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidConfig("--samples must be at least 1".into()));
        }
        InitRange::new(self.init.lo, self.init.hi)?;
        self.train_config().validate()
    }
}

pub struct TrainReport<S: foldnet::recursion::Shape> {
    pub network: Network<S>,
    pub rows: Vec<MetricsRow>,
}

impl<S: foldnet::recursion::Shape> TrainReport<S> {
    pub fn pearson(&self) -> f64 {
        index_error_correlation(&self.rows)
    }
}

/// Trains one sample at a time, recording each sample's error before its
/// update. Chronological order gives the same network as a right fold over
/// the reversed dataset.
pub fn train_recorded<S, I, X>(
    mut network: Network<S>,
    dataset: &[Sample<X>],
    cfg: &ExperimentConfig,
) -> Result<TrainReport<S>>
where
    S: ForwardAlgebra<X> + BackwardAlgebra<X> + Member<Input, I>,
    X: Signal,
{
    let train = cfg.train_config();
    let order: Box<dyn Iterator<Item = &Sample<X>>> = if cfg.foldr_order {
        Box::new(dataset.iter().rev())
    } else {
        Box::new(dataset.iter())
    };
    let mut running = RunningCorrelation::default();
    let mut rows = Vec::with_capacity(dataset.len());
    for (i, sample) in order.enumerate() {
        let outputs = forward(&network, sample.0.clone(), train.zip_mode)?;
        let error = output_error(&outputs[0], &sample.1);
        rows.push(MetricsRow {
            sample_index: i,
            error,
            running_corr: running.push(i as f64, error),
        });
        network = train_fold(sample, network, &train)?;
    }
    Ok(TrainReport { network, rows })
}

/// Inputs uniform in `[0, 1)`, drawn after the network parameters from the
/// same generator; targets are `sin(x)`.
pub fn sine_dataset(n: usize, rng: &mut SplitMix64) -> Vec<Sample> {
    (0..n)
        .map(|_| {
            let x = rng.next_f64();
            (Vector::from_raw(vec![x]), Vector::from_raw(vec![x.sin()]))
        })
        .collect()
}

pub fn train_sine(cfg: &ExperimentConfig) -> Result<TrainReport<FullyConnected>> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let network = fc_network(&mut rng, cfg.init)?;
    let dataset = sine_dataset(cfg.samples, &mut rng);
    train_recorded(network, &dataset, cfg)
}

/// The dataset seed is the next draw after the network parameters.
pub fn train_xo(cfg: &ExperimentConfig) -> Result<TrainReport<ConvNetwork>> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let network = conv_network(&mut rng, cfg.init)?;
    let dataset: Vec<Sample<Tensor3>> = xo_dataset(cfg.samples, rng.next_u64(), XO_NOISE)?;
    train_recorded(network, &dataset, cfg)
}
