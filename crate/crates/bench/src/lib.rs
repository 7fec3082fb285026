//! Fixed inputs shared by the benchmarks.

use foldnet::conv::{conv_network, xo_dataset, ConvNetwork, Tensor3};
use foldnet::network::{fc_network, FullyConnected, InitRange, Network, Sample};
use foldnet::recursion::list::{from_slice, List};
use foldnet::{SplitMix64, Vector};

pub fn sine_setup(samples: usize) -> (Network<FullyConnected>, Vec<Sample>) {
    let mut rng = SplitMix64::new(0);
    let net = fc_network(&mut rng, InitRange::new(0.0, 2.0).unwrap()).unwrap();
    let data = (0..samples)
        .map(|_| {
            let x = rng.next_f64();
            (
                Vector::new(vec![x]).unwrap(),
                Vector::new(vec![x.sin()]).unwrap(),
            )
        })
        .collect();
    (net, data)
}

pub fn xo_setup(samples: usize) -> (Network<ConvNetwork>, Vec<Sample<Tensor3>>) {
    let mut rng = SplitMix64::new(0);
    let net = conv_network(&mut rng, InitRange::new(-0.5, 0.5).unwrap()).unwrap();
    (net, xo_dataset(samples, 1, 0.1).unwrap())
}

pub fn long_list(len: usize) -> List<u64> {
    let items: Vec<u64> = (0..len as u64).collect();
    from_slice(&items)
}
