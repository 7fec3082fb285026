use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use foldnet::conv::ConvNetwork;
use foldnet::network::{FullyConnected, Network};
use foldnet::persist::{decode_layers, encode_layers, from_document, to_document, LayerRecord};

/// A network read from a file, typed by the layers it contains.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedNetwork {
    Dense(Network<FullyConnected>),
    Conv(Network<ConvNetwork>),
}

pub fn save_dense(network: &Network<FullyConnected>, path: &Path) -> Result<()> {
    write(&to_document(network)?, path)
}

pub fn save_conv(network: &Network<ConvNetwork>, path: &Path) -> Result<()> {
    write(&to_document(network)?, path)
}

pub fn save_network(network: &LoadedNetwork, path: &Path) -> Result<()> {
    match network {
        LoadedNetwork::Dense(n) => save_dense(n, path),
        LoadedNetwork::Conv(n) => save_conv(n, path),
    }
}

fn write(text: &str, path: &Path) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing network to {}", path.display()))
}

/// Networks made only of dense and input layers load as fully connected.
pub fn parse_network(text: &str) -> foldnet::Result<LoadedNetwork> {
    let network = from_document::<ConvNetwork>(text)?;
    let records = encode_layers(&network)?;
    let dense_only = records
        .iter()
        .all(|r| matches!(r, LayerRecord::Dense { .. } | LayerRecord::Input));
    Ok(if dense_only {
        LoadedNetwork::Dense(decode_layers(&records)?)
    } else {
        LoadedNetwork::Conv(network)
    })
}

pub fn load_network(path: &Path) -> Result<LoadedNetwork> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading network from {}", path.display()))?;
    parse_network(&text).with_context(|| format!("loading network from {}", path.display()))
}

pub fn load_dense(path: &Path) -> Result<Network<FullyConnected>> {
    match load_network(path)? {
        LoadedNetwork::Dense(n) => Ok(n),
        LoadedNetwork::Conv(_) => anyhow::bail!("{} holds a convolutional network", path.display()),
    }
}

pub fn load_conv(path: &Path) -> Result<Network<ConvNetwork>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading network from {}", path.display()))?;
    from_document::<ConvNetwork>(&text)
        .with_context(|| format!("loading network from {}", path.display()))
}
