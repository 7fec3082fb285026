//! Text documents for trained networks.
//!
//! A document is JSON with a format tag and the layers listed outermost
//! first, ending with the input layer:
//!
//! ```json
//! {
//!   "format": "foldnet/1",
//!   "layers": [
//!     { "kind": "dense", "weights": [[0.25, -1.5]], "biases": [0.1] },
//!     { "kind": "input" }
//!   ]
//! }
//! ```
//!
//! Dense weights are nested row-major; convolution weights are flat in
//! `[filter][depth][y][x]` order. Reals are written in their shortest
//! round-trip form, so saving and loading preserves every bit.

use serde::{Deserialize, Serialize};

use crate::conv::{Conv, ConvLayer, FilterBank, Pool, PoolLayer, ReLu, ReLuLayer};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::network::{Dense, DenseLayer, Input, InputLayer, Network};
use crate::recursion::{split_ref, Coproduct, Program, ProgramNode, Shape, Sum};

pub const FORMAT: &str = "foldnet/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LayerRecord {
    Input,
    Dense {
        weights: Vec<Vec<f64>>,
        biases: Vec<f64>,
    },
    Conv {
        filter_w: usize,
        filter_h: usize,
        in_depth: usize,
        n_filters: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
    },
    Pool {
        window: usize,
        stride: usize,
    },
    Relu,
}

impl LayerRecord {
    pub fn kind(&self) -> &'static str {
        match self {
            LayerRecord::Input => "input",
            LayerRecord::Dense { .. } => "dense",
            LayerRecord::Conv { .. } => "conv",
            LayerRecord::Pool { .. } => "pool",
            LayerRecord::Relu => "relu",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format: String,
    layers: Vec<LayerRecord>,
}

#[derive(Deserialize)]
struct Header {
    format: String,
}

/// Layer shapes that can be written to and read from a document.
pub trait Persist: Shape {
    fn encode<K>(layer: &Self::Of<K>) -> LayerRecord;

    /// `None` if `record` is not a layer of this shape. Layers with a
    /// predecessor take it out of `prev`.
    fn decode<K>(record: &LayerRecord, prev: &mut Option<K>) -> Option<Result<Self::Of<K>>>;
}

fn take_prev<K>(prev: &mut Option<K>, kind: &str) -> Result<K> {
    prev.take()
        .ok_or_else(|| Error::MalformedNetwork(format!("{kind} layer has no preceding layer")))
}

impl Persist for Input {
    fn encode<K>(_: &InputLayer<K>) -> LayerRecord {
        LayerRecord::Input
    }

    fn decode<K>(record: &LayerRecord, _: &mut Option<K>) -> Option<Result<InputLayer<K>>> {
        matches!(record, LayerRecord::Input).then(|| Ok(InputLayer::new()))
    }
}

impl Persist for Dense {
    fn encode<K>(layer: &DenseLayer<K>) -> LayerRecord {
        LayerRecord::Dense {
            weights: layer.weights.to_rows(),
            biases: layer.biases.to_vec(),
        }
    }

    fn decode<K>(record: &LayerRecord, prev: &mut Option<K>) -> Option<Result<DenseLayer<K>>> {
        let LayerRecord::Dense { weights, biases } = record else {
            return None;
        };
        Some((|| {
            let weights = Matrix::from_rows(weights.clone())?;
            let biases = Vector::new(biases.clone())?;
            if biases.len() != weights.rows() {
                return Err(Error::dims("dense layer", weights.rows(), biases.len()));
            }
            Ok(DenseLayer {
                weights,
                biases,
                prev: take_prev(prev, "dense")?,
            })
        })())
    }
}

impl Persist for Conv {
    fn encode<K>(layer: &ConvLayer<K>) -> LayerRecord {
        let bank = &layer.bank;
        LayerRecord::Conv {
            filter_w: bank.filter_w(),
            filter_h: bank.filter_h(),
            in_depth: bank.in_depth(),
            n_filters: bank.n_filters(),
            weights: bank.weights().to_vec(),
            biases: bank.biases().to_vec(),
        }
    }

    fn decode<K>(record: &LayerRecord, prev: &mut Option<K>) -> Option<Result<ConvLayer<K>>> {
        let LayerRecord::Conv {
            filter_w,
            filter_h,
            in_depth,
            n_filters,
            weights,
            biases,
        } = record
        else {
            return None;
        };
        Some((|| {
            let bank = FilterBank::new(
                *filter_w,
                *filter_h,
                *in_depth,
                *n_filters,
                weights.clone(),
                biases.clone(),
            )?;
            Ok(ConvLayer {
                bank,
                prev: take_prev(prev, "conv")?,
            })
        })())
    }
}

impl Persist for Pool {
    fn encode<K>(layer: &PoolLayer<K>) -> LayerRecord {
        LayerRecord::Pool {
            window: layer.window,
            stride: layer.stride,
        }
    }

    fn decode<K>(record: &LayerRecord, prev: &mut Option<K>) -> Option<Result<PoolLayer<K>>> {
        let &LayerRecord::Pool { window, stride } = record else {
            return None;
        };
        if window == 0 || stride == 0 {
            return Some(Err(Error::MalformedNetwork(format!(
                "pool window and stride must be positive, got {window} and {stride}"
            ))));
        }
        Some(take_prev(prev, "pool").map(|prev| PoolLayer {
            window,
            stride,
            prev,
        }))
    }
}

impl Persist for ReLu {
    fn encode<K>(_: &ReLuLayer<K>) -> LayerRecord {
        LayerRecord::Relu
    }

    fn decode<K>(record: &LayerRecord, prev: &mut Option<K>) -> Option<Result<ReLuLayer<K>>> {
        matches!(record, LayerRecord::Relu)
            .then(|| take_prev(prev, "relu").map(|prev| ReLuLayer { prev }))
    }
}

impl<F: Persist, G: Persist> Persist for Sum<F, G> {
    fn encode<K>(layer: &Coproduct<F::Of<K>, G::Of<K>>) -> LayerRecord {
        match layer {
            Coproduct::Left(l) => F::encode(l),
            Coproduct::Right(r) => G::encode(r),
        }
    }

    fn decode<K>(
        record: &LayerRecord,
        prev: &mut Option<K>,
    ) -> Option<Result<Coproduct<F::Of<K>, G::Of<K>>>> {
        if let Some(l) = F::decode(record, prev) {
            return Some(l.map(Coproduct::Left));
        }
        G::decode(record, prev).map(|r| r.map(Coproduct::Right))
    }
}

/// The layer records of a closed network, outermost first.
pub fn encode_layers<S: Persist, A>(network: &Program<S, A>) -> Result<Vec<LayerRecord>> {
    let mut records = Vec::new();
    let mut current = network;
    loop {
        let ProgramNode::Step(layer) = current.view() else {
            return Err(Error::MalformedNetwork(
                "the network has an open Pure leaf".into(),
            ));
        };
        records.push(S::encode(layer));
        let (_, children) = split_ref::<S, _>(layer);
        match children.as_slice() {
            [] => return Ok(records),
            [next] => current = next,
            _ => return Err(Error::MalformedNetwork("layers must form a chain".into())),
        }
    }
}

pub fn decode_layers<S: Persist>(records: &[LayerRecord]) -> Result<Network<S>> {
    let mut network: Option<Network<S>> = None;
    for record in records.iter().rev() {
        let mut prev = network.take();
        let layer = S::decode(record, &mut prev).ok_or_else(|| {
            Error::MalformedNetwork(format!(
                "{} layers are not part of this network type",
                record.kind()
            ))
        })??;
        if prev.is_some() {
            return Err(Error::MalformedNetwork(format!(
                "{} layer must be the last layer",
                record.kind()
            )));
        }
        network = Some(Program::step(layer));
    }
    network.ok_or_else(|| Error::MalformedNetwork("the document has no layers".into()))
}

pub fn to_document<S: Persist, A>(network: &Program<S, A>) -> Result<String> {
    let doc = Document {
        format: FORMAT.to_string(),
        layers: encode_layers(network)?,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("documents contain only finite reals");
    text.push('\n');
    Ok(text)
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn from_document<S: Persist>(text: &str) -> Result<Network<S>> {
    let header: Header = serde_json::from_str(text).map_err(parse_error)?;
    if header.format != FORMAT {
        return Err(Error::Version(header.format));
    }
    let doc: Document = serde_json::from_str(text).map_err(parse_error)?;
    decode_layers(&doc.layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conv::{conv_network, ConvNetwork};
    use crate::network::{dense_network, fc_network, FullyConnected, InitRange};
    use crate::rng::SplitMix64;

    #[test]
    fn dense_round_trip_is_exact() {
        let mut rng = SplitMix64::new(1);
        for _ in 0..20 {
            let net = dense_network::<FullyConnected, _, _>(
                &[2, 3, 1],
                &mut rng,
                InitRange::new(-3.0, 3.0).unwrap(),
            )
            .unwrap();
            let text = to_document(&net).unwrap();
            assert_eq!(from_document::<FullyConnected>(&text).unwrap(), net);
        }
    }

    #[test]
    fn conv_round_trip_is_exact() {
        let net = conv_network(&mut SplitMix64::new(2), InitRange::default()).unwrap();
        let text = to_document(&net).unwrap();
        assert_eq!(from_document::<ConvNetwork>(&text).unwrap(), net);
    }

    #[test]
    fn layers_are_outermost_first() {
        let net = fc_network(&mut SplitMix64::new(3), InitRange::default()).unwrap();
        let records = encode_layers(&net).unwrap();
        let kinds: Vec<_> = records.iter().map(LayerRecord::kind).collect();
        assert_eq!(kinds, ["dense", "dense", "dense", "dense", "input"]);
        let LayerRecord::Dense { weights, .. } = &records[0] else {
            unreachable!()
        };
        assert_eq!((weights.len(), weights[0].len()), (1, 3));
    }

    #[test]
    fn unknown_format_is_a_version_error() {
        let text = r#"{"format": "foldnet/9", "layers": []}"#;
        assert_eq!(
            from_document::<FullyConnected>(text),
            Err(Error::Version("foldnet/9".into()))
        );
    }

    #[test]
    fn syntax_errors_carry_a_location() {
        let text = "{\n  \"format\": \"foldnet/1\",\n  \"layers\": [ {\"kind\": \"dense\", \"weights\": [[1.0]], \"biases\": [oops] } ]\n}";
        match from_document::<FullyConnected>(text) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 40);
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let doc = |layers: &str| format!(r#"{{"format": "foldnet/1", "layers": [{layers}]}}"#);
        let dense = r#"{"kind": "dense", "weights": [[1.0, 2.0]], "biases": [0.0]}"#;
        assert!(from_document::<FullyConnected>(&doc("")).is_err());
        assert!(from_document::<FullyConnected>(&doc(dense)).is_err());
        assert!(
            from_document::<FullyConnected>(&doc(&format!(r#"{{"kind": "input"}}, {dense}"#)))
                .is_err()
        );
        assert!(
            from_document::<FullyConnected>(&doc(r#"{"kind": "relu"}, {"kind": "input"}"#))
                .is_err()
        );
        assert!(from_document::<FullyConnected>(&doc(
            r#"{"kind": "dense", "weights": [[1.0]], "biases": [0.0, 1.0]}, {"kind": "input"}"#
        ))
        .is_err());
        assert!(
            from_document::<FullyConnected>(&doc(&format!(r#"{dense}, {{"kind": "input"}}"#)))
                .is_ok()
        );
    }
}
