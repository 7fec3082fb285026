//! Experiment harness: training runs with per-sample metrics, network
//! files and evaluation.

pub mod args;
pub mod commands;
pub mod experiment;
pub mod metrics;
pub mod store;
