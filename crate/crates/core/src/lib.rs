//! stretchlab: a workbench for studying how faithfully tree-like hosts
//! can represent graph metrics.
//!
//! The crate provides exact-arithmetic graph and metric types, generators
//! for adversarial graph families built around stretched bipartite cores,
//! tree-decomposition machinery (validation, nice-form conversion,
//! balanced partitioning), exact minimum-distortion oracles, a seeded
//! randomized dominating-tree baseline, and a CLI for reproducible
//! experiment sweeps.
//!
//! Core algorithms are generic over the [`Scalar`] weight type; the
//! default instantiation is the exact rational [`Rat`], so distortion
//! ratios compare exactly against thresholds with no float tolerance.

pub mod embed;
pub mod error;
pub mod experiment;
pub mod flow;
pub mod frt;
pub mod generate;
pub mod graph;
pub mod gridsep;
pub mod metric;
pub mod minor;
pub mod oracle;
pub mod scalar;
pub mod treedecomp;

pub use error::{Error, Result};
pub use graph::{Edge, Graph};
pub use metric::{shortest_path_metric, Metric};
pub use scalar::{Scalar, Stretch};

/// Default exact scalar: rationals over 64-bit integers. Desk-scale
/// instances keep numerators and denominators tiny; inputs outside that
/// regime should use [`f64`] instead.
pub type Rat = num_rational::Ratio<i64>;
