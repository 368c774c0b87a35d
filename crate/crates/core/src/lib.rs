//! Hidden-node selection for one-hidden-layer tanh networks.
//!
//! A network `f(x) = v·tanh(u·x + b1) + b2` is trained oversized and then pruned
//! node by node. Each hidden node owns a parameter group `(u[i,:], v[i], b1[i])`;
//! a Group Lasso fit produces a first estimate, and an Adaptive Group Lasso fit
//! reweighted by the first-stage group norms removes the remaining redundant
//! nodes. Both stages use full-batch proximal gradient descent, so pruned groups
//! are exactly zero.
//!
//! Module map:
//!
//! - [`network`]: parameters, datasets, forward pass, empirical risk and its gradient.
//! - [`penalty`]: group norms, penalty values, adaptive weights, block soft-thresholding.
//! - [`optimizer`]: the proximal gradient loop and the ℓ∞ box projection.
//! - [`structure`]: minimality checks, node counts, canonical reduction and the
//!   symmetry-aware distance to an embedded reference network.
//! - [`selection`]: AIC and the two-step Group Lasso → Adaptive Group Lasso pipeline.
//! - [`data`]: synthetic data, CSV ingestion, train/test splits and standardization.
//! - [`experiment`]: experiment drivers, run reports and SVG plots used by the CLI.

// `!(x > 0.0)` checks are deliberate: they reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod data;
pub mod error;
pub mod experiment;
pub mod network;
pub mod optimizer;
pub mod penalty;
pub mod rng;
pub mod selection;
pub mod structure;
pub mod svg;

pub use data::{load_csv, simulate_dataset, split_standardize, SimSpec, SplitSpec, Standardizer};
pub use error::{Error, Result};
pub use network::{empirical_risk, forward, risk_gradient, Dataset, NetworkParams, NodeGroup};
pub use optimizer::{initial_params, project_linf, prox_gradient_fit, FitReport, TrainConfig};
pub use penalty::{adaptive_weights, block_soft_threshold, group_norms, penalty_value, PenaltyKind, PenaltySpec};
pub use selection::{aic, two_step_fit, GridSpec, SelectionResult};
pub use structure::{
    canonical_reduce, check_minimal, count_nodes, distance_to_embedded_reference, MinimalityReport, NodeCounts,
    StructureTolerances,
};
