//! Clustering for mixed categorical-continuous data.
//!
//! The centerpiece is DEK: K-means recast as a global optimization problem
//! and solved with differential evolution. The K mixed centroids are
//! flattened into one real vector (categorical coordinates become
//! selection-probability blocks decoded by argmax), and the objective sums
//! each point's Gower distance to its nearest centroid, scaled by a log of
//! that centroid's separation from the others so coincident centroids are
//! penalized.
//!
//! Around it: Gower-distance utilities, a generic DE/rand/1/bin engine,
//! Gower-Lloyd and agglomerative hierarchical baselines, internal validity
//! indices (DBI, silhouette, Dunn, SSE), SSE-elbow cluster-count selection,
//! a planted-cluster synthetic generator with ARI scoring, and a
//! repeated-runs benchmark harness.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run --release --example cluster_mixed
//! cargo run --release --example compare_methods
//! cargo run --release --example choose_k
//! cargo run --release --example gower_basics
//! cargo run --release --example de_sphere
//! cargo run --release --example bench_protocol
//! cargo run --release --example synth_roundtrip
//! ```
//!
//! or the `dek` binary (`dek --help`), which exposes the same capabilities
//! as subcommands: `validate`, `cluster`, `sweep-k`, `bench`, `synth`.

pub mod baselines;
pub mod cli;
pub mod dataset;
pub mod de_engine;
pub mod dek_core;
mod error;
pub mod gower;
pub mod model_selection;
pub mod synth_bench;
pub mod validity_metrics;

pub use dataset::{ColumnSpec, Dataset, Schema};
pub use dek_core::{run_dek, ClusteringResult, DekConfig, ObjectiveVariant};
pub use error::{Error, Result};
