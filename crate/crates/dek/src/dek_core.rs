//! Differential-evolution-assisted clustering over mixed data: genome
//! encoding/decoding between flat real vectors and mixed centroid matrices,
//! the separation-aware Gower objective, and the end-to-end run.
//!
//! A set of K mixed centroids is optimized as one flat vector in the unit
//! hypercube. Continuous coordinates are carried verbatim; each categorical
//! coordinate is expanded into a selection-probability block of length N_l
//! and decoded by argmax. The per-point cost divides the Gower distance to
//! a centroid by a log of that centroid's separation from the others, so
//! coincident centroids are penalized and well-spread ones preferred.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnSpec, Dataset, Schema};
use crate::de_engine::{self, DeConfig};
use crate::error::{Error, Result};
use crate::gower::{distance_unchecked, MixedPoint, PointView};

/// Sentinel cost for degenerate centroid sets (coincident centroids or a
/// singular separation denominator). Finite, so the DE engine can rank it.
pub const PENALTY: f64 = 1e9;

/// Default guard below which a centroid separation counts as zero.
pub const DEFAULT_EPSILON_SEP: f64 = 1e-9;

/// Which form of the separation denominator the objective uses.
///
/// `Stabilized` (default) divides by ln(1 + sep), which is positive and
/// increasing in separation. `PaperLiteral` divides by ln(sep), kept for
/// auditability: Gower separations lie in [0, 1], so that denominator is
/// non-positive and the resulting objective changes sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveVariant {
    #[default]
    Stabilized,
    PaperLiteral,
}

/// K mixed centroids over a dataset schema.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidMatrix {
    pub centroids: Vec<MixedPoint>,
}

impl CentroidMatrix {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }
}

/// Flat genome length for K centroids: K x (d_con + sum of choice counts).
pub fn genome_len(schema: &Schema, k: usize) -> usize {
    k * schema.expanded_dim()
}

/// One-hot encode a centroid matrix into a flat genome: continuous slots
/// verbatim, each categorical index c as a block with 1.0 at position c.
pub fn encode(cm: &CentroidMatrix, schema: &Schema) -> Vec<f64> {
    let choices = schema.choice_counts();
    let mut genome = Vec::with_capacity(genome_len(schema, cm.k()));
    for centroid in &cm.centroids {
        genome.extend_from_slice(&centroid.continuous);
        for (slot, &idx) in centroid.categorical.iter().enumerate() {
            for pos in 0..choices[slot] {
                genome.push(if pos == idx as usize { 1.0 } else { 0.0 });
            }
        }
    }
    genome
}

/// Decode a flat genome: continuous slots verbatim, each categorical block
/// mapped to the index of its maximum entry (ties to the lowest index).
/// Total on any real vector of the right length.
pub fn decode(genome: &[f64], schema: &Schema, k: usize) -> Result<CentroidMatrix> {
    let expected = genome_len(schema, k);
    if genome.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: genome.len(),
        });
    }
    let d_con = schema.d_con();
    let choices = schema.choice_counts();
    let stride = schema.expanded_dim();
    let centroids = (0..k)
        .map(|j| {
            let chunk = &genome[j * stride..(j + 1) * stride];
            let continuous = chunk[..d_con].to_vec();
            let mut categorical = Vec::with_capacity(choices.len());
            let mut offset = d_con;
            for &n_l in &choices {
                let block = &chunk[offset..offset + n_l];
                categorical.push(argmax(block) as u32);
                offset += n_l;
            }
            MixedPoint {
                continuous,
                categorical,
            }
        })
        .collect();
    Ok(CentroidMatrix { centroids })
}

fn argmax(block: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in block.iter().enumerate().skip(1) {
        if v > block[best] {
            best = i;
        }
    }
    best
}

/// Separation-aware per-point cost against centroid `centroid` given the
/// remaining centroids `others`.
///
/// sep = min Gower distance from `centroid` to any other centroid; the cost
/// is gower(point, centroid) / ln(1 + sep) in the stabilized variant, with
/// sep below `epsilon_sep` (and, for the literal variant, ln(sep) = 0)
/// mapped to [`PENALTY`].
pub fn phi(
    point: PointView,
    centroid: PointView,
    others: &[PointView],
    widths: &[f64],
    variant: ObjectiveVariant,
    epsilon_sep: f64,
) -> Result<f64> {
    if others.is_empty() {
        return Err(Error::NotEnoughCentroids(1));
    }
    let sep = others
        .iter()
        .map(|&o| distance_unchecked(centroid, o, widths))
        .fold(f64::INFINITY, f64::min);
    let d = distance_unchecked(point, centroid, widths);
    Ok(phi_from_parts(d, sep, variant, epsilon_sep))
}

/// Combine a precomputed point-centroid distance and centroid separation.
#[inline]
pub(crate) fn phi_from_parts(
    d: f64,
    sep: f64,
    variant: ObjectiveVariant,
    epsilon_sep: f64,
) -> f64 {
    if sep < epsilon_sep {
        return PENALTY;
    }
    match variant {
        ObjectiveVariant::Stabilized => d / (1.0 + sep).ln(),
        ObjectiveVariant::PaperLiteral => {
            let den = sep.ln();
            if den == 0.0 {
                PENALTY
            } else {
                d / den
            }
        }
    }
}

fn separations(cm: &CentroidMatrix, widths: &[f64]) -> Vec<f64> {
    let k = cm.k();
    (0..k)
        .map(|j| {
            (0..k)
                .filter(|&c| c != j)
                .map(|c| {
                    distance_unchecked(cm.centroids[j].view(), cm.centroids[c].view(), widths)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Sum over points of the minimum separation-aware cost to any centroid.
pub fn objective_value(
    ds: &Dataset,
    cm: &CentroidMatrix,
    variant: ObjectiveVariant,
    epsilon_sep: f64,
) -> Result<f64> {
    if cm.k() < 2 {
        return Err(Error::NotEnoughCentroids(cm.k()));
    }
    let widths = ds.range_widths();
    let seps = separations(cm, &widths);
    let mut total = 0.0;
    for i in 0..ds.n() {
        let point = ds.point(i);
        let mut best = f64::INFINITY;
        for (j, centroid) in cm.centroids.iter().enumerate() {
            let d = distance_unchecked(point, centroid.view(), widths.as_slice());
            let cost = phi_from_parts(d, seps[j], variant, epsilon_sep);
            if cost < best {
                best = cost;
            }
        }
        total += best;
    }
    Ok(total)
}

/// Nearest-centroid assignment under the separation-aware cost, ties to the
/// lowest cluster index.
pub fn assign(
    ds: &Dataset,
    cm: &CentroidMatrix,
    variant: ObjectiveVariant,
    epsilon_sep: f64,
) -> Result<Vec<usize>> {
    if cm.k() < 2 {
        return Err(Error::NotEnoughCentroids(cm.k()));
    }
    let widths = ds.range_widths();
    let seps = separations(cm, &widths);
    Ok((0..ds.n())
        .map(|i| {
            let point = ds.point(i);
            let mut best_j = 0;
            let mut best = f64::INFINITY;
            for (j, centroid) in cm.centroids.iter().enumerate() {
                let d = distance_unchecked(point, centroid.view(), widths.as_slice());
                let cost = phi_from_parts(d, seps[j], variant, epsilon_sep);
                if cost < best {
                    best = cost;
                    best_j = j;
                }
            }
            best_j
        })
        .collect())
}

/// Configuration of one clustering run: cluster count, DE parameters,
/// objective variant, and the separation guard.
#[derive(Debug, Clone)]
pub struct DekConfig {
    pub k: usize,
    pub de: DeConfig,
    pub variant: ObjectiveVariant,
    pub epsilon_sep: f64,
}

impl DekConfig {
    /// Defaults: DE at Np=60, F=0.7, Cr=0.8, MaxGs=1500 over the unit box
    /// (bounds are sized per-dataset inside [`run_dek`]).
    pub fn new(k: usize, seed: u64) -> Self {
        DekConfig {
            k,
            de: DeConfig::with_bounds(Vec::new(), seed),
            variant: ObjectiveVariant::Stabilized,
            epsilon_sep: DEFAULT_EPSILON_SEP,
        }
    }
}

/// Decoded centroids, assignment, cost, and bookkeeping for one run of any
/// clusterer in this crate.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub method: String,
    pub k: usize,
    pub seed: u64,
    pub variant: Option<ObjectiveVariant>,
    pub centroids: CentroidMatrix,
    pub assignment: Vec<usize>,
    pub objective: f64,
    pub sizes: Vec<usize>,
    /// Wall clock of the run. Not part of the serialized artifact, which
    /// must be bit-identical across replays.
    pub runtime: Duration,
}

impl ClusteringResult {
    pub(crate) fn sizes_from_assignment(assignment: &[usize], k: usize) -> Vec<usize> {
        let mut sizes = vec![0usize; k];
        for &a in assignment {
            sizes[a] += 1;
        }
        sizes
    }

    /// Serializable artifact: schema hash, config echo, objective,
    /// human-readable centroids, assignment, and sizes.
    pub fn to_json(&self, schema: &Schema) -> serde_json::Value {
        let centroids: Vec<serde_json::Value> = self
            .centroids
            .centroids
            .iter()
            .map(|c| {
                let mut obj = serde_json::Map::new();
                let mut ci = 0usize;
                let mut gi = 0usize;
                for col in schema.columns() {
                    match col {
                        ColumnSpec::Continuous { name } => {
                            obj.insert(name.clone(), serde_json::json!(c.continuous[ci]));
                            ci += 1;
                        }
                        ColumnSpec::Categorical { name, categories } => {
                            let label = &categories[c.categorical[gi] as usize];
                            obj.insert(name.clone(), serde_json::json!(label));
                            gi += 1;
                        }
                    }
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::json!({
            "schema_hash": schema.hash_hex(),
            "method": self.method,
            "k": self.k,
            "seed": self.seed,
            "variant": self.variant,
            "objective": self.objective,
            "centroids": centroids,
            "assignment": self.assignment,
            "sizes": self.sizes,
        })
    }
}

/// Run DE over the flat genome space and decode the best genome found.
pub fn run_dek(ds: &Dataset, cfg: &DekConfig) -> Result<ClusteringResult> {
    run_dek_traced(ds, cfg).map(|(result, _)| result)
}

/// As [`run_dek`], also returning the per-generation best objective trace.
pub fn run_dek_traced(ds: &Dataset, cfg: &DekConfig) -> Result<(ClusteringResult, Vec<f64>)> {
    if cfg.k < 2 {
        return Err(Error::InvalidConfig(format!(
            "dek needs k >= 2 for the separation term, got {}",
            cfg.k
        )));
    }
    if ds.n() < cfg.k {
        return Err(Error::TooFewRows {
            rows: ds.n(),
            k: cfg.k,
        });
    }
    let start = Instant::now();
    let dim = genome_len(ds.schema(), cfg.k);
    let mut de_cfg = cfg.de.clone();
    de_cfg.bounds = vec![(0.0, 1.0); dim];

    let schema = ds.schema().clone();
    let k = cfg.k;
    let variant = cfg.variant;
    let eps = cfg.epsilon_sep;
    let objective = move |genome: &[f64]| -> f64 {
        let cm = decode(genome, &schema, k).expect("engine keeps genome length fixed");
        objective_value(ds, &cm, variant, eps).expect("k >= 2 checked above")
    };

    let run = de_engine::run(&de_cfg, dim, &objective)?;
    let centroids = decode(&run.best, ds.schema(), cfg.k)?;
    let assignment = assign(ds, &centroids, variant, eps)?;
    let sizes = ClusteringResult::sizes_from_assignment(&assignment, cfg.k);
    let result = ClusteringResult {
        method: "dek".into(),
        k: cfg.k,
        seed: cfg.de.seed,
        variant: Some(variant),
        centroids,
        assignment,
        objective: run.best_value,
        sizes,
        runtime: start.elapsed(),
    };
    Ok((result, run.history))
}
