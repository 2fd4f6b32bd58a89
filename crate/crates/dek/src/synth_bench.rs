//! Synthetic mixed-data generation with planted clusters, external
//! agreement scoring (adjusted Rand index), and the repeated-runs
//! comparison protocol.
//!
//! The benchmark runs R seeded runs per (dataset, method) pair with seeds
//! `base_seed + run`, collects a metric report per run, and aggregates
//! mean, std, and best per metric. Failed runs are recorded with their
//! error and excluded from aggregates rather than aborting the bench.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    hierarchical_cluster, lloyd_cluster, HierConfig, Linkage, LloydConfig, Seeding,
};
use crate::dataset::{ColumnSpec, Dataset, Schema};
use crate::de_engine::DeTuning;
use crate::dek_core::{run_dek, DekConfig, ObjectiveVariant};
use crate::error::{Error, Result};
use crate::gower::pairwise_matrix;
use crate::model_selection::{pick_elbow, sweep_k, SweepMethod};
use crate::validity_metrics::{metric_report, MetricReport};

/// Shape of a planted-cluster synthetic dataset.
///
/// Continuous dimensions are unit-variance Gaussians around cluster centers
/// spaced `separation` apart (so separation is in within-cluster standard
/// deviations); categorical dimensions take the cluster's modal category
/// with probability `purity`, else uniform over the rest. The modal
/// category of cluster c in column l is (c + l) mod N_l.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_per_cluster: usize,
    pub k_true: usize,
    pub d_con: usize,
    /// Choice count per categorical column.
    pub cat_choices: Vec<usize>,
    pub separation: f64,
    pub purity: f64,
    pub seed: u64,
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.n_per_cluster < 1 || self.k_true < 1 {
            return Err(Error::InvalidSpec(
                "need at least one cluster and one point per cluster".into(),
            ));
        }
        if self.d_con + self.cat_choices.len() == 0 {
            return Err(Error::InvalidSpec("need at least one column".into()));
        }
        if self.separation < 0.0 || !self.separation.is_finite() {
            return Err(Error::InvalidSpec("separation must be >= 0".into()));
        }
        for &n_l in &self.cat_choices {
            if n_l < 2 {
                return Err(Error::InvalidSpec("choice counts must be >= 2".into()));
            }
            if self.purity < 1.0 / n_l as f64 || self.purity > 1.0 {
                return Err(Error::InvalidSpec(format!(
                    "purity {} outside [1/{n_l}, 1]",
                    self.purity
                )));
            }
        }
        Ok(())
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; 1 - u keeps the log argument strictly positive
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    (-2.0 * (1.0 - u1).ln()).sqrt() * (TAU * u2).cos()
}

/// Generate a normalized dataset with planted labels for oracle scoring.
/// Rows are emitted cluster-major; fixed seed gives an identical dataset.
pub fn generate(spec: &SynthSpec) -> Result<(Dataset, Vec<usize>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut columns: Vec<ColumnSpec> = (0..spec.d_con)
        .map(|d| ColumnSpec::Continuous {
            name: format!("con_{d}"),
        })
        .collect();
    for (l, &n_l) in spec.cat_choices.iter().enumerate() {
        columns.push(ColumnSpec::Categorical {
            name: format!("cat_{l}"),
            categories: (0..n_l).map(|v| format!("v{v}")).collect(),
        });
    }
    let schema = Schema::new(columns)?;

    let n = spec.n_per_cluster * spec.k_true;
    let mut cont = Vec::with_capacity(n * spec.d_con);
    let mut cat = Vec::with_capacity(n * spec.cat_choices.len());
    let mut labels = Vec::with_capacity(n);
    for cluster in 0..spec.k_true {
        for _ in 0..spec.n_per_cluster {
            for _ in 0..spec.d_con {
                cont.push(cluster as f64 * spec.separation + standard_normal(&mut rng));
            }
            for (l, &n_l) in spec.cat_choices.iter().enumerate() {
                let modal = (cluster + l) % n_l;
                let take_modal = rng.gen::<f64>() < spec.purity;
                let value = if take_modal {
                    modal
                } else {
                    // uniform over the other n_l - 1 categories
                    let draw = rng.gen_range(0..n_l - 1);
                    if draw >= modal {
                        draw + 1
                    } else {
                        draw
                    }
                };
                cat.push(value as u32);
            }
            labels.push(cluster);
        }
    }
    let ds = Dataset::from_parts(schema, cont, cat)?.normalize();
    Ok((ds, labels))
}

/// Adjusted Rand index from the pair-counting contingency table: 1 for
/// identical partitions up to relabeling, expected 0 under independence.
pub fn adjusted_rand_index(labels_a: &[usize], labels_b: &[usize]) -> Result<f64> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::LengthMismatch {
            expected: labels_a.len(),
            got: labels_b.len(),
        });
    }
    let n = labels_a.len();
    let mut contingency: HashMap<(usize, usize), usize> = HashMap::new();
    let mut count_a: HashMap<usize, usize> = HashMap::new();
    let mut count_b: HashMap<usize, usize> = HashMap::new();
    for (&a, &b) in labels_a.iter().zip(labels_b) {
        *contingency.entry((a, b)).or_insert(0) += 1;
        *count_a.entry(a).or_insert(0) += 1;
        *count_b.entry(b).or_insert(0) += 1;
    }
    let comb2 = |x: usize| -> f64 { (x * x.saturating_sub(1)) as f64 / 2.0 };
    let sum_ab: f64 = contingency.values().map(|&c| comb2(c)).sum();
    let sum_a: f64 = count_a.values().map(|&c| comb2(c)).sum();
    let sum_b: f64 = count_b.values().map(|&c| comb2(c)).sum();
    let total = comb2(n);
    let expected = sum_a * sum_b / total;
    let max_index = (sum_a + sum_b) / 2.0;
    if max_index == expected {
        // both partitions are all-singletons or one cluster: perfect match
        return Ok(1.0);
    }
    Ok((sum_ab - expected) / (max_index - expected))
}

/// Clustering method selector for the benchmark and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "lower")]
pub enum Method {
    Dek,
    Lloyd,
    Hier,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Dek => write!(f, "dek"),
            Method::Lloyd => write!(f, "lloyd"),
            Method::Hier => write!(f, "hier"),
        }
    }
}

/// Cluster count: fixed, or chosen per dataset by the SSE elbow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KChoice {
    Fixed(usize),
    Elbow,
}

/// Benchmark protocol configuration.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub datasets: Vec<(String, Dataset)>,
    pub methods: Vec<Method>,
    pub k: KChoice,
    /// Independent runs per (dataset, method); the protocol default is 20.
    pub runs: usize,
    pub base_seed: u64,
    pub variant: ObjectiveVariant,
    pub seeding: Seeding,
    pub linkage: Linkage,
    pub de_tuning: Option<DeTuning>,
}

impl BenchSpec {
    pub fn new(datasets: Vec<(String, Dataset)>, methods: Vec<Method>) -> Self {
        BenchSpec {
            datasets,
            methods,
            k: KChoice::Elbow,
            runs: 20,
            base_seed: 0,
            variant: ObjectiveVariant::Stabilized,
            seeding: Seeding::UniformRandomRows,
            linkage: Linkage::Average,
            de_tuning: None,
        }
    }
}

/// One seeded run: its metric report, or the error that felled it.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub metrics: Option<MetricReport>,
    pub error: Option<String>,
    /// Wall clock, for the console only; excluded from report artifacts.
    #[serde(skip)]
    pub wall_ms: u128,
}

/// Mean/std/best of one metric over the successful runs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
    pub best: f64,
}

fn aggregate(values: &[f64], best_is_min: bool) -> Option<Aggregate> {
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    let best = values
        .iter()
        .copied()
        .fold(if best_is_min { f64::INFINITY } else { f64::NEG_INFINITY }, |acc, v| {
            if best_is_min {
                acc.min(v)
            } else {
                acc.max(v)
            }
        });
    Some(Aggregate {
        mean,
        std: var.sqrt(),
        best,
    })
}

/// Results of all runs of one method on one dataset.
#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub dataset: String,
    pub method: Method,
    pub k: usize,
    pub records: Vec<RunRecord>,
    pub dbi: Option<Aggregate>,
    pub sc: Option<Aggregate>,
    pub dvi: Option<Aggregate>,
    pub failed_runs: usize,
}

/// The full benchmark report.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub runs: usize,
    pub base_seed: u64,
    pub k_by_dataset: Vec<(String, usize)>,
    pub entries: Vec<MethodReport>,
}

/// Execute the protocol. Deterministic: a fixed `base_seed` yields a
/// bit-identical report.
pub fn run_bench(spec: &BenchSpec) -> Result<RunReport> {
    if spec.runs < 1 {
        return Err(Error::InvalidConfig("runs must be at least 1".into()));
    }
    if spec.datasets.is_empty() || spec.methods.is_empty() {
        return Err(Error::InvalidConfig(
            "bench needs at least one dataset and one method".into(),
        ));
    }
    let mut entries = Vec::new();
    let mut k_by_dataset = Vec::new();
    for (name, raw) in &spec.datasets {
        let ds = raw.normalize();
        let k = match spec.k {
            KChoice::Fixed(k) => k,
            KChoice::Elbow => {
                let k_max = 8.min(ds.n().saturating_sub(1));
                let curve = sweep_k(&ds, 2, k_max, 5, SweepMethod::Lloyd, spec.base_seed, None)?;
                pick_elbow(&curve)?
            }
        };
        k_by_dataset.push((name.clone(), k));
        let matrix = pairwise_matrix(&ds);
        for &method in &spec.methods {
            let records: Vec<RunRecord> = (0..spec.runs)
                .into_par_iter()
                .map(|run| {
                    let seed = spec.base_seed.wrapping_add(run as u64);
                    let start = Instant::now();
                    let outcome = match method {
                        Method::Dek => {
                            let mut cfg = DekConfig::new(k, seed);
                            cfg.variant = spec.variant;
                            if let Some(tuning) = &spec.de_tuning {
                                tuning.apply(&mut cfg.de);
                                cfg.de.seed = seed;
                            }
                            run_dek(&ds, &cfg)
                        }
                        Method::Lloyd => {
                            let mut cfg = LloydConfig::new(k, seed);
                            cfg.seeding = spec.seeding;
                            lloyd_cluster(&ds, &cfg)
                        }
                        Method::Hier => hierarchical_cluster(
                            &ds,
                            &HierConfig {
                                k,
                                linkage: spec.linkage,
                            },
                        ),
                    };
                    let metrics = outcome.and_then(|result| metric_report(&ds, &matrix, &result));
                    match metrics {
                        Ok(m) => RunRecord {
                            seed,
                            metrics: Some(m),
                            error: None,
                            wall_ms: start.elapsed().as_millis(),
                        },
                        Err(e) => RunRecord {
                            seed,
                            metrics: None,
                            error: Some(e.to_string()),
                            wall_ms: start.elapsed().as_millis(),
                        },
                    }
                })
                .collect();
            let ok: Vec<&MetricReport> = records.iter().filter_map(|r| r.metrics.as_ref()).collect();
            let dbis: Vec<f64> = ok.iter().map(|m| m.dbi).collect();
            let scs: Vec<f64> = ok.iter().map(|m| m.sc).collect();
            let dvis: Vec<f64> = ok.iter().map(|m| m.dvi).collect();
            entries.push(MethodReport {
                dataset: name.clone(),
                method,
                k,
                failed_runs: records.len() - ok.len(),
                dbi: aggregate(&dbis, true),
                sc: aggregate(&scs, false),
                dvi: aggregate(&dvis, false),
                records,
            });
        }
    }
    Ok(RunReport {
        runs: spec.runs,
        base_seed: spec.base_seed,
        k_by_dataset,
        entries,
    })
}

impl RunReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// CSV emission: one row per (dataset, method) with the aggregates.
    pub fn write_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record([
            "dataset", "method", "k", "runs_ok", "dbi_mean", "dbi_std", "dbi_best", "sc_mean",
            "sc_std", "sc_best", "dvi_mean", "dvi_std", "dvi_best",
        ])?;
        for e in &self.entries {
            let fmt3 = |a: &Option<Aggregate>| -> [String; 3] {
                match a {
                    Some(a) => [a.mean.to_string(), a.std.to_string(), a.best.to_string()],
                    None => ["".into(), "".into(), "".into()],
                }
            };
            let dbi = fmt3(&e.dbi);
            let sc = fmt3(&e.sc);
            let dvi = fmt3(&e.dvi);
            wtr.write_record([
                e.dataset.as_str(),
                &e.method.to_string(),
                &e.k.to_string(),
                &(e.records.len() - e.failed_runs).to_string(),
                &dbi[0], &dbi[1], &dbi[2],
                &sc[0], &sc[1], &sc[2],
                &dvi[0], &dvi[1], &dvi[2],
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Aligned comparison table with mean +/- std cells and the best method
    /// per (dataset, metric) row starred.
    pub fn render_table(&self) -> String {
        let methods: Vec<Method> = {
            let mut seen = Vec::new();
            for e in &self.entries {
                if !seen.contains(&e.method) {
                    seen.push(e.method);
                }
            }
            seen
        };
        let datasets: Vec<&str> = {
            let mut seen = Vec::new();
            for e in &self.entries {
                if !seen.contains(&e.dataset.as_str()) {
                    seen.push(e.dataset.as_str());
                }
            }
            seen
        };
        let cell_width = 20usize;
        let mut out = String::new();
        out.push_str(&format!("{:<16}{:<8}", "dataset", "metric"));
        for m in &methods {
            out.push_str(&format!("{:<cell_width$}", m.to_string()));
        }
        out.push('\n');
        for ds_name in datasets {
            for (metric, best_is_min) in [("DBI", true), ("SC", false), ("DVI", false)] {
                let get = |m: Method| -> Option<Aggregate> {
                    self.entries
                        .iter()
                        .find(|e| e.dataset == ds_name && e.method == m)
                        .and_then(|e| match metric {
                            "DBI" => e.dbi,
                            "SC" => e.sc,
                            _ => e.dvi,
                        })
                };
                let best = methods
                    .iter()
                    .filter_map(|&m| get(m).map(|a| a.mean))
                    .fold(
                        if best_is_min { f64::INFINITY } else { f64::NEG_INFINITY },
                        |acc, v| if best_is_min { acc.min(v) } else { acc.max(v) },
                    );
                out.push_str(&format!("{ds_name:<16}{metric:<8}"));
                for &m in &methods {
                    let cell = match get(m) {
                        Some(a) => {
                            let star = if a.mean == best { "*" } else { " " };
                            format!("{}{:.4} +/- {:.4}", star, a.mean, a.std)
                        }
                        None => "-".to_string(),
                    };
                    out.push_str(&format!("{cell:<cell_width$}"));
                }
                out.push('\n');
            }
        }
        out
    }
}
