//! Comparison clusterers: Lloyd iteration under Gower distance with
//! median/mode prototype updates (plus a literal squared-error mode on
//! one-hot-expanded data), K-means++ seeding, and agglomerative
//! hierarchical clustering on the precomputed Gower matrix.

use std::time::Instant;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::dek_core::{CentroidMatrix, ClusteringResult};
use crate::error::{Error, Result};
use crate::gower::{distance_unchecked, pairwise_matrix, MixedPoint, PointView};

/// Initial centroid choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seeding {
    /// K distinct rows drawn uniformly.
    #[default]
    UniformRandomRows,
    /// Next seed drawn proportionally to squared Gower distance to the
    /// nearest already-chosen seed.
    KMeansPlusPlus,
}

/// Prototype update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    /// Per-dimension median (continuous) and mode (categorical), the exact
    /// per-cluster minimizer of the Gower objective.
    #[default]
    MedianMode,
    /// Mean update on one-hot-expanded data with squared Euclidean
    /// assignment, the literal square-error baseline.
    EuclideanOnehot,
}

#[derive(Debug, Clone)]
pub struct LloydConfig {
    pub k: usize,
    pub max_iters: usize,
    pub seeding: Seeding,
    pub seed: u64,
    /// Prototype movement threshold; 0 means run to a fixed point (or
    /// `max_iters`).
    pub tol: f64,
    pub update: UpdateRule,
}

impl LloydConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        LloydConfig {
            k,
            max_iters: 300,
            seeding: Seeding::UniformRandomRows,
            seed,
            tol: 0.0,
            update: UpdateRule::MedianMode,
        }
    }
}

/// K-means++ seeding under Gower distance: K distinct data rows.
pub fn kmeans_pp_seed(ds: &Dataset, k: usize, rng: &mut ChaCha8Rng) -> Result<CentroidMatrix> {
    if k < 1 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if ds.n() < k {
        return Err(Error::TooFewRows { rows: ds.n(), k });
    }
    let n = ds.n();
    let widths = ds.range_widths();
    let mut chosen: Vec<usize> = vec![rng.gen_range(0..n)];
    let mut nearest_sq = vec![f64::INFINITY; n];
    while chosen.len() < k {
        let newest = *chosen.last().unwrap();
        for (i, slot) in nearest_sq.iter_mut().enumerate() {
            let d = distance_unchecked(ds.point(i), ds.point(newest), &widths);
            *slot = slot.min(d * d);
        }
        let total: f64 = nearest_sq.iter().sum();
        let next = if total > 0.0 {
            let weights = WeightedIndex::new(&nearest_sq)
                .expect("positive total weight");
            weights.sample(rng)
        } else {
            // all remaining rows coincide with chosen seeds: fall back to a
            // uniform draw over the unchosen indices
            let unchosen: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            unchosen[rng.gen_range(0..unchosen.len())]
        };
        // zero weight makes re-picking a chosen row impossible in the
        // weighted branch, but guard against it all the same
        if !chosen.contains(&next) {
            chosen.push(next);
        }
    }
    Ok(CentroidMatrix {
        centroids: chosen.iter().map(|&i| ds.point(i).to_owned_point()).collect(),
    })
}

fn uniform_row_seed(ds: &Dataset, k: usize, rng: &mut ChaCha8Rng) -> CentroidMatrix {
    let sample = rand::seq::index::sample(rng, ds.n(), k);
    CentroidMatrix {
        centroids: sample.iter().map(|i| ds.point(i).to_owned_point()).collect(),
    }
}

/// Lloyd iteration: nearest-centroid assignment, prototype update, empty
/// clusters re-seeded at the point farthest from its nearest centroid.
pub fn lloyd_cluster(ds: &Dataset, cfg: &LloydConfig) -> Result<ClusteringResult> {
    lloyd_cluster_traced(ds, cfg).map(|(result, _)| result)
}

/// As [`lloyd_cluster`], also returning the per-iteration objective values
/// (non-increasing; length < `max_iters` means early convergence).
pub fn lloyd_cluster_traced(
    ds: &Dataset,
    cfg: &LloydConfig,
) -> Result<(ClusteringResult, Vec<f64>)> {
    if cfg.k < 1 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if cfg.max_iters < 1 {
        return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
    }
    if ds.n() < cfg.k {
        return Err(Error::TooFewRows { rows: ds.n(), k: cfg.k });
    }
    match cfg.update {
        UpdateRule::MedianMode => lloyd_median_mode(ds, cfg),
        UpdateRule::EuclideanOnehot => lloyd_euclidean_onehot(ds, cfg),
    }
}

fn seed_prototypes(ds: &Dataset, cfg: &LloydConfig, rng: &mut ChaCha8Rng) -> Result<CentroidMatrix> {
    match cfg.seeding {
        Seeding::UniformRandomRows => Ok(uniform_row_seed(ds, cfg.k, rng)),
        Seeding::KMeansPlusPlus => kmeans_pp_seed(ds, cfg.k, rng),
    }
}

fn lloyd_median_mode(ds: &Dataset, cfg: &LloydConfig) -> Result<(ClusteringResult, Vec<f64>)> {
    let start = Instant::now();
    let n = ds.n();
    let widths = ds.range_widths();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut prototypes = seed_prototypes(ds, cfg, &mut rng)?.centroids;

    let nearest = |protos: &[MixedPoint], i: usize| -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (j, p) in protos.iter().enumerate() {
            let d = distance_unchecked(ds.point(i), p.view(), &widths);
            if d < best.1 {
                best = (j, d);
            }
        }
        best
    };

    let assign_with_repair = |protos: &mut Vec<MixedPoint>| -> Vec<usize> {
        let mut assignment: Vec<usize> = (0..n).map(|i| nearest(protos, i).0).collect();
        let mut sizes = ClusteringResult::sizes_from_assignment(&assignment, cfg.k);
        let empties: Vec<usize> = (0..cfg.k).filter(|&j| sizes[j] == 0).collect();
        if !empties.is_empty() {
            for j in empties {
                // farthest point from its nearest current centroid
                let mut far = (0usize, f64::NEG_INFINITY);
                for i in 0..n {
                    let d = nearest(protos, i).1;
                    if d > far.1 {
                        far = (i, d);
                    }
                }
                protos[j] = ds.point(far.0).to_owned_point();
            }
            assignment = (0..n).map(|i| nearest(protos, i).0).collect();
            sizes = ClusteringResult::sizes_from_assignment(&assignment, cfg.k);
        }
        let _ = sizes;
        assignment
    };

    let cost = |protos: &[MixedPoint], assignment: &[usize]| -> f64 {
        assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| distance_unchecked(ds.point(i), protos[j].view(), &widths))
            .sum()
    };

    let mut assignment = assign_with_repair(&mut prototypes);
    let mut history = vec![cost(&prototypes, &assignment)];
    while history.len() < cfg.max_iters {
        let new_protos = median_mode_prototypes(ds, &assignment, &prototypes, cfg.k);
        let moved = prototypes
            .iter()
            .zip(&new_protos)
            .map(|(a, b)| distance_unchecked(a.view(), b.view(), &widths))
            .fold(0.0f64, f64::max);
        prototypes = new_protos;
        let new_assignment = assign_with_repair(&mut prototypes);
        history.push(cost(&prototypes, &new_assignment));
        let fixed_point = new_assignment == assignment;
        assignment = new_assignment;
        if fixed_point || (cfg.tol > 0.0 && moved <= cfg.tol) {
            break;
        }
    }

    let objective = *history.last().unwrap();
    let sizes = ClusteringResult::sizes_from_assignment(&assignment, cfg.k);
    let result = ClusteringResult {
        method: "lloyd".into(),
        k: cfg.k,
        seed: cfg.seed,
        variant: None,
        centroids: CentroidMatrix { centroids: prototypes },
        assignment,
        objective,
        sizes,
        runtime: start.elapsed(),
    };
    Ok((result, history))
}

/// Per-cluster (median, mode) prototypes; empty clusters keep their old
/// prototype.
fn median_mode_prototypes(
    ds: &Dataset,
    assignment: &[usize],
    old: &[MixedPoint],
    k: usize,
) -> Vec<MixedPoint> {
    let d_con = ds.schema().d_con();
    let choices = ds.schema().choice_counts();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &j) in assignment.iter().enumerate() {
        members[j].push(i);
    }
    (0..k)
        .map(|j| {
            if members[j].is_empty() {
                return old[j].clone();
            }
            let continuous = (0..d_con)
                .map(|d| median(members[j].iter().map(|&i| ds.point(i).cont[d])))
                .collect();
            let categorical = choices
                .iter()
                .enumerate()
                .map(|(l, &n_l)| mode(members[j].iter().map(|&i| ds.point(i).cat[l]), n_l))
                .collect();
            MixedPoint {
                continuous,
                categorical,
            }
        })
        .collect()
}

fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Most frequent category, ties to the lowest index.
fn mode(values: impl Iterator<Item = u32>, n_choices: usize) -> u32 {
    let mut counts = vec![0usize; n_choices];
    for v in values {
        counts[v as usize] += 1;
    }
    let mut best = 0usize;
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = i;
        }
    }
    best as u32
}

fn lloyd_euclidean_onehot(ds: &Dataset, cfg: &LloydConfig) -> Result<(ClusteringResult, Vec<f64>)> {
    let start = Instant::now();
    let n = ds.n();
    let dim = ds.schema().expanded_dim();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| expand_onehot(ds.point(i), ds)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seed_cm = seed_prototypes(ds, cfg, &mut rng)?;
    let mut prototypes: Vec<Vec<f64>> = seed_cm
        .centroids
        .iter()
        .map(|c| expand_onehot(c.view(), ds))
        .collect();

    let sq_dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    };
    let nearest = |protos: &[Vec<f64>], i: usize| -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (j, p) in protos.iter().enumerate() {
            let d = sq_dist(&rows[i], p);
            if d < best.1 {
                best = (j, d);
            }
        }
        best
    };
    let assign_with_repair = |protos: &mut Vec<Vec<f64>>| -> Vec<usize> {
        let mut assignment: Vec<usize> = (0..n).map(|i| nearest(protos, i).0).collect();
        let sizes = ClusteringResult::sizes_from_assignment(&assignment, cfg.k);
        let empties: Vec<usize> = (0..cfg.k).filter(|&j| sizes[j] == 0).collect();
        if !empties.is_empty() {
            for j in empties {
                let mut far = (0usize, f64::NEG_INFINITY);
                for i in 0..n {
                    let d = nearest(protos, i).1;
                    if d > far.1 {
                        far = (i, d);
                    }
                }
                protos[j] = rows[far.0].clone();
            }
            assignment = (0..n).map(|i| nearest(protos, i).0).collect();
        }
        assignment
    };
    let cost = |protos: &[Vec<f64>], assignment: &[usize]| -> f64 {
        assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| sq_dist(&rows[i], &protos[j]))
            .sum()
    };

    let mut assignment = assign_with_repair(&mut prototypes);
    let mut history = vec![cost(&prototypes, &assignment)];
    while history.len() < cfg.max_iters {
        let mut sums = vec![vec![0.0; dim]; cfg.k];
        let mut counts = vec![0usize; cfg.k];
        for (i, &j) in assignment.iter().enumerate() {
            counts[j] += 1;
            for (s, &x) in sums[j].iter_mut().zip(&rows[i]) {
                *s += x;
            }
        }
        let mut moved = 0.0f64;
        for j in 0..cfg.k {
            if counts[j] > 0 {
                let mean: Vec<f64> = sums[j].iter().map(|s| s / counts[j] as f64).collect();
                moved = moved.max(sq_dist(&prototypes[j], &mean).sqrt());
                prototypes[j] = mean;
            }
        }
        let new_assignment = assign_with_repair(&mut prototypes);
        history.push(cost(&prototypes, &new_assignment));
        let fixed_point = new_assignment == assignment;
        assignment = new_assignment;
        if fixed_point || (cfg.tol > 0.0 && moved <= cfg.tol) {
            break;
        }
    }

    let centroids = CentroidMatrix {
        centroids: prototypes
            .iter()
            .map(|p| collapse_onehot(p, ds))
            .collect(),
    };
    let objective = *history.last().unwrap();
    let sizes = ClusteringResult::sizes_from_assignment(&assignment, cfg.k);
    let result = ClusteringResult {
        method: "lloyd".into(),
        k: cfg.k,
        seed: cfg.seed,
        variant: None,
        centroids,
        assignment,
        objective,
        sizes,
        runtime: start.elapsed(),
    };
    Ok((result, history))
}

/// Continuous values verbatim, each categorical index as a one-hot block.
pub(crate) fn expand_onehot(p: PointView, ds: &Dataset) -> Vec<f64> {
    let choices = ds.schema().choice_counts();
    let mut out = Vec::with_capacity(ds.schema().expanded_dim());
    out.extend_from_slice(p.cont);
    for (l, &n_l) in choices.iter().enumerate() {
        for pos in 0..n_l {
            out.push(if pos == p.cat[l] as usize { 1.0 } else { 0.0 });
        }
    }
    out
}

fn collapse_onehot(expanded: &[f64], ds: &Dataset) -> MixedPoint {
    let d_con = ds.schema().d_con();
    let choices = ds.schema().choice_counts();
    let continuous = expanded[..d_con].to_vec();
    let mut categorical = Vec::with_capacity(choices.len());
    let mut offset = d_con;
    for &n_l in &choices {
        let block = &expanded[offset..offset + n_l];
        let mut best = 0usize;
        for (i, &v) in block.iter().enumerate().skip(1) {
            if v > block[best] {
                best = i;
            }
        }
        categorical.push(best as u32);
        offset += n_l;
    }
    MixedPoint {
        continuous,
        categorical,
    }
}

/// Linkage criterion for hierarchical clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

#[derive(Debug, Clone)]
pub struct HierConfig {
    pub k: usize,
    pub linkage: Linkage,
}

/// Agglomerative clustering on the pairwise Gower matrix: merge the closest
/// active pair (ties to the lexicographically lowest slot pair) until K
/// clusters remain. Cluster prototypes are reported as per-cluster
/// (median, mode).
pub fn hierarchical_cluster(ds: &Dataset, cfg: &HierConfig) -> Result<ClusteringResult> {
    hierarchical_cluster_traced(ds, cfg).map(|(result, _)| result)
}

/// As [`hierarchical_cluster`], also returning the merge distances in order.
pub fn hierarchical_cluster_traced(
    ds: &Dataset,
    cfg: &HierConfig,
) -> Result<(ClusteringResult, Vec<f64>)> {
    if cfg.k < 1 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if ds.n() < cfg.k {
        return Err(Error::TooFewRows { rows: ds.n(), k: cfg.k });
    }
    let start = Instant::now();
    let n = ds.n();
    let matrix = pairwise_matrix(ds);
    let mut dist: Vec<f64> = (0..n * n).map(|idx| matrix.get(idx / n, idx % n)).collect();
    let mut active: Vec<bool> = vec![true; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut merge_distances = Vec::new();

    let mut remaining = n;
    while remaining > cfg.k {
        // closest active pair, lexicographically first on ties
        let mut best = (usize::MAX, usize::MAX, f64::INFINITY);
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if active[j] && dist[i * n + j] < best.2 {
                    best = (i, j, dist[i * n + j]);
                }
            }
        }
        let (i, j, d) = best;
        merge_distances.push(d);
        let (size_i, size_j) = (members[i].len() as f64, members[j].len() as f64);
        // Lance-Williams update of the surviving slot i
        for h in 0..n {
            if h == i || h == j || !active[h] {
                continue;
            }
            let d_ih = dist[i * n + h];
            let d_jh = dist[j * n + h];
            let updated = match cfg.linkage {
                Linkage::Single => d_ih.min(d_jh),
                Linkage::Complete => d_ih.max(d_jh),
                Linkage::Average => (size_i * d_ih + size_j * d_jh) / (size_i + size_j),
            };
            dist[i * n + h] = updated;
            dist[h * n + i] = updated;
        }
        let moved = std::mem::take(&mut members[j]);
        members[i].extend(moved);
        active[j] = false;
        remaining -= 1;
    }

    let mut assignment = vec![0usize; n];
    let mut final_members = Vec::with_capacity(cfg.k);
    for slot in 0..n {
        if active[slot] {
            let cluster = final_members.len();
            for &point in &members[slot] {
                assignment[point] = cluster;
            }
            final_members.push(members[slot].clone());
        }
    }

    let placeholder: Vec<MixedPoint> = final_members
        .iter()
        .map(|m| ds.point(m[0]).to_owned_point())
        .collect();
    let prototypes = median_mode_prototypes(ds, &assignment, &placeholder, cfg.k);
    let widths = ds.range_widths();
    let objective: f64 = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| distance_unchecked(ds.point(i), prototypes[j].view(), &widths))
        .sum();
    let sizes = ClusteringResult::sizes_from_assignment(&assignment, cfg.k);
    let result = ClusteringResult {
        method: "hier".into(),
        k: cfg.k,
        seed: 0,
        variant: None,
        centroids: CentroidMatrix {
            centroids: prototypes,
        },
        assignment,
        objective,
        sizes,
        runtime: start.elapsed(),
    };
    Ok((result, merge_distances))
}
