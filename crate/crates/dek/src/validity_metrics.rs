//! Internal cluster validity indices: Davies-Bouldin (DBI), silhouette
//! (SC), Dunn (DVI), and SSE, over Gower distance by default with a
//! one-hot-expanded Euclidean mode for cross-checks on continuous data.
//!
//! Empty clusters are dropped before any index is computed; the surviving
//! count is reported as `k_effective`. Smaller DBI is better; larger SC and
//! DVI are better.

use serde::Serialize;

use crate::baselines::expand_onehot;
use crate::dataset::Dataset;
use crate::dek_core::ClusteringResult;
use crate::error::{Error, Result};
use crate::gower::{distance_unchecked, DistanceMatrix, MixedPoint, PointView};

/// Which distance (and matching prototype rule) the indices use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceKind {
    /// Gower distance; prototypes are per-dimension (median, mode).
    #[default]
    Gower,
    /// Euclidean distance on one-hot-expanded points; prototypes are means.
    EuclideanOnehot,
}

/// One run's metric values. `dvi` (and in degenerate cases `dbi`) may be
/// infinite; the flags say why.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricReport {
    pub dbi: f64,
    pub sc: f64,
    pub dvi: f64,
    pub sse: f64,
    pub k_effective: usize,
    /// Two cluster prototypes coincided while computing DBI.
    pub degenerate_centroids: bool,
    /// Every cluster is a set of duplicate points (Dunn denominator 0).
    pub zero_diameter: bool,
}

/// Members per nonempty cluster, ordered by ascending original label.
fn nonempty_members(assignment: &[usize]) -> Vec<Vec<usize>> {
    let k = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &j) in assignment.iter().enumerate() {
        members[j].push(i);
    }
    members.retain(|m| !m.is_empty());
    members
}

fn cluster_prototype(ds: &Dataset, members: &[usize], kind: DistanceKind) -> Vec<f64> {
    match kind {
        DistanceKind::Gower => {
            let p = median_mode_point(ds, members);
            expand_gowerless(&p)
        }
        DistanceKind::EuclideanOnehot => {
            let dim = ds.schema().expanded_dim();
            let mut mean = vec![0.0; dim];
            for &i in members {
                for (s, x) in mean.iter_mut().zip(expand_onehot(ds.point(i), ds)) {
                    *s += x;
                }
            }
            for s in &mut mean {
                *s /= members.len() as f64;
            }
            mean
        }
    }
}

// Gower prototypes stay mixed; stash them in a flat buffer
// [cont..., cat-as-f64...] so both kinds share one code path.
fn expand_gowerless(p: &MixedPoint) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.continuous.len() + p.categorical.len());
    out.extend_from_slice(&p.continuous);
    out.extend(p.categorical.iter().map(|&c| c as f64));
    out
}

fn median_mode_point(ds: &Dataset, members: &[usize]) -> MixedPoint {
    let d_con = ds.schema().d_con();
    let choices = ds.schema().choice_counts();
    let continuous = (0..d_con)
        .map(|d| {
            let mut v: Vec<f64> = members.iter().map(|&i| ds.point(i).cont[d]).collect();
            v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            let n = v.len();
            if n % 2 == 1 {
                v[n / 2]
            } else {
                (v[n / 2 - 1] + v[n / 2]) / 2.0
            }
        })
        .collect();
    let categorical = choices
        .iter()
        .enumerate()
        .map(|(l, &n_l)| {
            let mut counts = vec![0usize; n_l];
            for &i in members {
                counts[ds.point(i).cat[l] as usize] += 1;
            }
            let mut best = 0usize;
            for (c, &cnt) in counts.iter().enumerate().skip(1) {
                if cnt > counts[best] {
                    best = c;
                }
            }
            best as u32
        })
        .collect();
    MixedPoint {
        continuous,
        categorical,
    }
}

fn proto_view<'a>(buf: &'a [f64], d_con: usize, cat_store: &'a mut Vec<u32>) -> PointView<'a> {
    cat_store.clear();
    cat_store.extend(buf[d_con..].iter().map(|&v| v as u32));
    PointView {
        cont: &buf[..d_con],
        cat: cat_store,
    }
}

fn point_to_proto_distance(
    ds: &Dataset,
    i: usize,
    proto: &[f64],
    kind: DistanceKind,
    widths: &[f64],
) -> f64 {
    match kind {
        DistanceKind::Gower => {
            let mut cat = Vec::new();
            let view = proto_view(proto, ds.schema().d_con(), &mut cat);
            distance_unchecked(ds.point(i), view, widths)
        }
        DistanceKind::EuclideanOnehot => {
            let row = expand_onehot(ds.point(i), ds);
            row.iter()
                .zip(proto)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        }
    }
}

fn proto_to_proto_distance(
    ds: &Dataset,
    a: &[f64],
    b: &[f64],
    kind: DistanceKind,
    widths: &[f64],
) -> f64 {
    match kind {
        DistanceKind::Gower => {
            let d_con = ds.schema().d_con();
            let mut cat_a = Vec::new();
            let mut cat_b = Vec::new();
            let va = proto_view(a, d_con, &mut cat_a);
            let vb = proto_view(b, d_con, &mut cat_b);
            distance_unchecked(va, vb, widths)
        }
        DistanceKind::EuclideanOnehot => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
    }
}

/// Davies-Bouldin index over nonempty clusters. Returns the value and a
/// flag marking coincident prototypes (which force an infinite ratio).
pub fn davies_bouldin(
    ds: &Dataset,
    assignment: &[usize],
    kind: DistanceKind,
) -> Result<(f64, bool)> {
    let members = nonempty_members(assignment);
    let k = members.len();
    if k < 2 {
        return Err(Error::TooFewClusters(k));
    }
    let widths = ds.range_widths();
    let protos: Vec<Vec<f64>> = members
        .iter()
        .map(|m| cluster_prototype(ds, m, kind))
        .collect();
    let scatter: Vec<f64> = members
        .iter()
        .zip(&protos)
        .map(|(m, p)| {
            m.iter()
                .map(|&i| point_to_proto_distance(ds, i, p, kind, &widths))
                .sum::<f64>()
                / m.len() as f64
        })
        .collect();
    let mut degenerate = false;
    let mut total = 0.0;
    for i in 0..k {
        let mut worst = f64::NEG_INFINITY;
        for j in 0..k {
            if i == j {
                continue;
            }
            let sep = proto_to_proto_distance(ds, &protos[i], &protos[j], kind, &widths);
            let ratio = if sep > 0.0 {
                (scatter[i] + scatter[j]) / sep
            } else {
                degenerate = true;
                f64::INFINITY
            };
            worst = worst.max(ratio);
        }
        total += worst;
    }
    Ok((total / k as f64, degenerate))
}

/// Mean silhouette over all points: s(i) = (b - a) / max(a, b), with
/// s(i) = 0 for singleton clusters (the standard convention).
pub fn silhouette(matrix: &DistanceMatrix, assignment: &[usize]) -> Result<f64> {
    if matrix.n() != assignment.len() {
        return Err(Error::LengthMismatch {
            expected: matrix.n(),
            got: assignment.len(),
        });
    }
    let members = nonempty_members(assignment);
    if members.len() < 2 {
        return Err(Error::TooFewClusters(members.len()));
    }
    let n = assignment.len();
    // position of each point's cluster in the nonempty list
    let mut cluster_of = vec![0usize; n];
    for (c, m) in members.iter().enumerate() {
        for &i in m {
            cluster_of[i] = c;
        }
    }
    let mut total = 0.0;
    for i in 0..n {
        let own = &members[cluster_of[i]];
        if own.len() == 1 {
            continue; // s(i) = 0
        }
        let a = own
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| matrix.get(i, j))
            .sum::<f64>()
            / (own.len() - 1) as f64;
        let b = members
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != cluster_of[i])
            .map(|(_, m)| m.iter().map(|&j| matrix.get(i, j)).sum::<f64>() / m.len() as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Dunn index in its original form: minimum inter-cluster point distance
/// over maximum intra-cluster diameter. A zero diameter (every cluster a
/// duplicate-point set) reports infinity with the flag set.
pub fn dunn(matrix: &DistanceMatrix, assignment: &[usize]) -> Result<(f64, bool)> {
    if matrix.n() != assignment.len() {
        return Err(Error::LengthMismatch {
            expected: matrix.n(),
            got: assignment.len(),
        });
    }
    let members = nonempty_members(assignment);
    if members.len() < 2 {
        return Err(Error::TooFewClusters(members.len()));
    }
    let mut diameter = 0.0f64;
    for m in &members {
        for (a, &i) in m.iter().enumerate() {
            for &j in &m[a + 1..] {
                diameter = diameter.max(matrix.get(i, j));
            }
        }
    }
    let mut inter = f64::INFINITY;
    for (c, m) in members.iter().enumerate() {
        for other in &members[c + 1..] {
            for &i in m {
                for &j in other {
                    inter = inter.min(matrix.get(i, j));
                }
            }
        }
    }
    if diameter == 0.0 {
        return Ok((f64::INFINITY, true));
    }
    Ok((inter / diameter, false))
}

/// Sum of squared distances from each point to its assigned centroid.
pub fn sse(ds: &Dataset, result: &ClusteringResult, kind: DistanceKind) -> f64 {
    let widths = ds.range_widths();
    match kind {
        DistanceKind::Gower => result
            .assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let d = distance_unchecked(
                    ds.point(i),
                    result.centroids.centroids[j].view(),
                    &widths,
                );
                d * d
            })
            .sum(),
        DistanceKind::EuclideanOnehot => {
            let protos: Vec<Vec<f64>> = result
                .centroids
                .centroids
                .iter()
                .map(|c| expand_onehot(c.view(), ds))
                .collect();
            result
                .assignment
                .iter()
                .enumerate()
                .map(|(i, &j)| {
                    expand_onehot(ds.point(i), ds)
                        .iter()
                        .zip(&protos[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .sum()
        }
    }
}

/// Full Gower-based metric report for one clustering result.
pub fn metric_report(
    ds: &Dataset,
    matrix: &DistanceMatrix,
    result: &ClusteringResult,
) -> Result<MetricReport> {
    let k_effective = nonempty_members(&result.assignment).len();
    let (dbi, degenerate_centroids) = davies_bouldin(ds, &result.assignment, DistanceKind::Gower)?;
    let sc = silhouette(matrix, &result.assignment)?;
    let (dvi, zero_diameter) = dunn(matrix, &result.assignment)?;
    let sse = sse(ds, result, DistanceKind::Gower);
    Ok(MetricReport {
        dbi,
        sc,
        dvi,
        sse,
        k_effective,
        degenerate_centroids,
        zero_diameter,
    })
}
