//! Cluster-count selection via the SSE elbow rule.
//!
//! A sweep runs a clusterer at every K in a range and records the SSE per
//! run; the elbow is the interior K maximizing the second difference of the
//! mean-SSE curve, a deterministic, parameter-free reading of "the end of
//! the steepest section". The curve is always emitted so a caller can
//! override K by hand.

use crate::baselines::{lloyd_cluster, LloydConfig, Seeding};
use crate::dataset::Dataset;
use crate::dek_core::{run_dek, DekConfig};
use crate::de_engine::DeTuning;
use crate::error::{Error, Result};
use crate::validity_metrics::{sse, DistanceKind};

/// One sweep point: K with the SSE stats of its repeated runs.
#[derive(Debug, Clone)]
pub struct SsePoint {
    pub k: usize,
    pub mean_sse: f64,
    /// Population standard deviation over the runs (0 for a single run).
    pub std_sse: f64,
    pub run_sses: Vec<f64>,
}

/// SSE-vs-K curve with strictly increasing K.
#[derive(Debug, Clone)]
pub struct SseCurve {
    pub points: Vec<SsePoint>,
}

impl SseCurve {
    /// CSV emission: k, mean_sse, std_sse.
    pub fn write_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["k", "mean_sse", "std_sse"])?;
        for p in &self.points {
            wtr.write_record(&[
                p.k.to_string(),
                p.mean_sse.to_string(),
                p.std_sse.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Which clusterer drives the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMethod {
    Dek,
    /// Gower-Lloyd; sweeps seed with K-means++ for a stabler curve.
    #[default]
    Lloyd,
}

/// Run `runs_per_k` seeded runs at every K in [k_min, k_max] and record the
/// Gower SSE. Run r uses seed `base_seed + r` at every K, so the curve is
/// deterministic in `base_seed`.
pub fn sweep_k(
    ds: &Dataset,
    k_min: usize,
    k_max: usize,
    runs_per_k: usize,
    method: SweepMethod,
    base_seed: u64,
    de_tuning: Option<&DeTuning>,
) -> Result<SseCurve> {
    if !(2 <= k_min && k_min < k_max && k_max <= ds.n()) {
        return Err(Error::InvalidRange(format!(
            "need 2 <= k_min < k_max <= n, got k_min={k_min}, k_max={k_max}, n={}",
            ds.n()
        )));
    }
    if runs_per_k < 1 {
        return Err(Error::InvalidRange("runs_per_k must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let mut run_sses = Vec::with_capacity(runs_per_k);
        for r in 0..runs_per_k {
            let seed = base_seed.wrapping_add(r as u64);
            let result = match method {
                SweepMethod::Lloyd => {
                    let mut cfg = LloydConfig::new(k, seed);
                    cfg.seeding = Seeding::KMeansPlusPlus;
                    lloyd_cluster(ds, &cfg)?
                }
                SweepMethod::Dek => {
                    let mut cfg = DekConfig::new(k, seed);
                    if let Some(tuning) = de_tuning {
                        tuning.apply(&mut cfg.de);
                    }
                    run_dek(ds, &cfg)?
                }
            };
            run_sses.push(sse(ds, &result, DistanceKind::Gower));
        }
        let mean = run_sses.iter().sum::<f64>() / run_sses.len() as f64;
        let var = run_sses
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / run_sses.len() as f64;
        points.push(SsePoint {
            k,
            mean_sse: mean,
            std_sse: var.sqrt(),
            run_sses,
        });
    }
    Ok(SseCurve { points })
}

/// The interior K maximizing the second difference of mean SSE,
/// ties to the smallest K.
pub fn pick_elbow(curve: &SseCurve) -> Result<usize> {
    let pts = &curve.points;
    if pts.len() < 3 {
        return Err(Error::CurveTooShort(pts.len()));
    }
    let mut best_k = pts[1].k;
    let mut best_drop = f64::NEG_INFINITY;
    for w in pts.windows(3) {
        let second_diff = w[0].mean_sse - 2.0 * w[1].mean_sse + w[2].mean_sse;
        if second_diff > best_drop {
            best_drop = second_diff;
            best_k = w[1].k;
        }
    }
    Ok(best_k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ColumnSpec, Schema};

    fn curve(sses: &[f64], k_start: usize) -> SseCurve {
        SseCurve {
            points: sses
                .iter()
                .enumerate()
                .map(|(i, &s)| SsePoint {
                    k: k_start + i,
                    mean_sse: s,
                    std_sse: 0.0,
                    run_sses: vec![s],
                })
                .collect(),
        }
    }

    #[test]
    fn elbow_max_second_difference() {
        // second differences at K=3,4,5: 55, 3, 1
        let c = curve(&[100.0, 40.0, 35.0, 33.0, 32.0], 2);
        assert_eq!(pick_elbow(&c).unwrap(), 3);
    }

    #[test]
    fn elbow_ties_pick_smallest_interior_k() {
        let c = curve(&[10.0, 8.0, 6.0, 4.0], 2);
        assert_eq!(pick_elbow(&c).unwrap(), 3);
    }

    #[test]
    fn elbow_needs_three_points() {
        let c = curve(&[10.0, 8.0], 2);
        assert!(matches!(pick_elbow(&c), Err(Error::CurveTooShort(2))));
    }

    #[test]
    fn elbow_invariant_under_positive_affine_transform() {
        let base = [100.0, 40.0, 35.0, 33.0, 32.0, 31.5];
        let scaled: Vec<f64> = base.iter().map(|v| 3.5 * v + 11.0).collect();
        assert_eq!(
            pick_elbow(&curve(&base, 2)).unwrap(),
            pick_elbow(&curve(&scaled, 2)).unwrap()
        );
    }

    fn planted_ds() -> Dataset {
        let schema = Schema::new(vec![ColumnSpec::Continuous { name: "x".into() }]).unwrap();
        let mut rows = String::from("x\n");
        for c in 0..3 {
            for i in 0..10 {
                rows.push_str(&format!("{}\n", c as f64 * 10.0 + i as f64 * 0.05));
            }
        }
        Dataset::from_csv_reader(schema, rows.as_bytes())
            .unwrap()
            .normalize()
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        let ds = planted_ds();
        assert!(matches!(
            sweep_k(&ds, 2, 2, 1, SweepMethod::Lloyd, 0, None),
            Err(Error::InvalidRange(_))
        ));
        assert!(matches!(
            sweep_k(&ds, 1, 5, 1, SweepMethod::Lloyd, 0, None),
            Err(Error::InvalidRange(_))
        ));
        assert!(matches!(
            sweep_k(&ds, 2, 500, 1, SweepMethod::Lloyd, 0, None),
            Err(Error::InvalidRange(_))
        ));
    }

    #[test]
    fn sweep_is_deterministic_and_finds_planted_k() {
        let ds = planted_ds();
        let a = sweep_k(&ds, 2, 6, 3, SweepMethod::Lloyd, 42, None).unwrap();
        let b = sweep_k(&ds, 2, 6, 3, SweepMethod::Lloyd, 42, None).unwrap();
        for (pa, pb) in a.points.iter().zip(&b.points) {
            assert_eq!(pa.run_sses, pb.run_sses);
        }
        assert_eq!(pick_elbow(&a).unwrap(), 3);
    }

    #[test]
    fn curve_csv_has_three_columns() {
        let c = curve(&[9.0, 4.0, 3.0], 2);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,mean_sse,std_sse\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
