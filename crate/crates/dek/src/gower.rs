//! Gower distance between mixed-variable points and pairwise matrices.
//!
//! The distance averages one comparison per dimension: a 0/1 mismatch for
//! categorical dimensions, and a range-normalized absolute difference
//! |a_k - b_k| / R_k for continuous ones (0 when R_k = 0, the standard
//! convention for columns with no discriminating power). On a normalized
//! dataset every R_k is 0 or 1, but the divisor is kept general.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// An owned mixed point: continuous values plus categorical indices.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPoint {
    pub continuous: Vec<f64>,
    pub categorical: Vec<u32>,
}

impl MixedPoint {
    pub fn view(&self) -> PointView<'_> {
        PointView {
            cont: &self.continuous,
            cat: &self.categorical,
        }
    }
}

/// A borrowed mixed point, the common currency of distance code.
#[derive(Debug, Clone, Copy)]
pub struct PointView<'a> {
    pub cont: &'a [f64],
    pub cat: &'a [u32],
}

impl<'a> PointView<'a> {
    pub fn to_owned_point(self) -> MixedPoint {
        MixedPoint {
            continuous: self.cont.to_vec(),
            categorical: self.cat.to_vec(),
        }
    }

    pub fn m(&self) -> usize {
        self.cont.len() + self.cat.len()
    }
}

/// Gower distance with shape checking. `widths` are the per-continuous-column
/// range divisors R_k.
pub fn gower_distance(a: PointView, b: PointView, widths: &[f64]) -> Result<f64> {
    if a.cont.len() != b.cont.len() || a.cat.len() != b.cat.len() {
        return Err(Error::SchemaMismatch(format!(
            "points have shapes ({}, {}) vs ({}, {})",
            a.cont.len(),
            a.cat.len(),
            b.cont.len(),
            b.cat.len()
        )));
    }
    if widths.len() != a.cont.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} range widths for {} continuous dims",
            widths.len(),
            a.cont.len()
        )));
    }
    Ok(distance_unchecked(a, b, widths))
}

/// Gower distance without shape checks, for validated hot loops.
#[inline]
pub(crate) fn distance_unchecked(a: PointView, b: PointView, widths: &[f64]) -> f64 {
    let mut sum = 0.0;
    for ((&x, &y), &w) in a.cont.iter().zip(b.cont).zip(widths) {
        if w > 0.0 {
            sum += (x - y).abs() / w;
        }
    }
    for (&x, &y) in a.cat.iter().zip(b.cat) {
        if x != y {
            sum += 1.0;
        }
    }
    let m = (a.cont.len() + a.cat.len()) as f64;
    // clamp absorbs floating-point drift just above 1
    (sum / m).clamp(0.0, 1.0)
}

/// Symmetric n x n distance matrix with zero diagonal, entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Wrap a precomputed full matrix, checking symmetry, zero diagonal,
    /// and the [0, 1] range.
    pub fn from_full(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::SchemaMismatch(format!(
                "{} entries do not tile an {n} x {n} matrix",
                data.len()
            )));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::SchemaMismatch(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !(0.0..=1.0).contains(&v) || v != data[j * n + i] {
                    return Err(Error::SchemaMismatch(format!(
                        "entry ({i}, {j}) = {v} breaks symmetry or range"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Dump as CSV (one row per line), for debugging.
    pub fn write_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// All pairwise Gower distances of a (normalized) dataset.
///
/// Rows are computed independently (parallelism cannot change any entry);
/// entry (i, j) equals `gower_distance(row_i, row_j)` exactly.
pub fn pairwise_matrix(ds: &Dataset) -> DistanceMatrix {
    let n = ds.n();
    let widths = ds.range_widths();
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let a = ds.point(i);
        for (j, cell) in row.iter_mut().enumerate() {
            if i != j {
                *cell = distance_unchecked(a, ds.point(j), &widths);
            }
        }
    });
    DistanceMatrix { n, data }
}
