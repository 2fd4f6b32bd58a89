//! Gower distance on mixed points: per-dimension terms, the pairwise
//! matrix, and why normalization does not change the distances.
//!
//! Run with: cargo run --release --example gower_basics

use dek::dataset::{ColumnSpec, Dataset, Schema};
use dek::gower::{gower_distance, pairwise_matrix, MixedPoint};

fn main() -> dek::Result<()> {
    // Two continuous dimensions with range width 1, one categorical.
    let a = MixedPoint {
        continuous: vec![0.2, 0.8],
        categorical: vec![0],
    };
    let b = MixedPoint {
        continuous: vec![0.5, 0.8],
        categorical: vec![2],
    };
    let widths = [1.0, 1.0];
    let d = gower_distance(a.view(), b.view(), &widths)?;
    println!("gower(a, b) = (0.3 + 0.0 + 1) / 3 = {d:.6}");

    let schema = Schema::new(vec![
        ColumnSpec::Continuous { name: "height".into() },
        ColumnSpec::Categorical {
            name: "color".into(),
            categories: vec!["red".into(), "green".into(), "blue".into()],
        },
    ])?;
    let csv = "height,color\n150,red\n160,red\n175,blue\n190,green\n";
    let raw = Dataset::from_csv_reader(schema, csv.as_bytes())?;
    let ds = raw.normalize();

    // the same distances come out whether the data is raw or normalized:
    // the per-dimension term divides by the column range either way
    let raw_matrix = pairwise_matrix(&raw);
    let norm_matrix = pairwise_matrix(&ds);
    println!("\npairwise Gower matrix:");
    for i in 0..ds.n() {
        let row: Vec<String> = (0..ds.n())
            .map(|j| format!("{:.4}", norm_matrix.get(i, j)))
            .collect();
        println!("  [{}]", row.join(", "));
        for j in 0..ds.n() {
            assert!((raw_matrix.get(i, j) - norm_matrix.get(i, j)).abs() < 1e-12);
        }
    }
    println!("(identical on the raw data, as expected)");
    Ok(())
}
