//! Cluster a small mixed categorical-continuous table with DEK.
//!
//! Run with: cargo run --release --example cluster_mixed

use dek::dataset::{ColumnSpec, Dataset, Schema};
use dek::dek_core::{run_dek, DekConfig};

fn main() -> dek::Result<()> {
    // age and income are continuous; contract and region are categorical
    let schema = Schema::new(vec![
        ColumnSpec::Continuous { name: "age".into() },
        ColumnSpec::Continuous { name: "income".into() },
        ColumnSpec::Categorical {
            name: "contract".into(),
            categories: vec!["monthly".into(), "yearly".into()],
        },
        ColumnSpec::Categorical {
            name: "region".into(),
            categories: vec!["north".into(), "south".into(), "west".into()],
        },
    ])?;

    let csv = "\
age,income,contract,region
23,21000,monthly,north
25,23500,monthly,north
27,22000,monthly,west
51,74000,yearly,south
54,81000,yearly,south
49,69000,yearly,south
62,31000,monthly,west
65,29500,monthly,west
60,33000,yearly,west
";
    let ds = Dataset::from_csv_reader(schema, csv.as_bytes())?.normalize();

    // Defaults mirror the reference configuration (Np=60, F=0.7, Cr=0.8,
    // MaxGs=1500); a short run is plenty for nine rows.
    let mut cfg = DekConfig::new(3, 42);
    cfg.de.max_gs = 300;
    let result = run_dek(&ds, &cfg)?;

    println!("objective = {:.6}", result.objective);
    println!("sizes     = {:?}", result.sizes);
    for (j, centroid) in result.centroids.centroids.iter().enumerate() {
        println!(
            "centroid {j}: continuous {:?}, categories {:?}",
            centroid
                .continuous
                .iter()
                .map(|v| (v * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>(),
            centroid.categorical
        );
    }
    println!("assignment = {:?}", result.assignment);
    Ok(())
}
