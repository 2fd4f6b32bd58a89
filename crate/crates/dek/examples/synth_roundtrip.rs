//! Generate a planted-cluster dataset, write it to CSV + schema JSON,
//! reload it, and check the round trip is exact.
//!
//! Run with: cargo run --release --example synth_roundtrip

use dek::dataset::Dataset;
use dek::synth_bench::{generate, SynthSpec};

fn main() -> dek::Result<()> {
    let spec = SynthSpec {
        n_per_cluster: 50,
        k_true: 2,
        d_con: 2,
        cat_choices: vec![4],
        separation: 3.0,
        purity: 0.8,
        seed: 5,
    };
    let (ds, labels) = generate(&spec)?;

    let dir = std::env::temp_dir();
    let data_path = dir.join("synth_roundtrip.csv");
    let schema_path = dir.join("synth_roundtrip.schema.json");
    ds.write_csv_file(&data_path)?;
    std::fs::write(&schema_path, ds.schema().to_json_string())?;
    println!("wrote {} and {}", data_path.display(), schema_path.display());

    let reloaded = Dataset::load(&data_path, &schema_path)?;
    assert_eq!(ds, reloaded, "CSV round trip must be exact");
    println!(
        "reloaded identically: n={}, m={}, planted labels per cluster: {:?}",
        reloaded.n(),
        reloaded.schema().m(),
        labels.iter().filter(|&&l| l == 0).count()
    );
    Ok(())
}
