//! The repeated-runs comparison protocol: R seeded runs per
//! (dataset, method), mean/std/best per validity metric, best method
//! starred per row.
//!
//! Run with: cargo run --release --example bench_protocol

use dek::de_engine::DeTuning;
use dek::synth_bench::{generate, run_bench, BenchSpec, KChoice, Method, SynthSpec};

fn main() -> dek::Result<()> {
    let (easy, _) = generate(&SynthSpec {
        n_per_cluster: 60,
        k_true: 3,
        d_con: 3,
        cat_choices: vec![3, 2],
        separation: 5.0,
        purity: 0.9,
        seed: 100,
    })?;
    let (noisy, _) = generate(&SynthSpec {
        n_per_cluster: 60,
        k_true: 3,
        d_con: 3,
        cat_choices: vec![3, 2],
        separation: 1.5,
        purity: 0.55,
        seed: 101,
    })?;

    let mut spec = BenchSpec::new(
        vec![("easy".into(), easy), ("noisy".into(), noisy)],
        vec![Method::Dek, Method::Lloyd, Method::Hier],
    );
    spec.k = KChoice::Elbow;
    spec.runs = 20;
    spec.base_seed = 7;
    // trim the DE budget so the demo finishes quickly; drop this override
    // to run the full default budget
    spec.de_tuning = Some(DeTuning {
        np: Some(30),
        max_gs: Some(250),
        ..DeTuning::default()
    });

    let report = run_bench(&spec)?;
    for (name, k) in &report.k_by_dataset {
        println!("dataset {name}: elbow chose K = {k}");
    }
    println!();
    print!("{}", report.render_table());
    println!("\n(20 runs per cell; cells are mean +/- std, * marks the best mean)");
    Ok(())
}
