//! Pick the cluster count with the SSE elbow rule: sweep K, look at the
//! curve, take the K where the decline flattens.
//!
//! Run with: cargo run --release --example choose_k

use dek::model_selection::{pick_elbow, sweep_k, SweepMethod};
use dek::synth_bench::{generate, SynthSpec};

fn main() -> dek::Result<()> {
    let spec = SynthSpec {
        n_per_cluster: 100,
        k_true: 4,
        d_con: 3,
        cat_choices: vec![4, 2],
        separation: 5.0,
        purity: 0.9,
        seed: 3,
    };
    let (ds, _) = generate(&spec)?;

    let curve = sweep_k(&ds, 2, 9, 5, SweepMethod::Lloyd, 17, None)?;
    println!("{:<4}{:>14}{:>14}", "k", "mean_sse", "std_sse");
    for p in &curve.points {
        println!("{:<4}{:>14.5}{:>14.5}", p.k, p.mean_sse, p.std_sse);
    }
    println!("\nchosen K = {} (planted K = 4)", pick_elbow(&curve)?);
    Ok(())
}
