//! Compare DEK against the Gower-Lloyd and hierarchical baselines on a
//! planted-cluster synthetic dataset, scoring each against the hidden
//! labels with the adjusted Rand index.
//!
//! Run with: cargo run --release --example compare_methods

use dek::baselines::{hierarchical_cluster, lloyd_cluster, HierConfig, Linkage, LloydConfig, Seeding};
use dek::dek_core::{run_dek, DekConfig};
use dek::gower::pairwise_matrix;
use dek::synth_bench::{adjusted_rand_index, generate, SynthSpec};
use dek::validity_metrics::metric_report;

fn main() -> dek::Result<()> {
    let spec = SynthSpec {
        n_per_cluster: 80,
        k_true: 3,
        d_con: 4,
        cat_choices: vec![3, 3, 3],
        separation: 4.0,
        purity: 0.85,
        seed: 20,
    };
    let (ds, truth) = generate(&spec)?;
    let matrix = pairwise_matrix(&ds);

    let mut dek_cfg = DekConfig::new(3, 1);
    dek_cfg.de.max_gs = 400; // plenty at this size; the default is 1500
    let dek_result = run_dek(&ds, &dek_cfg)?;

    let mut lloyd_cfg = LloydConfig::new(3, 1);
    lloyd_cfg.seeding = Seeding::KMeansPlusPlus;
    let lloyd_result = lloyd_cluster(&ds, &lloyd_cfg)?;

    let hier_result = hierarchical_cluster(
        &ds,
        &HierConfig {
            k: 3,
            linkage: Linkage::Average,
        },
    )?;

    println!(
        "{:<8}{:>8}{:>10}{:>10}{:>10}{:>10}",
        "method", "ari", "dbi", "sc", "dvi", "sse"
    );
    for result in [&dek_result, &lloyd_result, &hier_result] {
        let ari = adjusted_rand_index(&truth, &result.assignment)?;
        let m = metric_report(&ds, &matrix, result)?;
        println!(
            "{:<8}{:>8.4}{:>10.4}{:>10.4}{:>10.4}{:>10.4}",
            result.method, ari, m.dbi, m.sc, m.dvi, m.sse
        );
    }
    Ok(())
}
