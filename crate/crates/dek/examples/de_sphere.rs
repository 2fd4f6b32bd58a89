//! Drive the DE engine directly on the 10-dimensional sphere function
//! with the default control parameters (Np=60, F=0.7, Cr=0.8, MaxGs=1500).
//!
//! Run with: cargo run --release --example de_sphere

use dek::de_engine::{run, DeConfig};

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn main() -> dek::Result<()> {
    let dim = 10;
    let cfg = DeConfig::uniform(dim, -5.0, 5.0, 2024);
    let outcome = run(&cfg, dim, &sphere)?;

    println!("best value = {:.3e}", outcome.best_value);
    println!("best point = {:?}", outcome.best);
    for g in [1, 10, 100, 500, 1000, 1500] {
        println!("best after generation {g:>5}: {:.6e}", outcome.history[g - 1]);
    }
    assert!(
        outcome.history.windows(2).all(|w| w[1] <= w[0]),
        "best-so-far history is monotone"
    );
    Ok(())
}
