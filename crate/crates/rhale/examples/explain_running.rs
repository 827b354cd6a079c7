//! The core workflow: generate a dataset, pick a feature, and read the
//! effect curve with its heterogeneity band.
//!
//! The running example's first feature drives the model through a sinusoid
//! on the negative half of its range and is flat on the positive half, so
//! the automatic search spends its bins on the left and merges the right.

use rhale::binning::BinningConfig;
use rhale::estimator::{rhale, Binning};
use rhale::synthetic::{generate, Example, GeneratorSpec};

fn main() {
    let spec = GeneratorSpec {
        example: Example::Running,
        n: 1000,
        seed: 0,
    };
    let data = generate(&spec).unwrap();
    let result = rhale(
        &data.features,
        &data.model,
        0,
        &BinningConfig::default(),
        &Binning::Auto,
    )
    .unwrap();

    println!(
        "automatic binning chose {} bins (objective {:.4})",
        result.partition.n_bins(),
        result.objective.unwrap()
    );
    println!("{:>10} {:>10} {:>7} {:>9} {:>9}", "lower", "upper", "count", "mean", "std");
    for b in &result.bins {
        println!(
            "{:>10.4} {:>10.4} {:>7} {:>9.3} {:>9.3}",
            b.lower,
            b.upper,
            b.count,
            b.mu,
            b.sigma.unwrap_or(0.0)
        );
    }

    println!("\ncurve with one-std band:");
    let (lo, hi) = (result.partition.lower(), result.partition.upper());
    for t in 0..=10 {
        let x = lo + (hi - lo) * t as f64 / 10.0;
        let v = result.value_at(x).unwrap();
        let s = result.std_at(x).unwrap();
        println!("  f({x:>7.3}) = {v:>7.3} +/- {s:.3}");
    }
}
