//! Explaining your own model: wrap closures, supply a gradient when you
//! have one, and fall back to central differences when you do not.

use rhale::binning::BinningConfig;
use rhale::estimator::{rhale, Binning};
use rhale::model::{local_effects, ClosureModel};
use rhale::FeatureMatrix;

fn main() {
    // A small synthetic table: two correlated features.
    let rows: Vec<Vec<f64>> = (0..400)
        .map(|i| {
            let x = i as f64 / 399.0;
            let y = x * x - 0.3 * ((i * 7919) % 100) as f64 / 100.0;
            vec![x, y]
        })
        .collect();
    let data = FeatureMatrix::from_rows(&rows).unwrap();

    // With an analytic gradient.
    let exact = ClosureModel::new(|p: &[f64]| p[0].powi(3) + 2.0 * p[0] * p[1])
        .with_gradient(|p: &[f64]| vec![3.0 * p[0] * p[0] + 2.0 * p[1], 2.0 * p[0]]);
    // The same model without one; derivatives come from central differences.
    let opaque = ClosureModel::new(|p: &[f64]| p[0].powi(3) + 2.0 * p[0] * p[1]);

    let config = BinningConfig::default();
    let a = rhale(&data, &exact, 0, &config, &Binning::Auto).unwrap();
    let b = rhale(&data, &opaque, 0, &config, &Binning::Auto).unwrap();

    println!("analytic source:        {:?}", a.source);
    println!("finite-diff source:     {:?}", b.source);
    let e_exact = local_effects(&exact, &data, 0).unwrap();
    let e_opaque = local_effects(&opaque, &data, 0).unwrap();
    let max_gap = e_exact
        .effects
        .iter()
        .zip(&e_opaque.effects)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    println!("largest per-instance derivative gap: {max_gap:.2e}");

    println!("\nbin table (analytic gradients):");
    for bin in &a.bins {
        println!(
            "  [{:.3}, {:.3}]  n={:<4} mean {:+.3}  std {:.3}",
            bin.lower,
            bin.upper,
            bin.count,
            bin.mu,
            bin.sigma.unwrap_or(0.0)
        );
    }
}
