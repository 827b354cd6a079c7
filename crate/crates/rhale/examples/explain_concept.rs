//! Aggregation bias made visible: a feature whose instance-level effects
//! are +5 for half the data and -5 for the other half has a mean effect of
//! zero. The curve alone would hide that; the per-bin std reports it.

use rhale::binning::BinningConfig;
use rhale::estimator::{rhale, Binning};
use rhale::synthetic::{generate, Example, GeneratorSpec};

fn main() {
    let spec = GeneratorSpec {
        example: Example::Concept,
        n: 100,
        seed: 3,
    };
    let data = generate(&spec).unwrap();
    let config = BinningConfig::default();

    for (s, story) in [
        (1usize, "x2: slope +5 or -5 depending on the sign of x3"),
        (2usize, "x3: no direct effect at all"),
    ] {
        let result = rhale(&data.features, &data.model, s, &config, &Binning::Auto).unwrap();
        println!("{story}");
        println!("  bins: {}", result.partition.n_bins());
        for b in &result.bins {
            println!(
                "  [{:>6.3}, {:>6.3}]  mean {:>6.3}  std {:>6.3}",
                b.lower,
                b.upper,
                b.mu,
                b.sigma.unwrap_or(0.0)
            );
        }
        let (lo, hi) = (result.partition.lower(), result.partition.upper());
        let mid = 0.5 * (lo + hi);
        println!(
            "  curve at the middle: {:.3}, band half-width: {:.3}\n",
            result.value_at(mid).unwrap(),
            result.std_at(mid).unwrap()
        );
    }

    println!("x2's mean effect is ~0, but its band is ~5 per unit: the");
    println!("average hides two opposing populations. x3's band is exactly 0:");
    println!("a flat curve with zero heterogeneity really is a null effect.");
}
