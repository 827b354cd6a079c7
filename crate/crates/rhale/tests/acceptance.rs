//! Acceptance criteria, one test per criterion. Each prints a single
//! PASS/FAIL line (sub-clauses get their own lines) before asserting, so a
//! red criterion still reports its measured numbers.
//!
//! Known-red criteria are implemented faithfully and asserted at their
//! stated bounds; the failure mechanisms are noted inline.

mod common;

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rhale::baselines::{grid_over, pdp};
use rhale::binning::{
    brute_force_partition, dp_optimal_partition, fixed_partition, BinningConfig,
};
use rhale::estimator::{compute_bin_stats, decompose_heterogeneity, rhale_from_effects, Binning};
use rhale::evaluation::{run_benchmark, BenchmarkConfig, Metric};
use rhale::model::{local_effects_analytic, EffectSource, LocalEffects};
use rhale::synthetic::{dense_oracle, derive_seed, generate, ground_truth, Example, GeneratorSpec};

fn report(criterion: &str, ok: bool, detail: &str) -> bool {
    println!("{criterion}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    ok
}

/// C1: the dynamic program matches exhaustive search on 200 random
/// instances to 1e-12 relative, in under a minute.
#[test]
fn c1_dp_matches_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(20..=200);
        let k_max = rng.gen_range(2..=12);
        let alpha = rng.gen_range(0.0..=0.3);
        let n_ppb = rng.gen_range(2..=10);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let es: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let effects = LocalEffects::new(0, xs, es, EffectSource::Analytic).unwrap();
        let config = BinningConfig {
            k_max,
            alpha,
            n_ppb: Some(n_ppb),
        };
        let dp = dp_optimal_partition(&effects, &config).unwrap();
        let brute = brute_force_partition(&effects, &config).unwrap();
        let denom = dp.objective.abs().max(brute.objective.abs()).max(1.0);
        worst = worst.max((dp.objective - brute.objective).abs() / denom);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = report(
        "C1 dp equals brute force",
        worst <= 1e-12 && elapsed < 60.0,
        &format!("worst relative gap {worst:.2e} over 200 instances, {elapsed:.1} s"),
    );
    assert!(ok);
}

/// C2: coarse-bin variance equals within-fine variance plus the squared
/// residual of fine means, for 100 random vectors and refinements.
#[test]
fn c2_variance_decomposition_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let coarse_k = rng.gen_range(1..=5);
        let splits = rng.gen_range(2..=4);
        let coarse = fixed_partition(0.0, 1.0, coarse_k).unwrap();
        let fine = fixed_partition(0.0, 1.0, coarse_k * splits).unwrap();
        let fine_w = 1.0 / (coarse_k * splits) as f64;
        let mut xs = Vec::new();
        let mut es = Vec::new();
        for cell in 0..coarse_k * splits {
            let mid = cell as f64 * fine_w + 0.5 * fine_w;
            for _ in 0..rng.gen_range(2..=6) {
                xs.push(mid);
                es.push(rng.gen_range(-10.0..10.0));
            }
        }
        let effects = LocalEffects::new(0, xs, es, EffectSource::Analytic).unwrap();
        let d = decompose_heterogeneity(&effects, &coarse, &fine).unwrap();
        for k in 0..coarse_k {
            let lhs = d.sigma_star_sq[k];
            let rhs = d.within_sq[k] + d.bin_error_sq[k];
            let denom = lhs.abs().max(rhs.abs()).max(1.0);
            worst = worst.max((lhs - rhs).abs() / denom);
        }
    }
    let ok = report(
        "C2 variance decomposition",
        worst <= 1e-10,
        &format!("worst relative gap {worst:.2e} over 100 vectors"),
    );
    assert!(ok);
}

/// C3: per-bin mean and variance estimators are unbiased against a matched
/// dense oracle on the running example (10 fixed bins, 1000 resamples of
/// N = 500), within 4 standard errors.
#[test]
fn c3_estimators_unbiased() {
    let start = Instant::now();
    let k = 10;
    let resamples = 1000;
    let n = 500;
    let oracle_spec = GeneratorSpec {
        example: Example::Running,
        n: 2,
        seed: derive_seed(0, 1),
    };
    let oracle = dense_oracle(&oracle_spec, 1_000_000, k, 0).unwrap();
    let partition = fixed_partition(-0.5, 0.5, k).unwrap();
    let mut mu_samples = vec![Vec::with_capacity(resamples); k];
    let mut var_samples = vec![Vec::with_capacity(resamples); k];
    for r in 0..resamples {
        let spec = GeneratorSpec {
            example: Example::Running,
            n,
            seed: derive_seed(0, 1000 + r as u64),
        };
        let data = generate(&spec).unwrap();
        let effects = local_effects_analytic(&data.model, &data.features, 0).unwrap();
        let (bins, _) = compute_bin_stats(&effects, &partition).unwrap();
        for (b, stats) in bins.iter().enumerate() {
            mu_samples[b].push(stats.mu);
            let s = stats.sigma.expect("50+ points per bin");
            var_samples[b].push(s * s);
        }
    }
    let z_of = |samples: &[f64], target: f64| -> f64 {
        let m = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|v| (v - m).powi(2)).sum::<f64>()
            / (samples.len() - 1) as f64;
        let se = (var / samples.len() as f64).sqrt();
        (m - target).abs() / se
    };
    let mut worst_mu: f64 = 0.0;
    let mut worst_var: f64 = 0.0;
    for b in 0..k {
        let o = &oracle.bins[b];
        worst_mu = worst_mu.max(z_of(&mu_samples[b], o.mu));
        let o_sigma = o.sigma.expect("dense bins are large");
        worst_var = worst_var.max(z_of(&var_samples[b], o_sigma * o_sigma));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = report(
        "C3 unbiasedness",
        worst_mu <= 4.0 && worst_var <= 4.0 && elapsed < 120.0,
        &format!(
            "max |z| of bin means {worst_mu:.2}, of bin variances {worst_var:.2} (limit 4), {elapsed:.1} s"
        ),
    );
    assert!(ok);
}

/// C4: on the concept example at N = 100 the automatic search should keep a
/// single bin for X2 in at least 16 of 20 seeds, with the bin's mean near 0
/// and std near 5; X3's deviation band is identically zero.
///
/// Known red: at N = 100 the resolved minimum of 5 points per bin leaves
/// about two points per grid cell, and sample-variance fluctuations across
/// candidate splits beat the size discount (alpha 0.2) roughly half the
/// time, so the search often returns 2+ bins (measured: single bin in 9 of
/// 20 seeds). The X2 statistics and the X3 zero-band clause behave as
/// required; the single-bin rate does not.
#[test]
fn c4_concept_single_bin() {
    let config = BinningConfig::default();
    let mut single = 0;
    let mut stats_ok = 0;
    for seed in 0..20u64 {
        let spec = GeneratorSpec {
            example: Example::Concept,
            n: 100,
            seed,
        };
        let data = generate(&spec).unwrap();
        let effects = local_effects_analytic(&data.model, &data.features, 1).unwrap();
        let result = rhale_from_effects(&effects, &config, &Binning::Auto).unwrap();
        if result.partition.n_bins() == 1 {
            single += 1;
            let b = &result.bins[0];
            let s = b.sigma.unwrap_or(0.0);
            if b.mu.abs() <= 1.0 && (4.0..=6.0).contains(&s) {
                stats_ok += 1;
            }
        }
    }
    // X3 has an identically zero gradient, so every deviation is exactly 0.
    let spec = GeneratorSpec {
        example: Example::Concept,
        n: 100,
        seed: 0,
    };
    let data = generate(&spec).unwrap();
    let effects = local_effects_analytic(&data.model, &data.features, 2).unwrap();
    let x3 = rhale_from_effects(&effects, &config, &Binning::Auto).unwrap();
    let mut x3_zero = true;
    for t in 0..=100 {
        let x = -1.0 + 2.0 * t as f64 / 100.0;
        let (lo, hi) = (x3.partition.lower(), x3.partition.upper());
        let x = x.clamp(lo, hi);
        if x3.std_at(x).unwrap() != 0.0 {
            x3_zero = false;
        }
    }
    let ok = report(
        "C4 concept single-bin reproduction",
        single >= 16 && stats_ok == single && x3_zero,
        &format!(
            "single bin in {single}/20 seeds (need >= 16), stats in range for {stats_ok}, X3 band zero: {x3_zero}"
        ),
    );
    assert!(ok);
}

/// C5: running example at N = 1000. The curve tracks its closed form, the
/// mean bin std sits near 2, and the PDP reproduces its (misleading)
/// closed form.
#[test]
fn c5_running_accuracy() {
    let spec = GeneratorSpec {
        example: Example::Running,
        n: 1000,
        seed: 0,
    };
    let data = generate(&spec).unwrap();
    let effects = local_effects_analytic(&data.model, &data.features, 0).unwrap();
    let result =
        rhale_from_effects(&effects, &BinningConfig::default(), &Binning::Auto).unwrap();
    let gt = ground_truth(&Example::Running, 0).unwrap();
    let grid = grid_over(&data.features, 0, 101).unwrap();
    let mae_curve = grid
        .iter()
        .map(|&x| (result.value_at(x).unwrap() - gt.effect_at(x).unwrap()).abs())
        .sum::<f64>()
        / grid.len() as f64;
    let mean_sigma = result.mean_sigma();
    let pdp_curve = pdp(&data.model, &data.features, 0, &grid).unwrap();
    let pdp_closed = |x: f64| {
        let ind = if x < 0.0 { 1.0 } else { 0.0 };
        (2.0 * std::f64::consts::PI * x).sin() * (ind - 5.0 / 3.0)
    };
    let mae_pdp = grid
        .iter()
        .zip(&pdp_curve.values)
        .map(|(&x, &v)| (v - pdp_closed(x)).abs())
        .sum::<f64>()
        / grid.len() as f64;
    let ok = report(
        "C5 running-example accuracy",
        mae_curve <= 0.15 && (1.7..=2.3).contains(&mean_sigma) && mae_pdp <= 0.1,
        &format!(
            "curve MAE {mae_curve:.4} (limit 0.15), mean bin std {mean_sigma:.3} (range [1.7, 2.3]), PDP MAE {mae_pdp:.4} (limit 0.1)"
        ),
    );
    assert!(ok);
}

/// C6: ramp simulation. Case (a): curve close to the piecewise-linear
/// closed form and near-zero heterogeneity; case (c): mean stds near their
/// targets for x1 and x3.
///
/// Known red, two clauses. Case (a) max bin std: the ramp's slope switches
/// where x1 + x2 crosses 0.5 and 1.0, and x2 = x1 + 0.1*eps, so instances
/// within ~0.05 of a crossing carry either slope; every bin covering a
/// crossing mixes +1 and -1 local effects and reports a std near 1
/// (measured 0.94) regardless of how the limits fall. Case (c) x1: the
/// same crossing mixing adds to the alpha*x3 spread (target 0.5) and lifts
/// the count-weighted mean std just past the ceiling (measured 0.60).
#[test]
fn c6_simulation_cases() {
    let config = BinningConfig::default();
    let spec_a = GeneratorSpec {
        example: Example::simulation_a(),
        n: 2000,
        seed: 0,
    };
    let data_a = generate(&spec_a).unwrap();
    let effects_a = local_effects_analytic(&data_a.model, &data_a.features, 0).unwrap();
    let result_a = rhale_from_effects(&effects_a, &config, &Binning::Auto).unwrap();
    let gt_a = ground_truth(&Example::simulation_a(), 0).unwrap();
    let grid = grid_over(&data_a.features, 0, 101).unwrap();
    let mae_a = grid
        .iter()
        .map(|&x| (result_a.value_at(x).unwrap() - gt_a.effect_at(x).unwrap()).abs())
        .sum::<f64>()
        / grid.len() as f64;
    let max_sigma_a = result_a
        .bins
        .iter()
        .map(|b| b.sigma.unwrap_or(0.0))
        .fold(0.0, f64::max);
    let a_curve_ok = report(
        "C6a curve accuracy",
        mae_a <= 0.05,
        &format!("curve MAE {mae_a:.4} (limit 0.05)"),
    );
    let a_sigma_ok = report(
        "C6a heterogeneity ceiling",
        max_sigma_a <= 0.15,
        &format!("max bin std {max_sigma_a:.3} (limit 0.15)"),
    );

    let spec_c = GeneratorSpec {
        example: Example::simulation_c(),
        n: 2000,
        seed: 0,
    };
    let data_c = generate(&spec_c).unwrap();
    let effects_x1 = local_effects_analytic(&data_c.model, &data_c.features, 0).unwrap();
    let sigma_x1 = rhale_from_effects(&effects_x1, &config, &Binning::Auto)
        .unwrap()
        .mean_sigma();
    let effects_x3 = local_effects_analytic(&data_c.model, &data_c.features, 2).unwrap();
    let sigma_x3 = rhale_from_effects(&effects_x3, &config, &Binning::Auto)
        .unwrap()
        .mean_sigma();
    let c_x1_ok = report(
        "C6c x1 heterogeneity",
        (0.4..=0.6).contains(&sigma_x1),
        &format!("mean bin std {sigma_x1:.3} (range [0.4, 0.6])"),
    );
    let c_x3_ok = report(
        "C6c x3 heterogeneity",
        (0.2..=0.3).contains(&sigma_x3),
        &format!("mean bin std {sigma_x3:.3} (range [0.2, 0.3])"),
    );
    assert!(a_curve_ok && a_sigma_ok && c_x1_ok && c_x3_ok);
}

/// C7: benchmark sweeps. Auto binning should track the best fixed K within
/// 1.1x (piecewise) and 1.15x (nonlinear) on both metrics, and the
/// residual metric should fall from K = 1 to K = 20 on the nonlinear case.
///
/// Known red, three clauses. Piecewise: the slope change at x1 = 0.45 sits
/// off the 50-cell grid of the observed range, so the automatic partition
/// keeps one bin straddling the -10 and 0.5 regions; that bin's inflated
/// std dominates L_sigma (measured ratio ~7.5) and the wide flat-region
/// bins concentrate L_mu (~2.7). Nonlinear L_mu: the search minimizes
/// discounted within-bin variance, which favors ~6 bins, while the
/// oracle-mean error is smallest near 3-4 bins where sampling noise
/// averages out; the mean lands ~1.37x the best fixed sweep. Nonlinear
/// L_sigma and the L_rho shape clause hold.
#[test]
fn c7_benchmark_sweeps() {
    let start = Instant::now();
    let mut config = BenchmarkConfig::new(Example::Piecewise, 0);
    config.trials = 30;
    config.n_per_trial = 500;
    let piecewise = run_benchmark(&config).unwrap();
    let mut checks = Vec::new();
    let auto_p = piecewise.aggregate("auto", None).unwrap();
    for (metric, name, limit) in [(Metric::Mu, "L_mu", 1.1), (Metric::Sigma, "L_sigma", 1.1)] {
        let auto_mean = auto_p.mean_of(metric).unwrap();
        let best = piecewise.best_fixed(metric).unwrap().mean_of(metric).unwrap();
        let ratio = auto_mean / best;
        checks.push(report(
            &format!("C7 piecewise {name}"),
            ratio <= limit,
            &format!("auto/best-fixed ratio {ratio:.3} (limit {limit})"),
        ));
    }
    let mut config = BenchmarkConfig::new(Example::Nonlinear, 0);
    config.trials = 30;
    config.n_per_trial = 500;
    let nonlinear = run_benchmark(&config).unwrap();
    let auto_n = nonlinear.aggregate("auto", None).unwrap();
    for (metric, name, limit) in [(Metric::Mu, "L_mu", 1.15), (Metric::Sigma, "L_sigma", 1.15)] {
        let auto_mean = auto_n.mean_of(metric).unwrap();
        let best = nonlinear.best_fixed(metric).unwrap().mean_of(metric).unwrap();
        let ratio = auto_mean / best;
        checks.push(report(
            &format!("C7 nonlinear {name}"),
            ratio <= limit,
            &format!("auto/best-fixed ratio {ratio:.3} (limit {limit})"),
        ));
    }
    let rho_1 = nonlinear
        .aggregate("fixed", Some(1))
        .unwrap()
        .mean_of(Metric::Rho)
        .unwrap();
    let rho_20 = nonlinear
        .aggregate("fixed", Some(20))
        .unwrap()
        .mean_of(Metric::Rho)
        .unwrap();
    checks.push(report(
        "C7 nonlinear L_rho shape",
        rho_1 > rho_20,
        &format!("L_rho(K=1) {rho_1:.4} vs L_rho(K=20) {rho_20:.4}"),
    ));
    let elapsed = start.elapsed().as_secs_f64();
    checks.push(report(
        "C7 runtime",
        elapsed < 300.0,
        &format!("{elapsed:.1} s (limit 300)"),
    ));
    assert!(checks.iter().all(|&c| c));
}

/// C8: the optimal-partition search stays fast at full scale.
#[test]
fn c8_dp_performance() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    let n = 100_000;
    let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let es: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let effects = LocalEffects::new(0, xs, es, EffectSource::Analytic).unwrap();
    let config = BinningConfig {
        k_max: 100,
        alpha: 0.2,
        n_ppb: None,
    };
    let start = Instant::now();
    let search = dp_optimal_partition(&effects, &config).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = report(
        "C8 dp performance",
        elapsed < 5.0,
        &format!(
            "K_max 100 over {n} points in {elapsed:.2} s (limit 5), {} bins",
            search.partition.n_bins()
        ),
    );
    assert!(ok);
}

/// C9: every subcommand is byte-for-byte reproducible at a fixed seed.
#[test]
fn c9_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_rhale");
    let root = tempfile::tempdir().unwrap();
    let commands: Vec<Vec<String>> = vec![
        ["synth", "--example", "running", "--n", "200", "--seed", "11"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        [
            "explain", "--example", "simulation-c", "--feature", "x1", "--n", "300", "--seed",
            "5", "--baseline", "pdp-ice",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        [
            "bench", "--example", "nonlinear", "--trials", "2", "--n", "200", "--seed", "3",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    ];
    let mut all_ok = true;
    let mut detail = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let dir = root.path().join(format!("cmd{i}_run{run}"));
            let status = std::process::Command::new(bin)
                .args(args)
                .arg("--out")
                .arg(&dir)
                .status()
                .unwrap();
            assert!(status.success(), "command {args:?} failed");
            let mut files: Vec<_> = std::fs::read_dir(&dir)
                .unwrap()
                .map(|e| e.unwrap().path())
                .collect();
            files.sort();
            let blob: Vec<(String, Vec<u8>)> = files
                .iter()
                .map(|p| {
                    (
                        p.file_name().unwrap().to_string_lossy().into_owned(),
                        std::fs::read(p).unwrap(),
                    )
                })
                .collect();
            outputs.push(blob);
        }
        let identical = outputs[0] == outputs[1];
        all_ok &= identical;
        detail.push(format!(
            "{} {}",
            args[0],
            if identical { "identical" } else { "DIFFERS" }
        ));
    }
    let ok = report("C9 CLI determinism", all_ok, &detail.join(", "));
    assert!(ok);
}
