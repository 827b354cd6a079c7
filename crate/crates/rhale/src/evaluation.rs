//! Benchmark harness: compares auto-binning against fixed-size binning (and
//! against reference statistics) with three error metrics over repeated
//! trials on fresh synthetic samples.
//!
//! The reference is a dense fixed-size binning computed once per benchmark on
//! a large sample; coarse reference values are obtained by width-weighted
//! aggregation of the dense bins (mean of μ, mean of σ²).

use crate::binning::{BinningConfig, Partition};
use crate::error::{Error, Result};
use crate::estimator::{rhale_from_effects, BinStats, Binning};
use crate::model::local_effects_analytic;
use crate::synthetic::{dense_oracle, derive_seed, generate, Example, GeneratorSpec};

/// Fixed bin counts swept by default: every K up to 30, then a sparse tail.
pub fn default_k_list() -> Vec<usize> {
    (1..=30).chain([40, 50, 75, 100]).collect()
}

/// Width-weighted aggregation of dense bin statistics onto one interval.
/// Returns (μ, σ) for [lo, hi): the overlap-weighted mean of dense μ and the
/// square root of the overlap-weighted mean of dense σ².
fn aggregate_interval(dense: &[BinStats], lo: f64, hi: f64) -> Result<(f64, f64)> {
    let mut w_total = 0.0;
    let mut mu_acc = 0.0;
    let mut var_acc = 0.0;
    for b in dense {
        let overlap = b.upper.min(hi) - b.lower.max(lo);
        if overlap <= 0.0 {
            continue;
        }
        let s = b.sigma.unwrap_or(0.0);
        w_total += overlap;
        mu_acc += overlap * b.mu;
        var_acc += overlap * s * s;
    }
    if w_total <= 0.0 {
        return Err(Error::invalid(format!(
            "interval [{lo}, {hi}] does not overlap the reference bins"
        )));
    }
    Ok((mu_acc / w_total, (var_acc / w_total).sqrt()))
}

/// Reference (μ, σ) per bin of `partition`, aggregated from dense statistics.
pub fn aggregate_onto(dense: &[BinStats], partition: &Partition) -> Result<Vec<(f64, f64)>> {
    (0..partition.n_bins())
        .map(|k| aggregate_interval(dense, partition.limits()[k], partition.limits()[k + 1]))
        .collect()
}

fn estimate_partition(est: &[BinStats]) -> Result<Partition> {
    if est.is_empty() {
        return Err(Error::invalid("no estimated bins"));
    }
    let mut limits = Vec::with_capacity(est.len() + 1);
    limits.push(est[0].lower);
    for b in est {
        limits.push(b.upper);
    }
    Partition::new(limits)
}

/// Mean absolute error of bin effects against the aggregated reference,
/// averaged over the K estimated bins.
pub fn l_mu(dense: &[BinStats], est: &[BinStats]) -> Result<f64> {
    let partition = estimate_partition(est)?;
    let reference = aggregate_onto(dense, &partition)?;
    let total: f64 = reference
        .iter()
        .zip(est)
        .map(|((mu, _), b)| (mu - b.mu).abs())
        .sum();
    Ok(total / est.len() as f64)
}

/// Mean absolute error of bin deviations against the aggregated reference,
/// averaged over the K estimated bins. Missing estimated deviations count 0.
pub fn l_sigma(dense: &[BinStats], est: &[BinStats]) -> Result<f64> {
    let partition = estimate_partition(est)?;
    let reference = aggregate_onto(dense, &partition)?;
    let total: f64 = reference
        .iter()
        .zip(est)
        .map(|((_, sigma), b)| (sigma - b.sigma.unwrap_or(0.0)).abs())
        .sum();
    Ok(total / est.len() as f64)
}

/// Mean bin-residual error: per estimated bin, the square root of the
/// width-weighted mean squared deviation of the dense μ(z) from the bin's
/// aggregated μ; summed and divided by K+1 (the partition point count).
pub fn l_rho(dense: &[BinStats], partition: &Partition) -> Result<f64> {
    let reference = aggregate_onto(dense, partition)?;
    let mut total = 0.0;
    for (k, (mu_k, _)) in reference.iter().enumerate() {
        let (lo, hi) = (partition.limits()[k], partition.limits()[k + 1]);
        let mut w_total = 0.0;
        let mut acc = 0.0;
        for b in dense {
            let overlap = b.upper.min(hi) - b.lower.max(lo);
            if overlap <= 0.0 {
                continue;
            }
            w_total += overlap;
            acc += overlap * (b.mu - mu_k) * (b.mu - mu_k);
        }
        total += (acc / w_total).sqrt();
    }
    Ok(total / (partition.n_bins() + 1) as f64)
}

/// One benchmark row: a (trial, method) pair. `k` is None for auto-binning.
/// Metrics are None when the trial was infeasible for this method (an empty
/// bin, or too few points for the minimum per bin).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub method: String,
    pub k: Option<usize>,
    pub n_bins: Option<usize>,
    pub l_mu: Option<f64>,
    pub l_sigma: Option<f64>,
    pub l_rho: Option<f64>,
}

/// Per-method aggregate over trials. Means and sample stds cover feasible
/// trials only; a method with any infeasible trial is not comparable as a
/// "best fixed K" candidate.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MethodAggregate {
    pub method: String,
    pub k: Option<usize>,
    pub feasible_trials: usize,
    pub infeasible_trials: usize,
    pub mean_n_bins: Option<f64>,
    pub mean_l_mu: Option<f64>,
    pub std_l_mu: Option<f64>,
    pub mean_l_sigma: Option<f64>,
    pub std_l_sigma: Option<f64>,
    pub mean_l_rho: Option<f64>,
    pub std_l_rho: Option<f64>,
}

/// Which metric to rank methods by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mu,
    Sigma,
    Rho,
}

impl MethodAggregate {
    pub fn mean_of(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Mu => self.mean_l_mu,
            Metric::Sigma => self.mean_l_sigma,
            Metric::Rho => self.mean_l_rho,
        }
    }
}

/// Benchmark configuration; see [`run_benchmark`].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BenchmarkConfig {
    pub example: Example,
    pub feature: usize,
    pub n_per_trial: usize,
    pub trials: usize,
    pub master_seed: u64,
    /// Fixed bin counts to sweep; values above `n_per_trial` are dropped.
    pub k_list: Vec<usize>,
    pub binning: BinningConfig,
    pub n_dense: usize,
    pub k_dense: usize,
}

impl BenchmarkConfig {
    pub fn new(example: Example, feature: usize) -> Self {
        BenchmarkConfig {
            example,
            feature,
            n_per_trial: 500,
            trials: 30,
            master_seed: 0,
            k_list: default_k_list(),
            binning: BinningConfig::default(),
            n_dense: crate::synthetic::ORACLE_N_DENSE,
            k_dense: crate::synthetic::ORACLE_K_DENSE,
        }
    }
}

/// Full benchmark output: per-trial rows plus per-method aggregates.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    /// K values actually swept after clipping to the sample size.
    pub k_swept: Vec<usize>,
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<MethodAggregate>,
}

impl BenchmarkReport {
    pub fn aggregate(&self, method: &str, k: Option<usize>) -> Option<&MethodAggregate> {
        self.aggregates
            .iter()
            .find(|a| a.method == method && a.k == k)
    }

    /// The fixed-K aggregate with the lowest mean for `metric`, considering
    /// only K values feasible in every trial.
    pub fn best_fixed(&self, metric: Metric) -> Option<&MethodAggregate> {
        self.aggregates
            .iter()
            .filter(|a| a.method == "fixed" && a.infeasible_trials == 0)
            .filter(|a| a.mean_of(metric).is_some())
            .min_by(|a, b| {
                a.mean_of(metric)
                    .partial_cmp(&b.mean_of(metric))
                    .unwrap()
            })
    }
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let m = values.iter().sum::<f64>() / values.len() as f64;
    let std = if values.len() >= 2 {
        let ss = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
        Some((ss / (values.len() - 1) as f64).sqrt())
    } else {
        None
    };
    (Some(m), std)
}

fn aggregate_rows(method: &str, k: Option<usize>, rows: &[&TrialRow]) -> MethodAggregate {
    let feasible: Vec<&&TrialRow> = rows.iter().filter(|r| r.l_mu.is_some()).collect();
    let collect = |f: fn(&TrialRow) -> Option<f64>| -> Vec<f64> {
        feasible.iter().filter_map(|r| f(r)).collect()
    };
    let mus = collect(|r| r.l_mu);
    let sigmas = collect(|r| r.l_sigma);
    let rhos = collect(|r| r.l_rho);
    let bins: Vec<f64> = feasible
        .iter()
        .filter_map(|r| r.n_bins.map(|b| b as f64))
        .collect();
    let (mean_l_mu, std_l_mu) = mean_std(&mus);
    let (mean_l_sigma, std_l_sigma) = mean_std(&sigmas);
    let (mean_l_rho, std_l_rho) = mean_std(&rhos);
    let (mean_n_bins, _) = mean_std(&bins);
    MethodAggregate {
        method: method.to_string(),
        k,
        feasible_trials: feasible.len(),
        infeasible_trials: rows.len() - feasible.len(),
        mean_n_bins,
        mean_l_mu,
        std_l_mu,
        mean_l_sigma,
        std_l_sigma,
        mean_l_rho,
        std_l_rho,
    }
}

/// Runs the benchmark: one dense reference, then `trials` fresh samples, each
/// explained with auto-binning and with every fixed K in the sweep. Trial
/// seeds derive deterministically from the master seed, so reruns reproduce
/// the report exactly. Methods that fail on a trial (empty bin, too few
/// points) get a row with empty metrics instead of aborting the run.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    if config.trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let oracle_spec = GeneratorSpec {
        example: config.example,
        n: config.n_dense,
        seed: derive_seed(config.master_seed, 1),
    };
    let oracle = dense_oracle(&oracle_spec, config.n_dense, config.k_dense, config.feature)?;

    let k_swept: Vec<usize> = config
        .k_list
        .iter()
        .copied()
        .filter(|&k| k >= 1 && k <= config.n_per_trial)
        .collect();

    let mut rows = Vec::new();
    for trial in 0..config.trials {
        let seed = derive_seed(config.master_seed, 1000 + trial as u64);
        let ds = generate(&GeneratorSpec {
            example: config.example,
            n: config.n_per_trial,
            seed,
        })?;
        let effects = local_effects_analytic(&ds.model, &ds.features, config.feature)?;

        let mut push = |method: &str, k: Option<usize>, binning: &Binning| -> Result<()> {
            let row = match rhale_from_effects(&effects, &config.binning, binning) {
                Ok(res) => TrialRow {
                    trial,
                    seed,
                    method: method.to_string(),
                    k,
                    n_bins: Some(res.partition.n_bins()),
                    l_mu: Some(l_mu(&oracle.bins, &res.bins)?),
                    l_sigma: Some(l_sigma(&oracle.bins, &res.bins)?),
                    l_rho: Some(l_rho(&oracle.bins, &res.partition)?),
                },
                Err(Error::Infeasible(_))
                | Err(Error::EmptyBin { .. })
                | Err(Error::DegenerateBin { .. }) => TrialRow {
                    trial,
                    seed,
                    method: method.to_string(),
                    k,
                    n_bins: None,
                    l_mu: None,
                    l_sigma: None,
                    l_rho: None,
                },
                Err(e) => return Err(e),
            };
            rows.push(row);
            Ok(())
        };

        push("auto", None, &Binning::Auto)?;
        for &k in &k_swept {
            push("fixed", Some(k), &Binning::Fixed(k))?;
        }
    }

    let mut aggregates = Vec::new();
    let auto_rows: Vec<&TrialRow> = rows.iter().filter(|r| r.method == "auto").collect();
    aggregates.push(aggregate_rows("auto", None, &auto_rows));
    for &k in &k_swept {
        let k_rows: Vec<&TrialRow> = rows
            .iter()
            .filter(|r| r.method == "fixed" && r.k == Some(k))
            .collect();
        aggregates.push(aggregate_rows("fixed", Some(k), &k_rows));
    }

    Ok(BenchmarkReport {
        config: config.clone(),
        k_swept,
        rows,
        aggregates,
    })
}
