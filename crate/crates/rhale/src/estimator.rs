//! Bin statistics, the accumulated effect curve, its standard-deviation
//! envelope, and the within/between heterogeneity decomposition.
//!
//! Given per-instance derivatives grouped into bins S_1..S_K:
//!
//! ```text
//! μ̂_k = mean of effects in S_k
//! σ̂_k = sample std (|S_k|−1 divisor) of effects in S_k
//! f̂(x) = Σ_{k<k_x} μ̂_k Δz_k + μ̂_{k_x} (x − z_{k_x−1})
//! STD(x) = sqrt( Σ_{k<k_x} Δz_k² σ̂_k² + (x − z_{k_x−1})² σ̂_{k_x}² )
//! ```
//!
//! so f̂ starts at 0, is continuous and piecewise linear with knots at the bin
//! limits, and STD is nondecreasing.

use std::collections::HashMap;

use crate::binning::{
    assign_bins, dp_optimal_partition, fixed_partition, BinningConfig, Partition,
};
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::model::{local_effects, EffectSource, LocalEffects, Model};

/// Buckets in each per-bin effect histogram.
pub const HISTOGRAM_BUCKETS: usize = 32;

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Two-pass population variance (1/n divisor).
pub(crate) fn population_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// Linear-interpolation quantile on sorted data (the common "type 7" rule).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Fixed-width summary of the local-effect distribution inside one bin,
/// renderable by any plotting tool as a violin/box substitute.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EffectHistogram {
    /// Counts over `HISTOGRAM_BUCKETS` equal buckets spanning [min, max].
    pub buckets: Vec<u32>,
    pub min: f64,
    pub max: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl EffectHistogram {
    pub fn from_effects(effects: &[f64]) -> Self {
        let mut sorted = effects.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (min, max) = (sorted[0], *sorted.last().unwrap());
        let mut buckets = vec![0u32; HISTOGRAM_BUCKETS];
        if max > min {
            let scale = HISTOGRAM_BUCKETS as f64 / (max - min);
            for &e in effects {
                let idx = (((e - min) * scale) as usize).min(HISTOGRAM_BUCKETS - 1);
                buckets[idx] += 1;
            }
        } else {
            buckets[0] = effects.len() as u32;
        }
        EffectHistogram {
            buckets,
            min,
            max,
            q1: quantile_sorted(&sorted, 0.25),
            median: quantile_sorted(&sorted, 0.5),
            q3: quantile_sorted(&sorted, 0.75),
        }
    }
}

/// Statistics of one bin: limits, membership count, effect mean, effect std.
/// `sigma` is None when the bin holds a single point (no sample std exists);
/// such bins contribute 0 to the envelope and raise a warning upstream.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BinStats {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub mu: f64,
    pub sigma: Option<f64>,
    pub histogram: EffectHistogram,
}

impl BinStats {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Mean local effect of a bin's members.
pub fn bin_effect(effects: &[f64]) -> Result<f64> {
    if effects.is_empty() {
        return Err(Error::EmptyBin {
            bin: 0,
            context: "cannot average an empty bin".into(),
        });
    }
    Ok(mean(effects))
}

/// Sample standard deviation (|S|−1 divisor) of a bin's members around `mu`.
pub fn bin_std(effects: &[f64], mu: f64) -> Result<f64> {
    if effects.len() < 2 {
        return Err(Error::DegenerateBin {
            bin: 0,
            count: effects.len(),
            context: "sample standard deviation needs at least two points".into(),
        });
    }
    let ss = effects.iter().map(|e| (e - mu) * (e - mu)).sum::<f64>();
    Ok((ss / (effects.len() - 1) as f64).sqrt())
}

/// Groups effects into the partition's bins and computes per-bin statistics.
/// Empty bins are an error; single-point bins get `sigma = None` plus a
/// warning message.
pub fn compute_bin_stats(
    effects: &LocalEffects,
    partition: &Partition,
) -> Result<(Vec<BinStats>, Vec<String>)> {
    let idx = assign_bins(&effects.xs, partition)?;
    let k = partition.n_bins();
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); k];
    for (&bin, &e) in idx.iter().zip(&effects.effects) {
        members[bin].push(e);
    }
    let mut bins = Vec::with_capacity(k);
    let mut warnings = Vec::new();
    for (b, group) in members.iter().enumerate() {
        if group.is_empty() {
            return Err(Error::EmptyBin {
                bin: b,
                context: format!(
                    "no data in [{}, {}); widen the bins or supply more data",
                    partition.limits()[b],
                    partition.limits()[b + 1]
                ),
            });
        }
        let mu = bin_effect(group)?;
        let sigma = if group.len() >= 2 {
            Some(bin_std(group, mu)?)
        } else {
            warnings.push(format!(
                "bin {b} [{}, {}) holds a single point; its deviation is \
                 unknown and enters the envelope as 0",
                partition.limits()[b],
                partition.limits()[b + 1]
            ));
            None
        };
        bins.push(BinStats {
            lower: partition.limits()[b],
            upper: partition.limits()[b + 1],
            count: group.len(),
            mu,
            sigma,
            histogram: EffectHistogram::from_effects(group),
        });
    }
    Ok((bins, warnings))
}

/// Bin index for x under the same half-open rules as `Partition::locate`.
fn locate_bin(bins: &[BinStats], x: f64) -> Result<usize> {
    let lo = bins[0].lower;
    let hi = bins[bins.len() - 1].upper;
    if !(lo..=hi).contains(&x) {
        return Err(Error::invalid(format!(
            "x = {x} outside the explained range [{lo}, {hi}]"
        )));
    }
    let idx = bins.partition_point(|b| b.lower <= x);
    Ok(idx - 1)
}

/// Accumulated effect at x: whole bins below, then a proportional share of
/// the bin containing x. Starts at 0 on the left edge.
pub fn accumulate_effect(bins: &[BinStats], x: f64) -> Result<f64> {
    let kx = locate_bin(bins, x)?;
    let mut acc = 0.0;
    for b in &bins[..kx] {
        acc += b.mu * b.width();
    }
    acc += bins[kx].mu * (x - bins[kx].lower);
    Ok(acc)
}

/// Accumulated effect summing only whole bins, through the one containing x.
/// A step function; kept for comparison with the interpolated default.
pub fn accumulate_effect_literal(bins: &[BinStats], x: f64) -> Result<f64> {
    let kx = locate_bin(bins, x)?;
    Ok(bins[..=kx].iter().map(|b| b.mu * b.width()).sum())
}

/// Envelope half-width at x; missing bin deviations count as 0.
pub fn accumulate_std(bins: &[BinStats], x: f64) -> Result<f64> {
    let kx = locate_bin(bins, x)?;
    let mut acc = 0.0;
    for b in &bins[..kx] {
        let s = b.sigma.unwrap_or(0.0);
        acc += b.width() * b.width() * s * s;
    }
    let s = bins[kx].sigma.unwrap_or(0.0);
    let part = x - bins[kx].lower;
    acc += part * part * s * s;
    Ok(acc.sqrt())
}

/// How to choose the bin partition.
#[derive(Debug, Clone, PartialEq)]
pub enum Binning {
    /// Variable-width bins from the DP search.
    Auto,
    /// K equal-width bins over the feature's observed range.
    Fixed(usize),
    /// A caller-supplied partition. Data outside it is an error; empty bins
    /// inside it are an error; one-point bins degrade to `sigma = None`.
    Given(Partition),
}

/// A feature-effect explanation: the partition, per-bin statistics, and
/// continuous accessors for the accumulated curve and its envelope.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EffectResult {
    pub feature_index: usize,
    pub partition: Partition,
    pub bins: Vec<BinStats>,
    pub source: EffectSource,
    /// Objective value of the DP search; None for fixed or given partitions.
    pub objective: Option<f64>,
    /// When true, `value_at` subtracts `centering_offset` so the curve has
    /// zero mean over the training feature values.
    pub centered: bool,
    pub centering_offset: f64,
    pub warnings: Vec<String>,
}

impl EffectResult {
    /// Curve value at x (centered if the `centered` flag is set).
    pub fn value_at(&self, x: f64) -> Result<f64> {
        let v = accumulate_effect(&self.bins, x)?;
        Ok(if self.centered {
            v - self.centering_offset
        } else {
            v
        })
    }

    /// Whole-bin (step) variant of `value_at`.
    pub fn value_at_literal(&self, x: f64) -> Result<f64> {
        let v = accumulate_effect_literal(&self.bins, x)?;
        Ok(if self.centered {
            v - self.centering_offset
        } else {
            v
        })
    }

    /// Envelope half-width at x. Centering does not affect spread.
    pub fn std_at(&self, x: f64) -> Result<f64> {
        accumulate_std(&self.bins, x)
    }

    /// Curve values at the partition limits. Between knots the curve is the
    /// straight line joining them.
    pub fn curve_knots(&self) -> Vec<(f64, f64)> {
        self.partition
            .limits()
            .iter()
            .map(|&z| (z, self.value_at(z).unwrap()))
            .collect()
    }

    /// Envelope values at the partition limits. Between knots the envelope is
    /// sqrt-quadratic; evaluate `std_at` for exact intermediate values.
    pub fn envelope_knots(&self) -> Vec<(f64, f64)> {
        self.partition
            .limits()
            .iter()
            .map(|&z| (z, self.std_at(z).unwrap()))
            .collect()
    }

    /// Turns centering on or off, keeping the precomputed offset.
    pub fn with_centering(mut self, on: bool) -> Self {
        self.centered = on;
        self
    }

    /// Count-weighted mean of bin deviations (missing ones as 0).
    pub fn mean_sigma(&self) -> f64 {
        let total: usize = self.bins.iter().map(|b| b.count).sum();
        self.bins
            .iter()
            .map(|b| b.sigma.unwrap_or(0.0) * b.count as f64)
            .sum::<f64>()
            / total as f64
    }
}

/// Builds an explanation from precomputed local effects.
pub fn rhale_from_effects(
    effects: &LocalEffects,
    config: &BinningConfig,
    binning: &Binning,
) -> Result<EffectResult> {
    let (partition, objective) = match binning {
        Binning::Auto => {
            let found = dp_optimal_partition(effects, config)?;
            (found.partition, Some(found.objective))
        }
        Binning::Fixed(k) => {
            let (lo, hi) = effects.range();
            (fixed_partition(lo, hi, *k)?, None)
        }
        Binning::Given(p) => (p.clone(), None),
    };
    let (bins, warnings) = compute_bin_stats(effects, &partition)?;
    // Offset that would give the curve zero mean over the training points.
    let mut offset = 0.0;
    for &x in &effects.xs {
        offset += accumulate_effect(&bins, x)?;
    }
    offset /= effects.len() as f64;
    Ok(EffectResult {
        feature_index: effects.feature_index,
        partition,
        bins,
        source: effects.source,
        objective,
        centered: false,
        centering_offset: offset,
        warnings,
    })
}

/// Full pipeline: local effects for feature `s`, a partition per `binning`,
/// then bin statistics and the accumulated curve. Uncentered by default; use
/// [`EffectResult::with_centering`] to flip.
pub fn rhale(
    data: &FeatureMatrix,
    model: &dyn Model,
    s: usize,
    config: &BinningConfig,
    binning: &Binning,
) -> Result<EffectResult> {
    let effects = local_effects(model, data, s)?;
    rhale_from_effects(&effects, config, binning)
}

/// Per-coarse-bin variance split. With population-style (1/n) variances the
/// identity `sigma_star_sq = within_sq + bin_error_sq` holds exactly: the
/// heterogeneity a coarse bin reports is what its fine bins see internally
/// plus what splitting would reveal.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DecompositionReport {
    pub coarse: Partition,
    pub fine: Partition,
    /// Population variance of all effects in each coarse bin.
    pub sigma_star_sq: Vec<f64>,
    /// Count-weighted mean of fine-bin population variances, per coarse bin.
    pub within_sq: Vec<f64>,
    /// Count-weighted mean squared residual of fine-bin means, per coarse bin.
    pub bin_error_sq: Vec<f64>,
    /// Residual (fine-bin mean − enclosing coarse-bin mean), one per fine bin.
    pub residuals: Vec<f64>,
}

/// Splits each coarse bin's variance into within-fine-bin variance plus the
/// squared residuals of fine-bin means. `fine` must contain every limit of
/// `coarse`, and every fine bin must be populated.
pub fn decompose_heterogeneity(
    effects: &LocalEffects,
    coarse: &Partition,
    fine: &Partition,
) -> Result<DecompositionReport> {
    for &z in coarse.limits() {
        if !fine.limits().contains(&z) {
            return Err(Error::invalid(format!(
                "fine partition must refine the coarse one; coarse limit {z} missing"
            )));
        }
    }
    let fine_idx = assign_bins(&effects.xs, fine)?;
    let mut fine_members: Vec<Vec<f64>> = vec![Vec::new(); fine.n_bins()];
    for (&b, &e) in fine_idx.iter().zip(&effects.effects) {
        fine_members[b].push(e);
    }
    for (b, group) in fine_members.iter().enumerate() {
        if group.is_empty() {
            return Err(Error::DegenerateBin {
                bin: b,
                count: 0,
                context: "every fine bin must hold at least one point".into(),
            });
        }
    }
    let fine_means: Vec<f64> = fine_members.iter().map(|g| mean(g)).collect();
    let fine_vars: Vec<f64> = fine_members.iter().map(|g| population_variance(g)).collect();

    // Map each fine bin to its enclosing coarse bin via the bin's midpoint.
    let owner: Vec<usize> = (0..fine.n_bins())
        .map(|b| {
            let mid = 0.5 * (fine.limits()[b] + fine.limits()[b + 1]);
            coarse.locate(mid).unwrap()
        })
        .collect();

    let mut coarse_members: Vec<Vec<f64>> = vec![Vec::new(); coarse.n_bins()];
    for (b, group) in fine_members.iter().enumerate() {
        coarse_members[owner[b]].extend_from_slice(group);
    }

    let mut sigma_star_sq = Vec::with_capacity(coarse.n_bins());
    let mut within_sq = Vec::with_capacity(coarse.n_bins());
    let mut bin_error_sq = Vec::with_capacity(coarse.n_bins());
    let mut residuals = vec![0.0; fine.n_bins()];
    for c in 0..coarse.n_bins() {
        let all = &coarse_members[c];
        if all.is_empty() {
            return Err(Error::EmptyBin {
                bin: c,
                context: "coarse bin holds no data".into(),
            });
        }
        let grand = mean(all);
        let n = all.len() as f64;
        sigma_star_sq.push(population_variance(all));
        let mut within = 0.0;
        let mut between = 0.0;
        for b in 0..fine.n_bins() {
            if owner[b] != c {
                continue;
            }
            let w = fine_members[b].len() as f64 / n;
            within += w * fine_vars[b];
            let r = fine_means[b] - grand;
            residuals[b] = r;
            between += w * r * r;
        }
        within_sq.push(within);
        bin_error_sq.push(between);
    }
    Ok(DecompositionReport {
        coarse: coarse.clone(),
        fine: fine.clone(),
        sigma_star_sq,
        within_sq,
        bin_error_sq,
        residuals,
    })
}

/// Caches local effects per feature so repeated explanations of the same
/// dataset/model pair compute derivatives only once.
pub struct Explainer<'a> {
    data: &'a FeatureMatrix,
    model: &'a dyn Model,
    cache: HashMap<usize, LocalEffects>,
}

impl<'a> Explainer<'a> {
    pub fn new(data: &'a FeatureMatrix, model: &'a dyn Model) -> Self {
        Explainer {
            data,
            model,
            cache: HashMap::new(),
        }
    }

    pub fn data(&self) -> &FeatureMatrix {
        self.data
    }

    /// Local effects for feature `s`, computed on first use then reused.
    pub fn effects(&mut self, s: usize) -> Result<&LocalEffects> {
        if !self.cache.contains_key(&s) {
            let e = local_effects(self.model, self.data, s)?;
            self.cache.insert(s, e);
        }
        Ok(&self.cache[&s])
    }

    /// Explanation for feature `s` using the cached effects.
    pub fn explain(
        &mut self,
        s: usize,
        config: &BinningConfig,
        binning: &Binning,
    ) -> Result<EffectResult> {
        let config = *config;
        let binning = binning.clone();
        let effects = self.effects(s)?;
        rhale_from_effects(effects, &config, &binning)
    }
}
