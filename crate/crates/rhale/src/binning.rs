//! Bin partitions of a feature's range: fixed-size, DP-optimal variable-width,
//! and an exhaustive brute-force oracle used to verify the DP.
//!
//! The variable-width search discretizes the range into `k_max` equal cells and
//! picks the partition (a subset of cell boundaries) minimizing
//!
//! ```text
//! L = Σ_k τ_k · σ̂²(z_{k−1}, z_k) · Δz_k,     τ_k = 1 − α·|S_k|/N
//! ```
//!
//! where σ̂² is the sample variance (|S_k|−1 divisor) of the local effects
//! falling in the bin, and bins with fewer than `n_ppb` points are forbidden.
//! The τ factor discounts bins holding many points, favoring wide bins where
//! the effects are homogeneous.

use crate::error::{Error, Result};
use crate::model::LocalEffects;

/// Ordered bin limits z_0 < z_1 < … < z_K covering a feature's range.
/// Bin k (0-based) covers `[limits[k], limits[k+1])`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Partition {
    limits: Vec<f64>,
}

impl Partition {
    /// Validates strictly increasing limits with at least one bin.
    pub fn new(limits: Vec<f64>) -> Result<Self> {
        if limits.len() < 2 {
            return Err(Error::invalid("a partition needs at least 2 limits"));
        }
        for w in limits.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::invalid(format!(
                    "partition limits must be strictly increasing; got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if limits.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("partition limits must be finite"));
        }
        Ok(Partition { limits })
    }

    pub fn limits(&self) -> &[f64] {
        &self.limits
    }

    /// Number of bins K.
    pub fn n_bins(&self) -> usize {
        self.limits.len() - 1
    }

    pub fn lower(&self) -> f64 {
        self.limits[0]
    }

    pub fn upper(&self) -> f64 {
        *self.limits.last().unwrap()
    }

    /// Width of bin k.
    pub fn width(&self, k: usize) -> f64 {
        self.limits[k + 1] - self.limits[k]
    }

    /// Bin index for a single value, or None when outside [z_0, z_K].
    /// Half-open bins; a value equal to an interior limit belongs to the bin
    /// on its right; z_K belongs to the last bin.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if x < self.lower() || x > self.upper() {
            return None;
        }
        // partition_point returns the first index whose limit exceeds x.
        let idx = self.limits.partition_point(|&z| z <= x);
        Some(if idx == self.limits.len() {
            self.n_bins() - 1 // x == z_K
        } else {
            idx - 1
        })
    }
}

/// Configuration for the variable-width bin search.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BinningConfig {
    /// Grid resolution and maximum bin count.
    pub k_max: usize,
    /// Large-bin discount strength in [0, 1].
    pub alpha: f64,
    /// Minimum points per bin; None means max(2, ⌈N/20⌉).
    pub n_ppb: Option<usize>,
}

impl Default for BinningConfig {
    fn default() -> Self {
        BinningConfig {
            k_max: 50,
            alpha: 0.2,
            n_ppb: None,
        }
    }
}

impl BinningConfig {
    /// Effective minimum points per bin for a dataset of size `n`.
    /// Clamped to ≥ 2 because a one-point bin has no sample variance.
    pub fn resolved_n_ppb(&self, n: usize) -> usize {
        let raw = match self.n_ppb {
            Some(v) => v,
            None => (n + 19) / 20,
        };
        raw.max(2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::invalid("k_max must be positive"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Equal-width partition of [x_min, x_max] into K bins.
pub fn fixed_partition(x_min: f64, x_max: f64, k: usize) -> Result<Partition> {
    if k == 0 {
        return Err(Error::invalid("bin count must be positive"));
    }
    if !(x_min < x_max) {
        return Err(Error::invalid(format!(
            "degenerate range [{x_min}, {x_max}]"
        )));
    }
    let mut limits = Vec::with_capacity(k + 1);
    for i in 0..=k {
        limits.push(x_min + (x_max - x_min) * i as f64 / k as f64);
    }
    // Guard against floating-point drift at the endpoints.
    limits[0] = x_min;
    limits[k] = x_max;
    Partition::new(limits)
}

/// Assigns every value its 0-based bin index under `Partition::locate` rules.
/// Errors on the first value outside the partition's range, naming its row.
pub fn assign_bins(xs: &[f64], partition: &Partition) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(xs.len());
    for (row, &x) in xs.iter().enumerate() {
        match partition.locate(x) {
            Some(k) => out.push(k),
            None => {
                return Err(Error::invalid(format!(
                    "row {row}: value {x} outside partition range [{}, {}]",
                    partition.lower(),
                    partition.upper()
                )))
            }
        }
    }
    Ok(out)
}

/// The discretized view the DP works on: `k_max` equal cells over the effect
/// sample's feature range, with per-cell prefix sums of the effects.
///
/// Cell membership matches `Partition::locate` exactly (binary search on the
/// same grid values), so bin statistics computed here agree with statistics
/// computed from the returned partition.
pub struct Discretization {
    grid: Vec<f64>,
    prefix_count: Vec<usize>,
    prefix_sum: Vec<f64>,
    prefix_sumsq: Vec<f64>,
    n_total: usize,
}

impl Discretization {
    pub fn new(effects: &LocalEffects, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::invalid("k_max must be positive"));
        }
        let (lo, hi) = effects.range();
        if !(lo < hi) {
            return Err(Error::invalid(format!(
                "feature values span a degenerate range [{lo}, {hi}]"
            )));
        }
        let mut grid = Vec::with_capacity(k_max + 1);
        for i in 0..=k_max {
            grid.push(lo + (hi - lo) * i as f64 / k_max as f64);
        }
        grid[0] = lo;
        grid[k_max] = hi;

        let mut count = vec![0usize; k_max];
        let mut sum = vec![0.0; k_max];
        let mut sumsq = vec![0.0; k_max];
        for (&x, &e) in effects.xs.iter().zip(&effects.effects) {
            // Same convention as Partition::locate: half-open cells, right
            // endpoint closed into the last cell.
            let idx = grid.partition_point(|&z| z <= x);
            let cell = if idx == grid.len() { k_max - 1 } else { idx - 1 };
            count[cell] += 1;
            sum[cell] += e;
            sumsq[cell] += e * e;
        }
        let mut prefix_count = vec![0usize; k_max + 1];
        let mut prefix_sum = vec![0.0; k_max + 1];
        let mut prefix_sumsq = vec![0.0; k_max + 1];
        for i in 0..k_max {
            prefix_count[i + 1] = prefix_count[i] + count[i];
            prefix_sum[i + 1] = prefix_sum[i] + sum[i];
            prefix_sumsq[i + 1] = prefix_sumsq[i] + sumsq[i];
        }
        Ok(Discretization {
            grid,
            prefix_count,
            prefix_sum,
            prefix_sumsq,
            n_total: effects.len(),
        })
    }

    pub fn k_max(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Points falling in cells l..j, i.e. the span `[grid[l], grid[j])`.
    pub fn span_count(&self, l: usize, j: usize) -> usize {
        self.prefix_count[j] - self.prefix_count[l]
    }

    /// Cost of making `[grid[l], grid[j])` one bin:
    /// `(1 − α·|S|/N) · σ̂² · width`, or +∞ when |S| < n_ppb.
    pub fn span_cost(&self, l: usize, j: usize, n_ppb: usize, alpha: f64) -> f64 {
        debug_assert!(l < j);
        let m = self.span_count(l, j);
        if m < n_ppb.max(2) {
            return f64::INFINITY;
        }
        let mf = m as f64;
        let mean = (self.prefix_sum[j] - self.prefix_sum[l]) / mf;
        let ss = self.prefix_sumsq[j] - self.prefix_sumsq[l] - mf * mean * mean;
        let var = (ss / (mf - 1.0)).max(0.0);
        let tau = 1.0 - alpha * mf / self.n_total as f64;
        tau * var * (self.grid[j] - self.grid[l])
    }

    /// Objective of an arbitrary partition expressed as grid indices
    /// (strictly increasing, first 0, last k_max). +∞ if any bin is invalid.
    fn objective_of(&self, cut_indices: &[usize], n_ppb: usize, alpha: f64) -> f64 {
        let mut total = 0.0;
        for w in cut_indices.windows(2) {
            let c = self.span_cost(w[0], w[1], n_ppb, alpha);
            if !c.is_finite() {
                return f64::INFINITY;
            }
            total += c;
        }
        total
    }

    fn partition_from(&self, cut_indices: &[usize]) -> Result<Partition> {
        Partition::new(cut_indices.iter().map(|&i| self.grid[i]).collect())
    }
}

/// The bin cost B(l, j) for the span [x_l, x_j) of the `k_max` grid over the
/// effects' feature range. Standalone entry point for inspection; the DP uses
/// the same computation through shared prefix sums.
pub fn bin_cost(
    effects: &LocalEffects,
    l: usize,
    j: usize,
    config: &BinningConfig,
) -> Result<f64> {
    config.validate()?;
    if l >= j || j > config.k_max {
        return Err(Error::invalid(format!(
            "need grid indices l < j ≤ k_max, got l={l}, j={j}, k_max={}",
            config.k_max
        )));
    }
    let disc = Discretization::new(effects, config.k_max)?;
    Ok(disc.span_cost(l, j, config.resolved_n_ppb(effects.len()), config.alpha))
}

/// Result of a partition search: the partition and its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSearch {
    pub partition: Partition,
    pub objective: f64,
}

/// DP-optimal variable-width partition.
///
/// `cost[i][j]` is the minimal cost of covering `[grid[0], grid[j]]` with exactly
/// `i` bins; the answer minimizes over `i`. Ties prefer fewer bins, then the
/// smallest predecessor (widest final bin). The returned objective is
/// recomputed from the returned partition, not read off the table.
pub fn dp_optimal_partition(
    effects: &LocalEffects,
    config: &BinningConfig,
) -> Result<PartitionSearch> {
    config.validate()?;
    let k = config.k_max;
    let n_ppb = config.resolved_n_ppb(effects.len());
    if effects.len() < n_ppb {
        return Err(Error::infeasible(format!(
            "{} points cannot fill even one bin of at least {} points",
            effects.len(),
            n_ppb
        )));
    }
    let disc = Discretization::new(effects, k)?;

    const UNSET: usize = usize::MAX;
    let mut cost = vec![vec![f64::INFINITY; k + 1]; k + 1];
    let mut back = vec![vec![UNSET; k + 1]; k + 1];
    cost[0][0] = 0.0;
    for i in 1..=k {
        for j in i..=k {
            let mut best = f64::INFINITY;
            let mut best_l = UNSET;
            for l in (i - 1)..j {
                let prev = cost[i - 1][l];
                if !prev.is_finite() {
                    continue;
                }
                let c = disc.span_cost(l, j, n_ppb, config.alpha);
                if !c.is_finite() {
                    continue;
                }
                let total = prev + c;
                // Strict improvement only: keeps the smallest l on ties.
                if total < best {
                    best = total;
                    best_l = l;
                }
            }
            cost[i][j] = best;
            back[i][j] = best_l;
        }
    }

    let mut best_bins = 0;
    let mut best_cost = f64::INFINITY;
    for i in 1..=k {
        // Strict improvement: ties resolve to the fewest bins.
        if cost[i][k] < best_cost {
            best_cost = cost[i][k];
            best_bins = i;
        }
    }
    if best_bins == 0 {
        return Err(Error::infeasible(
            "no feasible partition on the grid (try lowering n_ppb or k_max)",
        ));
    }

    let mut cuts = vec![k];
    let mut i = best_bins;
    let mut j = k;
    while i > 0 {
        let l = back[i][j];
        debug_assert_ne!(l, UNSET);
        cuts.push(l);
        j = l;
        i -= 1;
    }
    cuts.reverse();

    let objective = disc.objective_of(&cuts, n_ppb, config.alpha);
    Ok(PartitionSearch {
        partition: disc.partition_from(&cuts)?,
        objective,
    })
}

/// Exhaustive search over all 2^(k_max−1) subsets of interior grid points.
/// Exact global minimum of the same objective on the same grid; the
/// verification oracle for `dp_optimal_partition`. Ties prefer fewer bins.
pub fn brute_force_partition(
    effects: &LocalEffects,
    config: &BinningConfig,
) -> Result<PartitionSearch> {
    config.validate()?;
    let k = config.k_max;
    if k > 16 {
        return Err(Error::capability(format!(
            "brute force enumerates 2^(k_max−1) subsets; k_max={k} exceeds the cap of 16"
        )));
    }
    let n_ppb = config.resolved_n_ppb(effects.len());
    if effects.len() < n_ppb {
        return Err(Error::infeasible(format!(
            "{} points cannot fill even one bin of at least {} points",
            effects.len(),
            n_ppb
        )));
    }
    let disc = Discretization::new(effects, k)?;

    let interior = k - 1;
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    let mut cuts = Vec::with_capacity(k + 1);
    for mask in 0u32..(1u32 << interior) {
        cuts.clear();
        cuts.push(0);
        for b in 0..interior {
            if mask & (1 << b) != 0 {
                cuts.push(b + 1);
            }
        }
        cuts.push(k);
        let obj = disc.objective_of(&cuts, n_ppb, config.alpha);
        if !obj.is_finite() {
            continue;
        }
        let bins = cuts.len() - 1;
        let better = match &best {
            None => true,
            Some((bo, bb, _)) => obj < *bo || (obj == *bo && bins < *bb),
        };
        if better {
            best = Some((obj, bins, cuts.clone()));
        }
    }
    match best {
        Some((obj, _, cuts)) => Ok(PartitionSearch {
            partition: disc.partition_from(&cuts)?,
            objective: obj,
        }),
        None => Err(Error::infeasible(
            "no feasible partition on the grid (try lowering n_ppb or k_max)",
        )),
    }
}
