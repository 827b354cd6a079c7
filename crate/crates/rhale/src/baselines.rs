//! Comparison estimators: partial dependence (PDP), individual conditional
//! expectation (ICE) curves, and the classic endpoint-difference ALE.
//!
//! These deliberately keep their textbook definitions, correlated features
//! and all, so their failure modes can be shown next to the derivative-based
//! estimator.

use crate::binning::{assign_bins, fixed_partition};
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::model::Model;

/// Number of grid points used when no explicit grid is given.
pub const DEFAULT_GRID_POINTS: usize = 101;

/// A curve sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridCurve {
    fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::invalid("grid and values differ in length"));
        }
        Ok(GridCurve { grid, values })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// One curve per instance on a shared grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IceBundle {
    pub grid: Vec<f64>,
    /// Row i is instance i's curve over `grid`.
    pub curves: Vec<Vec<f64>>,
    /// When true, each row had its first-grid-point value subtracted.
    pub centered: bool,
}

impl IceBundle {
    /// Column-wise mean of the instance curves.
    pub fn mean_curve(&self) -> GridCurve {
        let t = self.grid.len();
        let mut values = vec![0.0; t];
        for row in &self.curves {
            for (v, r) in values.iter_mut().zip(row) {
                *v += r;
            }
        }
        let n = self.curves.len() as f64;
        for v in &mut values {
            *v /= n;
        }
        GridCurve {
            grid: self.grid.clone(),
            values,
        }
    }
}

/// Equispaced grid of `DEFAULT_GRID_POINTS` values over feature `s`'s range.
pub fn default_grid(data: &FeatureMatrix, s: usize) -> Result<Vec<f64>> {
    grid_over(data, s, DEFAULT_GRID_POINTS)
}

/// Equispaced grid of `t` values over feature `s`'s range.
pub fn grid_over(data: &FeatureMatrix, s: usize, t: usize) -> Result<Vec<f64>> {
    data.check_feature_index(s)?;
    if t < 2 {
        return Err(Error::invalid("a grid needs at least 2 points"));
    }
    let (lo, hi) = data.feature_range(s);
    let mut grid = Vec::with_capacity(t);
    for i in 0..t {
        grid.push(lo + (hi - lo) * i as f64 / (t - 1) as f64);
    }
    grid[0] = lo;
    grid[t - 1] = hi;
    Ok(grid)
}

fn check_grid(data: &FeatureMatrix, s: usize, grid: &[f64]) -> Result<()> {
    data.check_feature_index(s)?;
    if grid.len() < 2 {
        return Err(Error::invalid("a grid needs at least 2 points"));
    }
    for w in grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::invalid("grid must be strictly increasing"));
        }
    }
    let (lo, hi) = data.feature_range(s);
    if grid[0] < lo || *grid.last().unwrap() > hi {
        return Err(Error::invalid(format!(
            "grid [{}, {}] exceeds the observed feature range [{lo}, {hi}]",
            grid[0],
            grid.last().unwrap()
        )));
    }
    Ok(())
}

/// Model outputs with feature `s` forced to `value`, one per data row; the
/// other features keep their observed values.
fn outputs_at(
    model: &dyn Model,
    data: &FeatureMatrix,
    s: usize,
    value: f64,
) -> Result<Vec<f64>> {
    let mut point = vec![0.0; data.n_cols()];
    let mut out = Vec::with_capacity(data.n_rows());
    for i in 0..data.n_rows() {
        point.copy_from_slice(data.row(i));
        point[s] = value;
        let y = model.evaluate(&point);
        if !y.is_finite() {
            return Err(Error::Model { row: i });
        }
        out.push(y);
    }
    Ok(out)
}

/// Partial dependence: the model's mean output with feature `s` pinned to
/// each grid value while every other feature keeps its data distribution.
/// Averages over the marginal, so correlated features get evaluated at
/// combinations the data never contains.
pub fn pdp(model: &dyn Model, data: &FeatureMatrix, s: usize, grid: &[f64]) -> Result<GridCurve> {
    check_grid(data, s, grid)?;
    let n = data.n_rows() as f64;
    let mut values = Vec::with_capacity(grid.len());
    for &z in grid {
        let outs = outputs_at(model, data, s, z)?;
        values.push(outs.iter().sum::<f64>() / n);
    }
    GridCurve::new(grid.to_vec(), values)
}

/// One conditional-expectation curve per instance; `center` subtracts each
/// row's value at the first grid point so all curves start at 0.
pub fn ice(
    model: &dyn Model,
    data: &FeatureMatrix,
    s: usize,
    grid: &[f64],
    center: bool,
) -> Result<IceBundle> {
    check_grid(data, s, grid)?;
    let mut curves = vec![Vec::with_capacity(grid.len()); data.n_rows()];
    for &z in grid {
        let outs = outputs_at(model, data, s, z)?;
        for (row, y) in curves.iter_mut().zip(outs) {
            row.push(y);
        }
    }
    if center {
        for row in &mut curves {
            let base = row[0];
            for v in row.iter_mut() {
                *v -= base;
            }
        }
    }
    Ok(IceBundle {
        grid: grid.to_vec(),
        curves,
        centered: center,
    })
}

/// Classic ALE over `K` equal bins: limits, per-bin effects, the accumulated
/// curve at the limits, and which bins had no data.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AleCurve {
    /// Accumulated curve sampled at the K+1 bin limits; starts at 0.
    pub curve: GridCurve,
    /// Per-unit bin effects (mean endpoint difference / bin width).
    pub bin_effects: Vec<f64>,
    /// Bins that held no data. Their effect is recorded as 0, which is a
    /// guess, not an estimate; callers comparing estimators should check.
    pub empty_bins: Vec<usize>,
}

/// Endpoint-difference ALE: for each of `K` equal bins, average
/// f(z_k, x_c) − f(z_{k−1}, x_c) over the instances inside the bin, then
/// accumulate. Empty bins contribute 0 and are flagged.
pub fn ale_classic(
    model: &dyn Model,
    data: &FeatureMatrix,
    s: usize,
    k: usize,
) -> Result<AleCurve> {
    data.check_feature_index(s)?;
    let (lo, hi) = data.feature_range(s);
    let partition = fixed_partition(lo, hi, k)?;
    let bins = assign_bins(&data.column(s), &partition)?;
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    let mut point = vec![0.0; data.n_cols()];
    for i in 0..data.n_rows() {
        let b = bins[i];
        point.copy_from_slice(data.row(i));
        point[s] = partition.limits()[b + 1];
        let upper = model.evaluate(&point);
        point[s] = partition.limits()[b];
        let lower = model.evaluate(&point);
        if !upper.is_finite() || !lower.is_finite() {
            return Err(Error::Model { row: i });
        }
        sums[b] += upper - lower;
        counts[b] += 1;
    }
    let mut bin_effects = Vec::with_capacity(k);
    let mut empty_bins = Vec::new();
    let mut values = Vec::with_capacity(k + 1);
    values.push(0.0);
    for b in 0..k {
        let mean_diff = if counts[b] == 0 {
            empty_bins.push(b);
            0.0
        } else {
            sums[b] / counts[b] as f64
        };
        bin_effects.push(mean_diff / partition.width(b));
        values.push(values[b] + mean_diff);
    }
    Ok(AleCurve {
        curve: GridCurve::new(partition.limits().to_vec(), values)?,
        bin_effects,
        empty_bins,
    })
}
