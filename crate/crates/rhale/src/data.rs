//! Dataset container: a dense N×D matrix of finite feature values.

use crate::error::{Error, Result};

/// An N×D numeric dataset, row-major.
///
/// Invariants enforced on construction: N ≥ 2, D ≥ 1, every entry finite, and
/// every feature has min < max (a constant column cannot be explained).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    column_names: Option<Vec<String>>,
}

impl FeatureMatrix {
    /// Builds a matrix from row-major values, validating all invariants.
    pub fn new(values: Vec<f64>, n_rows: usize, n_cols: usize) -> Result<Self> {
        if n_rows < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 rows, got {n_rows}"
            )));
        }
        if n_cols == 0 {
            return Err(Error::invalid("need at least 1 feature column"));
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::invalid(format!(
                "value buffer has {} entries, expected {}×{} = {}",
                values.len(),
                n_rows,
                n_cols,
                n_rows * n_cols
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::invalid(format!(
                    "non-finite value at row {}, column {}",
                    i / n_cols,
                    i % n_cols
                )));
            }
        }
        let m = FeatureMatrix {
            values,
            n_rows,
            n_cols,
            column_names: None,
        };
        for s in 0..n_cols {
            let (lo, hi) = m.feature_range(s);
            if lo >= hi {
                return Err(Error::invalid(format!(
                    "feature {s} is constant (min = max = {lo}); it cannot be explained"
                )));
            }
        }
        Ok(m)
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::invalid("rows have unequal lengths"));
        }
        let values = rows.iter().flatten().copied().collect();
        Self::new(values, n_rows, n_cols)
    }

    /// Attaches column labels (must match the column count).
    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_cols {
            return Err(Error::invalid(format!(
                "{} column names for {} columns",
                names.len(),
                self.n_cols
            )));
        }
        self.column_names = Some(names);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    /// Name of column `s`, falling back to `x{s+1}`.
    pub fn column_name(&self, s: usize) -> String {
        self.column_names
            .as_ref()
            .and_then(|ns| ns.get(s).cloned())
            .unwrap_or_else(|| format!("x{}", s + 1))
    }

    /// The full row-major backing storage.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols + j]
    }

    /// The values of feature `s`, one per row, in row order.
    pub fn column(&self, s: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, s)).collect()
    }

    /// (min, max) of feature `s` over the sample.
    pub fn feature_range(&self, s: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n_rows {
            let v = self.get(i, s);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    pub fn check_feature_index(&self, s: usize) -> Result<()> {
        if s >= self.n_cols {
            return Err(Error::invalid(format!(
                "feature index {s} out of range (dataset has {} columns)",
                self.n_cols
            )));
        }
        Ok(())
    }
}
