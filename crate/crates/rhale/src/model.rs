//! Model handles and instance-level local effects.
//!
//! A "local effect" is the partial derivative ∂f/∂x_s evaluated at one data
//! instance. Everything downstream (binning, curves, heterogeneity) consumes
//! these per-instance derivatives, so they are computed once per
//! (dataset, feature) and cached.

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};

/// A black-box model: a deterministic scalar evaluator plus an optional exact
/// gradient. When the gradient is absent, central finite differences are used.
pub trait Model {
    /// Evaluates f at a D-dimensional point.
    fn evaluate(&self, x: &[f64]) -> f64;

    /// Exact gradient ∇f at a point, if the model can provide one.
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn has_gradient(&self) -> bool {
        false
    }
}

/// A model built from closures; the easiest way to wrap user code.
pub struct ClosureModel {
    eval: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    grad: Option<Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>>,
}

impl ClosureModel {
    pub fn new(eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ClosureModel {
            eval: Box::new(eval),
            grad: None,
        }
    }

    pub fn with_gradient(
        mut self,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Box::new(grad));
        self
    }
}

impl Model for ClosureModel {
    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.grad.as_ref().map(|g| g(x))
    }

    fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }
}

/// How a batch of local effects was obtained.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectSource {
    /// Exact symbolic/analytic derivatives from the model.
    Analytic,
    /// Central finite differences with the recorded step.
    FiniteDifference { step: f64 },
}

/// Per-instance derivatives ∂f/∂x_s for one feature, paired with the feature
/// values they were evaluated at. `xs[i]` and `effects[i]` describe row i.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalEffects {
    pub feature_index: usize,
    pub xs: Vec<f64>,
    pub effects: Vec<f64>,
    pub source: EffectSource,
}

impl LocalEffects {
    /// Builds from parallel vectors, validating finiteness and equal length.
    pub fn new(
        feature_index: usize,
        xs: Vec<f64>,
        effects: Vec<f64>,
        source: EffectSource,
    ) -> Result<Self> {
        if xs.len() != effects.len() {
            return Err(Error::invalid(format!(
                "feature values ({}) and effects ({}) differ in length",
                xs.len(),
                effects.len()
            )));
        }
        if xs.is_empty() {
            return Err(Error::invalid("empty local-effects vector"));
        }
        for (i, (x, e)) in xs.iter().zip(&effects).enumerate() {
            if !x.is_finite() {
                return Err(Error::invalid(format!("non-finite feature value at row {i}")));
            }
            if !e.is_finite() {
                return Err(Error::Model { row: i });
            }
        }
        Ok(LocalEffects {
            feature_index,
            xs,
            effects,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// (min, max) of the feature values.
    pub fn range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in &self.xs {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        (lo, hi)
    }
}

/// Evaluates the model at every row, checking outputs are finite.
pub fn evaluate_model<M: Model + ?Sized>(model: &M, points: &FeatureMatrix) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(points.n_rows());
    for i in 0..points.n_rows() {
        let y = model.evaluate(points.row(i));
        if !y.is_finite() {
            return Err(Error::Model { row: i });
        }
        out.push(y);
    }
    Ok(out)
}

/// Local effects from the model's exact gradient.
///
/// Fails with a capability error when the model has none.
pub fn local_effects_analytic<M: Model + ?Sized>(
    model: &M,
    data: &FeatureMatrix,
    s: usize,
) -> Result<LocalEffects> {
    data.check_feature_index(s)?;
    if !model.has_gradient() {
        return Err(Error::capability(
            "model has no analytic gradient; use local_effects_finite_diff",
        ));
    }
    let mut effects = Vec::with_capacity(data.n_rows());
    for i in 0..data.n_rows() {
        let g = model
            .gradient(data.row(i))
            .ok_or_else(|| Error::capability("model gradient unavailable at a row"))?;
        if g.len() != data.n_cols() {
            return Err(Error::invalid(format!(
                "gradient has {} entries for {} features",
                g.len(),
                data.n_cols()
            )));
        }
        effects.push(g[s]);
    }
    LocalEffects::new(s, data.column(s), effects, EffectSource::Analytic)
}

/// Default finite-difference step for feature `s`: 1e-5 of the feature's range.
pub fn default_fd_step(data: &FeatureMatrix, s: usize) -> f64 {
    let (lo, hi) = data.feature_range(s);
    1e-5 * (hi - lo)
}

/// Local effects by central finite differences:
/// `[f(x with x_s + h) − f(x with x_s − h)] / 2h`.
pub fn local_effects_finite_diff<M: Model + ?Sized>(
    model: &M,
    data: &FeatureMatrix,
    s: usize,
    h: f64,
) -> Result<LocalEffects> {
    data.check_feature_index(s)?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid(format!("step must be positive and finite, got {h}")));
    }
    let mut effects = Vec::with_capacity(data.n_rows());
    let mut point = vec![0.0; data.n_cols()];
    for i in 0..data.n_rows() {
        point.copy_from_slice(data.row(i));
        let x0 = point[s];
        point[s] = x0 + h;
        let up = model.evaluate(&point);
        point[s] = x0 - h;
        let down = model.evaluate(&point);
        point[s] = x0;
        let d = (up - down) / (2.0 * h);
        if !d.is_finite() {
            return Err(Error::Model { row: i });
        }
        effects.push(d);
    }
    LocalEffects::new(
        s,
        data.column(s),
        effects,
        EffectSource::FiniteDifference { step: h },
    )
}

/// Local effects via the best available path: analytic when the model has a
/// gradient, otherwise central differences at the default step.
pub fn local_effects<M: Model + ?Sized>(
    model: &M,
    data: &FeatureMatrix,
    s: usize,
) -> Result<LocalEffects> {
    if model.has_gradient() {
        local_effects_analytic(model, data, s)
    } else {
        local_effects_finite_diff(model, data, s, default_fd_step(data, s))
    }
}
