//! Seeded synthetic datasets with known models, exact gradients, and
//! closed-form ground-truth effects, plus a dense-binning oracle that serves
//! as the reference when no closed form exists.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::binning::fixed_partition;
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::estimator::{compute_bin_stats, BinStats};
use crate::model::{local_effects_analytic, Model};

/// Splits one master seed into independent stream seeds (SplitMix64 mix of
/// master XOR stream·golden-gamma). Used to give each benchmark trial and the
/// oracle their own deterministic seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut z = (master ^ stream.wrapping_mul(GAMMA)).wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The available synthetic examples. Each fixes a data distribution and a
/// model with exact symbolic derivatives.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    /// Three independent U(−1,1) features; the model is linear in x1 and x2
    /// with an x3-switched slope on x2. Targets add N(0,1) noise.
    Concept,
    /// Skewed-uniform x1, wide-normal x2, and x3 tracking x1 closely; a
    /// sinusoidal term switched by the signs of x1 and x3 plus x1·x2 + x2.
    Running,
    /// x1 ~ U(0,1), x2 = x1 + small noise, independent x3; a clipped-ramp
    /// additive term in a1·x1 + a2·x2 plus an optional x1·x3 interaction.
    Simulation { alpha: f64, a1: f64, a2: f64 },
    /// x1 ~ U(0,1), x2 ~ N(x1, 0.5 variance); five linear regions in x1
    /// plus x1·x2.
    Piecewise,
    /// Same distribution as Piecewise; smooth model 4x1² + x2² + x1·x2.
    Nonlinear,
}

impl Example {
    /// Interaction-free ramp with unit weights.
    pub fn simulation_a() -> Self {
        Example::Simulation {
            alpha: 0.0,
            a1: 1.0,
            a2: 1.0,
        }
    }

    /// Interaction-free ramp with asymmetric weights.
    pub fn simulation_b() -> Self {
        Example::Simulation {
            alpha: 0.0,
            a1: 2.0,
            a2: 0.5,
        }
    }

    /// Unit-weight ramp plus the x1·x3 interaction.
    pub fn simulation_c() -> Self {
        Example::Simulation {
            alpha: 1.0,
            a1: 1.0,
            a2: 1.0,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Example::Concept | Example::Running | Example::Simulation { .. } => 3,
            Example::Piecewise | Example::Nonlinear => 2,
        }
    }

    /// Declared support of a feature, when bounded. Unbounded (normal)
    /// features return None and callers fall back to sample ranges.
    pub fn support(&self, feature: usize) -> Option<(f64, f64)> {
        match (self, feature) {
            (Example::Concept, 0..=2) => Some((-1.0, 1.0)),
            (Example::Running, 0) => Some((-0.5, 0.5)),
            (Example::Simulation { .. }, 0) => Some((0.0, 1.0)),
            (Example::Piecewise | Example::Nonlinear, 0) => Some((0.0, 1.0)),
            _ => None,
        }
    }

    pub fn feature_names(&self) -> Vec<String> {
        (1..=self.n_features()).map(|i| format!("x{i}")).collect()
    }
}

/// What to generate: which example, how many rows, which seed.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeneratorSpec {
    pub example: Example,
    pub n: usize,
    pub seed: u64,
}

/// Piecewise slope of the `Piecewise` example at z (right-continuous at the
/// breakpoints; the set of breakpoints has measure zero).
fn piecewise_slope(z: f64) -> f64 {
    if z < 0.2 {
        2.0
    } else if z < 0.4 {
        -2.0
    } else if z < 0.45 {
        5.0
    } else if z < 0.5 {
        -10.0
    } else {
        0.5
    }
}

/// Continuous antiderivative of `piecewise_slope` with A(0) = 0.
fn piecewise_antiderivative(z: f64) -> f64 {
    if z < 0.2 {
        2.0 * z
    } else if z < 0.4 {
        0.4 - 2.0 * (z - 0.2)
    } else if z < 0.45 {
        5.0 * (z - 0.4)
    } else if z < 0.5 {
        0.25 - 10.0 * (z - 0.45)
    } else {
        -0.25 + 0.5 * (z - 0.5)
    }
}

/// The ramp direction of the simulation examples: +1 below the first break,
/// −1 between the breaks, 0 past the second.
fn ramp_branch(f1: f64) -> f64 {
    if f1 <= 0.5 {
        1.0
    } else if f1 < 1.0 {
        -1.0
    } else {
        0.0
    }
}

/// A synthetic example's model: exact evaluation and exact almost-everywhere
/// gradients (indicator switches contribute zero derivative).
#[derive(Debug, Clone, Copy)]
pub struct SyntheticModel {
    pub example: Example,
}

impl SyntheticModel {
    pub fn new(example: Example) -> Self {
        SyntheticModel { example }
    }
}

impl Model for SyntheticModel {
    fn evaluate(&self, x: &[f64]) -> f64 {
        match self.example {
            Example::Concept => {
                let ind = if x[2] > 0.0 { 1.0 } else { 0.0 };
                0.2 * x[0] - 5.0 * x[1] + 10.0 * x[1] * ind
            }
            Example::Running => {
                let i1 = if x[0] < 0.0 { 1.0 } else { 0.0 };
                let i3 = if x[2] < 0.0 { 1.0 } else { 0.0 };
                (2.0 * PI * x[0]).sin() * (i1 - 2.0 * i3) + x[0] * x[1] + x[1]
            }
            Example::Simulation { alpha, a1, a2 } => {
                let f1 = a1 * x[0] + a2 * x[1];
                let ramp = if f1 <= 0.5 {
                    f1
                } else if f1 < 1.0 {
                    1.0 - f1
                } else {
                    0.0
                };
                alpha * x[0] * x[2] + ramp
            }
            Example::Piecewise => piecewise_antiderivative(x[0]) + x[0] * x[1],
            Example::Nonlinear => 4.0 * x[0] * x[0] + x[1] * x[1] + x[0] * x[1],
        }
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(match self.example {
            Example::Concept => {
                let ind = if x[2] > 0.0 { 1.0 } else { 0.0 };
                vec![0.2, -5.0 + 10.0 * ind, 0.0]
            }
            Example::Running => {
                let i1 = if x[0] < 0.0 { 1.0 } else { 0.0 };
                let i3 = if x[2] < 0.0 { 1.0 } else { 0.0 };
                vec![
                    2.0 * PI * (2.0 * PI * x[0]).cos() * (i1 - 2.0 * i3) + x[1],
                    x[0] + 1.0,
                    0.0,
                ]
            }
            Example::Simulation { alpha, a1, a2 } => {
                let br = ramp_branch(a1 * x[0] + a2 * x[1]);
                vec![alpha * x[2] + a1 * br, a2 * br, alpha * x[0]]
            }
            Example::Piecewise => vec![piecewise_slope(x[0]) + x[1], x[0]],
            Example::Nonlinear => vec![8.0 * x[0] + x[1], 2.0 * x[1] + x[0]],
        })
    }

    fn has_gradient(&self) -> bool {
        true
    }
}

/// A generated dataset: features, targets, and the generating model.
/// Targets are the model output; only the Concept example adds observation
/// noise (explanations target the model, not the noise).
pub struct SyntheticDataset {
    pub features: FeatureMatrix,
    pub targets: Vec<f64>,
    pub model: SyntheticModel,
}

/// Draws a dataset for `spec`. Deterministic: one ChaCha8 stream seeded with
/// `spec.seed`, consumed in a fixed per-row order (x1, x2, x3, then any
/// noise), so a given spec always yields the same bytes.
pub fn generate(spec: &GeneratorSpec) -> Result<SyntheticDataset> {
    if spec.n < 2 {
        return Err(Error::invalid("need at least 2 samples"));
    }
    if let Example::Simulation { alpha, a1, a2 } = spec.example {
        if ![alpha, a1, a2].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("simulation weights must be finite"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let model = SyntheticModel::new(spec.example);
    let d = spec.example.n_features();
    let mut values = Vec::with_capacity(spec.n * d);
    let mut targets = Vec::with_capacity(spec.n);
    let normal = |rng: &mut ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };
    for _ in 0..spec.n {
        let row: Vec<f64> = match spec.example {
            Example::Concept => {
                let x1 = rng.gen_range(-1.0..1.0);
                let x2 = rng.gen_range(-1.0..1.0);
                let x3 = rng.gen_range(-1.0..1.0);
                vec![x1, x2, x3]
            }
            Example::Running => {
                // x1: 5/6 of the mass on [−0.5, 0), 1/6 on [0, 0.5).
                let branch: f64 = rng.gen();
                let v: f64 = rng.gen();
                let x1 = if branch < 5.0 / 6.0 {
                    -0.5 + 0.5 * v
                } else {
                    0.5 * v
                };
                let x2 = 2.0 * normal(&mut rng);
                let x3 = x1 + 0.01 * normal(&mut rng);
                vec![x1, x2, x3]
            }
            Example::Simulation { .. } => {
                let x1 = rng.gen_range(0.0..1.0);
                let x2 = x1 + 0.1 * normal(&mut rng);
                let x3 = 0.5 * normal(&mut rng);
                vec![x1, x2, x3]
            }
            Example::Piecewise | Example::Nonlinear => {
                let x1 = rng.gen_range(0.0..1.0);
                let x2 = x1 + 0.5_f64.sqrt() * normal(&mut rng);
                vec![x1, x2]
            }
        };
        let f = model.evaluate(&row);
        let y = match spec.example {
            Example::Concept => f + normal(&mut rng),
            _ => f,
        };
        values.extend_from_slice(&row);
        targets.push(y);
    }
    let features = FeatureMatrix::new(values, spec.n, d)?
        .with_column_names(spec.example.feature_names())?;
    Ok(SyntheticDataset {
        features,
        targets,
        model,
    })
}

/// Where a ground truth comes from.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GtSource {
    ClosedForm,
    DenseOracle,
}

/// Reference effect for one (example, feature) pair: the accumulated curve
/// anchored at 0 on the support's lower end, and the heterogeneity σ(z).
/// When `source` is `DenseOracle` no closed form exists; use [`dense_oracle`].
#[derive(Clone)]
pub struct GroundTruth {
    pub source: GtSource,
    /// Declared support when bounded; None for unbounded features.
    pub support: Option<(f64, f64)>,
    effect: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    heterogeneity: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl GroundTruth {
    pub fn effect_at(&self, z: f64) -> Option<f64> {
        self.effect.as_ref().map(|f| f(z))
    }

    pub fn heterogeneity_at(&self, z: f64) -> Option<f64> {
        self.heterogeneity.as_ref().map(|f| f(z))
    }

    pub fn has_closed_form(&self) -> bool {
        self.effect.is_some()
    }
}

fn closed(
    support: Option<(f64, f64)>,
    effect: impl Fn(f64) -> f64 + Send + Sync + 'static,
    het: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> GroundTruth {
    GroundTruth {
        source: GtSource::ClosedForm,
        support,
        effect: Some(Arc::new(effect)),
        heterogeneity: Some(Arc::new(het)),
    }
}

/// Ramp effect with direction flips where a1·z + a2·z crosses 1/2 and 1
/// (the simulation examples, where x2 tracks x1 so both weights act on z).
fn simulation_ramp_curve(a1: f64, a2: f64, slope: f64) -> impl Fn(f64) -> f64 {
    let total = a1 + a2;
    let b1 = 0.5 / total;
    let b2 = 1.0 / total;
    move |z: f64| {
        if z <= b1 {
            slope * z
        } else if z <= b2 {
            slope * b1 - slope * (z - b1)
        } else {
            slope * (2.0 * b1 - b2)
        }
    }
}

/// Closed-form ground truth for covered (example, feature) pairs; pairs the
/// reference material does not define return a capability error, and the
/// Nonlinear example defers to the dense oracle.
pub fn ground_truth(example: &Example, feature: usize) -> Result<GroundTruth> {
    let support = example.support(feature);
    match (example, feature) {
        (Example::Concept, 0) => Ok(closed(support, |z| 0.2 * (z + 1.0), |_| 0.0)),
        // The x2 slope is −5 or +5 with equal probability (sign of x3):
        // mean effect 0, heterogeneity 5.
        (Example::Concept, 1) => Ok(closed(support, |_| 0.0, |_| 5.0)),
        (Example::Concept, 2) => Ok(closed(support, |_| 0.0, |_| 0.0)),
        // The sinusoidal term is active only on the negative half; the x1·x2
        // contribution averages out (E[x2] = 0) but leaves its spread.
        (Example::Running, 0) => Ok(closed(
            support,
            |z| {
                if z < 0.0 {
                    -(2.0 * PI * z).sin()
                } else {
                    0.0
                }
            },
            |_| 2.0,
        )),
        (Example::Simulation { alpha: _, a1, a2 }, 0) => {
            let (a1, a2) = (*a1, *a2);
            let curve = simulation_ramp_curve(a1, a2, a1);
            // The interaction term α·x1·x3 has mean zero (x3 independent,
            // centered) and spread α·std(x3) = α/2.
            let alpha = match example {
                Example::Simulation { alpha, .. } => *alpha,
                _ => unreachable!(),
            };
            Ok(closed(support, curve, move |_| alpha * 0.5))
        }
        (Example::Simulation { alpha: _, a1, a2 }, 1) => {
            let (a1, a2) = (*a1, *a2);
            let curve = simulation_ramp_curve(a1, a2, a2);
            Ok(closed(support, curve, |_| 0.0))
        }
        (Example::Simulation { alpha, .. }, 2) => {
            let alpha = *alpha;
            if alpha == 0.0 {
                return Ok(closed(support, |_| 0.0, |_| 0.0));
            }
            // ∂f/∂x3 = α·x1 with x1 ~ U(0,1): mean α/2, spread α·std(x1).
            Ok(closed(
                support,
                move |z| alpha * 0.5 * z,
                move |_| alpha / 12.0_f64.sqrt(),
            ))
        }
        (Example::Piecewise, 0) => Ok(closed(
            support,
            // E[x2 | x1 = z] = z adds z to the slope, z²/2 to the curve.
            |z| piecewise_antiderivative(z) + 0.5 * z * z,
            |_| 0.5_f64.sqrt(),
        )),
        (Example::Nonlinear, f) if f < 2 => Ok(GroundTruth {
            source: GtSource::DenseOracle,
            support,
            effect: None,
            heterogeneity: None,
        }),
        _ => Err(Error::capability(format!(
            "no ground truth defined for example {example:?}, feature {feature}"
        ))),
    }
}

/// Dense fixed-size bin statistics on a fresh sample: the reference used
/// when benchmarking estimators. Bins span the feature's declared support
/// (sample range when unbounded) so the reference does not move with the
/// sample.
#[derive(Debug, Clone)]
pub struct OracleStats {
    pub partition: crate::binning::Partition,
    pub bins: Vec<BinStats>,
    pub n_dense: usize,
}

/// Default oracle sample size.
pub const ORACLE_N_DENSE: usize = 100_000;
/// Default oracle resolution.
pub const ORACLE_K_DENSE: usize = 200;

pub fn dense_oracle(
    spec: &GeneratorSpec,
    n_dense: usize,
    k_dense: usize,
    feature: usize,
) -> Result<OracleStats> {
    let oracle_spec = GeneratorSpec {
        n: n_dense,
        ..*spec
    };
    let ds = generate(&oracle_spec)?;
    let effects = local_effects_analytic(&ds.model, &ds.features, feature)?;
    let (lo, hi) = match spec.example.support(feature) {
        Some(bounds) => bounds,
        None => ds.features.feature_range(feature),
    };
    let partition = fixed_partition(lo, hi, k_dense)?;
    match compute_bin_stats(&effects, &partition) {
        Ok((bins, _)) => Ok(OracleStats {
            partition,
            bins,
            n_dense,
        }),
        Err(Error::EmptyBin { bin, .. }) => Err(Error::infeasible(format!(
            "dense bin {bin} received no samples; raise the sample count or lower the resolution"
        ))),
        Err(e) => Err(e),
    }
}
