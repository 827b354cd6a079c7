//! Robust accumulated local effects with heterogeneity-aware variable-width
//! binning.
//!
//! The estimator aggregates instance-level derivatives of a model into
//! per-bin means and standard deviations, then accumulates them into a
//! feature effect curve with an uncertainty envelope. Bin limits come from
//! either a fixed equal-width partition or a dynamic-programming search that
//! trades per-bin homogeneity against sample support.
//!
//! # Quick start
//!
//! ```
//! use rhale::binning::BinningConfig;
//! use rhale::estimator::{rhale, Binning};
//! use rhale::synthetic::{generate, Example, GeneratorSpec};
//!
//! let spec = GeneratorSpec { example: Example::Running, n: 500, seed: 7 };
//! let data = generate(&spec).unwrap();
//! let result = rhale(
//!     &data.features,
//!     &data.model,
//!     0,
//!     &BinningConfig::default(),
//!     &Binning::Auto,
//! )
//! .unwrap();
//! assert!(result.partition.n_bins() >= 1);
//! let (lo, hi) = (result.partition.lower(), result.partition.upper());
//! assert!(result.value_at(0.5 * (lo + hi)).is_ok());
//! ```
//!
//! # Modules
//!
//! - [`data`]: row-major feature matrix with validation.
//! - [`model`]: the [`model::Model`] trait, closure-backed models, and
//!   instance-level effect extraction (analytic or finite-difference).
//! - [`binning`]: partitions, the bin cost, and the optimal partition search
//!   (dynamic program plus an exhaustive cross-check).
//! - [`estimator`]: per-bin statistics, the accumulated effect and its
//!   deviation envelope, centering, and a two-level heterogeneity
//!   decomposition.
//! - [`baselines`]: PDP, ICE, and the classic fixed-bin ALE estimator.
//! - [`synthetic`]: seeded example generators with closed-form ground
//!   truths and a dense oracle.
//! - [`evaluation`]: benchmark harness sweeping fixed bin counts against
//!   the automatic partition, with error metrics against ground truth.
//! - [`io`]: CSV and JSON readers/writers for datasets, effects, and
//!   benchmark reports.
//! - [`report`]: SVG figures.

pub mod baselines;
pub mod binning;
pub mod data;
pub mod error;
pub mod estimator;
pub mod evaluation;
pub mod io;
pub mod model;
pub mod report;
pub mod synthetic;

pub use binning::{BinningConfig, Partition};
pub use data::FeatureMatrix;
pub use error::{Error, Result};
pub use estimator::{rhale, Binning, EffectResult, Explainer};
pub use model::{ClosureModel, LocalEffects, Model};
pub use synthetic::{generate, Example, GeneratorSpec};
