//! Scoot: a perceptual similarity metric for facial sketches built from
//! block-grid gray-level co-occurrence statistics, plus the meta-measures used
//! to evaluate sketch similarity metrics.
//!
//! ```
//! use scoot_core::{scoot_score, GrayImage, ScootConfig};
//!
//! let reference = GrayImage::from_fn(64, 64, |x, y| ((x ^ y) * 4) as u8).unwrap();
//! let score = scoot_score(&reference, &reference, &ScootConfig::default()).unwrap();
//! assert_eq!(score, 1.0);
//! ```

pub mod dataset;
pub mod error;
pub mod eval;
pub mod glcm;
pub mod image;
pub mod metric;
pub mod quantize;
pub mod report;
pub mod stats;
pub mod synthetic;
pub mod transforms;

pub use error::{Result, ScootError};
pub use eval::{
    run_judgment, run_mm1, run_mm2, run_mm3, spearman_theta, ContentSet, MetaResult, RankedSet,
    Triplet,
};
pub use glcm::{co_occurrence, normalize, CoMatrix, Direction};
pub use image::GrayImage;
pub use metric::{
    direction_average, feature_vector, scoot_score, split_blocks, FeatureVector, Metric,
    ScootConfig,
};
pub use quantize::{quantize, QuantizedImage};
pub use stats::{contrast, energy, homogeneity, StatSet, Statistic};
