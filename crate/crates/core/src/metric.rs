//! Block-grid feature assembly and the Scoot similarity score.
//!
//! A sketch is quantized, cut into a `k x k` grid, and each block contributes
//! the selected co-occurrence statistics for every direction. The per-direction
//! vectors are averaged and two sketches are compared by
//! `1 / (1 + ||psi(x) - psi(y)||_2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScootError};
use crate::glcm::{accumulate_region, normalize_in_place, CoMatrix, Direction};
use crate::image::GrayImage;
use crate::quantize::{check_levels, quantize, QuantizedImage};
use crate::stats::StatSet;
use crate::transforms::resize_nn;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScootConfig {
    /// Blocks per side of the spatial grid.
    pub grid_k: usize,
    /// Number of tone grades.
    pub levels: usize,
    pub directions: Vec<Direction>,
    pub stats: StatSet,
}

impl Default for ScootConfig {
    fn default() -> Self {
        Self {
            grid_k: 4,
            levels: 6,
            directions: Direction::default_set(),
            stats: StatSet::CE,
        }
    }
}

impl ScootConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_k == 0 {
            return Err(ScootError::invalid("grid_k must be at least 1"));
        }
        check_levels(self.levels)?;
        if self.directions.is_empty() {
            return Err(ScootError::invalid("at least one direction is required"));
        }
        for d in &self.directions {
            Direction::new(d.dx, d.dy)?;
        }
        if self.stats.is_empty() {
            return Err(ScootError::invalid("at least one statistic is required"));
        }
        Ok(())
    }

    /// Length of every feature vector produced under this configuration.
    pub fn feature_len(&self) -> usize {
        self.stats.len() * self.grid_k * self.grid_k
    }

    /// Quantizes `img` and returns its direction-averaged feature vector.
    pub fn features(&self, img: &GrayImage) -> Result<FeatureVector> {
        self.validate()?;
        direction_average(&quantize(img, self.levels)?, self)
    }

    pub fn score(&self, synthetic: &GrayImage, reference: &GrayImage) -> Result<f64> {
        scoot_score(synthetic, reference, self)
    }
}

/// Flat feature vector, block-major (row-major over blocks) and statistic-minor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn distance(&self, other: &FeatureVector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Half-open pixel ranges `[x0, x1) x [y0, y1)` of each block, row-major.
/// Boundaries sit at `floor(i * dim / k)`, so blocks tile the image exactly.
pub fn block_bounds(
    width: usize,
    height: usize,
    k: usize,
) -> Result<Vec<(usize, usize, usize, usize)>> {
    if k == 0 {
        return Err(ScootError::invalid("grid_k must be at least 1"));
    }
    if width < k || height < k {
        return Err(ScootError::invalid(format!(
            "{width}x{height} image is too small for a {k}x{k} grid"
        )));
    }
    let xb: Vec<usize> = (0..=k).map(|c| c * width / k).collect();
    let yb: Vec<usize> = (0..=k).map(|r| r * height / k).collect();
    let mut out = Vec::with_capacity(k * k);
    for r in 0..k {
        for c in 0..k {
            out.push((xb[c], yb[r], xb[c + 1], yb[r + 1]));
        }
    }
    Ok(out)
}

/// Cuts `q` into `k * k` blocks in row-major block order.
pub fn split_blocks(q: &QuantizedImage, k: usize) -> Result<Vec<QuantizedImage>> {
    block_bounds(q.width(), q.height(), k)?
        .into_iter()
        .map(|(x0, y0, x1, y1)| q.crop(x0, y0, x1, y1))
        .collect()
}

/// Statistics of every block for one direction. Blocks with no valid pixel
/// pairs contribute 0 for every statistic.
pub fn feature_vector(
    q: &QuantizedImage,
    cfg: &ScootConfig,
    d: Direction,
) -> Result<FeatureVector> {
    let mut values = vec![0.0; cfg.feature_len()];
    accumulate_features(q, cfg, &[d], &mut values)?;
    Ok(FeatureVector { values })
}

/// Element-wise mean of [`feature_vector`] over `cfg.directions`.
pub fn direction_average(q: &QuantizedImage, cfg: &ScootConfig) -> Result<FeatureVector> {
    if cfg.directions.is_empty() {
        return Err(ScootError::invalid("at least one direction is required"));
    }
    let mut values = vec![0.0; cfg.feature_len()];
    accumulate_features(q, cfg, &cfg.directions, &mut values)?;
    let t = cfg.directions.len() as f64;
    values.iter_mut().for_each(|v| *v /= t);
    Ok(FeatureVector { values })
}

// Adds the per-direction statistic vectors into `out`, direction by direction,
// so the sum order matches summing whole vectors.
fn accumulate_features(
    q: &QuantizedImage,
    cfg: &ScootConfig,
    directions: &[Direction],
    out: &mut [f64],
) -> Result<()> {
    if q.levels() != cfg.levels {
        return Err(ScootError::invalid(format!(
            "image quantized to {} levels but config expects {}",
            q.levels(),
            cfg.levels
        )));
    }
    let bounds = block_bounds(q.width(), q.height(), cfg.grid_k)?;
    let p = cfg.stats.len();
    let mut m = CoMatrix::zeros(q.levels());
    for &d in directions {
        for (b, &(x0, y0, x1, y1)) in bounds.iter().enumerate() {
            m.clear();
            accumulate_region(q, x0, y0, x1, y1, d, true, &mut m);
            normalize_in_place(&mut m);
            let slot = &mut out[b * p..(b + 1) * p];
            if m.is_degenerate() {
                // adding 0.0 keeps the slot unchanged
                continue;
            }
            for (v, s) in slot.iter_mut().zip(cfg.stats.iter()) {
                *v += s.evaluate(&m);
            }
        }
    }
    Ok(())
}

/// Similarity in `(0, 1]` between a synthetic sketch and its reference.
/// A synthetic sketch of different size is first resized to the reference's
/// dimensions by nearest-neighbour sampling.
pub fn scoot_score(synthetic: &GrayImage, reference: &GrayImage, cfg: &ScootConfig) -> Result<f64> {
    cfg.validate()?;
    for img in [synthetic, reference] {
        if img.width() < cfg.grid_k || img.height() < cfg.grid_k {
            return Err(ScootError::invalid(format!(
                "{}x{} image is too small for a {k}x{k} grid",
                img.width(),
                img.height(),
                k = cfg.grid_k
            )));
        }
    }
    let resized;
    let synthetic =
        if synthetic.width() != reference.width() || synthetic.height() != reference.height() {
            resized = resize_nn(synthetic, reference.width(), reference.height())?;
            &resized
        } else {
            synthetic
        };
    let fx = cfg.features(synthetic)?;
    let fy = cfg.features(reference)?;
    Ok(1.0 / (1.0 + fx.distance(&fy)))
}

/// Anything that scores a synthetic sketch against a reference, higher meaning closer.
///
/// Implementations must be safe to call from several threads at once.
pub trait Metric: Sync {
    fn score(&self, synthetic: &GrayImage, reference: &GrayImage) -> Result<f64>;
}

impl Metric for ScootConfig {
    fn score(&self, synthetic: &GrayImage, reference: &GrayImage) -> Result<f64> {
        scoot_score(synthetic, reference, self)
    }
}

impl<F> Metric for F
where
    F: Fn(&GrayImage, &GrayImage) -> f64 + Sync,
{
    fn score(&self, synthetic: &GrayImage, reference: &GrayImage) -> Result<f64> {
        Ok(self(synthetic, reference))
    }
}
