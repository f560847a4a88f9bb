//! Deterministic perturbations used by the meta-measures.
//!
//! Every transform samples existing pixels (nearest neighbour) or writes a
//! fill value, so no new gray tones are ever introduced.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScootError};
use crate::image::GrayImage;

/// Background intensity of a blank page.
pub const WHITE: u8 = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrokeKeep {
    /// Keep pixels at or above the threshold; darker strokes become white.
    Light,
    /// Keep pixels below the threshold; lighter content becomes white.
    Dark,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "amount", rename_all = "snake_case")]
pub enum TransformSpec {
    Downsize(usize),
    Rotate(f64),
    LightStrokes(u16),
    DarkStrokes(u16),
}

impl TransformSpec {
    pub fn apply(&self, img: &GrayImage) -> Result<GrayImage> {
        match *self {
            TransformSpec::Downsize(px) => downsize_nn(img, px),
            TransformSpec::Rotate(deg) => {
                if !(deg > -360.0 && deg < 360.0) {
                    return Err(ScootError::invalid(format!(
                        "rotation {deg} degrees outside (-360, 360)"
                    )));
                }
                Ok(rotate(img, deg, WHITE))
            }
            TransformSpec::LightStrokes(t) => Ok(threshold_strokes(img, t, StrokeKeep::Light)),
            TransformSpec::DarkStrokes(t) => Ok(threshold_strokes(img, t, StrokeKeep::Dark)),
        }
    }
}

/// Nearest-neighbour resample to `width x height`. Destination pixel `x` reads
/// source column `round(x * W / width)`, clamped to the last column.
pub fn resize_nn(img: &GrayImage, width: usize, height: usize) -> Result<GrayImage> {
    if width == 0 || height == 0 {
        return Err(ScootError::invalid(format!(
            "resize target {width}x{height} must be positive"
        )));
    }
    if width == img.width() && height == img.height() {
        return Ok(img.clone());
    }
    let cols: Vec<usize> = (0..width)
        .map(|x| nearest_source(x, img.width(), width))
        .collect();
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        let sy = nearest_source(y, img.height(), height);
        let row = &img.pixels()[sy * img.width()..(sy + 1) * img.width()];
        pixels.extend(cols.iter().map(|&sx| row[sx]));
    }
    GrayImage::new(width, height, pixels)
}

// round(i * src / dst) with halves rounded up, in integer arithmetic
#[inline]
fn nearest_source(i: usize, src: usize, dst: usize) -> usize {
    ((2 * i * src + dst) / (2 * dst)).min(src - 1)
}

/// Shrinks both dimensions by `pixels` using nearest-neighbour sampling.
pub fn downsize_nn(img: &GrayImage, pixels: usize) -> Result<GrayImage> {
    if pixels >= img.width().min(img.height()) {
        return Err(ScootError::invalid(format!(
            "cannot downsize {}x{} by {pixels} pixels",
            img.width(),
            img.height()
        )));
    }
    resize_nn(img, img.width() - pixels, img.height() - pixels)
}

/// Rotates counter-clockwise (as displayed) about the image centre, keeping the
/// original canvas. Samples that map outside the source take `fill`.
pub fn rotate(img: &GrayImage, degrees_ccw: f64, fill: u8) -> GrayImage {
    if degrees_ccw == 0.0 {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    let theta = degrees_ccw.to_radians();
    let (sin, cos) = theta.sin_cos();
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let ry = y as f64 - cy;
        for x in 0..w {
            let rx = x as f64 - cx;
            // inverse map: with y pointing down, a visual CCW turn is
            // x' = cx + rx cos + ry sin, y' = cy - rx sin + ry cos
            let sx = (cx + rx * cos - ry * sin).round();
            let sy = (cy + rx * sin + ry * cos).round();
            if sx >= 0.0 && sy >= 0.0 && (sx as usize) < w && (sy as usize) < h {
                out.push(img.get(sx as usize, sy as usize));
            } else {
                out.push(fill);
            }
        }
    }
    GrayImage::new(w, h, out).expect("rotation preserves dimensions")
}

/// Splits a sketch into lighter or darker strokes around `threshold`.
/// Thresholds above 255 place every pixel below the threshold.
pub fn threshold_strokes(img: &GrayImage, threshold: u16, keep: StrokeKeep) -> GrayImage {
    match keep {
        StrokeKeep::Light => img.map(|p| if (p as u16) < threshold { WHITE } else { p }),
        StrokeKeep::Dark => img.map(|p| if (p as u16) >= threshold { WHITE } else { p }),
    }
}

/// Rec.601 luma of one RGB triple, rounded half up.
#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    // weights scaled by 1000; +500 rounds the quotient half up
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Converts interleaved 8-bit RGB to gray.
pub fn to_gray(width: usize, height: usize, rgb: &[u8]) -> Result<GrayImage> {
    if rgb.len() != width * height * 3 {
        return Err(ScootError::invalid(format!(
            "rgb buffer has {} bytes, expected {}",
            rgb.len(),
            width * height * 3
        )));
    }
    let pixels = rgb
        .chunks_exact(3)
        .map(|px| luma(px[0], px[1], px[2]))
        .collect();
    GrayImage::new(width, height, pixels)
}
