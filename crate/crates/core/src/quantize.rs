//! Uniform tone quantization of 8-bit intensities into `levels` grades.

use crate::error::{Result, ScootError};
use crate::image::GrayImage;

pub const MIN_LEVELS: usize = 2;
pub const MAX_LEVELS: usize = 256;

/// Image of tone grades in `1..=levels`, row-major like [`GrayImage`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizedImage {
    width: usize,
    height: usize,
    levels: usize,
    grades: Vec<u16>,
}

impl QuantizedImage {
    /// Wraps an existing grade buffer after checking every invariant.
    pub fn new(width: usize, height: usize, levels: usize, grades: Vec<u16>) -> Result<Self> {
        check_levels(levels)?;
        if width == 0 || height == 0 || grades.len() != width * height {
            return Err(ScootError::invalid(format!(
                "grade buffer of {} entries does not match {width}x{height}",
                grades.len()
            )));
        }
        if let Some(&g) = grades.iter().find(|&&g| g == 0 || g as usize > levels) {
            return Err(ScootError::invalid(format!(
                "grade {g} outside 1..={levels}"
            )));
        }
        Ok(Self {
            width,
            height,
            levels,
            grades,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn levels(&self) -> usize {
        self.levels
    }

    #[inline]
    pub fn grades(&self) -> &[u16] {
        &self.grades
    }

    /// Grade at column `x`, row `y` (1-based grade value).
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.grades[y * self.width + x]
    }

    /// Copies the rectangle `[x0, x1) x [y0, y1)` into a new image.
    pub fn crop(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> Result<Self> {
        if x0 >= x1 || y0 >= y1 || x1 > self.width || y1 > self.height {
            return Err(ScootError::invalid(format!(
                "crop [{x0},{x1})x[{y0},{y1}) outside {}x{}",
                self.width, self.height
            )));
        }
        let mut grades = Vec::with_capacity((x1 - x0) * (y1 - y0));
        for y in y0..y1 {
            grades.extend_from_slice(&self.grades[y * self.width + x0..y * self.width + x1]);
        }
        Ok(Self {
            width: x1 - x0,
            height: y1 - y0,
            levels: self.levels,
            grades,
        })
    }
}

pub(crate) fn check_levels(levels: usize) -> Result<()> {
    if !(MIN_LEVELS..=MAX_LEVELS).contains(&levels) {
        return Err(ScootError::invalid(format!(
            "levels must be in {MIN_LEVELS}..={MAX_LEVELS}, got {levels}"
        )));
    }
    Ok(())
}

/// Grade of a single intensity: `floor(p * levels / 256) + 1`.
#[inline]
pub fn grade_of(p: u8, levels: usize) -> u16 {
    ((p as usize * levels) / 256 + 1).min(levels) as u16
}

/// Bins `[0, 255]` into `levels` equal-width grades numbered from 1.
pub fn quantize(img: &GrayImage, levels: usize) -> Result<QuantizedImage> {
    check_levels(levels)?;
    let mut lut = [0u16; 256];
    for (p, slot) in lut.iter_mut().enumerate() {
        *slot = grade_of(p as u8, levels);
    }
    Ok(QuantizedImage {
        width: img.width(),
        height: img.height(),
        levels,
        grades: img.pixels().iter().map(|&p| lut[p as usize]).collect(),
    })
}
