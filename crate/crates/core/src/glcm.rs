//! Directional gray-level co-occurrence matrices.
//!
//! Offsets follow image coordinates: `dx` moves right along a row, `dy` moves
//! down to the next row. A pixel at `(x, y)` is paired with `(x + dx, y + dy)`;
//! pairs whose partner falls outside the image (or block) are skipped.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScootError};
use crate::quantize::QuantizedImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction {
    pub dx: i32,
    pub dy: i32,
}

impl Direction {
    pub fn new(dx: i32, dy: i32) -> Result<Self> {
        if dx == 0 && dy == 0 {
            return Err(ScootError::invalid(
                "direction (0, 0) pairs a pixel with itself",
            ));
        }
        if dx.abs() > 1 || dy.abs() > 1 {
            return Err(ScootError::invalid(format!(
                "direction ({dx}, {dy}) is not a unit-distance neighbour"
            )));
        }
        Ok(Self { dx, dy })
    }

    /// The four orientations used by default: 90, 135, 180 and 225 degrees.
    pub fn default_set() -> Vec<Direction> {
        vec![
            Direction { dx: 0, dy: 1 },
            Direction { dx: -1, dy: 1 },
            Direction { dx: -1, dy: 0 },
            Direction { dx: -1, dy: -1 },
        ]
    }

    /// All eight unit-distance neighbour offsets.
    pub fn all_neighbours() -> Vec<Direction> {
        let mut out = Vec::with_capacity(8);
        for dy in -1..=1 {
            for dx in -1..=1 {
                if dx != 0 || dy != 0 {
                    out.push(Direction { dx, dy });
                }
            }
        }
        out
    }

    pub fn opposite(self) -> Direction {
        Direction {
            dx: -self.dx,
            dy: -self.dy,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.dx, self.dy)
    }
}

/// `levels x levels` matrix of pair frequencies. Indexed by 1-based grades.
#[derive(Clone, Debug, PartialEq)]
pub struct CoMatrix {
    levels: usize,
    cells: Vec<f64>,
    degenerate: bool,
}

impl CoMatrix {
    pub fn zeros(levels: usize) -> Self {
        Self {
            levels,
            cells: vec![0.0; levels * levels],
            degenerate: false,
        }
    }

    /// Builds a matrix from row-major cells (row = first grade).
    pub fn from_cells(levels: usize, cells: Vec<f64>) -> Result<Self> {
        if cells.len() != levels * levels {
            return Err(ScootError::invalid(format!(
                "{} cells do not form a {levels}x{levels} matrix",
                cells.len()
            )));
        }
        if cells.iter().any(|&c| !c.is_finite() || c < 0.0) {
            return Err(ScootError::invalid(
                "co-occurrence cells must be finite and non-negative",
            ));
        }
        Ok(Self {
            levels,
            cells,
            degenerate: false,
        })
    }

    #[inline]
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Row-major cells; entry `(i-1) * levels + (j-1)` holds grade pair `(i, j)`.
    #[inline]
    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    /// Value for grades `i`, `j` in `1..=levels`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cells[(i - 1) * self.levels + (j - 1)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.cells[(i - 1) * self.levels + (j - 1)] = value;
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    /// Set by [`normalize`] when the matrix held no pairs at all.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.levels;
        (0..n).all(|i| (0..i).all(|j| self.cells[i * n + j] == self.cells[j * n + i]))
    }

    pub(crate) fn clear(&mut self) {
        self.cells.iter_mut().for_each(|c| *c = 0.0);
        self.degenerate = false;
    }
}

/// Raw pair counts over the whole image.
pub fn co_occurrence(q: &QuantizedImage, d: Direction, symmetric: bool) -> CoMatrix {
    let mut m = CoMatrix::zeros(q.levels());
    accumulate_region(q, 0, 0, q.width(), q.height(), d, symmetric, &mut m);
    m
}

/// Adds pair counts for the rectangle `[x0, x1) x [y0, y1)` of `q` into `m`.
/// Partners are restricted to the same rectangle.
#[allow(clippy::too_many_arguments)]
pub(crate) fn accumulate_region(
    q: &QuantizedImage,
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
    d: Direction,
    symmetric: bool,
    m: &mut CoMatrix,
) {
    let n = m.levels;
    debug_assert_eq!(n, q.levels());
    let (dx, dy) = (d.dx as isize, d.dy as isize);
    // a pixel has an in-bounds partner iff it sits inside this shrunken range
    let xs = (x0 as isize + (-dx).max(0)) as usize;
    let xe = (x1 as isize - dx.max(0)).max(xs as isize) as usize;
    let ys = (y0 as isize + (-dy).max(0)) as usize;
    let ye = (y1 as isize - dy.max(0)).max(ys as isize) as usize;
    if xs >= xe || ys >= ye {
        return;
    }

    let w = q.width();
    let grades = q.grades();
    let offset = dy * w as isize + dx;
    let cells = &mut m.cells;
    for y in ys..ye {
        let row = y * w;
        for idx in row + xs..row + xe {
            let a = grades[idx] as usize - 1;
            let b = grades[(idx as isize + offset) as usize] as usize - 1;
            cells[a * n + b] += 1.0;
            if symmetric {
                cells[b * n + a] += 1.0;
            }
        }
    }
}

/// Divides every cell by the grand total. An all-zero matrix comes back
/// unchanged with its degenerate flag set.
pub fn normalize(mut m: CoMatrix) -> CoMatrix {
    normalize_in_place(&mut m);
    m
}

pub(crate) fn normalize_in_place(m: &mut CoMatrix) {
    let total = m.total();
    if total == 0.0 {
        m.degenerate = true;
        return;
    }
    m.degenerate = false;
    m.cells.iter_mut().for_each(|c| *c /= total);
}
