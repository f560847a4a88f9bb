//! Scalar texture statistics of a normalized co-occurrence matrix.
//!
//! Grades are 1-based, but every statistic depends only on `|i - j|`, so the
//! 0-based storage index gives the same result.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ScootError;
use crate::glcm::CoMatrix;

/// `sum m[i][j] / (1 + |i - j|)`.
pub fn homogeneity(m: &CoMatrix) -> f64 {
    fold_cells(m, |m_ij, diff| m_ij / (1.0 + diff))
}

/// `sum |i - j|^2 * m[i][j]`.
pub fn contrast(m: &CoMatrix) -> f64 {
    fold_cells(m, |m_ij, diff| diff * diff * m_ij)
}

/// `sum m[i][j]^2`.
pub fn energy(m: &CoMatrix) -> f64 {
    m.cells().iter().map(|&c| c * c).sum()
}

#[inline]
fn fold_cells(m: &CoMatrix, term: impl Fn(f64, f64) -> f64) -> f64 {
    let n = m.levels();
    let cells = m.cells();
    let mut acc = 0.0;
    for i in 0..n {
        let row = &cells[i * n..(i + 1) * n];
        for (j, &c) in row.iter().enumerate() {
            if c != 0.0 {
                acc += term(c, i.abs_diff(j) as f64);
            }
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    Homogeneity,
    Contrast,
    Energy,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [
        Statistic::Homogeneity,
        Statistic::Contrast,
        Statistic::Energy,
    ];

    pub fn evaluate(self, m: &CoMatrix) -> f64 {
        match self {
            Statistic::Homogeneity => homogeneity(m),
            Statistic::Contrast => contrast(m),
            Statistic::Energy => energy(m),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Statistic::Homogeneity => 'H',
            Statistic::Contrast => 'C',
            Statistic::Energy => 'E',
        }
    }
}

/// Non-empty subset of statistics, always iterated as homogeneity, contrast, energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StatSet {
    mask: u8,
}

impl StatSet {
    /// Contrast and energy.
    pub const CE: StatSet = StatSet { mask: 0b110 };
    pub const HCE: StatSet = StatSet { mask: 0b111 };

    pub fn from_stats(stats: &[Statistic]) -> Result<Self, ScootError> {
        let mask = stats.iter().fold(0u8, |acc, &s| acc | Self::bit(s));
        if mask == 0 {
            return Err(ScootError::invalid("at least one statistic is required"));
        }
        Ok(Self { mask })
    }

    fn bit(s: Statistic) -> u8 {
        match s {
            Statistic::Homogeneity => 0b001,
            Statistic::Contrast => 0b010,
            Statistic::Energy => 0b100,
        }
    }

    pub fn contains(self, s: Statistic) -> bool {
        self.mask & Self::bit(s) != 0
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Statistic> {
        Statistic::ALL
            .into_iter()
            .filter(move |&s| self.contains(s))
    }

    /// The seven feature combinations of the ablation study.
    pub fn all_combinations() -> Vec<StatSet> {
        (1u8..8).map(|mask| StatSet { mask }).collect()
    }
}

impl Default for StatSet {
    fn default() -> Self {
        StatSet::CE
    }
}

impl fmt::Display for StatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.iter() {
            write!(f, "{}", s.letter())?;
        }
        Ok(())
    }
}

impl FromStr for StatSet {
    type Err = ScootError;

    /// Parses letters from `{H, C, E}` in any order and case, e.g. `"CE"` or `"hec"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut stats = Vec::new();
        for ch in s.chars() {
            stats.push(match ch.to_ascii_uppercase() {
                'H' => Statistic::Homogeneity,
                'C' => Statistic::Contrast,
                'E' => Statistic::Energy,
                ',' | ' ' => continue,
                other => {
                    return Err(ScootError::invalid(format!(
                        "unknown statistic '{other}', expected letters from H, C, E"
                    )))
                }
            });
        }
        StatSet::from_stats(&stats)
    }
}

impl Serialize for StatSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StatSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
