#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scoot_core::GrayImage;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random image mixing flat patches, gradients and noise so every grade shows up.
pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    let style = rng.gen_range(0..3);
    let base: u8 = rng.gen();
    let patch = rng.gen_range(1..6);
    let mut patches = vec![0u8; (w / patch + 1) * (h / patch + 1)];
    patches.iter_mut().for_each(|p| *p = rng.gen());
    GrayImage::from_fn(w, h, |x, y| match style {
        0 => rng.gen(),
        1 => patches[(y / patch) * (w / patch + 1) + x / patch],
        _ => base
            .wrapping_add((x * 7 + y * 3) as u8)
            .wrapping_add(rng.gen_range(0..40)),
    })
    .unwrap()
}

/// Independent pair enumeration over every pixel and every offset partner.
pub fn brute_force_glcm(
    grades: &[u16],
    w: usize,
    h: usize,
    levels: usize,
    dx: i32,
    dy: i32,
    symmetric: bool,
) -> Vec<u64> {
    let mut counts = vec![0u64; levels * levels];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            for y2 in 0..h as i64 {
                for x2 in 0..w as i64 {
                    if x2 - x != dx as i64 || y2 - y != dy as i64 {
                        continue;
                    }
                    let a = grades[(y as usize) * w + x as usize] as usize - 1;
                    let b = grades[(y2 as usize) * w + x2 as usize] as usize - 1;
                    counts[a * levels + b] += 1;
                    if symmetric {
                        counts[b * levels + a] += 1;
                    }
                }
            }
        }
    }
    counts
}

/// Spearman rho by pairwise rank counting and the raw-moment Pearson formula.
pub fn oracle_spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|&x| {
                let below = v.iter().filter(|&&y| y < x).count() as f64;
                let equal = v.iter().filter(|&&y| y == x).count() as f64;
                below + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (ra, rb) = (rank(a), rank(b));
    let n = ra.len() as f64;
    let sx: f64 = ra.iter().sum();
    let sy: f64 = rb.iter().sum();
    let sxx: f64 = ra.iter().map(|x| x * x).sum();
    let syy: f64 = rb.iter().map(|y| y * y).sum();
    let sxy: f64 = ra.iter().zip(&rb).map(|(x, y)| x * y).sum();
    let vx = n * sxx - sx * sx;
    let vy = n * syy - sy * sy;
    if vx.abs() < 1e-9 || vy.abs() < 1e-9 {
        return None;
    }
    Some((n * sxy - sx * sy) / (vx * vy).sqrt())
}

/// Intensity range `[lo, hi]` of every grade, from a scan over all 256 values.
pub fn bin_ranges(levels: usize) -> Vec<(u8, u8)> {
    let mut ranges: Vec<Option<(u8, u8)>> = vec![None; levels];
    for p in 0..=255u8 {
        let g = (p as usize * levels) / 256;
        ranges[g] = Some(match ranges[g] {
            None => (p, p),
            Some((lo, _)) => (lo, p),
        });
    }
    ranges.into_iter().map(|r| r.unwrap()).collect()
}
