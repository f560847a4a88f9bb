//! Image decoding and JSON manifests describing ranked sets and 2AFC triplets.
//!
//! A ranked manifest looks like
//!
//! ```json
//! { "entries": [ { "reference_path": "reference/1.png",
//!                  "candidates": [ { "algorithm": "mrf", "path": "synthetic/mrf/1.png" } ] } ] }
//! ```
//!
//! and a triplet manifest like
//!
//! ```json
//! { "entries": [ { "reference_path": "r.png", "s0_path": "a.png", "s1_path": "b.png", "q": 0 } ] }
//! ```
//!
//! Relative paths resolve against the manifest's own directory. A conventional
//! dataset layout is `photos/`, `reference/` and `synthetic/<algorithm>/` with
//! matching file names, but only the manifest is authoritative.

use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageReader};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScootError};
use crate::eval::{check_unique, ContentSet, RankedSet, Triplet};
use crate::image::GrayImage;
use crate::transforms::luma;

/// Decodes PNG, JPEG, binary PGM or BMP into gray. Colour goes through Rec.601
/// luma, alpha is dropped, and 16-bit samples keep their high byte.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(ScootError::NotFound(path.to_path_buf()))
        }
        Err(source) => {
            return Err(ScootError::Io {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    let format_err = |message: String| ScootError::Format {
        path: path.to_path_buf(),
        message,
    };
    let decoded = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| format_err(e.to_string()))?
        .decode()
        .map_err(|e| format_err(e.to_string()))?;
    to_gray_image(decoded).map_err(|e| format_err(e.to_string()))
}

fn to_gray_image(img: DynamicImage) -> Result<GrayImage> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels: Vec<u8> = match img {
        DynamicImage::ImageLuma8(b) => b.into_raw(),
        DynamicImage::ImageLumaA8(b) => b.into_raw().chunks_exact(2).map(|p| p[0]).collect(),
        DynamicImage::ImageLuma16(b) => b.into_raw().into_iter().map(|p| (p >> 8) as u8).collect(),
        DynamicImage::ImageLumaA16(b) => b
            .into_raw()
            .chunks_exact(2)
            .map(|p| (p[0] >> 8) as u8)
            .collect(),
        DynamicImage::ImageRgb8(b) => rgb_luma(b.as_raw(), 3),
        DynamicImage::ImageRgba8(b) => rgb_luma(b.as_raw(), 4),
        DynamicImage::ImageRgb16(b) => {
            let hi: Vec<u8> = b.as_raw().iter().map(|&p| (p >> 8) as u8).collect();
            rgb_luma(&hi, 3)
        }
        DynamicImage::ImageRgba16(b) => {
            let hi: Vec<u8> = b.as_raw().iter().map(|&p| (p >> 8) as u8).collect();
            rgb_luma(&hi, 4)
        }
        other => rgb_luma(other.to_rgb8().as_raw(), 3),
    };
    GrayImage::new(w, h, pixels)
}

fn rgb_luma(raw: &[u8], channels: usize) -> Vec<u8> {
    raw.chunks_exact(channels)
        .map(|p| luma(p[0], p[1], p[2]))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateEntry {
    pub algorithm: String,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankedEntry {
    pub reference_path: PathBuf,
    pub candidates: Vec<CandidateEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletEntry {
    pub reference_path: PathBuf,
    pub s0_path: PathBuf,
    pub s1_path: PathBuf,
    pub q: u8,
}

/// Reference sketches with competing synthetic sketches. Used by rank
/// stability, content capture and batch scoring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankedManifest {
    pub entries: Vec<RankedEntry>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletManifest {
    pub entries: Vec<TripletEntry>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn read_manifest<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(T, PathBuf)> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(ScootError::NotFound(path.to_path_buf()))
        }
        Err(source) => {
            return Err(ScootError::Io {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    let parsed = serde_json::from_str(&text).map_err(|e| ScootError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((parsed, base))
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn label(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn require_file(manifest: &Path, base: &Path, record: usize, p: &Path) -> Result<()> {
    let full = resolve(base, p);
    if !full.is_file() {
        return Err(ScootError::Validation {
            path: manifest.to_path_buf(),
            message: format!("entry {record}: image {} does not exist", full.display()),
        });
    }
    Ok(())
}

pub fn load_ranked_manifest(path: impl AsRef<Path>) -> Result<RankedManifest> {
    let path = path.as_ref();
    let (mut m, base): (RankedManifest, _) = read_manifest(path)?;
    m.base_dir = base;
    for (i, e) in m.entries.iter().enumerate() {
        let id = format!("entry {i}");
        check_unique(&id, e.candidates.iter().map(|c| c.algorithm.as_str())).map_err(|err| {
            ScootError::Validation {
                path: path.to_path_buf(),
                message: err.to_string(),
            }
        })?;
        require_file(path, &m.base_dir, i, &e.reference_path)?;
        for c in &e.candidates {
            require_file(path, &m.base_dir, i, &c.path)?;
        }
    }
    Ok(m)
}

pub fn load_triplet_manifest(path: impl AsRef<Path>) -> Result<TripletManifest> {
    let path = path.as_ref();
    let (mut m, base): (TripletManifest, _) = read_manifest(path)?;
    m.base_dir = base;
    for (i, e) in m.entries.iter().enumerate() {
        if e.q > 1 {
            return Err(ScootError::Validation {
                path: path.to_path_buf(),
                message: format!("entry {i}: q must be 0 or 1, got {}", e.q),
            });
        }
        for p in [&e.reference_path, &e.s0_path, &e.s1_path] {
            require_file(path, &m.base_dir, i, p)?;
        }
    }
    Ok(m)
}

impl RankedManifest {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        resolve(&self.base_dir, p)
    }

    fn load_entry(&self, e: &RankedEntry) -> Result<(GrayImage, Vec<(String, GrayImage)>)> {
        let reference = load_image(self.resolve(&e.reference_path))?;
        let candidates = e
            .candidates
            .iter()
            .map(|c| Ok((c.algorithm.clone(), load_image(self.resolve(&c.path))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok((reference, candidates))
    }

    /// Decodes every entry into a [`RankedSet`]; each needs at least two candidates.
    pub fn load_sets(&self) -> Result<Vec<RankedSet>> {
        self.entries
            .par_iter()
            .map(|e| {
                let (reference, candidates) = self.load_entry(e)?;
                RankedSet::new(label(&e.reference_path), reference, candidates)
            })
            .collect()
    }

    pub fn load_content_sets(&self) -> Result<Vec<ContentSet>> {
        self.entries
            .par_iter()
            .map(|e| {
                let (reference, outputs) = self.load_entry(e)?;
                Ok(ContentSet {
                    id: label(&e.reference_path),
                    reference,
                    outputs,
                })
            })
            .collect()
    }
}

impl TripletManifest {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        resolve(&self.base_dir, p)
    }

    pub fn load_triplets(&self) -> Result<Vec<Triplet>> {
        self.entries
            .par_iter()
            .enumerate()
            .map(|(i, e)| {
                Triplet::new(
                    format!("{i}:{}", label(&e.reference_path)),
                    load_image(self.resolve(&e.reference_path))?,
                    load_image(self.resolve(&e.s0_path))?,
                    load_image(self.resolve(&e.s1_path))?,
                    e.q,
                )
            })
            .collect()
    }
}

/// Writes an 8-bit binary PGM (P5).
pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    bytes.extend_from_slice(img.pixels());
    fs::write(path, bytes).map_err(|source| ScootError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_bytes_decode_verbatim() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.pgm");
        let mut bytes = b"P5 2 2 255\n".to_vec();
        bytes.extend_from_slice(&[0, 7, 200, 255]);
        fs::write(&p, bytes).unwrap();
        let img = load_image(&p).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.pixels(), &[0, 7, 200, 255]);
    }

    #[test]
    fn rgb_png_goes_through_luma() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("red.png");
        image::RgbImage::from_pixel(3, 2, image::Rgb([255, 0, 0]))
            .save(&p)
            .unwrap();
        let img = load_image(&p).unwrap();
        assert!(img.pixels().iter().all(|&v| v == 76));
    }

    #[test]
    fn sixteen_bit_keeps_high_byte() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("deep.png");
        image::ImageBuffer::<image::Luma<u16>, _>::from_raw(2, 1, vec![0x1234u16, 0xffff])
            .unwrap()
            .save(&p)
            .unwrap();
        assert_eq!(load_image(&p).unwrap().pixels(), &[0x12, 0xff]);
    }

    #[test]
    fn missing_and_garbage_files() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.png");
        assert!(matches!(load_image(&missing), Err(ScootError::NotFound(p)) if p == missing));
        let junk = dir.path().join("junk.png");
        fs::write(&junk, b"definitely not an image").unwrap();
        match load_image(&junk) {
            Err(e @ ScootError::Format { .. }) => assert!(e.to_string().contains("junk.png")),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn pgm_writer_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.pgm");
        let img = GrayImage::from_fn(5, 3, |x, y| (x * 40 + y) as u8).unwrap();
        save_pgm(&img, &p).unwrap();
        assert_eq!(load_image(&p).unwrap(), img);
    }
}
