//! Procedural face-sketch fixtures and distortion families.
//!
//! The generator draws a pencil-style face (outline, hatched hair, eyes,
//! brows, nose, mouth, cheek shading) on a white page from a seed, so tests and
//! demos can run the full evaluation pipeline without a licensed dataset.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{
    save_pgm, CandidateEntry, RankedEntry, RankedManifest, TripletEntry, TripletManifest,
};
use crate::error::{Result, ScootError};
use crate::image::GrayImage;
use crate::report::write_atomic;
use crate::transforms::WHITE;

pub const SKETCH_WIDTH: usize = 200;
pub const SKETCH_HEIGHT: usize = 250;

struct Canvas {
    w: usize,
    h: usize,
    px: Vec<f32>,
}

impl Canvas {
    fn new(w: usize, h: usize) -> Self {
        Self {
            w,
            h,
            px: vec![WHITE as f32; w * h],
        }
    }

    // darkens towards `tone`, never lightens
    fn ink(&mut self, x: i64, y: i64, tone: f32) {
        if x < 0 || y < 0 || x as usize >= self.w || y as usize >= self.h {
            return;
        }
        let p = &mut self.px[y as usize * self.w + x as usize];
        if tone < *p {
            *p = tone;
        }
    }

    fn dot(&mut self, x: f64, y: f64, radius: f64, tone: f32) {
        let r = radius.ceil() as i64;
        let (cx, cy) = (x.round() as i64, y.round() as i64);
        for yy in cy - r..=cy + r {
            for xx in cx - r..=cx + r {
                let (ddx, ddy) = (xx as f64 - x, yy as f64 - y);
                if ddx * ddx + ddy * ddy <= radius * radius {
                    self.ink(xx, yy, tone);
                }
            }
        }
    }

    fn line(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, width: f64, tone: f32) {
        let steps = ((x1 - x0).abs().max((y1 - y0).abs()) * 2.0).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            self.dot(x0 + (x1 - x0) * t, y0 + (y1 - y0) * t, width / 2.0, tone);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn arc(
        &mut self,
        cx: f64,
        cy: f64,
        rx: f64,
        ry: f64,
        from: f64,
        to: f64,
        width: f64,
        tone: f32,
    ) {
        let steps = ((rx.max(ry) * (to - from).abs()) * 2.0).ceil().max(2.0) as usize;
        for s in 0..=steps {
            let a = from + (to - from) * s as f64 / steps as f64;
            self.dot(cx + rx * a.cos(), cy + ry * a.sin(), width / 2.0, tone);
        }
    }

    fn finish(self, rng: &mut ChaCha8Rng, grain: f32) -> GrayImage {
        let px = self
            .px
            .into_iter()
            .map(|p| {
                (p + rng.gen_range(-grain..=grain))
                    .round()
                    .clamp(0.0, 255.0) as u8
            })
            .collect();
        GrayImage::new(self.w, self.h, px).expect("canvas dimensions")
    }
}

/// Draws one deterministic face sketch of `SKETCH_WIDTH x SKETCH_HEIGHT`.
pub fn face_sketch(seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (SKETCH_WIDTH, SKETCH_HEIGHT);
    let mut c = Canvas::new(w, h);
    let two_pi = std::f64::consts::TAU;

    let cx = w as f64 / 2.0 + rng.gen_range(-8.0..8.0);
    let cy = h as f64 * 0.55 + rng.gen_range(-8.0..8.0);
    let rx = rng.gen_range(58.0..70.0);
    let ry = rng.gen_range(78.0..92.0);

    // hair: dense directional hatching over the crown
    let hair_angle: f64 = rng.gen_range(1.1..2.0);
    let hair_tone_base = rng.gen_range(40.0..90.0) as f32;
    let hair_top = cy - ry - rng.gen_range(12.0..25.0);
    let hair_bottom = cy - ry * rng.gen_range(0.35..0.55);
    for _ in 0..rng.gen_range(450..650) {
        let hx = cx + rng.gen_range(-rx * 1.15..rx * 1.15);
        let hy = rng.gen_range(hair_top..hair_bottom);
        let nx = (hx - cx) / (rx * 1.15);
        let ny = (hy - (cy - ry * 0.4)) / (ry * 0.7);
        if nx * nx + ny * ny > 1.0 {
            continue;
        }
        let len = rng.gen_range(8.0..22.0);
        let a = hair_angle + rng.gen_range(-0.25..0.25);
        let tone = hair_tone_base + rng.gen_range(0.0..60.0);
        c.line(hx, hy, hx + len * a.cos(), hy + len * a.sin(), 1.2, tone);
    }

    // face outline
    c.arc(cx, cy, rx, ry, 0.0, two_pi, 2.5, rng.gen_range(50.0..90.0));

    // brows and eyes
    let eye_y = cy - ry * 0.15;
    let eye_dx = rx * 0.42;
    for side in [-1.0, 1.0] {
        let ex = cx + side * eye_dx;
        c.arc(
            ex,
            eye_y - 12.0,
            14.0,
            5.0,
            3.5,
            5.9,
            3.5,
            rng.gen_range(30.0..60.0),
        );
        c.arc(
            ex,
            eye_y,
            10.0,
            4.5,
            0.0,
            two_pi,
            1.8,
            rng.gen_range(40.0..80.0),
        );
        c.dot(ex, eye_y, 3.0, rng.gen_range(10.0..40.0));
    }

    // nose and mouth
    let nose_top = eye_y + 8.0;
    let nose_tip = cy + ry * 0.3;
    c.line(cx - 3.0, nose_top, cx - 7.0, nose_tip, 1.6, 110.0);
    c.arc(cx, nose_tip, 9.0, 4.0, 0.2, 2.9, 1.8, 90.0);
    let mouth_y = cy + ry * 0.55;
    c.arc(
        cx,
        mouth_y - 6.0,
        20.0,
        8.0,
        0.4,
        2.7,
        2.4,
        rng.gen_range(50.0..90.0),
    );

    // cheek shading: light parallel hatches
    for side in [-1.0, 1.0] {
        let sx = cx + side * rx * 0.62;
        for k in 0..rng.gen_range(8..14) {
            let off = k as f64 * 3.0;
            c.line(
                sx - 6.0 + off * 0.3,
                eye_y + 18.0 + off,
                sx + 6.0 + off * 0.3,
                eye_y + 10.0 + off,
                1.0,
                rng.gen_range(150.0..190.0),
            );
        }
    }

    // neck and shoulders
    c.line(
        cx - rx * 0.45,
        cy + ry * 0.92,
        cx - rx * 0.5,
        h as f64,
        2.2,
        90.0,
    );
    c.line(
        cx + rx * 0.45,
        cy + ry * 0.92,
        cx + rx * 0.5,
        h as f64,
        2.2,
        90.0,
    );

    c.finish(&mut rng, 6.0)
}

/// Separable box blur applied `passes` times, clamping at the borders.
pub fn box_blur(img: &GrayImage, radius: usize, passes: usize) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let mut cur: Vec<f32> = img.pixels().iter().map(|&p| p as f32).collect();
    let mut tmp = vec![0f32; w * h];
    let r = radius as isize;
    let n = (2 * radius + 1) as f32;
    for _ in 0..passes {
        for y in 0..h {
            for x in 0..w {
                let mut s = 0.0;
                for k in -r..=r {
                    let xx = (x as isize + k).clamp(0, w as isize - 1) as usize;
                    s += cur[y * w + xx];
                }
                tmp[y * w + x] = s / n;
            }
        }
        for y in 0..h {
            for x in 0..w {
                let mut s = 0.0;
                for k in -r..=r {
                    let yy = (y as isize + k).clamp(0, h as isize - 1) as usize;
                    s += tmp[yy * w + x];
                }
                cur[y * w + x] = s / n;
            }
        }
    }
    GrayImage::new(
        w,
        h,
        cur.into_iter()
            .map(|p| p.round().clamp(0.0, 255.0) as u8)
            .collect(),
    )
    .expect("same dimensions")
}

/// Adds uniform noise in `[-amplitude, amplitude]`.
pub fn add_noise(img: &GrayImage, amplitude: i32, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = img.clone();
    for y in 0..img.height() {
        for x in 0..img.width() {
            let v = img.get(x, y) as i32 + rng.gen_range(-amplitude..=amplitude);
            out.set(x, y, v.clamp(0, 255) as u8);
        }
    }
    out
}

/// Scales intensities about mid-gray by `factor`.
pub fn scale_contrast(img: &GrayImage, factor: f64) -> GrayImage {
    img.map(|p| {
        (128.0 + (p as f64 - 128.0) * factor)
            .round()
            .clamp(0.0, 255.0) as u8
    })
}

/// Whitens pixels darker than `threshold` inside rows `[y0, y1)`, erasing a
/// facial component such as the hair or the eyes.
pub fn remove_component(img: &GrayImage, y0: usize, y1: usize, threshold: u8) -> GrayImage {
    let mut out = img.clone();
    for y in y0..y1.min(img.height()) {
        for x in 0..img.width() {
            if img.get(x, y) < threshold {
                out.set(x, y, WHITE);
            }
        }
    }
    out
}

/// A named distortion of a reference sketch.
#[derive(Clone, Debug)]
pub struct Distorted {
    pub algorithm: String,
    pub image: GrayImage,
}

/// The undistorted copy followed by one sketch per distortion family: blur,
/// noise, contrast change and component removal.
pub fn distortion_family(reference: &GrayImage, seed: u64) -> Vec<Distorted> {
    let h = reference.height();
    let named = |name: &str, image: GrayImage| Distorted {
        algorithm: name.to_string(),
        image,
    };
    vec![
        named("copy", reference.clone()),
        named("blur", box_blur(reference, 2, 2)),
        named("noise", add_noise(reference, 40, seed ^ 0x9e37_79b9)),
        named("contrast", scale_contrast(reference, 0.45)),
        named("removal", remove_component(reference, 0, h * 2 / 5, 150)),
    ]
}

/// Paths written by [`write_fixture_set`].
#[derive(Clone, Debug)]
pub struct FixturePaths {
    pub ranked_manifest: PathBuf,
    pub triplet_manifest: PathBuf,
}

/// Writes `count` sketches and their distortion families as PGM files under
/// `dir` (`reference/<i>.pgm`, `synthetic/<algorithm>/<i>.pgm`) together with
/// `ranked.json` and `triplets.json`. Each triplet pits the undistorted copy
/// against one distortion, with `q` pointing at the copy.
pub fn write_fixture_set(dir: &Path, count: usize) -> Result<FixturePaths> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ScootError::Io { path, source }
    };
    let mut ranked = Vec::with_capacity(count);
    let mut triplets = Vec::with_capacity(count);
    for i in 0..count {
        let reference = face_sketch(i as u64);
        let ref_rel = PathBuf::from(format!("reference/{i}.pgm"));
        let ref_abs = dir.join(&ref_rel);
        fs::create_dir_all(ref_abs.parent().expect("has parent")).map_err(io_err(dir))?;
        save_pgm(&reference, &ref_abs)?;
        let mut candidates = Vec::new();
        for d in distortion_family(&reference, i as u64) {
            let rel = PathBuf::from(format!("synthetic/{}/{i}.pgm", d.algorithm));
            let abs = dir.join(&rel);
            fs::create_dir_all(abs.parent().expect("has parent")).map_err(io_err(dir))?;
            save_pgm(&d.image, &abs)?;
            candidates.push(CandidateEntry {
                algorithm: d.algorithm,
                path: rel,
            });
        }
        let copy = candidates[0].path.clone();
        let other = candidates[1 + i % (candidates.len() - 1)].path.clone();
        let (s0_path, s1_path, q) = if i % 2 == 0 {
            (copy, other, 0)
        } else {
            (other, copy, 1)
        };
        triplets.push(TripletEntry {
            reference_path: ref_rel.clone(),
            s0_path,
            s1_path,
            q,
        });
        ranked.push(RankedEntry {
            reference_path: ref_rel,
            candidates,
        });
    }
    let paths = FixturePaths {
        ranked_manifest: dir.join("ranked.json"),
        triplet_manifest: dir.join("triplets.json"),
    };
    let ranked = RankedManifest {
        entries: ranked,
        base_dir: PathBuf::new(),
    };
    let triplets = TripletManifest {
        entries: triplets,
        base_dir: PathBuf::new(),
    };
    let ranked = serde_json::to_string_pretty(&ranked).expect("manifest serializes") + "\n";
    let triplets = serde_json::to_string_pretty(&triplets).expect("manifest serializes") + "\n";
    write_atomic(&paths.ranked_manifest, ranked.as_bytes())?;
    write_atomic(&paths.triplet_manifest, triplets.as_bytes())?;
    Ok(paths)
}
