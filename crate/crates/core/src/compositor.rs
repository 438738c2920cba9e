//! Background crops and the final paired images.

use std::fs;
use std::path::{Path, PathBuf};

use image::imageops::{self, FilterType};
use image::{GrayImage, Luma, Rgb, RgbImage};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry3d::{CameraModel, RotationSpec};
use crate::sampler::{SampleKind, SampleRng};
use crate::warp::{ArcParams, BendParams, WarpedText, BINARY_THRESHOLD};

/// Minimum luma distance (0–255 scale) between text fill and background.
pub const CONTRAST_FLOOR: f64 = 30.0;
pub const MAX_DECODE_ATTEMPTS: u32 = 5;
const BACKGROUND_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

/// Ordered list of background images, decoded lazily.
#[derive(Debug, Clone)]
pub struct BackgroundPool {
    root: PathBuf,
    files: Vec<PathBuf>,
}

impl BackgroundPool {
    /// Lists PNG/JPEG files directly under `dir`, ordered by file name.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::Config(format!(
                "backgrounds directory {} does not exist",
                dir.display()
            )));
        }
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                p.is_file()
                    && p.extension()
                        .and_then(|e| e.to_str())
                        .is_some_and(|e| BACKGROUND_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
            })
            .collect();
        files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
        if files.is_empty() {
            return Err(Error::Config(format!(
                "no PNG/JPEG backgrounds in {}",
                dir.display()
            )));
        }
        Ok(BackgroundPool {
            root: dir.to_path_buf(),
            files,
        })
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Path relative to the pool root, as recorded in manifests.
    pub fn relative_name(&self, index: usize) -> String {
        let p = &self.files[index];
        p.strip_prefix(&self.root)
            .unwrap_or(p)
            .to_string_lossy()
            .into_owned()
    }
}

#[derive(Debug, Clone)]
pub struct BackgroundCrop {
    pub image: RgbImage,
    pub source_index: usize,
    pub source: String,
    /// Crop rectangle `(x, y, w, h)` in the (possibly upscaled) source.
    pub rect: (u32, u32, u32, u32),
}

/// Picks a source uniformly, then a uniformly placed crop with the output
/// aspect ratio, scaled to `w × h`. Sources smaller than the output are
/// upscaled first. Undecodable files are redrawn up to
/// [`MAX_DECODE_ATTEMPTS`] times.
pub fn crop_background(pool: &BackgroundPool, rng: &mut SampleRng, w: u32, h: u32) -> Result<BackgroundCrop> {
    if pool.is_empty() {
        return Err(Error::Pool("background pool is empty".into()));
    }
    let mut failures = Vec::new();
    for _ in 0..MAX_DECODE_ATTEMPTS {
        let index = rng.random_range(0..pool.len());
        let path = &pool.files[index];
        let decoded = image::open(path);
        let src = match decoded {
            Ok(img) => img.to_rgb8(),
            Err(e) => {
                log::warn!("cannot decode background {}: {e}", path.display());
                failures.push(format!("{}: {e}", path.display()));
                continue;
            }
        };
        let src = if src.width() < w || src.height() < h {
            let k = (w as f64 / src.width() as f64).max(h as f64 / src.height() as f64);
            let nw = ((src.width() as f64 * k).ceil() as u32).max(w);
            let nh = ((src.height() as f64 * k).ceil() as u32).max(h);
            imageops::resize(&src, nw, nh, FilterType::Triangle)
        } else {
            src
        };
        let (sw, sh) = src.dimensions();
        let max_cw = sw.min(((sh as u64 * w as u64) / h as u64) as u32).max(w);
        let cw = rng.random_range(w..=max_cw);
        let ch = ((cw as u64 * h as u64) / w as u64).clamp(h as u64, sh as u64) as u32;
        let x = rng.random_range(0..=sw - cw);
        let y = rng.random_range(0..=sh - ch);
        let crop = imageops::crop_imm(&src, x, y, cw, ch).to_image();
        let image = if (cw, ch) == (w, h) {
            crop
        } else {
            imageops::resize(&crop, w, h, FilterType::Triangle)
        };
        return Ok(BackgroundCrop {
            image,
            source_index: index,
            source: pool.relative_name(index),
            rect: (x, y, cw, ch),
        });
    }
    Err(Error::Pool(format!(
        "{MAX_DECODE_ATTEMPTS} consecutive background draws failed to decode: {}",
        failures.join("; ")
    )))
}

pub fn luma(rgb: [u8; 3]) -> f64 {
    0.299 * rgb[0] as f64 + 0.587 * rgb[1] as f64 + 0.114 * rgb[2] as f64
}

/// Mean luma of `bg` over `(x0, y0, x1, y1)`, exclusive upper bounds.
pub fn mean_luma(bg: &RgbImage, region: (u32, u32, u32, u32)) -> f64 {
    let (x0, y0, x1, y1) = region;
    let (x1, y1) = (x1.min(bg.width()), y1.min(bg.height()));
    let mut sum = 0.0;
    let mut n = 0u64;
    for y in y0..y1 {
        for x in x0..x1 {
            sum += luma(bg.get_pixel(x, y).0);
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// `|luma(fill) − mean luma of the background under the ink box|`.
pub fn contrast_score(fill: [u8; 3], bg: &RgbImage, ink_region: (u32, u32, u32, u32)) -> f64 {
    (luma(fill) - mean_luma(bg, ink_region)).abs()
}

pub fn contrast_ok(fill: [u8; 3], bg: &RgbImage, ink_region: (u32, u32, u32, u32)) -> bool {
    contrast_score(fill, bg, ink_region) >= CONTRAST_FLOOR
}

/// Everything that must be shared by the two halves of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTransform {
    pub kind: SampleKind,
    pub rotation: RotationSpec,
    pub arc: ArcParams,
    pub bend: Option<BendParams>,
    pub camera: CameraModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Style {
    pub font_id: String,
    pub fill_rgb: [u8; 3],
}

/// One rendered text with the transform and style it was produced under.
#[derive(Debug, Clone)]
pub struct RenderedText {
    pub warped: WarpedText,
    pub transform: PairTransform,
    pub style: Style,
}

/// The seven images of one paired sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedSample {
    pub i_s: RgbImage,
    pub i_t: RgbImage,
    pub mask_s: RgbImage,
    pub mask_t: RgbImage,
    pub bin_s: GrayImage,
    pub bin_t: GrayImage,
    pub t_b: RgbImage,
}

/// Alpha-over of a solid fill onto `bg`. Coverage at or below the binary
/// threshold leaves the background untouched, so text pixels and binary mask
/// pixels coincide.
fn blend(text: &WarpedText, fill: [u8; 3], bg: &RgbImage) -> RgbImage {
    RgbImage::from_fn(bg.width(), bg.height(), |x, y| {
        let a = text.alpha.get_pixel(x, y).0[0];
        let b = bg.get_pixel(x, y).0;
        if a <= BINARY_THRESHOLD {
            return Rgb(b);
        }
        let a = a as u32;
        let mut out = [0u8; 3];
        for c in 0..3 {
            out[c] = ((a * fill[c] as u32 + (255 - a) * b[c] as u32 + 127) / 255) as u8;
        }
        Rgb(out)
    })
}

fn binary_of(text: &WarpedText) -> GrayImage {
    GrayImage::from_fn(text.width(), text.height(), |x, y| {
        Luma([if text.alpha.get_pixel(x, y).0[0] > BINARY_THRESHOLD {
            255
        } else {
            0
        }])
    })
}

/// Composites source and target text over the same background crop.
pub fn composite_pair(text_s: &RenderedText, text_t: &RenderedText, bg: &RgbImage) -> Result<RenderedSample> {
    if text_s.transform != text_t.transform {
        return Err(Error::PairingContract(format!(
            "source transform {:?} differs from target transform {:?}",
            text_s.transform, text_t.transform
        )));
    }
    if text_s.style != text_t.style {
        return Err(Error::PairingContract(format!(
            "source style {:?} differs from target style {:?}",
            text_s.style, text_t.style
        )));
    }
    let dims = bg.dimensions();
    for (name, t) in [("source", text_s), ("target", text_t)] {
        if t.warped.alpha.dimensions() != dims || t.warped.normals.dimensions() != dims {
            return Err(Error::InvalidArgument(format!(
                "{name} text is {:?}, background is {dims:?}",
                t.warped.alpha.dimensions()
            )));
        }
    }
    let fill = text_s.style.fill_rgb;
    let bin_s = binary_of(&text_s.warped);
    let bin_t = binary_of(&text_t.warped);
    let mask = |t: &WarpedText, bin: &GrayImage| {
        RgbImage::from_fn(dims.0, dims.1, |x, y| {
            if bin.get_pixel(x, y).0[0] > 0 {
                *t.normals.get_pixel(x, y)
            } else {
                Rgb([0, 0, 0])
            }
        })
    };
    Ok(RenderedSample {
        i_s: blend(&text_s.warped, fill, bg),
        i_t: blend(&text_t.warped, fill, bg),
        mask_s: mask(&text_s.warped, &bin_s),
        mask_t: mask(&text_t.warped, &bin_t),
        bin_s,
        bin_t,
        t_b: bg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry3d::{compose_rotation, encode_normal, plane_normal, OrderPolicy};
    use crate::textraster::{load_fonts, rasterize};
    use crate::warp::render_flat;

    fn gray(v: u8) -> RgbImage {
        RgbImage::from_pixel(64, 32, Rgb([v, v, v]))
    }

    #[test]
    fn contrast_examples() {
        let all = (0, 0, 64, 32);
        assert!(contrast_ok([255, 255, 255], &gray(0), all));
        assert!(!contrast_ok([128, 128, 128], &gray(128), all));
        // luma of (200, 0, 0) is 59.8, a background of luma 60 is 0.2 away
        assert!((luma([200, 0, 0]) - 59.8).abs() < 1e-9);
        assert!(!contrast_ok([200, 0, 0], &gray(60), all));
    }

    fn flat_text(text: &str, spec: RotationSpec, fill: [u8; 3]) -> RenderedText {
        let fonts = load_fonts(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/fonts")).unwrap();
        let mask = rasterize(text, "DejaVuSans.ttf", &fonts, 256, 64).unwrap();
        let cam = CameraModel::for_canvas(256, 64);
        let flat = render_flat(&mask, &spec, &cam).unwrap();
        RenderedText {
            warped: flat.text,
            transform: PairTransform {
                kind: SampleKind::FlatRotated,
                rotation: spec,
                arc: ArcParams::none(),
                bend: None,
                camera: cam,
            },
            style: Style {
                font_id: "DejaVuSans.ttf".into(),
                fill_rgb: fill,
            },
        }
    }

    fn noisy_bg() -> RgbImage {
        RgbImage::from_fn(256, 64, |x, y| {
            Rgb([(x * 3 + y) as u8, (x ^ y) as u8, (y * 5) as u8])
        })
    }

    #[test]
    fn pair_invariants_hold() {
        let spec = RotationSpec::new(0.0, 45.0, -50.0, OrderPolicy::FarField).unwrap();
        let s = flat_text("source", spec, [250, 20, 20]);
        let t = flat_text("target", spec, [250, 20, 20]);
        let bg = noisy_bg();
        let out = composite_pair(&s, &t, &bg).unwrap();
        let expected = encode_normal(&plane_normal(&compose_rotation(&spec).unwrap()).unwrap()).to_rgb();
        for (x, y, p) in out.i_s.enumerate_pixels() {
            let bs = out.bin_s.get_pixel(x, y).0[0];
            let bt = out.bin_t.get_pixel(x, y).0[0];
            if bs == 0 {
                assert_eq!(p, out.t_b.get_pixel(x, y));
                assert_eq!(out.mask_s.get_pixel(x, y).0, [0, 0, 0]);
            } else {
                assert_eq!(out.mask_s.get_pixel(x, y).0, expected);
            }
            if bt == 0 {
                assert_eq!(out.i_t.get_pixel(x, y), out.t_b.get_pixel(x, y));
            }
            if bs == 0 && bt == 0 {
                assert_eq!(p, out.i_t.get_pixel(x, y));
            }
        }
        assert_eq!(out.t_b, bg);
        assert_eq!(composite_pair(&s, &t, &bg).unwrap(), out);
    }

    #[test]
    fn blank_mask_leaves_background() {
        let spec = RotationSpec::identity();
        let mut s = flat_text("x", spec, [0, 0, 0]);
        s.warped.alpha = GrayImage::new(256, 64);
        let t = s.clone();
        let bg = noisy_bg();
        let out = composite_pair(&s, &t, &bg).unwrap();
        assert_eq!(out.i_s, bg);
        assert!(out.bin_s.pixels().all(|p| p.0[0] == 0));
    }

    #[test]
    fn mismatched_pair_rejected() {
        let a = flat_text(
            "one",
            RotationSpec::new(0.0, 30.0, 0.0, OrderPolicy::FarField).unwrap(),
            [9, 9, 9],
        );
        let b = flat_text(
            "two",
            RotationSpec::new(0.0, -30.0, 0.0, OrderPolicy::FarField).unwrap(),
            [9, 9, 9],
        );
        assert!(matches!(
            composite_pair(&a, &b, &noisy_bg()),
            Err(Error::PairingContract(_))
        ));
        let mut c = flat_text("two", a.transform.rotation, [9, 9, 9]);
        c.style.fill_rgb = [10, 9, 9];
        assert!(matches!(
            composite_pair(&a, &c, &noisy_bg()),
            Err(Error::PairingContract(_))
        ));
    }

    #[test]
    fn crop_is_deterministic_and_upscales() {
        let dir = tempfile::tempdir().unwrap();
        RgbImage::from_fn(40, 20, |x, y| Rgb([x as u8 * 6, y as u8 * 12, 77]))
            .save(dir.path().join("small.png"))
            .unwrap();
        let pool = BackgroundPool::open(dir.path()).unwrap();
        let a = crop_background(&pool, &mut SampleRng::new(1, 0), 256, 64).unwrap();
        let b = crop_background(&pool, &mut SampleRng::new(1, 0), 256, 64).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.image.dimensions(), (256, 64));
        assert_eq!(a.source, "small.png");
    }

    #[test]
    fn undecodable_pool_fails_after_redraws() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("broken.png"), b"not a png").unwrap();
        let pool = BackgroundPool::open(dir.path()).unwrap();
        let err = crop_background(&pool, &mut SampleRng::new(1, 0), 256, 64).unwrap_err();
        assert!(matches!(err, Error::Pool(_)));
    }

    #[test]
    fn empty_dir_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(BackgroundPool::open(dir.path()), Err(Error::Config(_))));
    }
}
