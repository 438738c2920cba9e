//! Font and corpus loading, and rasterization of a word into the fixed-size
//! planar alpha mask that every later warp consumes.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ab_glyph::{point, Font, FontVec, GlyphId, OutlinedGlyph, PxScale, ScaleFont};
use image::GrayImage;

use crate::error::{Error, Result};

/// Default canvas width of the planar text mask.
pub const DEFAULT_CANVAS_W: u32 = 256;
/// Default canvas height of the planar text mask.
pub const DEFAULT_CANVAS_H: u32 = 64;
pub const MIN_CANVAS: u32 = 16;
pub const MAX_WORD_LEN: usize = 24;

/// Fraction of the binding canvas dimension the ink box is scaled to.
pub const FILL_FRACTION: f64 = 0.65;

const PROBE_CHARS: &str = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
const FONT_EXTENSIONS: [&str; 3] = ["ttf", "otf", "ttc"];
const REFERENCE_PX: f32 = 100.0;

#[derive(Clone)]
pub struct FontEntry {
    pub font_id: String,
    pub display_name: String,
    pub path: PathBuf,
    font: Arc<FontVec>,
}

impl FontEntry {
    pub fn font(&self) -> &FontVec {
        &self.font
    }
}

impl std::fmt::Debug for FontEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FontEntry")
            .field("font_id", &self.font_id)
            .field("path", &self.path)
            .finish()
    }
}

/// Ordered, immutable set of usable fonts.
#[derive(Debug, Clone)]
pub struct FontSet {
    entries: Vec<FontEntry>,
    skipped: Vec<(PathBuf, String)>,
}

impl FontSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FontEntry] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> Option<&FontEntry> {
        self.entries.get(index)
    }

    pub fn by_id(&self, font_id: &str) -> Option<&FontEntry> {
        self.entries.iter().find(|e| e.font_id == font_id)
    }

    /// Files that were found but rejected, with the reason.
    pub fn skipped(&self) -> &[(PathBuf, String)] {
        &self.skipped
    }
}

fn probe_font(font: &FontVec) -> std::result::Result<(), String> {
    for ch in PROBE_CHARS.chars() {
        let id = font.glyph_id(ch);
        if id == GlyphId(0) {
            return Err(format!("no glyph for {ch:?}"));
        }
        let glyph = id.with_scale(PxScale::from(32.0));
        if font.outline_glyph(glyph).is_none() {
            return Err(format!("empty outline for {ch:?}"));
        }
    }
    Ok(())
}

/// Loads every TrueType/OpenType file in `dir`, ordered by file name.
/// Files that fail to parse or lack basic alphanumerics are skipped with a warning.
pub fn load_fonts(dir: impl AsRef<Path>) -> Result<FontSet> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(Error::Config(format!(
            "fonts directory {} does not exist",
            dir.display()
        )));
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| FONT_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));

    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for path in paths {
        let loaded = fs::read(&path)
            .map_err(|e| e.to_string())
            .and_then(|bytes| FontVec::try_from_vec(bytes).map_err(|e| e.to_string()))
            .and_then(|font| probe_font(&font).map(|_| font));
        match loaded {
            Ok(font) => {
                let font_id = path.file_name().unwrap().to_string_lossy().into_owned();
                let display_name = path.file_stem().unwrap().to_string_lossy().into_owned();
                entries.push(FontEntry {
                    font_id,
                    display_name,
                    path,
                    font: Arc::new(font),
                });
            }
            Err(reason) => {
                log::warn!("skipping font {}: {reason}", path.display());
                skipped.push((path, reason));
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::Config(format!("no usable fonts in {}", dir.display())));
    }
    Ok(FontSet { entries, skipped })
}

/// Characters a corpus word may contain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Charset {
    /// Visible ASCII, `!` through `~`.
    #[default]
    PrintableAscii,
    Custom(BTreeSet<char>),
}

impl Charset {
    pub fn from_chars(chars: &str) -> Self {
        Charset::Custom(chars.chars().collect())
    }

    pub fn allows(&self, ch: char) -> bool {
        match self {
            Charset::PrintableAscii => ch.is_ascii_graphic(),
            Charset::Custom(set) => set.contains(&ch),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordCorpus {
    words: Vec<String>,
    dropped: usize,
}

impl WordCorpus {
    /// Builds a corpus from in-memory lines with the same filtering as [`load_corpus`].
    pub fn from_lines<'a>(lines: impl IntoIterator<Item = &'a str>, charset: &Charset) -> Result<Self> {
        let mut words = Vec::new();
        let mut dropped = 0;
        for line in lines {
            let word = line.trim();
            let len = word.chars().count();
            if (1..=MAX_WORD_LEN).contains(&len) && word.chars().all(|c| charset.allows(c)) {
                words.push(word.to_string());
            } else {
                dropped += 1;
            }
        }
        if words.is_empty() {
            return Err(Error::Config("corpus has no valid words".into()));
        }
        Ok(WordCorpus { words, dropped })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Lines rejected during loading.
    pub fn dropped(&self) -> usize {
        self.dropped
    }
}

/// Reads one word per line; invalid lines are dropped and counted.
pub fn load_corpus(path: impl AsRef<Path>, charset: &Charset) -> Result<WordCorpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let corpus = WordCorpus::from_lines(text.lines(), charset).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    if corpus.dropped() > 0 {
        log::info!("{}: dropped {} invalid line(s)", path.display(), corpus.dropped());
    }
    Ok(corpus)
}

/// Horizontal extent of one rendered character.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlyphBox {
    pub ch: char,
    pub x_min: f64,
    pub x_max: f64,
}

impl GlyphBox {
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x_min + self.x_max)
    }
}

/// The planar text plane: 8-bit coverage plus layout metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct TextMask {
    pub alpha: GrayImage,
    pub baseline_y: f64,
    pub glyph_boxes: Vec<GlyphBox>,
}

impl TextMask {
    pub fn width(&self) -> u32 {
        self.alpha.width()
    }

    pub fn height(&self) -> u32 {
        self.alpha.height()
    }

    /// Tight bounding box `(x0, y0, x1, y1)` of pixels with non-zero coverage,
    /// exclusive upper bounds. `None` for a blank mask.
    pub fn ink_bbox(&self) -> Option<(u32, u32, u32, u32)> {
        ink_bbox(&self.alpha, 0)
    }

    pub fn ink_mass(&self) -> u64 {
        self.alpha.pixels().map(|p| p.0[0] as u64).sum()
    }
}

/// Bounding box of pixels whose value exceeds `threshold`.
pub fn ink_bbox(img: &GrayImage, threshold: u8) -> Option<(u32, u32, u32, u32)> {
    let mut bbox: Option<(u32, u32, u32, u32)> = None;
    for (x, y, p) in img.enumerate_pixels() {
        if p.0[0] > threshold {
            bbox = Some(match bbox {
                None => (x, y, x + 1, y + 1),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x + 1), y1.max(y + 1)),
            });
        }
    }
    bbox
}

struct Laid {
    glyphs: Vec<(char, OutlinedGlyph)>,
    min_x: f32,
    min_y: f32,
    max_x: f32,
    max_y: f32,
}

fn layout(font: &FontVec, text: &str, px: f32, origin: (f32, f32)) -> Option<Laid> {
    let scale = PxScale::from(px);
    let scaled = font.as_scaled(scale);
    let mut caret = origin.0;
    let mut prev: Option<GlyphId> = None;
    let mut glyphs = Vec::new();
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (f32::MAX, f32::MAX, f32::MIN, f32::MIN);
    for ch in text.chars() {
        let id = font.glyph_id(ch);
        if let Some(p) = prev {
            caret += scaled.kern(p, id);
        }
        let glyph = id.with_scale_and_position(scale, point(caret, origin.1));
        caret += scaled.h_advance(id);
        prev = Some(id);
        if ch.is_whitespace() {
            continue;
        }
        if let Some(og) = font.outline_glyph(glyph) {
            let b = og.px_bounds();
            min_x = min_x.min(b.min.x);
            min_y = min_y.min(b.min.y);
            max_x = max_x.max(b.max.x);
            max_y = max_y.max(b.max.y);
            glyphs.push((ch, og));
        }
    }
    if glyphs.is_empty() {
        return None;
    }
    Some(Laid {
        glyphs,
        min_x,
        min_y,
        max_x,
        max_y,
    })
}

/// Renders `text` centered on a `canvas_w × canvas_h` canvas, scaled so the ink
/// box fills [`FILL_FRACTION`] of whichever canvas dimension binds first.
pub fn rasterize(
    text: &str,
    font_id: &str,
    fonts: &FontSet,
    canvas_w: u32,
    canvas_h: u32,
) -> Result<TextMask> {
    if canvas_w < MIN_CANVAS || canvas_h < MIN_CANVAS {
        return Err(Error::InvalidArgument(format!(
            "canvas {canvas_w}×{canvas_h} is smaller than {MIN_CANVAS}×{MIN_CANVAS}"
        )));
    }
    let entry = fonts
        .by_id(font_id)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown font `{font_id}`")))?;
    let font = entry.font();
    if text.trim().is_empty() {
        return Err(Error::InvalidArgument("cannot rasterize empty text".into()));
    }
    for ch in text.chars().filter(|c| !c.is_whitespace()) {
        if font.glyph_id(ch) == GlyphId(0) {
            return Err(Error::GlyphCoverage {
                font: font_id.to_string(),
                ch,
            });
        }
    }

    let probe = layout(font, text, REFERENCE_PX, (0.0, 0.0)).ok_or_else(|| Error::GlyphCoverage {
        font: font_id.to_string(),
        ch: text.chars().find(|c| !c.is_whitespace()).unwrap_or(' '),
    })?;
    let w0 = (probe.max_x - probe.min_x).max(1.0) as f64;
    let h0 = (probe.max_y - probe.min_y).max(1.0) as f64;
    let k = FILL_FRACTION * (canvas_w as f64 / w0).min(canvas_h as f64 / h0);
    let px = (REFERENCE_PX as f64 * k) as f32;

    let sized = layout(font, text, px, (0.0, 0.0)).expect("layout succeeded at reference size");
    let ox = ((canvas_w as f32 - (sized.max_x - sized.min_x)) / 2.0 - sized.min_x).round();
    let oy = ((canvas_h as f32 - (sized.max_y - sized.min_y)) / 2.0 - sized.min_y).round();
    let placed = layout(font, text, px, (ox, oy)).expect("layout succeeded at final size");

    let mut alpha = GrayImage::new(canvas_w, canvas_h);
    let mut glyph_boxes = Vec::with_capacity(placed.glyphs.len());
    for (ch, og) in &placed.glyphs {
        let b = og.px_bounds();
        let (bx, by) = (b.min.x as i64, b.min.y as i64);
        og.draw(|gx, gy, c| {
            let x = bx + gx as i64;
            let y = by + gy as i64;
            if x >= 0 && y >= 0 && x < canvas_w as i64 && y < canvas_h as i64 {
                let v = (c.clamp(0.0, 1.0) * 255.0).round() as u8;
                let px = alpha.get_pixel_mut(x as u32, y as u32);
                px.0[0] = px.0[0].max(v);
            }
        });
        glyph_boxes.push(GlyphBox {
            ch: *ch,
            x_min: (b.min.x as f64).max(0.0),
            x_max: (b.max.x as f64).min(canvas_w as f64),
        });
    }
    Ok(TextMask {
        alpha,
        baseline_y: oy as f64,
        glyph_boxes,
    })
}
