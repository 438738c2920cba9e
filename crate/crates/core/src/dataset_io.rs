//! End-to-end sample generation, the on-disk layout and the manifest.
//!
//! A dataset directory looks like
//!
//! ```text
//! out/
//! ├── i_s/000000.png     source text over the background
//! ├── i_t/000000.png     target text over the same background
//! ├── mask_s/000000.png  RGB-encoded normals under the source text, black elsewhere
//! ├── mask_t/000000.png
//! ├── bin_s/000000.png   binary text mask (0 / 255)
//! ├── bin_t/000000.png
//! ├── t_b/000000.png     the clean background crop
//! └── manifest.jsonl     one SampleRecord per line, ordered by id
//! ```
//!
//! Every byte under `out/` is a function of the config and seed only; the
//! worker count changes wall-clock time and nothing else.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use image::{GrayImage, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compositor::{
    composite_pair, crop_background, BackgroundPool, PairTransform, RenderedSample, RenderedText, Style,
};
use crate::error::{Error, Result};
use crate::geometry3d::{CameraModel, EncodedNormal, OrderPolicy, RotationSpec};
use crate::sampler::{
    build_rotation_spec, sample_arc, sample_fill, sample_font, sample_kind, sample_sweep, sample_word_pair,
    AngleCategory, AxisCombination, RotationDraw, SampleKind, SampleRng, LANE_CONTENT, LANE_ROTATION,
};
use crate::textraster::{
    ink_bbox, load_corpus, load_fonts, rasterize, Charset, FontSet, TextMask, WordCorpus, DEFAULT_CANVAS_H,
    DEFAULT_CANVAS_W, MIN_CANVAS,
};
use crate::warp::{
    arc_warp, cylinder_bend, render_flat, ArcDirection, ArcParams, BendParams, WarpedText, ARC_LEVELS,
    BINARY_THRESHOLD, MAX_SWEEP_DEG, MIN_SWEEP_DEG,
};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const IMAGE_DIRS: [&str; 7] = ["i_s", "i_t", "mask_s", "mask_t", "bin_s", "bin_t", "t_b"];
/// Rotation or sweep redraws allowed after a degenerate projection.
pub const MAX_TRANSFORM_ATTEMPTS: u32 = 20;
/// Font redraws allowed when a word has a glyph the font lacks.
pub const MAX_FONT_ATTEMPTS: u32 = 10;
const MIN_ID_WIDTH: usize = 6;

fn default_canvas_w() -> u32 {
    DEFAULT_CANVAS_W
}

fn default_canvas_h() -> u32 {
    DEFAULT_CANVAS_H
}

/// Generation recipe. Loaded from TOML; every field can be overridden on the
/// command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub corpus: PathBuf,
    pub fonts_dir: PathBuf,
    pub backgrounds_dir: PathBuf,
    pub output_dir: PathBuf,
    pub count: u64,
    pub seed: u64,
    #[serde(default)]
    pub bend_fraction: f64,
    #[serde(default = "default_canvas_w")]
    pub canvas_width: u32,
    #[serde(default = "default_canvas_h")]
    pub canvas_height: u32,
    /// Defaults to `2·max(W, H)`.
    #[serde(default)]
    pub focal_length: Option<f64>,
    /// Defaults to the focal length.
    #[serde(default)]
    pub plane_distance: Option<f64>,
    /// Defaults to the number of available cores.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Allowed word characters; printable ASCII when absent.
    #[serde(default)]
    pub charset: Option<String>,
}

impl DatasetConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn camera(&self) -> Result<CameraModel> {
        let default = CameraModel::for_canvas(self.canvas_width, self.canvas_height);
        let f = self.focal_length.unwrap_or(default.focal_length);
        CameraModel::new(f, self.plane_distance.unwrap_or(f))
    }

    pub fn charset(&self) -> Charset {
        match &self.charset {
            Some(chars) => Charset::from_chars(chars),
            None => Charset::PrintableAscii,
        }
    }

    pub fn worker_count(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
            .max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seed > i64::MAX as u64 {
            return Err(Error::Config(format!(
                "seed {} exceeds the TOML integer range",
                self.seed
            )));
        }
        if self.count < 1 {
            return Err(Error::Config("count must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.bend_fraction) {
            return Err(Error::Config(format!(
                "bend_fraction {} outside [0, 1]",
                self.bend_fraction
            )));
        }
        if self.canvas_height < MIN_CANVAS || self.canvas_width < MIN_CANVAS {
            return Err(Error::Config(format!(
                "canvas must be at least {MIN_CANVAS}×{MIN_CANVAS}"
            )));
        }
        if self.canvas_width < 4 * self.canvas_height {
            return Err(Error::Config(format!(
                "canvas {}×{} must be at least four times wider than tall",
                self.canvas_width, self.canvas_height
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        self.camera().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Width of zero-padded ids for this many samples.
    pub fn id_width(&self) -> usize {
        id_width(self.count)
    }
}

pub fn id_width(count: u64) -> usize {
    count.saturating_sub(1).to_string().len().max(MIN_ID_WIDTH)
}

pub fn format_id(index: u64, width: usize) -> String {
    format!("{index:0width$}")
}

/// Loaded, immutable inputs shared by all workers.
#[derive(Debug, Clone)]
pub struct Resources {
    pub fonts: FontSet,
    pub corpus: WordCorpus,
    pub backgrounds: BackgroundPool,
}

impl Resources {
    pub fn load(cfg: &DatasetConfig) -> Result<Self> {
        let fonts = load_fonts(&cfg.fonts_dir)?;
        let corpus = load_corpus(&cfg.corpus, &cfg.charset())?;
        let backgrounds = BackgroundPool::open(&cfg.backgrounds_dir)?;
        Ok(Resources {
            fonts,
            corpus,
            backgrounds,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleFiles {
    pub i_s: String,
    pub i_t: String,
    pub mask_s: String,
    pub mask_t: String,
    pub bin_s: String,
    pub bin_t: String,
    pub t_b: String,
}

impl SampleFiles {
    pub fn for_id(id: &str) -> Self {
        let f = |dir: &str| format!("{dir}/{id}.png");
        SampleFiles {
            i_s: f("i_s"),
            i_t: f("i_t"),
            mask_s: f("mask_s"),
            mask_t: f("mask_t"),
            bin_s: f("bin_s"),
            bin_t: f("bin_t"),
            t_b: f("t_b"),
        }
    }

    pub fn all(&self) -> [(&'static str, &str); 7] {
        [
            ("i_s", &self.i_s),
            ("i_t", &self.i_t),
            ("mask_s", &self.mask_s),
            ("mask_t", &self.mask_t),
            ("bin_s", &self.bin_s),
            ("bin_t", &self.bin_t),
            ("t_b", &self.t_b),
        ]
    }
}

/// One manifest line: everything needed to audit or regenerate a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub index: u64,
    pub seed: u64,
    pub text_s: String,
    pub text_t: String,
    pub font_id: String,
    pub fill_rgb: [u8; 3],
    pub kind: SampleKind,
    /// Active rotation axes; absent for cylinder-bent samples.
    pub axis_combination: Option<AxisCombination>,
    pub gamma: f64,
    pub theta: f64,
    pub phi: f64,
    pub order_policy: OrderPolicy,
    pub arc_angle: u32,
    pub arc_direction: ArcDirection,
    /// Cylinder sweep; present only for cylinder-bent samples.
    pub sweep_angle: Option<f64>,
    pub bg_source: String,
    pub camera: CameraModel,
    /// Encoded plane normal of flat samples.
    pub normal_rgb: Option<[u8; 3]>,
    pub files: SampleFiles,
}

impl SampleRecord {
    pub fn rotation_spec(&self) -> RotationSpec {
        RotationSpec {
            roll_gamma: self.gamma,
            pitch_theta: self.theta,
            yaw_phi: self.phi,
            order_policy: self.order_policy,
        }
    }

    /// Checks every invariant that can be decided from the record alone.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if !self.id.chars().all(|c| c.is_ascii_digit()) || self.id.parse::<u64>().ok() != Some(self.index) {
            problems.push(format!("id `{}` does not encode index {}", self.id, self.index));
        }
        if self.text_s.is_empty() || self.text_t.is_empty() {
            problems.push("empty text".into());
        }
        if self.text_s == self.text_t {
            problems.push(format!("source and target text are both `{}`", self.text_s));
        }
        if !ARC_LEVELS.contains(&self.arc_angle) {
            problems.push(format!(
                "arc angle {} is not one of {ARC_LEVELS:?}",
                self.arc_angle
            ));
        }
        if let Err(e) = self.camera.validate() {
            problems.push(format!("camera: {e}"));
        }
        if self.files != SampleFiles::for_id(&self.id) {
            problems.push("file paths do not follow the dataset layout".into());
        }
        match self.kind {
            SampleKind::FlatRotated => {
                let derived = AxisCombination::from_angles(self.theta, self.phi, self.gamma);
                match self.axis_combination {
                    None => problems.push("flat sample without axis combination".into()),
                    Some(c) if Some(c) != derived => problems.push(format!(
                        "angles (θ={}, φ={}, γ={}) do not match axis combination {}",
                        self.theta,
                        self.phi,
                        self.gamma,
                        c.label()
                    )),
                    Some(_) => {}
                }
                for (name, a) in [("theta", self.theta), ("phi", self.phi), ("gamma", self.gamma)] {
                    if a != 0.0 && AngleCategory::classify(a).is_none() {
                        problems.push(format!("{name} = {a} lies outside every angle category"));
                    }
                }
                if self.sweep_angle.is_some() {
                    problems.push("flat sample carries a sweep angle".into());
                }
                if self.normal_rgb.is_none() {
                    problems.push("flat sample without normal_rgb".into());
                }
            }
            SampleKind::CylinderBent => {
                if self.axis_combination.is_some()
                    || self.theta != 0.0
                    || self.phi != 0.0
                    || self.gamma != 0.0
                {
                    problems.push("bent sample carries plane rotation angles".into());
                }
                match self.sweep_angle {
                    Some(s) if (MIN_SWEEP_DEG..=MAX_SWEEP_DEG).contains(&s) => {}
                    Some(s) => problems.push(format!("sweep {s} outside [{MIN_SWEEP_DEG}, {MAX_SWEEP_DEG}]")),
                    None => problems.push("bent sample without sweep angle".into()),
                }
            }
        }
        problems
    }
}

/// A record and its rendered images, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct GeneratedSample {
    pub record: SampleRecord,
    pub images: RenderedSample,
}

/// Transform applied to both texts of a pair after arc warping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlacementKind {
    Flat(RotationSpec),
    Bent(BendParams),
}

/// Renders one word through arc warping and the requested placement.
pub fn render_text(
    mask: &TextMask,
    arc: &ArcParams,
    placement: &PlacementKind,
    cam: &CameraModel,
) -> Result<WarpedText> {
    let arced = arc_warp(mask, arc);
    match placement {
        PlacementKind::Flat(spec) => Ok(render_flat(&arced, spec, cam)?.text),
        PlacementKind::Bent(bend) => Ok(cylinder_bend(&arced, bend, cam)?.text),
    }
}

fn has_ink(t: &WarpedText) -> bool {
    t.binary.pixels().any(|p| p.0[0] > 0)
}

fn bent_glyphs_visible(t: &WarpedText, glyphs: usize) -> bool {
    let mut colors = std::collections::BTreeSet::new();
    for p in t.normals.pixels() {
        if p.0 != [0, 0, 0] {
            colors.insert(p.0);
        }
    }
    colors.len() == glyphs
}

type RotationSampler = dyn Fn(&mut SampleRng) -> RotationDraw + Send + Sync;

/// Produces samples for one config; cheap to share across threads.
pub struct Generator {
    cfg: DatasetConfig,
    res: Resources,
    camera: CameraModel,
    rotation_sampler: Box<RotationSampler>,
}

impl Generator {
    pub fn new(cfg: DatasetConfig) -> Result<Self> {
        cfg.validate()?;
        let res = Resources::load(&cfg)?;
        Self::with_resources(cfg, res)
    }

    pub fn with_resources(cfg: DatasetConfig, res: Resources) -> Result<Self> {
        cfg.validate()?;
        let camera = cfg.camera()?;
        Ok(Generator {
            cfg,
            res,
            camera,
            rotation_sampler: Box::new(build_rotation_spec),
        })
    }

    /// Replaces the rotation distribution, e.g. to rig a dataset for auditor tests.
    pub fn with_rotation_sampler(
        mut self,
        sampler: impl Fn(&mut SampleRng) -> RotationDraw + Send + Sync + 'static,
    ) -> Self {
        self.rotation_sampler = Box::new(sampler);
        self
    }

    pub fn config(&self) -> &DatasetConfig {
        &self.cfg
    }

    pub fn resources(&self) -> &Resources {
        &self.res
    }

    /// Runs the full pipeline for one index:
    /// rasterize → arc warp → flat rotation or cylinder bend → composite.
    ///
    /// Content draws (words, kind, arc, font, background, colour) come from
    /// the content lane. Each rotation or sweep attempt uses its own lane, so a
    /// degenerate projection is redrawn from a fresh stream without disturbing
    /// anything else.
    pub fn generate_sample(&self, index: u64) -> Result<GeneratedSample> {
        let cfg = &self.cfg;
        let (w, h) = (cfg.canvas_width, cfg.canvas_height);
        let mut rng = SampleRng::lane(cfg.seed, index, LANE_CONTENT);
        let (text_s, text_t) = sample_word_pair(&mut rng, &self.res.corpus)?;
        let kind = sample_kind(&mut rng, cfg.bend_fraction);
        let arc = sample_arc(&mut rng);

        let mut last_err = String::new();
        let mut masks = None;
        for _ in 0..MAX_FONT_ATTEMPTS {
            let font = &self.res.fonts.entries()[sample_font(&mut rng, &self.res.fonts)];
            let rendered = rasterize(&text_s, &font.font_id, &self.res.fonts, w, h)
                .and_then(|s| Ok((s, rasterize(&text_t, &font.font_id, &self.res.fonts, w, h)?)));
            match rendered {
                Ok(pair) => {
                    masks = Some((font.font_id.clone(), pair));
                    break;
                }
                Err(e @ Error::GlyphCoverage { .. }) => last_err = e.to_string(),
                Err(e) => return Err(e),
            }
        }
        let Some((font_id, (mask_s, mask_t))) = masks else {
            return Err(Error::ResampleExhausted {
                index,
                attempts: MAX_FONT_ATTEMPTS,
                last: last_err,
            });
        };
        let bg = crop_background(&self.res.backgrounds, &mut rng, w, h)?;

        let glyphs_s = mask_s.glyph_boxes.len();
        let glyphs_t = mask_t.glyph_boxes.len();
        let mut placed = None;
        for attempt in 0..MAX_TRANSFORM_ATTEMPTS {
            let mut lane = SampleRng::lane(cfg.seed, index, LANE_ROTATION + attempt);
            let (placement, combination) = match kind {
                SampleKind::FlatRotated => {
                    let draw = (self.rotation_sampler)(&mut lane);
                    (PlacementKind::Flat(draw.spec), Some(draw.combination))
                }
                SampleKind::CylinderBent => (PlacementKind::Bent(sample_sweep(&mut lane)), None),
            };
            let pair = render_text(&mask_s, &arc, &placement, &self.camera)
                .and_then(|s| Ok((s, render_text(&mask_t, &arc, &placement, &self.camera)?)));
            match pair {
                Ok((s, t)) => {
                    let usable = match placement {
                        PlacementKind::Flat(_) => has_ink(&s) && has_ink(&t),
                        PlacementKind::Bent(_) => {
                            bent_glyphs_visible(&s, glyphs_s) && bent_glyphs_visible(&t, glyphs_t)
                        }
                    };
                    if usable {
                        placed = Some((placement, combination, s, t));
                        break;
                    }
                    last_err = "warped text lost glyphs below the binary threshold".into();
                }
                Err(e @ Error::DegenerateProjection { .. }) => last_err = e.to_string(),
                Err(e) => return Err(e),
            }
        }
        let Some((placement, combination, warped_s, warped_t)) = placed else {
            return Err(Error::ResampleExhausted {
                index,
                attempts: MAX_TRANSFORM_ATTEMPTS,
                last: last_err,
            });
        };

        let region = union_bbox(&warped_s.alpha, &warped_t.alpha).unwrap_or((0, 0, w, h));
        let fill = sample_fill(&mut rng, &bg.image, region);

        let (rotation, bend) = match placement {
            PlacementKind::Flat(spec) => (spec, None),
            PlacementKind::Bent(b) => (RotationSpec::identity(), Some(b)),
        };
        let transform = PairTransform {
            kind,
            rotation,
            arc,
            bend,
            camera: self.camera,
        };
        let style = Style {
            font_id: font_id.clone(),
            fill_rgb: fill.rgb,
        };
        let normal_rgb = match kind {
            SampleKind::FlatRotated => Some(flat_normal_rgb(&rotation)?.to_rgb()),
            SampleKind::CylinderBent => None,
        };
        let images = composite_pair(
            &RenderedText {
                warped: warped_s,
                transform,
                style: style.clone(),
            },
            &RenderedText {
                warped: warped_t,
                transform,
                style,
            },
            &bg.image,
        )?;

        let id = format_id(index, cfg.id_width());
        let record = SampleRecord {
            files: SampleFiles::for_id(&id),
            id,
            index,
            seed: cfg.seed,
            text_s,
            text_t,
            font_id,
            fill_rgb: fill.rgb,
            kind,
            axis_combination: combination,
            gamma: rotation.roll_gamma,
            theta: rotation.pitch_theta,
            phi: rotation.yaw_phi,
            order_policy: rotation.order_policy,
            arc_angle: arc.total_angle(),
            arc_direction: arc.direction(),
            sweep_angle: bend.map(|b| b.sweep_angle()),
            bg_source: bg.source,
            camera: self.camera,
            normal_rgb,
        };
        Ok(GeneratedSample { record, images })
    }
}

/// Encoded plane normal for a flat rotation.
pub fn flat_normal_rgb(spec: &RotationSpec) -> Result<EncodedNormal> {
    use crate::geometry3d::{compose_rotation, encode_normal, plane_normal};
    Ok(encode_normal(&plane_normal(&compose_rotation(spec)?)?))
}

fn union_bbox(a: &GrayImage, b: &GrayImage) -> Option<(u32, u32, u32, u32)> {
    match (ink_bbox(a, BINARY_THRESHOLD), ink_bbox(b, BINARY_THRESHOLD)) {
        (Some(p), Some(q)) => Some((p.0.min(q.0), p.1.min(q.1), p.2.max(q.2), p.3.max(q.3))),
        (p, q) => p.or(q),
    }
}

fn save_rgb(img: &RgbImage, path: &Path) -> Result<()> {
    img.save(path).map_err(|e| Error::image(path, e))
}

fn save_gray(img: &GrayImage, path: &Path) -> Result<()> {
    img.save(path).map_err(|e| Error::image(path, e))
}

/// Writes the seven PNGs of a sample under `root`.
pub fn write_sample(root: &Path, sample: &GeneratedSample) -> Result<()> {
    let f = &sample.record.files;
    let im = &sample.images;
    save_rgb(&im.i_s, &root.join(&f.i_s))?;
    save_rgb(&im.i_t, &root.join(&f.i_t))?;
    save_rgb(&im.mask_s, &root.join(&f.mask_s))?;
    save_rgb(&im.mask_t, &root.join(&f.mask_t))?;
    save_gray(&im.bin_s, &root.join(&f.bin_s))?;
    save_gray(&im.bin_t, &root.join(&f.bin_t))?;
    save_rgb(&im.t_b, &root.join(&f.t_b))?;
    Ok(())
}

pub fn create_layout(root: &Path) -> Result<()> {
    for dir in IMAGE_DIRS {
        let p = root.join(dir);
        fs::create_dir_all(&p).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

/// Writes `manifest.jsonl`, one record per line in the given order.
pub fn write_manifest(root: &Path, records: &[SampleRecord]) -> Result<()> {
    let path = root.join(MANIFEST_FILE);
    let tmp = root.join(format!("{MANIFEST_FILE}.tmp"));
    {
        let file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        let mut out = BufWriter::new(file);
        for r in records {
            let line = serde_json::to_string(r).expect("records serialize");
            writeln!(out, "{line}").map_err(|e| Error::io(&tmp, e))?;
        }
        out.flush().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub output_dir: PathBuf,
    pub count: u64,
    pub images_written: u64,
    pub per_kind: BTreeMap<String, u64>,
    pub per_axis_combination: BTreeMap<String, u64>,
    pub per_arc_level: BTreeMap<u32, u64>,
}

impl DatasetSummary {
    pub fn from_records(output_dir: &Path, records: &[SampleRecord]) -> Self {
        let mut s = DatasetSummary {
            output_dir: output_dir.to_path_buf(),
            count: records.len() as u64,
            images_written: 7 * records.len() as u64,
            ..Default::default()
        };
        for r in records {
            *s.per_kind.entry(r.kind.label().to_string()).or_default() += 1;
            if let Some(c) = r.axis_combination {
                *s.per_axis_combination.entry(c.label().to_string()).or_default() += 1;
            }
            *s.per_arc_level.entry(r.arc_angle).or_default() += 1;
        }
        s
    }
}

impl std::fmt::Display for DatasetSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "wrote {} samples ({} images) to {}",
            self.count,
            self.images_written,
            self.output_dir.display()
        )?;
        writeln!(f, "kind:")?;
        for (k, n) in &self.per_kind {
            writeln!(f, "  {k:<16} {n}")?;
        }
        writeln!(f, "axis combination:")?;
        for c in AxisCombination::ALL {
            let n = self.per_axis_combination.get(c.label()).copied().unwrap_or(0);
            writeln!(f, "  {:<16} {n}", c.label())?;
        }
        writeln!(f, "arc level:")?;
        for (k, n) in &self.per_arc_level {
            writeln!(f, "  {:<16} {n}", format!("{k}°"))?;
        }
        Ok(())
    }
}

/// Generates and writes `cfg.count` samples with `cfg.workers` threads.
pub fn generate_dataset(cfg: &DatasetConfig) -> Result<DatasetSummary> {
    let generator = Generator::new(cfg.clone())?;
    run_generator(&generator)
}

/// Like [`generate_dataset`] with an already prepared generator.
pub fn run_generator(generator: &Generator) -> Result<DatasetSummary> {
    let cfg = generator.config();
    let root = cfg.output_dir.as_path();
    create_layout(root)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count())
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let results: Vec<Result<SampleRecord>> = pool.install(|| {
        (0..cfg.count)
            .into_par_iter()
            .map(|index| {
                let sample = generator.generate_sample(index)?;
                write_sample(root, &sample)?;
                Ok(sample.record)
            })
            .collect()
    });

    let mut records = Vec::with_capacity(results.len());
    let mut failed = Vec::new();
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failed.push((index as u64, e.to_string())),
        }
    }
    if !failed.is_empty() {
        return Err(Error::GenerationFailed { failed });
    }
    records.sort_by_key(|r| r.index);
    write_manifest(root, &records)?;
    Ok(DatasetSummary::from_records(root, &records))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordViolation {
    pub id: String,
    pub check: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ManifestReport {
    pub root: PathBuf,
    pub records: Vec<SampleRecord>,
    pub violations: Vec<RecordViolation>,
}

/// Parses `manifest.jsonl` under `dir` and rechecks every record, including
/// that all referenced files exist.
pub fn read_manifest(dir: impl AsRef<Path>) -> Result<ManifestReport> {
    let root = dir.as_ref();
    let path = root.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: SampleRecord = serde_json::from_str(line).map_err(|e| Error::Manifest {
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }

    let mut violations = Vec::new();
    let mut last: Option<u64> = None;
    for r in &records {
        if let Some(prev) = last {
            if r.index <= prev {
                violations.push(RecordViolation {
                    id: r.id.clone(),
                    check: "manifest_order".into(),
                    message: format!("index {} follows {prev}", r.index),
                });
            }
        }
        last = Some(r.index);
        for message in r.check() {
            violations.push(RecordViolation {
                id: r.id.clone(),
                check: "record".into(),
                message,
            });
        }
        for (name, rel) in r.files.all() {
            if !root.join(rel).is_file() {
                violations.push(RecordViolation {
                    id: r.id.clone(),
                    check: "files".into(),
                    message: format!("missing {name} file {rel}"),
                });
            }
        }
    }
    Ok(ManifestReport {
        root: root.to_path_buf(),
        records,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_zero_padded() {
        assert_eq!(format_id(7, id_width(100)), "000007");
        assert_eq!(id_width(1_000_000), 6);
        assert_eq!(id_width(1_000_001), 7);
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = DatasetConfig {
            corpus: "words.txt".into(),
            fonts_dir: "fonts".into(),
            backgrounds_dir: "bg".into(),
            output_dir: "out".into(),
            count: 10,
            seed: i64::MAX as u64,
            bend_fraction: 0.25,
            canvas_width: 256,
            canvas_height: 64,
            focal_length: Some(400.0),
            plane_distance: None,
            workers: Some(2),
            charset: None,
        };
        let back = DatasetConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.camera().unwrap(), CameraModel::new(400.0, 400.0).unwrap());
    }

    #[test]
    fn config_defaults_and_guards() {
        let cfg = DatasetConfig::from_toml_str(
            r#"
            corpus = "c.txt"
            fonts_dir = "f"
            backgrounds_dir = "b"
            output_dir = "o"
            count = 5
            seed = 1
            "#,
        )
        .unwrap();
        assert_eq!((cfg.canvas_width, cfg.canvas_height), (256, 64));
        assert_eq!(cfg.camera().unwrap(), CameraModel::new(512.0, 512.0).unwrap());
        cfg.validate().unwrap();

        let mut bad = cfg.clone();
        bad.canvas_width = 200;
        assert!(bad.validate().is_err());
        let mut bad = cfg.clone();
        bad.count = 0;
        assert!(bad.validate().is_err());
        let mut bad = cfg.clone();
        bad.bend_fraction = 1.5;
        assert!(bad.validate().is_err());
        let mut bad = cfg.clone();
        bad.seed = u64::MAX;
        assert!(bad.validate().is_err());
        assert!(DatasetConfig::from_toml_str("count = 3\nbogus = 1").is_err());
    }
}
