//! `syn3dtxt gen | preview | validate | stats`.
//!
//! Exit codes: 0 success or audit pass, 1 audit failure, 2 usage or resource error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use image::{Rgb, RgbImage};

use crate::audit::{
    dataset_stats, validate_dataset, AuditOptions, DEFAULT_ALPHA, DEFAULT_MIN_CHI_N, DEFAULT_PAIR_FRACTION,
};
use crate::compositor::{
    composite_pair, crop_background, BackgroundPool, PairTransform, RenderedText, Style,
};
use crate::dataset_io::{generate_dataset, render_text, DatasetConfig, PlacementKind};
use crate::error::{Error, Result};
use crate::geometry3d::{
    compose_rotation, encode_normal, plane_normal, CameraModel, OrderPolicy, RotationSpec,
};
use crate::sampler::{sample_fill, SampleKind, SampleRng, LANE_CONTENT};
use crate::textraster::{ink_bbox, load_fonts, rasterize, DEFAULT_CANVAS_H, DEFAULT_CANVAS_W};
use crate::warp::{station_angles, ArcDirection, ArcParams, BendParams, BINARY_THRESHOLD};

pub const CONFIG_ENV: &str = "SYN3DTXT_CONFIG";
const PREVIEW_BACKGROUND: u8 = 128;

#[derive(Debug, Parser)]
#[command(
    name = "syn3dtxt",
    version,
    about = "Synthetic scene-text pairs with surface-normal supervision"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a dataset.
    Gen(GenArgs),
    /// Render one configuration for inspection.
    Preview(PreviewArgs),
    /// Audit a dataset directory.
    Validate(ValidateArgs),
    /// Print distribution tables for a dataset directory.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// TOML config; flags override its fields.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long = "fonts")]
    fonts_dir: Option<PathBuf>,
    #[arg(long = "backgrounds")]
    backgrounds_dir: Option<PathBuf>,
    #[arg(long = "out")]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    count: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bend_fraction: Option<f64>,
    #[arg(long)]
    canvas_width: Option<u32>,
    #[arg(long)]
    canvas_height: Option<u32>,
    #[arg(long)]
    focal_length: Option<f64>,
    #[arg(long)]
    plane_distance: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Allowed word characters.
    #[arg(long)]
    charset: Option<String>,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct PreviewArgs {
    #[arg(long = "fonts")]
    fonts_dir: PathBuf,
    /// Font file name; the first font in the directory by default.
    #[arg(long)]
    font: Option<String>,
    #[arg(long)]
    text: String,
    /// Second word of the pair; the source text with letter case swapped by default.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    #[arg(long, default_value = "far_field", value_parser = parse_policy)]
    policy: OrderPolicy,
    #[arg(long, default_value_t = 0)]
    arc: u32,
    #[arg(long, default_value = "arch_up", value_parser = parse_direction)]
    arc_direction: ArcDirection,
    /// Bend onto a cylinder with this sweep instead of rotating the plane.
    #[arg(long)]
    bend: Option<f64>,
    /// Crop the background from this pool instead of flat gray.
    #[arg(long = "backgrounds")]
    backgrounds_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Text colour as `r,g,b`; chosen for contrast by default.
    #[arg(long, value_parser = parse_rgb)]
    fill: Option<[u8; 3]>,
    #[arg(long = "out")]
    output_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CANVAS_W)]
    canvas_width: u32,
    #[arg(long, default_value_t = DEFAULT_CANVAS_H)]
    canvas_height: u32,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    dir: PathBuf,
    /// Fraction of records given the pixel-wise pair/background check.
    #[arg(long, default_value_t = DEFAULT_PAIR_FRACTION)]
    sample_fraction: f64,
    /// Check every record's pair/background invariant.
    #[arg(long)]
    full: bool,
    /// Minimum observations before distribution tests apply.
    #[arg(long, default_value_t = DEFAULT_MIN_CHI_N)]
    min_chi_n: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct StatsArgs {
    dir: PathBuf,
    #[arg(long)]
    json: bool,
}

fn parse_policy(s: &str) -> std::result::Result<OrderPolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_direction(s: &str) -> std::result::Result<ArcDirection, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rgb(s: &str) -> std::result::Result<[u8; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected r,g,b, got `{s}`"));
    }
    let mut rgb = [0u8; 3];
    for (c, p) in rgb.iter_mut().zip(parts) {
        *c = p.parse().map_err(|_| format!("bad colour component `{p}`"))?;
    }
    Ok(rgb)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Preview(a) => cmd_preview(a, out),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Stats(a) => cmd_stats(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_usage_or_resource() {
                2
            } else {
                1
            }
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

fn build_config(a: &GenArgs) -> Result<DatasetConfig> {
    let mut cfg = match &a.config {
        Some(path) => Some(DatasetConfig::from_toml_file(path)?),
        None => None,
    };
    if cfg.is_none() {
        let mut missing = Vec::new();
        for (flag, present) in [
            ("--corpus", a.corpus.is_some()),
            ("--fonts", a.fonts_dir.is_some()),
            ("--backgrounds", a.backgrounds_dir.is_some()),
            ("--out", a.output_dir.is_some()),
            ("--count", a.count.is_some()),
            ("--seed", a.seed.is_some()),
        ] {
            if !present {
                missing.push(flag);
            }
        }
        if !missing.is_empty() {
            return Err(Error::Config(format!(
                "no config file (--config or {CONFIG_ENV}) and missing {}",
                missing.join(", ")
            )));
        }
        cfg = Some(DatasetConfig {
            corpus: PathBuf::new(),
            fonts_dir: PathBuf::new(),
            backgrounds_dir: PathBuf::new(),
            output_dir: PathBuf::new(),
            count: 0,
            seed: 0,
            bend_fraction: 0.0,
            canvas_width: DEFAULT_CANVAS_W,
            canvas_height: DEFAULT_CANVAS_H,
            focal_length: None,
            plane_distance: None,
            workers: None,
            charset: None,
        });
    }
    let mut cfg = cfg.expect("config built above");
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = &a.$field {
                cfg.$field = v.clone();
            }
        };
        (opt $field:ident) => {
            if let Some(v) = &a.$field {
                cfg.$field = Some(v.clone());
            }
        };
    }
    set!(corpus);
    set!(fonts_dir);
    set!(backgrounds_dir);
    set!(output_dir);
    set!(count);
    set!(seed);
    set!(bend_fraction);
    set!(canvas_width);
    set!(canvas_height);
    set!(opt focal_length);
    set!(opt plane_distance);
    set!(opt workers);
    set!(opt charset);
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = build_config(&a)?;
    let summary = generate_dataset(&cfg)?;
    if a.json {
        emit(out, &to_json(&summary))?;
    } else {
        emit(out, summary.to_string().trim_end())?;
    }
    Ok(0)
}

fn swap_case(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_uppercase() {
                c.to_lowercase().next().unwrap_or(c)
            } else {
                c.to_uppercase().next().unwrap_or(c)
            }
        })
        .collect()
}

fn cmd_preview(a: PreviewArgs, out: &mut dyn Write) -> Result<i32> {
    let (w, h) = (a.canvas_width, a.canvas_height);
    let fonts = load_fonts(&a.fonts_dir)?;
    let font_id = match &a.font {
        Some(id) => fonts
            .by_id(id)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("font `{id}` not found in {}", a.fonts_dir.display()))
            })?
            .font_id
            .clone(),
        None => fonts.entries()[0].font_id.clone(),
    };
    let target = match &a.target {
        Some(t) => t.clone(),
        None => {
            let swapped = swap_case(&a.text);
            if swapped == a.text {
                format!("{}x", a.text)
            } else {
                swapped
            }
        }
    };
    if target == a.text {
        return Err(Error::InvalidArgument(
            "source and target text must differ".into(),
        ));
    }
    let camera = CameraModel::for_canvas(w, h);
    let arc = ArcParams::new(a.arc, a.arc_direction)?;
    let spec = RotationSpec::new(a.gamma, a.theta, a.phi, a.policy)?;
    let (kind, placement, bend) = match a.bend {
        Some(sweep) => {
            let b = BendParams::new(sweep)?;
            (SampleKind::CylinderBent, PlacementKind::Bent(b), Some(b))
        }
        None => (SampleKind::FlatRotated, PlacementKind::Flat(spec), None),
    };

    let mask_s = rasterize(&a.text, &font_id, &fonts, w, h)?;
    let mask_t = rasterize(&target, &font_id, &fonts, w, h)?;
    let warped_s = render_text(&mask_s, &arc, &placement, &camera)?;
    let warped_t = render_text(&mask_t, &arc, &placement, &camera)?;

    let mut rng = SampleRng::lane(a.seed, 0, LANE_CONTENT);
    let bg = match &a.backgrounds_dir {
        Some(dir) => crop_background(&BackgroundPool::open(dir)?, &mut rng, w, h)?.image,
        None => RgbImage::from_pixel(w, h, Rgb([PREVIEW_BACKGROUND; 3])),
    };
    let fill = match a.fill {
        Some(rgb) => rgb,
        None => {
            let region = ink_bbox(&warped_s.alpha, BINARY_THRESHOLD).unwrap_or((0, 0, w, h));
            sample_fill(&mut rng, &bg, region).rgb
        }
    };
    let transform = PairTransform {
        kind,
        rotation: if bend.is_some() {
            RotationSpec::identity()
        } else {
            spec
        },
        arc,
        bend,
        camera,
    };
    let style = Style {
        font_id,
        fill_rgb: fill,
    };
    let sample = composite_pair(
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
        &bg,
    )?;
    write_preview(&a.output_dir, &sample)?;

    match bend {
        None => {
            let n = plane_normal(&compose_rotation(&spec)?)?;
            let e = encode_normal(&n);
            emit(
                out,
                &format!("normal: ({:.6}, {:.6}, {:.6})", n.x(), n.y(), n.z()),
            )?;
            emit(out, &format!("rgb: ({}, {}, {})", e.r, e.g, e.b))?;
        }
        Some(b) => {
            let stations = station_angles(&mask_s.glyph_boxes, b.sweep_angle())?;
            for (g, yaw) in mask_s.glyph_boxes.iter().zip(stations) {
                let r = RotationSpec::new(0.0, 0.0, yaw, OrderPolicy::FarField)?;
                let n = plane_normal(&compose_rotation(&r)?)?;
                let e = encode_normal(&n);
                emit(
                    out,
                    &format!(
                        "glyph '{}' yaw {yaw:+.2}: normal ({:.6}, {:.6}, {:.6}) rgb ({}, {}, {})",
                        g.ch,
                        n.x(),
                        n.y(),
                        n.z(),
                        e.r,
                        e.g,
                        e.b
                    ),
                )?;
            }
        }
    }
    emit(out, &format!("wrote 7 images to {}", a.output_dir.display()))?;
    Ok(0)
}

fn write_preview(dir: &Path, s: &crate::compositor::RenderedSample) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let rgb = [
        ("i_s", &s.i_s),
        ("i_t", &s.i_t),
        ("mask_s", &s.mask_s),
        ("mask_t", &s.mask_t),
        ("t_b", &s.t_b),
    ];
    for (name, img) in rgb {
        let p = dir.join(format!("{name}.png"));
        img.save(&p).map_err(|e| Error::image(&p, e))?;
    }
    for (name, img) in [("bin_s", &s.bin_s), ("bin_t", &s.bin_t)] {
        let p = dir.join(format!("{name}.png"));
        img.save(&p).map_err(|e| Error::image(&p, e))?;
    }
    Ok(())
}

fn cmd_validate(a: ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    if !(0.0..=1.0).contains(&a.sample_fraction) {
        return Err(Error::InvalidArgument(format!(
            "--sample-fraction {} outside [0, 1]",
            a.sample_fraction
        )));
    }
    let opts = AuditOptions {
        pair_fraction: if a.full { 1.0 } else { a.sample_fraction },
        min_chi_n: a.min_chi_n,
        alpha: a.alpha,
    };
    let report = validate_dataset(&a.dir, &opts)?;
    if a.json {
        emit(out, &to_json(&report))?;
    } else {
        emit(out, &report.to_string())?;
    }
    Ok(report.exit_code())
}

fn cmd_stats(a: StatsArgs, out: &mut dyn Write) -> Result<i32> {
    let stats = dataset_stats(&a.dir)?;
    if a.json {
        emit(out, &to_json(&stats))?;
    } else {
        emit(out, stats.to_string().trim_end())?;
    }
    Ok(0)
}
