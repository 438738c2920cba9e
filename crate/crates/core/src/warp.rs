//! Curvature and 3D placement of the planar text mask.
//!
//! [`arc_warp`] bends the baseline onto a circular arc in 2D. [`render_flat`]
//! rotates the whole plane and projects it through the pinhole camera.
//! [`cylinder_bend`] puts each glyph on a tangent plane of a vertical cylinder,
//! so every character carries its own normal.

use std::f64::consts::PI;

use image::{GrayImage, Luma, Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry3d::{
    compose_rotation, encode_normal, homography_from_quads, plane_normal, project_quad, project_quad_at,
    rot_yaw, warp_image, CameraModel, EncodedNormal, Homography, Point2, RotationSpec, Sampling, UnitNormal,
};
use crate::textraster::{GlyphBox, TextMask};

/// Alpha above which a pixel counts as ink in binary and normal masks.
pub const BINARY_THRESHOLD: u8 = 127;

pub const ARC_LEVELS: [u32; 3] = [0, 60, 120];
pub const MIN_SWEEP_DEG: f64 = 30.0;
pub const MAX_SWEEP_DEG: f64 = 120.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcDirection {
    /// Ends of the word rise above its middle.
    ArchUp,
    /// Ends of the word drop below its middle.
    ArchDown,
}

impl ArcDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcDirection::ArchUp => "arch_up",
            ArcDirection::ArchDown => "arch_down",
        }
    }
}

impl std::str::FromStr for ArcDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "arch_up" | "up" => Ok(ArcDirection::ArchUp),
            "arch_down" | "down" => Ok(ArcDirection::ArchDown),
            other => Err(Error::InvalidArgument(format!("unknown arc direction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcParams {
    total_angle: u32,
    direction: ArcDirection,
}

impl ArcParams {
    pub fn new(total_angle: u32, direction: ArcDirection) -> Result<Self> {
        if !ARC_LEVELS.contains(&total_angle) {
            return Err(Error::InvalidArgument(format!(
                "arc level {total_angle}° is not one of {ARC_LEVELS:?}"
            )));
        }
        Ok(ArcParams {
            total_angle,
            direction,
        })
    }

    pub fn none() -> Self {
        ArcParams {
            total_angle: 0,
            direction: ArcDirection::ArchUp,
        }
    }

    pub fn total_angle(&self) -> u32 {
        self.total_angle
    }

    pub fn direction(&self) -> ArcDirection {
        self.direction
    }
}

/// Geometry of one arc warp, exposed for inspection and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcLayout {
    pub direction: ArcDirection,
    pub center_x: f64,
    /// Row whose arc length is preserved: the vertical middle of the ink.
    pub reference_y: f64,
    pub radius: f64,
    /// Uniform factor that fits the warped ink box back into the canvas (≤ 1).
    pub scale: f64,
    pub warped_center: Point2,
    pub canvas: (u32, u32),
}

impl ArcLayout {
    /// Source plane point to warped-canvas point (before fitting).
    fn bend(&self, p: Point2) -> Point2 {
        let alpha = (p[0] - self.center_x) / self.radius;
        let h = self.reference_y - p[1];
        match self.direction {
            ArcDirection::ArchDown => {
                let r = self.radius + h;
                let cy = self.reference_y + self.radius;
                [self.center_x + r * alpha.sin(), cy - r * alpha.cos()]
            }
            ArcDirection::ArchUp => {
                let r = self.radius - h;
                let cy = self.reference_y - self.radius;
                [self.center_x + r * alpha.sin(), cy + r * alpha.cos()]
            }
        }
    }

    fn unbend(&self, q: Point2) -> Option<Point2> {
        let dx = q[0] - self.center_x;
        let (alpha, h) = match self.direction {
            ArcDirection::ArchDown => {
                let dy = self.reference_y + self.radius - q[1];
                (dx.atan2(dy), (dx * dx + dy * dy).sqrt() - self.radius)
            }
            ArcDirection::ArchUp => {
                let dy = q[1] - (self.reference_y - self.radius);
                (dx.atan2(dy), self.radius - (dx * dx + dy * dy).sqrt())
            }
        };
        if alpha.abs() >= PI {
            return None;
        }
        Some([self.center_x + alpha * self.radius, self.reference_y - h])
    }

    fn fit(&self, p: Point2) -> Point2 {
        let (w, h) = self.canvas;
        [
            (p[0] - self.warped_center[0]) * self.scale + w as f64 / 2.0,
            (p[1] - self.warped_center[1]) * self.scale + h as f64 / 2.0,
        ]
    }

    fn unfit(&self, p: Point2) -> Point2 {
        let (w, h) = self.canvas;
        [
            (p[0] - w as f64 / 2.0) / self.scale + self.warped_center[0],
            (p[1] - h as f64 / 2.0) / self.scale + self.warped_center[1],
        ]
    }

    /// Full forward map from a source canvas point to the output canvas.
    pub fn forward(&self, p: Point2) -> Point2 {
        self.fit(self.bend(p))
    }
}

/// Computes the arc geometry for `mask`; `None` for the 0° level or a blank mask.
///
/// The ink's middle row is bent onto an arc whose length equals the ink width,
/// so it spans the full angle; rows above and below follow concentric arcs, the
/// baseline included. The radius never drops below half the ink height plus one
/// pixel, which keeps the polar map one-to-one for short, tall words.
pub fn arc_layout(mask: &TextMask, params: &ArcParams) -> Option<ArcLayout> {
    if params.total_angle == 0 {
        return None;
    }
    let (x0, y0, x1, y1) = mask.ink_bbox()?;
    let angle = (params.total_angle as f64).to_radians();
    let ink_w = (x1 - x0) as f64;
    let reference_y = 0.5 * (y0 + y1) as f64;
    let radius = (ink_w / angle).max(0.5 * (y1 - y0) as f64 + 1.0);

    let mut layout = ArcLayout {
        direction: params.direction,
        center_x: 0.5 * (x0 + x1) as f64,
        reference_y,
        radius,
        scale: 1.0,
        warped_center: [0.0, 0.0],
        canvas: (mask.width(), mask.height()),
    };

    // Trace the padded ink box outline; the polar map sends box edges to the
    // boundary of the warped region.
    let (bx0, by0, bx1, by1) = (x0 as f64 - 1.0, y0 as f64 - 1.0, x1 as f64 + 1.0, y1 as f64 + 1.0);
    let mut min = [f64::MAX; 2];
    let mut max = [f64::MIN; 2];
    let steps = 4 * ((bx1 - bx0).max(by1 - by0) as usize + 1);
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let xs = bx0 + t * (bx1 - bx0);
        let ys = by0 + t * (by1 - by0);
        for p in [[xs, by0], [xs, by1], [bx0, ys], [bx1, ys]] {
            let q = layout.bend(p);
            for k in 0..2 {
                min[k] = min[k].min(q[k]);
                max[k] = max[k].max(q[k]);
            }
        }
    }
    let (w, h) = (mask.width() as f64, mask.height() as f64);
    layout.warped_center = [0.5 * (min[0] + max[0]), 0.5 * (min[1] + max[1])];
    layout.scale = 1.0f64.min(w / (max[0] - min[0])).min(h / (max[1] - min[1]));
    Some(layout)
}

fn sample_bilinear(img: &GrayImage, x: f64, y: f64) -> f64 {
    let fx = x - 0.5;
    let fy = y - 0.5;
    let x0 = fx.floor();
    let y0 = fy.floor();
    let (ax, ay) = (fx - x0, fy - y0);
    let (x0, y0) = (x0 as i64, y0 as i64);
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut acc = 0.0;
    for (px, py, wt) in [
        (x0, y0, (1.0 - ax) * (1.0 - ay)),
        (x0 + 1, y0, ax * (1.0 - ay)),
        (x0, y0 + 1, (1.0 - ax) * ay),
        (x0 + 1, y0 + 1, ax * ay),
    ] {
        if wt > 0.0 && px >= 0 && py >= 0 && px < w && py < h {
            acc += wt * img.get_pixel(px as u32, py as u32).0[0] as f64;
        }
    }
    acc
}

/// Bends the text baseline onto a circular arc of the requested total angle,
/// then rescales the result to fit the original canvas. 0° returns the input unchanged.
pub fn arc_warp(mask: &TextMask, params: &ArcParams) -> TextMask {
    let Some(layout) = arc_layout(mask, params) else {
        return mask.clone();
    };
    let (w, h) = (mask.width(), mask.height());
    let alpha = GrayImage::from_fn(w, h, |x, y| {
        let q = layout.unfit([x as f64 + 0.5, y as f64 + 0.5]);
        match layout.unbend(q) {
            Some([sx, sy]) => Luma([sample_bilinear(&mask.alpha, sx, sy).round().clamp(0.0, 255.0) as u8]),
            None => Luma([0]),
        }
    });

    let (_, y0, _, y1) = mask.ink_bbox().expect("layout exists only for inked masks");
    let glyph_boxes = mask
        .glyph_boxes
        .iter()
        .map(|b| {
            let mut lo = f64::MAX;
            let mut hi = f64::MIN;
            for i in 0..=8 {
                let x = b.x_min + (b.x_max - b.x_min) * i as f64 / 8.0;
                for y in [y0 as f64, y1 as f64] {
                    let p = layout.forward([x, y]);
                    lo = lo.min(p[0]);
                    hi = hi.max(p[0]);
                }
            }
            GlyphBox {
                ch: b.ch,
                x_min: lo.max(0.0),
                x_max: hi.min(w as f64),
            }
        })
        .collect();
    let baseline_y = layout.forward([layout.center_x, mask.baseline_y])[1];
    TextMask {
        alpha,
        baseline_y,
        glyph_boxes,
    }
}

/// Warped coverage plus its normal and binary masks, all canvas-sized.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedText {
    pub alpha: GrayImage,
    /// Encoded normals over ink, `(0, 0, 0)` elsewhere.
    pub normals: RgbImage,
    /// 255 where `alpha > 127`, 0 elsewhere.
    pub binary: GrayImage,
}

impl WarpedText {
    pub fn width(&self) -> u32 {
        self.alpha.width()
    }

    pub fn height(&self) -> u32 {
        self.alpha.height()
    }

    pub fn ink_pixels(&self) -> usize {
        self.binary.pixels().filter(|p| p.0[0] > 0).count()
    }
}

fn binarize(alpha: &GrayImage) -> GrayImage {
    GrayImage::from_fn(alpha.width(), alpha.height(), |x, y| {
        Luma([if alpha.get_pixel(x, y).0[0] > BINARY_THRESHOLD {
            255
        } else {
            0
        }])
    })
}

/// Uniformly scales (never enlarges) and recenters a set of centered points so
/// their bounding box fits the canvas. Returns canvas coordinates.
fn fit_to_canvas(points: &[Point2], w: u32, h: u32) -> Vec<Point2> {
    let (mut min, mut max) = ([f64::MAX; 2], [f64::MIN; 2]);
    for p in points {
        for k in 0..2 {
            min[k] = min[k].min(p[k]);
            max[k] = max[k].max(p[k]);
        }
    }
    let (w, h) = (w as f64, h as f64);
    let s = 1.0f64.min(w / (max[0] - min[0])).min(h / (max[1] - min[1]));
    let c = [0.5 * (min[0] + max[0]), 0.5 * (min[1] + max[1])];
    points
        .iter()
        .map(|p| [(p[0] - c[0]) * s + w / 2.0, (p[1] - c[1]) * s + h / 2.0])
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatRender {
    pub text: WarpedText,
    /// Maps source mask pixels to output canvas pixels.
    pub homography: Homography,
    pub normal: UnitNormal,
    pub encoded: EncodedNormal,
}

/// Rotates the whole text plane, projects it and warps the mask into a canvas
/// of the same size. The projected quad is shrunk to fit when it overflows.
pub fn render_flat(mask: &TextMask, spec: &RotationSpec, cam: &CameraModel) -> Result<FlatRender> {
    let (w, h) = (mask.width(), mask.height());
    let rotation = compose_rotation(spec)?;
    let projected = project_quad(w as f64 / 2.0, h as f64 / 2.0, &rotation, cam)?;
    let fitted = fit_to_canvas(&projected, w, h);
    let dst = [fitted[0], fitted[1], fitted[2], fitted[3]];
    let src = [[0.0, 0.0], [w as f64, 0.0], [w as f64, h as f64], [0.0, h as f64]];
    let homography = homography_from_quads(&src, &dst)?;
    let alpha = warp_image(&mask.alpha, &homography, w, h, Sampling::Bilinear)?;
    let normal = plane_normal(&rotation)?;
    let encoded = encode_normal(&normal);
    let binary = binarize(&alpha);
    let color = Rgb(encoded.to_rgb());
    let normals = RgbImage::from_fn(w, h, |x, y| {
        if binary.get_pixel(x, y).0[0] > 0 {
            color
        } else {
            Rgb([0, 0, 0])
        }
    });
    Ok(FlatRender {
        text: WarpedText {
            alpha,
            normals,
            binary,
        },
        homography,
        normal,
        encoded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BendParams {
    sweep_angle: f64,
}

impl BendParams {
    pub fn new(sweep_angle: f64) -> Result<Self> {
        if !(MIN_SWEEP_DEG..=MAX_SWEEP_DEG).contains(&sweep_angle) {
            return Err(Error::InvalidArgument(format!(
                "sweep {sweep_angle}° outside [{MIN_SWEEP_DEG}, {MAX_SWEEP_DEG}]"
            )));
        }
        Ok(BendParams { sweep_angle })
    }

    pub fn sweep_angle(&self) -> f64 {
        self.sweep_angle
    }
}

/// Station angle of each glyph: first glyph at `-sweep/2`, last at `+sweep/2`,
/// the rest placed proportionally to their center's distance along the word.
pub fn station_angles(boxes: &[GlyphBox], sweep_deg: f64) -> Result<Vec<f64>> {
    match boxes {
        [] => Err(Error::InvalidArgument("bend needs at least one glyph".into())),
        [_] => Ok(vec![0.0]),
        [first, .., last] => {
            let (c0, c1) = (first.center(), last.center());
            if c0.is_nan() || c1.is_nan() || c1 <= c0 {
                return Err(Error::InvalidArgument(
                    "glyph boxes are not ordered left to right".into(),
                ));
            }
            let stations: Vec<f64> = boxes
                .iter()
                .map(|b| -sweep_deg / 2.0 + sweep_deg * (b.center() - c0) / (c1 - c0))
                .collect();
            if stations.windows(2).any(|p| p[1].is_nan() || p[1] <= p[0]) {
                return Err(Error::InvalidArgument(
                    "glyph centers are not strictly increasing".into(),
                ));
            }
            Ok(stations)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BendRender {
    pub text: WarpedText,
    pub stations: Vec<f64>,
    pub colors: Vec<EncodedNormal>,
}

/// Places each glyph on a plane tangent to a vertical cylinder at its station
/// angle, projects the planes and composites them into one canvas.
///
/// Columns of the mask are split between neighbouring glyphs halfway across the
/// gap (or overlap) between their boxes. Where warped glyphs overlap, the
/// glyph with the smaller `|station|` is in front; a pixel's normal comes from
/// the front-most glyph that is solid there (`alpha > 127`), falling back to the
/// glyph with the largest coverage.
pub fn cylinder_bend(mask: &TextMask, params: &BendParams, cam: &CameraModel) -> Result<BendRender> {
    let boxes = &mask.glyph_boxes;
    let stations = station_angles(boxes, params.sweep_angle)?;
    let n = boxes.len();
    let (w, h) = (mask.width(), mask.height());
    let (wf, hf) = (w as f64, h as f64);

    let c_first = boxes[0].center();
    let c_last = boxes[n - 1].center();
    let front_x = 0.5 * (c_first + c_last) - wf / 2.0;
    let radius = if n > 1 {
        (c_last - c_first) / params.sweep_angle.to_radians()
    } else {
        0.0
    };

    let mut cuts = Vec::with_capacity(n + 1);
    cuts.push(0u32);
    for pair in boxes.windows(2) {
        let mid = (0.5 * (pair[0].x_max + pair[1].x_min)).round().clamp(0.0, wf) as u32;
        cuts.push(mid.max(*cuts.last().unwrap()));
    }
    cuts.push(w);

    struct Strip {
        lo: u32,
        hi: u32,
        quad: [Point2; 4],
    }
    let mut strips = Vec::with_capacity(n);
    let mut corners = Vec::with_capacity(4 * n);
    for i in 0..n {
        let (lo, hi) = (cuts[i], cuts[i + 1]);
        if hi <= lo {
            strips.push(Strip {
                lo,
                hi,
                quad: [[0.0; 2]; 4],
            });
            continue;
        }
        let phi = stations[i];
        let (s, c) = phi.to_radians().sin_cos();
        let delta = 0.5 * (lo + hi) as f64 - boxes[i].center();
        let offset = [
            front_x + radius * s + c * delta,
            0.0,
            radius * (1.0 - c) + s * delta,
        ];
        let quad = project_quad_at((hi - lo) as f64 / 2.0, hf / 2.0, &rot_yaw(phi)?, offset, cam)?;
        corners.extend_from_slice(&quad);
        strips.push(Strip { lo, hi, quad });
    }
    let fitted = fit_to_canvas(&corners, w, h);

    let colors: Vec<EncodedNormal> = stations
        .iter()
        .map(|&phi| Ok(encode_normal(&plane_normal(&rot_yaw(phi)?)?)))
        .collect::<Result<_>>()?;

    // Warp each strip into its own layer.
    let mut layers: Vec<Option<GrayImage>> = Vec::with_capacity(n);
    let mut k = 0;
    for strip in &strips {
        if strip.hi <= strip.lo {
            layers.push(None);
            continue;
        }
        let dst = [fitted[k], fitted[k + 1], fitted[k + 2], fitted[k + 3]];
        k += 4;
        debug_assert!(strip.quad.iter().all(|p| p[0].is_finite()));
        let sw = strip.hi - strip.lo;
        let sub = image::imageops::crop_imm(&mask.alpha, strip.lo, 0, sw, h).to_image();
        let src = [[0.0, 0.0], [sw as f64, 0.0], [sw as f64, hf], [0.0, hf]];
        let hmg = homography_from_quads(&src, &dst)?;
        layers.push(Some(warp_image(&sub, &hmg, w, h, Sampling::Bilinear)?));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| stations[a].abs().total_cmp(&stations[b].abs()).then(a.cmp(&b)));

    let mut alpha = GrayImage::new(w, h);
    let mut normals = RgbImage::new(w, h);
    let mut binary = GrayImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0f64;
            let mut solid: Option<usize> = None;
            let mut strongest: Option<(usize, u8)> = None;
            for &g in &order {
                let Some(layer) = &layers[g] else { continue };
                let a = layer.get_pixel(x, y).0[0];
                if a == 0 {
                    continue;
                }
                let af = a as f64 / 255.0;
                acc += af * (1.0 - acc);
                if solid.is_none() && a > BINARY_THRESHOLD {
                    solid = Some(g);
                }
                if strongest.is_none_or(|(_, best)| a > best) {
                    strongest = Some((g, a));
                }
            }
            let a = (acc * 255.0).round().clamp(0.0, 255.0) as u8;
            alpha.put_pixel(x, y, Luma([a]));
            if a > BINARY_THRESHOLD {
                binary.put_pixel(x, y, Luma([255]));
                let g = solid
                    .or(strongest.map(|(g, _)| g))
                    .expect("ink implies a contributing glyph");
                normals.put_pixel(x, y, Rgb(colors[g].to_rgb()));
            }
        }
    }

    Ok(BendRender {
        text: WarpedText {
            alpha,
            normals,
            binary,
        },
        stations,
        colors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry3d::{decode_normal, OrderPolicy};
    use crate::textraster::{load_fonts, rasterize, FontSet};
    use std::collections::BTreeMap;
    use std::path::Path;

    fn fonts() -> FontSet {
        load_fonts(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/fonts")).unwrap()
    }

    fn mask(text: &str) -> TextMask {
        rasterize(text, "DejaVuSans.ttf", &fonts(), 256, 64).unwrap()
    }

    #[test]
    fn arc_zero_is_identity() {
        let m = mask("hello");
        let out = arc_warp(&m, &ArcParams::new(0, ArcDirection::ArchDown).unwrap());
        assert_eq!(out, m);
    }

    #[test]
    fn arc_levels_validated() {
        assert!(ArcParams::new(90, ArcDirection::ArchUp).is_err());
    }

    #[test]
    fn arc_forward_inverse_agree() {
        let m = mask("HELLO");
        for dir in [ArcDirection::ArchUp, ArcDirection::ArchDown] {
            let layout = arc_layout(&m, &ArcParams::new(120, dir).unwrap()).unwrap();
            for p in [[60.0, 20.0], [128.0, 40.0], [190.0, 30.0]] {
                let back = layout.unbend(layout.bend(p)).unwrap();
                assert!((back[0] - p[0]).abs() < 1e-9 && (back[1] - p[1]).abs() < 1e-9);
            }
        }
    }

    /// Coverage-weighted mean row of the ink within a column range.
    fn column_centroid(img: &GrayImage, x0: f64, x1: f64) -> f64 {
        let (a, b) = (x0.floor().max(0.0) as u32, (x1.ceil() as u32).min(img.width()));
        let (mut m, mut my) = (0.0, 0.0);
        for y in 0..img.height() {
            for x in a..b {
                let v = img.get_pixel(x, y).0[0] as f64;
                m += v;
                my += v * (y as f64 + 0.5);
            }
        }
        my / m
    }

    #[test]
    fn arch_up_lifts_ends_symmetrically() {
        let m = mask("HELLO");
        let params = ArcParams::new(120, ArcDirection::ArchUp).unwrap();
        let out = arc_warp(&m, &params);
        let first = out.glyph_boxes.first().unwrap();
        let last = out.glyph_boxes.last().unwrap();
        let mid = &out.glyph_boxes[2];
        let y_mid = column_centroid(&out.alpha, mid.x_min, mid.x_max);
        let left_lift = y_mid - column_centroid(&out.alpha, first.x_min, first.x_max);
        let right_lift = y_mid - column_centroid(&out.alpha, last.x_min, last.x_max);
        assert!(left_lift > 0.0 && right_lift > 0.0, "{left_lift} {right_lift}");
        assert!(
            (left_lift - right_lift).abs() <= 2.0,
            "{left_lift} vs {right_lift}"
        );

        // the forward map of the outer glyph box corners agrees on the symmetry
        let layout = arc_layout(&m, &params).unwrap();
        let src_first = m.glyph_boxes.first().unwrap();
        let src_last = m.glyph_boxes.last().unwrap();
        let l = layout.forward([src_first.x_min, m.baseline_y]);
        let r = layout.forward([src_last.x_max, m.baseline_y]);
        assert!((l[1] - r[1]).abs() <= 2.0);
    }

    #[test]
    fn arc_keeps_ink_and_mass() {
        for text in ["HELLO", "typography", "I", "Wq"] {
            let m = mask(text);
            for level in [60, 120] {
                for dir in [ArcDirection::ArchUp, ArcDirection::ArchDown] {
                    let params = ArcParams::new(level, dir).unwrap();
                    let out = arc_warp(&m, &params);
                    let layout = arc_layout(&m, &params).unwrap();
                    let expected = m.ink_mass() as f64 * layout.scale * layout.scale;
                    let ratio = out.ink_mass() as f64 / expected;
                    assert!(
                        (0.85..=1.15).contains(&ratio),
                        "{text} {level} {dir:?}: ratio {ratio}"
                    );
                    assert_eq!(out.glyph_boxes.len(), m.glyph_boxes.len());
                }
            }
            let twice = arc_warp(
                &arc_warp(&m, &ArcParams::new(60, ArcDirection::ArchDown).unwrap()),
                &ArcParams::new(60, ArcDirection::ArchDown).unwrap(),
            );
            assert!(twice.ink_bbox().is_some());
        }
    }

    #[test]
    fn flat_identity_is_identity() {
        let m = mask("hello");
        let cam = CameraModel::for_canvas(256, 64);
        let r = render_flat(&m, &RotationSpec::identity(), &cam).unwrap();
        for (a, b) in r
            .homography
            .0
            .iter()
            .flatten()
            .zip(Homography::IDENTITY.0.iter().flatten())
        {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(r.text.alpha, m.alpha);
        assert_eq!(r.encoded, EncodedNormal::new(128, 128, 255));
    }

    #[test]
    fn flat_normal_mask_single_color() {
        let m = mask("perspective");
        let cam = CameraModel::for_canvas(256, 64);
        let spec = RotationSpec::new(-30.0, 50.0, -65.0, OrderPolicy::NearField).unwrap();
        let r = render_flat(&m, &spec, &cam).unwrap();
        let c = r.encoded.to_rgb();
        for (n, b) in r.text.normals.pixels().zip(r.text.binary.pixels()) {
            if b.0[0] > 0 {
                assert_eq!(n.0, c);
            } else {
                assert_eq!(n.0, [0, 0, 0]);
            }
        }
        assert!(r.text.ink_pixels() > 0);
    }

    #[test]
    fn station_angles_span_sweep() {
        let m = mask("HELLO");
        let s = station_angles(&m.glyph_boxes, 120.0).unwrap();
        assert_eq!(s.len(), 5);
        assert!((s[0] + 60.0).abs() < 1e-12 && (s[4] - 60.0).abs() < 1e-12);
        assert!(s.windows(2).all(|p| p[1] > p[0]));
        // symmetric about zero within one glyph-width quantum
        let quantum = 120.0 * m.glyph_boxes.iter().map(|b| b.width()).fold(0.0, f64::max)
            / (m.glyph_boxes[4].center() - m.glyph_boxes[0].center());
        assert!(s[2].abs() <= quantum);
    }

    #[test]
    fn single_glyph_bend_faces_camera() {
        let m = mask("A");
        let cam = CameraModel::for_canvas(256, 64);
        let r = cylinder_bend(&m, &BendParams::new(60.0).unwrap(), &cam).unwrap();
        assert_eq!(r.stations, vec![0.0]);
        assert!(r.text.ink_pixels() > 0);
        for (n, b) in r.text.normals.pixels().zip(r.text.binary.pixels()) {
            if b.0[0] > 0 {
                assert_eq!(n.0, [128, 128, 255]);
            }
        }
    }

    #[test]
    fn hello_bend_has_monotonic_per_glyph_normals() {
        let m = mask("HELLO");
        let cam = CameraModel::for_canvas(256, 64);
        let r = cylinder_bend(&m, &BendParams::new(120.0).unwrap(), &cam).unwrap();

        // per colour: pixel count and mean x
        let mut by_color: BTreeMap<[u8; 3], (u64, f64)> = BTreeMap::new();
        for (x, _, p) in r.text.normals.enumerate_pixels() {
            if p.0 != [0, 0, 0] {
                let e = by_color.entry(p.0).or_default();
                e.0 += 1;
                e.1 += x as f64;
            }
        }
        assert_eq!(by_color.len(), 5);
        let mut glyphs: Vec<(f64, f64)> = by_color
            .iter()
            .map(|(c, (n, sx))| {
                (
                    sx / *n as f64,
                    decode_normal(EncodedNormal::from_rgb(*c)).yaw_deg(),
                )
            })
            .collect();
        glyphs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let yaws: Vec<f64> = glyphs.iter().map(|g| g.1).collect();
        assert!(yaws.windows(2).all(|p| p[1] > p[0]), "{yaws:?}");
        let span = yaws[4] - yaws[0];
        assert!((span - 120.0).abs() <= 5.0, "span {span}");

        let ink = r.text.binary.pixels().filter(|p| p.0[0] > 0).count();
        let solid = r
            .text
            .alpha
            .pixels()
            .filter(|p| p.0[0] > BINARY_THRESHOLD)
            .count();
        assert_eq!(ink, solid);
    }

    #[test]
    fn bend_sweep_validated() {
        assert!(BendParams::new(20.0).is_err());
        assert!(BendParams::new(121.0).is_err());
        assert!(BendParams::new(30.0).is_ok());
    }
}
