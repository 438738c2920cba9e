use serde::{Deserialize, Serialize};

use super::rotation::Mat4;
use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

/// Fraction of the plane distance a corner must stay in front of the camera.
pub const NEAR_LIMIT_FRACTION: f64 = 0.1;

/// Pinhole camera looking down +z at a text plane centered on the optical axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub focal_length: f64,
    pub plane_distance: f64,
}

impl CameraModel {
    pub fn new(focal_length: f64, plane_distance: f64) -> Result<Self> {
        let cam = CameraModel {
            focal_length,
            plane_distance,
        };
        cam.validate()?;
        Ok(cam)
    }

    /// `f = d = 2·max(W, H)` for a canvas of the given size.
    pub fn for_canvas(width: u32, height: u32) -> Self {
        let d = 2.0 * width.max(height) as f64;
        CameraModel {
            focal_length: d,
            plane_distance: d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal_length.is_finite() && self.focal_length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "focal length must be positive, got {}",
                self.focal_length
            )));
        }
        if !self.plane_distance.is_finite() || self.plane_distance < self.focal_length {
            return Err(Error::InvalidArgument(format!(
                "plane distance {} must be at least the focal length {}",
                self.plane_distance, self.focal_length
            )));
        }
        Ok(())
    }

    pub fn near_limit(&self) -> f64 {
        NEAR_LIMIT_FRACTION * self.plane_distance
    }

    /// Projects a camera-space point, rejecting points at or behind the near limit.
    pub fn project(&self, p: [f64; 3]) -> Result<Point2> {
        let near = self.near_limit();
        if p[2].is_nan() || p[2] <= near {
            return Err(Error::DegenerateProjection { depth: p[2], near });
        }
        Ok([self.focal_length * p[0] / p[2], self.focal_length * p[1] / p[2]])
    }
}

/// Corners of the `2·half_w × 2·half_h` plane in the order
/// top-left, top-right, bottom-right, bottom-left (y grows downward).
pub fn quad_corners(half_w: f64, half_h: f64) -> [Point2; 4] {
    [
        [-half_w, -half_h],
        [half_w, -half_h],
        [half_w, half_h],
        [-half_w, half_h],
    ]
}

/// Rotates the plane corners, pushes them `plane_distance` down the optical
/// axis and projects them. Output is relative to the canvas center.
pub fn project_quad(half_w: f64, half_h: f64, rotation: &Mat4, cam: &CameraModel) -> Result<[Point2; 4]> {
    project_quad_at(half_w, half_h, rotation, [0.0, 0.0, 0.0], cam)
}

/// Like [`project_quad`] with the quad center displaced by `offset` (in plane
/// units, before the push along the optical axis).
pub fn project_quad_at(
    half_w: f64,
    half_h: f64,
    rotation: &Mat4,
    offset: [f64; 3],
    cam: &CameraModel,
) -> Result<[Point2; 4]> {
    cam.validate()?;
    if !(half_w > 0.0 && half_h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "quad half extents must be positive, got {half_w}×{half_h}"
        )));
    }
    let corners = quad_corners(half_w, half_h);
    let mut out = [[0.0; 2]; 4];
    for (dst, c) in out.iter_mut().zip(corners) {
        let r = rotation.transform_vector([c[0], c[1], 0.0]);
        let p = [
            r[0] + offset[0],
            r[1] + offset[1],
            r[2] + offset[2] + cam.plane_distance,
        ];
        *dst = cam.project(p)?;
    }
    Ok(out)
}
