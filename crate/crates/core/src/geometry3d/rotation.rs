use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angle below which a target counts as far away when picking an order policy.
pub const DEFAULT_FAR_FIELD_THRESHOLD_DEG: f64 = 10.0;

/// Homogeneous 3D transform, row-major, acting on column vectors.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat4(pub [[f64; 4]; 4]);

impl Mat4 {
    pub const IDENTITY: Mat4 = Mat4([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]);

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    /// Upper-left 3×3 block.
    pub fn linear(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[0][0], m[0][1], m[0][2]],
            [m[1][0], m[1][1], m[1][2]],
            [m[2][0], m[2][1], m[2][2]],
        ]
    }

    /// Applies the transform to a point (w = 1) and drops the homogeneous coordinate.
    pub fn transform_point(&self, p: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        let mut out = [0.0; 3];
        for (r, o) in out.iter_mut().enumerate() {
            *o = m[r][0] * p[0] + m[r][1] * p[1] + m[r][2] * p[2] + m[r][3];
        }
        out
    }

    /// Applies only the linear block (w = 0).
    pub fn transform_vector(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        let mut out = [0.0; 3];
        for (r, o) in out.iter_mut().enumerate() {
            *o = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2];
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).abs());
            }
        }
        worst
    }

    /// Largest deviation of the linear block from orthonormality, `max |MᵀM − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let a = self.linear();
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| a[k][i] * a[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn det3(&self) -> f64 {
        let a = self.linear();
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }
}

impl Mul for Mat4 {
    type Output = Mat4;

    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = [[0.0; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = (0..4).map(|k| self.0[r][k] * rhs.0[k][c]).sum();
            }
        }
        Mat4(out)
    }
}

impl fmt::Debug for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat4[")?;
        for row in &self.0 {
            writeln!(
                f,
                "  [{:>10.6} {:>10.6} {:>10.6} {:>10.6}]",
                row[0], row[1], row[2], row[3]
            )?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderPolicy {
    /// Close-up targets: pitch is applied before yaw.
    NearField,
    /// Distant targets: yaw is applied before pitch.
    FarField,
}

impl OrderPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderPolicy::NearField => "near_field",
            OrderPolicy::FarField => "far_field",
        }
    }
}

impl std::str::FromStr for OrderPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "near_field" | "near" => Ok(OrderPolicy::NearField),
            "far_field" | "far" => Ok(OrderPolicy::FarField),
            other => Err(Error::InvalidArgument(format!(
                "unknown order policy `{other}` (expected near_field or far_field)"
            ))),
        }
    }
}

/// Roll/pitch/yaw triple in degrees plus the composition order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec {
    pub roll_gamma: f64,
    pub pitch_theta: f64,
    pub yaw_phi: f64,
    pub order_policy: OrderPolicy,
}

impl RotationSpec {
    pub fn new(roll_gamma: f64, pitch_theta: f64, yaw_phi: f64, order_policy: OrderPolicy) -> Result<Self> {
        let spec = RotationSpec {
            roll_gamma,
            pitch_theta,
            yaw_phi,
            order_policy,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn identity() -> Self {
        RotationSpec {
            roll_gamma: 0.0,
            pitch_theta: 0.0,
            yaw_phi: 0.0,
            order_policy: OrderPolicy::FarField,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("roll", self.roll_gamma),
            ("pitch", self.pitch_theta),
            ("yaw", self.yaw_phi),
        ] {
            if !v.is_finite() || !(-90.0..=90.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "{name} angle {v} outside [-90, 90] degrees"
                )));
            }
        }
        Ok(())
    }
}

fn check_finite(name: &str, deg: f64) -> Result<()> {
    if deg.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} angle must be finite, got {deg}"
        )))
    }
}

/// Roll: mixes x and y, leaves the viewing axis fixed.
pub fn rot_roll(gamma_deg: f64) -> Result<Mat4> {
    check_finite("roll", gamma_deg)?;
    let (s, c) = gamma_deg.to_radians().sin_cos();
    Ok(Mat4([
        [c, -s, 0.0, 0.0],
        [s, c, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]))
}

/// Yaw: mixes x and z (rotation about the vertical axis).
pub fn rot_yaw(phi_deg: f64) -> Result<Mat4> {
    check_finite("yaw", phi_deg)?;
    let (s, c) = phi_deg.to_radians().sin_cos();
    Ok(Mat4([
        [c, 0.0, -s, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [s, 0.0, c, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]))
}

/// Pitch: mixes y and z (rotation about the horizontal axis).
pub fn rot_pitch(theta_deg: f64) -> Result<Mat4> {
    check_finite("pitch", theta_deg)?;
    let (s, c) = theta_deg.to_radians().sin_cos();
    Ok(Mat4([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]))
}

/// Composes the three rotations. Roll always acts first on points; the
/// policy decides whether pitch or yaw follows it.
///
/// * `NearField`: `Yaw · Pitch · Roll`
/// * `FarField`:  `Pitch · Yaw · Roll`
pub fn compose_rotation(spec: &RotationSpec) -> Result<Mat4> {
    spec.validate()?;
    let roll = rot_roll(spec.roll_gamma)?;
    let pitch = rot_pitch(spec.pitch_theta)?;
    let yaw = rot_yaw(spec.yaw_phi)?;
    Ok(match spec.order_policy {
        OrderPolicy::NearField => yaw * pitch * roll,
        OrderPolicy::FarField => pitch * yaw * roll,
    })
}

pub fn select_order_policy(height_y: f64, distance_x: f64) -> Result<OrderPolicy> {
    select_order_policy_with_threshold(height_y, distance_x, DEFAULT_FAR_FIELD_THRESHOLD_DEG)
}

/// Far field when the elevation angle `atan(y / x)` falls under the threshold.
pub fn select_order_policy_with_threshold(
    height_y: f64,
    distance_x: f64,
    threshold_deg: f64,
) -> Result<OrderPolicy> {
    if !(distance_x.is_finite() && distance_x > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "distance must be positive, got {distance_x}"
        )));
    }
    if !(height_y.is_finite() && height_y >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "height must be non-negative, got {height_y}"
        )));
    }
    let elevation = (height_y / distance_x).atan().to_degrees();
    Ok(if elevation < threshold_deg {
        OrderPolicy::FarField
    } else {
        OrderPolicy::NearField
    })
}
