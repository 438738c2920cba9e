use std::fmt;

use serde::{Deserialize, Serialize};

use super::rotation::Mat4;
use crate::error::{Error, Result};

const UNIT_TOLERANCE: f64 = 1e-6;

/// Unit-length surface normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitNormal {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitNormal {
    pub const FACING: UnitNormal = UnitNormal {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Accepts a vector whose norm is within 1e-6 of one and renormalizes it.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "normal ({x}, {y}, {z}) has norm {norm}, expected 1"
            )));
        }
        Ok(UnitNormal {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Normalizes any finite non-zero vector.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize ({x}, {y}, {z})"
            )));
        }
        Ok(UnitNormal {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Spherical form `(sinθ·cosφ, sinθ·sinφ, cosθ)` with polar angle θ and azimuth φ.
    pub fn from_spherical(polar_deg: f64, azimuth_deg: f64) -> Result<Self> {
        if !polar_deg.is_finite() || !azimuth_deg.is_finite() {
            return Err(Error::InvalidArgument("spherical angles must be finite".into()));
        }
        let (st, ct) = polar_deg.to_radians().sin_cos();
        let (sp, cp) = azimuth_deg.to_radians().sin_cos();
        Self::normalize(st * cp, st * sp, ct)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn angle_to(&self, other: &UnitNormal) -> f64 {
        let dot = (self.x * other.x + self.y * other.y + self.z * other.z).clamp(-1.0, 1.0);
        dot.acos().to_degrees()
    }

    /// Yaw that turns the facing normal into this one under the yaw matrix
    /// convention, ignoring any vertical component.
    pub fn yaw_deg(&self) -> f64 {
        (-self.x).atan2(self.z).to_degrees()
    }
}

impl fmt::Display for UnitNormal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6}, {:.6})", self.x, self.y, self.z)
    }
}

/// A normal quantized to 8-bit RGB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EncodedNormal {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl EncodedNormal {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        EncodedNormal { r, g, b }
    }

    pub fn to_rgb(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }

    pub fn from_rgb(rgb: [u8; 3]) -> Self {
        EncodedNormal::new(rgb[0], rgb[1], rgb[2])
    }
}

impl fmt::Display for EncodedNormal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.r, self.g, self.b)
    }
}

/// Orientation of the rotated text plane: the linear block applied to `(0, 0, 1)`.
pub fn plane_normal(rotation: &Mat4) -> Result<UnitNormal> {
    let [x, y, z] = rotation.transform_vector([0.0, 0.0, 1.0]);
    UnitNormal::new(x, y, z)
}

fn quantize(c: f64) -> u8 {
    // f64::round rounds half away from zero
    (255.0 * (c + 1.0) / 2.0).round().clamp(0.0, 255.0) as u8
}

fn dequantize(b: u8) -> f64 {
    2.0 * (b as f64 / 255.0) - 1.0
}

/// Maps each component from `[-1, 1]` to `round(255·(c+1)/2)`.
pub fn encode_normal(n: &UnitNormal) -> EncodedNormal {
    EncodedNormal {
        r: quantize(n.x),
        g: quantize(n.y),
        b: quantize(n.z),
    }
}

pub fn decode_normal(e: EncodedNormal) -> UnitNormal {
    let (x, y, z) = (dequantize(e.r), dequantize(e.g), dequantize(e.b));
    // Each channel is at least 1/255 away from zero, so the vector never vanishes.
    UnitNormal::normalize(x, y, z).expect("decoded normal is never zero")
}

/// Norm of the decoded vector before renormalization.
pub fn decoded_norm(e: EncodedNormal) -> f64 {
    let (x, y, z) = (dequantize(e.r), dequantize(e.g), dequantize(e.b));
    (x * x + y * y + z * z).sqrt()
}
