//! Rotation algebra, pinhole projection of the text plane, homographies,
//! surface-normal encoding and image resampling.
//!
//! Every function here is pure; nothing holds shared state.

mod homography;
mod normal;
mod projection;
mod resample;
mod rotation;

pub use homography::{homography_from_quads, Homography};
pub use normal::{decode_normal, decoded_norm, encode_normal, plane_normal, EncodedNormal, UnitNormal};
pub use projection::{project_quad, project_quad_at, quad_corners, CameraModel, Point2, NEAR_LIMIT_FRACTION};
pub use resample::{warp_image, Sampling};
pub use rotation::{
    compose_rotation, rot_pitch, rot_roll, rot_yaw, select_order_policy, select_order_policy_with_threshold,
    Mat4, OrderPolicy, RotationSpec, DEFAULT_FAR_FIELD_THRESHOLD_DEG,
};
