//! Paints the RGB encoding of every visible hemisphere normal and prints the
//! encoding of a grid of plane orientations.
//!
//! cargo run --example normal_sphere [OUT_DIR]

mod support;

use image::{Rgb, RgbImage};
use syn3dtxt::geometry3d::{
    compose_rotation, decode_normal, encode_normal, plane_normal, OrderPolicy, RotationSpec, UnitNormal,
};

fn main() -> syn3dtxt::Result<()> {
    let out = support::out_dir("normal_sphere");
    let size = 256u32;
    let r = size as f64 / 2.0;
    let sphere = RgbImage::from_fn(size, size, |x, y| {
        let nx = (x as f64 + 0.5 - r) / r;
        let ny = (r - y as f64 - 0.5) / r;
        let d = nx * nx + ny * ny;
        if d >= 1.0 {
            return Rgb([0, 0, 0]);
        }
        let n = UnitNormal::normalize(nx, ny, (1.0 - d).sqrt()).expect("unit normal");
        Rgb(encode_normal(&n).to_rgb())
    });
    let path = out.join("sphere.png");
    sphere.save(&path).expect("save sphere");
    println!("wrote {}", path.display());

    println!("{:>6} {:>6}  {:<18} {:<16} error°", "θ", "φ", "rgb", "decoded");
    for theta in [-60.0, -30.0, 0.0, 30.0, 60.0] {
        for phi in [-60.0, 0.0, 60.0] {
            let spec = RotationSpec::new(0.0, theta, phi, OrderPolicy::FarField)?;
            let n = plane_normal(&compose_rotation(&spec)?)?;
            let e = encode_normal(&n);
            let back = decode_normal(e);
            println!(
                "{theta:>6} {phi:>6}  {:<18} ({:+.3},{:+.3},{:+.3}) {:.3}",
                e.to_string(),
                back.x(),
                back.y(),
                back.z(),
                back.angle_to(&n)
            );
        }
    }
    Ok(())
}
