//! Projects the text plane through the pinhole camera, fits a homography to
//! the projected corners and warps a rendered word with it.
//!
//! cargo run --example perspective_warp [OUT_DIR]

mod support;

use syn3dtxt::geometry3d::{
    compose_rotation, homography_from_quads, project_quad, CameraModel, OrderPolicy, RotationSpec,
};
use syn3dtxt::textraster::{load_fonts, rasterize};
use syn3dtxt::warp::render_flat;

fn main() -> syn3dtxt::Result<()> {
    let cam = CameraModel::for_canvas(256, 64);
    println!("camera f={} d={}", cam.focal_length, cam.plane_distance);

    let spec = RotationSpec::new(0.0, 0.0, 60.0, OrderPolicy::FarField)?;
    let quad = project_quad(128.0, 32.0, &compose_rotation(&spec)?, &cam)?;
    println!("yaw 60° corners (TL, TR, BR, BL): {quad:.3?}");
    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let h = homography_from_quads(&square, &quad)?;
    for (s, d) in square.iter().zip(&quad) {
        let p = h.apply(*s).expect("finite");
        println!("  {s:?} -> ({:.6}, {:.6}) target {d:.6?}", p[0], p[1]);
    }

    let fonts = load_fonts(support::fonts_dir())?;
    let mask = rasterize("Perspective", &fonts.entries()[0].font_id, &fonts, 256, 64)?;
    let out = support::out_dir("perspective_warp");
    for (i, (g, t, p)) in [
        (0.0, 0.0, 0.0),
        (0.0, 45.0, 0.0),
        (0.0, 0.0, 60.0),
        (30.0, -45.0, 45.0),
    ]
    .into_iter()
    .enumerate()
    {
        let flat = render_flat(&mask, &RotationSpec::new(g, t, p, OrderPolicy::NearField)?, &cam)?;
        let path = out.join(format!("warp_{i}.png"));
        flat.text.alpha.save(&path).expect("save");
        println!(
            "γ={g} θ={t} φ={p}: normal {} rgb {} -> {}",
            flat.normal,
            flat.encoded,
            path.display()
        );
    }
    Ok(())
}
