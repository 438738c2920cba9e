//! Arc distortion at every level and direction, then per-glyph cylinder
//! bending with its multi-colour normal mask.
//!
//! cargo run --example arc_and_bend [OUT_DIR]

mod support;

use image::{GrayImage, RgbImage};
use syn3dtxt::geometry3d::CameraModel;
use syn3dtxt::textraster::{load_fonts, rasterize};
use syn3dtxt::warp::{arc_warp, cylinder_bend, ArcDirection, ArcParams, BendParams, ARC_LEVELS};

fn main() -> syn3dtxt::Result<()> {
    let fonts = load_fonts(support::fonts_dir())?;
    let font = &fonts.entries()[0].font_id;
    let out = support::out_dir("arc_and_bend");
    let mask = rasterize("HELLO", font, &fonts, 256, 64)?;

    let mut sheet = GrayImage::new(256 * 2, 64 * ARC_LEVELS.len() as u32);
    for (row, level) in ARC_LEVELS.iter().enumerate() {
        for (col, dir) in [ArcDirection::ArchUp, ArcDirection::ArchDown]
            .into_iter()
            .enumerate()
        {
            let warped = arc_warp(&mask, &ArcParams::new(*level, dir)?);
            image::imageops::replace(&mut sheet, &warped.alpha, 256 * col as i64, 64 * row as i64);
            println!(
                "arc {level:>3}° {:<9} ink mass {}",
                dir.as_str(),
                warped.ink_mass()
            );
        }
    }
    sheet.save(out.join("arcs.png")).expect("save arcs");

    let cam = CameraModel::for_canvas(256, 64);
    let sweeps = [30.0, 75.0, 120.0];
    let mut normals = RgbImage::new(256, 64 * sweeps.len() as u32);
    for (row, sweep) in sweeps.iter().enumerate() {
        let bent = cylinder_bend(&mask, &BendParams::new(*sweep)?, &cam)?;
        image::imageops::replace(&mut normals, &bent.text.normals, 0, 64 * row as i64);
        let stations: Vec<String> = bent.stations.iter().map(|s| format!("{s:+.1}")).collect();
        let colors: Vec<String> = bent.colors.iter().map(|c| c.to_string()).collect();
        println!("sweep {sweep:>5}°: stations [{}]", stations.join(", "));
        println!("              colours  {}", colors.join(" "));
    }
    normals.save(out.join("bend_normals.png")).expect("save normals");
    println!("wrote {}", out.display());
    Ok(())
}
