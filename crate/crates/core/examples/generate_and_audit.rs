//! Generates a small dataset against procedural backgrounds, audits it and
//! prints its distribution tables.
//!
//! cargo run --release --example generate_and_audit [OUT_DIR]

mod support;

use image::{Rgb, RgbImage};
use syn3dtxt::audit::{dataset_stats, validate_dataset, AuditOptions};
use syn3dtxt::dataset_io::{generate_dataset, DatasetConfig};

fn main() -> syn3dtxt::Result<()> {
    let root = support::out_dir("generate_and_audit");
    let bg = root.join("backgrounds");
    std::fs::create_dir_all(&bg).expect("create backgrounds dir");
    for i in 0..4u32 {
        let img = RgbImage::from_fn(480, 320, |x, y| {
            Rgb([
                ((x + 40 * i) % 256) as u8,
                ((y * 3 + 60 * i) % 256) as u8,
                (((x ^ y) + i * 50) % 256) as u8,
            ])
        });
        img.save(bg.join(format!("bg_{i}.png"))).expect("save background");
    }
    let corpus = root.join("words.txt");
    std::fs::write(
        &corpus,
        "street\nHELLO\nCoffee\nmarket\nStation\nOPEN\nbakery\nTaxi\n",
    )
    .expect("corpus");

    let cfg = DatasetConfig {
        corpus,
        fonts_dir: support::fonts_dir(),
        backgrounds_dir: bg,
        output_dir: root.join("dataset"),
        count: 200,
        seed: 42,
        bend_fraction: 0.25,
        canvas_width: 256,
        canvas_height: 64,
        focal_length: None,
        plane_distance: None,
        workers: None,
        charset: None,
    };
    let summary = generate_dataset(&cfg)?;
    println!("{summary}");
    let report = validate_dataset(&cfg.output_dir, &AuditOptions::full())?;
    println!("{report}\n");
    println!("{}", dataset_stats(&cfg.output_dir)?);
    Ok(())
}
