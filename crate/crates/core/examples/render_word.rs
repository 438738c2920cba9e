//! Rasterizes a word in every available font and saves the alpha masks.
//!
//! cargo run --example render_word [OUT_DIR]   (word via SYN3DTXT_WORD)

mod support;

use syn3dtxt::textraster::{load_fonts, rasterize};

fn main() -> syn3dtxt::Result<()> {
    let word = std::env::var("SYN3DTXT_WORD").unwrap_or_else(|_| "Synthetic".into());
    let fonts = load_fonts(support::fonts_dir())?;
    let out = support::out_dir("render_word");
    for font in fonts.entries() {
        let mask = rasterize(&word, &font.font_id, &fonts, 256, 64)?;
        let path = out.join(format!("{}.png", font.display_name));
        mask.alpha.save(&path).expect("save mask");
        let (x0, y0, x1, y1) = mask.ink_bbox().expect("ink");
        println!(
            "{:<22} ink box ({x0},{y0})-({x1},{y1}) baseline {:.1} glyphs {} -> {}",
            font.font_id,
            mask.baseline_y,
            mask.glyph_boxes.len(),
            path.display()
        );
    }
    Ok(())
}
