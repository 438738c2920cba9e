#![allow(dead_code)]

use std::path::PathBuf;

/// Fonts from `SYN3DTXT_FONTS`, falling back to the bundled test fonts.
pub fn fonts_dir() -> PathBuf {
    std::env::var_os("SYN3DTXT_FONTS")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/fonts")))
}

/// Output directory from the first argument, or a temp subdirectory.
pub fn out_dir(name: &str) -> PathBuf {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("syn3dtxt-examples").join(name));
    std::fs::create_dir_all(&dir).expect("create output dir");
    dir
}
