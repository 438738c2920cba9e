#![allow(dead_code)]

use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};
use syn3dtxt::dataset_io::DatasetConfig;
use tempfile::TempDir;

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fonts_dir() -> PathBuf {
    manifest_dir().join("tests/fixtures/fonts")
}

pub fn corpus_path() -> PathBuf {
    manifest_dir().join("tests/fixtures/words.txt")
}

/// Writes a small pool of procedural backgrounds, including one smaller than
/// the canvas and a few JPEGs.
pub fn write_backgrounds(dir: &Path) {
    std::fs::create_dir_all(dir).unwrap();
    let specs: [(&str, u32, u32, u32); 6] = [
        ("street.png", 640, 480, 1),
        ("wall.jpg", 320, 240, 2),
        ("tiny.png", 100, 30, 3),
        ("tiles.jpg", 512, 512, 4),
        ("banner.png", 300, 80, 5),
        ("sky.jpg", 1024, 200, 6),
    ];
    for (name, w, h, seed) in specs {
        let mut state = 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(seed as u64 + 1);
        let mut noise = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 40) as i32 - 20
        };
        let img = RgbImage::from_fn(w, h, |x, y| {
            let base = [
                (x * 255 / w) as i32,
                (y * 255 / h) as i32,
                if (x / 32 + y / 32 + seed) % 2 == 0 {
                    60
                } else {
                    190
                },
            ];
            Rgb(base.map(|c| (c + noise()).clamp(0, 255) as u8))
        });
        img.save(dir.join(name)).unwrap();
    }
}

pub struct Fixture {
    pub tmp: TempDir,
    pub backgrounds: PathBuf,
}

impl Fixture {
    pub fn new() -> Self {
        let tmp = TempDir::new().unwrap();
        let backgrounds = tmp.path().join("backgrounds");
        write_backgrounds(&backgrounds);
        Fixture { tmp, backgrounds }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.tmp.path().join(rel)
    }

    pub fn config(&self, out: &str, count: u64, seed: u64, bend_fraction: f64) -> DatasetConfig {
        DatasetConfig {
            corpus: corpus_path(),
            fonts_dir: fonts_dir(),
            backgrounds_dir: self.backgrounds.clone(),
            output_dir: self.path(out),
            count,
            seed,
            bend_fraction,
            canvas_width: 256,
            canvas_height: 64,
            focal_length: None,
            plane_distance: None,
            workers: None,
            charset: None,
        }
    }
}

/// SHA-256 of every file under `root`, keyed by relative path.
pub fn tree_hashes(root: &Path) -> std::collections::BTreeMap<String, String> {
    use sha2::{Digest, Sha256};
    let mut out = std::collections::BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let bytes = std::fs::read(&p).unwrap();
                let digest = Sha256::digest(&bytes);
                let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
                out.insert(p.strip_prefix(root).unwrap().to_string_lossy().into_owned(), hex);
            }
        }
    }
    out
}
