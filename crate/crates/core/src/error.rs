use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A rotated quad corner landed at or behind the camera's near limit.
    #[error("degenerate projection: corner depth {depth:.4} is not beyond near limit {near:.4}")]
    DegenerateProjection { depth: f64, near: f64 },

    #[error("degenerate homography: {0}")]
    DegenerateHomography(String),

    #[error("font `{font}` has no glyph for {ch:?}")]
    GlyphCoverage { font: String, ch: char },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("background pool error: {0}")]
    Pool(String),

    /// Source and target of a pair were rendered with different transforms or style.
    #[error("pairing contract violated: {0}")]
    PairingContract(String),

    #[error("sample {index}: resampling exhausted after {attempts} attempts ({last})")]
    ResampleExhausted { index: u64, attempts: u32, last: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },

    #[error("generation failed for {} sample(s): {}", failed.len(), summarize_failures(failed))]
    GenerationFailed { failed: Vec<(u64, String)> },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn image(path: impl Into<PathBuf>, source: image::ImageError) -> Self {
        Error::Image {
            path: path.into(),
            source,
        }
    }

    /// Errors caused by the environment or the invocation rather than by the data.
    pub fn is_usage_or_resource(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::Config(_)
                | Error::Pool(_)
                | Error::Io { .. }
                | Error::Image { .. }
        )
    }
}

fn summarize_failures(failed: &[(u64, String)]) -> String {
    let shown: Vec<String> = failed
        .iter()
        .take(10)
        .map(|(i, msg)| format!("#{i}: {msg}"))
        .collect();
    let mut out = shown.join("; ");
    if failed.len() > 10 {
        out.push_str(&format!("; and {} more", failed.len() - 10));
    }
    out
}
