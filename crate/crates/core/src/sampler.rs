//! Seeded draws for every stochastic choice in a sample.
//!
//! # Stream splitting
//!
//! Each sample owns independent random streams derived from
//! `(master_seed, sample_index, lane)`:
//!
//! 1. A 256-bit ChaCha8 key is filled with four consecutive SplitMix64 outputs
//!    whose state starts at `master_seed ^ (lane · 0x9E3779B97F4A7C15)`.
//! 2. The ChaCha stream id is set to `sample_index`.
//!
//! Streams for different indices never overlap, and a stream depends on nothing
//! but its triple, so samples can be drawn in any order or in parallel.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compositor::{contrast_score, CONTRAST_FLOOR};
use crate::error::{Error, Result};
use crate::geometry3d::{OrderPolicy, RotationSpec};
use crate::textraster::{FontSet, WordCorpus};
use crate::warp::{ArcDirection, ArcParams, BendParams, ARC_LEVELS, MAX_SWEEP_DEG, MIN_SWEEP_DEG};
use image::RgbImage;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Lane for content draws (words, font, kind, arc, colour, background).
pub const LANE_CONTENT: u32 = 0;
/// First rotation lane; attempt `k` uses lane `LANE_ROTATION + k`.
pub const LANE_ROTATION: u32 = 1;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-sample random stream.
#[derive(Debug, Clone)]
pub struct SampleRng {
    inner: ChaCha8Rng,
}

impl SampleRng {
    pub fn new(master_seed: u64, index: u64) -> Self {
        Self::lane(master_seed, index, LANE_CONTENT)
    }

    pub fn lane(master_seed: u64, index: u64, lane: u32) -> Self {
        let mut state = master_seed ^ (lane as u64).wrapping_mul(GOLDEN_GAMMA);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(index);
        SampleRng { inner }
    }
}

impl RngCore for SampleRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Which rotation axes are active in a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisCombination {
    Phi,
    Theta,
    Gamma,
    ThetaPhi,
    ThetaGamma,
    PhiGamma,
    ThetaPhiGamma,
}

impl AxisCombination {
    pub const ALL: [AxisCombination; 7] = [
        AxisCombination::Phi,
        AxisCombination::Theta,
        AxisCombination::Gamma,
        AxisCombination::ThetaPhi,
        AxisCombination::ThetaGamma,
        AxisCombination::PhiGamma,
        AxisCombination::ThetaPhiGamma,
    ];

    /// Share of samples, in whole percent.
    pub fn weight_percent(self) -> u32 {
        match self {
            AxisCombination::Phi
            | AxisCombination::Theta
            | AxisCombination::Gamma
            | AxisCombination::ThetaPhi => 20,
            AxisCombination::ThetaGamma | AxisCombination::PhiGamma => 5,
            AxisCombination::ThetaPhiGamma => 10,
        }
    }

    pub fn probability(self) -> f64 {
        self.weight_percent() as f64 / 100.0
    }

    pub fn has_theta(self) -> bool {
        matches!(
            self,
            AxisCombination::Theta
                | AxisCombination::ThetaPhi
                | AxisCombination::ThetaGamma
                | AxisCombination::ThetaPhiGamma
        )
    }

    pub fn has_phi(self) -> bool {
        matches!(
            self,
            AxisCombination::Phi
                | AxisCombination::ThetaPhi
                | AxisCombination::PhiGamma
                | AxisCombination::ThetaPhiGamma
        )
    }

    pub fn has_gamma(self) -> bool {
        matches!(
            self,
            AxisCombination::Gamma
                | AxisCombination::ThetaGamma
                | AxisCombination::PhiGamma
                | AxisCombination::ThetaPhiGamma
        )
    }

    pub fn axis_count(self) -> usize {
        [self.has_theta(), self.has_phi(), self.has_gamma()]
            .iter()
            .filter(|b| **b)
            .count()
    }

    pub fn label(self) -> &'static str {
        match self {
            AxisCombination::Phi => "phi",
            AxisCombination::Theta => "theta",
            AxisCombination::Gamma => "gamma",
            AxisCombination::ThetaPhi => "theta_phi",
            AxisCombination::ThetaGamma => "theta_gamma",
            AxisCombination::PhiGamma => "phi_gamma",
            AxisCombination::ThetaPhiGamma => "theta_phi_gamma",
        }
    }

    /// The combination whose active axes are exactly the non-zero angles.
    pub fn from_angles(theta: f64, phi: f64, gamma: f64) -> Option<Self> {
        match (theta != 0.0, phi != 0.0, gamma != 0.0) {
            (false, true, false) => Some(AxisCombination::Phi),
            (true, false, false) => Some(AxisCombination::Theta),
            (false, false, true) => Some(AxisCombination::Gamma),
            (true, true, false) => Some(AxisCombination::ThetaPhi),
            (true, false, true) => Some(AxisCombination::ThetaGamma),
            (false, true, true) => Some(AxisCombination::PhiGamma),
            (true, true, true) => Some(AxisCombination::ThetaPhiGamma),
            (false, false, false) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    /// Exactly 30°.
    Small,
    /// 45° to 60°.
    Medium,
    /// 65° to 70°.
    Large,
}

impl Magnitude {
    pub const ALL: [Magnitude; 3] = [Magnitude::Small, Magnitude::Medium, Magnitude::Large];

    pub fn label(self) -> &'static str {
        match self {
            Magnitude::Small => "small",
            Magnitude::Medium => "medium",
            Magnitude::Large => "large",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    /// Counter-clockwise, positive angles.
    Ccw,
    /// Clockwise, negative angles.
    Cw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngleCategory {
    pub magnitude: Magnitude,
    pub sense: Sense,
}

impl AngleCategory {
    /// Category of a signed angle, or `None` if it lies outside every range.
    pub fn classify(angle_deg: f64) -> Option<Self> {
        let a = angle_deg.abs();
        let magnitude = if a == 30.0 {
            Magnitude::Small
        } else if (45.0..=60.0).contains(&a) {
            Magnitude::Medium
        } else if (65.0..=70.0).contains(&a) {
            Magnitude::Large
        } else {
            return None;
        };
        let sense = if angle_deg < 0.0 { Sense::Cw } else { Sense::Ccw };
        Some(AngleCategory { magnitude, sense })
    }
}

pub fn sample_axis_combination(rng: &mut SampleRng) -> AxisCombination {
    let mut ticket = rng.random_range(0..100u32);
    for combo in AxisCombination::ALL {
        let w = combo.weight_percent();
        if ticket < w {
            return combo;
        }
        ticket -= w;
    }
    unreachable!("weights sum to 100")
}

/// Uniform magnitude category, then a value inside it, then a fair sign.
pub fn sample_angle(rng: &mut SampleRng) -> f64 {
    let magnitude = match rng.random_range(0..3u32) {
        0 => 30.0,
        1 => rng.random_range(45.0..=60.0),
        _ => rng.random_range(65.0..=70.0),
    };
    if rng.random_bool(0.5) {
        -magnitude
    } else {
        magnitude
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationDraw {
    pub combination: AxisCombination,
    pub spec: RotationSpec,
}

/// Draws the active axes, an independent angle per active axis (pitch, yaw,
/// roll in that order) and a fair order policy.
pub fn build_rotation_spec(rng: &mut SampleRng) -> RotationDraw {
    let combination = sample_axis_combination(rng);
    let theta = if combination.has_theta() {
        sample_angle(rng)
    } else {
        0.0
    };
    let phi = if combination.has_phi() {
        sample_angle(rng)
    } else {
        0.0
    };
    let gamma = if combination.has_gamma() {
        sample_angle(rng)
    } else {
        0.0
    };
    let order_policy = if rng.random_bool(0.5) {
        OrderPolicy::NearField
    } else {
        OrderPolicy::FarField
    };
    RotationDraw {
        combination,
        spec: RotationSpec {
            roll_gamma: gamma,
            pitch_theta: theta,
            yaw_phi: phi,
            order_policy,
        },
    }
}

pub fn sample_arc(rng: &mut SampleRng) -> ArcParams {
    let level = ARC_LEVELS[rng.random_range(0..ARC_LEVELS.len())];
    let direction = if rng.random_bool(0.5) {
        ArcDirection::ArchUp
    } else {
        ArcDirection::ArchDown
    };
    ArcParams::new(level, direction).expect("level drawn from the valid set")
}

pub fn sample_sweep(rng: &mut SampleRng) -> BendParams {
    BendParams::new(rng.random_range(MIN_SWEEP_DEG..=MAX_SWEEP_DEG)).expect("sweep drawn within range")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    FlatRotated,
    CylinderBent,
}

impl SampleKind {
    pub fn label(self) -> &'static str {
        match self {
            SampleKind::FlatRotated => "flat_rotated",
            SampleKind::CylinderBent => "cylinder_bent",
        }
    }
}

pub fn sample_kind(rng: &mut SampleRng, bend_fraction: f64) -> SampleKind {
    if rng.random::<f64>() < bend_fraction {
        SampleKind::CylinderBent
    } else {
        SampleKind::FlatRotated
    }
}

/// Index of a uniformly chosen font.
pub fn sample_font(rng: &mut SampleRng, fonts: &FontSet) -> usize {
    rng.random_range(0..fonts.len())
}

/// Two distinct words for source and target.
pub fn sample_word_pair(rng: &mut SampleRng, corpus: &WordCorpus) -> Result<(String, String)> {
    let words = corpus.words();
    let first = &words[0];
    if words.iter().all(|w| w == first) {
        return Err(Error::Config(
            "corpus needs at least two distinct words to form pairs".into(),
        ));
    }
    let s = &words[rng.random_range(0..words.len())];
    loop {
        let t = &words[rng.random_range(0..words.len())];
        if t != s {
            return Ok((s.clone(), t.clone()));
        }
    }
}

pub const MAX_FILL_ATTEMPTS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FillDraw {
    pub rgb: [u8; 3],
    pub attempts: u32,
    /// No attempt cleared the contrast floor; the best one was kept.
    pub fallback: bool,
}

/// Draws text colours uniformly from the RGB cube until one contrasts with
/// the background over `region`; after [`MAX_FILL_ATTEMPTS`] the most
/// contrasting attempt wins.
pub fn sample_fill(rng: &mut SampleRng, bg: &RgbImage, region: (u32, u32, u32, u32)) -> FillDraw {
    sample_fill_scored(rng, |rgb| contrast_score(rgb, bg, region))
}

/// [`sample_fill`] with the contrast measure supplied by the caller.
pub fn sample_fill_scored(rng: &mut SampleRng, score: impl Fn([u8; 3]) -> f64) -> FillDraw {
    let mut best = ([0u8; 3], f64::MIN);
    for attempt in 1..=MAX_FILL_ATTEMPTS {
        let rgb: [u8; 3] = [rng.random(), rng.random(), rng.random()];
        let score = score(rgb);
        if score >= CONTRAST_FLOOR {
            return FillDraw {
                rgb,
                attempts: attempt,
                fallback: false,
            };
        }
        if score > best.1 {
            best = (rgb, score);
        }
    }
    FillDraw {
        rgb: best.0,
        attempts: MAX_FILL_ATTEMPTS,
        fallback: true,
    }
}
