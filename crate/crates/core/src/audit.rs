//! Conformance auditing and descriptive statistics for dataset directories.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use image::{GrayImage, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dataset_io::{flat_normal_rgb, read_manifest, RecordViolation, SampleRecord};
use crate::error::{Error, Result};
use crate::geometry3d::{decode_normal, EncodedNormal};
use crate::sampler::{AngleCategory, AxisCombination, Magnitude, SampleKind, Sense};
use crate::warp::ARC_LEVELS;

pub const DEFAULT_ALPHA: f64 = 0.001;
pub const DEFAULT_MIN_CHI_N: usize = 5000;
pub const DEFAULT_PAIR_FRACTION: f64 = 0.1;
pub const MAX_REPORTED_VIOLATIONS: usize = 100;
/// Allowed gap between the decoded per-glyph yaw span and the sweep angle.
pub const SWEEP_SPAN_TOLERANCE_DEG: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    /// Fraction of records that get the pixel-wise pair/background check.
    pub pair_fraction: f64,
    /// Distribution tests run only with at least this many observations.
    pub min_chi_n: usize,
    pub alpha: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            pair_fraction: DEFAULT_PAIR_FRACTION,
            min_chi_n: DEFAULT_MIN_CHI_N,
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl AuditOptions {
    pub fn full() -> Self {
        AuditOptions {
            pair_fraction: 1.0,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub label: String,
    pub observed: u64,
    pub observed_fraction: f64,
    pub expected_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTest {
    pub name: String,
    pub n: u64,
    pub rows: Vec<CategoryRow>,
    pub statistic: f64,
    pub dof: u32,
    pub p_value: f64,
    pub alpha: f64,
    /// `None` when `n` is below the minimum sample size.
    pub passed: Option<bool>,
}

impl DistributionTest {
    /// Pearson chi-square goodness of fit against `expected` probabilities.
    pub fn chi_square(
        name: &str,
        observed: &[(String, u64)],
        expected: &[f64],
        alpha: f64,
        min_n: usize,
    ) -> Self {
        assert_eq!(observed.len(), expected.len());
        let n: u64 = observed.iter().map(|(_, c)| c).sum();
        let nf = n as f64;
        let mut statistic = 0.0;
        let mut rows = Vec::with_capacity(observed.len());
        for ((label, count), &p) in observed.iter().zip(expected) {
            let e = nf * p;
            if e > 0.0 {
                statistic += (*count as f64 - e).powi(2) / e;
            }
            rows.push(CategoryRow {
                label: label.clone(),
                observed: *count,
                observed_fraction: if n > 0 { *count as f64 / nf } else { 0.0 },
                expected_fraction: p,
            });
        }
        let dof = (observed.len() - 1) as u32;
        let p_value = if n > 0 {
            ChiSquared::new(dof as f64).expect("positive dof").sf(statistic)
        } else {
            1.0
        };
        let passed = (n as usize >= min_n && n > 0).then_some(p_value >= alpha);
        DistributionTest {
            name: name.to_string(),
            n,
            rows,
            statistic,
            dof,
            p_value,
            alpha,
            passed,
        }
    }

    /// Largest `|observed − expected|` over the categories, in percentage points.
    pub fn max_deviation_pp(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.observed_fraction - r.expected_fraction).abs() * 100.0)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    pub dataset: PathBuf,
    pub records: usize,
    pub checks: Vec<CheckOutcome>,
    pub distributions: Vec<DistributionTest>,
    pub total_violations: usize,
    /// First violations in id order.
    pub violations: Vec<RecordViolation>,
    pub passed: bool,
}

impl AuditReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn distribution(&self, name: &str) -> Option<&DistributionTest> {
        self.distributions.iter().find(|d| d.name == name)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dataset {} ({} records)", self.dataset.display(), self.records)?;
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "  [{mark}] {:<22} checked {:>7}  failed {:>7}",
                c.name, c.checked, c.failed
            )?;
        }
        for d in &self.distributions {
            let mark = match d.passed {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "SKIP",
            };
            writeln!(
                f,
                "  [{mark}] chi-square {:<11} n={:<7} χ²={:.3} dof={} p={:.4} (α={})",
                d.name, d.n, d.statistic, d.dof, d.p_value, d.alpha
            )?;
        }
        if self.total_violations > 0 {
            writeln!(
                f,
                "violations ({} total, first {} shown):",
                self.total_violations,
                self.violations.len()
            )?;
            for v in &self.violations {
                writeln!(f, "  {} [{}] {}", v.id, v.check, v.message)?;
            }
        }
        write!(f, "result: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

fn violation(r: &SampleRecord, check: &str, message: impl Into<String>) -> RecordViolation {
    RecordViolation {
        id: r.id.clone(),
        check: check.to_string(),
        message: message.into(),
    }
}

fn open_rgb(path: &Path) -> Result<RgbImage> {
    Ok(image::open(path).map_err(|e| Error::image(path, e))?.to_rgb8())
}

fn open_gray(path: &Path) -> Result<GrayImage> {
    Ok(image::open(path).map_err(|e| Error::image(path, e))?.to_luma8())
}

/// Normal-map colour at each binary pixel must exist exactly on the binary support.
fn check_support(mask: &RgbImage, bin: &GrayImage) -> std::result::Result<(), String> {
    if mask.dimensions() != bin.dimensions() {
        return Err(format!(
            "mask {:?} and binary {:?} sizes differ",
            mask.dimensions(),
            bin.dimensions()
        ));
    }
    let mut bad = 0usize;
    for (m, b) in mask.pixels().zip(bin.pixels()) {
        let on = match b.0[0] {
            0 => false,
            255 => true,
            _ => {
                bad += 1;
                continue;
            }
        };
        if on == (m.0 == [0, 0, 0]) {
            bad += 1;
        }
    }
    if bad == 0 {
        Ok(())
    } else {
        Err(format!(
            "{bad} pixels where the normal mask and binary mask disagree"
        ))
    }
}

fn ink_colors(mask: &RgbImage) -> HashMap<[u8; 3], (u64, f64)> {
    let mut by_color: HashMap<[u8; 3], (u64, f64)> = HashMap::new();
    for (x, _, p) in mask.enumerate_pixels() {
        if p.0 != [0, 0, 0] {
            let e = by_color.entry(p.0).or_default();
            e.0 += 1;
            e.1 += x as f64;
        }
    }
    by_color
}

fn check_flat(mask: &RgbImage, expected: [u8; 3]) -> std::result::Result<(), String> {
    let colors = ink_colors(mask);
    let Some((&modal, _)) = colors.iter().max_by_key(|(c, (n, _))| (*n, **c)) else {
        return Err("normal mask has no ink".into());
    };
    if modal != expected {
        return Err(format!(
            "modal ink colour {modal:?} differs from re-derived normal {expected:?}"
        ));
    }
    if colors.len() > 1 {
        return Err(format!("{} distinct ink colours on a flat sample", colors.len()));
    }
    Ok(())
}

/// Per-glyph yaws decoded from a bent normal mask, ordered left to right.
pub fn decoded_glyph_yaws(mask: &RgbImage) -> Vec<f64> {
    let mut glyphs: Vec<(f64, f64)> = ink_colors(mask)
        .into_iter()
        .map(|(c, (n, sx))| (sx / n as f64, decode_normal(EncodedNormal::from_rgb(c)).yaw_deg()))
        .collect();
    glyphs.sort_by(|a, b| a.0.total_cmp(&b.0));
    glyphs.into_iter().map(|(_, yaw)| yaw).collect()
}

fn check_bent(mask: &RgbImage, text: &str, sweep: f64) -> std::result::Result<(), String> {
    let glyphs = text.chars().filter(|c| !c.is_whitespace()).count();
    let yaws = decoded_glyph_yaws(mask);
    if yaws.len() != glyphs {
        return Err(format!("{} glyph colours for {glyphs} glyphs", yaws.len()));
    }
    if glyphs < 2 {
        return Ok(());
    }
    let increasing = yaws.windows(2).all(|w| w[1] > w[0]);
    let decreasing = yaws.windows(2).all(|w| w[1] < w[0]);
    if !increasing && !decreasing {
        return Err(format!("decoded yaws are not monotonic: {yaws:.1?}"));
    }
    let span = (yaws[glyphs - 1] - yaws[0]).abs();
    if (span - sweep).abs() > SWEEP_SPAN_TOLERANCE_DEG {
        return Err(format!("decoded yaw span {span:.2}° vs sweep {sweep:.2}°"));
    }
    Ok(())
}

/// Counts pixels breaking the pair/background contract.
pub fn pair_violations(
    i_s: &RgbImage,
    i_t: &RgbImage,
    t_b: &RgbImage,
    bin_s: &GrayImage,
    bin_t: &GrayImage,
) -> usize {
    let mut bad = 0;
    for (x, y, b) in t_b.enumerate_pixels() {
        let (in_s, in_t) = (bin_s.get_pixel(x, y).0[0] > 0, bin_t.get_pixel(x, y).0[0] > 0);
        let (s, t) = (i_s.get_pixel(x, y), i_t.get_pixel(x, y));
        if (!in_s && s != b) || (!in_t && t != b) || (!in_s && !in_t && s != t) {
            bad += 1;
        }
    }
    bad
}

fn check_pair(root: &Path, r: &SampleRecord) -> Result<std::result::Result<(), String>> {
    let f = &r.files;
    let i_s = open_rgb(&root.join(&f.i_s))?;
    let i_t = open_rgb(&root.join(&f.i_t))?;
    let t_b = open_rgb(&root.join(&f.t_b))?;
    let bin_s = open_gray(&root.join(&f.bin_s))?;
    let bin_t = open_gray(&root.join(&f.bin_t))?;
    let dims = t_b.dimensions();
    if [
        i_s.dimensions(),
        i_t.dimensions(),
        bin_s.dimensions(),
        bin_t.dimensions(),
    ]
    .iter()
    .any(|d| *d != dims)
    {
        return Ok(Err("pair images differ in size".into()));
    }
    let bad = pair_violations(&i_s, &i_t, &t_b, &bin_s, &bin_t);
    Ok(if bad == 0 {
        Ok(())
    } else {
        Err(format!("{bad} background pixels differ between i_s, i_t and t_b"))
    })
}

/// Evenly spread deterministic selection of about `fraction·n` indices.
fn selected(position: usize, fraction: f64) -> bool {
    if fraction >= 1.0 {
        return true;
    }
    let p = position as f64;
    (p * fraction).floor() != ((p + 1.0) * fraction).floor()
}

#[derive(Default)]
struct RecordAudit {
    normal_checked: bool,
    normal_failed: bool,
    support_failed: bool,
    pair_checked: bool,
    pair_failed: bool,
    violations: Vec<RecordViolation>,
}

fn audit_images(root: &Path, r: &SampleRecord, with_pair: bool) -> RecordAudit {
    let mut out = RecordAudit::default();
    let f = &r.files;
    let loaded = (|| -> Result<_> {
        Ok((
            open_rgb(&root.join(&f.mask_s))?,
            open_rgb(&root.join(&f.mask_t))?,
            open_gray(&root.join(&f.bin_s))?,
            open_gray(&root.join(&f.bin_t))?,
        ))
    })();
    let (mask_s, mask_t, bin_s, bin_t) = match loaded {
        Ok(v) => v,
        Err(e) => {
            out.normal_checked = true;
            out.normal_failed = true;
            out.violations.push(violation(r, "images", e.to_string()));
            return out;
        }
    };
    for (side, mask, bin) in [("s", &mask_s, &bin_s), ("t", &mask_t, &bin_t)] {
        if let Err(m) = check_support(mask, bin) {
            out.support_failed = true;
            out.violations
                .push(violation(r, "normal_support", format!("{side}: {m}")));
        }
    }
    out.normal_checked = true;
    let results = match r.kind {
        SampleKind::FlatRotated => match flat_normal_rgb(&r.rotation_spec()) {
            Ok(expected) => {
                let expected = expected.to_rgb();
                let mut res = vec![check_flat(&mask_s, expected), check_flat(&mask_t, expected)];
                if r.normal_rgb.is_some_and(|n| n != expected) {
                    res.push(Err(format!(
                        "normal_rgb {:?} differs from {expected:?}",
                        r.normal_rgb.unwrap()
                    )));
                }
                res
            }
            Err(e) => vec![Err(e.to_string())],
        },
        SampleKind::CylinderBent => {
            let sweep = r.sweep_angle.unwrap_or(f64::NAN);
            vec![
                check_bent(&mask_s, &r.text_s, sweep),
                check_bent(&mask_t, &r.text_t, sweep),
            ]
        }
    };
    for m in results.into_iter().filter_map(|x| x.err()) {
        out.normal_failed = true;
        out.violations.push(violation(r, "normal_consistency", m));
    }
    if with_pair {
        out.pair_checked = true;
        let res = check_pair(root, r).unwrap_or_else(|e| Err(e.to_string()));
        if let Err(m) = res {
            out.pair_failed = true;
            out.violations.push(violation(r, "pair_background", m));
        }
    }
    out
}

/// Reads a dataset and runs every record, image and distribution check.
pub fn validate_dataset(dir: impl AsRef<Path>, opts: &AuditOptions) -> Result<AuditReport> {
    let root = dir.as_ref();
    let manifest = read_manifest(root)?;
    let records = &manifest.records;
    if records.is_empty() {
        return Err(Error::Config(format!("{} has an empty manifest", root.display())));
    }

    let mut violations: Vec<RecordViolation> = Vec::new();
    let mut record_failed = 0usize;
    let mut files_failed = 0usize;
    {
        let mut bad_record = std::collections::BTreeSet::new();
        let mut bad_files = std::collections::BTreeSet::new();
        for v in &manifest.violations {
            if v.check == "files" {
                bad_files.insert(v.id.clone());
            } else {
                bad_record.insert(v.id.clone());
            }
        }
        record_failed += bad_record.len();
        files_failed += bad_files.len();
        violations.extend(manifest.violations.iter().cloned());
    }

    let audits: Vec<RecordAudit> = records
        .par_iter()
        .enumerate()
        .map(|(i, r)| audit_images(root, r, selected(i, opts.pair_fraction)))
        .collect();

    let count = |pred: fn(&RecordAudit) -> bool| audits.iter().filter(|a| pred(a)).count();
    let normal_checked = count(|a| a.normal_checked);
    let normal_failed = count(|a| a.normal_failed);
    let support_failed = count(|a| a.support_failed);
    let pair_checked = count(|a| a.pair_checked);
    let pair_failed = count(|a| a.pair_failed);
    for a in audits {
        violations.extend(a.violations);
    }
    violations.sort_by(|a, b| a.id.cmp(&b.id));

    let stats = DatasetStats::from_records(records);
    let angle_range_failed = stats.out_of_range_angles;
    let checks = vec![
        outcome("manifest_records", records.len(), record_failed),
        outcome("files_present", records.len(), files_failed),
        outcome(
            "angle_ranges",
            stats.angle_count as usize + angle_range_failed,
            angle_range_failed,
        ),
        outcome("normal_support", normal_checked, support_failed),
        outcome("normal_consistency", normal_checked, normal_failed),
        outcome("pair_background", pair_checked, pair_failed),
    ];
    let distributions = stats.chi_square_tests(opts.alpha, opts.min_chi_n);

    let passed = violations.is_empty()
        && checks.iter().all(|c| c.passed)
        && distributions.iter().all(|d| d.passed != Some(false));
    let total_violations = violations.len();
    violations.truncate(MAX_REPORTED_VIOLATIONS);
    Ok(AuditReport {
        dataset: root.to_path_buf(),
        records: records.len(),
        checks,
        distributions,
        total_violations,
        violations,
        passed,
    })
}

fn outcome(name: &str, checked: usize, failed: usize) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        checked,
        failed,
        passed: failed == 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisRow {
    pub combination: AxisCombination,
    pub axes: usize,
    pub count: u64,
    pub percent: f64,
    pub expected_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleRow {
    pub magnitude: Magnitude,
    pub ccw: u64,
    pub cw: u64,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub total: u64,
    pub flat: u64,
    pub bent: u64,
    /// Axis-combination frequencies over flat samples.
    pub axis_combinations: Vec<AxisRow>,
    /// Percent of flat samples rotated about one, two and three axes.
    pub axis_groups: BTreeMap<String, f64>,
    /// Magnitude and sense counts over all non-zero angles of flat samples.
    pub angle_categories: Vec<AngleRow>,
    pub angle_count: u64,
    pub out_of_range_angles: usize,
    pub arc_levels: BTreeMap<u32, u64>,
    pub arc_directions: BTreeMap<String, u64>,
    pub kinds: BTreeMap<String, u64>,
}

impl DatasetStats {
    pub fn from_records(records: &[SampleRecord]) -> Self {
        let mut axis: BTreeMap<AxisCombination, u64> = BTreeMap::new();
        let mut angles: BTreeMap<(Magnitude, Sense), u64> = BTreeMap::new();
        let mut out_of_range = 0usize;
        let mut arc_levels: BTreeMap<u32, u64> = ARC_LEVELS.iter().map(|l| (*l, 0)).collect();
        let mut arc_directions = BTreeMap::new();
        let mut kinds: BTreeMap<String, u64> = BTreeMap::new();
        let mut flat = 0u64;
        for r in records {
            *kinds.entry(r.kind.label().to_string()).or_default() += 1;
            *arc_levels.entry(r.arc_angle).or_default() += 1;
            *arc_directions
                .entry(r.arc_direction.as_str().to_string())
                .or_default() += 1;
            if r.kind != SampleKind::FlatRotated {
                continue;
            }
            flat += 1;
            if let Some(c) = r.axis_combination {
                *axis.entry(c).or_default() += 1;
            }
            for a in [r.theta, r.phi, r.gamma] {
                if a == 0.0 {
                    continue;
                }
                match AngleCategory::classify(a) {
                    Some(cat) => *angles.entry((cat.magnitude, cat.sense)).or_default() += 1,
                    None => out_of_range += 1,
                }
            }
        }
        let pct = |n: u64, d: u64| if d == 0 { 0.0 } else { 100.0 * n as f64 / d as f64 };
        let axis_total: u64 = axis.values().sum();
        let axis_combinations: Vec<AxisRow> = AxisCombination::ALL
            .iter()
            .map(|&c| {
                let count = axis.get(&c).copied().unwrap_or(0);
                AxisRow {
                    combination: c,
                    axes: c.axis_count(),
                    count,
                    percent: pct(count, axis_total),
                    expected_percent: c.weight_percent() as f64,
                }
            })
            .collect();
        let mut axis_groups = BTreeMap::new();
        for (k, name) in [(1, "single"), (2, "dual"), (3, "triple")] {
            let n = axis_combinations
                .iter()
                .filter(|r| r.axes == k)
                .map(|r| r.count)
                .sum();
            axis_groups.insert(name.to_string(), pct(n, axis_total));
        }
        let angle_count: u64 = angles.values().sum();
        let angle_categories = Magnitude::ALL
            .iter()
            .map(|&m| {
                let ccw = angles.get(&(m, Sense::Ccw)).copied().unwrap_or(0);
                let cw = angles.get(&(m, Sense::Cw)).copied().unwrap_or(0);
                AngleRow {
                    magnitude: m,
                    ccw,
                    cw,
                    percent: pct(ccw + cw, angle_count),
                }
            })
            .collect();
        DatasetStats {
            total: records.len() as u64,
            flat,
            bent: records.len() as u64 - flat,
            axis_combinations,
            axis_groups,
            angle_categories,
            angle_count,
            out_of_range_angles: out_of_range,
            arc_levels,
            arc_directions,
            kinds,
        }
    }

    /// Goodness-of-fit tests for axis combinations, angle magnitudes, angle
    /// senses and arc levels.
    pub fn chi_square_tests(&self, alpha: f64, min_n: usize) -> Vec<DistributionTest> {
        let axis: Vec<(String, u64)> = self
            .axis_combinations
            .iter()
            .map(|r| (r.combination.label().to_string(), r.count))
            .collect();
        let axis_p: Vec<f64> = AxisCombination::ALL.iter().map(|c| c.probability()).collect();
        let magnitude: Vec<(String, u64)> = self
            .angle_categories
            .iter()
            .map(|r| (r.magnitude.label().to_string(), r.ccw + r.cw))
            .collect();
        let sense = vec![
            (
                "ccw".to_string(),
                self.angle_categories.iter().map(|r| r.ccw).sum(),
            ),
            ("cw".to_string(), self.angle_categories.iter().map(|r| r.cw).sum()),
        ];
        let arc: Vec<(String, u64)> = ARC_LEVELS
            .iter()
            .map(|l| (format!("{l}"), self.arc_levels.get(l).copied().unwrap_or(0)))
            .collect();
        vec![
            DistributionTest::chi_square("axis", &axis, &axis_p, alpha, min_n),
            DistributionTest::chi_square("magnitude", &magnitude, &[1.0 / 3.0; 3], alpha, min_n),
            DistributionTest::chi_square("sense", &sense, &[0.5; 2], alpha, min_n),
            DistributionTest::chi_square("arc_level", &arc, &[1.0 / 3.0; 3], alpha, min_n),
        ]
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "samples: {} ({} flat, {} bent)",
            self.total, self.flat, self.bent
        )?;
        writeln!(f)?;
        writeln!(
            f,
            "{:<10} {:<18} {:>8} {:>9} {:>9}",
            "axes", "combination", "count", "percent", "target"
        )?;
        for r in &self.axis_combinations {
            let group = match r.axes {
                1 => "single",
                2 => "dual",
                _ => "triple",
            };
            writeln!(
                f,
                "{:<10} {:<18} {:>8} {:>8.2}% {:>8.0}%",
                group,
                r.combination.label(),
                r.count,
                r.percent,
                r.expected_percent
            )?;
        }
        writeln!(f)?;
        writeln!(f, "{:<10} {:>8} {:>8} {:>9}", "magnitude", "ccw", "cw", "percent")?;
        for r in &self.angle_categories {
            writeln!(
                f,
                "{:<10} {:>8} {:>8} {:>8.2}%",
                r.magnitude.label(),
                r.ccw,
                r.cw,
                r.percent
            )?;
        }
        if self.out_of_range_angles > 0 {
            writeln!(f, "out-of-range angles: {}", self.out_of_range_angles)?;
        }
        writeln!(f)?;
        writeln!(f, "arc level:")?;
        for (l, n) in &self.arc_levels {
            writeln!(f, "  {:<8} {n}", format!("{l}°"))?;
        }
        writeln!(f, "arc direction:")?;
        for (d, n) in &self.arc_directions {
            writeln!(f, "  {d:<12} {n}")?;
        }
        writeln!(f, "kind:")?;
        for (k, n) in &self.kinds {
            writeln!(f, "  {k:<14} {n}")?;
        }
        Ok(())
    }
}

/// Reads a manifest and tabulates its distributions.
pub fn dataset_stats(dir: impl AsRef<Path>) -> Result<DatasetStats> {
    let root = dir.as_ref();
    let manifest = read_manifest(root)?;
    if manifest.records.is_empty() {
        return Err(Error::Config(format!("{} has an empty manifest", root.display())));
    }
    Ok(DatasetStats::from_records(&manifest.records))
}
