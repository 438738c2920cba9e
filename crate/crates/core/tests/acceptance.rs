//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{tree_hashes, Fixture};
use syn3dtxt::audit::{pair_violations, validate_dataset, AuditOptions, DatasetStats};
use syn3dtxt::dataset_io::{generate_dataset, read_manifest};
use syn3dtxt::geometry3d::{
    compose_rotation, decode_normal, encode_normal, project_quad, CameraModel, EncodedNormal, Mat4,
    OrderPolicy, RotationSpec, UnitNormal,
};
use syn3dtxt::sampler::{AxisCombination, SampleKind};
use syn3dtxt::textraster::{load_fonts, rasterize};
use syn3dtxt::warp::{arc_warp, render_flat, ArcDirection, ArcParams};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, budget_s: f64) -> bool {
    elapsed.as_secs_f64() < budget_s
}

fn random_spec(rng: &mut ChaCha8Rng) -> RotationSpec {
    let mut a = || rng.random_range(-90.0..=90.0);
    let (g, t, p) = (a(), a(), a());
    let policy = if rng.random_bool(0.5) {
        OrderPolicy::NearField
    } else {
        OrderPolicy::FarField
    };
    RotationSpec::new(g, t, p, policy).unwrap()
}

/// Literal matrices for the three axes, written out independently of the library.
fn literal(axis: char, deg: f64) -> [[f64; 3]; 3] {
    let (s, c) = deg.to_radians().sin_cos();
    match axis {
        'g' => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        'p' => [[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]],
        't' => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        _ => unreachable!(),
    }
}

fn linear(m: &Mat4) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = m.get(r, c);
        }
    }
    out
}

fn rotation_algebra() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_orth = 0.0f64;
    let mut worst_det = 0.0f64;
    for _ in 0..10_000 {
        let m = linear(&compose_rotation(&random_spec(&mut rng)).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                worst_orth = worst_orth.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        worst_det = worst_det.max((det - 1.0).abs());
    }
    let mut worst_single = 0.0f64;
    for _ in 0..1_000 {
        let a: f64 = rng.random_range(-90.0..=90.0);
        for policy in [OrderPolicy::NearField, OrderPolicy::FarField] {
            for (axis, spec) in [
                ('g', RotationSpec::new(a, 0.0, 0.0, policy)),
                ('t', RotationSpec::new(0.0, a, 0.0, policy)),
                ('p', RotationSpec::new(0.0, 0.0, a, policy)),
            ] {
                let got = linear(&compose_rotation(&spec.unwrap()).unwrap());
                let want = literal(axis, a);
                for r in 0..3 {
                    for c in 0..3 {
                        worst_single = worst_single.max((got[r][c] - want[r][c]).abs());
                    }
                }
            }
        }
    }
    let el = t.elapsed();
    outcome(
        worst_orth <= 1e-9 && worst_det <= 1e-9 && worst_single <= 1e-12 && within(el, 5.0),
        format!(
            "10000 specs: max |MᵀM−I| {worst_orth:.1e}, max |det−1| {worst_det:.1e}; single-axis max gap {worst_single:.1e}; {el:.2?}"
        ),
    )
}

fn normal_round_trip() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let az: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).max(0.0).sqrt();
        let n = UnitNormal::normalize(r * az.cos(), r * az.sin(), z).unwrap();
        worst = worst.max(decode_normal(encode_normal(&n)).angle_to(&n));
    }
    let fixtures = [
        ((0.0, 0.0, 1.0), EncodedNormal::new(128, 128, 255)),
        ((1.0, 0.0, 0.0), EncodedNormal::new(255, 128, 128)),
        ((0.0, -1.0, 0.0), EncodedNormal::new(128, 0, 128)),
    ];
    let exact = fixtures
        .iter()
        .all(|((x, y, z), e)| encode_normal(&UnitNormal::new(*x, *y, *z).unwrap()) == *e);
    let el = t.elapsed();
    outcome(
        worst <= 0.6 && exact && within(el, 1.0),
        format!("10000 normals: max angular error {worst:.3}°; axis fixtures exact: {exact}; {el:.2?}"),
    )
}

fn non_commutativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let nonzero = |rng: &mut ChaCha8Rng| {
        let a: f64 = rng.random_range(1.0..=90.0);
        if rng.random_bool(0.5) {
            a
        } else {
            -a
        }
    };
    let pair = |g: f64, t: f64, p: f64| {
        let near = compose_rotation(&RotationSpec::new(g, t, p, OrderPolicy::NearField).unwrap()).unwrap();
        let far = compose_rotation(&RotationSpec::new(g, t, p, OrderPolicy::FarField).unwrap()).unwrap();
        near.max_abs_diff(&far)
    };
    let mut differ = 0;
    let mut min_gap = f64::INFINITY;
    for _ in 0..1_000 {
        let g = rng.random_range(-90.0..=90.0);
        let gap = pair(g, nonzero(&mut rng), nonzero(&mut rng));
        min_gap = min_gap.min(gap);
        if gap > 1e-6 {
            differ += 1;
        }
    }
    let mut max_same = 0.0f64;
    for i in 0..1_000 {
        let g = rng.random_range(-90.0..=90.0);
        let a = rng.random_range(-90.0..=90.0);
        let gap = if i % 2 == 0 {
            pair(g, 0.0, a)
        } else {
            pair(g, a, 0.0)
        };
        max_same = max_same.max(gap);
    }
    outcome(
        differ == 1_000 && max_same <= 1e-12,
        format!("θ,φ≠0: {differ}/1000 differ (min gap {min_gap:.2e}); one axis zero: max gap {max_same:.1e}"),
    )
}

fn identity_cases() -> Outcome {
    let fonts = load_fonts(common::fonts_dir()).unwrap();
    let mut arc_identical = true;
    let mut worst_corner = 0.0f64;
    for font in fonts.entries() {
        for word in ["HELLO", "Street", "e-mail", "No.5"] {
            let mask = rasterize(word, &font.font_id, &fonts, 256, 64).unwrap();
            for dir in [ArcDirection::ArchUp, ArcDirection::ArchDown] {
                let warped = arc_warp(&mask, &ArcParams::new(0, dir).unwrap());
                arc_identical &= warped.alpha.as_raw() == mask.alpha.as_raw();
            }
            let flat = render_flat(
                &mask,
                &RotationSpec::identity(),
                &CameraModel::for_canvas(256, 64),
            )
            .unwrap();
            for p in [[0.0, 0.0], [256.0, 0.0], [256.0, 64.0], [0.0, 64.0]] {
                let q = flat.homography.apply(p).unwrap();
                worst_corner = worst_corner.max((q[0] - p[0]).abs()).max((q[1] - p[1]).abs());
            }
        }
    }
    let quad = project_quad(
        128.0,
        32.0,
        &Mat4::IDENTITY,
        &CameraModel::new(512.0, 512.0).unwrap(),
    )
    .unwrap();
    let quad_ok = quad == [[-128.0, -32.0], [128.0, -32.0], [128.0, 32.0], [-128.0, 32.0]];
    outcome(
        arc_identical && worst_corner <= 1e-6 && quad_ok,
        format!(
            "arc 0° byte-identical: {arc_identical}; zero-rotation homography corner error {worst_corner:.1e} px; projection identity: {quad_ok}"
        ),
    )
}

fn distribution_conformance(fx: &Fixture) -> Outcome {
    let cfg = fx.config("table1", 10_000, 2024, 0.0);
    let t = Instant::now();
    if let Err(e) = generate_dataset(&cfg) {
        return outcome(false, format!("generation failed: {e}"));
    }
    let el = t.elapsed();
    let audit = validate_dataset(&cfg.output_dir, &AuditOptions::default()).unwrap();
    let records = read_manifest(&cfg.output_dir).unwrap().records;
    let stats = DatasetStats::from_records(&records);
    let tests = stats.chi_square_tests(0.001, 5_000);
    let axis = tests.iter().find(|d| d.name == "axis").unwrap();
    let dev = axis.max_deviation_pp();
    let freqs: Vec<String> = stats
        .axis_combinations
        .iter()
        .map(|r| format!("{}={:.2}", r.combination.label(), r.percent))
        .collect();
    let all_flat = records.iter().all(|r| r.kind == SampleKind::FlatRotated);
    let labelled = records.iter().all(|r| {
        r.axis_combination.is_some()
            && r.axis_combination == AxisCombination::from_angles(r.theta, r.phi, r.gamma)
    });
    outcome(
        dev <= 1.5
            && axis.passed == Some(true)
            && stats.out_of_range_angles == 0
            && all_flat
            && labelled
            && audit.passed
            && within(el, 600.0),
        format!(
            "n={} [{}]%; max deviation {dev:.2}pp; χ²={:.2} p={:.3}; angle range violations {}; auditor {}; {el:.1?}",
            records.len(),
            freqs.join(" "),
            axis.statistic,
            axis.p_value,
            stats.out_of_range_angles,
            if audit.passed { "pass" } else { "fail" }
        ),
    )
}

struct ScaleRun {
    elapsed: Duration,
    dir: std::path::PathBuf,
    error: Option<String>,
}

fn scale_run(fx: &Fixture) -> ScaleRun {
    let cfg = fx.config("scale", 2_000, 77, 0.5);
    let t = Instant::now();
    let error = generate_dataset(&cfg).err().map(|e| e.to_string());
    ScaleRun {
        elapsed: t.elapsed(),
        dir: cfg.output_dir,
        error,
    }
}

fn self_consistency(run: &ScaleRun) -> Outcome {
    if let Some(e) = &run.error {
        return outcome(false, format!("generation failed: {e}"));
    }
    let opts = AuditOptions {
        pair_fraction: 0.0,
        ..Default::default()
    };
    let report = validate_dataset(&run.dir, &opts).unwrap();
    let nc = report.check("normal_consistency").unwrap();
    let ns = report.check("normal_support").unwrap();
    let records = read_manifest(&run.dir).unwrap().records;
    let bent = records
        .iter()
        .filter(|r| r.kind == SampleKind::CylinderBent)
        .count();
    outcome(
        nc.checked == 2_000 && nc.failed == 0 && ns.failed == 0 && bent > 0 && bent < 2_000,
        format!(
            "{} records ({} flat, {bent} bent): normal mismatches {}, support mismatches {}",
            nc.checked,
            nc.checked - bent,
            nc.failed,
            ns.failed
        ),
    )
}

fn pair_invariant(run: &ScaleRun) -> Outcome {
    if let Some(e) = &run.error {
        return outcome(false, format!("generation failed: {e}"));
    }
    let records = read_manifest(&run.dir).unwrap().records;
    let rgb = |rel: &str| image::open(run.dir.join(rel)).unwrap().to_rgb8();
    let gray = |rel: &str| image::open(run.dir.join(rel)).unwrap().to_luma8();
    let mut bad = 0usize;
    let mut pixels = 0u64;
    for r in records.iter().take(200) {
        let f = &r.files;
        let t_b = rgb(&f.t_b);
        pixels += u64::from(t_b.width() * t_b.height());
        bad += pair_violations(&rgb(&f.i_s), &rgb(&f.i_t), &t_b, &gray(&f.bin_s), &gray(&f.bin_t));
    }
    outcome(
        bad == 0,
        format!("200 samples, {pixels} pixels checked, {bad} violating pixels"),
    )
}

fn scale_smoke(run: &ScaleRun) -> Outcome {
    if let Some(e) = &run.error {
        return outcome(false, format!("generation failed: {e}"));
    }
    let pngs = syn3dtxt::dataset_io::IMAGE_DIRS
        .iter()
        .map(|d| std::fs::read_dir(run.dir.join(d)).unwrap().count())
        .sum::<usize>();
    let manifest = run.dir.join("manifest.jsonl").is_file();
    let per_image = run.elapsed.as_secs_f64() / pngs.max(1) as f64;
    let hours = per_image * 150_000.0 / 3600.0;
    let pair_hours = run.elapsed.as_secs_f64() / 2_000.0 * 150_000.0 / 3600.0;
    outcome(
        pngs == 14_000 && manifest && within(run.elapsed, 300.0),
        format!(
            "2000 pairs, {pngs} PNGs + manifest in {:.1?} on {} worker(s); 150000 images extrapolate to {hours:.2} h (150000 pairs: {pair_hours:.2} h)",
            run.elapsed,
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        ),
    )
}

fn cli_gen(fx: &Fixture, out: &Path, workers: u32) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_syn3dtxt"))
        .arg("gen")
        .arg("--corpus")
        .arg(common::corpus_path())
        .arg("--fonts")
        .arg(common::fonts_dir())
        .arg("--backgrounds")
        .arg(&fx.backgrounds)
        .arg("--out")
        .arg(out)
        .args([
            "--count",
            "500",
            "--seed",
            "42",
            "--workers",
            &workers.to_string(),
        ])
        .env_remove("SYN3DTXT_CONFIG")
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&o.stderr).into_owned())
    }
}

fn determinism(fx: &Fixture) -> Outcome {
    let (a, b) = (fx.path("det_w1"), fx.path("det_w8"));
    for (dir, w) in [(&a, 1), (&b, 8)] {
        if let Err(e) = cli_gen(fx, dir, w) {
            return outcome(false, format!("gen with {w} workers failed: {e}"));
        }
    }
    let manifest_same =
        std::fs::read(a.join("manifest.jsonl")).unwrap() == std::fs::read(b.join("manifest.jsonl")).unwrap();
    let (ha, hb) = (tree_hashes(&a), tree_hashes(&b));
    let differing = ha.iter().filter(|(k, v)| hb.get(*k) != Some(v)).count() + hb.len().abs_diff(ha.len());
    outcome(
        manifest_same && differing == 0 && ha.len() == 3_501,
        format!(
            "`gen --count 500 --seed 42`, 1 vs 8 workers: manifest identical {manifest_same}; {} files hashed, {differing} differ",
            ha.len()
        ),
    )
}

fn main() {
    let fx = Fixture::new();
    let mut results: Vec<(&str, Outcome)> = vec![
        ("rotation algebra", rotation_algebra()),
        ("normal encoding round trip", normal_round_trip()),
        ("order-policy non-commutativity", non_commutativity()),
        ("identity cases", identity_cases()),
    ];
    results.push((
        "axis-combination distribution",
        distribution_conformance(&fx),
    ));
    let run = scale_run(&fx);
    results.push(("end-to-end self-consistency", self_consistency(&run)));
    results.push(("pair invariant", pair_invariant(&run)));
    results.push(("determinism", determinism(&fx)));
    results.push(("scale smoke test", scale_smoke(&run)));

    let mut failed = 0;
    for (name, o) in &results {
        let mark = if o.passed { "PASS" } else { "FAIL" };
        println!("[{mark}] {name}: {}", o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
