//! Draws many rotation specs from the seeded sampler and prints the empirical
//! axis-combination and angle-category tables next to their targets.
//!
//! cargo run --example sample_distributions

use std::collections::BTreeMap;

use syn3dtxt::sampler::{build_rotation_spec, AngleCategory, AxisCombination, SampleRng, LANE_ROTATION};

fn main() {
    let n = 100_000u64;
    let mut combos: BTreeMap<AxisCombination, u64> = BTreeMap::new();
    let mut cats: BTreeMap<String, u64> = BTreeMap::new();
    for i in 0..n {
        let draw = build_rotation_spec(&mut SampleRng::lane(7, i, LANE_ROTATION));
        *combos.entry(draw.combination).or_default() += 1;
        let s = draw.spec;
        for a in [s.pitch_theta, s.yaw_phi, s.roll_gamma]
            .into_iter()
            .filter(|a| *a != 0.0)
        {
            let c = AngleCategory::classify(a).expect("angle within Table 2 ranges");
            *cats
                .entry(format!("{:?}/{:?}", c.magnitude, c.sense))
                .or_default() += 1;
        }
    }
    println!("{:<16} {:>8} {:>8}", "combination", "observed", "target");
    for c in AxisCombination::ALL {
        let pct = 100.0 * combos.get(&c).copied().unwrap_or(0) as f64 / n as f64;
        println!("{:<16} {pct:>7.2}% {:>7}%", c.label(), c.weight_percent());
    }
    let total: u64 = cats.values().sum();
    println!("\n{:<16} {:>8}", "category", "observed");
    for (k, v) in cats {
        println!("{k:<16} {:>7.2}%", 100.0 * v as f64 / total as f64);
    }
}
