//! Composes the same angles under both order policies and shows that the
//! order matters once pitch and yaw are both active.
//!
//! cargo run --example rotation_orders

use syn3dtxt::geometry3d::{
    compose_rotation, encode_normal, plane_normal, select_order_policy, OrderPolicy, RotationSpec,
};

fn main() -> syn3dtxt::Result<()> {
    for (gamma, theta, phi) in [(0.0, 45.0, 0.0), (30.0, 45.0, 45.0), (-30.0, -60.0, 65.0)] {
        println!("γ={gamma} θ={theta} φ={phi}");
        let mut mats = Vec::new();
        for policy in [OrderPolicy::NearField, OrderPolicy::FarField] {
            let m = compose_rotation(&RotationSpec::new(gamma, theta, phi, policy)?)?;
            let n = plane_normal(&m)?;
            println!("  {:<10} normal {n}  rgb {}", policy.as_str(), encode_normal(&n));
            println!("{m:?}");
            mats.push(m);
        }
        println!(
            "  max entry gap between orders: {:.3e}\n",
            mats[0].max_abs_diff(&mats[1])
        );
    }
    for (y, x) in [(1.0, 1000.0), (1.0, 1.0), (0.0, 5.0)] {
        println!(
            "text at height {y}, distance {x}: {}",
            select_order_policy(y, x)?.as_str()
        );
    }
    Ok(())
}
