//! Shooting on the sampled potential and comparison with -(A - nu)^2.

use xmjacobi::orthopoly::FamilyParams;
use xmjacobi::radial::{default_window, shoot_bound_states_with, ShootingConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for m in 0..=2 {
        let params = FamilyParams::new(1.0, 10.0, m)?;
        let out = shoot_bound_states_with(&params, default_window(&params), 1e-10, &ShootingConfig::default())?;
        println!("m = {m}, window {:?}", default_window(&params));
        for (nu, (e, nodes)) in out.energies.iter().zip(&out.node_counts).enumerate() {
            let exact = -(params.a() - nu as f64).powi(2);
            println!("  nu = {nu}: E = {e:.10} (exact {exact}), nodes across bracket {nodes:?}");
        }
        if !out.failed_brackets.is_empty() {
            println!("  failed brackets: {:?}", out.failed_brackets);
        }
    }
    Ok(())
}
