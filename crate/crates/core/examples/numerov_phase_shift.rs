//! Phase shift from integrating the radial equation outward and matching to
//! sin(kr + delta) on the plateau, against the closed form.
//!
//! `cargo run --release --example numerov_phase_shift -- 1.5`

use xmjacobi::orthopoly::FamilyParams;
use xmjacobi::radial::{analytic_phase_unwrapped, family_plateau_start, numerov_phase_shift, phase_distance, RadialGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k: f64 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(1.0);
    let params = FamilyParams::new(1.0, 10.0, 2)?;
    println!("plateau reached at r = {:.2}", family_plateau_start(&params)?);
    for step in [4e-3, 2e-3, 1e-3] {
        let grid = RadialGrid { r_min: step, r_max: 35.0, step };
        let pe = numerov_phase_shift(&params, k, &grid)?;
        let exact = analytic_phase_unwrapped(&params, k)?;
        println!(
            "step {step:.0e}: delta = {:.12}, closed form (unwrapped) {exact:.12}, |diff| = {:.2e}, r1 = {:.2}, r2 = {:.2}, cond = {:.2}",
            pe.delta,
            phase_distance(pe.delta, exact),
            pe.r1,
            pe.r2,
            pe.condition_number
        );
    }
    Ok(())
}
