//! Bound-state energies of one family member in both conventions.
//!
//! `cargo run --example spectrum -- 1 10 2`

use xmjacobi::orthopoly::FamilyParams;
use xmjacobi::potential::{bound_energies, gpt_energy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (g, h, m) = match args.as_slice() {
        [g, h, m] => (*g, *h, *m as usize),
        [] => (1.0, 10.0, 2),
        _ => return Err("usage: spectrum [g h m]".into()),
    };
    let params = FamilyParams::new(g, h, m)?;
    println!("A = {}, B = {}", params.a(), params.b());
    println!("{:>3} {:>12} {:>12} {:>16}", "nu", "E_raw", "E_scatt", "E_nu(g+m,h-m)");
    for e in bound_energies(&params) {
        let partner = gpt_energy(e.nu, g + m as f64, h - m as f64);
        println!("{:>3} {:>12.6} {:>12.6} {:>16.6}", e.nu, e.energy_raw, e.energy_scattering, partner);
    }
    Ok(())
}
