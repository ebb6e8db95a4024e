//! Normalized bound states in the rescaled coordinate: node counts,
//! Schrodinger residuals, and a coarse profile of the first two.

use xmjacobi::orthopoly::FamilyParams;
use xmjacobi::potential::{count_sign_changes, schrodinger_residual, EigenfunctionSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = FamilyParams::new(1.0, 10.0, 1)?;
    let specs: Vec<EigenfunctionSpec> =
        params.bound_indices().map(|nu| EigenfunctionSpec::new(nu, &params)).collect::<Result<_, _>>()?;
    for spec in &specs {
        let nodes = count_sign_changes(|r| spec.value(r), 1e-3, 20.0, 20_000)?;
        let residual = schrodinger_residual(spec, 1e-3)?;
        println!(
            "nu = {}: E = {:>7.3}, N = {:.4e}, nodes = {nodes}, residual = {residual:.1e}",
            spec.nu,
            -spec.kappa() * spec.kappa(),
            spec.normalization
        );
    }
    println!("{:>5} {:>12} {:>12}", "r", "psi_0", "psi_1");
    for i in 1..=16 {
        let r = 0.5 * i as f64;
        println!("{r:>5.1} {:>12.6} {:>12.6}", specs[0].value(r)?, specs[1].value(r)?);
    }
    Ok(())
}
