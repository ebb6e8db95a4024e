//! Weighted Gram matrix by panel quadrature next to the closed-form norms.

use xmjacobi::orthopoly::{gram_matrix, norm_h, orthogonality_integral, FamilyParams, QuadratureConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = FamilyParams::new(1.0, 10.0, 1)?;
    let quad = QuadratureConfig::auto(&params)?;
    println!("quadrature: {quad:?}");
    let gram = gram_matrix(&params, &quad)?;
    for (i, row) in gram.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>11.3e}")).collect();
        println!("{} | h = {:.6e}", cells.join(" "), norm_h(i, &params)?);
    }
    let single = orthogonality_integral(0, 2, &params, &quad)?;
    println!("<0|2> = {:.3e} with {} panels, warning: {:?}", single.value, single.panels_used, single.warning);
    Ok(())
}
