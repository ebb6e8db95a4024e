use xmjacobi::orthopoly::FamilyParams;
use xmjacobi::potential::{potential_vm, shape_invariance_residual};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for m in 0..=3 {
        let params = FamilyParams::new(1.0, 10.0, m)?;
        let mut worst = 0.0f64;
        for i in 0..=99 {
            let rho = 0.1 + 0.1 * i as f64;
            worst = worst.max(shape_invariance_residual(&params, rho)?.abs());
        }
        let tail = potential_vm(&params, 15.0)? - potential_vm(&FamilyParams::new(1.0 + m as f64, 10.0 - m as f64, 0)?, 15.0)?;
        println!("m = {m}: max residual {worst:.2e}, V_m - V_0(g+m, h-m) at 15: {tail:.2e}");
    }
    Ok(())
}
