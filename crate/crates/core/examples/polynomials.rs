//! The exceptional polynomials built two ways, their denominators, and the
//! expanded m = 2 form.

use xmjacobi::orthopoly::{pmn_via_ab, sign_changes_log_grid, xi_m, xm_jacobi, xm_jacobi_x2_expanded, FamilyParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = FamilyParams::new(1.0, 10.0, 2)?;
    let xi = xi_m(&params);
    println!("xi_2(y) = {:?}", xi.coeffs());
    println!("sign changes of xi_2 on [1, 1e4]: {}", sign_changes_log_grid(&xi, 1.0, 1e4, 100_000));

    for nu in params.bound_indices() {
        let p = xm_jacobi(nu, &params)?;
        let q = pmn_via_ab(nu, &params)?;
        let x2 = xm_jacobi_x2_expanded(nu, &params)?;
        let diff = (&p - &q).max_abs_coeff().max((&p - &x2).max_abs_coeff());
        println!("nu = {nu}: degree {:?}, coefficients {:?}", p.degree(), p.coeffs());
        println!("         max coefficient difference between constructions {diff:.1e}");
    }
    println!("{}", serde_json::to_string(&xm_jacobi(1, &params)?)?);
    Ok(())
}
