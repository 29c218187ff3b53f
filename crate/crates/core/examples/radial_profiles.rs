//! Radial eigenfunctions of the Landau operator: bounded exactly at integer
//! levels, exponentially growing in between.

use landau_automorphic::error::Result;
use landau_automorphic::quadrature::gauss_laguerre_rule;
use landau_automorphic::specfun::{laguerre, RadialProfile};

fn main() -> Result<()> {
    println!("{:>5}  {:>12}  {:>12}  {:>12}", "r", "phi_0", "phi_1.5", "phi_3");
    let p0 = RadialProfile::new(1.0, 0.0, 1)?;
    let ph = RadialProfile::new(1.0, 1.5, 1)?;
    let p3 = RadialProfile::new(1.0, 3.0, 1)?;
    for r in [0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0] {
        println!("{r:>5}  {:>12.4e}  {:>12.4e}  {:>12.4e}", p0.eval(r)?, ph.eval(r)?, p3.eval(r)?);
    }

    // Laguerre orthogonality with the Gauss-Laguerre rule
    let rule = gauss_laguerre_rule(12, 0.0)?;
    println!("\nint L_i L_j e^-x dx (order 12, exact to degree {}):", rule.exactness_degree());
    for i in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|j| format!("{:>9.1e}", rule.integrate(|x| laguerre(i, 0.0, x) * laguerre(j, 0.0, x))))
            .collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}
