//! The Selberg transform h_{l,j} of the level-l kernel profile, by
//! Gauss-Laguerre quadrature. It is the identity matrix.

use std::f64::consts::PI;

use landau_automorphic::error::Result;
use landau_automorphic::verify::selberg_matrix;

fn main() -> Result<()> {
    let h = selberg_matrix(PI, 1, 6, 40)?;
    println!("h (n = 1, nu = pi, l_max = 6, order 40):");
    for l in 0..h.nrows() {
        let row: Vec<String> = (0..h.ncols()).map(|j| format!("{:>9.2e}", h[(l, j)])).collect();
        println!("  {}", row.join(" "));
    }
    let defect = (&h - nalgebra::DMatrix::<f64>::identity(7, 7)).amax();
    println!("max |h - I| = {defect:.2e}");

    for (nu, n) in [(2.0 * PI, 1), (PI, 2), (PI, 3)] {
        let h = selberg_matrix(nu, n, 4, 24)?;
        let d = (&h - nalgebra::DMatrix::<f64>::identity(5, 5)).amax();
        println!("nu = {nu:.4}, n = {n}: max |h - I| = {d:.2e}");
    }
    Ok(())
}
