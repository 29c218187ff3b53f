//! The lowest Landau level as holomorphic functions: g = e^{ν|z|²/2} f for an
//! l = 0 kernel section f. The ∂̄ residual of g falls at second order under
//! grid refinement.

use landau_automorphic::character::AutomorphicData;
use landau_automorphic::error::Result;
use landau_automorphic::kernels::TruncationPolicy;
use landau_automorphic::lattice::{ComplexPoint, Lattice};
use landau_automorphic::verify::verify_holomorphic_isomorphism;

fn main() -> Result<()> {
    let data = AutomorphicData::weierstrass(Lattice::square())?;
    let w0 = ComplexPoint::from_re_im(0.3, 0.2);
    let policy = TruncationPolicy::default();
    let mut previous: Option<f64> = None;
    println!("{:>5}  {:>12}  {:>8}  {:>12}", "N", "dbar", "order", "fe residual");
    for n in [32, 64, 128, 256] {
        let r = verify_holomorphic_isomorphism(&data, &w0, n, &policy, (1.0, 1e-8))?;
        let order = previous.map_or(String::from("-"), |p| format!("{:.3}", (p / r.dbar_residual).log2()));
        println!("{n:>5}  {:>12.4e}  {order:>8}  {:>12.2e}", r.dbar_residual, r.fe_residual);
        previous = Some(r.dbar_residual);
    }
    Ok(())
}
