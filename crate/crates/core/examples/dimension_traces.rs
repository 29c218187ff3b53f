//! Trace of the level-l automorphic kernel over a fundamental cell against
//! C(n+l-1, l) (ν/π)ⁿ vol, on the square and hexagonal lattices.

use landau_automorphic::character::{nu_gamma, weierstrass_character, AutomorphicData};
use landau_automorphic::error::Result;
use landau_automorphic::kernels::TruncationPolicy;
use landau_automorphic::lattice::Lattice;
use landau_automorphic::verify::{dimension_by_trace, theta_dimension_by_trace};

fn main() -> Result<()> {
    let policy = TruncationPolicy::new(1e-10)?;
    for (name, lattice) in [("square", Lattice::square()), ("hexagonal", Lattice::hexagonal())] {
        let nu = nu_gamma(&lattice)?;
        let chi = weierstrass_character(&lattice)?;
        let data = AutomorphicData::new(nu, lattice, chi)?;
        println!("{name}: nu = {nu:.10}, vol = {:.10}", data.lattice().cell_volume());
        println!("  {:>5}  {:>20}  {:>10}  {:>10}", "level", "trace", "expected", "rel. gap");
        for l in 0..=4 {
            let t = dimension_by_trace(&data, l, 32, &policy, 1e-5)?;
            println!("  {l:>5}  {:>20.15}  {:>10.6}  {:>10.2e}", t.value, t.expected, t.relative_gap);
        }
        let t = theta_dimension_by_trace(&data, 32, &policy, 1e-5)?;
        println!("  theta  {:>20.15}  {:>10.6}  {:>10.2e}", t.value, t.expected, t.relative_gap);
    }
    Ok(())
}
