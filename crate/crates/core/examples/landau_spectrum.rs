//! Lowest eigenvalues of the magnetic Laplacian on a fundamental cell with
//! (Γ,χ)-twisted boundary conditions, by finite differences and Chebyshev
//! filtered subspace iteration. Clusters sit at ν(2l+1) with multiplicity
//! (ν/π)·vol.

use std::f64::consts::PI;

use landau_automorphic::character::{AutomorphicData, Character};
use landau_automorphic::error::Result;
use landau_automorphic::lattice::Lattice;
use landau_automorphic::operators::{spectrum_fd, EigenOptions};

fn print(title: &str, data: &AutomorphicData, grid: usize, k: usize) -> Result<()> {
    let report = spectrum_fd(data, grid, k, &EigenOptions::default())?;
    println!("{title}: N = {grid}, {} iterations, max residual {:.1e}", report.iterations, report.max_residual);
    for c in &report.clusters {
        println!(
            "  {:>9.5} x{}  (expected {:>8.5} x{}, rel. err {:.2e}{})",
            c.center,
            c.multiplicity,
            c.expected_value,
            c.expected_multiplicity,
            c.relative_error,
            if c.complete { "" } else { ", incomplete" }
        );
    }
    println!("  distance to the half-integer level: {:.4}", report.midgap_distance);
    Ok(())
}

fn main() -> Result<()> {
    let grid = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    let square = Lattice::square();
    print("nu = pi, Weierstrass", &AutomorphicData::weierstrass(square.clone())?, grid, 4)?;
    let trivial = Character::trivial(&square);
    print("nu = 2 pi, trivial", &AutomorphicData::new(2.0 * PI, square, trivial)?, grid, 6)?;
    Ok(())
}
