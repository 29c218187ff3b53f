//! Quantization check for a few triplets (ν, Γ, χ).
//!
//! Run with `cargo run --example rdq_gate`.

use std::f64::consts::PI;

use landau_automorphic::character::{check_rdq, nu_gamma, weierstrass_character, Character};
use landau_automorphic::error::Result;
use landau_automorphic::lattice::Lattice;

fn show(label: &str, nu: f64, lattice: &Lattice, chi: &Character) {
    let report = check_rdq(nu, lattice, chi);
    println!("{label:<34} nu = {nu:.6}  valid = {}", report.valid);
    for v in &report.violations {
        println!(
            "    pair ({}, {}): {:?}, nu*omega = {:.6}, residual = {:.3e}",
            v.j, v.k, v.kind, v.nu_omega, v.residual
        );
    }
}

fn main() -> Result<()> {
    let square = Lattice::square();
    let hex = Lattice::hexagonal();
    let w_square = weierstrass_character(&square)?;
    let w_hex = weierstrass_character(&hex)?;

    show("square, Weierstrass", PI, &square, &w_square);
    show("square, Weierstrass", PI / 2.0, &square, &w_square);
    show("square, trivial", PI, &square, &Character::trivial(&square));
    show("square, trivial", 2.0 * PI, &square, &Character::trivial(&square));
    show("hexagonal, Weierstrass", PI, &hex, &w_hex);
    show("hexagonal, Weierstrass", nu_gamma(&hex)?, &hex, &w_hex);
    Ok(())
}
