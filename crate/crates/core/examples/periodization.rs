//! Poincaré periodization of a compactly supported bump, and the identity
//! between the full-plane kernel operator and the cell operator on it.

use landau_automorphic::character::AutomorphicData;
use landau_automorphic::error::Result;
use landau_automorphic::kernels::TruncationPolicy;
use landau_automorphic::lattice::{ComplexPoint, Lattice};
use landau_automorphic::operators::{bump, poincare_periodize, Picture};
use landau_automorphic::verify::{verify_functional_equation, verify_restriction_identity};

fn main() -> Result<()> {
    let data = AutomorphicData::weierstrass(Lattice::hexagonal())?;
    let center = data.lattice().point_at(&[0.5, 0.5]);
    let psi = bump(center.clone(), 0.3);
    let periodic = poincare_periodize(&data, &psi)?;

    let fe = verify_functional_equation(&periodic, &data, Picture::F, 50, &[], 1e-13)?;
    println!("functional equation residual: {:.2e}", fe.residuals[0].value);
    let u1 = data.lattice().generators()[0].clone();
    for z in [center.clone(), center.add(&u1), center.sub(&u1)] {
        println!("P psi at {:.4}: {:.6}", z.coords[0], periodic.eval(&z));
    }

    let points: Vec<ComplexPoint> =
        [(0.5, 0.5), (0.2, 0.7)].iter().map(|&(a, b)| ComplexPoint::from_re_im(a, b)).collect();
    for l in 0..=1 {
        let r = verify_restriction_identity(&data, l, &periodic, &TruncationPolicy::default(), 16, 8, &points, 1e-5)?;
        println!("restriction identity, l = {l}: gap {:.2e} ({})", r.residuals[0].value, r.inputs);
    }
    Ok(())
}
