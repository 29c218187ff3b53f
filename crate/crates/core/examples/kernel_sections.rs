//! Theta and automorphic kernel sections z ↦ K(z, w₀): the lattice sums,
//! their truncation radii, and the functional equations they satisfy.

use std::f64::consts::PI;

use landau_automorphic::character::AutomorphicData;
use landau_automorphic::error::Result;
use landau_automorphic::kernels::{free_kernel, KernelEvaluator, KernelKind, TruncationPolicy};
use landau_automorphic::lattice::{ComplexPoint, Lattice};
use landau_automorphic::operators::{ground_transform, Direction, Picture, SampledFunction};
use landau_automorphic::verify::verify_functional_equation;

fn main() -> Result<()> {
    let data = AutomorphicData::weierstrass(Lattice::square())?;
    let policy = TruncationPolicy::default();
    let w0 = ComplexPoint::from_re_im(0.3, 0.2);

    for kind in [KernelKind::Theta, KernelKind::Level(0), KernelKind::Level(2)] {
        let ev = KernelEvaluator::new(&data, kind.clone(), policy, 3.0, 1.0)?;
        println!("{:<16} radius {:>4}  terms {:>4}", kind.label(), ev.radius(), ev.term_count());
        let section = ev.section(w0.clone())?;
        let f = SampledFunction::new(move |z| section.eval(z));
        // theta sections live in the holomorphic picture; move them over first
        let f = match kind {
            KernelKind::Theta => ground_transform(PI, &f, Direction::Inverse),
            _ => f,
        };
        let fe = verify_functional_equation(&f, &data, Picture::F, 20, &[], 1e-8)?;
        println!("    functional equation residual {:.2e}", fe.residuals[0].value);
    }

    // away from the lattice the periodized kernel is dominated by the γ = 0 term
    let ev = KernelEvaluator::new(&data, KernelKind::Level(1), policy, 1.0, 1.0)?;
    let z = ComplexPoint::from_re_im(0.5, 0.1);
    println!("K_1(z, w0) = {:.6}", ev.eval(&z, &w0));
    println!("free part  = {:.6}", free_kernel(PI, 1, &z, &w0)?);
    Ok(())
}
