//! Magnetic translations T_g f(z) = j(g, z) f(g⁻¹z): the chain rule of the
//! automorphy factor, the projective law, and the circle average that turns
//! a kernel section into a radial profile.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use landau_automorphic::error::Result;
use landau_automorphic::kernels::free_kernel;
use landau_automorphic::lattice::ComplexPoint;
use landau_automorphic::operators::{circle_average, j_factor, GroupElement, SampledFunction, DEFAULT_CIRCLE_NODES};
use landau_automorphic::specfun::q_profile;
use landau_automorphic::verify::verify_chain_rule;

fn main() -> Result<()> {
    let nu = PI;
    let g = GroupElement::translation(ComplexPoint::from_re_im(1.0, 0.0));
    println!("j(1, i) at nu = pi: {:.6}", j_factor(nu, &g, &ComplexPoint::from_re_im(0.0, 1.0))?);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = GroupElement::random(&mut rng, 2, 1.0);
    let b = GroupElement::random(&mut rng, 2, 1.0);
    println!("random pair in U(2) x C^2: |a.b| shift = {:.4}", a.compose(&b).shift().norm());
    for n in [1, 2, 3] {
        let r = verify_chain_rule(nu, n, 100, 1e-12)?;
        println!("n = {n}: chain rule {:.1e}, projective law {:.1e}", r.residuals[0].value, r.residuals[1].value);
    }

    // averaging K_1(·, w₀) over g₀k_θ with g₀ = translation by w₀ gives Q_1(|z|)
    let w0 = ComplexPoint::from_re_im(0.3, 0.2);
    let pinned = w0.clone();
    let section = SampledFunction::new(move |z| free_kernel(nu, 1, z, &pinned).unwrap_or_default());
    let avg = circle_average(nu, &GroupElement::translation(w0.clone()), &section, DEFAULT_CIRCLE_NODES)?;
    for r in [0.0, 0.25, 0.5, 1.0] {
        let z = ComplexPoint::scalar(Complex64::from_polar(r, 0.7));
        println!("r = {r:<4}  average {:>10.6}  Q_1(r) {:>10.6}", avg.eval(&z).re, q_profile(nu, 1, 1, r));
    }
    Ok(())
}
