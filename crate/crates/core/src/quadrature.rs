//! Deterministic quadrature over the fundamental domain Λ(Γ), over boxes of
//! ℂⁿ, and over the half-line with the generalized Laguerre weight.
//!
//! Domain rules are tensor products of Gauss–Legendre rules in generator
//! coordinates t ∈ [0,1)^{2n}, optionally split into equal panels per axis.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{hermitian_slice, ComplexPoint, Lattice};
use crate::specfun::{laguerre, ln_gamma};

/// Cap on the total number of nodes of a domain or box rule.
pub const MAX_DOMAIN_NODES: usize = 1_000_000;

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let m = order;
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre on [0, 1] with `panels` equal sub-intervals.
pub fn unit_interval_rule(order: usize, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = 1.0 / panels as f64;
    let mut nodes = Vec::with_capacity(order * panels);
    let mut weights = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(a + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// Quadrature nodes/weights for a region of ℂⁿ.
#[derive(Clone, Debug)]
pub struct DomainRule {
    pub order: usize,
    pub panels: usize,
    pub nodes: Vec<ComplexPoint>,
    pub weights: Vec<f64>,
}

impl DomainRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F>(&self, mut f: F) -> Complex64
    where
        F: FnMut(&ComplexPoint) -> Complex64,
    {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| f(z) * *w).sum()
    }

    pub fn try_integrate<F>(&self, mut f: F) -> Result<Complex64>
    where
        F: FnMut(&ComplexPoint) -> Result<Complex64>,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(z)? * *w;
        }
        Ok(acc)
    }
}

fn tensor_nodes(dim: usize, axis: &(Vec<f64>, Vec<f64>)) -> Result<Vec<(Vec<f64>, f64)>> {
    let per_axis = axis.0.len();
    let total = (per_axis as f64).powi(dim as i32);
    if total > MAX_DOMAIN_NODES as f64 {
        return Err(Error::Resource(format!("{per_axis}^{dim} quadrature nodes exceed the cap of {MAX_DOMAIN_NODES}")));
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut idx = vec![0usize; dim];
    loop {
        let t: Vec<f64> = idx.iter().map(|&i| axis.0[i]).collect();
        let w: f64 = idx.iter().map(|&i| axis.1[i]).product();
        out.push((t, w));
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Tensor Gauss–Legendre rule on the generator parallelepiped.
pub fn fundamental_domain_rule(lattice: &Lattice, order: usize) -> Result<DomainRule> {
    composite_domain_rule(lattice, order, 1)
}

/// As [`fundamental_domain_rule`] with `panels` sub-intervals per axis.
pub fn composite_domain_rule(lattice: &Lattice, order: usize, panels: usize) -> Result<DomainRule> {
    if order < 2 {
        return Err(Error::Precondition(format!("quadrature order {order} < 2")));
    }
    if panels == 0 {
        return Err(Error::Precondition("panel count must be positive".into()));
    }
    let axis = unit_interval_rule(order, panels);
    let vol = lattice.cell_volume();
    let (nodes, weights) =
        tensor_nodes(2 * lattice.n(), &axis)?.into_iter().map(|(t, w)| (lattice.point_at(&t), w * vol)).unzip();
    Ok(DomainRule { order, panels, nodes, weights })
}

/// Tensor rule on the box `center + [−R, R]^{2n}` (real coordinates).
pub fn box_rule(center: &ComplexPoint, half_width: f64, order: usize, panels: usize) -> Result<DomainRule> {
    if order < 2 || panels == 0 || !(half_width > 0.0) {
        return Err(Error::Precondition("box rule needs order ≥ 2, panels ≥ 1, R > 0".into()));
    }
    let axis = unit_interval_rule(order, panels);
    let c = center.to_real();
    let side = 2.0 * half_width;
    let scale = side.powi(c.len() as i32);
    let (nodes, weights) = tensor_nodes(c.len(), &axis)?
        .into_iter()
        .map(|(t, w)| {
            let x: Vec<f64> = t.iter().zip(&c).map(|(ti, ci)| ci - half_width + side * ti).collect();
            (ComplexPoint::from_real(&x), w * scale)
        })
        .unzip();
    Ok(DomainRule { order, panels, nodes, weights })
}

/// ∫_Λ f dm with the given rule.
pub fn integrate_domain<F>(f: F, rule: &DomainRule) -> Complex64
where
    F: FnMut(&ComplexPoint) -> Complex64,
{
    rule.integrate(f)
}

/// ⟨f, g⟩_Γ = ∫_Λ f ḡ dm.
pub fn hermitian_pairing<F, G>(f: F, g: G, rule: &DomainRule) -> Complex64
where
    F: Fn(&ComplexPoint) -> Complex64,
    G: Fn(&ComplexPoint) -> Complex64,
{
    rule.integrate(|z| f(z) * g(z).conj())
}

/// ⟨⟨f, g⟩⟩_Γ = ∫_Λ f ḡ e^{−ν|z|²} dm.
pub fn weighted_pairing<F, G>(nu: f64, f: F, g: G, rule: &DomainRule) -> Complex64
where
    F: Fn(&ComplexPoint) -> Complex64,
    G: Fn(&ComplexPoint) -> Complex64,
{
    rule.integrate(|z| f(z) * g(z).conj() * (-nu * z.norm_sqr()).exp())
}

/// Value at order 2m plus the Richardson-style estimate |I(2m) − I(m)|.
pub fn integrate_with_estimate<F>(lattice: &Lattice, order: usize, f: F) -> Result<(Complex64, f64)>
where
    F: Fn(&ComplexPoint) -> Complex64,
{
    let coarse = fundamental_domain_rule(lattice, order)?.integrate(&f);
    let fine = fundamental_domain_rule(lattice, 2 * order)?.integrate(&f);
    Ok((fine, (fine - coarse).norm()))
}

/// Gauss–Laguerre rule for the weight x^α e^{−x} on [0, ∞).
#[derive(Clone, Debug)]
pub struct RadialRule {
    pub order: usize,
    pub alpha: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialRule {
    /// Polynomials up to this degree are integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        2 * self.order - 1
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Golub–Welsch nodes, Newton-polished, with weights from the closed form
/// w_i = Γ(m+α+1) x_i / (m! (m+1)² L^α_{m+1}(x_i)²).
pub fn gauss_laguerre_rule(order: usize, alpha: f64) -> Result<RadialRule> {
    if order == 0 {
        return Err(Error::Precondition("Gauss–Laguerre order must be ≥ 1".into()));
    }
    if !(alpha > -1.0) {
        return Err(Error::Precondition(format!("alpha = {alpha} must exceed −1")));
    }
    let m = order;
    let jacobi = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            2.0 * i as f64 + alpha + 1.0
        } else if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            (k * (k + alpha)).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::try_new(jacobi, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("tridiagonal eigensolve did not converge".into()))?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));
    let mf = m as f64;
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let lm = laguerre(m, alpha, *x);
            let lm1 = laguerre(m - 1, alpha, *x);
            let d = (mf * lm - (mf + alpha) * lm1) / *x;
            let step = lm / d;
            *x -= step;
            if step.abs() <= 1e-15 * x.abs() {
                break;
            }
        }
    }
    let log_scale = ln_gamma(mf + alpha + 1.0) - ln_gamma(mf + 1.0) - 2.0 * (mf + 1.0).ln();
    let weights = nodes
        .iter()
        .map(|&x| {
            let l_next = laguerre(m + 1, alpha, x);
            (log_scale + x.ln() - 2.0 * l_next.abs().ln()).exp()
        })
        .collect::<Vec<_>>();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Numeric("non-finite Gauss–Laguerre weight".into()));
    }
    Ok(RadialRule { order, alpha, nodes, weights })
}

/// Σ_j z_j conj(w_j) on quadrature nodes, re-exported for integrands.
#[inline]
pub fn node_inner(z: &ComplexPoint, w: &ComplexPoint) -> Complex64 {
    hermitian_slice(&z.coords, &w.coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::symplectic_slice;
    use crate::specfun::{gamma, sphere_volume};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    #[test]
    fn legendre_rule_is_exact_on_polynomials() {
        let (x, w) = gauss_legendre(7);
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        for k in 0..=13 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            assert_abs_diff_eq!(got, exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn weights_sum_to_cell_volume() {
        for lat in [Lattice::square(), Lattice::hexagonal(), Lattice::standard(2)] {
            let rule = fundamental_domain_rule(&lat, 4).unwrap();
            assert_relative_eq!(rule.weight_sum(), lat.cell_volume(), max_relative = 1e-12);
            let one = integrate_domain(|_| Complex64::new(1.0, 0.0), &rule);
            assert_relative_eq!(one.re, lat.cell_volume(), max_relative = 1e-12);
        }
        let c = composite_domain_rule(&Lattice::hexagonal(), 5, 3).unwrap();
        assert_relative_eq!(c.weight_sum(), Lattice::hexagonal().cell_volume(), max_relative = 1e-12);
    }

    #[test]
    fn node_cap_enforced() {
        let err = fundamental_domain_rule(&Lattice::standard(2), 40).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        assert!(matches!(fundamental_domain_rule(&Lattice::square(), 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn character_integral_vanishes() {
        let lat = Lattice::square();
        let rule = fundamental_domain_rule(&lat, 12).unwrap();
        let gamma = lat.point(&[1, 0]).value;
        let v = integrate_domain(
            |w| Complex64::from_polar(1.0, 2.0 * PI * symplectic_slice(&w.coords, &gamma.coords)),
            &rule,
        );
        assert!(v.norm() < 1e-12, "{v}");
    }

    #[test]
    fn second_moment_of_unit_square() {
        let rule = fundamental_domain_rule(&Lattice::square(), 4).unwrap();
        let v = integrate_domain(|w| Complex64::new(w.norm_sqr(), 0.0), &rule);
        assert_abs_diff_eq!(v.re, 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn pairings() {
        let rule = fundamental_domain_rule(&Lattice::hexagonal(), 6).unwrap();
        let f = |z: &ComplexPoint| Complex64::new(z.first().re.sin(), z.first().im * 0.3).exp();
        let g = |z: &ComplexPoint| z.first() * z.first() - Complex64::new(0.2, 1.0);
        assert!(hermitian_pairing(f, f, &rule).re >= 0.0);
        let fg = hermitian_pairing(f, g, &rule);
        let gf = hermitian_pairing(g, f, &rule);
        assert_abs_diff_eq!((fg - gf.conj()).norm(), 0.0, epsilon = 1e-14);
        // ∫_{[0,1]²} e^{−π|z|²} = (∫_0^1 e^{−πx²} dx)² = (erf(√π)/2)²
        let sq = fundamental_domain_rule(&Lattice::square(), 16).unwrap();
        let one = |_: &ComplexPoint| Complex64::new(1.0, 0.0);
        let v = weighted_pairing(PI, one, one, &sq);
        assert_abs_diff_eq!(v.re, 0.243_942_701_119_827_3, epsilon = 1e-13);
    }

    #[test]
    fn refinement_stays_below_estimate() {
        let lat = Lattice::hexagonal();
        let f = |z: &ComplexPoint| (Complex64::new(0.0, 3.0) * z.first()).exp() * (-z.norm_sqr()).exp();
        let (mid, est) = integrate_with_estimate(&lat, 4, f).unwrap();
        let fine = fundamental_domain_rule(&lat, 16).unwrap().integrate(f);
        assert!((fine - mid).norm() < est, "{} vs {est}", (fine - mid).norm());
    }

    #[test]
    fn laguerre_rule_moments() {
        let r = gauss_laguerre_rule(5, 0.0).unwrap();
        assert_abs_diff_eq!(r.integrate(|_| 1.0), 1.0, epsilon = 1e-14);
        let r1 = gauss_laguerre_rule(5, 1.0).unwrap();
        assert_relative_eq!(r1.integrate(|x| x.powi(3)), 24.0, max_relative = 1e-13);
        for alpha in [0.0, 0.5, 1.0, 3.0] {
            let rule = gauss_laguerre_rule(8, alpha).unwrap();
            for k in 0..=rule.exactness_degree() {
                let exact = gamma(alpha + 1.0 + k as f64);
                assert_relative_eq!(rule.integrate(|x| x.powi(k as i32)), exact, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn laguerre_orthogonality() {
        let rule = gauss_laguerre_rule(10, 0.0).unwrap();
        let ip = |l: usize, k: usize| rule.integrate(|x| laguerre(l, 0.0, x) * laguerre(k, 0.0, x));
        assert_abs_diff_eq!(ip(2, 2), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ip(2, 3), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn radial_gaussian_matches_plane_integral() {
        let nu: f64 = 1.7;
        for n in 1..=3usize {
            let rule = gauss_laguerre_rule(20, n as f64 - 1.0).unwrap();
            // ∫ e^{−ν|z|²} dm = vol(S) ∫ r^{2n−1} e^{−νr²} dr, x = νr²
            let v = sphere_volume(n) / (2.0 * nu.powi(n as i32)) * rule.integrate(|_| 1.0);
            assert_relative_eq!(v, (PI / nu).powi(n as i32), max_relative = 1e-10);
        }
    }

    #[test]
    fn laguerre_rule_rejects_bad_input() {
        assert!(gauss_laguerre_rule(0, 0.0).is_err());
        assert!(gauss_laguerre_rule(4, -1.0).is_err());
    }
}
