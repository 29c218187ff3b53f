//! The motion group G = U(n) ⋉ ℂⁿ, its automorphy factor and the magnetic
//! translations it induces.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::SampledFunction;
use crate::error::{Error, Result};
use crate::lattice::{symplectic_form, ComplexPoint};

/// Tolerance on a†a = 1.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// g = (a, b) acting by z ↦ az + b.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    a: DMatrix<Complex64>,
    b: ComplexPoint,
}

impl GroupElement {
    pub fn new(a: DMatrix<Complex64>, b: ComplexPoint) -> Result<Self> {
        let n = b.dim();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.nrows() });
        }
        let defect =
            (a.adjoint() * &a - DMatrix::<Complex64>::identity(n, n)).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(defect <= UNITARY_TOLERANCE) {
            return Err(Error::Precondition(format!("a is not unitary (|a*a - 1| = {defect:.2e})")));
        }
        Ok(Self { a, b })
    }

    pub fn identity(n: usize) -> Self {
        Self { a: DMatrix::identity(n, n), b: ComplexPoint::zero(n) }
    }

    pub fn translation(b: ComplexPoint) -> Self {
        let n = b.dim();
        Self { a: DMatrix::identity(n, n), b }
    }

    /// n = 1 element (e^{iθ}, b).
    pub fn planar(theta: f64, b: Complex64) -> Self {
        Self { a: DMatrix::from_element(1, 1, Complex64::from_polar(1.0, theta)), b: ComplexPoint::scalar(b) }
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn rotation(&self) -> &DMatrix<Complex64> {
        &self.a
    }

    pub fn shift(&self) -> &ComplexPoint {
        &self.b
    }

    /// (a₁, b₁)(a₂, b₂) = (a₁a₂, a₁b₂ + b₁).
    pub fn compose(&self, other: &Self) -> Self {
        Self { a: &self.a * &other.a, b: self.apply(&other.b) }
    }

    pub fn inverse(&self) -> Self {
        let a_inv = self.a.adjoint();
        let b = mat_vec(&a_inv, &self.b).neg();
        Self { a: a_inv, b }
    }

    /// g⁻¹.0 = −a†b.
    pub fn inverse_origin(&self) -> ComplexPoint {
        mat_vec(&self.a.adjoint(), &self.b).neg()
    }

    fn apply(&self, z: &ComplexPoint) -> ComplexPoint {
        mat_vec(&self.a, z).add(&self.b)
    }

    /// Haar-uniform random element with |b| components in [−spread, spread].
    pub fn random<R: rand::Rng>(rng: &mut R, n: usize, spread: f64) -> Self {
        let a = random_unitary(rng, n);
        let b = ComplexPoint::new(
            (0..n)
                .map(|_| Complex64::new(rng.random_range(-spread..spread), rng.random_range(-spread..spread)))
                .collect(),
        );
        Self { a, b }
    }
}

fn mat_vec(a: &DMatrix<Complex64>, z: &ComplexPoint) -> ComplexPoint {
    let v = a * DVector::from_column_slice(&z.coords);
    ComplexPoint::new(v.iter().copied().collect())
}

/// Random unitary by QR of a random complex matrix, phases fixed by R's diagonal.
fn random_unitary<R: rand::Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    if n == 1 {
        // QR of a scalar gives ±1; draw the phase directly instead
        q[(0, 0)] = Complex64::from_polar(1.0, rng.random_range(-PI..PI));
    }
    q
}

/// g.z = az + b.
pub fn act(g: &GroupElement, z: &ComplexPoint) -> Result<ComplexPoint> {
    if z.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: z.dim() });
    }
    Ok(g.apply(z))
}

/// j_ν(g, z) = e^{iνω(z, g⁻¹.0)}.
pub fn j_factor(nu: f64, g: &GroupElement, z: &ComplexPoint) -> Result<Complex64> {
    let w = symplectic_form(z, &g.inverse_origin())?;
    Ok(Complex64::from_polar(1.0, nu * w))
}

/// Phase φ_ν(g₁, g₂) = νω(g₁⁻¹.0, g₂.0) of the projective law.
pub fn projective_phase(nu: f64, g1: &GroupElement, g2: &GroupElement) -> Result<f64> {
    Ok(nu * symplectic_form(&g1.inverse_origin(), g2.shift())?)
}

/// [T^ν_g f](z) = j_ν(g, z) f(g.z).
pub fn magnetic_translate(nu: f64, g: &GroupElement, f: &SampledFunction) -> SampledFunction {
    let g = g.clone();
    let f = f.clone();
    SampledFunction::new(move |z| {
        let j = j_factor(nu, &g, z).expect("dimension checked by caller");
        j * f.eval(&g.apply(z))
    })
}

/// Default number of trapezoidal nodes on the circle.
pub const DEFAULT_CIRCLE_NODES: usize = 256;

/// [A_{g₀} ψ](z) = (1/M) Σ_θ [T^ν_{g₀k_θ} ψ](z), k_θ = e^{iθ} (n = 1).
pub fn circle_average(nu: f64, g0: &GroupElement, psi: &SampledFunction, nodes: usize) -> Result<SampledFunction> {
    if g0.dim() != 1 {
        return Err(Error::UnsupportedDimension(g0.dim()));
    }
    if nodes == 0 {
        return Err(Error::Precondition("circle average needs at least one node".into()));
    }
    let elements: Vec<GroupElement> = (0..nodes)
        .map(|k| g0.compose(&GroupElement::planar(2.0 * PI * k as f64 / nodes as f64, Complex64::new(0.0, 0.0))))
        .collect();
    let psi = psi.clone();
    Ok(SampledFunction::new(move |z| {
        let mut acc = Complex64::new(0.0, 0.0);
        for g in &elements {
            let j = Complex64::from_polar(
                1.0,
                nu * crate::lattice::symplectic_slice(&z.coords, &g.inverse_origin().coords),
            );
            acc += j * psi.eval(&g.apply(z));
        }
        acc / nodes as f64
    }))
}
