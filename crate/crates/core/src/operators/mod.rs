//! Group action, magnetic translations, Poincaré periodization, the ground
//! transform, and the finite-difference Landau operator on the torus.

mod fd;
mod group;
mod spectrum;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::character::AutomorphicData;
use crate::error::{Error, Result};
use crate::lattice::{symplectic_slice, ComplexPoint};

pub use fd::{
    apply_delta_fd, apply_landau_fd, assemble_landau, dbar_fd, Exterior, GridField, Picture, SparseMatrix, MIN_GRID,
};
pub use group::{
    act, circle_average, j_factor, magnetic_translate, projective_phase, GroupElement, DEFAULT_CIRCLE_NODES,
    UNITARY_TOLERANCE,
};
pub use spectrum::{
    cluster_eigenvalues, lowest_eigenpairs, spectrum_fd, Cluster, EigenOptions, Eigenpairs, SpectralReport, MAX_EIGS,
};

type EvalFn = dyn Fn(&ComplexPoint) -> Complex64 + Send + Sync;

/// Closed ball {|z − center| < radius} containing a function's support.
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    pub center: ComplexPoint,
    pub radius: f64,
}

/// A function ℂⁿ → ℂ given by an evaluation closure.
#[derive(Clone)]
pub struct SampledFunction {
    eval: Arc<EvalFn>,
    support: Option<Support>,
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction").field("support", &self.support).finish_non_exhaustive()
    }
}

impl SampledFunction {
    pub fn new(f: impl Fn(&ComplexPoint) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f), support: None }
    }

    /// Declares that f vanishes outside the ball |z − center| < radius.
    pub fn with_support(mut self, center: ComplexPoint, radius: f64) -> Self {
        self.support = Some(Support { center, radius });
        self
    }

    pub fn zero() -> Self {
        Self::new(|_| Complex64::new(0.0, 0.0))
    }

    pub fn support(&self) -> Option<&Support> {
        self.support.as_ref()
    }

    pub fn eval(&self, z: &ComplexPoint) -> Complex64 {
        (self.eval)(z)
    }

    /// Pointwise product with another function.
    pub fn mul(&self, other: &SampledFunction) -> SampledFunction {
        let (a, b) = (self.clone(), other.clone());
        SampledFunction::new(move |z| a.eval(z) * b.eval(z))
    }
}

/// Smooth bump e^{1 − 1/(1 − s²)}, s = |z − center|/radius, equal to 1 at the center.
pub fn bump(center: ComplexPoint, radius: f64) -> SampledFunction {
    let c = center.clone();
    SampledFunction::new(move |z| {
        let s2 = z.sub(&c).norm_sqr() / (radius * radius);
        if s2 >= 1.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((1.0 - 1.0 / (1.0 - s2)).exp(), 0.0)
        }
    })
    .with_support(center, radius)
}

/// [Pψ](z) = Σ_γ χ(γ) e^{iνω(z,γ)} ψ(z − γ) for ψ supported inside the
/// fundamental cell.
///
/// Only the cell containing z and its neighbours can contribute, so the sum
/// is finite and the functional equation holds to rounding.
pub fn poincare_periodize(data: &AutomorphicData, psi: &SampledFunction) -> Result<SampledFunction> {
    data.require_rdq()?;
    let support =
        psi.support().ok_or_else(|| Error::Precondition("periodization needs a declared support".into()))?.clone();
    let lattice = data.lattice();
    if support.center.dim() != data.n() {
        return Err(Error::DimensionMismatch { expected: data.n(), got: support.center.dim() });
    }
    // distance from the center to each face t_j ∈ {0, 1} of the cell
    let t = lattice.coordinates_of(&support.center);
    let inv = lattice.period_inverse();
    for (j, tj) in t.iter().enumerate() {
        let row_norm = inv.row(j).norm();
        let dist = tj.min(1.0 - tj) / row_norm;
        if !(dist > support.radius) {
            return Err(Error::Precondition(format!(
                "support radius {} reaches the cell boundary (face distance {dist:.4})",
                support.radius
            )));
        }
    }
    let dim = t.len();
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(dim as u32))
        .map(|mut k| {
            (0..dim)
                .map(|_| {
                    let d = (k % 3) as i64 - 1;
                    k /= 3;
                    d
                })
                .collect()
        })
        .collect();
    let data = data.clone();
    let psi = psi.clone();
    Ok(SampledFunction::new(move |z| {
        let lattice = data.lattice();
        let (_, base) = lattice.reduce(z);
        let mut acc = Complex64::new(0.0, 0.0);
        for off in &offsets {
            let m: Vec<i64> = base.m.iter().zip(off).map(|(a, b)| a + b).collect();
            let gamma = lattice.point(&m);
            let shifted = z.sub(&gamma.value);
            if shifted.sub(&support.center).norm() >= support.radius {
                continue;
            }
            let phase = data.nu() * symplectic_slice(&z.coords, &gamma.value.coords);
            acc += data.chi_unchecked(&m) * Complex64::from_polar(1.0, phase) * psi.eval(&shifted);
        }
        acc
    }))
}

/// Direction of the ground transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// [𝔊f](z) = e^{ν|z|²/2} f(z), or its inverse.
pub fn ground_transform(nu: f64, f: &SampledFunction, direction: Direction) -> SampledFunction {
    let f = f.clone();
    let sign = match direction {
        Direction::Forward => 1.0,
        Direction::Inverse => -1.0,
    };
    SampledFunction::new(move |z| f.eval(z) * (sign * nu * z.norm_sqr() / 2.0).exp())
}
