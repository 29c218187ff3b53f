//! Free eigenprojector kernels, the theta reproducing kernel, and
//! (Γ,χ)-automorphic kernels obtained by periodization.
//!
//! Lattice sums are truncated at a radius certified by an analytic tail
//! bound: lattice points in a shell a < |γ| ≤ b are counted by the volume of
//! the annulus (a − d, b + d] divided by the cell volume (d = cell diameter),
//! and each term is bounded by a Gaussian envelope.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::character::AutomorphicData;
use crate::error::{Error, Result};
use crate::lattice::{hermitian_slice, symplectic_slice, ComplexPoint, Lattice};
use crate::specfun::{binomial_multiplicity, kummer_terminating_majorant, q_profile, q_profile_at_zero};

/// Default cap on the number of lattice terms in one sum.
pub const DEFAULT_MAX_TERMS: usize = 200_000;

const RADIUS_STEP: f64 = 0.5;

/// Tolerance-to-radius policy for Gaussian-decay lattice sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    /// Absolute error target for the lattice sum.
    pub tolerance: f64,
    pub max_terms: usize,
}

impl TruncationPolicy {
    pub fn new(tolerance: f64) -> Result<Self> {
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::Precondition(format!("tolerance {tolerance} must be positive")));
        }
        Ok(Self { tolerance, max_terms: DEFAULT_MAX_TERMS })
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_terms: DEFAULT_MAX_TERMS }
    }
}

/// A radial profile Q(r) of a G-invariant kernel e^{iνω(z,w)} Q(|z − w|),
/// together with an upper bound for |Q| on a radial interval.
pub trait RadialKernelProfile: Send + Sync {
    fn value(&self, r: f64) -> f64;

    /// Upper bound of |Q(ρ)| for ρ ∈ [lo, hi], 0 ≤ lo ≤ hi.
    fn envelope(&self, lo: f64, hi: f64) -> f64;

    fn is_real(&self) -> bool {
        true
    }
}

/// Q^ν_l, the profile of the level-l eigenprojector kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LandauProfile {
    pub nu: f64,
    pub level: usize,
    pub dim: usize,
}

impl RadialKernelProfile for LandauProfile {
    fn value(&self, r: f64) -> f64 {
        q_profile(self.nu, self.level, self.dim, r)
    }

    fn envelope(&self, lo: f64, hi: f64) -> f64 {
        let pref = binomial_multiplicity(self.dim, self.level) * (self.nu / PI).powi(self.dim as i32);
        pref * (-self.nu * lo * lo / 2.0).exp() * kummer_terminating_majorant(self.level, self.dim, self.nu * hi * hi)
    }
}

/// Which kernel a sum evaluates.
#[derive(Clone)]
pub enum KernelKind {
    /// K^ν_{Γ,χ}, reproducing kernel of the holomorphic theta space.
    Theta,
    /// K^ν_{l;Γ,χ}, periodization of the level-l projector kernel.
    Level(usize),
    /// Periodization of an arbitrary Gaussian-dominated profile.
    Profile(Arc<dyn RadialKernelProfile>),
}

impl fmt::Debug for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelKind::Theta => write!(f, "Theta"),
            KernelKind::Level(l) => write!(f, "Level({l})"),
            KernelKind::Profile(_) => write!(f, "Profile(..)"),
        }
    }
}

impl KernelKind {
    fn profile(&self, data: &AutomorphicData) -> Option<Arc<dyn RadialKernelProfile>> {
        match self {
            KernelKind::Theta => None,
            KernelKind::Level(l) => Some(Arc::new(LandauProfile { nu: data.nu(), level: *l, dim: data.n() })),
            KernelKind::Profile(p) => Some(p.clone()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            KernelKind::Theta => "theta".into(),
            KernelKind::Level(l) => format!("automorphic_l{l}"),
            KernelKind::Profile(_) => "automorphic_profile".into(),
        }
    }
}

/// Unit-ball volume in ℝ^{2n}: πⁿ / n!.
fn ball_volume(n: usize) -> f64 {
    PI.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>()
}

/// Upper bound for #{γ : a < |γ| ≤ b}.
fn shell_count_bound(lattice: &Lattice, a: f64, b: f64) -> f64 {
    let d = lattice.cell_diameter();
    let dim = 2 * lattice.n() as i32;
    let outer = (b + d).powi(dim);
    let inner = (a - d).max(0.0).powi(dim);
    ball_volume(lattice.n()) * (outer - inner) / lattice.cell_volume()
}

/// Upper bound of one term |summand(γ)| over the shell a < |γ| ≤ b.
/// `spread` bounds |z| + |w| (theta) or |z − w| (periodized profiles).
fn term_envelope(
    data: &AutomorphicData,
    profile: Option<&dyn RadialKernelProfile>,
    zw_product: f64,
    spread: f64,
    a: f64,
    b: f64,
) -> f64 {
    let nu = data.nu();
    match profile {
        None => {
            // e^{ν|z||w|} e^{−ν|γ|²/2 + ν(|z|+|w|)|γ|}, decreasing for |γ| ≥ |z|+|w|
            let r = a.max(spread);
            (nu / PI).powi(data.n() as i32) * (nu * zw_product - nu * r * r / 2.0 + nu * spread * r).exp()
        }
        Some(p) => {
            let lo = (a - spread).max(0.0);
            p.envelope(lo, b + spread)
        }
    }
}

/// Certified bound on the sum of all terms with |γ| > R.
fn tail_bound(
    data: &AutomorphicData,
    profile: Option<&dyn RadialKernelProfile>,
    zw_product: f64,
    spread: f64,
    radius: f64,
) -> f64 {
    let mut total = 0.0;
    let mut a = radius;
    for shell in 0..100_000 {
        let b = a + RADIUS_STEP;
        let term = shell_count_bound(data.lattice(), a, b) * term_envelope(data, profile, zw_product, spread, a, b);
        total += term;
        if shell > 8 && a > radius + 4.0 && term <= 1e-18 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        if term == 0.0 && a > spread + 1.0 {
            break;
        }
        a = b;
    }
    total
}

/// Smallest radius R on a 0.5 grid whose certified tail is below `tolerance`.
///
/// `z_max`, `w_max` bound |z| and |w|. For the theta kernel the spread is
/// |z| + |w|; for periodized profiles it is |z − w| ≤ |z| + |w|.
pub fn truncation_radius(
    data: &AutomorphicData,
    kind: &KernelKind,
    tolerance: f64,
    z_max: f64,
    w_max: f64,
    max_terms: usize,
) -> Result<f64> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Precondition(format!("tolerance {tolerance} must be positive")));
    }
    let profile = kind.profile(data);
    let spread = z_max + w_max;
    let zw = z_max * w_max;
    let mut radius = (spread / RADIUS_STEP).ceil() * RADIUS_STEP;
    loop {
        if shell_count_bound(data.lattice(), 0.0, radius) > max_terms as f64 * 4.0 {
            return Err(Error::Truncation(format!(
                "tolerance {tolerance:e} needs more than {max_terms} lattice terms"
            )));
        }
        let tail = tail_bound(data, profile.as_deref(), zw, spread, radius);
        if tail < tolerance {
            return Ok(radius);
        }
        radius += RADIUS_STEP;
    }
}

/// One lattice term with precomputed χ(γ).
#[derive(Clone, Debug)]
struct Term {
    gamma: Vec<Complex64>,
    norm_sqr: f64,
    chi: Complex64,
}

/// Lattice-sum evaluator for one kernel on a ball |z| ≤ z_max, |w| ≤ w_max.
///
/// Terms are stored by decreasing |γ| so the dominant small-|γ| terms are
/// accumulated last.
#[derive(Clone)]
pub struct KernelEvaluator {
    data: AutomorphicData,
    kind: KernelKind,
    profile: Option<Arc<dyn RadialKernelProfile>>,
    policy: TruncationPolicy,
    z_max: f64,
    w_max: f64,
    radius: f64,
    terms: Vec<Term>,
}

impl fmt::Debug for KernelEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelEvaluator")
            .field("kind", &self.kind)
            .field("radius", &self.radius)
            .field("terms", &self.terms.len())
            .finish()
    }
}

impl KernelEvaluator {
    pub fn new(
        data: &AutomorphicData,
        kind: KernelKind,
        policy: TruncationPolicy,
        z_max: f64,
        w_max: f64,
    ) -> Result<Self> {
        data.require_rdq()?;
        let radius = truncation_radius(data, &kind, policy.tolerance, z_max, w_max, policy.max_terms)?;
        Self::with_radius(data, kind, policy, z_max, w_max, radius)
    }

    /// Evaluator with an explicit radius (no certification beyond `radius`).
    pub fn with_radius(
        data: &AutomorphicData,
        kind: KernelKind,
        policy: TruncationPolicy,
        z_max: f64,
        w_max: f64,
        radius: f64,
    ) -> Result<Self> {
        data.require_rdq()?;
        let points = data.lattice().enumerate(radius);
        if points.len() > policy.max_terms {
            return Err(Error::Truncation(format!(
                "{} lattice terms exceed max_terms = {}",
                points.len(),
                policy.max_terms
            )));
        }
        let mut terms: Vec<Term> = points
            .into_iter()
            .map(|p| Term { norm_sqr: p.value.norm_sqr(), chi: data.chi_unchecked(&p.m), gamma: p.value.coords })
            .collect();
        terms.sort_by(|a, b| b.norm_sqr.total_cmp(&a.norm_sqr));
        let profile = kind.profile(data);
        Ok(Self { data: data.clone(), kind, profile, policy, z_max, w_max, radius, terms })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn data(&self) -> &AutomorphicData {
        &self.data
    }

    /// Whether (z, w) lies inside the ball the truncation was certified for.
    pub fn covers(&self, z: &ComplexPoint, w: &ComplexPoint) -> bool {
        z.norm() <= self.z_max * (1.0 + 1e-12) && w.norm() <= self.w_max * (1.0 + 1e-12)
    }

    pub fn eval(&self, z: &ComplexPoint, w: &ComplexPoint) -> Complex64 {
        debug_assert!(self.covers(z, w), "point outside the certified ball");
        self.eval_slices(&z.coords, &w.coords)
    }

    /// Checked evaluation: errors outside the certified ball.
    pub fn try_eval(&self, z: &ComplexPoint, w: &ComplexPoint) -> Result<Complex64> {
        let n = self.data.n();
        if z.dim() != n || w.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: if z.dim() != n { z.dim() } else { w.dim() } });
        }
        if !self.covers(z, w) {
            return Err(Error::Precondition(format!(
                "|z| = {:.3}, |w| = {:.3} outside certified bounds ({}, {})",
                z.norm(),
                w.norm(),
                self.z_max,
                self.w_max
            )));
        }
        Ok(self.eval_slices(&z.coords, &w.coords))
    }

    fn eval_slices(&self, z: &[Complex64], w: &[Complex64]) -> Complex64 {
        let nu = self.data.nu();
        match &self.profile {
            None => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in &self.terms {
                    let zg = hermitian_slice(z, &t.gamma);
                    let wg = hermitian_slice(w, &t.gamma);
                    let expo = (zg - wg.conj()) * nu - nu * t.norm_sqr / 2.0;
                    acc += t.chi * expo.exp();
                }
                let pref = (nu / PI).powi(self.data.n() as i32);
                acc * (hermitian_slice(z, w) * nu).exp() * pref
            }
            Some(profile) => {
                let mut acc = Complex64::new(0.0, 0.0);
                let zpw: Vec<Complex64> = z.iter().zip(w).map(|(a, b)| a + b).collect();
                let zmw: Vec<Complex64> = z.iter().zip(w).map(|(a, b)| a - b).collect();
                for t in &self.terms {
                    let dist = zmw.iter().zip(&t.gamma).map(|(d, g)| (d - g).norm_sqr()).sum::<f64>().sqrt();
                    let q = profile.value(dist);
                    if q == 0.0 {
                        continue;
                    }
                    let phase = nu * symplectic_slice(&zpw, &t.gamma);
                    acc += t.chi * Complex64::from_polar(q, phase);
                }
                acc * Complex64::from_polar(1.0, nu * symplectic_slice(z, w))
            }
        }
    }

    /// The section z ↦ K(z, w₀).
    pub fn section(&self, w0: ComplexPoint) -> Result<KernelSection> {
        if w0.norm() > self.w_max * (1.0 + 1e-12) {
            return Err(Error::Precondition("pinned point outside the certified ball".into()));
        }
        Ok(KernelSection { evaluator: self.clone(), w0 })
    }
}

/// z ↦ K(z, z), the integrand of trace formulas.
///
/// On the diagonal the term for γ has modulus |Q(|γ|)| (resp. e^{−ν|γ|²/2}),
/// independent of z, so the truncation is certified at z = w = 0 and each
/// term weight is precomputed.
#[derive(Clone, Debug)]
pub struct DiagonalEvaluator {
    nu: f64,
    theta: bool,
    radius: f64,
    /// (γ, χ(γ)·weight), by decreasing |γ|.
    terms: Vec<(Vec<Complex64>, Complex64)>,
}

impl DiagonalEvaluator {
    pub fn new(data: &AutomorphicData, kind: KernelKind, policy: TruncationPolicy) -> Result<Self> {
        let ev = KernelEvaluator::new(data, kind, policy, 0.0, 0.0)?;
        let nu = data.nu();
        let theta = ev.profile.is_none();
        let pref = (nu / PI).powi(data.n() as i32);
        let terms = ev
            .terms
            .iter()
            .filter_map(|t| {
                let weight = match &ev.profile {
                    None => pref * (-nu * t.norm_sqr / 2.0).exp(),
                    Some(p) => p.value(t.norm_sqr.sqrt()),
                };
                (weight != 0.0).then(|| (t.gamma.clone(), t.chi * weight))
            })
            .collect();
        Ok(Self { nu, theta, radius: ev.radius, terms })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, z: &ComplexPoint) -> Complex64 {
        let nu = self.nu;
        let mut acc = Complex64::new(0.0, 0.0);
        for (gamma, weight) in &self.terms {
            // ⟨z,γ⟩ − conj⟨z,γ⟩ = 2i·Im⟨z,γ⟩ (theta) and ω(2z, γ) (profile)
            let phase = if self.theta {
                2.0 * nu * hermitian_slice(&z.coords, gamma).im
            } else {
                2.0 * nu * symplectic_slice(&z.coords, gamma)
            };
            acc += weight * Complex64::from_polar(1.0, phase);
        }
        if self.theta {
            acc * (nu * z.norm_sqr()).exp()
        } else {
            acc
        }
    }
}

/// z ↦ K(z, w₀) for a fixed w₀.
#[derive(Clone, Debug)]
pub struct KernelSection {
    evaluator: KernelEvaluator,
    w0: ComplexPoint,
}

impl KernelSection {
    pub fn new(
        data: &AutomorphicData,
        kind: KernelKind,
        w0: ComplexPoint,
        policy: TruncationPolicy,
        z_max: f64,
    ) -> Result<Self> {
        let ev = KernelEvaluator::new(data, kind, policy, z_max, w0.norm())?;
        Ok(Self { evaluator: ev, w0 })
    }

    pub fn pinned(&self) -> &ComplexPoint {
        &self.w0
    }

    pub fn evaluator(&self) -> &KernelEvaluator {
        &self.evaluator
    }

    pub fn eval(&self, z: &ComplexPoint) -> Complex64 {
        self.evaluator.eval(z, &self.w0)
    }
}

/// K^ν_l(z, w) = e^{iνω(z,w)} Q^ν_l(|z − w|).
pub fn free_kernel(nu: f64, l: usize, z: &ComplexPoint, w: &ComplexPoint) -> Result<Complex64> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), got: w.dim() });
    }
    let r = z.sub(w).norm();
    let q = q_profile(nu, l, z.dim(), r);
    Ok(Complex64::from_polar(q, nu * symplectic_slice(&z.coords, &w.coords)))
}

/// K^ν_{Γ,χ}(z, w), truncated with a certified absolute error.
pub fn theta_kernel(
    data: &AutomorphicData,
    z: &ComplexPoint,
    w: &ComplexPoint,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    KernelEvaluator::new(data, KernelKind::Theta, *policy, z.norm(), w.norm())?.try_eval(z, w)
}

/// K^ν_{l;Γ,χ}(z, w), truncated with a certified absolute error.
pub fn automorphic_kernel(
    data: &AutomorphicData,
    l: usize,
    z: &ComplexPoint,
    w: &ComplexPoint,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    KernelEvaluator::new(data, KernelKind::Level(l), *policy, z.norm(), w.norm())?.try_eval(z, w)
}

/// Q^ν_l(0), the diagonal value of the free kernel.
pub fn free_kernel_diagonal(nu: f64, l: usize, n: usize) -> f64 {
    q_profile_at_zero(nu, l, n)
}
