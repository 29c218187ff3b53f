//! Numerical checks of the trace formulas, reproducing identities,
//! functional equations and the Selberg transform.
//!
//! Every check returns a [`VerificationReport`]: named residuals, each with
//! its own tolerance, and `passed` iff all of them hold.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::character::AutomorphicData;
use crate::error::{Error, Result};
use crate::kernels::{free_kernel, DiagonalEvaluator, KernelEvaluator, KernelKind, TruncationPolicy};
use crate::lattice::{hermitian_slice, symplectic_slice, ComplexPoint, LatticePoint};
use crate::operators::{
    act, bump, dbar_fd, ground_transform, j_factor, magnetic_translate, poincare_periodize, projective_phase,
    spectrum_fd, Direction, EigenOptions, Exterior, GridField, GroupElement, Picture, SampledFunction, SpectralReport,
};
use crate::quadrature::{
    box_rule, composite_domain_rule, fundamental_domain_rule, gauss_laguerre_rule, unit_interval_rule, DomainRule,
};
use crate::specfun::{binomial_multiplicity, kummer_terminating, q_profile, sphere_volume, RadialProfile};

pub mod suite;

pub use suite::{run_suite, SuiteSettings};

/// Largest l_max accepted by [`selberg_matrix`].
pub const MAX_SELBERG_LEVEL: usize = 10;

/// Seed for the sample points of randomized checks.
pub const SAMPLE_SEED: u64 = 0x1a4d;

/// One measured residual against its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Residual {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance }
    }

    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value >= 0.0 && self.value <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub inputs: String,
    pub residuals: Vec<Residual>,
    /// Auxiliary values (computed trace, expected value, ...).
    pub metrics: BTreeMap<String, f64>,
    pub passed: bool,
    pub runtime_seconds: f64,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, inputs: impl Into<String>, residuals: Vec<Residual>, start: Instant) -> Self {
        let passed = !residuals.is_empty() && residuals.iter().all(Residual::passed);
        Self {
            name: name.into(),
            inputs: inputs.into(),
            residuals,
            metrics: BTreeMap::new(),
            passed,
            runtime_seconds: start.elapsed().as_secs_f64(),
        }
    }

    pub fn with_metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    /// Largest residual-to-tolerance ratio.
    pub fn worst_ratio(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| match (r.value, r.tolerance) {
                (v, t) if t > 0.0 => v / t,
                (0.0, _) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

/// Default tolerances of the suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub dimension: f64,
    pub character_independence: f64,
    pub theta_dimension: f64,
    pub selberg: f64,
    pub character_integral: f64,
    pub bargmann: f64,
    pub periodization: f64,
    pub functional_equation: f64,
    pub reproducing: f64,
    pub dbar: f64,
    pub restriction: f64,
    pub chain_rule: f64,
    /// Relative error of FD eigenvalue clusters.
    pub spectrum: f64,
    /// Minimum observed convergence order of the ∂̄ residual.
    pub ground_order: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            dimension: 1e-5,
            character_independence: 2e-6,
            theta_dimension: 1e-5,
            selberg: 1e-10,
            character_integral: 1e-12,
            bargmann: 1e-5,
            periodization: 1e-13,
            functional_equation: 1e-8,
            reproducing: 1e-6,
            // second-order FD floor is ~1.3e-3 at N=256
            dbar: 5e-3,
            restriction: 1e-5,
            chain_rule: 1e-12,
            spectrum: 0.02,
            ground_order: 1.8,
        }
    }
}

/// C(n+l−1, l) (ν/π)ⁿ vol.
pub fn closed_dimension(n: usize, l: usize, nu: f64, vol: f64) -> f64 {
    binomial_multiplicity(n, l) * (nu / PI).powi(n as i32) * vol
}

/// A trace compared with its closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceResult {
    pub value: f64,
    pub expected: f64,
    pub relative_gap: f64,
    pub report: VerificationReport,
}

fn cell_radius(data: &AutomorphicData) -> f64 {
    data.lattice().cell_diameter()
}

fn trace_of(
    name: &str,
    data: &AutomorphicData,
    kind: KernelKind,
    order: usize,
    policy: &TruncationPolicy,
    expected: f64,
    tolerance: f64,
) -> Result<TraceResult> {
    let start = Instant::now();
    data.require_rdq()?;
    let rule = fundamental_domain_rule(data.lattice(), order)?;
    let theta = matches!(kind, KernelKind::Theta);
    let ev = DiagonalEvaluator::new(data, kind, *policy)?;
    let nu = data.nu();
    let value = rule
        .integrate(|z| {
            let weight = if theta { (-nu * z.norm_sqr()).exp() } else { 1.0 };
            ev.eval(z) * weight
        })
        .re;
    let relative_gap = (value - expected).abs() / expected;
    let inputs = format!(
        "nu={nu}, n={}, vol={:.6}, order={order}, tolerance={:e}, radius={}",
        data.n(),
        data.lattice().cell_volume(),
        policy.tolerance,
        ev.radius()
    );
    let report =
        VerificationReport::new(name, inputs, vec![Residual::new("relative_gap", relative_gap, tolerance)], start)
            .with_metric("trace", value)
            .with_metric("expected", expected);
    Ok(TraceResult { value, expected, relative_gap, report })
}

/// ∫_Λ K^ν_{l;Γ,χ}(z, z) dm against the closed dimension formula.
pub fn dimension_by_trace(
    data: &AutomorphicData,
    l: usize,
    order: usize,
    policy: &TruncationPolicy,
    tolerance: f64,
) -> Result<TraceResult> {
    let expected = closed_dimension(data.n(), l, data.nu(), data.lattice().cell_volume());
    trace_of(&format!("dimension_trace_l{l}"), data, KernelKind::Level(l), order, policy, expected, tolerance)
}

/// ∫_Λ K^ν_{Γ,χ}(z, z) e^{−ν|z|²} dm against (ν/π)ⁿ vol.
pub fn theta_dimension_by_trace(
    data: &AutomorphicData,
    order: usize,
    policy: &TruncationPolicy,
    tolerance: f64,
) -> Result<TraceResult> {
    let expected = closed_dimension(data.n(), 0, data.nu(), data.lattice().cell_volume());
    trace_of("theta_dimension_trace", data, KernelKind::Theta, order, policy, expected, tolerance)
}

/// h_{l,j} = ∫ Q^ν_l(|w|) ₁F₁(−j; n; ν|w|²) e^{−ν|w|²/2} dm(w), 0 ≤ l, j ≤ l_max.
///
/// With x = ν|w|² the integral becomes a Gauss-Laguerre integral with
/// weight x^{n−1} e^{−x} and polynomial integrand.
pub fn selberg_matrix(nu: f64, n: usize, l_max: usize, order: usize) -> Result<DMatrix<f64>> {
    if l_max > MAX_SELBERG_LEVEL {
        return Err(Error::Precondition(format!("l_max = {l_max} exceeds {MAX_SELBERG_LEVEL}")));
    }
    if !(nu > 0.0) || n == 0 {
        return Err(Error::Precondition("nu > 0 and n ≥ 1 required".into()));
    }
    let rule = gauss_laguerre_rule(order, n as f64 - 1.0)?;
    if rule.exactness_degree() < 2 * l_max {
        return Err(Error::Precondition(format!(
            "Gauss-Laguerre order {order} is exact to degree {}, need {}",
            rule.exactness_degree(),
            2 * l_max
        )));
    }
    let pref = sphere_volume(n) / (2.0 * nu.powi(n as i32));
    Ok(DMatrix::from_fn(l_max + 1, l_max + 1, |l, j| {
        pref * rule.integrate(|x| {
            let r = (x / nu).sqrt();
            // Q e^{−x/2} = polynomial · e^{−x}, and the rule supplies e^{−x}
            q_profile(nu, l, n, r) * (x / 2.0).exp() * kummer_terminating(j, n, x)
        })
    }))
}

/// |∫_Λ e^{2iνω(w,γ)} dm(w)| for each γ.
///
/// With w = Σ t_a u_a the phase is Σ_a 2νω(u_a, γ) t_a, so the tensor
/// composite Gauss-Legendre rule on the unit cube factors into a product of
/// one-dimensional sums, evaluated as such.
pub fn verify_character_integral(
    data: &AutomorphicData,
    gammas: &[LatticePoint],
    order: usize,
    panels: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if order < 1 || panels < 1 {
        return Err(Error::Precondition("order and panels must be positive".into()));
    }
    let nu = data.nu();
    let lattice = data.lattice();
    let (nodes, weights) = unit_interval_rule(order, panels);
    let residuals = gammas
        .iter()
        .map(|g| {
            let v: Complex64 = lattice
                .generators()
                .iter()
                .map(|u| {
                    let c = 2.0 * nu * symplectic_slice(&u.coords, &g.value.coords);
                    nodes.iter().zip(&weights).map(|(t, w)| Complex64::from_polar(*w, c * t)).sum::<Complex64>()
                })
                .product();
            Residual::new(format!("gamma={:?}", g.m), v.norm() * lattice.cell_volume(), tolerance)
        })
        .collect();
    Ok(VerificationReport::new(
        "character_integral",
        format!("nu={nu}, order={order}, panels={panels}"),
        residuals,
        start,
    ))
}

/// Gauss-Legendre order for [`verify_character_integral`]: the largest
/// per-axis phase 2ν|ω(u_a, γ)| plus 8, and at least 16.
pub fn character_integral_order(data: &AutomorphicData, gammas: &[LatticePoint]) -> usize {
    let nu = data.nu();
    let phase = gammas
        .iter()
        .flat_map(|g| {
            data.lattice()
                .generators()
                .iter()
                .map(move |u| (2.0 * nu * symplectic_slice(&u.coords, &g.value.coords)).abs())
        })
        .fold(0.0, f64::max);
    16.max(phase.ceil() as usize + 8)
}

fn sample_points(data: &AutomorphicData, count: usize, seed: u64) -> Vec<ComplexPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 2 * data.n();
    (0..count)
        .map(|_| {
            let t: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
            data.lattice().point_at(&t)
        })
        .collect()
}

/// Automorphy factor of the given picture for a shift by γ.
fn automorphy(data: &AutomorphicData, picture: Picture, z: &ComplexPoint, gamma: &LatticePoint) -> Complex64 {
    let nu = data.nu();
    let chi = data.chi_unchecked(&gamma.m);
    match picture {
        Picture::F => chi * Complex64::from_polar(1.0, nu * symplectic_slice(&z.coords, &gamma.value.coords)),
        Picture::G => {
            chi * (hermitian_slice(&z.coords, &gamma.value.coords) * nu + nu * gamma.value.norm_sqr() / 2.0).exp()
        }
    }
}

/// max over samples z and shifts γ of |f(z+γ) − factor·f(z)| / (1 + |f(z+γ)|).
///
/// Shifts default to the generators when `gammas` is empty.
pub fn verify_functional_equation(
    f: &SampledFunction,
    data: &AutomorphicData,
    picture: Picture,
    samples: usize,
    gammas: &[LatticePoint],
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    data.require_rdq()?;
    let lattice = data.lattice();
    let shifts: Vec<LatticePoint> = if gammas.is_empty() {
        (0..lattice.generators().len())
            .map(|j| {
                let mut m = vec![0; lattice.generators().len()];
                m[j] = 1;
                lattice.point(&m)
            })
            .collect()
    } else {
        gammas.to_vec()
    };
    let mut worst: f64 = 0.0;
    for z in sample_points(data, samples, SAMPLE_SEED) {
        let fz = f.eval(&z);
        for g in &shifts {
            let shifted = f.eval(&z.add(&g.value));
            let expected = automorphy(data, picture, &z, g) * fz;
            worst = worst.max((shifted - expected).norm() / (1.0 + shifted.norm()));
        }
    }
    let name = match picture {
        Picture::F => "functional_equation",
        Picture::G => "theta_functional_equation",
    };
    Ok(VerificationReport::new(
        name,
        format!("nu={}, samples={samples}, shifts={}", data.nu(), shifts.len()),
        vec![Residual::new("max_relative_defect", worst, tolerance)],
        start,
    ))
}

/// The integral operator f ↦ ∫_Λ K(·, w) f(w) dμ(w) of a periodized kernel,
/// dμ = e^{−ν|w|²}dm for the theta kernel and dm otherwise.
pub struct KernelOperator {
    evaluator: KernelEvaluator,
    rule: DomainRule,
    theta: bool,
}

impl KernelOperator {
    /// `z_max` bounds the points the operator will be evaluated at.
    pub fn new(
        data: &AutomorphicData,
        kind: KernelKind,
        rule: DomainRule,
        policy: &TruncationPolicy,
        z_max: f64,
    ) -> Result<Self> {
        let w_max = rule.nodes.iter().map(ComplexPoint::norm).fold(0.0, f64::max);
        let theta = matches!(kind, KernelKind::Theta);
        let evaluator = KernelEvaluator::new(data, kind, *policy, z_max, w_max)?;
        Ok(Self { evaluator, rule, theta })
    }

    pub fn apply(&self, f: &SampledFunction, points: &[ComplexPoint]) -> Result<Vec<Complex64>> {
        let nu = self.evaluator.data().nu();
        let values: Vec<Complex64> = self
            .rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .map(|(w, wt)| {
                let weight = if self.theta { (-nu * w.norm_sqr()).exp() } else { 1.0 };
                f.eval(w) * (wt * weight)
            })
            .collect();
        points
            .iter()
            .map(|z| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (w, v) in self.rule.nodes.iter().zip(&values) {
                    acc += self.evaluator.try_eval(z, w)? * v;
                }
                Ok(acc)
            })
            .collect()
    }
}

/// max_z |f(z) − ∫K(z,·)f| / max|f| at `points`.
pub fn verify_reproducing(
    data: &AutomorphicData,
    kind: KernelKind,
    f: &SampledFunction,
    order: usize,
    policy: &TruncationPolicy,
    points: &[ComplexPoint],
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    data.require_rdq()?;
    let label = kind.label();
    let z_max = points.iter().map(ComplexPoint::norm).fold(0.0, f64::max);
    let op = KernelOperator::new(data, kind, fundamental_domain_rule(data.lattice(), order)?, policy, z_max)?;
    let projected = op.apply(f, points)?;
    let values: Vec<Complex64> = points.iter().map(|z| f.eval(z)).collect();
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let worst = values.iter().zip(&projected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    Ok(VerificationReport::new(
        format!("reproducing_{label}"),
        format!("nu={}, order={order}, points={}", data.nu(), points.len()),
        vec![Residual::new("max_relative_defect", worst, tolerance)],
        start,
    ))
}

/// Coordinate values of the Bargmann test points.
pub const BARGMANN_POINTS: [(f64, f64); 5] = [(0.0, 0.0), (0.5, 0.0), (1.0, 1.0), (-0.7, 0.3), (0.2, -1.1)];

/// The five Bargmann test points in ℂⁿ: coordinate k of point i is
/// `BARGMANN_POINTS[(i + k) % 5]`.
pub fn bargmann_points(n: usize) -> Vec<ComplexPoint> {
    (0..BARGMANN_POINTS.len())
        .map(|i| {
            ComplexPoint::new(
                (0..n)
                    .map(|k| {
                        let (re, im) = BARGMANN_POINTS[(i + k) % BARGMANN_POINTS.len()];
                        Complex64::new(re, im)
                    })
                    .collect(),
            )
        })
        .collect()
}

/// (ν/π)ⁿ ∫ e^{ν⟨z,w⟩} w^α e^{−ν|w|²} dm(w) over the box [−R, R]^{2n}
/// against z^α at the five test points.
pub fn verify_bargmann_reproducing(
    nu: f64,
    n: usize,
    alpha: &[usize],
    radius: f64,
    order: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if alpha.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: alpha.len() });
    }
    let degree: usize = alpha.iter().sum();
    if degree > 4 {
        return Err(Error::Precondition(format!("|alpha| = {degree} exceeds 4")));
    }
    let points = bargmann_points(n);
    // |e^{ν⟨z,w⟩ − ν|w|²}| = e^{ν|z|²/4 − ν|w − z/2|²}; bound the mass outside the box
    let z_max = points.iter().map(ComplexPoint::norm).fold(0.0, f64::max);
    let gap = radius - z_max / 2.0;
    let tail = if gap > 0.0 {
        (nu * z_max * z_max / 4.0 - nu * gap * gap).exp() * (radius + z_max).powi(degree as i32 + 2 * n as i32) * 10.0
    } else {
        f64::INFINITY
    };
    if !(tail < 1e-10) {
        return Err(Error::Range(format!("box radius {radius} leaves a Gaussian tail of {tail:.2e}")));
    }
    // Integrand and weight factor over coordinates, so the tensor rule on
    // [−R, R]^{2n} is the product of planar sums; unit-width panels.
    let panels = ((2.0 * radius).ceil() as usize).max(1);
    let rule = box_rule(&ComplexPoint::zero(1), radius, order, panels)?;
    let pref = nu / PI;
    let planar: Vec<(Complex64, Complex64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(w, wt)| (w.first(), Complex64::from(wt * (-nu * w.norm_sqr()).exp())))
        .collect();
    let mut worst: f64 = 0.0;
    for z in &points {
        let mut acc = Complex64::new(1.0, 0.0);
        let mut exact = Complex64::new(1.0, 0.0);
        for (zk, &k) in z.coords.iter().zip(alpha) {
            let sum: Complex64 = planar.iter().map(|(w, v)| (zk * w.conj() * nu).exp() * w.powu(k as u32) * v).sum();
            acc *= sum * pref;
            exact *= zk.powu(k as u32);
        }
        worst = worst.max((acc - exact).norm());
    }
    Ok(VerificationReport::new(
        format!("bargmann_reproducing_{alpha:?}"),
        format!("nu={nu}, n={n}, radius={radius}, order={order}, panels={panels}"),
        vec![Residual::new("max_abs_defect", worst, tolerance)],
        start,
    ))
}

/// ∂̄ and functional-equation residuals of g = 𝔊f for an l = 0 section f.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolomorphyResult {
    pub dbar_residual: f64,
    pub fe_residual: f64,
    pub report: VerificationReport,
}

/// Relative ∂̄ residual max|∂̄g| / max|g| on the N-grid, by central differences.
pub fn dbar_residual(data: &AutomorphicData, g: &SampledFunction, n_grid: usize) -> Result<f64> {
    let field = GridField::sample(data.lattice(), n_grid, g)?;
    let d = dbar_fd(data, &field, Exterior::Sampled(g))?;
    Ok(d.max_abs() / field.max_abs())
}

/// The level-0 section f = K_0(·, w₀) mapped to g = 𝔊f: checks ∂̄g ≈ 0 on the
/// grid and g(z+γ) = χ(γ) e^{ν⟨z,γ⟩ + ν|γ|²/2} g(z) for γ = u₁, u₂, u₁+u₂.
pub fn verify_holomorphic_isomorphism(
    data: &AutomorphicData,
    w0: &ComplexPoint,
    n_grid: usize,
    policy: &TruncationPolicy,
    tolerances: (f64, f64),
) -> Result<HolomorphyResult> {
    let start = Instant::now();
    if data.n() != 1 {
        return Err(Error::UnsupportedDimension(data.n()));
    }
    data.require_rdq()?;
    // grid stencils and shifted samples reach about two cell diameters out
    let reach = 2.0 * cell_radius(data) + 1.0;
    let ev = KernelEvaluator::new(data, KernelKind::Level(0), *policy, reach, w0.norm())?;
    let section = ev.section(w0.clone())?;
    let f = SampledFunction::new(move |z| section.eval(z));
    let g = ground_transform(data.nu(), &f, Direction::Forward);
    let dbar = dbar_residual(data, &g, n_grid)?;
    let lattice = data.lattice();
    let shifts = [lattice.point(&[1, 0]), lattice.point(&[0, 1]), lattice.point(&[1, 1])];
    let fe = verify_functional_equation(&g, data, Picture::G, 20, &shifts, tolerances.1)?;
    let fe_residual = fe.residuals[0].value;
    let report = VerificationReport::new(
        "holomorphic_isomorphism",
        format!("nu={}, grid={n_grid}, w0={:?}", data.nu(), w0.coords),
        vec![
            Residual::new("dbar_relative", dbar, tolerances.0),
            Residual::new("theta_fe_defect", fe_residual, tolerances.1),
        ],
        start,
    );
    Ok(HolomorphyResult { dbar_residual: dbar, fe_residual, report })
}

/// Full-plane ∫ K^ν_l(z,w) ψ(w) dm over a box around z against the cell
/// integral ∫_Λ K^ν_{l;Γ,χ}(z,w) ψ(w) dm, at `points`.
#[allow(clippy::too_many_arguments)]
pub fn verify_restriction_identity(
    data: &AutomorphicData,
    l: usize,
    psi: &SampledFunction,
    policy: &TruncationPolicy,
    order: usize,
    cell_panels: usize,
    points: &[ComplexPoint],
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    data.require_rdq()?;
    if data.n() != 1 {
        return Err(Error::UnsupportedDimension(data.n()));
    }
    let nu = data.nu();
    // box half-width from the Gaussian envelope of Q_l, with margin
    let mut half = 1.0;
    while q_envelope(nu, l, half) * (2.0 * half).powi(2) > policy.tolerance {
        half += 0.5;
    }
    let panel_width = 0.25;
    let panels = ((2.0 * half) / panel_width).ceil() as usize;
    let z_max = points.iter().map(ComplexPoint::norm).fold(0.0, f64::max);
    let cell = KernelOperator::new(
        data,
        KernelKind::Level(l),
        composite_domain_rule(data.lattice(), order, cell_panels)?,
        policy,
        z_max,
    )?;
    let right = cell.apply(psi, points)?;
    let mut worst: f64 = 0.0;
    for (z, r) in points.iter().zip(&right) {
        let rule = box_rule(z, half, order, panels)?;
        let left = rule.integrate(|w| free_kernel(nu, l, z, w).unwrap_or_default() * psi.eval(w));
        worst = worst.max((left - r).norm());
    }
    Ok(VerificationReport::new(
        format!("restriction_identity_l{l}"),
        format!("nu={nu}, order={order}, box_half_width={half}, box_panels={panels}, cell_panels={cell_panels}"),
        vec![Residual::new("max_abs_gap", worst, tolerance)],
        start,
    ))
}

/// Periodized bump centered in the cell: functional-equation defect at
/// random points and agreement with the bump on its support.
pub fn verify_periodization(
    data: &AutomorphicData,
    radius: f64,
    samples: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let lattice = data.lattice();
    let center = lattice.point_at(&vec![0.5; 2 * data.n()]);
    let psi = bump(center.clone(), radius);
    let p = poincare_periodize(data, &psi)?;
    let fe = verify_functional_equation(&p, data, Picture::F, samples, &[], tolerance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0xb0);
    let mut support_gap: f64 = (p.eval(&center) - psi.eval(&center)).norm();
    for _ in 0..samples {
        // uniform in the support ball's bounding box, rejected outside
        let offset: Vec<Complex64> = (0..data.n())
            .map(|_| Complex64::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius)))
            .collect();
        let z = center.add(&ComplexPoint::new(offset));
        if z.sub(&center).norm() < radius {
            support_gap = support_gap.max((p.eval(&z) - psi.eval(&z)).norm());
        }
    }
    Ok(VerificationReport::new(
        "poincare_periodization",
        format!("nu={}, bump_radius={radius}, samples={samples}", data.nu()),
        vec![
            Residual::new("functional_equation_defect", fe.residuals[0].value, tolerance),
            Residual::new("support_gap", support_gap, tolerance),
        ],
        start,
    ))
}

/// Chain rule of j_ν and the projective law of T^ν_g on random triples.
pub fn verify_chain_rule(nu: f64, n: usize, trials: usize, tolerance: f64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0xc4);
    let f = SampledFunction::new(|z: &ComplexPoint| {
        let s: Complex64 = z.coords.iter().enumerate().map(|(k, c)| c * (k as f64 + 1.0)).sum();
        (Complex64::new(0.3, 1.0) + s) * (-z.norm_sqr() / 4.0).exp()
    });
    let (mut chain, mut projective): (f64, f64) = (0.0, 0.0);
    for _ in 0..trials {
        let g1 = GroupElement::random(&mut rng, n, 2.0);
        let g2 = GroupElement::random(&mut rng, n, 2.0);
        let z = GroupElement::random(&mut rng, n, 2.0).shift().clone();
        let phase = Complex64::from_polar(1.0, projective_phase(nu, &g1, &g2)?);
        let g12 = g1.compose(&g2);
        let lhs = j_factor(nu, &g12, &z)?;
        let rhs = phase * j_factor(nu, &g1, &act(&g2, &z)?)? * j_factor(nu, &g2, &z)?;
        chain = chain.max((lhs - rhs).norm());
        let direct = magnetic_translate(nu, &g12, &f).eval(&z);
        let nested = magnetic_translate(nu, &g2, &magnetic_translate(nu, &g1, &f)).eval(&z);
        projective = projective.max((direct - phase * nested).norm());
    }
    Ok(VerificationReport::new(
        "chain_rule_projective_law",
        format!("nu={nu}, n={n}, trials={trials}"),
        vec![
            Residual::new("chain_rule_defect", chain, tolerance),
            Residual::new("projective_law_defect", projective, tolerance),
        ],
        start,
    ))
}

/// φ_l bounded on [0, 30] for integer l ≤ 3 (|e^{−x/2}L_l(x)| ≤ 1), while the
/// half-integer solution φ_{1.5} exceeds 10⁶ by r = 30.
pub fn verify_boundedness(nu: f64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut residuals = Vec::new();
    for l in 0..=3 {
        let profile = RadialProfile::new(nu, l as f64, 1)?;
        let mut peak: f64 = 0.0;
        for k in 0..=3000 {
            peak = peak.max(profile.eval(30.0 * k as f64 / 3000.0)?.abs());
        }
        residuals.push(Residual::new(format!("max_abs_phi_{l}"), peak, 1.0 + 1e-12));
    }
    let unbounded = RadialProfile::new(nu, 1.5, 1)?.eval(30.0)?.abs();
    residuals.push(Residual::new("inverse_growth_phi_1.5", 1e6 / unbounded, 1.0));
    Ok(VerificationReport::new("boundedness_dichotomy", format!("nu={nu}, r in [0, 30]"), residuals, start)
        .with_metric("abs_phi_1.5_at_30", unbounded))
}

/// Observed convergence order of the ∂̄ residual between grids N and 2N.
pub fn verify_ground_state_order(
    data: &AutomorphicData,
    w0: &ComplexPoint,
    n_grid: usize,
    policy: &TruncationPolicy,
    min_order: f64,
    fe_tolerance: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let coarse = verify_holomorphic_isomorphism(data, w0, n_grid, policy, (f64::INFINITY, fe_tolerance))?;
    let fine = verify_holomorphic_isomorphism(data, w0, 2 * n_grid, policy, (f64::INFINITY, fe_tolerance))?;
    let order = (coarse.dbar_residual / fine.dbar_residual).log2();
    Ok(VerificationReport::new(
        "ground_state_isomorphism",
        format!("nu={}, grids={}/{}", data.nu(), n_grid, 2 * n_grid),
        vec![
            Residual::new("order_shortfall", (min_order - order).max(0.0), 0.0),
            Residual::new("theta_fe_defect", coarse.fe_residual.max(fine.fe_residual), fe_tolerance),
        ],
        start,
    )
    .with_metric("observed_order", order)
    .with_metric("dbar_coarse", coarse.dbar_residual)
    .with_metric("dbar_fine", fine.dbar_residual))
}

/// FD spectrum against ν(2l + n) and the closed multiplicities, plus the
/// absence of eigenvalues near the half-integer level.
pub fn verify_spectrum(
    data: &AutomorphicData,
    n_grid: usize,
    k: usize,
    clusters: usize,
    relative_tolerance: f64,
) -> Result<(SpectralReport, VerificationReport)> {
    let start = Instant::now();
    let report = spectrum_fd(data, n_grid, k, &EigenOptions::default())?;
    let complete: Vec<_> = report.clusters.iter().filter(|c| c.complete).take(clusters).collect();
    let value_gap = complete.iter().map(|c| c.relative_error).fold(0.0, f64::max);
    let multiplicity_gap = complete
        .iter()
        .enumerate()
        .map(|(l, c)| {
            let wrong_level = if c.level == l { 0.0 } else { 1.0 };
            (c.multiplicity as f64 - c.expected_multiplicity).abs() + wrong_level
        })
        .fold((clusters - complete.len()) as f64, f64::max);
    let nu = data.nu();
    let midgap_shortfall = (0.5 * nu - report.midgap_distance).max(0.0);
    let verification = VerificationReport::new(
        "fd_spectrum",
        format!("nu={nu}, grid={n_grid}, k={k}"),
        vec![
            Residual::new("max_relative_level_error", value_gap, relative_tolerance),
            Residual::new("multiplicity_mismatch", multiplicity_gap, 0.0),
            Residual::new("midgap_shortfall", midgap_shortfall, 0.0),
        ],
        start,
    )
    .with_metric("midgap_distance", report.midgap_distance);
    Ok((report, verification))
}

fn q_envelope(nu: f64, l: usize, r: f64) -> f64 {
    let x = nu * r * r;
    binomial_multiplicity(1, l) * (nu / PI) * (-x / 2.0).exp() * crate::specfun::kummer_terminating_majorant(l, 1, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::{Character, CharacterKind};
    use crate::lattice::Lattice;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::new(1e-10).unwrap()
    }

    #[test]
    fn closed_dimension_examples() {
        assert!((closed_dimension(1, 3, PI, 1.0) - 1.0).abs() < 1e-15);
        assert!((closed_dimension(2, 3, PI, 1.0) - 4.0).abs() < 1e-14);
        assert!((closed_dimension(1, 0, 2.0 * PI, 1.0) - 2.0).abs() < 1e-15);
        for l in 0..=20 {
            let ratio = closed_dimension(2, l, PI, 1.0) / (l as f64 + 1.0);
            assert!((ratio - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn square_weierstrass_traces() {
        let data = AutomorphicData::weierstrass(Lattice::square()).unwrap();
        for l in 0..5 {
            let t = dimension_by_trace(&data, l, 32, &policy(), 1e-6).unwrap();
            assert!(t.report.passed, "{:?}", t.report);
        }
        let theta = theta_dimension_by_trace(&data, 32, &policy(), 1e-5).unwrap();
        assert!(theta.report.passed, "{:?}", theta.report);
    }

    #[test]
    fn trivial_character_at_two_pi() {
        let lat = Lattice::square();
        let data = AutomorphicData::new(2.0 * PI, lat.clone(), Character::trivial(&lat)).unwrap();
        let t = dimension_by_trace(&data, 0, 32, &policy(), 1e-5).unwrap();
        assert!((t.value - 2.0).abs() < 2e-5);
        let theta = theta_dimension_by_trace(&data, 32, &policy(), 1e-5).unwrap();
        assert!((theta.value - 2.0).abs() < 2e-5);
        // doubling the covolume doubles the theta trace
        let big = Lattice::square().scaled(2f64.sqrt()).unwrap();
        let data2 = AutomorphicData::new(2.0 * PI, big.clone(), Character::trivial(&big)).unwrap();
        let theta2 = theta_dimension_by_trace(&data2, 32, &policy(), 1e-5).unwrap();
        assert!((theta2.value / theta.value - 2.0).abs() < 1e-4);
    }

    #[test]
    fn selberg_examples() {
        let h = selberg_matrix(PI, 1, 6, 40).unwrap();
        let defect = (&h - DMatrix::<f64>::identity(7, 7)).amax();
        assert!(defect < 1e-10, "{defect}");
        assert!((h[(0, 0)] - 1.0).abs() < 1e-13);
        let h2 = selberg_matrix(2.0 * PI, 1, 6, 40).unwrap();
        assert!((&h - &h2).amax() < 1e-10);
        assert!((&h - h.transpose()).amax() < 1e-10);
        assert!((&h * &h - &h).amax() < 1e-8);
        let h3 = selberg_matrix(PI, 2, 4, 20).unwrap();
        // for n = 2, ∫ Q_l F(−j) e^{−x/2} = δ_{lj} as well
        assert!((&h3 - DMatrix::<f64>::identity(5, 5)).amax() < 1e-10);
        assert!(matches!(selberg_matrix(PI, 1, 6, 3), Err(Error::Precondition(_))));
        assert!(selberg_matrix(PI, 1, 11, 40).is_err());
    }

    #[test]
    fn character_integral_vanishes() {
        let data = AutomorphicData::weierstrass(Lattice::square()).unwrap();
        let lat = data.lattice();
        let gammas = [lat.point(&[1, 0]), lat.point(&[0, 1]), lat.point(&[1, 1]), lat.point(&[2, 0])];
        let report = verify_character_integral(&data, &gammas, 8, 4, 1e-12).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(character_integral_order(&data, &gammas), 21);
        let report = verify_character_integral(&data, &gammas, 21, 1, 1e-12).unwrap();
        assert!(report.passed, "{report:?}");
        // the factored sum equals the tensor rule on the cell
        let rule = fundamental_domain_rule(lat, 8).unwrap();
        let direct = rule
            .integrate(|w| Complex64::from_polar(1.0, 2.0 * PI * symplectic_slice(&w.coords, &gammas[3].value.coords)));
        let factored = verify_character_integral(&data, &gammas[3..], 8, 1, 1.0).unwrap();
        assert!((direct.norm() - factored.residuals[0].value).abs() < 1e-15);
        // γ = 0 integrates to the cell volume
        let zero = verify_character_integral(&data, &[lat.point(&[0, 0])], 8, 1, 1e-12).unwrap();
        assert!((zero.residuals[0].value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn functional_equation_of_sections() {
        let data = AutomorphicData::weierstrass(Lattice::square()).unwrap();
        let w0 = ComplexPoint::from_re_im(0.3, 0.2);
        let ev = KernelEvaluator::new(&data, KernelKind::Level(1), policy(), 4.0, 1.0).unwrap();
        let s = ev.section(w0.clone()).unwrap();
        let f = SampledFunction::new(move |z| s.eval(z));
        let report = verify_functional_equation(&f, &data, Picture::F, 20, &[], 1e-8).unwrap();
        assert!(report.passed, "{report:?}");

        // theta section transported to the F-picture
        let th = KernelEvaluator::new(&data, KernelKind::Theta, policy(), 4.0, 1.0).unwrap();
        let ts = th.section(w0.clone()).unwrap();
        let g = SampledFunction::new(move |z| ts.eval(z));
        let g_report = verify_functional_equation(&g, &data, Picture::G, 20, &[], 1e-8).unwrap();
        assert!(g_report.passed, "{g_report:?}");
        let f_theta = ground_transform(PI, &g, Direction::Inverse);
        let t_report = verify_functional_equation(&f_theta, &data, Picture::F, 20, &[], 1e-8).unwrap();
        assert!(t_report.passed, "{t_report:?}");

        let broken = data.with_character(data.character().with_negated_generator(0)).unwrap();
        assert_eq!(broken.character().kind(), CharacterKind::Explicit);
        let bad = verify_functional_equation(&f, &broken, Picture::F, 20, &[], 1e-8).unwrap();
        assert!(!bad.passed);
        assert!(bad.residuals[0].value > 0.1);
    }

    #[test]
    fn reproducing_identities() {
        let data = AutomorphicData::weierstrass(Lattice::square()).unwrap();
        let w0 = ComplexPoint::from_re_im(0.3, 0.2);
        let points: Vec<ComplexPoint> = [(0.1, 0.2), (0.5, 0.5), (0.8, 0.3), (0.25, 0.9), (0.6, 0.05)]
            .iter()
            .map(|&(a, b)| ComplexPoint::from_re_im(a, b))
            .collect();
        let mk = |kind: KernelKind| {
            let ev = KernelEvaluator::new(&data, kind, policy(), 2.0, 1.0).unwrap();
            let s = ev.section(w0.clone()).unwrap();
            SampledFunction::new(move |z| s.eval(z))
        };
        let theta = mk(KernelKind::Theta);
        let r = verify_reproducing(&data, KernelKind::Theta, &theta, 32, &policy(), &points, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        let l0 = mk(KernelKind::Level(0));
        let r = verify_reproducing(&data, KernelKind::Level(0), &l0, 32, &policy(), &points, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        let l1 = mk(KernelKind::Level(1));
        let op = KernelOperator::new(
            &data,
            KernelKind::Level(0),
            fundamental_domain_rule(data.lattice(), 32).unwrap(),
            &policy(),
            2.0,
        )
        .unwrap();
        let cross = op.apply(&l1, &points).unwrap();
        let scale = points.iter().map(|z| l1.eval(z).norm()).fold(0.0, f64::max);
        assert!(cross.iter().all(|v| v.norm() < 1e-6 * scale));
    }

    #[test]
    fn bargmann_examples() {
        for k in 0..=4 {
            let r = verify_bargmann_reproducing(PI, 1, &[k], 6.0, 16, 1e-6).unwrap();
            assert!(r.passed, "{r:?}");
        }
        for alpha in [[0, 0], [1, 1], [2, 1], [0, 4]] {
            let r = verify_bargmann_reproducing(PI, 2, &alpha, 6.0, 16, 1e-6).unwrap();
            assert!(r.passed, "{r:?}");
        }
        // w₁w₂ does not vanish at most test points
        assert_eq!(bargmann_points(2).iter().filter(|z| z.coords.iter().all(|c| c.norm() > 0.0)).count(), 3);
        assert!(matches!(verify_bargmann_reproducing(PI, 1, &[2], 1.0, 16, 1e-6), Err(Error::Range(_))));
        assert!(verify_bargmann_reproducing(PI, 1, &[5], 6.0, 16, 1e-6).is_err());
    }

    #[test]
    fn holomorphic_isomorphism() {
        let data = AutomorphicData::weierstrass(Lattice::square()).unwrap();
        let w0 = ComplexPoint::from_re_im(0.3, 0.2);
        let coarse = verify_holomorphic_isomorphism(&data, &w0, 64, &policy(), (1e-2, 1e-8)).unwrap();
        let fine = verify_holomorphic_isomorphism(&data, &w0, 128, &policy(), (1e-2, 1e-8)).unwrap();
        assert!(fine.report.passed, "{:?}", fine.report);
        assert!((coarse.dbar_residual / fine.dbar_residual).log2() > 1.8);

        // z̄·g is not holomorphic
        let ev = KernelEvaluator::new(&data, KernelKind::Level(0), policy(), 4.0, 1.0).unwrap();
        let s = ev.section(w0).unwrap();
        let g = ground_transform(PI, &SampledFunction::new(move |z| s.eval(z)), Direction::Forward);
        let control = g.mul(&SampledFunction::new(|z: &ComplexPoint| z.first().conj()));
        assert!(dbar_residual(&data, &control, 64).unwrap() > 0.1);
    }

    #[test]
    fn restriction_identity() {
        let data = AutomorphicData::weierstrass(Lattice::square()).unwrap();
        let center = data.lattice().point_at(&[0.5, 0.5]);
        let psi = poincare_periodize(&data, &bump(center, 0.3)).unwrap();
        let points: Vec<ComplexPoint> =
            [(0.5, 0.5), (0.2, 0.7)].iter().map(|&(a, b)| ComplexPoint::from_re_im(a, b)).collect();
        let r = verify_restriction_identity(&data, 0, &psi, &policy(), 16, 8, &points, 1e-5).unwrap();
        assert!(r.passed, "{r:?}");
        let zero = SampledFunction::zero();
        let r = verify_restriction_identity(&data, 1, &zero, &policy(), 8, 4, &points[..1], 1e-15).unwrap();
        assert!(r.passed);
    }
}
