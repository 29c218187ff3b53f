//! Finite differences on the fundamental cell (n = 1).
//!
//! Grid points are t = (j/N, k/N) in generator coordinates. Derivatives are
//! central differences along t₁, t₂ and the diagonals; the Euclidean
//! Laplacian becomes Σ G_ab ∂_a ∂_b with G = M⁻¹M⁻ᵀ. The magnetic potential
//! A = ν(−y, x) enters through Peierls phases on every stencil arm, and arms
//! leaving the cell are folded back with the automorphy factor.

use num_complex::Complex64;

use super::SampledFunction;
use crate::character::AutomorphicData;
use crate::error::{Error, Result};
use crate::lattice::{hermitian_slice, symplectic_slice, ComplexPoint, Lattice};

/// Smallest grid accepted by the public operators.
pub const MIN_GRID: usize = 16;

/// Hermiticity gate for the assembled Landau matrix (max-entry norm).
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Which functional equation the field obeys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    /// f(z+γ) = χ(γ) e^{iνω(z,γ)} f(z)
    F,
    /// g(z+γ) = χ(γ) e^{ν⟨z,γ⟩ + ν|γ|²/2} g(z)
    G,
}

/// How stencil arms that leave the cell are evaluated.
#[derive(Clone, Copy, Debug)]
pub enum Exterior<'a> {
    /// Fold back into the cell with the automorphy factor.
    Twisted(&'a AutomorphicData),
    /// Evaluate the function directly at the exterior point.
    Sampled(&'a SampledFunction),
}

/// Values on the N×N grid of the fundamental cell.
#[derive(Clone, Debug)]
pub struct GridField {
    lattice: Lattice,
    n_grid: usize,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(lattice: &Lattice, n_grid: usize, values: Vec<Complex64>) -> Result<Self> {
        if lattice.n() != 1 {
            return Err(Error::UnsupportedDimension(lattice.n()));
        }
        if values.len() != n_grid * n_grid {
            return Err(Error::DimensionMismatch { expected: n_grid * n_grid, got: values.len() });
        }
        Ok(Self { lattice: lattice.clone(), n_grid, values })
    }

    pub fn zeros(lattice: &Lattice, n_grid: usize) -> Result<Self> {
        Self::new(lattice, n_grid, vec![Complex64::new(0.0, 0.0); n_grid * n_grid])
    }

    pub fn from_fn(lattice: &Lattice, n_grid: usize, f: impl Fn(&ComplexPoint) -> Complex64) -> Result<Self> {
        let mut field = Self::zeros(lattice, n_grid)?;
        for k in 0..n_grid {
            for j in 0..n_grid {
                let z = field.point(j as i64, k as i64);
                field.values[j + n_grid * k] = f(&z);
            }
        }
        Ok(field)
    }

    pub fn sample(lattice: &Lattice, n_grid: usize, f: &SampledFunction) -> Result<Self> {
        Self::from_fn(lattice, n_grid, |z| f.eval(z))
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn n_grid(&self) -> usize {
        self.n_grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn index(&self, j: usize, k: usize) -> usize {
        j + self.n_grid * k
    }

    /// Point of the (possibly unwrapped) grid index (j, k).
    pub fn point(&self, j: i64, k: i64) -> ComplexPoint {
        let n = self.n_grid as f64;
        self.lattice.point_at(&[j as f64 / n, k as f64 / n])
    }

    /// Σ a ā' · (cell area / N²), a Riemann approximation of ∫_Λ f ḡ.
    pub fn inner(&self, other: &GridField) -> Complex64 {
        let w = self.lattice.cell_volume() / (self.n_grid * self.n_grid) as f64;
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() * w
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &GridField) -> GridField {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        GridField { lattice: self.lattice.clone(), n_grid: self.n_grid, values }
    }

    pub fn scale(&self, s: Complex64) -> GridField {
        GridField {
            lattice: self.lattice.clone(),
            n_grid: self.n_grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

/// Compressed-row sparse complex matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    /// Builds from per-row entry lists; duplicate columns are summed.
    fn from_rows(rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                if cols.len() > *row_ptr.last().unwrap() && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(p) => self.vals[self.row_ptr[i] + p],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * x[self.cols[p]];
            }
            *yi = acc;
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// max |A_ij − conj(A_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[p];
                worst = worst.max((self.vals[p] - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.vals[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Grid geometry in generator coordinates.
struct Geometry {
    h: f64,
    /// real vectors of the generators
    u: [[f64; 2]; 2],
    /// M⁻¹ (rows map (x, y) to t)
    minv: [[f64; 2]; 2],
    /// G = M⁻¹M⁻ᵀ
    g: [[f64; 2]; 2],
}

impl Geometry {
    fn new(lattice: &Lattice, n_grid: usize) -> Result<Self> {
        if lattice.n() != 1 {
            return Err(Error::UnsupportedDimension(lattice.n()));
        }
        let m = lattice.period_matrix();
        let mi = lattice.period_inverse();
        let u = [[m[(0, 0)], m[(1, 0)]], [m[(0, 1)], m[(1, 1)]]];
        let minv = [[mi[(0, 0)], mi[(0, 1)]], [mi[(1, 0)], mi[(1, 1)]]];
        let mut g = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                g[a][b] = minv[a][0] * minv[b][0] + minv[a][1] * minv[b][1];
            }
        }
        Ok(Self { h: 1.0 / n_grid as f64, u, minv, g })
    }

    fn position(&self, j: i64, k: i64) -> [f64; 2] {
        let (t1, t2) = (j as f64 * self.h, k as f64 * self.h);
        [t1 * self.u[0][0] + t2 * self.u[1][0], t1 * self.u[0][1] + t2 * self.u[1][1]]
    }

    /// Second-order stencil of the Euclidean Laplacian as (dj, dk, weight).
    fn laplacian(&self) -> [(i64, i64, f64); 9] {
        let h2 = self.h * self.h;
        let (g11, g22, g12) = (self.g[0][0], self.g[1][1], self.g[0][1]);
        [
            (0, 0, -2.0 * (g11 + g22) / h2),
            (1, 0, g11 / h2),
            (-1, 0, g11 / h2),
            (0, 1, g22 / h2),
            (0, -1, g22 / h2),
            (1, 1, g12 / (2.0 * h2)),
            (-1, -1, g12 / (2.0 * h2)),
            (1, -1, -g12 / (2.0 * h2)),
            (-1, 1, -g12 / (2.0 * h2)),
        ]
    }

    /// Weights of ∂_z̄ = ½(∂_x + i∂_y) on the arms (±1, 0), (0, ±1).
    fn dbar(&self) -> [(i64, i64, Complex64); 4] {
        let c: Vec<Complex64> =
            (0..2).map(|a| Complex64::new(self.minv[a][0], self.minv[a][1]) * 0.5 / (2.0 * self.h)).collect();
        [(1, 0, c[0]), (-1, 0, -c[0]), (0, 1, c[1]), (0, -1, -c[1])]
    }
}

/// Peierls phase θ(a → b) = A((a+b)/2)·(b − a) for A = ν(−y, x).
fn peierls(nu: f64, a: [f64; 2], b: [f64; 2]) -> f64 {
    let (mx, my) = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0);
    nu * (-my * (b[0] - a[0]) + mx * (b[1] - a[1]))
}

/// Stencil of L^ν at grid index (j, k), weights acting on unwrapped values.
fn landau_stencil(nu: f64, geo: &Geometry, j: i64, k: i64) -> [(i64, i64, Complex64); 9] {
    let lap = geo.laplacian();
    let a = geo.position(j, k);
    let mut out = [(0, 0, Complex64::new(0.0, 0.0)); 9];
    for (slot, &(dj, dk, w)) in out.iter_mut().zip(lap.iter()) {
        let b = geo.position(j + dj, k + dk);
        let phase = if dj == 0 && dk == 0 { 0.0 } else { -peierls(nu, a, b) };
        *slot = (dj, dk, Complex64::from_polar(-0.5 * w, phase));
    }
    out
}

/// Stencil of Δ^ν = −¼Δ + ν z̄ ∂_z̄ at (j, k).
fn delta_stencil(nu: f64, geo: &Geometry, j: i64, k: i64) -> Vec<(i64, i64, Complex64)> {
    let z = geo.position(j, k);
    let zbar = Complex64::new(z[0], -z[1]);
    let mut out: Vec<(i64, i64, Complex64)> =
        geo.laplacian().iter().map(|&(dj, dk, w)| (dj, dk, Complex64::new(-0.25 * w, 0.0))).collect();
    for (dj, dk, w) in geo.dbar() {
        out.push((dj, dk, nu * zbar * w));
    }
    out
}

/// Automorphy factor folding the value at q₀ + γ back to q₀.
fn twist(data: &AutomorphicData, picture: Picture, q0: &ComplexPoint, m: &[i64]) -> Complex64 {
    let gamma = data.lattice().point(m).value;
    let chi = data.chi_unchecked(m);
    let nu = data.nu();
    match picture {
        Picture::F => chi * Complex64::from_polar(1.0, nu * symplectic_slice(&q0.coords, &gamma.coords)),
        Picture::G => chi * (hermitian_slice(&q0.coords, &gamma.coords) * nu + nu * gamma.norm_sqr() / 2.0).exp(),
    }
}

/// Resolves the unwrapped index (jj, kk) to (flat index, factor).
fn fold(field: &GridField, data: &AutomorphicData, picture: Picture, jj: i64, kk: i64) -> (usize, Complex64) {
    let n = field.n_grid as i64;
    let (m1, j0) = (jj.div_euclid(n), jj.rem_euclid(n));
    let (m2, k0) = (kk.div_euclid(n), kk.rem_euclid(n));
    let idx = field.index(j0 as usize, k0 as usize);
    if m1 == 0 && m2 == 0 {
        return (idx, Complex64::new(1.0, 0.0));
    }
    (idx, twist(data, picture, &field.point(j0, k0), &[m1, m2]))
}

fn apply_stencil<F, S>(field: &GridField, exterior: Exterior<'_>, picture: Picture, stencil: F) -> GridField
where
    F: Fn(i64, i64) -> S,
    S: IntoIterator<Item = (i64, i64, Complex64)>,
{
    let n = field.n_grid as i64;
    let mut out = field.scale(Complex64::new(0.0, 0.0));
    for k in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (dj, dk, w) in stencil(j, k) {
                let (jj, kk) = (j + dj, k + dk);
                let inside = (0..n).contains(&jj) && (0..n).contains(&kk);
                let v = if inside {
                    field.values[field.index(jj as usize, kk as usize)]
                } else {
                    match exterior {
                        Exterior::Twisted(data) => {
                            let (idx, factor) = fold(field, data, picture, jj, kk);
                            factor * field.values[idx]
                        }
                        Exterior::Sampled(f) => f.eval(&field.point(jj, kk)),
                    }
                };
                acc += w * v;
            }
            let idx = field.index(j as usize, k as usize);
            out.values[idx] = acc;
        }
    }
    out
}

fn check_grid(data: &AutomorphicData, n_grid: usize) -> Result<()> {
    if data.n() != 1 {
        return Err(Error::UnsupportedDimension(data.n()));
    }
    if n_grid < MIN_GRID {
        return Err(Error::Precondition(format!("grid N = {n_grid} is below the minimum {MIN_GRID}")));
    }
    data.require_rdq()
}

/// Assembles L^ν on the N×N grid with twisted boundary; no size check.
pub(crate) fn assemble_unchecked(data: &AutomorphicData, n_grid: usize) -> Result<SparseMatrix> {
    let geo = Geometry::new(data.lattice(), n_grid)?;
    let probe = GridField::zeros(data.lattice(), n_grid)?;
    let n = n_grid as i64;
    let mut rows = Vec::with_capacity(n_grid * n_grid);
    for k in 0..n {
        for j in 0..n {
            let row = landau_stencil(data.nu(), &geo, j, k)
                .iter()
                .map(|&(dj, dk, w)| {
                    let (idx, factor) = fold(&probe, data, Picture::F, j + dj, k + dk);
                    (idx, w * factor)
                })
                .collect();
            rows.push(row);
        }
    }
    let matrix = SparseMatrix::from_rows(rows);
    let defect = matrix.hermiticity_defect();
    if !(defect <= HERMITIAN_TOLERANCE) {
        return Err(Error::Consistency(format!("assembled Landau matrix is not Hermitian (defect {defect:.3e})")));
    }
    Ok(matrix)
}

/// The N²×N² matrix of L^ν with the twisted boundary condition.
pub fn assemble_landau(data: &AutomorphicData, n_grid: usize) -> Result<SparseMatrix> {
    check_grid(data, n_grid)?;
    assemble_unchecked(data, n_grid)
}

/// L^ν applied to an F-picture field, with the twisted boundary condition.
pub fn apply_landau_fd(data: &AutomorphicData, field: &GridField) -> Result<GridField> {
    let matrix = assemble_landau(data, field.n_grid)?;
    let values = matrix.matvec(&field.values);
    GridField::new(&field.lattice, field.n_grid, values)
}

/// Δ^ν = −∂_z∂_z̄ + ν z̄ ∂_z̄ applied to a G-picture field.
pub fn apply_delta_fd(data: &AutomorphicData, field: &GridField, exterior: Exterior<'_>) -> Result<GridField> {
    check_grid(data, field.n_grid)?;
    let geo = Geometry::new(&field.lattice, field.n_grid)?;
    Ok(apply_stencil(field, exterior, Picture::G, |j, k| delta_stencil(data.nu(), &geo, j, k)))
}

/// ∂_z̄ by central differences on a G-picture field.
pub fn dbar_fd(data: &AutomorphicData, field: &GridField, exterior: Exterior<'_>) -> Result<GridField> {
    check_grid(data, field.n_grid)?;
    let geo = Geometry::new(&field.lattice, field.n_grid)?;
    Ok(apply_stencil(field, exterior, Picture::G, |_, _| geo.dbar()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::Character;
    use crate::kernels::{KernelKind, KernelSection, TruncationPolicy};
    use crate::operators::{ground_transform, Direction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn weierstrass(lat: Lattice) -> AutomorphicData {
        AutomorphicData::weierstrass(lat).unwrap()
    }

    fn random_field(lat: &Lattice, n: usize, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values =
            (0..n * n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        GridField::new(lat, n, values).unwrap()
    }

    fn section(data: &AutomorphicData, l: usize) -> SampledFunction {
        let w0 = ComplexPoint::from_re_im(0.3, 0.2);
        let s = KernelSection::new(data, KernelKind::Level(l), w0, TruncationPolicy::new(1e-13).unwrap(), 2.5).unwrap();
        SampledFunction::new(move |z| s.eval(z))
    }

    #[test]
    fn matrix_is_hermitian() {
        let cases = [
            weierstrass(Lattice::square()),
            weierstrass(Lattice::hexagonal()),
            AutomorphicData::new(2.0 * PI, Lattice::square(), Character::trivial(&Lattice::square())).unwrap(),
        ];
        for data in cases {
            let m = assemble_landau(&data, 24).unwrap();
            assert!(m.hermiticity_defect() < 1e-10);
            let f = random_field(data.lattice(), 24, 1);
            let g = random_field(data.lattice(), 24, 2);
            let lf = apply_landau_fd(&data, &f).unwrap();
            let lg = apply_landau_fd(&data, &g).unwrap();
            let gap = (lf.inner(&g) - f.inner(&lg)).norm();
            assert!(gap < 1e-10 * lf.inner(&g).norm().max(1.0), "{gap}");
        }
    }

    #[test]
    fn preconditions() {
        let data = weierstrass(Lattice::square());
        assert!(matches!(assemble_landau(&data, 8), Err(Error::Precondition(_))));
        let lat = Lattice::square();
        let bad = AutomorphicData::new(PI, lat.clone(), Character::trivial(&lat)).unwrap();
        assert!(assemble_landau(&bad, 16).is_err());
        assert!(GridField::new(&lat, 4, vec![Complex64::new(0.0, 0.0); 15]).is_err());
    }

    #[test]
    fn kernel_sections_are_eigenfunctions() {
        let data = weierstrass(Lattice::square());
        for l in 0..2usize {
            let f = section(&data, l);
            let expected = PI * (2 * l + 1) as f64;
            let mut residuals = Vec::new();
            for n in [32, 64] {
                let field = GridField::sample(data.lattice(), n, &f).unwrap();
                let lf = apply_landau_fd(&data, &field).unwrap();
                let r = lf.sub(&field.scale(Complex64::new(expected, 0.0))).max_abs() / (expected * field.max_abs());
                residuals.push(r);
            }
            assert!(residuals[0] < 0.05, "l={l}: {residuals:?}");
            let order = (residuals[0] / residuals[1]).log2();
            assert!(order > 1.8, "l={l}: order {order}");
        }
    }

    #[test]
    fn delta_examples() {
        let data = weierstrass(Lattice::square());
        let n = 32;
        let one = SampledFunction::new(|_| Complex64::new(1.0, 0.0));
        let z = SampledFunction::new(|p: &ComplexPoint| p.first());
        let zbar = SampledFunction::new(|p: &ComplexPoint| p.first().conj());
        for (f, target) in [(one, 0.0), (z, 0.0)] {
            let field = GridField::sample(data.lattice(), n, &f).unwrap();
            let out = apply_delta_fd(&data, &field, Exterior::Sampled(&f)).unwrap();
            assert!(out.max_abs() < 1e-10, "{}", out.max_abs() - target);
        }
        let field = GridField::sample(data.lattice(), n, &zbar).unwrap();
        let out = apply_delta_fd(&data, &field, Exterior::Sampled(&zbar)).unwrap();
        assert!(out.sub(&field.scale(Complex64::new(PI, 0.0))).max_abs() < 1e-10);
    }

    #[test]
    fn conjugation_identity_converges() {
        let data = weierstrass(Lattice::square());
        let f0 = section(&data, 0);
        let f1 = section(&data, 1);
        let f = SampledFunction::new(move |z| f0.eval(z) + Complex64::new(0.5, 0.3) * f1.eval(z));
        let g = ground_transform(PI, &f, Direction::Forward);
        let mut residuals = Vec::new();
        for n in [32, 64, 128] {
            let ff = GridField::sample(data.lattice(), n, &f).unwrap();
            let gf = GridField::sample(data.lattice(), n, &g).unwrap();
            let lhs = apply_delta_fd(&data, &gf, Exterior::Twisted(&data)).unwrap();
            let lf = apply_landau_fd(&data, &ff).unwrap().sub(&ff.scale(Complex64::new(PI, 0.0)));
            let weight =
                GridField::from_fn(data.lattice(), n, |z| Complex64::new(0.5 * (PI * z.norm_sqr() / 2.0).exp(), 0.0))
                    .unwrap();
            let rhs_values = lf.values().iter().zip(weight.values()).map(|(a, w)| a * w).collect();
            let rhs = GridField::new(data.lattice(), n, rhs_values).unwrap();
            residuals.push(lhs.sub(&rhs).max_abs() / gf.max_abs());
        }
        for w in residuals.windows(2) {
            assert!((w[0] / w[1]).log2() > 1.8, "{residuals:?}");
        }
    }

    #[test]
    fn twisted_and_sampled_closure_agree_on_sections() {
        let data = weierstrass(Lattice::square());
        let g = ground_transform(PI, &section(&data, 0), Direction::Forward);
        let field = GridField::sample(data.lattice(), 32, &g).unwrap();
        let a = dbar_fd(&data, &field, Exterior::Twisted(&data)).unwrap();
        let b = dbar_fd(&data, &field, Exterior::Sampled(&g)).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-9 * field.max_abs());
    }
}
