//! Geometry of ℂⁿ and full-rank lattices.
//!
//! A point z ∈ ℂⁿ is identified with the real vector
//! `(Re z₁, Im z₁, …, Re zₙ, Im zₙ)` of ℝ²ⁿ. A lattice is given by 2n
//! generators; its period matrix has the real coordinates of generator `j`
//! as column `j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℂⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub coords: Vec<Complex64>,
}

impl ComplexPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        assert!(!coords.is_empty(), "a complex point needs at least one coordinate");
        Self { coords }
    }

    /// Point of ℂ¹.
    pub fn scalar(z: Complex64) -> Self {
        Self { coords: vec![z] }
    }

    pub fn from_re_im(re: f64, im: f64) -> Self {
        Self::scalar(Complex64::new(re, im))
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// First coordinate; convenient for n = 1.
    pub fn first(&self) -> Complex64 {
        self.coords[0]
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coords.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Real coordinates `(Re z₁, Im z₁, …)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_real(x: &[f64]) -> Self {
        assert!(x.len().is_multiple_of(2) && !x.is_empty());
        Self::new(x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

fn check_dims(z: &ComplexPoint, w: &ComplexPoint) -> Result<()> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), got: w.dim() });
    }
    Ok(())
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self::scalar(z)
    }
}

/// ⟨z, w⟩ = Σ z_j · conj(w_j) on raw coordinate slices.
#[inline]
pub fn hermitian_slice(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

/// ω(z, w) = Im⟨z, w⟩ on raw coordinate slices.
#[inline]
pub fn symplectic_slice(z: &[Complex64], w: &[Complex64]) -> f64 {
    z.iter().zip(w).map(|(a, b)| a.im * b.re - a.re * b.im).sum()
}

/// The Hermitian form ⟨z, w⟩ = z₁w̄₁ + ⋯ + zₙw̄ₙ.
pub fn hermitian_inner(z: &ComplexPoint, w: &ComplexPoint) -> Result<Complex64> {
    check_dims(z, w)?;
    Ok(hermitian_slice(&z.coords, &w.coords))
}

/// The symplectic form ω(z, w) = Im⟨z, w⟩.
pub fn symplectic_form(z: &ComplexPoint, w: &ComplexPoint) -> Result<f64> {
    check_dims(z, w)?;
    Ok(symplectic_slice(&z.coords, &w.coords))
}

/// A point γ = Σ m_j u_j of a lattice, carrying its integer coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePoint {
    pub m: Vec<i64>,
    pub value: ComplexPoint,
}

impl LatticePoint {
    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|&k| k == 0)
    }
}

/// JSON form of a lattice: `{ "n": 1, "generators": [[[1,0]], [[0,1]]] }`.
///
/// Each generator is a list of `n` `[re, im]` pairs. For `n = 1` the flat form
/// `[[1,0],[0,1]]` (one pair per generator) is accepted as well.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n: usize,
    pub generators: serde_json::Value,
}

/// Default relative rank tolerance: |det| > tol · (max generator norm)^{2n}.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

/// Full-rank lattice Γ ⊂ ℂⁿ.
#[derive(Clone, Debug)]
pub struct Lattice {
    n: usize,
    generators: Vec<ComplexPoint>,
    period: DMatrix<f64>,
    period_inv: DMatrix<f64>,
    cell_volume: f64,
}

impl Lattice {
    pub fn new(generators: Vec<ComplexPoint>) -> Result<Self> {
        Self::with_rank_tolerance(generators, DEFAULT_RANK_TOLERANCE)
    }

    pub fn with_rank_tolerance(generators: Vec<ComplexPoint>, rank_tol: f64) -> Result<Self> {
        let count = generators.len();
        if count == 0 || !count.is_multiple_of(2) {
            return Err(Error::InvalidLattice(format!("expected 2n generators, got {count}")));
        }
        let n = count / 2;
        for g in &generators {
            if g.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
            }
            if g.coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidLattice("non-finite generator".into()));
            }
        }
        let dim = 2 * n;
        let period = DMatrix::from_fn(dim, dim, |r, c| {
            let z = generators[c].coords[r / 2];
            if r % 2 == 0 {
                z.re
            } else {
                z.im
            }
        });
        let det = period.determinant();
        let scale = generators.iter().map(ComplexPoint::norm).fold(0.0, f64::max);
        if !(det.abs() > rank_tol * scale.powi(dim as i32)) {
            return Err(Error::InvalidLattice(format!("degenerate generators (|det| = {:.3e})", det.abs())));
        }
        let period_inv =
            period.clone().try_inverse().ok_or_else(|| Error::InvalidLattice("singular period matrix".into()))?;
        Ok(Self { n, generators, period, period_inv, cell_volume: det.abs() })
    }

    /// Lattice of ℂ¹ spanned by two complex numbers.
    pub fn planar(u1: Complex64, u2: Complex64) -> Result<Self> {
        Self::new(vec![ComplexPoint::scalar(u1), ComplexPoint::scalar(u2)])
    }

    /// ℤ + iℤ.
    pub fn square() -> Self {
        Self::planar(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).expect("unit square")
    }

    /// ℤ + e^{iπ/3}ℤ.
    pub fn hexagonal() -> Self {
        Self::planar(Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3))
            .expect("hexagonal lattice")
    }

    /// ℤⁿ + iℤⁿ in ℂⁿ with the standard generators e₁, …, eₙ, ie₁, …, ieₙ.
    pub fn standard(n: usize) -> Self {
        let mut gens = Vec::with_capacity(2 * n);
        for unit in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
            for j in 0..n {
                let mut c = vec![Complex64::new(0.0, 0.0); n];
                c[j] = unit;
                gens.push(ComplexPoint::new(c));
            }
        }
        Self::new(gens).expect("standard lattice")
    }

    pub fn from_spec(spec: &LatticeSpec) -> Result<Self> {
        let bad = |msg: &str| Error::Config { field: "lattice.generators".into(), message: msg.into() };
        let list = spec.generators.as_array().ok_or_else(|| bad("expected an array"))?;
        let pair = |v: &serde_json::Value| -> Result<Complex64> {
            let a = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("expected [re, im] pairs"))?;
            let re = a[0].as_f64().ok_or_else(|| bad("non-numeric entry"))?;
            let im = a[1].as_f64().ok_or_else(|| bad("non-numeric entry"))?;
            Ok(Complex64::new(re, im))
        };
        let mut gens = Vec::with_capacity(list.len());
        for g in list {
            let arr = g.as_array().ok_or_else(|| bad("generator must be an array"))?;
            let flat = arr.len() == 2 && arr.iter().all(|x| x.is_number());
            let coords =
                if flat && spec.n == 1 { vec![pair(g)?] } else { arr.iter().map(pair).collect::<Result<Vec<_>>>()? };
            if coords.len() != spec.n {
                return Err(bad(&format!("generator has {} coordinates, n = {}", coords.len(), spec.n)));
            }
            gens.push(ComplexPoint::new(coords));
        }
        if gens.len() != 2 * spec.n {
            return Err(bad(&format!("expected {} generators, got {}", 2 * spec.n, gens.len())));
        }
        Self::new(gens)
    }

    pub fn to_spec(&self) -> LatticeSpec {
        let gens = self
            .generators
            .iter()
            .map(|g| serde_json::json!(g.coords.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()))
            .collect();
        LatticeSpec { n: self.n, generators: serde_json::Value::Array(gens) }
    }

    /// Same lattice with every generator multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.generators.iter().map(|g| g.scale(s)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[ComplexPoint] {
        &self.generators
    }

    pub fn period_matrix(&self) -> &DMatrix<f64> {
        &self.period
    }

    /// Inverse of the period matrix: maps real coordinates to generator coordinates.
    pub fn period_inverse(&self) -> &DMatrix<f64> {
        &self.period_inv
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// Lattice point with integer coordinates `m`.
    pub fn point(&self, m: &[i64]) -> LatticePoint {
        assert_eq!(m.len(), 2 * self.n);
        let mut value = vec![Complex64::new(0.0, 0.0); self.n];
        for (k, g) in m.iter().zip(&self.generators) {
            if *k != 0 {
                for (v, c) in value.iter_mut().zip(&g.coords) {
                    *v += c * (*k as f64);
                }
            }
        }
        LatticePoint { m: m.to_vec(), value: ComplexPoint::new(value) }
    }

    /// Real generator coordinates t with z = Σ t_j u_j.
    pub fn coordinates_of(&self, z: &ComplexPoint) -> Vec<f64> {
        let x = DVector::from_vec(z.to_real());
        (&self.period_inv * x).iter().copied().collect()
    }

    /// z = Σ t_j u_j.
    pub fn point_at(&self, t: &[f64]) -> ComplexPoint {
        let x = &self.period * DVector::from_column_slice(t);
        ComplexPoint::from_real(x.as_slice())
    }

    /// Diameter bound of the fundamental parallelepiped: Σ |u_j|.
    pub fn cell_diameter(&self) -> f64 {
        self.generators.iter().map(ComplexPoint::norm).sum()
    }

    /// Every γ ∈ Γ with |γ| ≤ R, in lexicographic order of `m`.
    pub fn enumerate(&self, radius: f64) -> Vec<LatticePoint> {
        if radius < 0.0 {
            return Vec::new();
        }
        let dim = 2 * self.n;
        // |m_j| = |row_j(M⁻¹) · x| ≤ ‖row_j‖ · R
        let bounds: Vec<i64> = (0..dim)
            .map(|j| {
                let row_norm = self.period_inv.row(j).norm();
                (row_norm * radius + 1e-9).floor() as i64
            })
            .collect();
        let cutoff = radius * radius * (1.0 + 1e-12) + 1e-24;
        let mut out = Vec::new();
        let mut m: Vec<i64> = bounds.iter().map(|b| -b).collect();
        loop {
            let p = self.point(&m);
            if p.value.norm_sqr() <= cutoff {
                out.push(p);
            }
            // odometer increment, last index fastest
            let mut k = dim;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if m[k] < bounds[k] {
                    m[k] += 1;
                    break;
                }
                m[k] = -bounds[k];
            }
        }
    }

    /// Splits z = z₀ + γ with z₀ in the half-open generator parallelepiped.
    pub fn reduce(&self, z: &ComplexPoint) -> (ComplexPoint, LatticePoint) {
        let t = self.coordinates_of(z);
        let m: Vec<i64> = t.iter().map(|x| x.floor() as i64).collect();
        let gamma = self.point(&m);
        (z.sub(&gamma.value), gamma)
    }
}

/// |det| of the period matrix.
pub fn cell_volume(lattice: &Lattice) -> f64 {
    lattice.cell_volume()
}

/// All lattice points of norm at most `radius`, including 0.
pub fn enumerate_lattice(lattice: &Lattice, radius: f64) -> Vec<LatticePoint> {
    lattice.enumerate(radius)
}

pub fn reduce_to_fundamental(lattice: &Lattice, z: &ComplexPoint) -> (ComplexPoint, LatticePoint) {
    lattice.reduce(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermitian_examples() {
        let one = ComplexPoint::from_re_im(1.0, 0.0);
        let i = ComplexPoint::from_re_im(0.0, 1.0);
        assert_eq!(hermitian_inner(&one, &i).unwrap(), c(0.0, -1.0));
        let z = ComplexPoint::from_re_im(1.0, 1.0);
        assert_eq!(hermitian_inner(&z, &z).unwrap(), c(2.0, 0.0));
        let e1 = ComplexPoint::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let e2 = ComplexPoint::new(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(hermitian_inner(&e1, &e2).unwrap(), c(0.0, 0.0));
        assert!(matches!(hermitian_inner(&one, &e1), Err(Error::DimensionMismatch { expected: 1, got: 2 })));
    }

    #[test]
    fn symplectic_examples() {
        let one = ComplexPoint::from_re_im(1.0, 0.0);
        let i = ComplexPoint::from_re_im(0.0, 1.0);
        assert_eq!(symplectic_form(&one, &i).unwrap(), -1.0);
        assert_eq!(symplectic_form(&i, &one).unwrap(), 1.0);
        let z = ComplexPoint::from_re_im(0.3, -2.7);
        assert_eq!(symplectic_form(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn cell_volumes() {
        assert_abs_diff_eq!(Lattice::square().cell_volume(), 1.0, epsilon = 1e-15);
        let rect = Lattice::planar(c(2.0, 0.0), c(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(rect.cell_volume(), 2.0, epsilon = 1e-15);
        // det [[1, 1/2], [0, √3/2]]
        let oracle = 1.0 * (3f64.sqrt() / 2.0) - 0.5 * 0.0;
        assert_abs_diff_eq!(Lattice::hexagonal().cell_volume(), oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle, 0.866_025_403_784_438_6, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_lattice_rejected() {
        let err = Lattice::planar(c(1.0, 1.0), c(2.0, 2.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidLattice(_)));
        let err = Lattice::new(vec![ComplexPoint::from_re_im(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidLattice(_)));
    }

    #[test]
    fn enumeration_examples() {
        let sq = Lattice::square();
        let zero = sq.enumerate(0.0);
        assert_eq!(zero.len(), 1);
        assert!(zero[0].is_zero());
        assert_eq!(sq.enumerate(1.0).len(), 5);
        // brute-force scan of m ∈ [-3,3]²
        let brute = (-3..=3i64)
            .flat_map(|a| (-3..=3i64).map(move |b| (a, b)))
            .filter(|(a, b)| ((a * a + b * b) as f64).sqrt() <= 1.5)
            .count();
        assert_eq!(brute, 9);
        assert_eq!(sq.enumerate(1.5).len(), brute);
        // lexicographic order
        let pts = sq.enumerate(1.5);
        assert!(pts.windows(2).all(|w| w[0].m < w[1].m));
    }

    #[test]
    fn enumeration_count_near_area_law() {
        let hex = Lattice::hexagonal();
        let r: f64 = 10.0;
        let expected = std::f64::consts::PI * r * r / hex.cell_volume();
        let got = hex.enumerate(r).len() as f64;
        assert!(got > expected / 2.0 && got < expected * 2.0, "{got} vs {expected}");
    }

    #[test]
    fn reduction_examples() {
        let sq = Lattice::square();
        let (z0, g) = sq.reduce(&ComplexPoint::from_re_im(2.5, 0.25));
        assert_abs_diff_eq!(z0.first().re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(z0.first().im, 0.25, epsilon = 1e-15);
        assert_eq!(g.m, vec![2, 0]);
        let inside = ComplexPoint::from_re_im(0.3, 0.7);
        let (z0, g) = sq.reduce(&inside);
        assert_eq!(z0, inside);
        assert!(g.is_zero());

        // hexagonal: solve t = M⁻¹ z by hand, then floor
        let hex = Lattice::hexagonal();
        let z = ComplexPoint::from_re_im(1.9, 0.1);
        let s3 = 3f64.sqrt();
        let t2 = 0.1 / (s3 / 2.0);
        let t1 = 1.9 - 0.5 * t2;
        let (z0, g) = hex.reduce(&z);
        assert_eq!(g.m, vec![t1.floor() as i64, t2.floor() as i64]);
        let expect = c(1.9 - t1.floor(), 0.1);
        assert_abs_diff_eq!(z0.first().re, expect.re, epsilon = 1e-13);
        assert_abs_diff_eq!(z0.first().im, expect.im, epsilon = 1e-13);
    }

    #[test]
    fn json_round_trip() {
        let spec: LatticeSpec =
            serde_json::from_str(r#"{"n":1,"generators":[[1,0],[0.5,0.8660254037844386]]}"#).unwrap();
        let lat = Lattice::from_spec(&spec).unwrap();
        assert_abs_diff_eq!(lat.cell_volume(), Lattice::hexagonal().cell_volume(), epsilon = 1e-12);
        let again = Lattice::from_spec(&lat.to_spec()).unwrap();
        assert_eq!(again.generators(), lat.generators());

        let spec2: LatticeSpec =
            serde_json::from_str(r#"{"n":2,"generators":[[[1,0],[0,0]],[[0,0],[1,0]],[[0,1],[0,0]],[[0,0],[0,1]]]}"#)
                .unwrap();
        let lat2 = Lattice::from_spec(&spec2).unwrap();
        assert_abs_diff_eq!(lat2.cell_volume(), 1.0, epsilon = 1e-14);
    }
}
