//! Multipliers χ: Γ → U(1), the RDQ gate, and the Weierstrass triplet.
//!
//! A character is stored through its values on the generators and extended to
//! the whole lattice by the RDQ cocycle
//!
//! ```text
//! χ(Σ m_j u_j) = Π_j χ(u_j)^{m_j} · exp(iν Σ_{j<k} m_j m_k ω(u_j, u_k)).
//! ```
//!
//! Once ν·ω(u_j, u_k) = π·q_jk with integer q_jk, the phase factor is the
//! exact sign (−1)^{Σ q_jk m_j m_k}.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{symplectic_slice, Lattice, LatticePoint};

/// Absolute tolerance for "ν·ω ∈ πℤ".
pub const RDQ_TOLERANCE: f64 = 1e-10;

/// Tolerance for |χ(u_j)| = 1.
pub const UNIT_TOLERANCE: f64 = 1e-14;

/// How the character was declared. Closed-form kinds also fix χ on all of Γ,
/// which the RDQ extension has to reproduce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CharacterKind {
    /// χ ≡ 1 on Γ.
    Trivial,
    /// χ(γ) = +1 if γ/2 ∈ Γ, −1 otherwise.
    Weierstrass,
    /// Only the generator values are prescribed.
    Explicit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    generator_values: Vec<Complex64>,
    kind: CharacterKind,
}

impl Character {
    pub fn explicit(generator_values: Vec<Complex64>) -> Result<Self> {
        for (j, v) in generator_values.iter().enumerate() {
            if (v.norm() - 1.0).abs() > UNIT_TOLERANCE {
                return Err(Error::Precondition(format!(
                    "character value on generator {j} has modulus {} ≠ 1",
                    v.norm()
                )));
            }
        }
        Ok(Self { generator_values, kind: CharacterKind::Explicit })
    }

    /// χ ≡ 1.
    pub fn trivial(lattice: &Lattice) -> Self {
        Self { generator_values: vec![Complex64::new(1.0, 0.0); 2 * lattice.n()], kind: CharacterKind::Trivial }
    }

    pub fn generator_values(&self) -> &[Complex64] {
        &self.generator_values
    }

    pub fn kind(&self) -> CharacterKind {
        self.kind
    }

    /// The closed-form value at γ for `Trivial` / `Weierstrass`.
    pub fn literal_value(&self, gamma: &LatticePoint) -> Option<Complex64> {
        match self.kind {
            CharacterKind::Trivial => Some(Complex64::new(1.0, 0.0)),
            // γ/2 ∈ Γ iff every coordinate m_j is even
            CharacterKind::Weierstrass => {
                let even = gamma.m.iter().all(|m| m % 2 == 0);
                Some(Complex64::new(if even { 1.0 } else { -1.0 }, 0.0))
            }
            CharacterKind::Explicit => None,
        }
    }

    /// Copy with the value on generator `j` multiplied by −1.
    pub fn with_negated_generator(&self, j: usize) -> Self {
        let mut values = self.generator_values.clone();
        values[j] = -values[j];
        Self { generator_values: values, kind: CharacterKind::Explicit }
    }
}

/// The Weierstrass pseudo-character of a planar lattice: −1 on both generators.
pub fn weierstrass_character(lattice: &Lattice) -> Result<Character> {
    if lattice.n() != 1 {
        return Err(Error::UnsupportedDimension(lattice.n()));
    }
    Ok(Character { generator_values: vec![Complex64::new(-1.0, 0.0); 2], kind: CharacterKind::Weierstrass })
}

/// ν_Γ = π / S_Γ.
pub fn nu_gamma(lattice: &Lattice) -> Result<f64> {
    if lattice.n() != 1 {
        return Err(Error::UnsupportedDimension(lattice.n()));
    }
    Ok(PI / lattice.cell_volume())
}

/// JSON form of a character.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CharacterSpec {
    Weierstrass,
    Trivial,
    Explicit { generator_values: Vec<[f64; 2]> },
}

impl CharacterSpec {
    pub const KINDS: [&'static str; 3] = ["weierstrass", "trivial", "explicit"];

    pub fn build(&self, lattice: &Lattice) -> Result<Character> {
        match self {
            CharacterSpec::Weierstrass => weierstrass_character(lattice),
            CharacterSpec::Trivial => Ok(Character::trivial(lattice)),
            CharacterSpec::Explicit { generator_values } => {
                if generator_values.len() != 2 * lattice.n() {
                    return Err(Error::Config {
                        field: "character.generator_values".into(),
                        message: format!("expected {} values, got {}", 2 * lattice.n(), generator_values.len()),
                    });
                }
                Character::explicit(generator_values.iter().map(|p| Complex64::new(p[0], p[1])).collect())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// ν·ω(u_j, u_k) is not in πℤ.
    Quantization,
    /// The extension disagrees with the declared closed form at u_j + u_k.
    LiteralMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdqViolation {
    pub j: usize,
    pub k: usize,
    pub kind: ViolationKind,
    /// ν·ω(u_j, u_k).
    pub nu_omega: f64,
    /// Distance to πℤ (quantization) or |χ_ext − χ_literal| (literal mismatch).
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdqReport {
    pub valid: bool,
    pub violations: Vec<RdqViolation>,
}

fn distance_to_pi_z(x: f64) -> (f64, i64) {
    let q = (x / PI).round();
    ((x - q * PI).abs(), q as i64)
}

fn generator_omegas(lattice: &Lattice) -> Vec<Vec<f64>> {
    let gens = lattice.generators();
    gens.iter().map(|a| gens.iter().map(|b| symplectic_slice(&a.coords, &b.coords)).collect()).collect()
}

/// Checks the Riemann–Dirac quantization condition on all generator pairs.
pub fn check_rdq(nu: f64, lattice: &Lattice, character: &Character) -> RdqReport {
    let omega = generator_omegas(lattice);
    let count = 2 * lattice.n();
    let mut violations = Vec::new();
    let values = character.generator_values();
    for j in 0..count {
        for k in j + 1..count {
            let nu_omega = nu * omega[j][k];
            let (dist, _) = distance_to_pi_z(nu_omega);
            if dist > RDQ_TOLERANCE {
                violations.push(RdqViolation { j, k, kind: ViolationKind::Quantization, nu_omega, residual: dist });
                continue;
            }
            // χ(u_j + u_k) by the cocycle in both orders
            let jk = values[j] * values[k] * Complex64::from_polar(1.0, nu_omega);
            let kj = values[k] * values[j] * Complex64::from_polar(1.0, -nu_omega);
            let mut residual = (jk - kj).norm();
            let mut m = vec![0i64; count];
            m[j] = 1;
            m[k] = 1;
            if let Some(lit) = character.literal_value(&lattice.point(&m)) {
                residual = residual.max((jk - lit).norm());
            }
            if residual > RDQ_TOLERANCE {
                violations.push(RdqViolation { j, k, kind: ViolationKind::LiteralMismatch, nu_omega, residual });
            }
        }
    }
    RdqReport { valid: violations.is_empty(), violations }
}

/// The validated triplet (ν, Γ, χ).
#[derive(Clone, Debug)]
pub struct AutomorphicData {
    nu: f64,
    lattice: Lattice,
    character: Character,
    rdq: RdqReport,
    /// q_jk with ν·ω(u_j, u_k) = π·q_jk, filled when RDQ holds.
    quanta: Vec<Vec<i64>>,
}

impl AutomorphicData {
    pub fn new(nu: f64, lattice: Lattice, character: Character) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::Config { field: "nu".into(), message: format!("must be positive, got {nu}") });
        }
        if character.generator_values().len() != 2 * lattice.n() {
            return Err(Error::DimensionMismatch {
                expected: 2 * lattice.n(),
                got: character.generator_values().len(),
            });
        }
        let rdq = check_rdq(nu, &lattice, &character);
        let quanta = generator_omegas(&lattice)
            .iter()
            .map(|row| row.iter().map(|w| distance_to_pi_z(nu * w).1).collect())
            .collect();
        Ok(Self { nu, lattice, character, rdq, quanta })
    }

    /// (ν_Γ, Γ, χ_Γ) for a planar lattice.
    pub fn weierstrass(lattice: Lattice) -> Result<Self> {
        let nu = nu_gamma(&lattice)?;
        let chi = weierstrass_character(&lattice)?;
        Self::new(nu, lattice, chi)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn character(&self) -> &Character {
        &self.character
    }

    pub fn rdq_report(&self) -> &RdqReport {
        &self.rdq
    }

    pub fn rdq_valid(&self) -> bool {
        self.rdq.valid
    }

    pub fn require_rdq(&self) -> Result<()> {
        if self.rdq.valid {
            Ok(())
        } else {
            Err(Error::Precondition(format!("triplet violates RDQ on {} generator pair(s)", self.rdq.violations.len())))
        }
    }

    /// Same lattice and ν with another character.
    pub fn with_character(&self, character: Character) -> Result<Self> {
        Self::new(self.nu, self.lattice.clone(), character)
    }

    /// χ(γ) by the RDQ extension. Requires a valid triplet.
    pub fn chi(&self, gamma: &LatticePoint) -> Result<Complex64> {
        self.require_rdq()?;
        Ok(self.chi_unchecked(&gamma.m))
    }

    pub(crate) fn chi_unchecked(&self, m: &[i64]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (v, &k) in self.character.generator_values().iter().zip(m) {
            if k != 0 {
                acc *= v.powi(k as i32);
            }
        }
        let mut parity = 0i64;
        for j in 0..m.len() {
            for k in j + 1..m.len() {
                parity += (self.quanta[j][k] * m[j] % 2) * (m[k] % 2);
            }
        }
        if parity.rem_euclid(2) == 1 {
            -acc
        } else {
            acc
        }
    }
}

/// χ(γ) through the RDQ cocycle extension.
pub fn extend_character(data: &AutomorphicData, gamma: &LatticePoint) -> Result<Complex64> {
    data.chi(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn weierstrass_square(nu: f64) -> AutomorphicData {
        let lat = Lattice::square();
        let chi = weierstrass_character(&lat).unwrap();
        AutomorphicData::new(nu, lat, chi).unwrap()
    }

    #[test]
    fn rdq_examples() {
        assert!(weierstrass_square(PI).rdq_valid());

        let bad = weierstrass_square(PI / 2.0);
        assert!(!bad.rdq_valid());
        let v = &bad.rdq_report().violations[0];
        assert_eq!((v.j, v.k, v.kind), (0, 1, ViolationKind::Quantization));
        assert_abs_diff_eq!(v.nu_omega, -PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.residual, PI / 2.0, epsilon = 1e-12);

        // 2π·ω(1, i) = −2π: trivial χ is consistent since e^{2πik} = 1
        let lat = Lattice::square();
        let triv = AutomorphicData::new(2.0 * PI, lat.clone(), Character::trivial(&lat)).unwrap();
        assert!(triv.rdq_valid());
        for m in [[1, 1], [3, -2], [-4, 5]] {
            assert_abs_diff_eq!((triv.chi_unchecked(&m) - 1.0).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn trivial_character_needs_even_flux() {
        let lat = Lattice::square();
        let data = AutomorphicData::new(PI, lat.clone(), Character::trivial(&lat)).unwrap();
        let report = data.rdq_report();
        assert!(!report.valid);
        assert_eq!(report.violations[0].kind, ViolationKind::LiteralMismatch);
        // the same generator values declared explicitly form a valid semicharacter
        let explicit = Character::explicit(vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        assert!(check_rdq(PI, &lat, &explicit).valid);
    }

    #[test]
    fn weierstrass_extension_matches_parity() {
        let data = weierstrass_square(PI);
        let lat = data.lattice().clone();
        for a in -5..=5 {
            for b in -5..=5 {
                let g = lat.point(&[a, b]);
                let lit = data.character().literal_value(&g).unwrap();
                assert_eq!(data.chi(&g).unwrap(), lit, "m = ({a},{b})");
            }
        }
        assert_eq!(data.chi(&lat.point(&[1, 1])).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(data.chi(&lat.point(&[2, 0])).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(data.chi(&lat.point(&[1, 0])).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(data.chi(&lat.point(&[3, 2])).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(data.chi(&lat.point(&[0, 0])).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn extension_requires_valid_triplet() {
        let bad = weierstrass_square(PI / 2.0);
        let g = bad.lattice().point(&[1, 0]);
        assert!(matches!(extend_character(&bad, &g), Err(Error::Precondition(_))));
    }

    #[test]
    fn nu_gamma_examples() {
        assert_abs_diff_eq!(nu_gamma(&Lattice::square()).unwrap(), PI, epsilon = 1e-15);
        let rect = Lattice::planar(Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(nu_gamma(&rect).unwrap(), PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nu_gamma(&Lattice::hexagonal()).unwrap(), PI / (PI / 3.0).sin(), epsilon = 1e-14);
        assert!(matches!(nu_gamma(&Lattice::standard(2)), Err(Error::UnsupportedDimension(2))));
        assert!(matches!(weierstrass_character(&Lattice::standard(2)), Err(Error::UnsupportedDimension(2))));
    }

    #[test]
    fn hexagonal_weierstrass_triplet_is_valid() {
        let data = AutomorphicData::weierstrass(Lattice::hexagonal()).unwrap();
        assert!(data.rdq_valid());
    }

    #[test]
    fn non_unit_values_rejected() {
        assert!(Character::explicit(vec![Complex64::new(1.0, 0.1), Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn character_description_parsing() {
        let lat = Lattice::square();
        let s: CharacterSpec = serde_json::from_str(r#"{"kind":"weierstrass"}"#).unwrap();
        assert_eq!(s.build(&lat).unwrap().kind(), CharacterKind::Weierstrass);
        let s: CharacterSpec =
            serde_json::from_str(r#"{"kind":"explicit","generator_values":[[0,1],[-1,0]]}"#).unwrap();
        let chi = s.build(&lat).unwrap();
        assert_eq!(chi.generator_values()[0], Complex64::new(0.0, 1.0));
        let s: CharacterSpec = serde_json::from_str(r#"{"kind":"explicit","generator_values":[[0,1]]}"#).unwrap();
        assert!(s.build(&lat).is_err());
        assert!(serde_json::from_str::<CharacterSpec>(r#"{"kind":"dirichlet"}"#).is_err());
    }
}
