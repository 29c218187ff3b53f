//! Confluent hypergeometric and Laguerre functions, radial eigenfunctions
//! φ_λ(z) = e^{−ν|z|²/2} ₁F₁(−λ; n; ν|z|²), and the projector profile Q^ν_l.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Upper end of the argument range where ₁F₁(a; c; x) itself stays finite.
pub const KUMMER_OVERFLOW_X: f64 = 700.0;

const SERIES_EPS: f64 = 1e-17;
const MAX_SERIES_TERMS: usize = 20_000;

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// C(n + l − 1, l) = Γ(n+l) / (Γ(n) l!), as an exact product.
pub fn binomial_multiplicity(n: usize, l: usize) -> f64 {
    (1..=l).fold(1.0, |acc, k| acc * (n - 1 + k) as f64 / k as f64)
}

/// ₁F₁(−l; c; x), a polynomial of degree l.
pub fn kummer_terminating(l: usize, c: usize, x: f64) -> f64 {
    assert!(c >= 1, "c must be a positive integer");
    let mut term = 1.0;
    let mut acc = CompensatedSum::default();
    acc.add(term);
    for k in 0..l {
        term *= (k as f64 - l as f64) / ((c + k) as f64 * (k + 1) as f64) * x;
        acc.add(term);
    }
    acc.value()
}

/// Σ_k |(−l)_k| / ((c)_k k!) |x|^k, the majorant of the terminating series.
pub fn kummer_terminating_majorant(l: usize, c: usize, x: f64) -> f64 {
    let x = x.abs();
    let mut term = 1.0;
    let mut acc = 1.0;
    for k in 0..l {
        term *= (l - k) as f64 / ((c + k) as f64 * (k + 1) as f64) * x;
        acc += term;
    }
    acc
}

/// Generalized Laguerre polynomial L^α_l(x) by the three-term recurrence.
pub fn laguerre(l: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if l == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..l {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// e^{−shift} · ₁F₁(a; c; x) by direct summation with every term pre-scaled.
fn kummer_series_scaled(a: f64, c: f64, x: f64, shift: f64) -> Result<f64> {
    if c <= 0.0 && c == c.floor() {
        return Err(Error::Precondition(format!("c = {c} is a nonpositive integer")));
    }
    if x < 0.0 {
        return Err(Error::Precondition(format!("x = {x} must be nonnegative")));
    }
    let mut term = (-shift).exp();
    let mut acc = CompensatedSum::default();
    acc.add(term);
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= (a + kf) / ((c + kf) * (kf + 1.0)) * x;
        acc.add(term);
        if term == 0.0 {
            return Ok(acc.value());
        }
        // past the peak of the terms, stop once they are negligible
        if kf > x && term.abs() < SERIES_EPS * acc.value().abs() {
            return Ok(acc.value());
        }
        if !term.is_finite() {
            return Err(Error::Range(format!("₁F₁({a}; {c}; {x}) overflows")));
        }
    }
    Err(Error::Numeric(format!("₁F₁({a}; {c}; {x}) series did not converge")))
}

/// ₁F₁(a; c; x) for x ≥ 0 by its power series.
///
/// Accuracy degrades for x beyond ~700, where the function overflows f64 for
/// most parameters; an infinite result is reported as a range error.
pub fn kummer_series(a: f64, c: f64, x: f64) -> Result<f64> {
    let v = kummer_series_scaled(a, c, x, 0.0)?;
    if !v.is_finite() {
        return Err(Error::Range(format!("₁F₁({a}; {c}; {x}) overflows")));
    }
    Ok(v)
}

/// Radial solution of L^ν f = ν(2λ + n) f.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialProfile {
    pub nu: f64,
    pub level: f64,
    pub dim: usize,
}

impl RadialProfile {
    pub fn new(nu: f64, level: f64, dim: usize) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::Precondition(format!("nu = {nu} must be positive")));
        }
        if dim == 0 {
            return Err(Error::Precondition("dimension must be at least 1".into()));
        }
        Ok(Self { nu, level, dim })
    }

    /// Level as a Landau index if it is a nonnegative integer.
    pub fn integer_level(&self) -> Option<usize> {
        let r = self.level.round();
        (r >= 0.0 && (self.level - r).abs() < 1e-12).then_some(r as usize)
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        radial_solution(self, r)
    }
}

/// φ_λ(r) = e^{−νr²/2} ₁F₁(−λ; n; νr²).
pub fn radial_solution(profile: &RadialProfile, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::Precondition(format!("r = {r} must be nonnegative")));
    }
    let x = profile.nu * r * r;
    match profile.integer_level() {
        Some(l) => Ok((-x / 2.0).exp() * kummer_terminating(l, profile.dim, x)),
        None => {
            let v = kummer_series_scaled(-profile.level, profile.dim as f64, x, x / 2.0)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Range(format!("φ_{}({r}) overflows", profile.level)))
            }
        }
    }
}

/// Q^ν_l(r) = C(n+l−1, l) (ν/π)^n e^{−νr²/2} ₁F₁(−l; n; νr²).
pub fn q_profile(nu: f64, l: usize, n: usize, r: f64) -> f64 {
    let x = nu * r * r;
    binomial_multiplicity(n, l) * (nu / PI).powi(n as i32) * (-x / 2.0).exp() * kummer_terminating(l, n, x)
}

/// Q^ν_l(0) = C(n+l−1, l) (ν/π)^n.
pub fn q_profile_at_zero(nu: f64, l: usize, n: usize) -> f64 {
    binomial_multiplicity(n, l) * (nu / PI).powi(n as i32)
}

/// Γ(x) for positive arguments.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// vol(S^{2n−1}) = 2πⁿ / Γ(n).
pub fn sphere_volume(n: usize) -> f64 {
    2.0 * PI.powi(n as i32) / gamma(n as f64)
}
