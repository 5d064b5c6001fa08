//! Exact polynomials on the unit sphere `ω₁² + ω₂² + ω₃² = 1`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Polynomial in `(ω₁, ω₂, ω₃)` kept in canonical form: every monomial has
/// `ω₃`-degree at most one, obtained by rewriting `ω₃² → 1 − ω₁² − ω₂²`.
/// Canonical forms are unique on the sphere, so a polynomial vanishes there
/// iff every stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpherePoly {
    terms: BTreeMap<[u8; 3], BigRational>,
}

impl SpherePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term([0, 0, 0], c);
        p
    }

    /// `ω_i` for `i ∈ {0,1,2}`.
    pub fn omega(i: usize) -> Self {
        let mut e = [0u8; 3];
        e[i] = 1;
        let mut p = Self::zero();
        p.add_term(e, BigRational::one());
        p
    }

    fn add_term(&mut self, exps: [u8; 3], c: BigRational) {
        if c.is_zero() {
            return;
        }
        if exps[2] >= 2 {
            // ω₁^a ω₂^b ω₃^c = ω₁^a ω₂^b ω₃^{c−2} (1 − ω₁² − ω₂²)
            let lowered = [exps[0], exps[1], exps[2] - 2];
            self.add_term(lowered, c.clone());
            self.add_term([exps[0] + 2, exps[1], exps[2] - 2], -c.clone());
            self.add_term([exps[0], exps[1] + 2, exps[2] - 2], -c);
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&mut self, other: &SpherePoly) {
        for (e, c) in &other.terms {
            self.add_term(*e, c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &SpherePoly, k: &BigRational) {
        if k.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            self.add_term(*e, c * k);
        }
    }

    pub fn mul(&self, other: &SpherePoly) -> SpherePoly {
        let mut out = SpherePoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant term, if the polynomial is constant on the sphere.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&[0, 0, 0]).cloned(),
            _ => None,
        }
    }

    /// First non-constant monomial (in canonical order), if any.
    pub fn first_nonconstant(&self) -> Option<([u8; 3], &BigRational)> {
        self.terms
            .iter()
            .find(|(e, _)| **e != [0, 0, 0])
            .map(|(e, c)| (*e, c))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8; 3], &BigRational)> {
        self.terms.iter()
    }
}

/// Renders a monomial like `w1^2*w3`.
pub fn monomial_name(exps: [u8; 3]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                format!("w{}", i + 1)
            } else {
                format!("w{}^{}", i + 1, e)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for SpherePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("({c})*{}", monomial_name(*e)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn sphere_relation_reduces_to_one() {
        let mut s = SpherePoly::zero();
        for i in 0..3 {
            s.add(&SpherePoly::omega(i).mul(&SpherePoly::omega(i)));
        }
        assert_eq!(s.as_constant(), Some(q(1)));
    }

    #[test]
    fn odd_powers_of_w3_keep_one_factor() {
        let w3 = SpherePoly::omega(2);
        let cube = w3.mul(&w3).mul(&w3);
        // ω₃³ = ω₃ − ω₁²ω₃ − ω₂²ω₃
        assert!(cube.terms().all(|(e, _)| e[2] == 1));
        assert_eq!(cube.terms().count(), 3);
        assert_eq!(monomial_name([2, 0, 1]), "w1^2*w3");
    }
}
