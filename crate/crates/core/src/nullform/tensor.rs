//! Constant-coefficient cubic forms `P^{αβγ} ∂_γψ ∂_α∂_βψ` in Cartesian frame.

use super::poly::{monomial_name, SpherePoly};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Inverse Minkowski metric `m = diag(−1, 1, 1, 1)`.
pub fn minkowski(a: usize, b: usize) -> i64 {
    match (a, b) {
        (0, 0) => -1,
        (x, y) if x == y => 1,
        _ => 0,
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `P[α][β][γ]`, symmetric in `(α, β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullFormTensor {
    p: Vec<BigRational>,
}

#[inline]
fn idx(a: usize, b: usize, c: usize) -> usize {
    16 * a + 4 * b + c
}

impl NullFormTensor {
    pub fn zero() -> Self {
        Self {
            p: vec![BigRational::zero(); 64],
        }
    }

    /// Builds the tensor from raw coefficients, symmetrizing in `(α, β)`.
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> BigRational) -> Self {
        let mut raw = vec![BigRational::zero(); 64];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    raw[idx(a, b, c)] = f(a, b, c);
                }
            }
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut p = vec![BigRational::zero(); 64];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    p[idx(a, b, c)] = (&raw[idx(a, b, c)] + &raw[idx(b, a, c)]) * &half;
                }
            }
        }
        Self { p }
    }

    /// Parses a `4×4×4` table of rationals written as `"n"` or `"n/d"`.
    pub fn from_table(table: &[Vec<Vec<String>>]) -> Result<Self> {
        let shape_err = || Error::Parameter("coefficient table must have shape 4x4x4".into());
        if table.len() != 4 {
            return Err(shape_err());
        }
        let mut raw = vec![BigRational::zero(); 64];
        for (a, plane) in table.iter().enumerate() {
            if plane.len() != 4 {
                return Err(shape_err());
            }
            for (b, row) in plane.iter().enumerate() {
                if row.len() != 4 {
                    return Err(shape_err());
                }
                for (c, s) in row.iter().enumerate() {
                    raw[idx(a, b, c)] = parse_rational(s)?;
                }
            }
        }
        Ok(Self::from_fn(|a, b, c| raw[idx(a, b, c)].clone()))
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &BigRational {
        &self.p[idx(a, b, c)]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.p
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self {
            p: self.p.iter().map(|x| x * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            p: self.p.iter().zip(&other.p).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.iter().all(Zero::is_zero)
    }

    /// `P(ξ, ξ, ξ)` on `ξ = (s, ω₁, ω₂, ω₃)`, reduced on the sphere.
    pub fn cone_polynomial(&self, s: i64) -> SpherePoly {
        let xi: Vec<SpherePoly> = (0..4)
            .map(|i| {
                if i == 0 {
                    SpherePoly::constant(rat(s))
                } else {
                    SpherePoly::omega(i - 1)
                }
            })
            .collect();
        let mut out = SpherePoly::zero();
        for a in 0..4 {
            for b in 0..4 {
                let ab = xi[a].mul(&xi[b]);
                for c in 0..4 {
                    let k = self.get(a, b, c);
                    if !k.is_zero() {
                        out.add_scaled(&ab.mul(&xi[c]), k);
                    }
                }
            }
        }
        out
    }

    /// Evaluates `P^{αβγ} ∂_γψ ∂_α∂_βψ` from Cartesian derivatives.
    pub fn evaluate(&self, d: &[f64; 4], dd: &[[f64; 4]; 4]) -> f64 {
        let pf = self.to_f64();
        let mut acc = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    acc += pf[idx(a, b, c)] * d[c] * dd[a][b];
                }
            }
        }
        acc
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parameter(format!("cannot parse rational coefficient `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Checks the null condition exactly; on failure reports the first surviving
/// monomial of `P(ξ,ξ,ξ)` restricted to the light cone.
pub fn check_null(p: &NullFormTensor) -> Result<()> {
    for s in [1i64, -1] {
        let poly = p.cone_polynomial(s);
        let first = poly
            .terms()
            .next()
            .map(|(e, c)| format!("({c})*{} at xi0 = {s:+}", monomial_name(*e)));
        if let Some(monomial) = first {
            return Err(Error::NullConditionViolated { monomial });
        }
    }
    Ok(())
}

/// True iff `P^{αβγ} ξ_α ξ_β ξ_γ` vanishes on the whole null cone.
pub fn validate_null(p: &NullFormTensor) -> bool {
    check_null(p).is_ok()
}

/// `∂_a ψ · □ψ`.
pub fn p1_generator(a: usize) -> NullFormTensor {
    NullFormTensor::from_fn(|al, be, ga| rat(if ga == a { minkowski(al, be) } else { 0 }))
}

/// `∂_a(∂^γψ ∂_γψ)`.
pub fn p2_generator(a: usize) -> NullFormTensor {
    NullFormTensor::from_fn(|al, be, ga| {
        let mut v = 0;
        if al == a {
            v += minkowski(be, ga);
        }
        if be == a {
            v += minkowski(al, ga);
        }
        rat(v)
    })
}

/// `∂_aψ ∂_b∂_cψ − ∂_bψ ∂_a∂_cψ`.
pub fn p3_generator(a: usize, b: usize, c: usize) -> NullFormTensor {
    NullFormTensor::from_fn(|al, be, ga| {
        let mut v = 0;
        if ga == a && al == b && be == c {
            v += 1;
        }
        if ga == b && al == a && be == c {
            v -= 1;
        }
        rat(v)
    })
}

/// Labelled generator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    P1,
    P2,
    P3,
}

/// All generators: `P₁` (4), `P₂` (4), then `P₃` over `a < b`, any `c` (24).
pub fn generators() -> Vec<(Family, String, NullFormTensor)> {
    let mut out = Vec::with_capacity(32);
    for a in 0..4 {
        out.push((Family::P1, format!("p1_{a}"), p1_generator(a)));
    }
    for a in 0..4 {
        out.push((Family::P2, format!("p2_{a}"), p2_generator(a)));
    }
    for a in 0..4 {
        for b in (a + 1)..4 {
            for c in 0..4 {
                out.push((Family::P3, format!("p3_{a}{b}{c}"), p3_generator(a, b, c)));
            }
        }
    }
    out
}

/// Adds `k` to the symmetrized entry `(a, b, c)`.
pub fn with_injected(p: &NullFormTensor, a: usize, b: usize, c: usize, k: i64) -> NullFormTensor {
    let bump = NullFormTensor::from_fn(|x, y, z| rat(if (x, y, z) == (a, b, c) { k } else { 0 }));
    p.add(&bump)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrized_on_construction() {
        let t = p3_generator(0, 1, 2);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert_eq!(t.get(a, b, c), t.get(b, a, c));
                }
            }
        }
    }

    #[test]
    fn wave_operator_times_time_derivative_is_null() {
        assert!(validate_null(&p1_generator(0)));
    }

    #[test]
    fn pure_time_cube_is_not_null() {
        let t = NullFormTensor::from_fn(|a, b, c| rat(i64::from((a, b, c) == (0, 0, 0))));
        let err = check_null(&t).unwrap_err();
        assert!(matches!(err, Error::NullConditionViolated { .. }));
        assert!(err.to_string().contains("xi0"));
    }

    #[test]
    fn antisymmetric_pair_is_null() {
        assert!(validate_null(&p3_generator(0, 1, 2)));
    }

    #[test]
    fn parse_table_entries() {
        assert_eq!(parse_rational(" -3/4 ").unwrap(), BigRational::new((-3).into(), 4.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        let mut table = vec![vec![vec!["0".to_string(); 4]; 4]; 4];
        table[0][0][0] = "2".into();
        let t = NullFormTensor::from_table(&table).unwrap();
        assert_eq!(t.get(0, 0, 0), &rat(2));
        table.pop();
        assert!(NullFormTensor::from_table(&table).is_err());
    }

    #[test]
    fn cartesian_evaluation_of_box_form() {
        // ∂_tψ □ψ with ∂ψ = (2, ·), ∂²ψ = diag(1, 3, 4, 5): 2·(−1 + 12) = 22
        let mut dd = [[0.0; 4]; 4];
        for (i, v) in [1.0, 3.0, 4.0, 5.0].into_iter().enumerate() {
            dd[i][i] = v;
        }
        let v = p1_generator(0).evaluate(&[2.0, 0.3, 0.1, 0.2], &dd);
        assert!((v - 22.0).abs() < 1e-14);
    }
}
