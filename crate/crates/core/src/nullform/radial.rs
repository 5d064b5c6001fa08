//! Reduction of Cartesian forms to the radial null frame `U = ∂_t − ∂_r`,
//! `V = ∂_t + ∂_r`, and evaluation of the resulting source.

use super::poly::{monomial_name, SpherePoly};
use super::tensor::{check_null, NullFormTensor};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub const U: usize = 0;
pub const V: usize = 1;
pub const UU: usize = 0;
pub const UV: usize = 1;
pub const VV: usize = 2;

/// Radial form
/// `N = Σ c[a][bc] D_aψ D_bD_cψ + Σ tr[a] D_aψ (∂_rψ/r) + q UψVψ`.
///
/// `q` carries semilinear quadratic terms (`∂^γψ∂_γψ = −UψVψ`), which have no
/// cubic-tensor representation. The null condition forces
/// `c[U][UU] = c[V][VV] = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RadialSlots", into = "RadialSlots")]
pub struct RadialNullForm {
    c: [[f64; 3]; 2],
    tr: [f64; 2],
    q: f64,
}

/// Unchecked slot layout used for (de)serialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialSlots {
    /// `[[c_U_UU, c_U_UV, c_U_VV], [c_V_UU, c_V_UV, c_V_VV]]`
    pub c: [[f64; 3]; 2],
    #[serde(default)]
    pub tr: [f64; 2],
    #[serde(default)]
    pub q: f64,
}

impl TryFrom<RadialSlots> for RadialNullForm {
    type Error = Error;
    fn try_from(s: RadialSlots) -> Result<Self> {
        RadialNullForm::new(s.c, s.tr, s.q)
    }
}

impl From<RadialNullForm> for RadialSlots {
    fn from(f: RadialNullForm) -> Self {
        RadialSlots {
            c: f.c,
            tr: f.tr,
            q: f.q,
        }
    }
}

impl RadialNullForm {
    pub fn new(c: [[f64; 3]; 2], tr: [f64; 2], q: f64) -> Result<Self> {
        if c[U][UU] != 0.0 {
            return Err(Error::NullConditionViolated {
                monomial: format!("({})*Upsi*UUpsi", c[U][UU]),
            });
        }
        if c[V][VV] != 0.0 {
            return Err(Error::NullConditionViolated {
                monomial: format!("({})*Vpsi*VVpsi", c[V][VV]),
            });
        }
        let all = c.iter().flatten().chain(tr.iter()).chain(std::iter::once(&q));
        if all.clone().any(|x| !x.is_finite()) {
            return Err(Error::Parameter("radial form slots must be finite".into()));
        }
        Ok(Self { c, tr, q })
    }

    /// Bypasses the null check; only for demonstrating what goes wrong
    /// without it.
    pub fn new_unchecked(c: [[f64; 3]; 2], tr: [f64; 2], q: f64) -> Self {
        Self { c, tr, q }
    }

    pub fn zero() -> Self {
        Self {
            c: [[0.0; 3]; 2],
            tr: [0.0; 2],
            q: 0.0,
        }
    }

    pub fn c(&self, a: usize, bc: usize) -> f64 {
        self.c[a][bc]
    }

    pub fn tr(&self, a: usize) -> f64 {
        self.tr[a]
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().flatten().all(|&x| x == 0.0) && self.tr == [0.0; 2] && self.q == 0.0
    }

    pub fn is_semilinear(&self) -> bool {
        self.c.iter().flatten().all(|&x| x == 0.0) && self.tr == [0.0; 2]
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut out = *self;
        out.c.iter_mut().flatten().for_each(|x| *x *= k);
        out.tr.iter_mut().for_each(|x| *x *= k);
        out.q *= k;
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for a in 0..2 {
            for bc in 0..3 {
                out.c[a][bc] += other.c[a][bc];
            }
            out.tr[a] += other.tr[a];
        }
        out.q += other.q;
        out
    }

    /// Coefficient `c[U][UV] + tr[U]/2 − c[V][UU]` controlling the null-infinity
    /// source integral for compactly supported data; zero for `P₁`/`P₂`-type
    /// forms.
    pub fn tail_coefficient(&self) -> f64 {
        self.c[U][UV] + 0.5 * self.tr[U] - self.c[V][UU]
    }

    /// Predicted `u`-exponent `q` of the tail `ψ ~ v⁻¹u^q` for compact data.
    pub fn predicted_tail_exponent(&self) -> f64 {
        if self.tail_coefficient().abs() < 1e-12 {
            -2.0
        } else {
            -1.0
        }
    }

    /// `N` from the frame derivatives of `ψ` and `∂_rψ/r`.
    #[inline]
    pub fn eval_psi(&self, d: [f64; 2], dd: [f64; 3], psi_r_over_r: f64) -> f64 {
        let mut n = self.q * d[U] * d[V];
        for a in 0..2 {
            n += d[a]
                * (self.c[a][UU] * dd[UU]
                    + self.c[a][UV] * dd[UV]
                    + self.c[a][VV] * dd[VV]
                    + self.tr[a] * psi_r_over_r);
        }
        n
    }
}

/// Derivative inputs of the radiation field `Ψ = rψ` at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RadiationJet {
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub uu: f64,
    pub uv: f64,
    pub vv: f64,
}

/// Below this radius the source `r·N` is returned as its origin limit 0.
pub const DEFAULT_R_MIN: f64 = 1e-8;

/// `r · N(∂ψ, ∂²ψ)` for `ψ = Ψ/r`, the source in `UVΨ = −r N`.
pub fn evaluate_radial_rhs(form: &RadialNullForm, jet: &RadiationJet, r: f64, r_min: f64) -> f64 {
    if r < r_min {
        // ψ is smooth at the origin, so N stays bounded and r·N vanishes linearly.
        return 0.0;
    }
    let ir = 1.0 / r;
    let ir2 = ir * ir;
    let ir3 = ir2 * ir;
    let p = jet.psi;
    let du = jet.u * ir + p * ir2;
    let dv = jet.v * ir - p * ir2;
    let duu = jet.uu * ir + 2.0 * jet.u * ir2 + 2.0 * p * ir3;
    let dvv = jet.vv * ir - 2.0 * jet.v * ir2 + 2.0 * p * ir3;
    let duv = jet.uv * ir + (jet.v - jet.u) * ir2 - 2.0 * p * ir3;
    let psi_r_over_r = 0.5 * (dv - du) * ir;
    r * form.eval_psi([du, dv], [duu, duv, dvv], psi_r_over_r)
}

const FIRST: [&str; 2] = ["psi_t", "psi_r"];
const SECOND: [&str; 4] = ["psi_tt", "psi_tr", "psi_rr", "psi_r/r"];

fn half(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact radial reduction of a Cartesian null form.
pub fn radial_reduce(p: &NullFormTensor) -> Result<RadialNullForm> {
    check_null(p)?;
    let one = SpherePoly::constant(half(1, 1));
    let om = |i: usize| SpherePoly::omega(i);
    // ∂_γψ = first-slot symbol × angular factor.
    let first = |g: usize| -> (usize, SpherePoly) {
        if g == 0 {
            (0, one.clone())
        } else {
            (1, om(g - 1))
        }
    };
    // ∂_α∂_βψ = Σ second-slot symbol × angular factor.
    let second = |a: usize, b: usize| -> Vec<(usize, SpherePoly)> {
        match (a, b) {
            (0, 0) => vec![(0, one.clone())],
            (0, i) | (i, 0) => vec![(1, om(i - 1))],
            (i, j) => {
                let wij = om(i - 1).mul(&om(j - 1));
                let mut trace = SpherePoly::zero();
                if i == j {
                    trace.add(&one);
                }
                trace.add_scaled(&wij, &half(-1, 1));
                vec![(2, wij), (3, trace)]
            }
        }
    };

    let mut polys: Vec<Vec<SpherePoly>> = vec![vec![SpherePoly::zero(); 4]; 2];
    for a in 0..4 {
        for b in 0..4 {
            let dd = second(a, b);
            for g in 0..4 {
                let k = p.get(a, b, g);
                if k.is_zero() {
                    continue;
                }
                let (f, fp) = first(g);
                for (s, sp) in &dd {
                    polys[f][*s].add_scaled(&fp.mul(sp), k);
                }
            }
        }
    }

    let mut k = [[BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()],
        [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()]];
    for f in 0..2 {
        for s in 0..4 {
            match polys[f][s].as_constant() {
                Some(c) => k[f][s] = c,
                None => {
                    let (e, c) = polys[f][s].first_nonconstant().expect("non-constant polynomial");
                    return Err(Error::NotRadialCompatible {
                        monomial: format!("({c})*{}*{}*{}", FIRST[f], SECOND[s], monomial_name(e)),
                    });
                }
            }
        }
    }

    // ψ_t = (U+V)/2, ψ_r = (V−U)/2
    let first_frame = [[half(1, 2), half(1, 2)], [half(-1, 2), half(1, 2)]];
    // ψ_tt, ψ_tr, ψ_rr in terms of (UU, UV, VV)
    let second_frame = [
        [half(1, 4), half(1, 2), half(1, 4)],
        [half(-1, 4), half(0, 1), half(1, 4)],
        [half(1, 4), half(-1, 2), half(1, 4)],
    ];
    let mut c = vec![vec![BigRational::zero(); 3]; 2];
    let mut tr = vec![BigRational::zero(); 2];
    for f in 0..2 {
        for a in 0..2 {
            let fa = &first_frame[f][a];
            for s in 0..3 {
                for bc in 0..3 {
                    c[a][bc] += &k[f][s] * fa * &second_frame[s][bc];
                }
            }
            tr[a] += &k[f][3] * fa;
        }
    }
    if !c[U][UU].is_zero() || !c[V][VV].is_zero() {
        return Err(Error::NullConditionViolated {
            monomial: format!("radial slots UU-U = {}, VV-V = {}", c[U][UU], c[V][VV]),
        });
    }
    let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
    RadialNullForm::new(
        [
            [f(&c[0][0]), f(&c[0][1]), f(&c[0][2])],
            [f(&c[1][0]), f(&c[1][1]), f(&c[1][2])],
        ],
        [f(&tr[0]), f(&tr[1])],
        0.0,
    )
}
