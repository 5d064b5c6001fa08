//! Closed-form free radial waves.

use serde::{Deserialize, Serialize};

/// `f(x) = A·B((x − c)/w)` with the smooth bump `B(y) = exp(1 − 1/(1 − y²))`
/// on `|y| < 1` (peak value 1), zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileFunction {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl ProfileFunction {
    pub fn new(amplitude: f64, center: f64, width: f64) -> Self {
        Self {
            amplitude,
            center,
            width,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    /// `(f, f′, f″)` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let y = (x - self.center) / self.width;
        if y.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let s = 1.0 - y * y;
        let b = (1.0 - 1.0 / s).exp();
        let b1 = -2.0 * y / (s * s) * b;
        let b2 = (6.0 * y.powi(4) - 2.0) / s.powi(4) * b;
        let a = self.amplitude;
        (a * b, a * b1 / self.width, a * b2 / (self.width * self.width))
    }

    pub fn f(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    pub fn df(&self, x: f64) -> f64 {
        self.eval(x).1
    }
}

/// Free radial wave `ψ = (f(t−r) − f(t+r))/r`, continued to `−2f′(t)` at `r = 0`.
pub fn exact_linear_radial(f: &ProfileFunction, t: f64, r: f64) -> f64 {
    if r < 1e-5 {
        // Taylor: −2f′(t) − (r²/3) f‴(t) + O(r⁴); the f‴ term is below 1e−10·‖f‴‖ here.
        return -2.0 * f.df(t);
    }
    (f.f(t - r) - f.f(t + r)) / r
}

/// Radiation field `Ψ = f(u) − f(v)` and its `t`-derivative.
pub fn exact_radiation_field(f: &ProfileFunction, u: f64, v: f64) -> (f64, f64) {
    let (fu, du, _) = f.eval(u);
    let (fv, dv, _) = f.eval(v);
    (fu - fv, du - dv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derivatives_match_difference_quotients() {
        let f = ProfileFunction::new(0.7, 2.0, 1.3);
        for &x in &[1.0, 1.6, 2.0, 2.9] {
            let d = 1e-5;
            let fd1 = (f.f(x + d) - f.f(x - d)) / (2.0 * d);
            let fd2 = (f.df(x + d) - f.df(x - d)) / (2.0 * d);
            assert_relative_eq!(f.eval(x).1, fd1, max_relative = 1e-7, epsilon = 1e-12);
            assert_relative_eq!(f.eval(x).2, fd2, max_relative = 1e-6, epsilon = 1e-10);
        }
        assert_eq!(f.f(2.0), 0.7);
    }

    #[test]
    fn vanishes_outside_light_cone_support() {
        let f = ProfileFunction::new(1.0, 3.0, 1.0);
        assert_eq!(exact_linear_radial(&f, 0.5, 1.0), 0.0);
        assert_eq!(exact_linear_radial(&f, 10.0, 2.0), 0.0);
    }

    #[test]
    fn origin_limit() {
        let f = ProfileFunction::new(1.0, 3.0, 1.0);
        for &t in &[2.3, 2.8, 3.4] {
            let limit = -2.0 * f.df(t);
            // the O(r²) Taylor remainder dominates roundoff at r = 1e-3
            let near = (f.f(t - 1e-3) - f.f(t + 1e-3)) / 1e-3;
            assert!((limit - near).abs() < 1e-5 * limit.abs().max(1.0), "{limit} vs {near}");
            assert_eq!(exact_linear_radial(&f, t, 0.0), limit);
        }
    }
}
