//! Fourth-order finite differences on the uniform σ grid.

/// Fornberg weights for derivatives `0..=m` at `x0` from nodes `xs`.
/// Returns `w[k][j]`, the weight of node `j` in the `k`-th derivative.
pub fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Parity of a field under `σ → −σ`, used to fill ghost points at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Precomputed one-sided weights for the two nodes next to `σ = 1`
/// (unit spacing; scale by `1/h`, `1/h²`).
#[derive(Debug, Clone)]
pub struct Stencils {
    /// first derivative at `N−1` from nodes `N−4..=N`
    d1_nm1: [f64; 5],
    /// first derivative at `N` from nodes `N−4..=N`
    d1_n: [f64; 5],
    /// second derivative at `N−1` from nodes `N−5..=N`
    d2_nm1: [f64; 6],
    /// second derivative at `N` from nodes `N−5..=N`
    d2_n: [f64; 6],
}

impl Default for Stencils {
    fn default() -> Self {
        Self::new()
    }
}

fn to_array<const K: usize>(v: &[f64]) -> [f64; K] {
    let mut a = [0.0; K];
    a.copy_from_slice(v);
    a
}

impl Stencils {
    pub fn new() -> Self {
        let x5: Vec<f64> = (-4..=0).map(f64::from).collect();
        let x6: Vec<f64> = (-5..=0).map(f64::from).collect();
        Self {
            d1_nm1: to_array(&fornberg(-1.0, &x5, 1)[1]),
            d1_n: to_array(&fornberg(0.0, &x5, 1)[1]),
            d2_nm1: to_array(&fornberg(-1.0, &x6, 2)[2]),
            d2_n: to_array(&fornberg(0.0, &x6, 2)[2]),
        }
    }

    /// First and second σ-derivatives of `f` (nodes `0..=N`, `N ≥ 6`).
    pub fn derivatives(&self, f: &[f64], h: f64, parity: Parity, d1: &mut [f64], d2: &mut [f64]) {
        let n = f.len() - 1;
        debug_assert!(n >= 6);
        let s = match parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        };
        let i1 = 1.0 / (12.0 * h);
        let i2 = 1.0 / (12.0 * h * h);
        // ghost-aware access for j − 1, j − 2 near the origin
        let at = |k: isize| -> f64 {
            if k < 0 {
                s * f[(-k) as usize]
            } else {
                f[k as usize]
            }
        };
        for j in 0..2usize {
            let jj = j as isize;
            let (m2, m1, c, p1, p2) = (at(jj - 2), at(jj - 1), f[j], f[j + 1], f[j + 2]);
            d1[j] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) * i1;
            d2[j] = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) * i2;
        }
        for j in 2..n - 1 {
            let (m2, m1, c, p1, p2) = (f[j - 2], f[j - 1], f[j], f[j + 1], f[j + 2]);
            d1[j] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) * i1;
            d2[j] = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) * i2;
        }
        let t5 = &f[n - 4..=n];
        let t6 = &f[n - 5..=n];
        let dot = |w: &[f64], v: &[f64]| w.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        d1[n - 1] = dot(&self.d1_nm1, t5) / h;
        d1[n] = dot(&self.d1_n, t5) / h;
        d2[n - 1] = dot(&self.d2_nm1, t6) / (h * h);
        d2[n] = dot(&self.d2_n, t6) / (h * h);
    }

    /// First σ-derivative only.
    pub fn first(&self, f: &[f64], h: f64, parity: Parity, d1: &mut [f64]) {
        let n = f.len() - 1;
        let s = match parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        };
        let i1 = 1.0 / (12.0 * h);
        d1[0] = (s * f[2] - 8.0 * s * f[1] + 8.0 * f[1] - f[2]) * i1;
        d1[1] = (s * f[1] - 8.0 * f[0] + 8.0 * f[2] - f[3]) * i1;
        for j in 2..n - 1 {
            d1[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) * i1;
        }
        let t5 = &f[n - 4..=n];
        let dot = |w: &[f64], v: &[f64]| w.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        d1[n - 1] = dot(&self.d1_nm1, t5) / h;
        d1[n] = dot(&self.d1_n, t5) / h;
    }

    /// First σ-derivative of a field with no definite parity (one-sided at
    /// both ends).
    pub fn first_plain(&self, f: &[f64], h: f64, d1: &mut [f64]) {
        self.first(f, h, Parity::Even, d1);
        // mirror of the right-end stencils: x → −x flips the sign
        let dot_rev = |w: &[f64; 5], v: &[f64]| -w.iter().rev().zip(v).map(|(a, b)| a * b).sum::<f64>();
        d1[0] = dot_rev(&self.d1_n, &f[0..5]) / h;
        d1[1] = dot_rev(&self.d1_nm1, &f[0..5]) / h;
    }
}

/// Kreiss–Oliger fourth difference `δ⁴f_j` for `j ≤ N−2`; zero at the last two
/// nodes, which have no centered stencil.
pub fn fourth_difference(f: &[f64], parity: Parity, out: &mut [f64]) {
    let n = f.len() - 1;
    let s = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    out[0] = s * f[2] - 4.0 * s * f[1] + 6.0 * f[0] - 4.0 * f[1] + f[2];
    out[1] = s * f[1] - 4.0 * f[0] + 6.0 * f[1] - 4.0 * f[2] + f[3];
    for j in 2..n - 1 {
        out[j] = f[j - 2] - 4.0 * f[j - 1] + 6.0 * f[j] - 4.0 * f[j + 1] + f[j + 2];
    }
    out[n - 1] = 0.0;
    out[n] = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_centered_weights() {
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fornberg(0.0, &xs, 2);
        let d1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for j in 0..5 {
            assert!((w[1][j] - d1[j]).abs() < 1e-14);
            assert!((w[2][j] - d2[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn derivatives_converge_at_fourth_order() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let f: Vec<f64> = (0..=n).map(|j| (2.0 * j as f64 * h).sin()).collect();
            let mut d1 = vec![0.0; n + 1];
            let mut d2 = vec![0.0; n + 1];
            Stencils::new().derivatives(&f, h, Parity::Odd, &mut d1, &mut d2);
            (0..=n)
                .map(|j| {
                    let x = j as f64 * h;
                    (d1[j] - 2.0 * (2.0 * x).cos())
                        .abs()
                        .max((d2[j] + 4.0 * (2.0 * x).sin()).abs())
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(64), err(128));
        let order = (e1 / e2).log2();
        assert!(order > 3.7, "order {order}");
    }

    #[test]
    fn even_parity_ghosts() {
        let n = 32;
        let h = 1.0 / n as f64;
        let f: Vec<f64> = (0..=n).map(|j| (j as f64 * h).cos()).collect();
        let mut d1 = vec![0.0; n + 1];
        let mut d2 = vec![0.0; n + 1];
        Stencils::new().derivatives(&f, h, Parity::Even, &mut d1, &mut d2);
        assert!(d1[0].abs() < 1e-15);
        assert!((d2[0] + 1.0).abs() < 1e-6);
        let mut only = vec![0.0; n + 1];
        Stencils::new().first(&f, h, Parity::Even, &mut only);
        assert_eq!(only, d1);
    }

    #[test]
    fn plain_first_derivative_is_exact_for_quartics() {
        let n = 20;
        let h = 1.0 / n as f64;
        let p = |x: f64| 1.0 + x - 2.0 * x * x + 0.5 * x.powi(3) + x.powi(4);
        let dp = |x: f64| 1.0 - 4.0 * x + 1.5 * x * x + 4.0 * x.powi(3);
        let f: Vec<f64> = (0..=n).map(|j| p(j as f64 * h)).collect();
        let mut d = vec![0.0; n + 1];
        Stencils::new().first_plain(&f, h, &mut d);
        for j in 0..=n {
            assert!((d[j] - dp(j as f64 * h)).abs() < 1e-10, "node {j}");
        }
    }

    #[test]
    fn fourth_difference_annihilates_cubics() {
        let f: Vec<f64> = (0..20).map(|j| (j as f64).powi(3)).collect();
        let mut out = vec![0.0; 20];
        fourth_difference(&f, Parity::Odd, &mut out);
        assert!(out.iter().all(|v| v.abs() < 1e-9));
    }
}
