//! Orthogonal polynomials used by the trajectory and wavefunction formulas:
//! associated Laguerre `L_n^a`, Chebyshev `T_n`/`U_n`, and the generalized
//! Bessel polynomials `y_n(x; a, b)`.
//!
//! Everything here is a pure function of its arguments. Degrees above two are
//! evaluated by three-term recurrences; the explicit binomial sums are kept
//! as a second evaluation route for the Chebyshev family.

use crate::error::{Error, Result};

/// A polynomial value with an optional first derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEval {
    pub value: f64,
    pub derivative: Option<f64>,
}

/// Associated Laguerre polynomial `L_n^a(x)` for real `a`.
///
/// Uses `(j+1) L_{j+1} = (2j+1+a-x) L_j - (j+a) L_{j-1}`.
pub fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_n^a(x)` with the convention `L_{-1}^a = 0`.
pub fn laguerre_signed(n: i64, a: f64, x: f64) -> f64 {
    if n < 0 {
        0.0
    } else {
        laguerre(n as usize, a, x)
    }
}

/// `d/dx L_n^a(x) = -L_{n-1}^{a+1}(x)`.
pub fn laguerre_deriv(n: usize, a: f64, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        -laguerre(n - 1, a + 1.0, x)
    }
}

/// `j`-th derivative of `L_n^a`: `(-1)^j L_{n-j}^{a+j}`.
pub fn laguerre_nth_deriv(n: usize, a: f64, x: f64, j: usize) -> f64 {
    if j > n {
        return 0.0;
    }
    let v = laguerre(n - j, a + j as f64, x);
    if j.is_multiple_of(2) {
        v
    } else {
        -v
    }
}

pub fn laguerre_eval(n: usize, a: f64, x: f64, with_derivative: bool) -> PolyEval {
    PolyEval {
        value: laguerre(n, a, x),
        derivative: with_derivative.then(|| laguerre_deriv(n, a, x)),
    }
}

/// Chebyshev polynomial of the first kind, valid for all real `x`.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = x;
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Chebyshev polynomial of the second kind; `U_{-1} = 0`.
pub fn chebyshev_u(n: i64, x: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `T_n(x) = Σ_j C(n, 2j) x^{n-2j} (x²-1)^j`.
pub fn chebyshev_t_explicit(n: usize, x: f64) -> f64 {
    let s = x * x - 1.0;
    (0..=n / 2)
        .map(|j| binomial(n as u64, 2 * j as u64) * x.powi((n - 2 * j) as i32) * s.powi(j as i32))
        .sum()
}

/// `U_n(x) = Σ_j C(n+1, 2j+1) x^{n-2j} (x²-1)^j`; `U_{-1} = 0`.
pub fn chebyshev_u_explicit(n: i64, x: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let n = n as usize;
    let s = x * x - 1.0;
    (0..=n / 2)
        .map(|j| {
            binomial(n as u64 + 1, 2 * j as u64 + 1) * x.powi((n - 2 * j) as i32) * s.powi(j as i32)
        })
        .sum()
}

/// Binomial coefficient as a float (exact for the small arguments used here).
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Falling factorial `z (z-1) ... (z-k+1)`.
pub fn falling_factorial(z: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (z - i as f64))
}

fn bessel_coefficients(n: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "generalized Bessel polynomial needs b != 0, got {b}"
        )));
    }
    Ok((0..=n)
        .map(|k| {
            binomial(n as u64, k as u64) * falling_factorial(n as f64 + k as f64 + a - 2.0, k)
                / b.powi(k as i32)
        })
        .collect())
}

/// Generalized Bessel polynomial
/// `y_n(x; a, b) = Σ_k C(n,k) (n+k+a-2)^{(k)} (x/b)^k` (falling factorial).
pub fn bessel_poly(n: usize, a: f64, b: f64, x: f64) -> Result<f64> {
    let c = bessel_coefficients(n, a, b)?;
    Ok(c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck))
}

/// `(y, y', y'')` of the generalized Bessel polynomial, by differentiating the
/// coefficient list.
pub fn bessel_poly_derivs(n: usize, a: f64, b: f64, x: f64) -> Result<(f64, f64, f64)> {
    let c = bessel_coefficients(n, a, b)?;
    let mut y = 0.0;
    let mut dy = 0.0;
    let mut d2y = 0.0;
    for (k, &ck) in c.iter().enumerate().rev() {
        d2y = d2y * x
            + if k >= 2 {
                ck * (k * (k - 1)) as f64
            } else {
                0.0
            };
        dy = dy * x + if k >= 1 { ck * k as f64 } else { 0.0 };
        y = y * x + ck;
    }
    // the Horner passes above shift the derivative polynomials by one and two
    // powers of x; undo that.
    let dy = if x != 0.0 {
        dy / x
    } else {
        c.get(1).copied().unwrap_or(0.0)
    };
    let d2y = if x != 0.0 {
        d2y / (x * x)
    } else {
        c.get(2).map_or(0.0, |c2| 2.0 * c2)
    };
    Ok((y, dy, d2y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Series oracle: `L_n^a(x) = Σ_j (-1)^j Γ(n+a+1)/(Γ(n-j+1)Γ(a+j+1)) x^j / j!`,
    /// with the gamma ratio written as a finite product. Also returns the sum
    /// of absolute terms, which bounds the rounding error of the series.
    fn laguerre_series(n: usize, a: f64, x: f64) -> (f64, f64) {
        let terms: Vec<f64> = (0..=n)
            .map(|j| {
                // C(n+a, n-j) = Π_{i=1}^{n-j} (a+j+i)/i
                let c: f64 = (1..=n - j)
                    .map(|i| (a + j as f64 + i as f64) / i as f64)
                    .product();
                let fact: f64 = (1..=j).map(|i| i as f64).product();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * c * x.powi(j as i32) / fact
            })
            .collect();
        (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre(0, 2.7, -3.0), 1.0);
        assert!((laguerre(2, 0.0, 2.0) - (-1.0)).abs() < 1e-15);
        assert!((laguerre(2, 1.0, 0.0) - 3.0).abs() < 1e-15);
        assert_eq!(laguerre_signed(-1, 0.3, 1.0), 0.0);
    }

    #[test]
    fn laguerre_matches_series() {
        for n in 0..=12 {
            for &a in &[0.0, 0.5, 1.0, 2.5, 7.25] {
                for &x in &[0.0, 0.3, 1.0, 4.0, 9.5] {
                    let (s, mag) = laguerre_series(n, a, x);
                    let r = laguerre(n, a, x);
                    assert!((s - r).abs() < 1e-13 * mag.max(1.0), "n={n} a={a} x={x}");
                }
            }
        }
    }

    #[test]
    fn laguerre_derivative_examples() {
        assert_eq!(laguerre_deriv(0, 3.0, 1.7), 0.0);
        assert!((laguerre_deriv(1, 0.0, 5.0) + 1.0).abs() < 1e-15);
        assert!(laguerre_deriv(2, 0.0, 2.0).abs() < 1e-15);
        assert!((laguerre_deriv(2, 0.0, 3.0) - 1.0).abs() < 1e-15);
        let e = laguerre_eval(2, 0.0, 2.0, true);
        assert_eq!(e.derivative, Some(laguerre_deriv(2, 0.0, 2.0)));
        assert_eq!(laguerre_eval(2, 0.0, 2.0, false).derivative, None);
    }

    #[test]
    fn laguerre_derivative_matches_finite_difference() {
        let h = 1e-5;
        for n in 0..=10 {
            for &a in &[0.0, 0.5, 2.5] {
                for &x in &[0.2, 1.0, 3.3, 8.0] {
                    let fd = (laguerre(n, a, x + h) - laguerre(n, a, x - h)) / (2.0 * h);
                    let d = laguerre_deriv(n, a, x);
                    assert!(
                        (fd - d).abs() < 1e-6 * d.abs().max(1.0),
                        "n={n} a={a} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn laguerre_ode_residual() {
        for n in 0..=12 {
            for &a in &[0.0, 0.5, 1.0, 2.5] {
                for i in 1..=40 {
                    let x = 10.0 * i as f64 / 40.0;
                    let l = laguerre(n, a, x);
                    let d1 = laguerre_nth_deriv(n, a, x, 1);
                    let d2 = laguerre_nth_deriv(n, a, x, 2);
                    let res = x * d2 + (1.0 + a - x) * d1 + n as f64 * l;
                    assert!(
                        res.abs() < 1e-10 * l.abs().max(1.0),
                        "n={n} a={a} x={x} res={res}"
                    );
                }
            }
        }
    }

    #[test]
    fn chebyshev_examples() {
        assert!((chebyshev_t(2, 0.5) + 0.5).abs() < 1e-15);
        assert!((chebyshev_t(3, 0.5) + 1.0).abs() < 1e-15);
        assert!((chebyshev_u(1, 0.3) - 0.6).abs() < 1e-15);
        for n in 0..20 {
            assert_eq!(chebyshev_t(n, 1.0), 1.0);
        }
        assert_eq!(chebyshev_u(-1, 0.4), 0.0);
        // outside [-1, 1]: T_2(3) = 17, U_2(3) = 35
        assert_eq!(chebyshev_t(2, 3.0), 17.0);
        assert_eq!(chebyshev_u(2, 3.0), 35.0);
    }

    #[test]
    fn chebyshev_trigonometric_identities() {
        for n in 0..=12usize {
            for i in 0..=200 {
                let th = PI * i as f64 / 200.0;
                let c = th.cos();
                assert!((chebyshev_t(n, c) - (n as f64 * th).cos()).abs() < 1e-12);
                let lhs = chebyshev_u(n as i64 - 1, c) * th.sin();
                assert!((lhs - (n as f64 * th).sin()).abs() < 1e-12, "n={n} th={th}");
            }
        }
    }

    #[test]
    fn chebyshev_explicit_sums_agree() {
        for n in 0..=10usize {
            for i in 0..=30 {
                let x = -1.5 + 3.0 * i as f64 / 30.0;
                let t = chebyshev_t(n, x);
                assert!((chebyshev_t_explicit(n, x) - t).abs() < 1e-10 * t.abs().max(1.0));
                let u = chebyshev_u(n as i64, x);
                assert!((chebyshev_u_explicit(n as i64, x) - u).abs() < 1e-10 * u.abs().max(1.0));
            }
        }
    }

    #[test]
    fn bessel_examples() {
        assert_eq!(bessel_poly(0, 1.3, 2.0, 5.0).unwrap(), 1.0);
        assert!((bessel_poly(1, 3.0, 1.0, 2.0).unwrap() - 7.0).abs() < 1e-14);
        assert!((bessel_poly(2, 1.0, 1.0, 1.0).unwrap() - 11.0).abs() < 1e-14);
        assert!(matches!(
            bessel_poly(2, 1.0, 0.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn bessel_ode_residual() {
        for n in 0..=8usize {
            for &a in &[-1.5, 0.5, 2.0, 3.25] {
                for &b in &[1.0, -2.0, 0.5] {
                    for &x in &[0.25, 1.0, 4.0] {
                        let (y, dy, d2y) = bessel_poly_derivs(n, a, b, x).unwrap();
                        let lhs = x * x * d2y + (a * x + b) * dy;
                        let rhs = (n as f64) * (n as f64 + a - 1.0) * y;
                        let scale = (x * x * d2y).abs() + ((a * x + b) * dy).abs() + rhs.abs();
                        assert!(
                            (lhs - rhs).abs() <= 1e-9 * scale.max(1.0),
                            "n={n} a={a} b={b} x={x}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn bessel_derivatives_match_finite_difference() {
        let h = 1e-4;
        for n in 0..=6usize {
            let x = 0.7;
            let (_, dy, d2y) = bessel_poly_derivs(n, 1.5, 2.0, x).unwrap();
            let f = |t: f64| bessel_poly(n, 1.5, 2.0, t).unwrap();
            let fd1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let fd2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            assert!((fd1 - dy).abs() < 1e-6 * dy.abs().max(1.0));
            assert!((fd2 - d2y).abs() < 1e-4 * d2y.abs().max(1.0));
        }
        let (_, d0, dd0) = bessel_poly_derivs(3, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(
            d0,
            binomial(3, 1) * falling_factorial(3.0 + 1.0 + 1.0 - 2.0, 1)
        );
        assert_eq!(
            dd0,
            2.0 * binomial(3, 2) * falling_factorial(3.0 + 2.0 + 1.0 - 2.0, 2)
        );
    }
}
