//! Phase-space integrals of the family.
//!
//! Replacing the constants `E` and `A` of a bounded orbit by `H` and
//! `A_phase = 4σ²p_σ² - ασ^{2k} - βσ^k` turns the orbit's Chebyshev relation
//! into a phase-space function
//!
//! ```text
//! L = √D1^p √D2^q [T_q(W) T_p(Z) - U_{q-1}(W) U_{p-1}(Z) s]
//! ```
//!
//! which is a polynomial of degree at most `2p + 2q` in the momenta. The root
//! term `s` is always taken from its signed phase-space expression, never by
//! choosing a branch of `√((1-Z²)(1-W²))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Chart, PhasePoint, SystemParams};
use crate::specfun::{chebyshev_t, chebyshev_t_explicit, chebyshev_u, chebyshev_u_explicit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantValues {
    pub z: f64,
    pub w: f64,
    /// Signed value of `√((1-Z²)(1-W²))`.
    pub sqrt_term: f64,
    pub d1: f64,
    pub d2: f64,
    pub a_phase: f64,
    pub h: f64,
}

/// Numerators of `Z√D1`, `W√D2` and `s√(D1 D2)` together with `D1`, `D2`.
/// All five are polynomial in the momenta.
#[derive(Debug, Clone, Copy)]
struct Numerators {
    z: f64,
    w: f64,
    s: f64,
    d1: f64,
    d2: f64,
    a_phase: f64,
    h: f64,
}

fn polar_point(point: &PhasePoint) -> Result<PhasePoint> {
    match point.chart {
        Chart::ModifiedPolar => Ok(*point),
        Chart::Cartesian => model::to_modified_polar(point),
    }
}

fn numerators(params: &SystemParams, point: &PhasePoint) -> Result<Numerators> {
    let x = polar_point(point)?;
    let PhasePoint {
        q1: rho,
        q2: sigma,
        p1: pr,
        p2: ps,
        ..
    } = x;
    if !(rho > 0.0 && sigma > 0.0) {
        return Err(Error::Domain(format!(
            "need rho > 0 and sigma > 0 (rho = {rho}, sigma = {sigma})"
        )));
    }
    let h = model::hamiltonian(params, &x)?;
    let sk = params.sigma_pow_k(sigma);
    let pot = params.alpha * sk * sk + params.beta * sk;
    let s2p2 = 4.0 * sigma * sigma * ps * ps;
    let a_phase = s2p2 - pot;
    let w2 = params.omega * params.omega;
    Ok(Numerators {
        z: (4.0 * rho * rho * pr * pr + s2p2 + w2 * rho * rho - pot) / rho,
        w: 8.0 * sigma * sigma / sk * ps * ps - 2.0 * params.alpha * sk - params.beta,
        s: 16.0 * sigma / sk * pr * ps * (pot - s2p2),
        d1: h * h + 4.0 * w2 * a_phase,
        d2: params.beta * params.beta - 4.0 * params.alpha * a_phase,
        a_phase,
        h,
    })
}

/// `Z`, `W_k`, the signed root term, `D1`, `D2`, `A_phase` and `H` at a point.
pub fn phase_invariants(params: &SystemParams, point: &PhasePoint) -> Result<InvariantValues> {
    let n = numerators(params, point)?;
    if !(n.d1 > 0.0) {
        return Err(Error::Regime(format!(
            "D1 = H^2 + 4 omega^2 A > 0 (D1 = {})",
            n.d1
        )));
    }
    if !(n.d2 > 0.0) {
        return Err(Error::Regime(format!(
            "D2 = beta^2 - 4 alpha A > 0 (D2 = {})",
            n.d2
        )));
    }
    let (r1, r2) = (n.d1.sqrt(), n.d2.sqrt());
    Ok(InvariantValues {
        z: n.z / r1,
        w: n.w / r2,
        sqrt_term: n.s / (r1 * r2),
        d1: n.d1,
        d2: n.d2,
        a_phase: n.a_phase,
        h: n.h,
    })
}

/// The bracket `T_q(W)T_p(Z) - U_{q-1}(W)U_{p-1}(Z) s` evaluated by recurrence.
pub fn chebyshev_combination(p: u32, q: u32, z: f64, w: f64, s: f64) -> f64 {
    chebyshev_t(q as usize, w) * chebyshev_t(p as usize, z)
        - chebyshev_u(q as i64 - 1, w) * chebyshev_u(p as i64 - 1, z) * s
}

/// The same bracket through the explicit binomial sums.
pub fn chebyshev_combination_expanded(p: u32, q: u32, z: f64, w: f64, s: f64) -> f64 {
    chebyshev_t_explicit(q as usize, w) * chebyshev_t_explicit(p as usize, z)
        - chebyshev_u_explicit(q as i64 - 1, w) * chebyshev_u_explicit(p as i64 - 1, z) * s
}

/// The extra integral `L`, Chebyshev recurrences on `Z` and `W`.
pub fn extra_integral(params: &SystemParams, point: &PhasePoint) -> Result<f64> {
    let v = phase_invariants(params, point)?;
    let (p, q) = (params.k.p(), params.k.q());
    Ok(v.d1.sqrt().powi(p as i32)
        * v.d2.sqrt().powi(q as i32)
        * chebyshev_combination(p, q, v.z, v.w, v.sqrt_term))
}

/// `L` through the explicit binomial double sums.
pub fn extra_integral_expanded(params: &SystemParams, point: &PhasePoint) -> Result<f64> {
    let v = phase_invariants(params, point)?;
    let (p, q) = (params.k.p(), params.k.q());
    Ok(v.d1.sqrt().powi(p as i32)
        * v.d2.sqrt().powi(q as i32)
        * chebyshev_combination_expanded(p, q, v.z, v.w, v.sqrt_term))
}

// d^{n/2} T_n(x/√d) and d^{n/2} U_n(x/√d): the Chebyshev recurrences with the
// `-1` replaced by `-d`, so no square root is ever taken.
fn homogeneous_t(n: u32, x: f64, d: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        (prev, cur) = (cur, 2.0 * x * cur - d * prev);
    }
    cur
}

fn homogeneous_u(n: i64, x: f64, d: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        (prev, cur) = (cur, 2.0 * x * cur - d * prev);
    }
    cur
}

/// `L` assembled directly as a polynomial in the momenta. Defined at every
/// point with `ρ, σ > 0`, including points where `D1` or `D2` is not positive.
pub fn extra_integral_polynomial(params: &SystemParams, point: &PhasePoint) -> Result<f64> {
    let n = numerators(params, point)?;
    let (p, q) = (params.k.p(), params.k.q());
    Ok(homogeneous_t(q, n.w, n.d2) * homogeneous_t(p, n.z, n.d1)
        - homogeneous_u(q as i64 - 1, n.w, n.d2) * homogeneous_u(p as i64 - 1, n.z, n.d1) * n.s)
}

/// Default relative finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

fn shifted(point: &PhasePoint, i: usize, delta: f64) -> PhasePoint {
    let mut y = point.to_array();
    y[i] += delta;
    PhasePoint::from_array(point.chart, y)
}

/// Gradient `(∂/∂q1, ∂/∂q2, ∂/∂p1, ∂/∂p2)` by central differences with one
/// Richardson level (steps `h` and `h/2`, `h = step (1 + |x_i|)`).
pub fn gradient<F>(f: F, point: &PhasePoint, step: f64) -> Result<[f64; 4]>
where
    F: Fn(&PhasePoint) -> Result<f64>,
{
    let y = point.to_array();
    let mut g = [0.0; 4];
    for i in 0..4 {
        let h = step * (1.0 + y[i].abs());
        let central = |h: f64| -> Result<f64> {
            Ok((f(&shifted(point, i, h))? - f(&shifted(point, i, -h))?) / (2.0 * h))
        };
        let (coarse, fine) = (central(h)?, central(0.5 * h)?);
        g[i] = (4.0 * fine - coarse) / 3.0;
    }
    Ok(g)
}

/// `{f, g} = Σ_i ∂f/∂q_i ∂g/∂p_i - ∂f/∂p_i ∂g/∂q_i`, numerically.
pub fn poisson_bracket<F, G>(f: F, g: G, point: &PhasePoint, step: f64) -> Result<f64>
where
    F: Fn(&PhasePoint) -> Result<f64>,
    G: Fn(&PhasePoint) -> Result<f64>,
{
    let df = gradient(f, point, step)?;
    let dg = gradient(g, point, step)?;
    Ok(df[0] * dg[2] + df[1] * dg[3] - df[2] * dg[0] - df[3] * dg[1])
}

pub fn norm(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RationalK;

    fn fig1_k1() -> SystemParams {
        SystemParams::new(RationalK::integer(1).unwrap(), -2.0, 6.0, 3.0).unwrap()
    }

    #[test]
    fn invariants_at_turning_point() {
        let params = fig1_k1();
        let v = phase_invariants(&params, &PhasePoint::polar(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(v.a_phase, -4.0);
        assert_eq!(v.h, 13.0);
        assert_eq!(v.d1, 25.0);
        assert_eq!(v.d2, 4.0);
        assert!((v.z - 1.0).abs() < 1e-15);
        assert!((v.w + 1.0).abs() < 1e-15);
        assert_eq!(v.sqrt_term, 0.0);
        let l = extra_integral(&params, &PhasePoint::polar(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert!((l + 10.0).abs() < 1e-13);
    }

    #[test]
    fn root_term_vanishes_with_either_momentum() {
        let params = fig1_k1();
        for pt in [
            PhasePoint::polar(1.1, 0.9, 0.0, 0.05),
            PhasePoint::polar(1.1, 0.9, 0.2, 0.0),
        ] {
            if let Ok(v) = phase_invariants(&params, &pt) {
                assert_eq!(v.sqrt_term, 0.0);
            }
        }
    }

    #[test]
    fn p_equals_q_equals_one_reduces_to_product() {
        let params = fig1_k1();
        let pt = PhasePoint::polar(1.2, 1.3, 0.1, 0.07);
        let v = phase_invariants(&params, &pt).unwrap();
        let l = extra_integral(&params, &pt).unwrap();
        let expect = v.d1.sqrt() * v.d2.sqrt() * (v.w * v.z - v.sqrt_term);
        assert!((l - expect).abs() < 1e-12 * l.abs().max(1.0));
    }

    #[test]
    fn regime_errors() {
        // D1 and D2 are non-negative on the domain; only their zeros are rejected.
        let params = SystemParams::new(RationalK::integer(1).unwrap(), -2.0, 6.0, 1.0).unwrap();
        let r = phase_invariants(&params, &PhasePoint::polar(2.0, 1.0, 0.0, 0.0));
        assert!(
            matches!(r, Err(Error::Regime(ref m)) if m.contains("D1")),
            "{r:?}"
        );
        let r = phase_invariants(&params, &PhasePoint::polar(1.0, 1.5, 0.0, 0.0));
        assert!(
            matches!(r, Err(Error::Regime(ref m)) if m.contains("D2")),
            "{r:?}"
        );
        assert!(phase_invariants(&params, &PhasePoint::polar(-1.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn polynomial_route_matches_where_defined() {
        for (p, q) in [(1, 1), (2, 1), (1, 2), (3, 2), (4, 3)] {
            let params = SystemParams::new(RationalK::new(p, q).unwrap(), -1.0, 3.0, 4.0).unwrap();
            let pt = PhasePoint::polar(0.9, 1.7, 0.3, -0.08);
            let a = extra_integral(&params, &pt).unwrap();
            let b = extra_integral_polynomial(&params, &pt).unwrap();
            let c = extra_integral_expanded(&params, &pt).unwrap();
            assert!(
                (a - b).abs() < 1e-10 * a.abs().max(1.0),
                "{p}/{q}: {a} vs {b}"
            );
            assert!(
                (a - c).abs() < 1e-9 * a.abs().max(1.0),
                "{p}/{q}: {a} vs {c}"
            );
        }
    }

    #[test]
    fn poisson_bracket_examples() {
        let params = fig1_k1();
        let pt = PhasePoint::polar(1.2, 0.8, 0.3, -0.2);
        let b = poisson_bracket(|x| Ok(x.q1), |x| Ok(x.p1), &pt, DEFAULT_FD_STEP).unwrap();
        assert!((b - 1.0).abs() < 1e-10);
        let h = |x: &PhasePoint| model::hamiltonian(&params, x);
        let b = poisson_bracket(h, h, &pt, DEFAULT_FD_STEP).unwrap();
        assert!(b.abs() < 1e-9);
        let a = |x: &PhasePoint| model::separation_constant(&params, x);
        let gh = gradient(h, &pt, DEFAULT_FD_STEP).unwrap();
        let ga = gradient(a, &pt, DEFAULT_FD_STEP).unwrap();
        let b = poisson_bracket(a, h, &pt, DEFAULT_FD_STEP).unwrap();
        assert!(b.abs() < 1e-7 * norm(&gh) * norm(&ga), "{b}");
    }

    #[test]
    fn bracket_propagates_stencil_failures() {
        let params = fig1_k1();
        // rho is so close to zero that the stencil crosses it.
        let pt = PhasePoint::polar(1e-7, 1.0, 0.0, 0.0);
        let h = |x: &PhasePoint| model::hamiltonian(&params, x);
        assert!(poisson_bracket(h, h, &pt, 1.0).is_err());
    }
}
