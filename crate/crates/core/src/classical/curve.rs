//! Closed-form data of a bounded orbit: radial turning points, the range of
//! `σ^{-k}`, the constants `Γ_k` and `C_k`, and the implicit Chebyshev curve
//!
//! ```text
//! cos C_k = T_q(W) T_p(Z) - U_{q-1}(W) U_{p-1}(Z) s,   k = p/q.
//! ```

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{chebyshev_combination, chebyshev_combination_expanded};
use crate::model::SystemParams;

/// Constants defining one bounded orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveConstants {
    pub energy: f64,
    /// Separation constant `A`.
    pub separation: f64,
    pub d1: f64,
    pub d2: f64,
    pub rho1: f64,
    pub rho2: f64,
    /// Lower end of the allowed interval of `σ^{-k}`, `(β - √D2)/(2|A|)`.
    pub sigma_lo: f64,
    /// Upper end of the allowed interval of `σ^{-k}`, `(β + √D2)/(2|A|)`.
    pub sigma_hi: f64,
    pub gamma_k: f64,
    pub c_k: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl CurveConstants {
    pub fn cos_c(&self) -> f64 {
        self.c_k.cos()
    }

    /// Range of `σ^k` itself: the reciprocal of `[sigma_lo, sigma_hi]`.
    pub fn sigma_k_range(&self) -> (f64, f64) {
        (1.0 / self.sigma_hi, 1.0 / self.sigma_lo)
    }
}

/// Radial turning points `(E ∓ √D1)/(2ω²)`, `D1 = E² + 4ω²A`.
pub fn rho_bounds(energy: f64, separation: f64, omega: f64) -> Result<(f64, f64)> {
    let d1 = energy * energy + 4.0 * omega * omega * separation;
    if !(d1 > 0.0) {
        return Err(Error::Regime(format!(
            "D1 = E^2 + 4 omega^2 A > 0 (D1 = {d1}); no real radial turning points"
        )));
    }
    let r = d1.sqrt();
    let w2 = 2.0 * omega * omega;
    Ok(((energy - r) / w2, (energy + r) / w2))
}

/// Allowed interval `((β - √D2)/(2|A|), (β + √D2)/(2|A|))`, `D2 = β² - 4αA`.
///
/// The interval bounds `σ^{-k}`: the angular turning points (`p_σ = 0`) sit
/// at `σ^{-k} = (β ∓ √D2)/(2|A|)`, equivalently `σ^k = (β ∓ √D2)/(2|α|)`.
/// `D2 = 0` is the fundamental upper bound on `-A` and yields a degenerate
/// interval.
pub fn sigma_bounds(params: &SystemParams, separation: f64) -> Result<(f64, f64)> {
    params.require_bounded_regime()?;
    if !(separation < 0.0) {
        return Err(Error::Regime(format!("A < 0 (A = {separation})")));
    }
    let d2 = params.beta * params.beta - 4.0 * params.alpha * separation;
    if d2 < 0.0 {
        return Err(Error::Regime(format!(
            "-A <= beta^2/(4|alpha|), i.e. D2 = beta^2 - 4 alpha A >= 0 (D2 = {d2})"
        )));
    }
    let r = d2.sqrt();
    let den = 2.0 * separation.abs();
    Ok(((params.beta - r) / den, (params.beta + r) / den))
}

/// `ρ(t) = (E + √D1 cos(4ω(t + δ1)))/(2ω²)`.
pub fn rho_closed_form(consts: &CurveConstants, omega: f64, t: f64) -> Result<f64> {
    if !(consts.d1 > 0.0) {
        return Err(Error::Regime(format!("D1 > 0 (D1 = {})", consts.d1)));
    }
    Ok(
        (consts.energy + consts.d1.sqrt() * (4.0 * omega * (t + consts.delta1)).cos())
            / (2.0 * omega * omega),
    )
}

/// Checks every bounded-regime inequality and assembles the orbit constants.
///
/// `Γ_k = k(4δ2√(-A) + π/2) + π/2` (the arcsine term is evaluated at the
/// turning point `W = 1`), `C_k = (p+q)π/2 - qΓ_k`.
pub fn curve_constants(
    params: &SystemParams,
    energy: f64,
    separation: f64,
    delta1: f64,
    delta2: f64,
) -> Result<CurveConstants> {
    params.require_bounded_regime()?;
    if !(energy >= 0.0) {
        return Err(Error::Regime(format!("E >= 0 (E = {energy})")));
    }
    if !(separation < 0.0) {
        return Err(Error::Regime(format!("A < 0 (A = {separation})")));
    }
    let w2 = params.omega * params.omega;
    let d1 = energy * energy + 4.0 * w2 * separation;
    if !(d1 > 0.0) {
        return Err(Error::Regime(format!(
            "-A < E^2/(4 omega^2), i.e. D1 = E^2 + 4 omega^2 A > 0 (D1 = {d1})"
        )));
    }
    let d2 = params.beta * params.beta - 4.0 * params.alpha * separation;
    if !(d2 > 0.0) {
        return Err(Error::Regime(format!(
            "-A < beta^2/(4|alpha|), i.e. D2 = beta^2 - 4 alpha A > 0 (D2 = {d2})"
        )));
    }
    let (rho1, rho2) = rho_bounds(energy, separation, params.omega)?;
    let (sigma_lo, sigma_hi) = sigma_bounds(params, separation)?;
    let k = params.k_value();
    let gamma_k = k * (4.0 * delta2 * (-separation).sqrt() + FRAC_PI_2) + FRAC_PI_2;
    let (p, q) = (params.k.p() as f64, params.k.q() as f64);
    let c_k = (p + q) * FRAC_PI_2 - q * gamma_k;
    Ok(CurveConstants {
        energy,
        separation,
        d1,
        d2,
        rho1,
        rho2,
        sigma_lo,
        sigma_hi,
        gamma_k,
        c_k,
        delta1,
        delta2,
    })
}

/// `cos C_k - [T_q(W)T_p(Z) - U_{q-1}(W)U_{p-1}(Z) s]`; zero on the orbit.
pub fn curve_residual(
    params: &SystemParams,
    consts: &CurveConstants,
    z: f64,
    w: f64,
    s: f64,
) -> f64 {
    consts.cos_c() - chebyshev_combination(params.k.p(), params.k.q(), z, w, s)
}

/// [`curve_residual`] through the explicit binomial sums.
pub fn curve_residual_expanded(
    params: &SystemParams,
    consts: &CurveConstants,
    z: f64,
    w: f64,
    s: f64,
) -> f64 {
    consts.cos_c() - chebyshev_combination_expanded(params.k.p(), params.k.q(), z, w, s)
}
