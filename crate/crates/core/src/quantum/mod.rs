//! Bound states of the quantum Hamiltonian
//!
//! ```text
//! H_k = -4ρ∂²_ρ - 4∂_ρ + (4σ²/ρ)∂²_σ + (4σ/ρ)∂_σ + ω²ρ + (ασ^{2k} + βσ^k)/ρ
//! ```
//!
//! separated as `Ψ = R(ξ) S(η)` with `ξ = ωρ` and `η = √(-α) σ^k / k`.
//! Normalization constants are fixed to 1.

pub mod ladder;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::specfun::{bessel_poly, laguerre, laguerre_nth_deriv};

pub use ladder::{
    degeneracy_map_check, energy_difference, ladder_apply, DegeneracyReport, Jet, LadderKind,
    LadderOperator, LaguerreFunction, ShiftDirection,
};
pub use quadrature::{gram_matrix_s, integrate_semi_infinite, QuadratureResult};

/// One level `(m, n)` with `A_n` and `E_mn = 2ω(2m + 1 + √(-A_n))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumLevel {
    pub m: usize,
    pub n: usize,
    pub a_n: f64,
    pub sqrt_minus_a: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumData {
    pub params: SystemParams,
    /// Largest `n` with `√(-A_n) > 0`.
    pub n_max: usize,
    /// `B ∈ (0, 2]`.
    pub b: f64,
    /// `β / (2k√(-α))`.
    pub ratio: f64,
    pub levels: Vec<QuantumLevel>,
}

impl SpectrumData {
    /// `√(-A_n) = k (B + 2(N - n))`.
    pub fn sqrt_minus_a(&self, n: usize) -> f64 {
        self.params.k_value() * self.mu(n)
    }

    /// Laguerre parameter of `S_n`: `B + 2(N - n)`.
    pub fn mu(&self, n: usize) -> f64 {
        self.b + 2.0 * (self.n_max as f64 - n as f64)
    }

    pub fn level(&self, m: usize, n: usize) -> Result<QuantumLevel> {
        self.check_n(n)?;
        let lam = self.sqrt_minus_a(n);
        Ok(QuantumLevel {
            m,
            n,
            a_n: -lam * lam,
            sqrt_minus_a: lam,
            energy: 2.0 * self.params.omega * (2.0 * m as f64 + 1.0 + lam),
        })
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::OutOfRange(format!(
                "n = {n} exceeds N = {}",
                self.n_max
            )));
        }
        Ok(())
    }
}

/// `β / (2k√(-α))`, the quantity controlling the number of bound states.
pub fn bound_state_ratio(params: &SystemParams) -> Result<f64> {
    params.require_bounded_regime()?;
    Ok(params.beta / (2.0 * params.k_value() * (-params.alpha).sqrt()))
}

/// Levels with `m ≤ m_max` and `0 ≤ n ≤ N`, sorted by `(n, m)`.
///
/// `N` is the largest integer with `√(-A_N) > 0`, i.e. `N < (r - 1)/2` for
/// `r = β/(2k√(-α))`, which puts `B = r - 2N - 1` in `(0, 2]`.
pub fn spectrum(params: &SystemParams, m_max: usize) -> Result<SpectrumData> {
    let r = bound_state_ratio(params)?;
    if !(r > 1.0) {
        return Err(Error::NoBoundState { ratio: r });
    }
    let n_max = ((r - 1.0) / 2.0).ceil() as usize - 1;
    let b = r - 2.0 * n_max as f64 - 1.0;
    let mut data = SpectrumData {
        params: *params,
        n_max,
        b,
        ratio: r,
        levels: Vec::new(),
    };
    for n in 0..=n_max {
        for m in 0..=m_max {
            data.levels.push(data.level(m, n)?);
        }
    }
    Ok(data)
}

/// `A_n = -k² (r - 2n - 1)²` straight from the quantization condition.
pub fn separation_eigenvalue(params: &SystemParams, n: usize) -> Result<f64> {
    let r = bound_state_ratio(params)?;
    let k = params.k_value();
    Ok(-k * k * (r - 2.0 * n as f64 - 1.0).powi(2))
}

/// `E_mn = 2ω(2m - 2kn + 1 - k + β/(2√(-α)))`.
pub fn energy_explicit(params: &SystemParams, m: usize, n: usize) -> f64 {
    let k = params.k_value();
    2.0 * params.omega
        * (2.0 * m as f64 - 2.0 * k * n as f64 + 1.0 - k
            + params.beta / (2.0 * (-params.alpha).sqrt()))
}

/// `e^{-x/2} x^{s}` without intermediate overflow.
fn envelope(s: f64, x: f64) -> f64 {
    (-0.5 * x + s * x.ln()).exp()
}

/// Radial factor `R = e^{-ξ/2} ξ^{λ/2} L_m^λ(ξ)` for real `λ`; `ξ > 0`.
pub fn wavefunction_r(m: usize, lambda: f64, xi: f64) -> f64 {
    envelope(0.5 * lambda, xi) * laguerre(m, lambda, xi)
}

/// Angular factor `S_n = e^{-η/2} η^{B/2 + N - n} L_n^{B + 2(N-n)}(η)`; `η > 0`.
pub fn wavefunction_s(spectrum: &SpectrumData, n: usize, eta: f64) -> Result<f64> {
    spectrum.check_n(n)?;
    let mu = spectrum.mu(n);
    Ok(envelope(0.5 * mu, eta) * laguerre(n, mu, eta))
}

/// `η = √(-α) σ^k / k`.
pub fn eta_of_sigma(params: &SystemParams, sigma: f64) -> f64 {
    (-params.alpha).sqrt() * params.sigma_pow_k(sigma) / params.k_value()
}

/// `(f, f', f'')` of `e^{-x/2} x^{a/2} L_n^a(x)` from exact derivative identities.
pub(crate) fn laguerre_function_derivs(n: usize, a: f64, x: f64) -> [f64; 3] {
    let s = 0.5 * a;
    let g = envelope(s, x);
    let g1 = g * (-0.5 + s / x);
    let g2 = g * ((-0.5 + s / x).powi(2) - s / (x * x));
    let l0 = laguerre(n, a, x);
    let l1 = laguerre_nth_deriv(n, a, x, 1);
    let l2 = laguerre_nth_deriv(n, a, x, 2);
    [g * l0, g1 * l0 + g * l1, g2 * l0 + 2.0 * g1 * l1 + g * l2]
}

const PSI_FLOOR: f64 = 1e-300;

fn require_quantum_regime(params: &SystemParams) -> Result<()> {
    if params.is_free() {
        return Err(Error::Regime(
            "alpha < 0 and beta > 0 (the free oscillator has no bound states here)".into(),
        ));
    }
    params.require_bounded_regime()
}

/// `(H_k Ψ - E Ψ) / Ψ` at `(ρ, σ)`, all derivatives exact.
pub fn schrodinger_residual(
    spectrum: &SpectrumData,
    level: &QuantumLevel,
    rho: f64,
    sigma: f64,
) -> Result<f64> {
    let params = &spectrum.params;
    require_quantum_regime(params)?;
    spectrum.check_n(level.n)?;
    if !(rho > 0.0 && sigma > 0.0) {
        return Err(Error::Domain(format!(
            "need rho > 0 and sigma > 0 (rho = {rho}, sigma = {sigma})"
        )));
    }
    let w = params.omega;
    let k = params.k_value();
    let xi = w * rho;
    let eta = eta_of_sigma(params, sigma);
    let [r0, r1, r2] = laguerre_function_derivs(level.m, level.sqrt_minus_a, xi);
    let [s0, s1, s2] = laguerre_function_derivs(level.n, spectrum.mu(level.n), eta);
    let d_eta = k * eta / sigma;
    let d2_eta = k * (k - 1.0) * eta / (sigma * sigma);
    let psi = r0 * s0;
    let psi_rr = w * w * r2 * s0;
    let psi_r = w * r1 * s0;
    let psi_ss = r0 * (s2 * d_eta * d_eta + s1 * d2_eta);
    let psi_s = r0 * s1 * d_eta;
    let h_psi = -4.0 * rho * psi_rr - 4.0 * psi_r
        + 4.0 * sigma * sigma / rho * psi_ss
        + 4.0 * sigma / rho * psi_s
        + (w * w * rho + params.angular_potential(sigma) / rho) * psi;
    Ok((h_psi - level.energy * psi) / psi.abs().max(PSI_FLOOR) * psi.signum())
}

/// `[4ρ∂²_ρ + 4∂_ρ - ω²ρ + A/ρ + E] R / R` for the radial factor alone.
pub fn radial_equation_residual(
    params: &SystemParams,
    level: &QuantumLevel,
    rho: f64,
) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("need rho > 0, got {rho}")));
    }
    let w = params.omega;
    let [r0, r1, r2] = laguerre_function_derivs(level.m, level.sqrt_minus_a, w * rho);
    let val = 4.0 * rho * w * w * r2
        + 4.0 * w * r1
        + (-w * w * rho + level.a_n / rho + level.energy) * r0;
    Ok(val / r0.abs().max(PSI_FLOOR) * r0.signum())
}

/// `[4σ²∂²_σ + 4σ∂_σ + ασ^{2k} + βσ^k + A] S / S` for the angular factor alone.
pub fn angular_equation_residual(spectrum: &SpectrumData, n: usize, sigma: f64) -> Result<f64> {
    spectrum.check_n(n)?;
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("need sigma > 0, got {sigma}")));
    }
    let params = &spectrum.params;
    let k = params.k_value();
    let eta = eta_of_sigma(params, sigma);
    let [s0, s1, s2] = laguerre_function_derivs(n, spectrum.mu(n), eta);
    let d_eta = k * eta / sigma;
    let d2_eta = k * (k - 1.0) * eta / (sigma * sigma);
    let lam = spectrum.sqrt_minus_a(n);
    let val = 4.0 * sigma * sigma * (s2 * d_eta * d_eta + s1 * d2_eta)
        + 4.0 * sigma * s1 * d_eta
        + (params.angular_potential(sigma) - lam * lam) * s0;
    Ok(val / s0.abs().max(PSI_FLOOR) * s0.signum())
}

/// Bessel parameter `a = 2 - β/(2k√(-α))` for which
/// `S_n(1/s) ∝ s^{(a-1)/2} e^{-1/(2s)} y_n(s; a, 1)`.
pub fn bessel_parameter(params: &SystemParams) -> Result<f64> {
    let a = 2.0 - bound_state_ratio(params)?;
    if a == 2.0 {
        return Err(Error::InvalidArgument("a = 2 is excluded".into()));
    }
    Ok(a)
}

fn bessel_side(n: usize, a: f64, s: f64) -> Result<f64> {
    Ok((0.5 * (a - 1.0) * s.ln() - 0.5 / s).exp() * bessel_poly(n, a, 1.0, s)?)
}

/// Relative difference between `S_n(1/s)` and its Bessel-polynomial form,
/// the constant fixed by matching at `s = 1`.
pub fn bessel_representation_check(spectrum: &SpectrumData, n: usize, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("need s > 0, got {s}")));
    }
    let a = bessel_parameter(&spectrum.params)?;
    let c = wavefunction_s(spectrum, n, 1.0)? / bessel_side(n, a, 1.0)?;
    let lhs = wavefunction_s(spectrum, n, 1.0 / s)?;
    let rhs = c * bessel_side(n, a, s)?;
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(PSI_FLOOR))
}

/// Residual of `s²y'' + (as + 1)y' - n(n+a-1)y` for the polynomial factor
/// `P(s) = s^n L_n^μ(1/s)` extracted from `S_n(1/s)`, relative to the size
/// of its terms.
pub fn bessel_ode_witness(spectrum: &SpectrumData, n: usize, s: f64) -> Result<f64> {
    spectrum.check_n(n)?;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("need s > 0, got {s}")));
    }
    let a = bessel_parameter(&spectrum.params)?;
    let mu = spectrum.mu(n);
    let u = 1.0 / s;
    let nf = n as f64;
    let l0 = laguerre(n, mu, u);
    let l1 = laguerre_nth_deriv(n, mu, u, 1);
    let l2 = laguerre_nth_deriv(n, mu, u, 2);
    let p0 = s.powi(n as i32) * l0;
    let p1 = nf * s.powf(nf - 1.0) * l0 - s.powf(nf - 2.0) * l1;
    let p2 = nf * (nf - 1.0) * s.powf(nf - 2.0) * l0 - (2.0 * nf - 2.0) * s.powf(nf - 3.0) * l1
        + s.powf(nf - 4.0) * l2;
    let terms = [s * s * p2, (a * s + 1.0) * p1, nf * (nf + a - 1.0) * p0];
    let scale = terms.iter().map(|t| t.abs()).fold(PSI_FLOOR, f64::max);
    Ok((terms[0] + terms[1] - terms[2]).abs() / scale)
}
