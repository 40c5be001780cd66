//! Parameters of the family, the two phase-space charts on E(1,1), and the
//! Hamiltonian
//!
//! ```text
//! H = p_u² - p_v² + ω²(u² - v²) + (α σ^{2k} + β σ^k) / (u² - v²)
//!   = 4ρ p_ρ² - 4(σ²/ρ) p_σ² + ω²ρ + (α σ^{2k} + β σ^k) / ρ,
//! ρ = u² - v²,  σ = (u + v)/(u - v).
//! ```
//!
//! Also hosts the parameter-embedding map for separable Hamiltonians and the
//! coupling-constant metamorphosis to the deformed Coulomb family.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positive rational `k = p/q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalK {
    p: u32,
    q: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl RationalK {
    /// Reduces `p/q`; both must be positive.
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidArgument(format!(
                "k = {p}/{q} must be positive"
            )));
        }
        let g = gcd(p, q);
        Ok(Self { p: p / g, q: q / g })
    }

    pub fn integer(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for RationalK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

/// Parses `p/q` or a bare integer. Decimal input is rejected so that the
/// Chebyshev degrees stay exact.
impl FromStr for RationalK {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("k must be `p/q` or an integer, got `{s}`"));
        let (p, q) = match s.trim().split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: u32 = p.parse().map_err(|_| bad())?;
        let q: u32 = q.parse().map_err(|_| bad())?;
        Self::new(p, q)
    }
}

/// One member of the family: `k`, couplings `α`, `β`, frequency `ω > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub k: RationalK,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
}

impl SystemParams {
    pub fn new(k: RationalK, alpha: f64, beta: f64, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidArgument("couplings must be finite".into()));
        }
        Ok(Self {
            k,
            alpha,
            beta,
            omega,
        })
    }

    pub fn k_value(&self) -> f64 {
        self.k.value()
    }

    /// `α < 0` and `β > 0`: the couplings admit bounded classical motion and
    /// quantum bound states.
    pub fn is_bounded_regime(&self) -> bool {
        self.alpha < 0.0 && self.beta > 0.0
    }

    pub fn is_free(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0
    }

    pub(crate) fn require_bounded_regime(&self) -> Result<()> {
        if !(self.alpha < 0.0) {
            return Err(Error::Regime(format!("alpha < 0 (alpha = {})", self.alpha)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::Regime(format!("beta > 0 (beta = {})", self.beta)));
        }
        Ok(())
    }

    /// `σ^k` on the principal sheet `σ > 0`.
    pub fn sigma_pow_k(&self, sigma: f64) -> f64 {
        let k = self.k;
        if k.q == 1 {
            sigma.powi(k.p as i32)
        } else {
            (k.value() * sigma.ln()).exp()
        }
    }

    /// Angular part of the potential, `α σ^{2k} + β σ^k`.
    pub fn angular_potential(&self, sigma: f64) -> f64 {
        let s = self.sigma_pow_k(sigma);
        self.alpha * s * s + self.beta * s
    }

    /// `d/dσ (α σ^{2k} + β σ^k) = k (2α σ^{2k} + β σ^k) / σ`.
    pub fn angular_potential_deriv(&self, sigma: f64) -> f64 {
        let s = self.sigma_pow_k(sigma);
        self.k_value() * (2.0 * self.alpha * s * s + self.beta * s) / sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `(u, v, p_u, p_v)`.
    Cartesian,
    /// `(ρ, σ, p_ρ, p_σ)`.
    ModifiedPolar,
}

/// A phase-space point in a tagged chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub chart: Chart,
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl PhasePoint {
    pub fn cartesian(u: f64, v: f64, p_u: f64, p_v: f64) -> Self {
        Self {
            chart: Chart::Cartesian,
            q1: u,
            q2: v,
            p1: p_u,
            p2: p_v,
        }
    }

    pub fn polar(rho: f64, sigma: f64, p_rho: f64, p_sigma: f64) -> Self {
        Self {
            chart: Chart::ModifiedPolar,
            q1: rho,
            q2: sigma,
            p1: p_rho,
            p2: p_sigma,
        }
    }

    /// `[q1, q2, p1, p2]`.
    pub fn to_array(&self) -> [f64; 4] {
        [self.q1, self.q2, self.p1, self.p2]
    }

    pub fn from_array(chart: Chart, y: [f64; 4]) -> Self {
        Self {
            chart,
            q1: y[0],
            q2: y[1],
            p1: y[2],
            p2: y[3],
        }
    }

    fn require_chart(&self, chart: Chart) -> Result<()> {
        if self.chart != chart {
            return Err(Error::Domain(format!(
                "expected a {chart:?} point, got {:?}",
                self.chart
            )));
        }
        Ok(())
    }
}

/// Cartesian `(u, v, p_u, p_v)` to `(ρ, σ, p_ρ, p_σ)`.
///
/// The momenta follow from `p_u = 2u p_ρ - 2v/(u-v)² p_σ`,
/// `p_v = -2v p_ρ + 2u/(u-v)² p_σ`, whose inverse is
/// `p_ρ = (u p_u + v p_v)/(2ρ)`, `p_σ = (u-v)² (v p_u + u p_v)/(2ρ)`.
pub fn to_modified_polar(point: &PhasePoint) -> Result<PhasePoint> {
    point.require_chart(Chart::Cartesian)?;
    let PhasePoint {
        q1: u,
        q2: v,
        p1: pu,
        p2: pv,
        ..
    } = *point;
    let d = u - v;
    if d == 0.0 {
        return Err(Error::Domain(
            "u - v = 0 is not covered by the (rho, sigma) chart".into(),
        ));
    }
    let rho = d * (u + v);
    if rho == 0.0 {
        return Err(Error::Domain(
            "u + v = 0 makes the momentum transform singular".into(),
        ));
    }
    let sigma = (u + v) / d;
    let p_rho = (u * pu + v * pv) / (2.0 * rho);
    let p_sigma = d * d * (v * pu + u * pv) / (2.0 * rho);
    Ok(PhasePoint::polar(rho, sigma, p_rho, p_sigma))
}

/// Inverse of [`to_modified_polar`] on the sheet `u - v = √(ρ/σ) > 0`.
pub fn to_cartesian(point: &PhasePoint) -> Result<PhasePoint> {
    point.require_chart(Chart::ModifiedPolar)?;
    let PhasePoint {
        q1: rho,
        q2: sigma,
        p1: pr,
        p2: ps,
        ..
    } = *point;
    if !(rho * sigma > 0.0) {
        return Err(Error::Domain(format!(
            "rho * sigma must be positive (rho = {rho}, sigma = {sigma})"
        )));
    }
    let d2 = rho / sigma;
    let d = d2.sqrt();
    let u = 0.5 * (sigma + 1.0) * d;
    let v = 0.5 * (sigma - 1.0) * d;
    let pu = 2.0 * u * pr - 2.0 * v / d2 * ps;
    let pv = -2.0 * v * pr + 2.0 * u / d2 * ps;
    Ok(PhasePoint::cartesian(u, v, pu, pv))
}

fn polar_hamiltonian(params: &SystemParams, rho: f64, sigma: f64, pr: f64, ps: f64) -> Result<f64> {
    if params.is_free() {
        if rho == 0.0 {
            return Err(Error::Domain(
                "rho = 0 is singular in the (rho, sigma) chart".into(),
            ));
        }
    } else if !(rho > 0.0 && sigma > 0.0) {
        return Err(Error::Domain(format!(
            "the potential needs rho > 0 and sigma > 0 (rho = {rho}, sigma = {sigma})"
        )));
    }
    let pot = if params.is_free() {
        0.0
    } else {
        params.angular_potential(sigma)
    };
    Ok(4.0 * rho * pr * pr - 4.0 * sigma * sigma / rho * ps * ps
        + params.omega * params.omega * rho
        + pot / rho)
}

/// Hamiltonian value in either chart.
pub fn hamiltonian(params: &SystemParams, point: &PhasePoint) -> Result<f64> {
    match point.chart {
        Chart::ModifiedPolar => polar_hamiltonian(params, point.q1, point.q2, point.p1, point.p2),
        Chart::Cartesian => {
            let PhasePoint {
                q1: u,
                q2: v,
                p1: pu,
                p2: pv,
                ..
            } = *point;
            let w2 = params.omega * params.omega;
            let mut h = pu * pu - pv * pv + w2 * (u * u - v * v);
            if !params.is_free() {
                if u == v {
                    return Err(Error::Domain(
                        "u - v = 0 is singular for the potential".into(),
                    ));
                }
                let rho = u * u - v * v;
                let sigma = (u + v) / (u - v);
                if !(rho > 0.0 && sigma > 0.0) {
                    return Err(Error::Domain(format!(
                        "the potential needs u^2 - v^2 > 0 and (u+v)/(u-v) > 0 at u = {u}, v = {v}"
                    )));
                }
                h += params.angular_potential(sigma) / rho;
            }
            Ok(h)
        }
    }
}

/// Separation function of σ: `A = 4σ² p_σ² - α σ^{2k} - β σ^k`.
pub fn separation_constant(params: &SystemParams, point: &PhasePoint) -> Result<f64> {
    let p = match point.chart {
        Chart::ModifiedPolar => *point,
        Chart::Cartesian => to_modified_polar(point)?,
    };
    if !params.is_free() && !(p.q2 > 0.0) {
        return Err(Error::Domain(format!(
            "sigma must be positive, got {}",
            p.q2
        )));
    }
    let pot = if params.is_free() {
        0.0
    } else {
        params.angular_potential(p.q2)
    };
    Ok(4.0 * p.q2 * p.q2 * p.p2 * p.p2 - pot)
}

/// Output of the coupling-constant metamorphosis: the deformed Coulomb member
/// `p_ρ² + p_φ²/ρ² + K/ρ + (α' e^{2ikφ} + β' e^{ikφ})/ρ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformedCoulomb {
    pub k: RationalK,
    /// Coulomb strength `K = -E/2`.
    pub coulomb: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// The polar substitution `ρ = r²/2`, `φ = 2θ` that accompanies the metamorphosis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CcmSubstitution;

impl CcmSubstitution {
    pub fn radius(&self, r: f64) -> f64 {
        0.5 * r * r
    }

    pub fn angle(&self, theta: f64) -> f64 {
        2.0 * theta
    }

    /// Conjugate momenta `(p_ρ, p_φ)` from `(r, p_r, p_θ)`: `p_r = r p_ρ`, `p_θ = 2 p_φ`.
    pub fn momenta(&self, r: f64, p_r: f64, p_theta: f64) -> (f64, f64) {
        (p_r / r, 0.5 * p_theta)
    }
}

/// Exchanges the energy `E` of the deformed oscillator with a Coulomb
/// coupling: `K = -E/2`, `α' = α/4`, `β' = β/4`.
pub fn ccm_map(params: &SystemParams, energy: f64) -> (DeformedCoulomb, CcmSubstitution) {
    (
        DeformedCoulomb {
            k: params.k,
            coulomb: -0.5 * energy,
            alpha: 0.25 * params.alpha,
            beta: 0.25 * params.beta,
        },
        CcmSubstitution,
    )
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The two admissible metric factors for a Hamiltonian separable in
/// subgroup coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricFactor {
    /// `ψ = 1`, Cartesian-type.
    ConstantOne,
    /// `ψ = 1/q1²`, polar-type.
    InverseSquare,
}

impl MetricFactor {
    pub fn eval(&self, q1: f64) -> f64 {
        match self {
            MetricFactor::ConstantOne => 1.0,
            MetricFactor::InverseSquare => 1.0 / (q1 * q1),
        }
    }
}

/// `H = p1² + f1(q1) + ψ(q1) X`, `X = p2² + f2(q2)`.
#[derive(Clone)]
pub struct SeparableSpec {
    pub f1: ScalarFn,
    pub f2: ScalarFn,
    pub psi: MetricFactor,
}

impl fmt::Debug for SeparableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparableSpec")
            .field("psi", &self.psi)
            .finish_non_exhaustive()
    }
}

impl SeparableSpec {
    pub fn new(
        f1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi: MetricFactor,
    ) -> Self {
        Self {
            f1: Arc::new(f1),
            f2: Arc::new(f2),
            psi,
        }
    }

    /// The separated integral `X = p2² + f2(q2)`.
    pub fn separated_integral(&self, q2: f64, p2: f64) -> f64 {
        p2 * p2 + (self.f2)(q2)
    }

    pub fn hamiltonian(&self, q1: f64, q2: f64, p1: f64, p2: f64) -> f64 {
        p1 * p1 + (self.f1)(q1) + self.psi.eval(q1) * self.separated_integral(q2, p2)
    }
}

/// Embeds a separable Hamiltonian in a one-parameter family:
/// `f2(q) ↦ k² f2(k q)`, with `f1` and `ψ` unchanged.
pub fn embed_parameter(spec: &SeparableSpec, k: f64) -> Result<SeparableSpec> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "embedding parameter must be positive, got {k}"
        )));
    }
    let f2 = Arc::clone(&spec.f2);
    Ok(SeparableSpec {
        f1: Arc::clone(&spec.f1),
        f2: Arc::new(move |q| k * k * f2(k * q)),
        psi: spec.psi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1(k: RationalK) -> SystemParams {
        SystemParams::new(k, -2.0, 6.0, 3.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn rational_k_reduces_and_parses() {
        let k = RationalK::new(6, 4).unwrap();
        assert_eq!((k.p(), k.q()), (3, 2));
        assert_eq!("3/2".parse::<RationalK>().unwrap(), k);
        assert_eq!(
            "2".parse::<RationalK>().unwrap(),
            RationalK::integer(2).unwrap()
        );
        assert!("1.5".parse::<RationalK>().is_err());
        assert!("0/3".parse::<RationalK>().is_err());
        assert_eq!(k.to_string(), "3/2");
    }

    #[test]
    fn params_reject_nonpositive_omega() {
        let k = RationalK::integer(1).unwrap();
        assert!(SystemParams::new(k, -1.0, 1.0, 0.0).is_err());
        assert!(SystemParams::new(k, -1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn chart_examples() {
        let p = to_modified_polar(&PhasePoint::cartesian(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(p.to_array(), [1.0, 1.0, 0.0, 0.0]);
        let p = to_modified_polar(&PhasePoint::cartesian(1.0, 0.0, 2.0, 0.0)).unwrap();
        assert_eq!(p.to_array(), [1.0, 1.0, 1.0, 0.0]);
        let p = to_modified_polar(&PhasePoint::cartesian(2.5, 1.5, 0.0, 0.0)).unwrap();
        assert_eq!(p.to_array(), [4.0, 4.0, 0.0, 0.0]);

        let c = to_cartesian(&PhasePoint::polar(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(c.to_array(), [1.0, 0.0, 0.0, 0.0]);
        let c = to_cartesian(&PhasePoint::polar(4.0, 4.0, 0.0, 0.0)).unwrap();
        assert_eq!(c.to_array(), [2.5, 1.5, 0.0, 0.0]);

        let x = PhasePoint::polar(2.1711, 5.6458, 0.3, -0.2);
        let back = to_modified_polar(&to_cartesian(&x).unwrap()).unwrap();
        for (a, b) in x.to_array().iter().zip(back.to_array()) {
            assert!(close(*a, b, 1e-12));
        }
    }

    #[test]
    fn chart_errors() {
        assert!(matches!(
            to_modified_polar(&PhasePoint::cartesian(1.0, 1.0, 0.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(to_cartesian(&PhasePoint::polar(1.0, -1.0, 0.0, 0.0)).is_err());
        assert!(to_cartesian(&PhasePoint::polar(0.0, 1.0, 0.0, 0.0)).is_err());
        assert!(to_cartesian(&PhasePoint::cartesian(1.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        let params = fig1(RationalK::integer(1).unwrap());
        let h = hamiltonian(&params, &PhasePoint::polar(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert!((h - 13.0).abs() < 1e-14);
        let h = hamiltonian(&params, &PhasePoint::cartesian(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert!((h - 13.0).abs() < 1e-14);
        let free = SystemParams::new(RationalK::integer(1).unwrap(), 0.0, 0.0, 1.0).unwrap();
        for sigma in [-3.0, 0.2, 7.0] {
            let h = hamiltonian(&free, &PhasePoint::polar(1.0, sigma, 0.0, 0.0)).unwrap();
            assert_eq!(h, 1.0);
        }
        assert!(hamiltonian(&params, &PhasePoint::polar(1.0, -1.0, 0.0, 0.0)).is_err());
        let a = separation_constant(&params, &PhasePoint::polar(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(a, -4.0);
    }

    #[test]
    fn kinetic_energy_transforms() {
        // p_u² - p_v² = 4ρ p_ρ² - 4(σ²/ρ) p_σ²
        let c = PhasePoint::cartesian(1.3, 0.4, 0.7, -1.1);
        let p = to_modified_polar(&c).unwrap();
        let lhs = c.p1 * c.p1 - c.p2 * c.p2;
        let rhs = 4.0 * p.q1 * p.p1 * p.p1 - 4.0 * p.q2 * p.q2 / p.q1 * p.p2 * p.p2;
        assert!(close(lhs, rhs, 1e-13));
    }

    #[test]
    fn ccm_examples() {
        let k = RationalK::integer(1).unwrap();
        let (dc, _) = ccm_map(&SystemParams::new(k, -2.0, 6.0, 3.0).unwrap(), 20.0);
        assert_eq!((dc.coulomb, dc.alpha, dc.beta), (-10.0, -0.5, 1.5));
        let (dc, _) = ccm_map(&SystemParams::new(k, -1.0, 3.0, 4.0).unwrap(), 20.0);
        assert_eq!((dc.coulomb, dc.alpha, dc.beta), (-10.0, -0.25, 0.75));
        let (dc, _) = ccm_map(&SystemParams::new(k, -1.0, 3.0, 4.0).unwrap(), 0.0);
        assert_eq!(dc.coulomb, 0.0);
    }

    /// The solved-for-ω² form of the oscillator equation equals the Coulomb
    /// Hamiltonian under the substitution (checked with a real angular profile
    /// `g(kθ)` standing in for the exponentials; the algebra is identical).
    #[test]
    fn ccm_substitution_identity() {
        let k = RationalK::new(3, 2).unwrap();
        let params = SystemParams::new(k, -1.3, 2.2, 1.7).unwrap();
        let g = |x: f64| x.cos() + 0.3 * (2.0 * x).sin();
        let kv = k.value();
        let energy = 5.5;
        let (dc, sub) = ccm_map(&params, energy);
        for &(r, theta, pr, pth) in &[(0.8, 0.3, 0.4, -1.2), (2.1, 1.1, -0.7, 0.5)] {
            let lhs = (pr * pr + pth * pth / (r * r)) / (r * r) - energy / (r * r)
                + (params.alpha * g(4.0 * kv * theta) + params.beta * g(2.0 * kv * theta))
                    / r.powi(4);
            let rho = sub.radius(r);
            let phi = sub.angle(theta);
            let (p_rho, p_phi) = sub.momenta(r, pr, pth);
            let rhs = p_rho * p_rho
                + p_phi * p_phi / (rho * rho)
                + dc.coulomb / rho
                + (dc.alpha * g(2.0 * kv * phi) + dc.beta * g(kv * phi)) / (rho * rho);
            assert!(close(lhs, rhs, 1e-13), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn embedding_examples() {
        let spec = SeparableSpec::new(
            |q| q * q,
            |q: f64| 1.0 / q.sin().powi(2),
            MetricFactor::InverseSquare,
        );
        let same = embed_parameter(&spec, 1.0).unwrap();
        let ttw = embed_parameter(&spec, 2.0).unwrap();
        for q in [0.3, 0.7, 1.2] {
            assert_eq!((same.f2)(q), (spec.f2)(q));
            assert_eq!((same.f1)(q), (spec.f1)(q));
            assert!(close((ttw.f2)(q), 4.0 / (2.0 * q).sin().powi(2), 1e-14));
        }
        let osc = SeparableSpec::new(|_| 0.0, |q| q * q, MetricFactor::ConstantOne);
        let caged = embed_parameter(&osc, 3.0).unwrap();
        assert!(close((caged.f2)(0.7), 81.0 * 0.49, 1e-14));
        assert_eq!(caged.psi, MetricFactor::ConstantOne);
        assert!(embed_parameter(&osc, 0.0).is_err());
        assert!(embed_parameter(&osc, -1.0).is_err());
    }

    /// The embedded family still separates: X is conserved under the flow of H
    /// (checked via the Poisson bracket {X, H} = 0 by central differences).
    #[test]
    fn embedded_family_separates() {
        let spec = SeparableSpec::new(
            |q| 0.5 * q * q,
            |q: f64| 1.0 / q.sin().powi(2),
            MetricFactor::InverseSquare,
        );
        let fam = embed_parameter(&spec, 2.5).unwrap();
        let x = [1.3, 0.4, 0.2, -0.6];
        let h = |y: [f64; 4]| fam.hamiltonian(y[0], y[1], y[2], y[3]);
        let xf = |y: [f64; 4]| fam.separated_integral(y[1], y[3]);
        let d = |f: &dyn Fn([f64; 4]) -> f64, i: usize| {
            let e = 1e-6;
            let mut a = x;
            let mut b = x;
            a[i] += e;
            b[i] -= e;
            (f(a) - f(b)) / (2.0 * e)
        };
        let bracket = (0..2)
            .map(|i| d(&xf, i) * d(&h, i + 2) - d(&xf, i + 2) * d(&h, i))
            .sum::<f64>();
        assert!(bracket.abs() < 1e-6, "{bracket}");
    }

    fn central_jacobian(x: [f64; 4]) -> [[f64; 4]; 4] {
        let f = |y: [f64; 4]| {
            to_modified_polar(&PhasePoint::from_array(Chart::Cartesian, y))
                .unwrap()
                .to_array()
        };
        let mut jac = [[0.0; 4]; 4];
        for j in 0..4 {
            let h = 1e-4 * (1.0 + x[j].abs());
            let diff = |h: f64| {
                let mut a = x;
                let mut b = x;
                a[j] += h;
                b[j] -= h;
                let (fa, fb) = (f(a), f(b));
                std::array::from_fn::<f64, 4, _>(|i| (fa[i] - fb[i]) / (2.0 * h))
            };
            let (d1, d2) = (diff(h), diff(h / 2.0));
            for i in 0..4 {
                jac[i][j] = (4.0 * d2[i] - d1[i]) / 3.0;
            }
        }
        jac
    }

    proptest! {
        #[test]
        fn roundtrip_on_principal_sheet(
            rho in 0.05f64..10.0, sigma in 0.05f64..10.0,
            pr in -3.0f64..3.0, ps in -3.0f64..3.0,
        ) {
            let x = PhasePoint::polar(rho, sigma, pr, ps);
            let back = to_modified_polar(&to_cartesian(&x).unwrap()).unwrap();
            for (a, b) in x.to_array().iter().zip(back.to_array()) {
                prop_assert!(close(*a, b, 1e-12), "{a} vs {b}");
            }
        }

        #[test]
        fn hamiltonian_is_chart_invariant(
            rho in 0.05f64..10.0, sigma in 0.05f64..10.0,
            pr in -3.0f64..3.0, ps in -3.0f64..3.0,
            alpha in -4.0f64..-0.1, beta in 0.1f64..8.0, omega in 0.2f64..4.0,
            p in 1u32..4, q in 1u32..4,
        ) {
            let params = SystemParams::new(RationalK::new(p, q).unwrap(), alpha, beta, omega).unwrap();
            let x = PhasePoint::polar(rho, sigma, pr, ps);
            let h1 = hamiltonian(&params, &x).unwrap();
            let h2 = hamiltonian(&params, &to_cartesian(&x).unwrap()).unwrap();
            prop_assert!((h1 - h2).abs() < 1e-10 * h1.abs().max(1.0), "{h1} vs {h2}");
        }

        #[test]
        fn transform_is_symplectic(
            rho in 0.2f64..5.0, sigma in 0.2f64..5.0,
            pr in -2.0f64..2.0, ps in -2.0f64..2.0,
        ) {
            let c = to_cartesian(&PhasePoint::polar(rho, sigma, pr, ps)).unwrap().to_array();
            let j = central_jacobian(c);
            // Ω = [[0, I], [-I, 0]]; check Jᵀ Ω J = Ω.
            let omega = |i: usize, k: usize| -> f64 {
                match (i, k) {
                    (0, 2) | (1, 3) => 1.0,
                    (2, 0) | (3, 1) => -1.0,
                    _ => 0.0,
                }
            };
            for a in 0..4 {
                for b in 0..4 {
                    let mut s = 0.0;
                    for i in 0..4 {
                        for k in 0..4 {
                            s += j[i][a] * omega(i, k) * j[k][b];
                        }
                    }
                    prop_assert!((s - omega(a, b)).abs() < 1e-9, "({a},{b}) = {s}");
                }
            }
        }
    }
}
