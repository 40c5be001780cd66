//! Ladder operators built from Laguerre shift relations.
//!
//! With `f_n^a(x) = e^{-x/2} x^{a/2} L_n^a(x)`:
//!
//! ```text
//! [(1+a)∂ + (2n+a+1)/2 - a(1+a)/(2x)] f_n^a = -f_{n-1}^{a+2}
//! [(1-a)∂ + (2n+a+1)/2 - a(a-1)/(2x)] f_n^a = -(n+1)(n+a) f_{n+1}^{a-2}
//! ```
//!
//! On `R_{m,λ} = f_m^λ(ξ)` the constant is `E/(4ω)`; on `S_n = f_n^μ(η)` it is
//! `β/(4k√(-α))`. So `K_{+λ}` sends `(m, λ)` to `(m-1, λ+2)` and `K_{-λ}` to
//! `(m+1, λ-2)`, both at fixed `E`; `J_{±μ}` shift `n` the same way.
//! Functions are carried as derivative jets so that operators compose.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{wavefunction_r, wavefunction_s, SpectrumData};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::specfun::{binomial, falling_factorial, laguerre, laguerre_nth_deriv, laguerre_signed};

/// A function on `(0, ∞)` with exact derivatives.
pub trait Jet: Send + Sync {
    /// `[f(x), f'(x), …, f^{(order)}(x)]`.
    fn jet(&self, x: f64, order: usize) -> Vec<f64>;

    fn value(&self, x: f64) -> f64 {
        self.jet(x, 0)[0]
    }
}

/// `scale · e^{-x/2} x^{a/2} L_n^a(x)`; identically zero for `n < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreFunction {
    pub n: i64,
    pub a: f64,
    pub scale: f64,
}

impl LaguerreFunction {
    pub fn new(n: i64, a: f64) -> Self {
        Self { n, a, scale: 1.0 }
    }
}

impl Jet for LaguerreFunction {
    fn jet(&self, x: f64, order: usize) -> Vec<f64> {
        if self.n < 0 {
            return vec![0.0; order + 1];
        }
        let n = self.n as usize;
        let s = 0.5 * self.a;
        let base = (-0.5 * x + s * x.ln()).exp();
        // g^{(j)} / base = Σ_i C(j,i) (-1/2)^{j-i} s^{(i)} x^{-i}
        let g: Vec<f64> = (0..=order)
            .map(|j| {
                (0..=j)
                    .map(|i| {
                        binomial(j as u64, i as u64)
                            * (-0.5f64).powi((j - i) as i32)
                            * falling_factorial(s, i)
                            / x.powi(i as i32)
                    })
                    .sum::<f64>()
                    * base
            })
            .collect();
        let l: Vec<f64> = (0..=order)
            .map(|i| laguerre_nth_deriv(n, self.a, x, i))
            .collect();
        (0..=order)
            .map(|j| {
                self.scale
                    * (0..=j)
                        .map(|i| binomial(j as u64, i as u64) * g[j - i] * l[i])
                        .sum::<f64>()
            })
            .collect()
    }
}

/// `d ∂_x + c + e/x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderOperator {
    pub d: f64,
    pub c: f64,
    pub e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LadderKind {
    KPlus,
    KMinus,
    JPlus,
    JMinus,
}

impl LadderOperator {
    /// `(1 ± λ)∂_ξ + E/(4ω) ∓ λ(1 ± λ)/(2ξ)`.
    pub fn k(plus: bool, lambda: f64, energy: f64, omega: f64) -> Self {
        Self::shift(plus, lambda, energy / (4.0 * omega))
    }

    /// `(1 ± μ)∂_η + β/(4k√(-α)) ∓ μ(1 ± μ)/(2η)`, `μ = √(-A)/k`.
    pub fn j(plus: bool, mu: f64, params: &SystemParams) -> Self {
        Self::shift(
            plus,
            mu,
            params.beta / (4.0 * params.k_value() * (-params.alpha).sqrt()),
        )
    }

    fn shift(plus: bool, a: f64, c: f64) -> Self {
        let sg = if plus { 1.0 } else { -1.0 };
        Self {
            d: 1.0 + sg * a,
            c,
            e: -sg * a * (1.0 + sg * a) / 2.0,
        }
    }

    pub fn apply(self, f: Arc<dyn Jet>) -> Arc<dyn Jet> {
        Arc::new(Applied { op: self, inner: f })
    }
}

struct Applied {
    op: LadderOperator,
    inner: Arc<dyn Jet>,
}

impl Jet for Applied {
    fn jet(&self, x: f64, order: usize) -> Vec<f64> {
        let f = self.inner.jet(x, order + 1);
        let LadderOperator { d, c, e } = self.op;
        (0..=order)
            .map(|j| {
                // (f/x)^{(j)} = Σ_i C(j,i) (-1)^i i! x^{-i-1} f^{(j-i)}
                let fx: f64 = (0..=j)
                    .map(|i| {
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        binomial(j as u64, i as u64) * sign * falling_factorial(i as f64, i)
                            / x.powi(i as i32 + 1)
                            * f[j - i]
                    })
                    .sum();
                d * f[j + 1] + c * f[j] + e * fx
            })
            .collect()
    }
}

/// Applies one ladder operator. `index` is `λ` for `K` and `μ` for `J`;
/// `energy` is only used by `K`.
pub fn ladder_apply(
    kind: LadderKind,
    params: &SystemParams,
    index: f64,
    energy: f64,
    f: Arc<dyn Jet>,
) -> Arc<dyn Jet> {
    let op = match kind {
        LadderKind::KPlus => LadderOperator::k(true, index, energy, params.omega),
        LadderKind::KMinus => LadderOperator::k(false, index, energy, params.omega),
        LadderKind::JPlus => LadderOperator::j(true, index, params),
        LadderKind::JMinus => LadderOperator::j(false, index, params),
    };
    op.apply(f)
}

/// Residuals `lhs - rhs` of the four base relations at `(n, a, x)`:
/// `∂L_n^a = -L_{n-1}^{a+1}`, `[x∂ + a - x]L_n^a = (n+1)L_{n+1}^{a-1}`,
/// `[x∂ + a]L_n^a = (n+a)L_n^{a-1}`, `[∂ - 1]L_n^a = -L_n^{a+1}`.
/// Each is divided by `max(1, |terms|)`.
pub fn laguerre_relation_residuals(n: usize, a: f64, x: f64) -> [f64; 4] {
    let nf = n as f64;
    let l = laguerre(n, a, x);
    // derivative from the series, independent of the identity under test
    let dl = numeric_free_derivative(n, a, x);
    let rel = |lhs: f64, rhs: f64, terms: &[f64]| {
        let scale = terms.iter().fold(1.0f64, |m, t| m.max(t.abs()));
        (lhs - rhs) / scale
    };
    [
        rel(dl, -laguerre_signed(n as i64 - 1, a + 1.0, x), &[dl]),
        rel(
            x * dl + (a - x) * l,
            (nf + 1.0) * laguerre(n + 1, a - 1.0, x),
            &[x * dl, a * l, x * l],
        ),
        rel(
            x * dl + a * l,
            (nf + a) * laguerre(n, a - 1.0, x),
            &[x * dl, a * l],
        ),
        rel(dl - l, -laguerre(n, a + 1.0, x), &[dl, l]),
    ]
}

/// `d/dx L_n^a` by differentiating the explicit power series.
fn numeric_free_derivative(n: usize, a: f64, x: f64) -> f64 {
    // L_n^a(x) = Σ_j (-1)^j C(n+a, n-j) x^j / j!
    (1..=n)
        .map(|j| {
            let c: f64 = (1..=n - j)
                .map(|i| (a + j as f64 + i as f64) / i as f64)
                .product();
            let fact: f64 = (1..j).map(|i| i as f64).product();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * c * x.powi(j as i32 - 1) / fact
        })
        .sum()
}

/// Residuals of the two conjugated ladder identities at `(n, a, x)`,
/// relative to `max(1, |rhs|)`.
pub fn ladder_identity_residuals(n: usize, a: f64, x: f64) -> [f64; 2] {
    let nf = n as f64;
    let f: Arc<dyn Jet> = Arc::new(LaguerreFunction::new(n as i64, a));
    let c = (2.0 * nf + a + 1.0) / 2.0;
    let minus = LadderOperator::shift(true, a, c).apply(f.clone()).value(x);
    let plus = LadderOperator::shift(false, a, c).apply(f).value(x);
    let rhs_m = -LaguerreFunction::new(n as i64 - 1, a + 2.0).value(x);
    let rhs_p = -(nf + 1.0) * (nf + a) * LaguerreFunction::new(n as i64 + 1, a - 2.0).value(x);
    [
        (minus - rhs_m) / rhs_m.abs().max(1.0),
        (plus - rhs_p) / rhs_p.abs().max(1.0),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftDirection {
    /// `(m, n) → (m - p, n - q)` with `K_{+}^p`, `J_{+}^q`.
    Lower,
    /// `(m, n) → (m + p, n + q)` with `K_{-}^p`, `J_{-}^q`.
    Raise,
}

/// `E_{m,n} - E_{m',n'} = 2ω(2(m - m') - 2k(n - n'))`, evaluated with the
/// integer part `2q(m - m') - 2p(n - n')` first so that degenerate pairs give
/// exactly zero.
pub fn energy_difference(params: &SystemParams, a: (usize, usize), b: (usize, usize)) -> f64 {
    let (p, q) = (params.k.p() as i64, params.k.q() as i64);
    let dm = a.0 as i64 - b.0 as i64;
    let dn = a.1 as i64 - b.1 as i64;
    let num = 2 * q * dm - 2 * p * dn;
    2.0 * params.omega * num as f64 / q as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub direction: ShiftDirection,
    /// Closed-form `E_from - E_to`.
    pub energy_gap: f64,
    /// Mean of `(K^p R_from) / R_to` over the sample points.
    pub k_ratio: f64,
    /// `(max - min)/|mean|` of that ratio.
    pub k_variation: f64,
    pub k_expected: f64,
    pub j_ratio: f64,
    pub j_variation: f64,
    pub j_expected: f64,
    pub samples: usize,
}

impl DegeneracyReport {
    pub fn max_error(&self) -> f64 {
        let rel = |r: f64, e: f64| (r - e).abs() / e.abs();
        self.energy_gap
            .abs()
            .max(self.k_variation)
            .max(self.j_variation)
            .max(rel(self.k_ratio, self.k_expected))
            .max(rel(self.j_ratio, self.j_expected))
    }
}

fn chain(
    kind_plus: bool,
    steps: usize,
    start: f64,
    apply: impl Fn(bool, f64, Arc<dyn Jet>) -> Arc<dyn Jet>,
    f: Arc<dyn Jet>,
) -> Arc<dyn Jet> {
    let mut g = f;
    for j in 0..steps {
        let idx = if kind_plus {
            start + 2.0 * j as f64
        } else {
            start - 2.0 * j as f64
        };
        g = apply(kind_plus, idx, g);
    }
    g
}

/// Expected factor of a `steps`-fold chain starting at degree `deg`,
/// parameter `a`.
fn chain_factor(plus: bool, steps: usize, deg: usize, a: f64) -> f64 {
    (0..steps)
        .map(|j| {
            if plus {
                -1.0
            } else {
                let d = (deg + j) as f64;
                -(d + 1.0) * (d + a - 2.0 * j as f64)
            }
        })
        .product()
}

fn ratio_stats(num: &dyn Jet, den: impl Fn(f64) -> f64, xs: &[f64]) -> (f64, f64, usize) {
    let vals: Vec<(f64, f64)> = xs.iter().map(|&x| (num.value(x), den(x))).collect();
    let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.1.abs()));
    // skip points near nodes of the partner, where the ratio is ill-conditioned
    let ratios: Vec<f64> = vals
        .iter()
        .filter(|v| v.1.abs() > 1e-3 * peak)
        .map(|v| v.0 / v.1)
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (mean, (hi - lo) / mean.abs(), ratios.len())
}

/// Checks the energy degeneracy between `(m, n)` and its partner shifted by
/// `(p, q)`, and that `K^p` and `J^q` map the two factors of the wavefunction
/// onto the partner's factors up to a constant.
pub fn degeneracy_map_check(
    spectrum: &SpectrumData,
    m: usize,
    n: usize,
    direction: ShiftDirection,
) -> Result<DegeneracyReport> {
    let params = &spectrum.params;
    let (p, q) = (params.k.p() as usize, params.k.q() as usize);
    let to = match direction {
        ShiftDirection::Lower if m >= p && n >= q => (m - p, n - q),
        ShiftDirection::Raise if n + q <= spectrum.n_max => (m + p, n + q),
        _ => return Err(Error::OutOfRange(format!(
            "partner of ({m}, {n}) under {direction:?} by ({p}, {q}) is not a bound state (N = {})",
            spectrum.n_max
        ))),
    };
    let plus = direction == ShiftDirection::Lower;
    let from_level = spectrum.level(m, n)?;
    let to_level = spectrum.level(to.0, to.1)?;
    let energy = from_level.energy;
    let lam = from_level.sqrt_minus_a;
    let mu = spectrum.mu(n);

    let xs: Vec<f64> = (0..24).map(|i| 0.2 * 1.2f64.powi(i)).collect();

    let r: Arc<dyn Jet> = Arc::new(LaguerreFunction::new(m as i64, lam));
    let kr = chain(
        plus,
        p,
        lam,
        |pl, idx, g| LadderOperator::k(pl, idx, energy, params.omega).apply(g),
        r,
    );
    let (k_ratio, k_variation, nk) = ratio_stats(
        kr.as_ref(),
        |x| wavefunction_r(to.0, to_level.sqrt_minus_a, x),
        &xs,
    );

    let s: Arc<dyn Jet> = Arc::new(LaguerreFunction::new(n as i64, mu));
    let js = chain(
        plus,
        q,
        mu,
        |pl, idx, g| LadderOperator::j(pl, idx, params).apply(g),
        s,
    );
    let (j_ratio, j_variation, nj) = ratio_stats(
        js.as_ref(),
        |x| wavefunction_s(spectrum, to.1, x).unwrap_or(f64::NAN),
        &xs,
    );

    Ok(DegeneracyReport {
        from: (m, n),
        to,
        direction,
        energy_gap: energy_difference(params, (m, n), to),
        k_ratio,
        k_variation,
        k_expected: chain_factor(plus, p, m, lam),
        j_ratio,
        j_variation,
        j_expected: chain_factor(plus, q, n, mu),
        samples: nk.min(nj),
    })
}
