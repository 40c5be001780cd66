//! Hamiltonian flow of the family.
//!
//! Trajectories are generated numerically; the closed-form radial motion and
//! the Chebyshev curve are used as checks on the result.

pub mod curve;
pub mod ode;
mod oscillator;
mod period;

pub use curve::{
    curve_constants, curve_residual, curve_residual_expanded, rho_bounds, rho_closed_form,
    sigma_bounds, CurveConstants,
};
pub use oscillator::{oscillator_trajectory, OscillatorState};
pub use period::{find_period, DEFAULT_PERIOD_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{chebyshev_combination, extra_integral, phase_invariants};
use crate::model::{hamiltonian, separation_constant, Chart, PhasePoint, SystemParams};
use ode::{DenseSolution, State};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const MIN_REL_TOL: f64 = 1e-13;
pub const MAX_REL_TOL: f64 = 1e-6;

fn polar_rhs(params: &SystemParams, y: &State) -> Result<State> {
    let [rho, sigma, pr, ps] = *y;
    let w2 = params.omega * params.omega;
    let (pot, dpot) = if params.is_free() {
        if rho == 0.0 {
            return Err(Error::Domain("rho = 0".into()));
        }
        (0.0, 0.0)
    } else {
        if !(rho > 0.0 && sigma > 0.0) {
            return Err(Error::Domain(format!(
                "rho = {rho}, sigma = {sigma} outside rho, sigma > 0"
            )));
        }
        (
            params.angular_potential(sigma),
            params.angular_potential_deriv(sigma),
        )
    };
    let s2 = sigma * sigma;
    Ok([
        8.0 * rho * pr,
        -8.0 * s2 / rho * ps,
        -(4.0 * pr * pr + 4.0 * s2 * ps * ps / (rho * rho) + w2 - pot / (rho * rho)),
        -(-8.0 * sigma * ps * ps / rho + dpot / rho),
    ])
}

fn cartesian_rhs(params: &SystemParams, y: &State) -> Result<State> {
    let [u, v, pu, pv] = *y;
    let w2 = params.omega * params.omega;
    let (mut fu, mut fv) = (2.0 * w2 * u, -2.0 * w2 * v);
    if !params.is_free() {
        let d = u - v;
        let rho = d * (u + v);
        let sigma = (u + v) / d;
        if !(d != 0.0 && rho > 0.0 && sigma > 0.0) {
            return Err(Error::Domain(format!(
                "u = {u}, v = {v} outside u^2 > v^2, (u+v)/(u-v) > 0"
            )));
        }
        let pot = params.angular_potential(sigma);
        let dpot = params.angular_potential_deriv(sigma);
        let d2 = d * d;
        fu += dpot * (-2.0 * v / d2) / rho - pot * 2.0 * u / (rho * rho);
        fv += dpot * (2.0 * u / d2) / rho + pot * 2.0 * v / (rho * rho);
    }
    Ok([2.0 * pu, -2.0 * pv, -fu, -fv])
}

/// Hamilton's equations `(q1', q2', p1', p2')` in the chart of `point`.
pub fn equations_of_motion(params: &SystemParams, point: &PhasePoint) -> Result<[f64; 4]> {
    let y = point.to_array();
    match point.chart {
        Chart::ModifiedPolar => polar_rhs(params, &y),
        Chart::Cartesian => cartesian_rhs(params, &y),
    }
}

pub(crate) fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(MIN_REL_TOL..=MAX_REL_TOL).contains(&rel_tol) {
        return Err(Error::InvalidArgument(format!(
            "rel_tol must lie in [{MIN_REL_TOL:e}, {MAX_REL_TOL:e}], got {rel_tol:e}"
        )));
    }
    Ok(())
}

/// Raw dense flow from `initial` over `[0, t_end]` in the chart of `initial`.
pub fn flow(
    params: &SystemParams,
    initial: &PhasePoint,
    t_end: f64,
    rel_tol: f64,
) -> Result<DenseSolution> {
    let chart = initial.chart;
    let y0 = initial.to_array();
    let scale = y0.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let atol = rel_tol * scale * 1e-2;
    let p = *params;
    match chart {
        Chart::ModifiedPolar => ode::integrate(|y| polar_rhs(&p, y), y0, t_end, rel_tol, atol),
        Chart::Cartesian => ode::integrate(|y| cartesian_rhs(&p, y), y0, t_end, rel_tol, atol),
    }
}

/// Flow by a signed time. Negative times use the reversal symmetry
/// `H(q, -p) = H(q, p)`.
pub fn flow_signed(
    params: &SystemParams,
    point: &PhasePoint,
    dt: f64,
    rel_tol: f64,
) -> Result<PhasePoint> {
    if dt == 0.0 {
        return Ok(*point);
    }
    let flip = |p: &PhasePoint| PhasePoint {
        p1: -p.p1,
        p2: -p.p2,
        ..*p
    };
    let start = if dt > 0.0 { *point } else { flip(point) };
    let end = PhasePoint::from_array(
        point.chart,
        flow(params, &start, dt.abs(), rel_tol)?.final_state(),
    );
    Ok(if dt > 0.0 { end } else { flip(&end) })
}

/// Monitored quantities at one instant. Undefined values are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub point: PhasePoint,
    pub h: f64,
    pub a_phase: f64,
    pub l: f64,
    pub curve_residual: f64,
}

/// Integrated trajectory: dense solution plus samples at every accepted step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: SystemParams,
    pub chart: Chart,
    pub samples: Vec<TrajectorySample>,
    /// `cos C_k` the curve residual is measured against.
    pub reference_cos_c: Option<f64>,
    pub solution: DenseSolution,
}

fn measure(
    params: &SystemParams,
    t: f64,
    point: PhasePoint,
    cos_c: Option<f64>,
) -> TrajectorySample {
    let h = hamiltonian(params, &point).unwrap_or(f64::NAN);
    let a_phase = separation_constant(params, &point).unwrap_or(f64::NAN);
    let (l, curve_residual) = if params.is_bounded_regime() {
        let l = extra_integral(params, &point).unwrap_or(f64::NAN);
        let r = match (phase_invariants(params, &point), cos_c) {
            (Ok(iv), Some(c)) => {
                c - chebyshev_combination(params.k.p(), params.k.q(), iv.z, iv.w, iv.sqrt_term)
            }
            _ => f64::NAN,
        };
        (l, r)
    } else {
        (f64::NAN, f64::NAN)
    };
    TrajectorySample {
        t,
        point,
        h,
        a_phase,
        l,
        curve_residual,
    }
}

impl Trajectory {
    pub fn state_at(&self, t: f64) -> PhasePoint {
        PhasePoint::from_array(self.chart, self.solution.state_at(t))
    }

    pub fn t_end(&self) -> f64 {
        self.solution.t_end
    }

    /// Samples on the uniform grid `0, dt, 2dt, …` (the end point included).
    pub fn resample(&self, dt: f64) -> Result<Vec<TrajectorySample>> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dt_out must be positive, got {dt}"
            )));
        }
        let t_end = self.t_end();
        let n = (t_end / dt * (1.0 + 1e-12)).floor() as usize;
        let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        if t_end - times[n] > 1e-9 * dt {
            times.push(t_end);
        }
        Ok(times
            .into_iter()
            .map(|t| measure(&self.params, t, self.state_at(t), self.reference_cos_c))
            .collect())
    }

    /// `max |f(t) - f(0)| / |f(0)|` over the stored samples.
    pub fn max_relative_drift(&self, f: impl Fn(&TrajectorySample) -> f64) -> f64 {
        let f0 = f(&self.samples[0]);
        self.samples
            .iter()
            .map(|s| (f(s) - f0).abs())
            .fold(0.0, f64::max)
            / f0.abs()
    }

    pub fn max_abs_curve_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.curve_residual.abs())
            .fold(0.0, f64::max)
    }
}

/// Integrates from `initial` over `[0, t_end]`; the curve residual is taken
/// relative to the Chebyshev bracket at `t = 0`.
pub fn integrate(
    params: &SystemParams,
    initial: &PhasePoint,
    t_end: f64,
    rel_tol: f64,
) -> Result<Trajectory> {
    integrate_with_reference(params, initial, t_end, rel_tol, None)
}

/// As [`integrate`], measuring the curve residual against a given `cos C_k`.
pub fn integrate_with_reference(
    params: &SystemParams,
    initial: &PhasePoint,
    t_end: f64,
    rel_tol: f64,
    reference_cos_c: Option<f64>,
) -> Result<Trajectory> {
    check_rel_tol(rel_tol)?;
    equations_of_motion(params, initial)?;
    let solution = flow(params, initial, t_end, rel_tol)?;
    let reference = reference_cos_c.or_else(|| {
        if !params.is_bounded_regime() {
            return None;
        }
        phase_invariants(params, initial)
            .ok()
            .map(|iv| chebyshev_combination(params.k.p(), params.k.q(), iv.z, iv.w, iv.sqrt_term))
    });
    let chart = initial.chart;
    let mut samples = vec![measure(params, 0.0, *initial, reference)];
    for step in &solution.steps {
        let t = step.end();
        samples.push(measure(
            params,
            t,
            PhasePoint::from_array(chart, step.eval(t)),
            reference,
        ));
    }
    Ok(Trajectory {
        params: *params,
        chart,
        samples,
        reference_cos_c: reference,
        solution,
    })
}

/// Phase point at `t = 0` of the orbit described by `consts`.
///
/// At `t = -δ1` the orbit sits at the outer radial turning point (`Z = 1`,
/// `p_ρ = 0`), where the curve forces `W = cos(C_k / q)`; `p_σ` is taken
/// positive. That point is then flowed by `δ1`.
pub fn initial_state(params: &SystemParams, consts: &CurveConstants) -> Result<PhasePoint> {
    let q = params.k.q() as f64;
    let k = params.k_value();
    let w0 = (consts.c_k / q).cos();
    let inv_sk = (w0 * consts.d2.sqrt() - params.beta) / (2.0 * consts.separation);
    if !(inv_sk > 0.0) {
        return Err(Error::Regime(format!(
            "sigma^-k = {inv_sk} must be positive"
        )));
    }
    let sigma = inv_sk.powf(-1.0 / k);
    let radicand = (consts.separation + params.angular_potential(sigma)) / (4.0 * sigma * sigma);
    let p_sigma = radicand.max(0.0).sqrt();
    let turning = PhasePoint::polar(consts.rho2, sigma, 0.0, p_sigma);
    flow_signed(params, &turning, consts.delta1, 1e-13)
}

/// Integrates the orbit of `consts` from its [`initial_state`], measuring
/// the curve residual against `cos C_k`.
pub fn integrate_orbit(
    params: &SystemParams,
    consts: &CurveConstants,
    t_end: f64,
    rel_tol: f64,
) -> Result<Trajectory> {
    let start = initial_state(params, consts)?;
    integrate_with_reference(params, &start, t_end, rel_tol, Some(consts.cos_c()))
}

/// Radial period `π/(2ω)`.
pub fn radial_period(omega: f64) -> f64 {
    std::f64::consts::PI / (2.0 * omega)
}

/// Phase `δ1` of the closed-form `ρ(t)` matching a phase point at `t = 0`.
pub fn fit_delta1(params: &SystemParams, point: &PhasePoint) -> Result<f64> {
    let iv = phase_invariants(params, point)?;
    let (rho, pr) = (point.q1, point.p1);
    let w = params.omega;
    let r = iv.d1.sqrt();
    let c = (2.0 * w * w * rho - iv.h) / r;
    let s = -4.0 * w * rho * pr / r;
    Ok(s.atan2(c) / (4.0 * w))
}
