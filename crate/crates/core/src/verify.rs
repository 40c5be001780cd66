//! Seeded invariant suites, each reduced to `{suite, cases, max_error, pass}`.

use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::classical::{
    curve_residual_expanded, find_period, initial_state, integrate_orbit, oscillator_trajectory,
    radial_period, rho_bounds, sigma_bounds, DEFAULT_PERIOD_TOL,
};
use crate::error::{Error, Result};
use crate::invariants::{extra_integral, gradient, norm, phase_invariants, DEFAULT_FD_STEP};
use crate::model::{
    hamiltonian, to_cartesian, to_modified_polar, PhasePoint, RationalK, SystemParams,
};
use crate::presets::PRESETS;
use crate::quantum::ladder::{ladder_identity_residuals, laguerre_relation_residuals};
use crate::quantum::quadrature::max_off_diagonal;
use crate::quantum::{
    bessel_ode_witness, bessel_representation_check, degeneracy_map_check, energy_difference,
    energy_explicit, gram_matrix_s, schrodinger_residual, spectrum, ShiftDirection,
};
use crate::specfun::{bessel_poly_derivs, chebyshev_t, chebyshev_u, laguerre};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub max_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Specfun,
    Charts,
    Conservation,
    Curve,
    Period,
    Poisson,
    Spectrum,
    Schrodinger,
    Orthogonality,
    Bessel,
    Ladder,
    Oscillator,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Specfun,
        Suite::Charts,
        Suite::Conservation,
        Suite::Curve,
        Suite::Period,
        Suite::Poisson,
        Suite::Spectrum,
        Suite::Schrodinger,
        Suite::Orthogonality,
        Suite::Bessel,
        Suite::Ladder,
        Suite::Oscillator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Charts => "charts",
            Suite::Conservation => "conservation",
            Suite::Curve => "curve",
            Suite::Period => "period",
            Suite::Poisson => "poisson",
            Suite::Spectrum => "spectrum",
            Suite::Schrodinger => "schrodinger",
            Suite::Orthogonality => "orthogonality",
            Suite::Bessel => "bessel",
            Suite::Ladder => "ladder",
            Suite::Oscillator => "oscillator",
        }
    }

    pub fn run(self, seed: u64) -> SuiteReport {
        let mut rng =
            StdRng::seed_from_u64(seed ^ (self as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let (cases, err, tol) = match self {
            Suite::Specfun => specfun_suite(&mut rng),
            Suite::Charts => charts_suite(&mut rng),
            Suite::Conservation => conservation_suite(),
            Suite::Curve => curve_suite(),
            Suite::Period => period_suite(),
            Suite::Poisson => poisson_suite(&mut rng),
            Suite::Spectrum => spectrum_suite(&mut rng),
            Suite::Schrodinger => schrodinger_suite(),
            Suite::Orthogonality => orthogonality_suite(),
            Suite::Bessel => bessel_suite(),
            Suite::Ladder => ladder_suite(),
            Suite::Oscillator => oscillator_suite(&mut rng),
        };
        SuiteReport {
            suite: self.name().into(),
            cases,
            max_error: err,
            pass: err.is_finite() && err < tol,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

/// Runs the suites on separate threads; reports come back in input order.
pub fn run_suites(suites: &[Suite], seed: u64) -> Vec<SuiteReport> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = suites
            .iter()
            .map(|&s| scope.spawn(move || s.run(seed)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    })
}

/// Error accumulator; a failed evaluation counts as an infinite error.
#[derive(Default)]
struct Tally {
    cases: usize,
    worst: f64,
}

impl Tally {
    fn add(&mut self, err: f64) {
        self.cases += 1;
        self.worst = if err.is_nan() {
            f64::INFINITY
        } else {
            self.worst.max(err.abs())
        };
    }

    fn add_result(&mut self, r: Result<f64>) {
        self.add(r.unwrap_or(f64::INFINITY));
    }

    /// Adds a ratio `err / tol` so cases with different tolerances can share a
    /// suite with pass threshold 1.
    fn add_scaled(&mut self, err: f64, tol: f64) {
        self.add(err / tol);
    }
}

fn params(p: u32, q: u32, alpha: f64, beta: f64, omega: f64) -> SystemParams {
    SystemParams::new(RationalK::new(p, q).expect("valid k"), alpha, beta, omega)
        .expect("valid params")
}

/// Random bounded-regime parameters with `k = p/q`.
pub fn random_params(rng: &mut impl Rng, p: u32, q: u32) -> SystemParams {
    params(
        p,
        q,
        -rng.gen_range(0.5..3.0),
        rng.gen_range(2.0..8.0),
        rng.gen_range(1.0..4.0),
    )
}

/// Random constants `(E, A)` strictly inside the bounded regime.
pub fn random_constants(rng: &mut impl Rng, params: &SystemParams) -> (f64, f64) {
    let a_max = params.beta * params.beta / (4.0 * params.alpha.abs());
    let a = -rng.gen_range(0.1..0.9) * a_max;
    // E² > -4ω²A with margin
    let e_min = 2.0 * params.omega * (-a).sqrt();
    (a, e_min * rng.gen_range(1.1..3.0))
}

/// A phase point on the orbit `(E, A)`: random `ρ ∈ (ρ1, ρ2)`,
/// `σ^{-k}` inside its allowed interval, and random momentum signs.
pub fn sample_orbit_point(
    rng: &mut impl Rng,
    params: &SystemParams,
    energy: f64,
    separation: f64,
) -> Result<PhasePoint> {
    let (r1, r2) = rho_bounds(energy, separation, params.omega)?;
    let (lo, hi) = sigma_bounds(params, separation)?;
    let rho = r1 + (r2 - r1) * rng.gen_range(0.02..0.98);
    let inv = lo + (hi - lo) * rng.gen_range(0.02..0.98);
    let sigma = inv.powf(-1.0 / params.k_value());
    let w2 = params.omega * params.omega;
    let pr = ((energy - w2 * rho + separation / rho) / (4.0 * rho))
        .max(0.0)
        .sqrt();
    let ps = ((separation + params.angular_potential(sigma)) / (4.0 * sigma * sigma))
        .max(0.0)
        .sqrt();
    let sr = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let ss = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    Ok(PhasePoint::polar(rho, sigma, sr * pr, ss * ps))
}

fn specfun_suite(rng: &mut StdRng) -> (usize, f64, f64) {
    let mut t = Tally::default();
    for _ in 0..200 {
        let n = rng.gen_range(0..10usize);
        let a: f64 = rng.gen_range(0.0..6.0);
        let x: f64 = rng.gen_range(0.01..8.0);
        // Laguerre ODE: x L'' + (1 + a - x) L' + n L = 0
        let l0 = laguerre(n, a, x);
        let l1 = if n >= 1 {
            -laguerre(n - 1, a + 1.0, x)
        } else {
            0.0
        };
        let l2 = if n >= 2 {
            laguerre(n - 2, a + 2.0, x)
        } else {
            0.0
        };
        let terms = [x * l2, (1.0 + a - x) * l1, n as f64 * l0];
        let scale = terms.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        t.add_scaled((terms[0] + terms[1] + terms[2]) / scale, 1e-10);

        let th: f64 = rng.gen_range(0.05..3.1);
        let nn = rng.gen_range(0..12usize);
        t.add_scaled(chebyshev_t(nn, th.cos()) - (nn as f64 * th).cos(), 1e-10);
        let u = chebyshev_u(nn as i64, th.cos()) * th.sin() - ((nn + 1) as f64 * th).sin();
        t.add_scaled(u, 1e-10);

        let bn = rng.gen_range(0..6usize);
        let ba: f64 = rng.gen_range(-3.0..4.0);
        let bx: f64 = rng.gen_range(0.1..3.0);
        if let Ok((y, y1, y2)) = bessel_poly_derivs(bn, ba, 1.0, bx) {
            let terms = [
                bx * bx * y2,
                (ba * bx + 1.0) * y1,
                bn as f64 * (bn as f64 + ba - 1.0) * y,
            ];
            let scale = terms.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            t.add_scaled((terms[0] + terms[1] - terms[2]) / scale, 1e-10);
        }
    }
    (t.cases, t.worst, 1.0)
}

fn charts_suite(rng: &mut StdRng) -> (usize, f64, f64) {
    let mut t = Tally::default();
    for _ in 0..200 {
        let (p, q) = (rng.gen_range(1..4), rng.gen_range(1..4));
        let pr = random_params(rng, p, q);
        let x = PhasePoint::polar(
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.2..4.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let r = to_cartesian(&x).and_then(|c| {
            let back = to_modified_polar(&c)?;
            let round = x
                .to_array()
                .iter()
                .zip(back.to_array())
                .map(|(a, b)| (a - b).abs() / (1.0 + a.abs()))
                .fold(0.0, f64::max);
            let h1 = hamiltonian(&pr, &x)?;
            let h2 = hamiltonian(&pr, &c)?;
            Ok(round.max((h1 - h2).abs() / (1.0 + h1.abs())))
        });
        t.add_result(r);
    }
    (t.cases, t.worst, 1e-10)
}

fn preset_runs() -> Vec<Result<crate::classical::Trajectory>> {
    PRESETS
        .iter()
        .map(|p| {
            let pr = p.params()?;
            let c = p.constants()?;
            let t_end = 2.0 * pr.k.q() as f64 * radial_period(pr.omega);
            integrate_orbit(&pr, &c, t_end, 1e-10)
        })
        .collect()
}

fn conservation_suite() -> (usize, f64, f64) {
    let mut t = Tally::default();
    for run in preset_runs() {
        match run {
            Ok(tr) => {
                t.add(tr.max_relative_drift(|s| s.h));
                t.add(tr.max_relative_drift(|s| s.a_phase));
                t.add(tr.max_relative_drift(|s| s.l));
            }
            Err(_) => t.add(f64::INFINITY),
        }
    }
    (t.cases, t.worst, 1e-6)
}

fn curve_suite() -> (usize, f64, f64) {
    let mut t = Tally::default();
    for (run, preset) in preset_runs().into_iter().zip(PRESETS) {
        let Ok(tr) = run else {
            t.add(f64::INFINITY);
            continue;
        };
        let pr = tr.params;
        let c = preset.constants().expect("preset constants");
        for s in &tr.samples {
            t.add_scaled(s.curve_residual, 1e-6);
            match phase_invariants(&pr, &s.point) {
                Ok(iv) => {
                    let rec = s.curve_residual;
                    let exp = curve_residual_expanded(&pr, &c, iv.z, iv.w, iv.sqrt_term);
                    t.add_scaled(exp, 1e-6);
                    t.add_scaled(rec - exp, 1e-9);
                }
                Err(_) => t.add(f64::INFINITY),
            }
        }
    }
    (t.cases, t.worst, 1.0)
}

/// Largest componentwise `|y_i(t*) - y_i(0)|` over the closed preset orbits.
pub fn closure_mismatch(pr: &SystemParams, start: &PhasePoint) -> Result<f64> {
    let t_max = 4.0 * std::f64::consts::PI * pr.k.q() as f64 / pr.omega;
    let t = find_period(pr, start, t_max, DEFAULT_PERIOD_TOL)?
        .ok_or_else(|| Error::InvalidArgument("no closure found".into()))?;
    let back = crate::classical::flow_signed(pr, start, t, 1e-12)?;
    Ok(start
        .to_array()
        .iter()
        .zip(back.to_array())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn period_suite() -> (usize, f64, f64) {
    let mut t = Tally::default();
    for p in PRESETS {
        let r = p
            .params()
            .and_then(|pr| Ok((pr, initial_state(&pr, &p.constants()?)?)))
            .and_then(|(pr, x)| closure_mismatch(&pr, &x));
        t.add_result(r);
    }
    (t.cases, t.worst, 1e-6)
}

/// Relative bracket `|{L, H}| / (‖∇L‖ ‖∇H‖)` at one point.
pub fn relative_bracket(pr: &SystemParams, x: &PhasePoint) -> Result<f64> {
    let gl = gradient(|y| extra_integral(pr, y), x, DEFAULT_FD_STEP)?;
    let gh = gradient(|y| hamiltonian(pr, y), x, DEFAULT_FD_STEP)?;
    let b = gl[0] * gh[2] + gl[1] * gh[3] - gl[2] * gh[0] - gl[3] * gh[1];
    Ok(b.abs() / (norm(&gl) * norm(&gh)))
}

fn poisson_suite(rng: &mut StdRng) -> (usize, f64, f64) {
    let mut t = Tally::default();
    for (p, q) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
        for _ in 0..100 {
            let pr = random_params(rng, p, q);
            let (a, e) = random_constants(rng, &pr);
            let r = sample_orbit_point(rng, &pr, e, a).and_then(|x| relative_bracket(&pr, &x));
            t.add_result(r);
        }
    }
    (t.cases, t.worst, 1e-5)
}

fn spectrum_suite(rng: &mut StdRng) -> (usize, f64, f64) {
    let mut t = Tally::default();
    match spectrum(&params(1, 1, -1.0, 7.0, 1.0), 3) {
        Ok(s) => {
            t.add_scaled(s.n_max as f64 - 1.0, 1e-12);
            let get = |m, n| s.level(m, n).map(|l| (l.a_n, l.energy));
            for (m, n, a, e) in [(0, 0, -6.25, 7.0), (1, 1, -0.25, 7.0)] {
                match get(m, n) {
                    Ok((aa, ee)) => {
                        t.add_scaled(aa - a, 1e-12);
                        t.add_scaled(ee - e, 1e-12);
                    }
                    Err(_) => t.add(f64::INFINITY),
                }
            }
        }
        Err(_) => t.add(f64::INFINITY),
    }
    let mut sets = 0;
    while sets < 50 {
        let p = rng.gen_range(1..6);
        let q = rng.gen_range(1..6);
        let pr = params(
            p,
            q,
            -rng.gen_range(0.2..2.0),
            rng.gen_range(5.0..60.0),
            rng.gen_range(0.5..3.0),
        );
        let Ok(s) = spectrum(&pr, 2 * pr.k.p() as usize) else {
            continue;
        };
        sets += 1;
        let (pp, qq) = (pr.k.p() as usize, pr.k.q() as usize);
        for lv in &s.levels {
            t.add_scaled(
                (lv.energy - energy_explicit(&pr, lv.m, lv.n)) / lv.energy,
                1e-12,
            );
            if lv.n + qq <= s.n_max {
                let partner = s.level(lv.m + pp, lv.n + qq).map(|l| l.energy);
                // the integer form must vanish identically
                let gap = energy_difference(&pr, (lv.m, lv.n), (lv.m + pp, lv.n + qq));
                t.add(if gap == 0.0 { 0.0 } else { f64::INFINITY });
                t.add_result(partner.map(|e| (e - lv.energy) / lv.energy / 1e-12));
            }
        }
    }
    (t.cases, t.worst, 1.0)
}

pub fn schrodinger_parameter_sets() -> Vec<SystemParams> {
    vec![
        params(1, 1, -1.0, 7.0, 1.0),
        params(3, 2, -1.0, 14.0, 2.0),
        params(1, 2, -2.0, 5.0, 0.7),
        params(2, 1, -0.5, 12.0, 1.3),
    ]
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Worst Schrödinger residual over `m ≤ 3`, all `n`, on a 20×20 grid.
pub fn schrodinger_max_residual(pr: &SystemParams) -> Result<(usize, f64)> {
    let s = spectrum(pr, 3)?;
    let rhos = log_grid(0.05 / pr.omega, 12.0 / pr.omega, 20);
    let k = pr.k_value();
    let eta_to_sigma = |eta: f64| (eta * k / (-pr.alpha).sqrt()).powf(1.0 / k);
    let sigmas: Vec<f64> = log_grid(0.05, 12.0, 20)
        .into_iter()
        .map(eta_to_sigma)
        .collect();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for lv in &s.levels {
        for &rho in &rhos {
            for &sigma in &sigmas {
                worst = worst.max(schrodinger_residual(&s, lv, rho, sigma)?.abs());
                cases += 1;
            }
        }
    }
    Ok((cases, worst))
}

fn schrodinger_suite() -> (usize, f64, f64) {
    let mut t = Tally::default();
    for pr in schrodinger_parameter_sets() {
        match schrodinger_max_residual(&pr) {
            Ok((n, w)) => {
                t.cases += n - 1;
                t.add(w);
            }
            Err(_) => t.add(f64::INFINITY),
        }
    }
    (t.cases, t.worst, 1e-9)
}

fn orthogonality_suite() -> (usize, f64, f64) {
    let mut t = Tally::default();
    for pr in [
        params(1, 1, -1.0, 7.0, 1.0),
        params(1, 2, -0.5, 11.3, 1.0),
        params(3, 2, -1.0, 20.0, 1.0),
    ] {
        let r = spectrum(&pr, 0)
            .and_then(|s| gram_matrix_s(&s))
            .map(|g| max_off_diagonal(&g));
        t.add_result(r);
    }
    (t.cases, t.worst, 1e-8)
}

fn bessel_suite() -> (usize, f64, f64) {
    let mut t = Tally::default();
    for pr in [
        params(1, 1, -1.0, 7.0, 1.0),
        params(1, 2, -1.3, 9.3, 1.0),
        params(3, 2, -1.3, 17.0, 1.0),
    ] {
        let Ok(s) = spectrum(&pr, 0) else {
            t.add(f64::INFINITY);
            continue;
        };
        for n in 0..=s.n_max {
            for sv in [0.1, 0.2, 0.5, 1.0, 2.0, 5.0] {
                t.add_result(bessel_representation_check(&s, n, sv));
                t.add_result(bessel_ode_witness(&s, n, sv));
            }
        }
    }
    (t.cases, t.worst, 1e-9)
}

/// Number of degeneracy maps checked for `k = p/q` and their worst
/// [`DegeneracyReport::max_error`](crate::quantum::DegeneracyReport::max_error).
pub fn degeneracy_errors(p: u32, q: u32) -> Result<(usize, f64)> {
    let pr = params(p, q, -1.0, if q == 1 { 7.0 } else { 30.0 }, 1.5);
    let s = spectrum(&pr, 6)?;
    let (pp, qq) = (p as usize, q as usize);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 0..=s.n_max {
        for m in 0..=3 {
            for dir in [ShiftDirection::Lower, ShiftDirection::Raise] {
                let ok = match dir {
                    ShiftDirection::Lower => m >= pp && n >= qq,
                    ShiftDirection::Raise => n + qq <= s.n_max,
                };
                if !ok {
                    continue;
                }
                let r = degeneracy_map_check(
                    &s,
                    m + if dir == ShiftDirection::Lower { pp } else { 0 },
                    n,
                    dir,
                )?;
                worst = worst.max(r.max_error());
                cases += 1;
            }
        }
    }
    Ok((cases, worst))
}

fn ladder_suite() -> (usize, f64, f64) {
    let mut t = Tally::default();
    for n in 0..=4 {
        for a in [0.5, 1.0, 1.5, 2.0, 3.25] {
            for x in [0.5, 1.0, 2.0, 4.0] {
                for r in laguerre_relation_residuals(n, a, x) {
                    t.add_scaled(r, 1e-10);
                }
                for r in ladder_identity_residuals(n, a, x) {
                    t.add_scaled(r, 1e-10);
                }
            }
        }
    }
    for (p, q) in [(1, 1), (3, 2)] {
        match degeneracy_errors(p, q) {
            Ok((n, w)) => {
                t.cases += n - 1;
                t.add_scaled(w, 1e-8);
            }
            Err(_) => t.add(f64::INFINITY),
        }
    }
    (t.cases, t.worst, 1.0)
}

fn oscillator_suite(rng: &mut StdRng) -> (usize, f64, f64) {
    let mut t = Tally::default();
    for _ in 0..10 {
        let a: f64 = rng.gen_range(0.2..3.0);
        let b: f64 = rng.gen_range(0.2..3.0);
        let w: f64 = rng.gen_range(0.3..3.0);
        let free = params(1, 1, 0.0, 0.0, w);
        for _ in 0..50 {
            let tt: f64 = rng.gen_range(0.0..10.0);
            let r = oscillator_trajectory(a, b, w, tt).and_then(|s| {
                let e = hamiltonian(&free, &s.cartesian)?;
                let mut err = (e - w * w * (a * a - b * b)).abs() / (1.0 + e.abs());
                if let Some(pp) = s.polar {
                    let sep = 4.0 * pp.q2 * pp.q2 * pp.p2 * pp.p2;
                    err = err.max((sep - w * w * a * a * b * b).abs() / (1.0 + s.separation));
                }
                Ok(err)
            });
            t.add_result(r);
        }
    }
    (t.cases, t.worst, 1e-9)
}
