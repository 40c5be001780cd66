//! Closure detection on the return map.

use crate::error::Result;
use crate::model::{PhasePoint, SystemParams};

use super::flow;
use super::ode::{DenseSolution, State};

pub const DEFAULT_PERIOD_TOL: f64 = 1e-6;

const SEARCH_REL_TOL: f64 = 1e-12;
// the orbit must move this far (scaled) before a return counts
const DEPARTURE: f64 = 0.1;
const SUBDIVISIONS: usize = 8;

fn distance(y: &State, y0: &State, scale: &State) -> f64 {
    (0..4)
        .map(|i| (y[i] - y0[i]).abs() / scale[i])
        .fold(0.0, f64::max)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-14 * (1.0 + a.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Smallest `t* ∈ (0, t_max]` at which the orbit returns to its start.
///
/// Distance is the max over components of `|y_i(t) - y_i(0)|`, each scaled
/// by the component's amplitude over the run. Local minima of the sampled
/// distance are refined by golden-section search; the first one below `tol`
/// is reported. `Ok(None)` means no closure was found.
pub fn find_period(
    params: &SystemParams,
    initial: &PhasePoint,
    t_max: f64,
    tol: f64,
) -> Result<Option<f64>> {
    let sol = flow(params, initial, t_max, SEARCH_REL_TOL)?;
    Ok(first_return(&sol, tol))
}

fn first_return(sol: &DenseSolution, tol: f64) -> Option<f64> {
    let y0 = sol.initial;
    let mut grid = vec![0.0];
    for s in &sol.steps {
        for j in 1..=SUBDIVISIONS {
            grid.push(s.start() + s.h * j as f64 / SUBDIVISIONS as f64);
        }
    }
    let states: Vec<State> = grid.iter().map(|&t| sol.state_at(t)).collect();
    let mut scale = [0.0; 4];
    for i in 0..4 {
        let (lo, hi) = states
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), y| {
                (l.min(y[i]), h.max(y[i]))
            });
        scale[i] = (hi - lo).max(1e-12 * (1.0 + y0[i].abs()));
    }
    let d: Vec<f64> = states.iter().map(|y| distance(y, &y0, &scale)).collect();
    let start = d.iter().position(|&x| x > DEPARTURE)?;
    for i in start.max(1)..d.len() {
        let is_min = d[i] <= d[i - 1] && (i + 1 == d.len() || d[i] <= d[i + 1]);
        if !is_min || d[i] > DEPARTURE {
            continue;
        }
        let hi = if i + 1 == d.len() {
            grid[i]
        } else {
            grid[i + 1]
        };
        let t = golden_min(|t| distance(&sol.state_at(t), &y0, &scale), grid[i - 1], hi);
        if distance(&sol.state_at(t), &y0, &scale) < tol {
            return Some(t);
        }
    }
    None
}
