//! Globally adaptive Gauss–Kronrod (10/21) quadrature, and the Gram matrix of
//! the angular factors.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{wavefunction_s, SpectrumData};
use crate::error::{Error, Result};

// nodes and weights are kept at full published precision
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077632817481410,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd-indexed Kronrod nodes
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const MAX_PANELS: usize = 4000;

pub const ABS_TOL: f64 = 1e-12;
pub const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[10] * fc;
    let mut g = 0.0;
    for i in 0..10 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Panel {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// Adaptive integral of `f` over `[a, b]`, refining the panel with the
/// largest error estimate until the total estimate meets
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_interval(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    let mut heap = BinaryHeap::new();
    let first = gk21(&f, a, b);
    let (mut value, mut error) = (first.value, first.error);
    heap.push(first);
    while error > abs_tol.max(rel_tol * value.abs()) {
        if heap.len() >= MAX_PANELS {
            return Err(Error::Quadrature { estimate: error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Quadrature { estimate: error });
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if !value.is_finite() {
            return Err(Error::Quadrature {
                estimate: f64::INFINITY,
            });
        }
    }
    // re-sum to shed the drift of the running updates
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        panels: heap.len(),
    })
}

/// `∫_0^∞ f(x) dx` through `x = t/(1 - t)`.
pub fn integrate_semi_infinite(
    f: impl Fn(f64) -> f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    let g = |t: f64| {
        let u = 1.0 - t;
        let v = f(t / u) / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_interval(g, 0.0, 1.0, abs_tol, rel_tol)
}

/// `G_{nn'} = ∫_0^∞ S_n S_{n'} dη/η` for `0 ≤ n, n' ≤ N`.
///
/// Off-diagonal entries are near zero, so their absolute tolerance is scaled
/// by `√(G_nn G_n'n')` rather than fixed.
pub fn gram_matrix_s(spectrum: &SpectrumData) -> Result<Vec<Vec<f64>>> {
    let size = spectrum.n_max + 1;
    let entry = |i: usize, j: usize, abs_tol: f64| {
        let f = |eta: f64| {
            if eta <= 0.0 {
                return 0.0;
            }
            wavefunction_s(spectrum, i, eta).unwrap_or(f64::NAN)
                * wavefunction_s(spectrum, j, eta).unwrap_or(f64::NAN)
                / eta
        };
        integrate_semi_infinite(f, abs_tol, REL_TOL).map(|r| r.value)
    };
    let mut g = vec![vec![0.0; size]; size];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = entry(i, i, ABS_TOL)?;
    }
    for i in 0..size {
        for j in i + 1..size {
            let v = entry(i, j, ABS_TOL * (g[i][i] * g[j][j]).sqrt().max(1.0))?;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

/// Largest `|G_{ij}| / √(G_ii G_jj)` over `i ≠ j`.
pub fn max_off_diagonal(g: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..g.len() {
        for j in 0..g.len() {
            if i != j {
                worst = worst.max(g[i][j].abs() / (g[i][i] * g[j][j]).sqrt());
            }
        }
    }
    worst
}
