//! Dormand–Prince 5(4) with the fourth-order continuous extension.
//!
//! Fixed to four-dimensional states; that is all the phase space here needs.

use crate::error::{Error, Result};

pub type State = [f64; 4];

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 5_000_000;

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep {
    pub t: f64,
    pub h: f64,
    y0: State,
    r2: State,
    r3: State,
    r4: State,
    r5: State,
}

impl DenseStep {
    pub fn start(&self) -> f64 {
        self.t
    }

    pub fn end(&self) -> f64 {
        self.t + self.h
    }

    pub fn eval(&self, t: f64) -> State {
        let th = (t - self.t) / self.h;
        let th1 = 1.0 - th;
        std::array::from_fn(|i| {
            self.y0[i]
                + th * (self.r2[i] + th1 * (self.r3[i] + th * (self.r4[i] + th1 * self.r5[i])))
        })
    }
}

/// Continuous solution on `[0, t_end]` built from accepted steps.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub steps: Vec<DenseStep>,
    pub initial: State,
    pub t_end: f64,
    pub rejected: usize,
}

impl DenseSolution {
    pub fn state_at(&self, t: f64) -> State {
        if t <= 0.0 || self.steps.is_empty() {
            return self.initial;
        }
        let idx = self
            .steps
            .partition_point(|s| s.end() < t)
            .min(self.steps.len() - 1);
        self.steps[idx].eval(t)
    }

    pub fn final_state(&self) -> State {
        self.steps.last().map_or(self.initial, |s| s.eval(s.end()))
    }
}

/// Adaptive integration of `y' = f(y)` from `t = 0` to `t_end > 0`.
///
/// `rhs` returns `Err` when `y` is outside the domain; such trial steps are
/// rejected and retried with a smaller step. The last step is clipped so the
/// solution ends exactly at `t_end`.
pub fn integrate<F>(rhs: F, y0: State, t_end: f64, rtol: f64, atol: f64) -> Result<DenseSolution>
where
    F: Fn(&State) -> Result<State>,
{
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    let mut k1 = rhs(&y0)?;
    let mut y = y0;
    let mut t = 0.0;

    let norm = |v: &State, scale: &State| {
        (v.iter()
            .zip(scale)
            .map(|(a, s)| (a / s).powi(2))
            .sum::<f64>()
            / 4.0)
            .sqrt()
    };
    let scale0: State = std::array::from_fn(|i| atol + rtol * y0[i].abs());
    let d0 = norm(&y0, &scale0);
    let d1 = norm(&k1, &scale0);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(t_end);

    let mut steps = Vec::new();
    let mut rejected = 0usize;
    let h_floor = |t: f64| 1e-14 * t.abs().max(1.0);

    while t < t_end {
        if steps.len() + rejected > MAX_STEPS {
            return Err(Error::DomainEscape { time: t });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let trial = (|| -> Result<_> {
            let k2 = rhs(&axpy(&y, &[(A21, &k1)], h))?;
            let k3 = rhs(&axpy(&y, &[(A31, &k1), (A32, &k2)], h))?;
            let k4 = rhs(&axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h))?;
            let k5 = rhs(&axpy(
                &y,
                &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
                h,
            ))?;
            let k6 = rhs(&axpy(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            ))?;
            let y1 = axpy(
                &y,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
                h,
            );
            let k7 = rhs(&y1)?;
            Ok((k2, k3, k4, k5, k6, k7, y1))
        })();
        let (k3, k4, k5, k6, k7, y1) = match trial {
            Ok((_, k3, k4, k5, k6, k7, y1)) => (k3, k4, k5, k6, k7, y1),
            Err(_) => {
                rejected += 1;
                h *= 0.25;
                if h < h_floor(t) {
                    return Err(Error::DomainEscape { time: t });
                }
                continue;
            }
        };
        let err: State = std::array::from_fn(|i| {
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let scale: State = std::array::from_fn(|i| atol + rtol * y[i].abs().max(y1[i].abs()));
        let e = norm(&err, &scale);
        if !e.is_finite() {
            rejected += 1;
            h *= 0.25;
            if h < h_floor(t) {
                return Err(Error::DomainEscape { time: t });
            }
            continue;
        }
        if e <= 1.0 {
            let r2: State = std::array::from_fn(|i| y1[i] - y[i]);
            let r3: State = std::array::from_fn(|i| h * k1[i] - r2[i]);
            let r4: State = std::array::from_fn(|i| r2[i] - h * k7[i] - r3[i]);
            let r5: State = std::array::from_fn(|i| {
                h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
            });
            steps.push(DenseStep {
                t,
                h,
                y0: y,
                r2,
                r3,
                r4,
                r5,
            });
            t = if last { t_end } else { t + h };
            y = y1;
            k1 = k7;
            let fac = if e == 0.0 {
                5.0
            } else {
                (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            rejected += 1;
            h *= (0.9 * e.powf(-0.2)).clamp(0.1, 0.9);
            if h < h_floor(t) {
                return Err(Error::DomainEscape { time: t });
            }
        }
    }
    Ok(DenseSolution {
        steps,
        initial: y0,
        t_end,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(y: &State) -> Result<State> {
        Ok([y[2], y[3], -y[0], -4.0 * y[1]])
    }

    #[test]
    fn harmonic_oscillator_endpoint_and_dense_output() {
        let sol = integrate(oscillator, [1.0, 0.0, 0.0, 2.0], 10.0, 1e-11, 1e-11).unwrap();
        let yf = sol.final_state();
        assert!((yf[0] - 10f64.cos()).abs() < 1e-8);
        assert!((yf[1] - 20f64.sin()).abs() < 1e-8);
        assert_eq!(sol.steps.last().unwrap().end(), 10.0);
        for i in 0..=997 {
            let t = 0.01 * i as f64 + 0.003;
            let y = sol.state_at(t);
            assert!((y[0] - t.cos()).abs() < 1e-8, "t={t}");
            assert!((y[3] - 2.0 * (2.0 * t).cos()).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn dense_output_is_fourth_order_on_polynomials() {
        // y' = (1, 2t, 3t², 4t³) written autonomously through y[0] = t
        let rhs = |y: &State| -> Result<State> {
            let t = y[0];
            Ok([1.0, 2.0 * t, 3.0 * t * t, 4.0 * t * t * t])
        };
        let sol = integrate(rhs, [0.0; 4], 2.0, 1e-6, 1e-6).unwrap();
        for i in 0..50 {
            let t = 0.039 * i as f64;
            let y = sol.state_at(t);
            assert!((y[1] - t * t).abs() < 1e-12);
            assert!((y[2] - t.powi(3)).abs() < 1e-11);
            assert!((y[3] - t.powi(4)).abs() < 1e-5);
        }
    }

    #[test]
    fn domain_escape_is_reported() {
        // y' = -1 on y > 0; the state leaves the domain at t = 1.
        let rhs = |y: &State| -> Result<State> {
            if y[0] <= 0.0 {
                Err(Error::Domain("y <= 0".into()))
            } else {
                Ok([-1.0, 0.0, 0.0, 0.0])
            }
        };
        match integrate(rhs, [1.0, 0.0, 0.0, 0.0], 3.0, 1e-10, 1e-10) {
            Err(Error::DomainEscape { time }) => assert!((time - 1.0).abs() < 1e-6, "{time}"),
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_horizon() {
        assert!(integrate(oscillator, [0.0; 4], 0.0, 1e-8, 1e-8).is_err());
    }
}
