//! Closed-form orbits of the free oscillator (`α = β = 0`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{to_modified_polar, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorState {
    pub cartesian: PhasePoint,
    /// `None` where the `(ρ, σ)` chart is singular (`u = v` or `u = -v`).
    pub polar: Option<PhasePoint>,
    pub energy: f64,
    pub separation: f64,
}

/// `u = a sin 2ωt`, `v = b cos 2ωt`, `p_u = aω cos 2ωt`, `p_v = bω sin 2ωt`,
/// with `E = ω²(a² - b²)` and `A = ω²a²b²`.
pub fn oscillator_trajectory(a: f64, b: f64, omega: f64, t: f64) -> Result<OscillatorState> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "omega must be positive, got {omega}"
        )));
    }
    let (s, c) = (2.0 * omega * t).sin_cos();
    let cartesian = PhasePoint::cartesian(a * s, b * c, omega * a * c, omega * b * s);
    Ok(OscillatorState {
        cartesian,
        polar: to_modified_polar(&cartesian).ok(),
        energy: omega * omega * (a * a - b * b),
        separation: omega * omega * a * a * b * b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::flow_signed;
    use crate::model::{hamiltonian, separation_constant, RationalK, SystemParams};
    use rand::{Rng, SeedableRng};

    #[test]
    fn constants_example() {
        let s = oscillator_trajectory(2.0, 1.0, 1.0, 0.3).unwrap();
        assert_eq!((s.energy, s.separation), (3.0, 4.0));
    }

    #[test]
    fn phase_convention() {
        let s = oscillator_trajectory(2.0, 0.5, 1.3, 0.0).unwrap();
        assert_eq!(s.cartesian.to_array(), [0.0, 0.5, 1.3 * 2.0, 0.0]);
    }

    #[test]
    fn rejects_nonpositive_omega() {
        assert!(oscillator_trajectory(1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn singular_instants_have_no_polar_image() {
        let s = oscillator_trajectory(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(s.polar.is_none());
        assert!(oscillator_trajectory(1.0, 0.5, 1.0, 0.0)
            .unwrap()
            .polar
            .is_some());
    }

    #[test]
    fn closed_forms_are_consistent() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..10 {
            let a: f64 = rng.gen_range(0.2..3.0);
            let b: f64 = rng.gen_range(0.2..3.0);
            let w: f64 = rng.gen_range(0.3..3.0);
            let pr = SystemParams::new(RationalK::integer(1).unwrap(), 0.0, 0.0, w).unwrap();
            for _ in 0..50 {
                let t: f64 = rng.gen_range(0.0..10.0);
                let s = oscillator_trajectory(a, b, w, t).unwrap();
                let h = hamiltonian(&pr, &s.cartesian).unwrap();
                assert!((h - s.energy).abs() < 1e-9 * (1.0 + s.energy.abs()));
                if let Some(p) = s.polar {
                    let sep = 4.0 * p.q2 * p.q2 * p.p2 * p.p2;
                    assert!(
                        (sep - s.separation).abs() < 1e-9 * (1.0 + s.separation),
                        "{sep} {}",
                        s.separation
                    );
                    assert!(
                        (p.q1
                            - (a * a * (2.0 * w * t).sin().powi(2)
                                - b * b * (2.0 * w * t).cos().powi(2)))
                        .abs()
                            < 1e-12
                    );
                    assert_eq!(separation_constant(&pr, &p).unwrap(), sep);
                }
            }
        }
    }

    #[test]
    fn closed_form_solves_hamiltons_equations() {
        let w = 0.8;
        let pr = SystemParams::new(RationalK::integer(1).unwrap(), 0.0, 0.0, w).unwrap();
        let x0 = oscillator_trajectory(1.5, 0.6, w, 0.0).unwrap().cartesian;
        let x1 = flow_signed(&pr, &x0, 2.3, 1e-12).unwrap();
        let exact = oscillator_trajectory(1.5, 0.6, w, 2.3).unwrap().cartesian;
        for (u, v) in x1.to_array().iter().zip(exact.to_array()) {
            assert!((u - v).abs() < 1e-9);
        }
    }
}
