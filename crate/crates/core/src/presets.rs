//! Named parameter presets: two families of orbits with `k` in {1, 2, 3} and {1/3, 1/2, 3/2}.

use std::f64::consts::PI;

use crate::classical::{curve_constants, CurveConstants};
use crate::error::Result;
use crate::model::{RationalK, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub k: (u32, u32),
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub energy: f64,
    pub separation: f64,
    pub delta2: f64,
}

impl Preset {
    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(
            RationalK::new(self.k.0, self.k.1)?,
            self.alpha,
            self.beta,
            self.omega,
        )
    }

    pub fn constants(&self) -> Result<CurveConstants> {
        curve_constants(
            &self.params()?,
            self.energy,
            self.separation,
            0.0,
            self.delta2,
        )
    }
}

const fn fig1(name: &'static str, k: u32) -> Preset {
    Preset {
        name,
        k: (k, 1),
        alpha: -2.0,
        beta: 6.0,
        omega: 3.0,
        energy: 20.0,
        separation: -1.0,
        delta2: PI / 32.0,
    }
}

const fn fig2(name: &'static str, p: u32, q: u32, delta2: f64) -> Preset {
    Preset {
        name,
        k: (p, q),
        alpha: -1.0,
        beta: 3.0,
        omega: 4.0,
        energy: 20.0,
        separation: -1.5,
        delta2,
    }
}

pub const PRESETS: [Preset; 6] = [
    fig1("fig1-k1", 1),
    fig1("fig1-k2", 2),
    fig1("fig1-k3", 3),
    fig2("fig2-k13", 1, 3, 3.0 * PI / 12.0),
    fig2("fig2-k12", 1, 2, PI / 6.0),
    fig2("fig2-k32", 3, 2, PI / 12.0),
];

pub fn preset(name: &str) -> Option<Preset> {
    PRESETS.iter().find(|p| p.name == name).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_in_the_bounded_regime() {
        for p in PRESETS {
            assert!(p.constants().is_ok(), "{}", p.name);
        }
        assert_eq!(preset("fig2-k32").unwrap().k, (3, 2));
        assert!(preset("fig3").is_none());
    }
}
