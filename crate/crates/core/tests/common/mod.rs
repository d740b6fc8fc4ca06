#![allow(dead_code)]

use motive_periods::lattice::{curve_from_invariants, CurveData};
use motive_periods::C64;
use rand::Rng;
use rand_distr::StandardNormal;

/// A curve with Gaussian invariants rescaled to unit weight, rejected when
/// the normalized discriminant is below `1e-3`.
pub fn random_curve(rng: &mut impl Rng) -> CurveData {
    loop {
        let mut g = || C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let (g2, g3) = (g(), g());
        let t = g2.norm().powf(0.25).max(g3.norm().powf(1.0 / 6.0));
        if t == 0.0 {
            continue;
        }
        let (g2, g3) = (g2 / t.powi(4), g3 / t.powi(6));
        if (g2 * g2 * g2 - 27.0 * g3 * g3).norm() < 1e-3 {
            continue;
        }
        if let Ok(c) = curve_from_invariants(g2, g3) {
            return c;
        }
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
