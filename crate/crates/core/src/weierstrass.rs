//! Weierstrass `℘`, `ζ`, `σ` and the elliptic exponential and logarithm.
//!
//! Arguments are split as `z = z0 + λ` with `z0` centered in the reduced
//! period parallelogram and `λ ∈ Λ`; the series are summed at `z0` and the
//! transformation laws carry the result back to `z`.

use crate::lattice::{reduce_mod_lattice, CurveData, CycleIndex, POLE_EPS};
use crate::{Error, Result, C64};

/// A point of `E(C)` in Weierstrass coordinates, or the origin at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffinePoint {
    pub x: C64,
    pub y: C64,
    pub at_infinity: bool,
}

impl AffinePoint {
    pub fn new(x: C64, y: C64) -> Self {
        AffinePoint {
            x,
            y,
            at_infinity: false,
        }
    }

    pub fn infinity() -> Self {
        AffinePoint {
            x: C64::new(0.0, 0.0),
            y: C64::new(0.0, 0.0),
            at_infinity: true,
        }
    }

    /// Relative residual of `y² = 4x³ - g2 x - g3`; zero at infinity.
    pub fn curve_residual(&self, curve: &CurveData) -> f64 {
        if self.at_infinity {
            return 0.0;
        }
        let (x, y) = (self.x, self.y);
        let rhs = 4.0 * x * x * x - curve.g2() * x - curve.g3();
        let size = (y * y)
            .norm()
            .max((4.0 * x * x * x).norm())
            .max((curve.g2() * x).norm())
            .max(curve.g3().norm())
            .max(f64::MIN_POSITIVE);
        (y * y - rhs).norm() / size
    }
}

fn check_pole(z: C64, z0: C64, curve: &CurveData, what: &'static str) -> Result<()> {
    if z0.norm() <= POLE_EPS * curve.scale() || !z0.is_finite() {
        return Err(Error::Pole { z, what });
    }
    Ok(())
}

/// `(℘(z), ℘'(z))`.
pub fn wp_and_prime(z: C64, curve: &CurveData) -> Result<(C64, C64)> {
    let (z0, _, _) = curve.reduced.split(z);
    check_pole(z, z0, curve, "lattice point of wp")?;
    Ok(curve.reduced.theta.wp_and_prime(z0))
}

pub fn wp(z: C64, curve: &CurveData) -> Result<C64> {
    Ok(wp_and_prime(z, curve)?.0)
}

/// `ζ(z)`.
pub fn zeta(z: C64, curve: &CurveData) -> Result<C64> {
    let (z0, m, n) = curve.reduced.split(z);
    check_pole(z, z0, curve, "lattice point of zeta")?;
    Ok(curve.reduced.theta.zeta(z0) + curve.reduced.eta_of(m, n))
}

/// `σ(z)`.
pub fn sigma(z: C64, curve: &CurveData) -> C64 {
    sigma_and_prime(z, curve).0
}

/// `(σ(z), σ'(z))`.
pub fn sigma_and_prime(z: C64, curve: &CurveData) -> (C64, C64) {
    let red = &curve.reduced;
    let (z0, m, n) = red.split(z);
    let (s0, sp0) = red.theta.sigma_and_prime(z0);
    if m == 0 && n == 0 {
        return (s0, sp0);
    }
    let lambda = red.basis.point(m, n);
    let eta = red.eta_of(m, n);
    let sign = if (m + n + m * n).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let factor = sign * (eta * (z0 + lambda * 0.5)).exp();
    (factor * s0, factor * (sp0 + eta * s0))
}

/// `(η1, η2)` with `ζ(z + ω_i) = ζ(z) + η_i`.
pub fn quasi_periods(curve: &CurveData) -> (C64, C64) {
    (curve.eta(CycleIndex::First), curve.eta(CycleIndex::Second))
}

/// `z ↦ (℘(z), ℘'(z))`, sending `Λ` to the point at infinity.
pub fn elliptic_exp(z: C64, curve: &CurveData) -> AffinePoint {
    match wp_and_prime(z, curve) {
        Ok((x, y)) => AffinePoint::new(x, y),
        Err(_) => AffinePoint::infinity(),
    }
}

/// Tolerance on the curve equation for accepting an input point.
const ON_CURVE_TOL: f64 = 1e-6;

/// Inverse of [`elliptic_exp`], returned in the half-open period
/// parallelogram of the curve's basis.
pub fn elliptic_log(p: &AffinePoint, curve: &CurveData) -> Result<C64> {
    if p.at_infinity {
        return Ok(C64::new(0.0, 0.0));
    }
    let residual = p.curve_residual(curve);
    if !(residual <= ON_CURVE_TOL) {
        return Err(Error::NotOnCurve {
            x: p.x,
            y: p.y,
            residual,
        });
    }
    let [e1, e2, e3] = curve.roots();
    let mut z = carlson_rf(p.x - e1, p.x - e2, p.x - e3);
    if !z.is_finite() {
        return Err(Error::Numeric(format!(
            "elliptic logarithm diverged at x = {}",
            p.x
        )));
    }
    let (_, y0) = curve.reduced.theta.wp_and_prime(curve.reduced.split(z).0);
    let y_scale = p.y.norm().max(y0.norm()).max(curve.scale().powi(-3));
    if (y0 + p.y).norm() < (y0 - p.y).norm() {
        z = -z;
    }
    for _ in 0..4 {
        let Ok((x, y)) = wp_and_prime(z, curve) else {
            break;
        };
        if y.norm() <= 1e-6 * y_scale {
            break;
        }
        let step = (x - p.x) / y;
        z -= step;
        if step.norm() <= 1e-16 * curve.scale() {
            break;
        }
    }
    Ok(reduce_mod_lattice(z, curve.lattice()).0)
}

/// Carlson's symmetric integral `R_F(x, y, z)` by duplication.
pub(crate) fn carlson_rf(x: C64, y: C64, z: C64) -> C64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let mut a = (x + y + z) / 3.0;
    for _ in 0..100 {
        let dev = (a - x).norm().max((a - y).norm()).max((a - z).norm());
        if dev <= 1e-4 * a.norm() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        x = (x + lambda) * 0.25;
        y = (y + lambda) * 0.25;
        z = (z + lambda) * 0.25;
        a = (x + y + z) / 3.0;
    }
    let dx = (a - x) / a;
    let dy = (a - y) / a;
    let dz = -(dx + dy);
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt()
}
