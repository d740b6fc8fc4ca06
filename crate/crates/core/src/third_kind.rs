//! Serre's function `f_q`, the pulled-back third-kind differential and the
//! exponential of the extension `G` of `E` by `G_m` attached to `q`.
//!
//! ```text
//! f_q(z) = σ(z + q) / (σ(z) σ(q)) · exp(-ζ(q) z)
//! f_q(z + ω_i) = f_q(z) · exp(η_i q - ω_i ζ(q))
//! ```

use crate::lattice::{CurveData, CycleIndex, POLE_EPS};
use crate::weierstrass::{sigma_and_prime, wp_and_prime, zeta};
use crate::{Error, Result, C64};

/// A curve together with the elliptic logarithm `q ∉ Λ` of a point `Q`.
#[derive(Clone, Debug)]
pub struct ThirdKindContext<'a> {
    curve: &'a CurveData,
    q: C64,
    zeta_q: C64,
    sigma_q: C64,
    wp_q: C64,
    wp_prime_q: C64,
}

impl<'a> ThirdKindContext<'a> {
    pub fn new(curve: &'a CurveData, q: C64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::Input(format!("non-finite extension parameter {q}")));
        }
        if curve.is_lattice_point(q) {
            return Err(Error::DegenerateExtension { q });
        }
        let zeta_q = zeta(q, curve)?;
        let (wp_q, wp_prime_q) = wp_and_prime(q, curve)?;
        let sigma_q = sigma_and_prime(q, curve).0;
        Ok(ThirdKindContext {
            curve,
            q,
            zeta_q,
            sigma_q,
            wp_q,
            wp_prime_q,
        })
    }

    pub fn curve(&self) -> &'a CurveData {
        self.curve
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn zeta_q(&self) -> C64 {
        self.zeta_q
    }

    fn check_pole(&self, z: C64) -> Result<()> {
        if self.curve.distance_to_lattice(z) <= POLE_EPS * self.curve.scale() {
            return Err(Error::Pole {
                z,
                what: "lattice point of f_q",
            });
        }
        Ok(())
    }

    /// `η(λ) q - λ ζ(q)` for `λ = m ω1 + n ω2` of the reduced basis.
    fn reduced_shift(&self, m: i64, n: i64) -> C64 {
        let red = &self.curve.reduced;
        red.eta_of(m, n) * self.q - red.basis.point(m, n) * self.zeta_q
    }

    /// `(f_q(z), f_q'(z))`, evaluated at the centered representative and
    /// transported by the quasi-quasi-periods.
    pub fn f_q_and_prime(&self, z: C64) -> Result<(C64, C64)> {
        self.check_pole(z)?;
        let (z0, m, n) = self.curve.reduced.split(z);
        let (s, sp) = sigma_and_prime(z0, self.curve);
        let (sq, spq) = sigma_and_prime(z0 + self.q, self.curve);
        let gauss = (-self.zeta_q * z0).exp() / self.sigma_q;
        let f = sq / s * gauss;
        let fp = (spq * s - sq * sp) / (s * s) * gauss - self.zeta_q * f;
        let shift = if m == 0 && n == 0 {
            C64::new(1.0, 0.0)
        } else {
            self.reduced_shift(m, n).exp()
        };
        Ok((f * shift, fp * shift))
    }

    pub fn f_q(&self, z: C64) -> Result<C64> {
        Ok(self.f_q_and_prime(z)?.0)
    }

    /// Principal logarithm of `f_q(z)`.
    pub fn log_f_q(&self, z: C64) -> Result<C64> {
        let f = self.f_q(z)?;
        if f.norm() == 0.0 || !f.is_finite() {
            return Err(Error::Numeric(format!(
                "log f_q undefined at z = {z} (f_q = {f})"
            )));
        }
        Ok(f.ln())
    }

    /// `½ (℘'(z) - ℘'(q)) / (℘(z) - ℘(q))`, the coefficient of `dz` in the
    /// pulled-back third-kind form.
    pub fn xi_pullback(&self, z: C64) -> Result<C64> {
        let (wz, dwz) = wp_and_prime(z, self.curve)?;
        let denom = wz - self.wp_q;
        let size = wz
            .norm()
            .max(self.wp_q.norm())
            .max(self.curve.scale().powi(-2));
        if denom.norm() <= 1e-10 * size {
            return Err(Error::Pole {
                z,
                what: "wp(z) = wp(q) in the third-kind form",
            });
        }
        Ok(0.5 * (dwz - self.wp_prime_q) / denom)
    }

    /// `η_i q - ω_i ζ(q)`.
    pub fn quasi_period(&self, i: CycleIndex) -> C64 {
        self.curve.eta(i) * self.q - self.curve.omega(i) * self.zeta_q
    }

    /// `η(λ) q - λ ζ(q)` for `λ = m ω1 + n ω2`.
    pub fn lattice_shift(&self, m: i64, n: i64) -> C64 {
        self.curve.eta_of(m, n) * self.q - self.curve.lattice().point(m, n) * self.zeta_q
    }

    /// Homogeneous coordinates of the image of `(w, z)` in `P^4`:
    /// `σ(z)³ [℘, ℘', 1, e^w f_q, e^w f_q (℘ + (℘'(z) - ℘'(q)) / (℘(z) - ℘(q)))]`.
    pub fn semiabelian_exp(&self, w: C64, z: C64) -> [C64; 5] {
        let zero = C64::new(0.0, 0.0);
        if self.curve.is_lattice_point(z) {
            let (_, m, n) = self.curve.reduced.split(z);
            let t = self.reduced_shift(m, n);
            return [zero, C64::new(-2.0, 0.0), zero, zero, (w + t).exp()];
        }
        let s = sigma_and_prime(z, self.curve).0;
        let s3 = s * s * s;
        let (x, y) = wp_and_prime(z, self.curve).expect("z is off the lattice");
        let (f, fp) = self.f_q_and_prime(z).expect("z is off the lattice");
        let ew = w.exp();
        // f_q (℘ + ratio) = f_q ℘ + 2 f_q', which stays finite at ±q.
        [
            s3 * x,
            s3 * y,
            s3,
            s3 * ew * f,
            s3 * ew * (f * x + 2.0 * fp),
        ]
    }

    /// Residue of the third-kind form at `z0`: `-1` on `Λ`, `+1` on `-q + Λ`.
    pub fn residue_at(&self, z0: C64) -> i32 {
        let tol = 1e-8 * self.curve.scale();
        let mut r = 0;
        if self.curve.distance_to_lattice(z0) <= tol {
            r -= 1;
        }
        if self.curve.distance_to_lattice(z0 + self.q) <= tol {
            r += 1;
        }
        r
    }
}

/// Largest componentwise distance between two projective points after each
/// is normalized by the coordinate where the first is largest.
pub fn projective_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let k = (0..a.len())
        .max_by(|&i, &j| a[i].norm().partial_cmp(&a[j].norm()).unwrap())
        .unwrap_or(0);
    if a[k].norm() == 0.0 || b[k].norm() == 0.0 {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x / a[k] - y / b[k]).norm())
        .fold(0.0, f64::max)
}
