//! Jacobi `θ1` series for a reduced lattice basis.
//!
//! With `τ = ω2/ω1` in the standard fundamental domain and `v = πz/ω1`,
//!
//! ```text
//! θ1(v) = 2 Σ_{n≥0} (-1)^n e^{iπτ(n+1/2)^2} sin((2n+1) v)
//! ```
//!
//! and the Weierstrass functions of `Zω1 + Zω2` are
//!
//! ```text
//! σ(z) = (ω1/π) exp(η1 z² / (2ω1)) θ1(v) / θ1'(0)
//! ζ(z) = η1 z / ω1 + (π/ω1) θ1'(v)/θ1(v)
//! η1   = -(π² / (3ω1)) θ1'''(0) / θ1'(0)
//! ```
//!
//! Callers keep `|Im v| ≤ π Im(τ)/2` by centering the argument first, which is
//! the regime the truncation order is chosen for.

use crate::C64;
use std::f64::consts::PI;

/// Upper bound on the number of series terms; never reached for a reduced basis.
const MAX_TERMS: usize = 48;

#[derive(Clone, Debug)]
pub(crate) struct ThetaSeries {
    omega1: C64,
    /// `(coefficient, k)` with coefficient `2 (-1)^n e^{iπτ(n+1/2)²}` and `k = 2n + 1`.
    terms: Vec<(C64, f64)>,
    theta1_prime0: C64,
    eta1: C64,
}

/// `θ1` and its first three derivatives with respect to `v`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ThetaDerivs {
    pub t0: C64,
    pub t1: C64,
    pub t2: C64,
    pub t3: C64,
}

impl ThetaSeries {
    pub(crate) fn new(omega1: C64, tau: C64) -> Self {
        let i_pi_tau = C64::i() * PI * tau;
        // |Im v| ≤ π Im τ covers centered arguments with a factor-two margin.
        let growth = PI * tau.im;
        let mut terms = Vec::new();
        let mut lead = 0.0_f64;
        for n in 0..MAX_TERMS {
            let half = n as f64 + 0.5;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = (i_pi_tau * half * half).exp() * (2.0 * sign);
            let k = (2 * n + 1) as f64;
            let magnitude = coeff.norm() * (k * growth).exp() * k * k * k;
            if n == 0 {
                lead = coeff.norm() * growth.exp();
            }
            terms.push((coeff, k));
            if n > 0 && magnitude < 1e-18 * lead {
                break;
            }
        }
        let theta1_prime0: C64 = terms.iter().map(|&(c, k)| c * k).sum();
        let theta1_triple0: C64 = terms.iter().map(|&(c, k)| -c * k * k * k).sum();
        let eta1 = -(PI * PI / (3.0 * omega1)) * theta1_triple0 / theta1_prime0;
        ThetaSeries {
            omega1,
            terms,
            theta1_prime0,
            eta1,
        }
    }

    pub(crate) fn eta1(&self) -> C64 {
        self.eta1
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn derivs(&self, v: C64) -> ThetaDerivs {
        let mut out = ThetaDerivs {
            t0: C64::new(0.0, 0.0),
            t1: C64::new(0.0, 0.0),
            t2: C64::new(0.0, 0.0),
            t3: C64::new(0.0, 0.0),
        };
        for &(c, k) in &self.terms {
            let kv = v * k;
            let (s, co) = (kv.sin(), kv.cos());
            out.t0 += c * s;
            out.t1 += c * k * co;
            out.t2 -= c * (k * k) * s;
            out.t3 -= c * (k * k * k) * co;
        }
        out
    }

    fn v(&self, z: C64) -> C64 {
        z * PI / self.omega1
    }

    /// `ζ(z)` by direct series evaluation, no argument reduction.
    pub(crate) fn zeta(&self, z: C64) -> C64 {
        let d = self.derivs(self.v(z));
        self.eta1 * z / self.omega1 + (PI / self.omega1) * d.t1 / d.t0
    }

    /// `(℘(z), ℘'(z))` by direct series evaluation.
    pub(crate) fn wp_and_prime(&self, z: C64) -> (C64, C64) {
        let d = self.derivs(self.v(z));
        let l1 = d.t1 / d.t0;
        let l2 = d.t2 / d.t0;
        let l3 = d.t3 / d.t0;
        let s = PI / self.omega1;
        let wp = -self.eta1 / self.omega1 + s * s * (l1 * l1 - l2);
        let wpp = -(s * s * s) * (l3 - 3.0 * l2 * l1 + 2.0 * l1 * l1 * l1);
        (wp, wpp)
    }

    /// `(σ(z), σ'(z))` by direct series evaluation; both are entire.
    pub(crate) fn sigma_and_prime(&self, z: C64) -> (C64, C64) {
        let d = self.derivs(self.v(z));
        let gauss = (self.eta1 * z * z / (2.0 * self.omega1)).exp();
        let scale = self.omega1 / (PI * self.theta1_prime0);
        let sigma = scale * gauss * d.t0;
        let sigma_prime =
            scale * gauss * (self.eta1 * z / self.omega1 * d.t0 + (PI / self.omega1) * d.t1);
        (sigma, sigma_prime)
    }
}
