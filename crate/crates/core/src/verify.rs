//! Numerical verification suites. Each check evaluates an identity at many
//! points and records the largest residual against a tolerance.
//!
//! Relative residuals use `|a - b| / max(|a|, |b|, floor)` where `floor` is
//! the natural size of the quantity at the curve's length scale, so that
//! values near a zero are not judged by a vanishing denominator.

use crate::lattice::{CurveData, CycleIndex};
use crate::motive::{component_period_matrix, decompose, full_period_matrix, OneMotiveSpec};
use crate::quadrature::{
    cycle_integral, integrate_segment_fn, residue_loop, segment_is_clear, FormKind,
    QuadratureOptions,
};
use crate::third_kind::ThirdKindContext;
use crate::weierstrass::{sigma, wp_and_prime, zeta};
use crate::{Result, C64, TWO_PI_I};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    #[serde(serialize_with = "ser_fx")]
    pub max_residual: f64,
    #[serde(serialize_with = "ser_fx")]
    pub tolerance: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn ser_fx<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::schema::Fx(*x).serialize(s)
}

impl CheckRecord {
    fn from_residuals(
        name: impl Into<String>,
        tolerance: f64,
        residuals: Result<Vec<f64>>,
    ) -> Self {
        let name = name.into();
        match residuals {
            Ok(r) => {
                let max = r.iter().copied().fold(0.0, f64::max);
                let finite = r.iter().all(|x| x.is_finite());
                CheckRecord {
                    name,
                    passed: finite && max <= tolerance,
                    max_residual: if finite { max } else { f64::NAN },
                    tolerance,
                    samples: r.len(),
                    error: None,
                }
            }
            Err(e) => CheckRecord {
                name,
                passed: false,
                max_residual: f64::NAN,
                tolerance,
                samples: 0,
                error: Some(e.to_string()),
            },
        }
    }
}

/// Tolerances for closed-form identities and for quadrature comparisons.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub analytic: f64,
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            analytic: 1e-9,
            quadrature: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub tolerances: Tolerances,
    pub seed: u64,
    pub points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tolerances: Tolerances::default(),
            seed: 42,
            points: 100,
        }
    }
}

pub fn relative_error(a: C64, b: C64, floor: f64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        return 0.0;
    }
    d / a.norm().max(b.norm()).max(floor)
}

/// Distance from `x` to the nearest multiple of `2πi`.
pub fn distance_mod_2pi_i(x: C64) -> f64 {
    let k = (x / TWO_PI_I).re.round();
    (x - TWO_PI_I * k).norm()
}

/// A point `x ω1' + y ω2'` of the reduced basis with `x, y ∈ [-span, span)`
/// at least `0.05` periods away from the lattice.
pub fn random_point(curve: &CurveData, rng: &mut impl Rng, span: f64) -> C64 {
    let basis = &curve.reduced.basis;
    loop {
        let x = rng.gen_range(-span..span);
        let y = rng.gen_range(-span..span);
        let z = basis.omega1() * x + basis.omega2() * y;
        if curve.distance_to_lattice(z) > 0.05 * curve.scale() {
            return z;
        }
    }
}

/// A point in the centered reduced parallelogram away from `Λ` and from the
/// two-torsion points.
pub fn random_q(curve: &CurveData, rng: &mut impl Rng) -> C64 {
    loop {
        let q = random_point(curve, rng, 0.5);
        if curve.distance_to_lattice(2.0 * q) > 0.05 * curve.scale() {
            return q;
        }
    }
}

pub fn legendre(curve: &CurveData, tol: f64) -> CheckRecord {
    let w1 = curve.omega(CycleIndex::First);
    let w2 = curve.omega(CycleIndex::Second);
    let h1 = curve.eta(CycleIndex::First);
    let h2 = curve.eta(CycleIndex::Second);
    let r = (h1 * w2 - h2 * w1 - TWO_PI_I).norm();
    CheckRecord::from_residuals("legendre", tol, Ok(vec![r]))
}

fn over_points(points: &[C64], mut f: impl FnMut(C64) -> Result<f64>) -> Result<Vec<f64>> {
    points.iter().map(|&z| f(z)).collect()
}

/// `℘(z + ω_i) = ℘(z)` and `℘'(z + ω_i) = ℘'(z)`.
pub fn periods_wp(curve: &CurveData, points: &[C64], tol: f64) -> CheckRecord {
    let s = curve.scale();
    let res = over_points(points, |z| {
        let (p, dp) = wp_and_prime(z, curve)?;
        let mut worst: f64 = 0.0;
        for i in CycleIndex::BOTH {
            let (pi, dpi) = wp_and_prime(z + curve.omega(i), curve)?;
            worst = worst
                .max(relative_error(pi, p, s.powi(-2)))
                .max(relative_error(dpi, dp, s.powi(-3)));
        }
        Ok(worst)
    });
    CheckRecord::from_residuals("periods-wp", tol, res)
}

/// `ζ(z + ω_i) = ζ(z) + η_i`.
pub fn periods_zeta(curve: &CurveData, points: &[C64], tol: f64) -> CheckRecord {
    let s = curve.scale();
    let res = over_points(points, |z| {
        let zz = zeta(z, curve)?;
        let mut worst: f64 = 0.0;
        for i in CycleIndex::BOTH {
            let lhs = zeta(z + curve.omega(i), curve)?;
            worst = worst.max(relative_error(lhs, zz + curve.eta(i), 1.0 / s));
        }
        Ok(worst)
    });
    CheckRecord::from_residuals("periods-zeta", tol, res)
}

/// `σ(z + ω_i) = -σ(z) exp(η_i (z + ω_i/2))`.
pub fn sigma_transformation(curve: &CurveData, points: &[C64], tol: f64) -> CheckRecord {
    let res = over_points(points, |z| {
        let sz = sigma(z, curve);
        let mut worst: f64 = 0.0;
        for i in CycleIndex::BOTH {
            let w = curve.omega(i);
            let lhs = sigma(z + w, curve);
            let rhs = -sz * (curve.eta(i) * (z + w * 0.5)).exp();
            worst = worst.max(relative_error(lhs, rhs, 0.0));
        }
        Ok(worst)
    });
    CheckRecord::from_residuals("sigma-transformation", tol, res)
}

/// Parity of `℘`, `℘'`, `ζ`, `σ`.
pub fn parity(curve: &CurveData, points: &[C64], tol: f64) -> CheckRecord {
    let s = curve.scale();
    let res = over_points(points, |z| {
        let (p, dp) = wp_and_prime(z, curve)?;
        let (pm, dpm) = wp_and_prime(-z, curve)?;
        Ok(relative_error(p, pm, s.powi(-2))
            .max(relative_error(dp, -dpm, s.powi(-3)))
            .max(relative_error(zeta(z, curve)?, -zeta(-z, curve)?, 1.0 / s))
            .max(relative_error(sigma(z, curve), -sigma(-z, curve), 0.0)))
    });
    CheckRecord::from_residuals("parity", tol, res)
}

/// `℘'² = 4℘³ - g2 ℘ - g3`.
pub fn ode_residual(curve: &CurveData, points: &[C64], tol: f64) -> CheckRecord {
    let (g2, g3) = (curve.g2(), curve.g3());
    let res = over_points(points, |z| {
        let (p, dp) = wp_and_prime(z, curve)?;
        let lhs = dp * dp;
        let rhs = 4.0 * p * p * p - g2 * p - g3;
        let size = lhs
            .norm()
            .max((4.0 * p * p * p).norm())
            .max((g2 * p).norm())
            .max(g3.norm());
        Ok((lhs - rhs).norm() / size)
    });
    CheckRecord::from_residuals("weierstrass-ode", tol, res)
}

/// `ζ(z + y) - ζ(z) - ζ(y) = ½ (℘'(z) - ℘'(y)) / (℘(z) - ℘(y))` with `y`
/// the next sample point.
pub fn pseudo_addition(curve: &CurveData, points: &[C64], tol: f64) -> CheckRecord {
    let s = curve.scale();
    let pairs: Vec<(C64, C64)> = points
        .iter()
        .zip(points.iter().cycle().skip(1))
        .map(|(&a, &b)| (a, b))
        .filter(|&(a, b)| {
            curve.distance_to_lattice(a + b) > 0.05 * s
                && curve.distance_to_lattice(a - b) > 0.05 * s
        })
        .collect();
    let res = pairs
        .iter()
        .map(|&(z, y)| {
            let lhs = zeta(z + y, curve)? - zeta(z, curve)? - zeta(y, curve)?;
            let (pz, dpz) = wp_and_prime(z, curve)?;
            let (py, dpy) = wp_and_prime(y, curve)?;
            Ok(relative_error(lhs, 0.5 * (dpz - dpy) / (pz - py), 1.0 / s))
        })
        .collect();
    CheckRecord::from_residuals("pseudo-addition", tol, res)
}

/// `f_q(z + ω_i) = f_q(z) exp(η_i q - ω_i ζ(q))`.
pub fn periods_fq(ctx: &ThirdKindContext, points: &[C64], tol: f64) -> CheckRecord {
    let curve = ctx.curve();
    let res = over_points(points, |z| {
        let f = ctx.f_q(z)?;
        let mut worst: f64 = 0.0;
        for i in CycleIndex::BOTH {
            let lhs = ctx.f_q(z + curve.omega(i))?;
            worst = worst.max(relative_error(lhs, f * ctx.quasi_period(i).exp(), 0.0));
        }
        Ok(worst)
    });
    CheckRecord::from_residuals("periods-fq", tol, res)
}

/// `f_q(z1 + z2) / (f_q(z1) f_q(z2)) = σ(q+z1+z2) σ(q) σ(z1) σ(z2) / (σ(q+z1) σ(z1+z2) σ(q+z2))`.
pub fn fq_sigma(ctx: &ThirdKindContext, points: &[C64], tol: f64) -> CheckRecord {
    let curve = ctx.curve();
    let q = ctx.q();
    let s = curve.scale();
    let pairs: Vec<(C64, C64)> = points
        .iter()
        .zip(points.iter().cycle().skip(1))
        .map(|(&a, &b)| (a, b))
        .filter(|&(a, b)| {
            [a + b, a + q, b + q, a + b + q]
                .iter()
                .all(|&w| curve.distance_to_lattice(w) > 0.05 * s)
        })
        .collect();
    let res = pairs
        .iter()
        .map(|&(z1, z2)| {
            let lhs = ctx.f_q(z1 + z2)? / (ctx.f_q(z1)? * ctx.f_q(z2)?);
            let sg = |z| sigma(z, curve);
            let rhs =
                sg(q + z1 + z2) * sg(q) * sg(z1) * sg(z2) / (sg(q + z1) * sg(z1 + z2) * sg(q + z2));
            Ok(relative_error(lhs, rhs, 0.0))
        })
        .collect();
    CheckRecord::from_residuals("fq-sigma", tol, res)
}

/// Quadrature of `dz`, `-℘ dz` and (if given) `ξ_Q` over both cycles
/// against `ω_i`, `η_i`, `η_i q - ω_i ζ(q)`; the last modulo `2πi`.
pub fn quadrature_cycles(
    curve: &CurveData,
    ctx: Option<&ThirdKindContext>,
    tol: f64,
    opts: &QuadratureOptions,
) -> Vec<CheckRecord> {
    let mut forms = vec![("first", FormKind::First), ("second", FormKind::Second)];
    if let Some(ctx) = ctx {
        forms.push(("third", FormKind::Third(ctx.clone())));
    }
    forms
        .into_iter()
        .map(|(name, form)| {
            let res = CycleIndex::BOTH
                .iter()
                .map(|&i| cycle_integral(&form, i, curve, opts).map(|c| c.discrepancy()))
                .collect();
            CheckRecord::from_residuals(format!("quadrature-cycle-{name}"), tol, res)
        })
        .collect()
}

/// Loop integrals of `ξ_Q` around `0` and `-q` against `-2πi` and `2πi`.
pub fn residues(ctx: &ThirdKindContext, tol: f64, opts: &QuadratureOptions) -> CheckRecord {
    let curve = ctx.curve();
    let form = FormKind::Third(ctx.clone());
    let res = [(C64::new(0.0, 0.0), -TWO_PI_I), (-ctx.q(), TWO_PI_I)]
        .iter()
        .map(|&(center, expected)| {
            residue_loop(&form, center, curve, opts).map(|r| (r.value - expected).norm())
        })
        .collect();
    CheckRecord::from_residuals("residues", tol, res)
}

/// `ζ` near 0 from the Laurent expansion
/// `ζ(z) = 1/z - Σ_{k≥2} c_k z^{2k-1} / (2k-1)`, `c_2 = g2/20`, `c_3 = g3/28`,
/// `c_k = 3 / ((2k+1)(k-3)) Σ_{m=2}^{k-2} c_m c_{k-m}`.
pub fn zeta_laurent(z: C64, g2: C64, g3: C64, terms: usize) -> C64 {
    let mut c = vec![C64::new(0.0, 0.0); terms + 2];
    if terms >= 2 {
        c[2] = g2 / 20.0;
    }
    if terms >= 3 {
        c[3] = g3 / 28.0;
    }
    for k in 4..=terms {
        let s: C64 = (2..=k - 2).map(|m| c[m] * c[k - m]).sum();
        c[k] = s * (3.0 / (((2 * k + 1) * (k - 3)) as f64));
    }
    let mut out = 1.0 / z;
    for (k, ck) in c.iter().enumerate().take(terms + 1).skip(2) {
        out -= ck * z.powi(2 * k as i32 - 1) / (2 * k - 1) as f64;
    }
    out
}

/// A piecewise-linear path from `a` to `b` whose pieces all keep clear of
/// the singular set of `form`.
fn clear_route(form: &FormKind, curve: &CurveData, a: C64, b: C64) -> Option<Vec<C64>> {
    if segment_is_clear(form, curve, a, b) {
        return Some(vec![a, b]);
    }
    let d = b - a;
    for t in [0.15, -0.15, 0.3, -0.3, 0.5, -0.5, 0.8, -0.8] {
        let w = a + d * 0.5 + C64::i() * d * t;
        if segment_is_clear(form, curve, a, w) && segment_is_clear(form, curve, w, b) {
            return Some(vec![a, w, b]);
        }
    }
    None
}

fn route_integral(
    form: &FormKind,
    curve: &CurveData,
    a: C64,
    b: C64,
    g: &mut dyn FnMut(C64) -> Result<C64>,
    opts: &QuadratureOptions,
) -> Result<C64> {
    let route = clear_route(form, curve, a, b)
        .ok_or_else(|| crate::Error::Path(format!("no clear route from {a} to {b}")))?;
    let mut total = C64::new(0.0, 0.0);
    for w in route.windows(2) {
        total += integrate_segment_fn(g, w[0], w[1], opts)?.value;
    }
    Ok(total)
}

/// Each analytic entry of every component matrix against quadrature:
/// `p = ∫_0^p dz`, `ζ(p)` from the Laurent series at a small base point plus
/// `∫ -℘ dz`, `log f_q(p)` from `∫ ξ_Q` (mod `2πi`), and the cycle rows.
pub fn matrix_oracle(m: &OneMotiveSpec, tol: f64, opts: &QuadratureOptions) -> CheckRecord {
    let res = (|| -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for comp in decompose(m)? {
            let pm = component_period_matrix(&comp)?;
            let curve = comp.curve;
            let p = comp.p;
            let a = C64::from_polar(0.2 * curve.scale(), 0.3);
            let first =
                integrate_segment_fn(&mut |_| Ok(C64::new(1.0, 0.0)), C64::new(0.0, 0.0), p, opts)?;
            out.push((first.value - pm.get(0, 1)).norm());
            let zeta_a = zeta_laurent(a, curve.g2(), curve.g3(), 30);
            let second = route_integral(
                &FormKind::Second,
                curve,
                a,
                p,
                &mut |z| Ok(-wp_and_prime(z, curve)?.0),
                opts,
            )?;
            out.push((zeta_a + second - pm.get(0, 2)).norm());
            for (row, i) in CycleIndex::BOTH.into_iter().enumerate() {
                out.push(
                    (cycle_integral(&FormKind::First, i, curve, opts)?
                        .integral
                        .value
                        - pm.get(row + 1, 1))
                    .norm(),
                );
                out.push(
                    (cycle_integral(&FormKind::Second, i, curve, opts)?
                        .integral
                        .value
                        - pm.get(row + 1, 2))
                    .norm(),
                );
            }
            match &comp.ctx {
                None => {
                    out.push((pm.get(0, 3) - comp.l).norm());
                    out.push(pm.get(1, 3).norm() + pm.get(2, 3).norm());
                }
                Some(ctx) => {
                    let form = FormKind::Third(ctx.clone());
                    // log(t f_q(t)) vanishes at 0, so log f_q(a) = -log a + ∫_0^a (ξ + 1/t) dt.
                    let near = integrate_segment_fn(
                        &mut |t| Ok(ctx.xi_pullback(t)? + 1.0 / t),
                        C64::new(0.0, 0.0),
                        a,
                        opts,
                    )?
                    .value;
                    let far =
                        route_integral(&form, curve, a, p, &mut |z| ctx.xi_pullback(z), opts)?;
                    let log_fq = -a.ln() + near + far;
                    out.push(distance_mod_2pi_i(log_fq + comp.l - pm.get(0, 3)));
                    for (row, i) in CycleIndex::BOTH.into_iter().enumerate() {
                        let c = cycle_integral(&form, i, curve, opts)?;
                        out.push(distance_mod_2pi_i(c.integral.value - pm.get(row + 1, 3)));
                    }
                }
            }
        }
        Ok(out)
    })();
    CheckRecord::from_residuals("matrix-vs-quadrature", tol, res)
}

/// Exact block pattern of the full matrix and `det = ±(2πi)^(n+s)`
/// (`(2πi)^s` without curves).
pub fn matrix_structure(m: &OneMotiveSpec, tol: f64) -> Vec<CheckRecord> {
    let pm = match full_period_matrix(m) {
        Ok(pm) => pm,
        Err(e) => {
            return vec![CheckRecord::from_residuals("matrix-structure", 0.0, Err(e))];
        }
    };
    let (r, s, n) = (m.r(), m.s(), m.n());
    let head = if n == 0 { r } else { r * n + 2 * n };
    let a_size = if n == 0 { r } else { r * n };
    let size = pm.size();
    let mut bad = 0usize;
    for row in 0..size {
        for col in 0..size {
            let v = pm.get(row, col);
            let expect_exact = if row < a_size && col < a_size {
                Some(if row == col {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                })
            } else if row >= head {
                Some(if row == col {
                    TWO_PI_I
                } else {
                    C64::new(0.0, 0.0)
                })
            } else if row >= a_size && col < a_size {
                Some(C64::new(0.0, 0.0))
            } else if n > 0 && row >= a_size && col < head {
                // D is block diagonal
                let jr = (row - a_size) / 2;
                let jc = (col - a_size) / 2;
                (jr != jc).then_some(C64::new(0.0, 0.0))
            } else if n > 0 && row < a_size && col >= a_size && col < head {
                // B row (j,k) lives in curve j's column pair
                let jr = row / r;
                let jc = (col - a_size) / 2;
                (jr != jc).then_some(C64::new(0.0, 0.0))
            } else {
                None
            };
            if let Some(e) = expect_exact {
                if v != e {
                    bad += 1;
                }
            }
        }
    }
    let structure = CheckRecord::from_residuals("matrix-structure", 0.0, Ok(vec![bad as f64]));
    let det = pm.determinant();
    let expected = TWO_PI_I.powi((n + s) as i32);
    let det_err = relative_error(det, expected, 0.0).min(relative_error(det, -expected, 0.0));
    let det_check = CheckRecord::from_residuals("matrix-determinant", tol, Ok(vec![det_err]));
    vec![structure, det_check]
}

/// Every suite for a motive, prefixed with the curve and factor it concerns.
pub fn run_motive_suite(m: &OneMotiveSpec, opts: &VerifyOptions) -> Vec<CheckRecord> {
    let tol = opts.tolerances;
    let qopts = QuadratureOptions {
        seed: opts.seed,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    let mut push = |prefix: &str, mut rec: CheckRecord| {
        if !prefix.is_empty() {
            rec.name = format!("{prefix}.{}", rec.name);
        }
        out.push(rec);
    };
    for (j, curve) in m.curves().iter().enumerate() {
        let pfx = format!("curve[{}]", j + 1);
        let points: Vec<C64> = (0..opts.points)
            .map(|_| random_point(curve, &mut rng, 1.5))
            .collect();
        push(&pfx, legendre(curve, tol.analytic));
        push(&pfx, periods_wp(curve, &points, tol.analytic));
        push(&pfx, periods_zeta(curve, &points, tol.analytic));
        push(&pfx, sigma_transformation(curve, &points, tol.analytic));
        push(&pfx, parity(curve, &points, tol.analytic));
        push(&pfx, pseudo_addition(curve, &points, tol.analytic));
        push(&pfx, ode_residual(curve, &points, 10.0 * tol.analytic));
        for rec in quadrature_cycles(curve, None, tol.quadrature, &qopts) {
            push(&pfx, rec);
        }
        for i in 0..m.s() {
            if m.is_split(j, i) {
                continue;
            }
            let pfx = format!("curve[{}].q[{}]", j + 1, i + 1);
            let ctx = match ThirdKindContext::new(curve, m.q(j, i)) {
                Ok(ctx) => ctx,
                Err(e) => {
                    push(
                        &pfx,
                        CheckRecord::from_residuals("third-kind", tol.analytic, Err(e)),
                    );
                    continue;
                }
            };
            let pts: Vec<C64> = points
                .iter()
                .copied()
                .filter(|&z| curve.distance_to_lattice(z + ctx.q()) > 0.05 * curve.scale())
                .collect();
            push(&pfx, periods_fq(&ctx, &pts, tol.analytic));
            push(&pfx, fq_sigma(&ctx, &pts, tol.analytic));
            let third: Vec<CheckRecord> =
                quadrature_cycles(curve, Some(&ctx), tol.quadrature, &qopts);
            push(&pfx, third.into_iter().last().expect("third-kind record"));
            push(
                &pfx,
                residues(&ctx, 1e-8_f64.max(tol.quadrature * 1e-2), &qopts),
            );
        }
    }
    for rec in matrix_structure(m, tol.analytic) {
        push("", rec);
    }
    push("", matrix_oracle(m, tol.quadrature, &qopts));
    out
}
