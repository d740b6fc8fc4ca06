//! Adaptive contour integration of the pulled-back differentials
//! `dz`, `-℘ dz`, `ξ_Q` and `dw + (f_q'/f_q) dz` along straight segments,
//! lifted cycles and small circles.
//!
//! This module deliberately integrates the `℘`-quotient form of `ξ_Q` and
//! never touches `ζ(q)` or `η`, so it is an independent check on the closed
//! forms.

use crate::lattice::{CurveData, CycleIndex};
use crate::third_kind::ThirdKindContext;
use crate::weierstrass::wp;
use crate::{Error, Result, C64, TWO_PI_I};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Minimum distance from a path to the singular set, relative to the
/// shortest period.
pub const POLE_CLEARANCE: f64 = 1e-3;

/// Differential form to integrate.
#[derive(Clone, Debug)]
pub enum FormKind<'a> {
    /// `ω = dx/y`, pulled back to `dz`.
    First,
    /// `η = -x dx/y`, pulled back to `-℘(z) dz`.
    Second,
    /// `ξ_Q`, pulled back to `½ (℘'(z) - ℘'(q)) / (℘(z) - ℘(q)) dz`.
    Third(ThirdKindContext<'a>),
    /// `exp_G^* ξ_Q = dw + (f_q'/f_q) dz` on the extension.
    Semiabelian(ThirdKindContext<'a>),
}

impl<'a> FormKind<'a> {
    fn context(&self) -> Option<&ThirdKindContext<'a>> {
        match self {
            FormKind::Third(ctx) | FormKind::Semiabelian(ctx) => Some(ctx),
            _ => None,
        }
    }

    fn integrand(&self, curve: &CurveData, z: C64) -> Result<C64> {
        match self {
            FormKind::First => Ok(C64::new(1.0, 0.0)),
            FormKind::Second => Ok(-wp(z, curve)?),
            FormKind::Third(ctx) | FormKind::Semiabelian(ctx) => ctx.xi_pullback(z),
        }
    }

    /// Representatives mod `Λ` of the poles, and of removable points that are
    /// numerically delicate.
    fn singular_points(&self) -> (Vec<C64>, Vec<C64>) {
        let zero = C64::new(0.0, 0.0);
        match self {
            FormKind::First => (vec![], vec![]),
            FormKind::Second => (vec![zero], vec![]),
            FormKind::Third(ctx) | FormKind::Semiabelian(ctx) => {
                (vec![zero, -ctx.q()], vec![ctx.q()])
            }
        }
    }
}

/// Geometric part of a path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PathKind {
    /// `base → base + ω_i` with an automatically chosen base point.
    Cycle(CycleIndex),
    /// Straight segment.
    Segment { from: C64, to: C64 },
    /// Positively oriented circle.
    Loop { center: C64, radius: f64 },
}

/// A path in the `z`-plane, optionally accompanied by a linear `w`-component
/// (only meaningful for [`FormKind::Semiabelian`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSpec {
    pub kind: PathKind,
    pub lifted_w: Option<C64>,
}

impl PathSpec {
    pub fn cycle(i: CycleIndex) -> Self {
        PathSpec {
            kind: PathKind::Cycle(i),
            lifted_w: None,
        }
    }

    pub fn segment(from: C64, to: C64) -> Self {
        PathSpec {
            kind: PathKind::Segment { from, to },
            lifted_w: None,
        }
    }

    pub fn circle(center: C64, radius: f64) -> Self {
        PathSpec {
            kind: PathKind::Loop { center, radius },
            lifted_w: None,
        }
    }

    pub fn with_lifted_w(mut self, w: C64) -> Self {
        self.lifted_w = Some(w);
        self
    }
}

/// Tuning knobs for the integrator.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureOptions {
    pub tolerance: f64,
    pub max_subdivisions: usize,
    /// Seed for re-drawing cycle base points after a pole collision.
    pub seed: u64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tolerance: 1e-12,
            max_subdivisions: 2000,
            seed: 42,
        }
    }
}

/// Value of an integral with its estimated absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: C64,
    pub error: f64,
    pub evaluations: usize,
}

/// An integral over a lifted cycle compared with its closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleIntegral {
    pub integral: Integral,
    pub base: C64,
    pub closed_form: C64,
    /// `k` with `integral ≈ closed_form + 2πi k`; always 0 for the first
    /// and second kind.
    pub branch_shift: i64,
}

impl CycleIntegral {
    /// Distance between the integral and the closed form, modulo `2πi` for
    /// multivalued forms.
    pub fn discrepancy(&self) -> f64 {
        (self.integral.value - self.closed_form - TWO_PI_I * self.branch_shift as f64).norm()
    }
}

/// Integrates `form` along `path` with default options.
pub fn integrate(form: &FormKind, path: &PathSpec, curve: &CurveData) -> Result<Integral> {
    integrate_with(form, path, curve, &QuadratureOptions::default())
}

pub fn integrate_with(
    form: &FormKind,
    path: &PathSpec,
    curve: &CurveData,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    check_context(form, curve)?;
    let lifted = match (form, path.lifted_w) {
        (FormKind::Semiabelian(_), w) => w.unwrap_or_default(),
        (_, None) => C64::new(0.0, 0.0),
        (_, Some(_)) => {
            return Err(Error::Path(
                "a w-component only applies to the semiabelian form".into(),
            ))
        }
    };
    let geometry = match path.kind {
        PathKind::Cycle(i) => Geometry::Segment {
            from: choose_base(form, curve, i, opts)?,
            delta: curve.omega(i),
        },
        PathKind::Segment { from, to } => Geometry::Segment {
            from,
            delta: to - from,
        },
        PathKind::Loop { center, radius } => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::Path(format!(
                    "loop radius must be positive, got {radius}"
                )));
            }
            Geometry::Circle { center, radius }
        }
    };
    check_clearance(form, curve, &geometry)?;
    let mut result = integrate_geometry(form, curve, &geometry, opts)?;
    result.value += lifted;
    Ok(result)
}

/// Integral of `form` over the lifted cycle `γ_i`, with its closed form.
pub fn cycle_integral(
    form: &FormKind,
    i: CycleIndex,
    curve: &CurveData,
    opts: &QuadratureOptions,
) -> Result<CycleIntegral> {
    check_context(form, curve)?;
    let base = choose_base(form, curve, i, opts)?;
    let geometry = Geometry::Segment {
        from: base,
        delta: curve.omega(i),
    };
    let integral = integrate_geometry(form, curve, &geometry, opts)?;
    let closed_form = match form {
        FormKind::First => curve.omega(i),
        FormKind::Second => curve.eta(i),
        FormKind::Third(ctx) | FormKind::Semiabelian(ctx) => ctx.quasi_period(i),
    };
    let branch_shift = match form {
        FormKind::First | FormKind::Second => 0,
        _ => ((integral.value - closed_form) / TWO_PI_I).re.round() as i64,
    };
    Ok(CycleIntegral {
        integral,
        base,
        closed_form,
        branch_shift,
    })
}

/// Integral over a small positively oriented circle around `center`. The
/// radius is a quarter of the distance to the nearest other singularity,
/// capped at a quarter of the shortest period.
pub fn residue_loop(
    form: &FormKind,
    center: C64,
    curve: &CurveData,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    check_context(form, curve)?;
    let (poles, removable) = form.singular_points();
    let all: Vec<C64> = poles.iter().chain(&removable).copied().collect();
    let reach = curve.scale();
    let near = tol_point(curve);
    let nearest_other = lattice_translates(curve, &all, center, reach)
        .into_iter()
        .map(|p| (p - center).norm())
        .filter(|&d| d > near)
        .fold(reach, f64::min);
    let radius = 0.25 * nearest_other;
    residue_loop_with_radius(form, center, radius, curve, opts)
}

/// As [`residue_loop`] with an explicit radius; fails if the circle encloses
/// more than one pole.
pub fn residue_loop_with_radius(
    form: &FormKind,
    center: C64,
    radius: f64,
    curve: &CurveData,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    check_context(form, curve)?;
    let (poles, _) = form.singular_points();
    let enclosed = lattice_translates(curve, &poles, center, radius)
        .into_iter()
        .filter(|p| (p - center).norm() < radius)
        .count();
    if enclosed > 1 {
        return Err(Error::Path(format!(
            "loop of radius {radius:e} around {center} encloses {enclosed} poles"
        )));
    }
    integrate_with(form, &PathSpec::circle(center, radius), curve, opts)
}

fn tol_point(curve: &CurveData) -> f64 {
    1e-8 * curve.scale()
}

fn check_context(form: &FormKind, curve: &CurveData) -> Result<()> {
    if let Some(ctx) = form.context() {
        if !std::ptr::eq(ctx.curve(), curve) {
            return Err(Error::Input(
                "third-kind context belongs to a different curve".into(),
            ));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
enum Geometry {
    Segment { from: C64, delta: C64 },
    Circle { center: C64, radius: f64 },
}

impl Geometry {
    fn eval(&self, t: f64) -> (C64, C64) {
        match *self {
            Geometry::Segment { from, delta } => (from + delta * t, delta),
            Geometry::Circle { center, radius } => {
                let u = C64::from_polar(radius, 2.0 * PI * t);
                (center + u, TWO_PI_I * u)
            }
        }
    }

    fn bounding_disc(&self) -> (C64, f64) {
        match *self {
            Geometry::Segment { from, delta } => (from + delta * 0.5, delta.norm() * 0.5),
            Geometry::Circle { center, radius } => (center, radius),
        }
    }

    fn distance(&self, p: C64) -> f64 {
        match *self {
            Geometry::Segment { from, delta } => {
                let len2 = delta.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                let t = ((p - from) * delta.conj()).re / len2;
                (p - from - delta * t.clamp(0.0, 1.0)).norm()
            }
            Geometry::Circle { center, radius } => ((p - center).norm() - radius).abs(),
        }
    }
}

/// All `s + λ` (`s` in `reps`, `λ ∈ Λ`) within distance `reach` of `center`.
fn lattice_translates(curve: &CurveData, reps: &[C64], center: C64, reach: f64) -> Vec<C64> {
    let basis = &curve.reduced.basis;
    let (w1, w2) = (basis.omega1(), basis.omega2());
    let det = (w1.conj() * w2).im;
    let mx = (reach * w2.norm() / det).ceil() as i64 + 1;
    let my = (reach * w1.norm() / det).ceil() as i64 + 1;
    let mut out = Vec::new();
    for &s in reps {
        let (x, y) = basis.coordinates(center - s);
        let (x0, y0) = (x.round() as i64, y.round() as i64);
        for m in x0 - mx..=x0 + mx {
            for n in y0 - my..=y0 + my {
                let p = s + basis.point(m, n);
                if (p - center).norm() <= reach {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn check_clearance(form: &FormKind, curve: &CurveData, geometry: &Geometry) -> Result<()> {
    let (poles, removable) = form.singular_points();
    let all: Vec<C64> = poles.iter().chain(&removable).copied().collect();
    if all.is_empty() {
        return Ok(());
    }
    let clearance = POLE_CLEARANCE * curve.scale();
    let (center, r) = geometry.bounding_disc();
    for p in lattice_translates(curve, &all, center, r + clearance) {
        let d = geometry.distance(p);
        if d < clearance {
            return Err(Error::Path(format!(
                "path passes within {d:e} of the singular point {p}"
            )));
        }
    }
    Ok(())
}

fn choose_base(
    form: &FormKind,
    curve: &CurveData,
    i: CycleIndex,
    opts: &QuadratureOptions,
) -> Result<C64> {
    let lattice = curve.lattice();
    let mut base = lattice.omega1() * 0.37 + lattice.omega2() * 0.29;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..64 {
        let geometry = Geometry::Segment {
            from: base,
            delta: curve.omega(i),
        };
        if check_clearance(form, curve, &geometry).is_ok() {
            return Ok(base);
        }
        base = lattice.omega1() * rng.gen::<f64>() + lattice.omega2() * rng.gen::<f64>();
    }
    Err(Error::Path(format!(
        "no pole-free base point found for cycle {}",
        i.number()
    )))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: C64,
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

/// One Gauss-Kronrod 7/15 panel: `(kronrod, error, roundoff floor)`.
fn gk15(f: &mut dyn FnMut(f64) -> Result<C64>, a: f64, b: f64) -> Result<(C64, f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = C64::new(0.0, 0.0);
    let mut gauss = C64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (k, (&x, &w)) in XGK.iter().zip(&WGK).enumerate() {
        let pts: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &s in pts {
            let v = f(c + s * h * x)?;
            kronrod += v * w;
            abs += v.norm() * w;
            if k % 2 == 1 {
                gauss += v * WG[k / 2];
            }
        }
    }
    let value = kronrod * h;
    let err = ((kronrod - gauss) * h).norm();
    let floor = 50.0 * f64::EPSILON * abs * h.abs();
    Ok((value, err.max(floor), floor))
}

fn integrate_geometry(
    form: &FormKind,
    curve: &CurveData,
    geometry: &Geometry,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    integrate_parametrized(&mut |z| form.integrand(curve, z), geometry, opts)
}

/// `∫ g(z) dz` along the segment `from → to` for an arbitrary integrand.
/// No pole-clearance check is made: `g` must be finite on the closed segment
/// except possibly at removable points.
pub fn integrate_segment_fn(
    g: &mut dyn FnMut(C64) -> Result<C64>,
    from: C64,
    to: C64,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    let geometry = Geometry::Segment {
        from,
        delta: to - from,
    };
    integrate_parametrized(g, &geometry, opts)
}

/// Whether the segment `from → to` keeps the clearance from the singular set
/// of `form`.
pub fn segment_is_clear(form: &FormKind, curve: &CurveData, from: C64, to: C64) -> bool {
    check_clearance(
        form,
        curve,
        &Geometry::Segment {
            from,
            delta: to - from,
        },
    )
    .is_ok()
}

fn integrate_parametrized(
    g: &mut dyn FnMut(C64) -> Result<C64>,
    geometry: &Geometry,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    let mut evaluations = 0usize;
    let mut f = |t: f64| -> Result<C64> {
        evaluations += 1;
        let (z, dz) = geometry.eval(t);
        Ok(g(z)? * dz)
    };
    let mut heap = BinaryHeap::new();
    let mut settled = C64::new(0.0, 0.0);
    let mut settled_err = 0.0;
    let (value, error, _) = gk15(&mut f, 0.0, 1.0)?;
    heap.push(Panel {
        a: 0.0,
        b: 1.0,
        value,
        error,
    });
    let mut subdivisions = 0;
    loop {
        let total: C64 = settled + heap.iter().map(|p| p.value).sum::<C64>();
        let err: f64 = settled_err + heap.iter().map(|p| p.error).sum::<f64>();
        let target = opts.tolerance * total.norm().max(1.0);
        if err <= target || heap.is_empty() {
            return Ok(Integral {
                value: total,
                error: err,
                evaluations,
            });
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::Numeric(format!(
                "quadrature did not converge after {subdivisions} subdivisions (error {err:e})"
            )));
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        subdivisions += 1;
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error, floor) = gk15(&mut f, a, b)?;
            if error <= floor || b - a < 1e-14 {
                settled += value;
                settled_err += error;
            } else {
                heap.push(Panel { a, b, value, error });
            }
        }
    }
}
