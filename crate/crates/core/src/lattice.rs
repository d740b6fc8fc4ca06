//! Period lattices and curves in Weierstrass form `y² = 4x³ - g2 x - g3`.
//!
//! Every lattice is carried with the orientation `Im(ω2/ω1) > 0`, which makes
//! the Legendre relation read `η1 ω2 - η2 ω1 = 2πi`. Internally each curve also
//! keeps an `SL2(Z)`-equivalent *reduced* basis whose `τ` lies in the standard
//! fundamental domain; all series are summed there.

use crate::theta::ThetaSeries;
use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Arguments closer than this (relative to the shortest period) to a lattice
/// point are treated as poles.
pub(crate) const POLE_EPS: f64 = 1e-8;

/// An oriented lattice basis `Λ = Zω1 + Zω2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeBasis {
    omega1: C64,
    omega2: C64,
}

impl LatticeBasis {
    /// Builds an oriented basis, replacing `ω2` by `-ω2` when `Im(ω2/ω1) < 0`.
    pub fn new(omega1: C64, omega2: C64) -> Result<Self> {
        if !(omega1.is_finite() && omega2.is_finite()) {
            return Err(Error::Orientation("non-finite period".into()));
        }
        if omega1.norm() == 0.0 {
            return Err(Error::Orientation("omega1 = 0".into()));
        }
        let mut omega2 = omega2;
        let tau = omega2 / omega1;
        if tau.im < 0.0 {
            omega2 = -omega2;
        }
        let tau = omega2 / omega1;
        if !(tau.im > 1e-12 * tau.norm().max(1.0)) {
            return Err(Error::Orientation(format!(
                "periods are R-linearly dependent (tau = {tau})"
            )));
        }
        Ok(LatticeBasis { omega1, omega2 })
    }

    pub fn omega1(&self) -> C64 {
        self.omega1
    }

    pub fn omega2(&self) -> C64 {
        self.omega2
    }

    pub fn tau(&self) -> C64 {
        self.omega2 / self.omega1
    }

    pub fn period(&self, i: CycleIndex) -> C64 {
        match i {
            CycleIndex::First => self.omega1,
            CycleIndex::Second => self.omega2,
        }
    }

    /// `m ω1 + n ω2`.
    pub fn point(&self, m: i64, n: i64) -> C64 {
        self.omega1 * m as f64 + self.omega2 * n as f64
    }

    /// Real coordinates `(x, y)` with `z = x ω1 + y ω2`.
    pub fn coordinates(&self, z: C64) -> (f64, f64) {
        let (a, b) = (self.omega1.re, self.omega2.re);
        let (c, d) = (self.omega1.im, self.omega2.im);
        let det = a * d - b * c;
        ((d * z.re - b * z.im) / det, (a * z.im - c * z.re) / det)
    }

    /// Scales both periods by `lambda`.
    pub fn scaled(&self, lambda: C64) -> Result<Self> {
        LatticeBasis::new(self.omega1 * lambda, self.omega2 * lambda)
    }

    /// Applies the integer change of basis `(ω1', ω2') = M (ω1, ω2)`.
    pub fn transformed(&self, m: [[i64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det != 1 {
            return Err(Error::Orientation(format!(
                "change of basis has determinant {det}"
            )));
        }
        LatticeBasis::new(self.point(m[0][0], m[0][1]), self.point(m[1][0], m[1][1]))
    }

    /// `SL2(Z)`-equivalent basis with `τ` in the standard fundamental domain,
    /// and the matrix `M` with `(ω1', ω2') = M (ω1, ω2)`.
    pub fn reduced(&self) -> (LatticeBasis, [[i64; 2]; 2]) {
        let mut m = [[1i64, 0], [0, 1]];
        let (mut w1, mut w2) = (self.omega1, self.omega2);
        for _ in 0..200 {
            let tau = w2 / w1;
            let k = tau.re.round();
            if k != 0.0 {
                w2 -= w1 * k;
                let k = k as i64;
                m[1][0] -= k * m[0][0];
                m[1][1] -= k * m[0][1];
            }
            let tau = w2 / w1;
            if tau.norm_sqr() < 1.0 - 1e-14 {
                let (n1, n2) = (w2, -w1);
                w1 = n1;
                w2 = n2;
                m = [m[1], [-m[0][0], -m[0][1]]];
            } else {
                break;
            }
        }
        // Rebuild from integers so the reduced periods carry no drift.
        let basis = LatticeBasis {
            omega1: self.point(m[0][0], m[0][1]),
            omega2: self.point(m[1][0], m[1][1]),
        };
        (basis, m)
    }
}

/// Index of a basis cycle `γ1`, `γ2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CycleIndex {
    First,
    Second,
}

impl CycleIndex {
    pub const BOTH: [CycleIndex; 2] = [CycleIndex::First, CycleIndex::Second];

    pub fn from_number(i: usize) -> Result<Self> {
        match i {
            1 => Ok(CycleIndex::First),
            2 => Ok(CycleIndex::Second),
            _ => Err(Error::Input(format!("cycle index must be 1 or 2, got {i}"))),
        }
    }

    pub fn number(self) -> usize {
        match self {
            CycleIndex::First => 1,
            CycleIndex::Second => 2,
        }
    }
}

/// `z = z0 + m ω1 + n ω2` with `z0` in the half-open parallelogram
/// `{x ω1 + y ω2 : x, y ∈ [0, 1)}`.
pub fn reduce_mod_lattice(z: C64, basis: &LatticeBasis) -> (C64, i64, i64) {
    let (x, y) = basis.coordinates(z);
    let m = snapped_floor(x);
    let n = snapped_floor(y);
    (z - basis.point(m, n), m, n)
}

/// `floor`, except that values within rounding distance of an integer snap to it.
fn snapped_floor(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * x.abs().max(1.0) {
        r as i64
    } else {
        x.floor() as i64
    }
}

/// `(g2, g3) = (60 G4, 140 G6)` of the lattice, via `E4`, `E6` q-series after
/// reducing `τ` to the fundamental domain.
pub fn invariants_from_periods(basis: &LatticeBasis) -> Result<(C64, C64)> {
    let basis = LatticeBasis::new(basis.omega1, basis.omega2)?;
    let (reduced, _) = basis.reduced();
    let tau = reduced.tau();
    let q = (C64::i() * 2.0 * PI * tau).exp();
    let mut e4 = C64::new(0.0, 0.0);
    let mut e6 = C64::new(0.0, 0.0);
    let mut qn = C64::new(1.0, 0.0);
    for n in 1..200 {
        qn *= q;
        let nf = n as f64;
        let lambert = qn / (1.0 - qn);
        let t4 = lambert * nf.powi(3);
        let t6 = lambert * nf.powi(5);
        e4 += t4;
        e6 += t6;
        if t6.norm() < 1e-18 * (1.0 + e6.norm()) && t4.norm() < 1e-18 {
            break;
        }
    }
    let e4 = 1.0 + 240.0 * e4;
    let e6 = 1.0 - 504.0 * e6;
    let w = reduced.omega1;
    let g2 = (4.0 * PI.powi(4) / 3.0) * e4 / w.powi(4);
    let g3 = (8.0 * PI.powi(6) / 27.0) * e6 / w.powi(6);
    Ok((g2, g3))
}

/// Complex multiplication data: the discriminant `d < 0` of the endomorphism
/// order and the complex number by which `√d` acts on `C/Λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CmDescriptor {
    pub discriminant: i64,
    pub action: C64,
}

impl CmDescriptor {
    /// Descriptor with the default action `i √|d|`.
    pub fn new(discriminant: i64) -> Result<Self> {
        if discriminant >= 0 {
            return Err(Error::Input(format!(
                "CM discriminant must be negative, got {discriminant}"
            )));
        }
        Ok(CmDescriptor {
            discriminant,
            action: C64::new(0.0, (-discriminant as f64).sqrt()),
        })
    }

    pub fn with_action(discriminant: i64, action: C64) -> Result<Self> {
        let cm = CmDescriptor::new(discriminant)?;
        let d = discriminant as f64;
        if (action * action - d).norm() > 1e-9 * d.abs() {
            return Err(Error::Input(format!(
                "CM action {action} does not square to the discriminant {discriminant}"
            )));
        }
        Ok(CmDescriptor { action, ..cm })
    }
}

/// Reduced basis plus everything needed to sum series on it.
#[derive(Clone, Debug)]
pub(crate) struct ReducedLattice {
    pub basis: LatticeBasis,
    pub eta1: C64,
    pub eta2: C64,
    pub theta: ThetaSeries,
}

impl ReducedLattice {
    fn new(basis: LatticeBasis) -> Self {
        let theta = ThetaSeries::new(basis.omega1, basis.tau());
        let eta1 = theta.eta1();
        let eta2 = 2.0 * theta.zeta(basis.omega2 / 2.0);
        ReducedLattice {
            basis,
            eta1,
            eta2,
            theta,
        }
    }

    /// `z = z0 + m ω1' + n ω2'` with `z0` in the centered parallelogram
    /// `[-1/2, 1/2)²` of the reduced basis.
    pub fn split(&self, z: C64) -> (C64, i64, i64) {
        let (x, y) = self.basis.coordinates(z);
        let m = (x + 0.5).floor() as i64;
        let n = (y + 0.5).floor() as i64;
        (z - self.basis.point(m, n), m, n)
    }

    /// `η(m ω1' + n ω2')`.
    pub fn eta_of(&self, m: i64, n: i64) -> C64 {
        self.eta1 * m as f64 + self.eta2 * n as f64
    }

    pub fn scale(&self) -> f64 {
        self.basis.omega1.norm()
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn distance_to_lattice(&self, z: C64) -> f64 {
        let (z0, _, _) = self.split(z);
        let mut best = f64::INFINITY;
        for m in -1..=1 {
            for n in -1..=1 {
                best = best.min((z0 - self.basis.point(m, n)).norm());
            }
        }
        best
    }
}

/// An elliptic curve over `C` with its period data.
#[derive(Clone, Debug)]
pub struct CurveData {
    g2: C64,
    g3: C64,
    lattice: LatticeBasis,
    eta1: C64,
    eta2: C64,
    cm: Option<CmDescriptor>,
    roots: [C64; 3],
    pub(crate) reduced: ReducedLattice,
}

impl CurveData {
    /// Curve attached to a lattice; invariants come from the Eisenstein series.
    pub fn from_periods(basis: LatticeBasis) -> Result<Self> {
        let (g2, g3) = invariants_from_periods(&basis)?;
        Self::assemble(g2, g3, basis)
    }

    fn assemble(g2: C64, g3: C64, lattice: LatticeBasis) -> Result<Self> {
        let (reduced_basis, m) = lattice.reduced();
        let reduced = ReducedLattice::new(reduced_basis);
        // user periods in terms of the reduced ones: inverse of M (det 1)
        let inv = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]];
        let eta1 = reduced.eta_of(inv[0][0], inv[0][1]);
        let eta2 = reduced.eta_of(inv[1][0], inv[1][1]);
        let discriminant = g2 * g2 * g2 - 27.0 * g3 * g3;
        let roots = cubic_roots(g2, g3).ok_or(Error::SingularCurve { discriminant })?;
        Ok(CurveData {
            g2,
            g3,
            lattice,
            eta1,
            eta2,
            cm: None,
            roots,
            reduced,
        })
    }

    /// Attaches a CM descriptor after checking that its action preserves `Λ`.
    pub fn with_cm(mut self, cm: CmDescriptor) -> Result<Self> {
        for w in [self.lattice.omega1, self.lattice.omega2] {
            let image = cm.action * w;
            let dist = self.reduced.distance_to_lattice(image);
            if dist > 1e-6 * self.reduced.scale() {
                return Err(Error::Input(format!(
                    "CM action {} does not preserve the period lattice (distance {dist:e})",
                    cm.action
                )));
            }
        }
        self.cm = Some(cm);
        Ok(self)
    }

    pub fn g2(&self) -> C64 {
        self.g2
    }

    pub fn g3(&self) -> C64 {
        self.g3
    }

    pub fn lattice(&self) -> &LatticeBasis {
        &self.lattice
    }

    pub fn omega(&self, i: CycleIndex) -> C64 {
        self.lattice.period(i)
    }

    pub fn eta(&self, i: CycleIndex) -> C64 {
        match i {
            CycleIndex::First => self.eta1,
            CycleIndex::Second => self.eta2,
        }
    }

    pub fn cm(&self) -> Option<&CmDescriptor> {
        self.cm.as_ref()
    }

    pub fn is_cm(&self) -> bool {
        self.cm.is_some()
    }

    /// Roots of `4x³ - g2 x - g3`.
    pub fn roots(&self) -> [C64; 3] {
        self.roots
    }

    pub fn discriminant(&self) -> C64 {
        self.g2 * self.g2 * self.g2 - 27.0 * self.g3 * self.g3
    }

    /// Length of the shortest nonzero period; the natural length scale.
    pub fn scale(&self) -> f64 {
        self.reduced.scale()
    }

    pub fn distance_to_lattice(&self, z: C64) -> f64 {
        self.reduced.distance_to_lattice(z)
    }

    pub fn is_lattice_point(&self, z: C64) -> bool {
        self.distance_to_lattice(z) <= POLE_EPS * self.scale()
    }

    /// `η(λ)` for `λ = m ω1 + n ω2` in the curve's own basis.
    pub fn eta_of(&self, m: i64, n: i64) -> C64 {
        self.eta1 * m as f64 + self.eta2 * n as f64
    }
}

/// Curve with the given invariants, its lattice recovered by the complex AGM.
pub fn curve_from_invariants(g2: C64, g3: C64) -> Result<CurveData> {
    if !(g2.is_finite() && g3.is_finite()) {
        return Err(Error::Input("non-finite invariants".into()));
    }
    let discriminant = g2 * g2 * g2 - 27.0 * g3 * g3;
    let size = (g2 * g2 * g2).norm().max(27.0 * (g3 * g3).norm());
    if size == 0.0 || discriminant.norm() <= 1e-13 * size {
        return Err(Error::SingularCurve { discriminant });
    }
    let roots = cubic_roots(g2, g3).ok_or(Error::SingularCurve { discriminant })?;
    let scale = g2.norm().sqrt().max(g3.norm().cbrt());
    let mut best: Option<(f64, LatticeBasis)> = None;
    for [a, b, c] in PERMUTATIONS {
        let (ea, eb, ec) = (roots[a], roots[b], roots[c]);
        let w1 = PI / agm((ea - ec).sqrt(), (ea - eb).sqrt());
        let w2 = PI / agm((eb - ec).sqrt(), (eb - ea).sqrt());
        let Ok(basis) = LatticeBasis::new(w1, w2) else {
            continue;
        };
        let (reduced, _) = basis.reduced();
        let Ok((h2, h3)) = invariants_from_periods(&reduced) else {
            continue;
        };
        let err = ((h2 - g2).norm() / (scale * scale)).max((h3 - g3).norm() / scale.powi(3));
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, reduced));
        }
        if err <= 1e-12 {
            break;
        }
    }
    let (err, basis) = best.ok_or_else(|| {
        Error::Numeric(format!("period recovery failed for g2 = {g2}, g3 = {g3}"))
    })?;
    if err > 1e-10 {
        return Err(Error::Numeric(format!(
            "period recovery for g2 = {g2}, g3 = {g3} reproduces the invariants only to {err:e}"
        )));
    }
    CurveData::assemble(g2, g3, canonical_basis(basis))
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Among the reduced bases equivalent under the boundary symmetries of the
/// fundamental domain, picks the one whose `ω1` has the smallest argument.
fn canonical_basis(basis: LatticeBasis) -> LatticeBasis {
    let (w1, w2) = (basis.omega1, basis.omega2);
    let mut candidates = vec![(w1, w2), (-w1, -w2)];
    if (basis.tau().norm() - 1.0).abs() < 1e-9 {
        candidates.push((w2, -w1));
        candidates.push((-w2, w1));
    }
    let key = |w: C64| {
        let a = w.arg();
        (a.abs(), -a)
    };
    candidates
        .into_iter()
        .min_by(|a, b| key(a.0).partial_cmp(&key(b.0)).unwrap())
        .map(|(a, b)| LatticeBasis {
            omega1: a,
            omega2: b,
        })
        .unwrap()
}

/// Arithmetic-geometric mean with the optimal choice of square root at each
/// step (`|a - b| ≤ |a + b|`).
pub(crate) fn agm(a: C64, b: C64) -> C64 {
    let (mut a, mut b) = (a, b);
    if (a - b).norm() > (a + b).norm() {
        b = -b;
    }
    for _ in 0..64 {
        let a1 = (a + b) * 0.5;
        let mut b1 = (a * b).sqrt();
        if (a1 - b1).norm() > (a1 + b1).norm() {
            b1 = -b1;
        }
        a = a1;
        b = b1;
        if (a - b).norm() <= 1e-16 * a.norm() {
            break;
        }
    }
    (a + b) * 0.5
}

/// Roots of `4x³ - g2 x - g3` by Cardano's formula polished with Newton steps.
/// `None` when all three coincide (`g2 = g3 = 0`).
pub(crate) fn cubic_roots(g2: C64, g3: C64) -> Option<[C64; 3]> {
    let p = -g2 / 4.0;
    let q = -g3 / 4.0;
    if p.norm() == 0.0 && q.norm() == 0.0 {
        return None;
    }
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let c1 = -q / 2.0 + disc;
    let c2 = -q / 2.0 - disc;
    let u3 = if c1.norm() >= c2.norm() { c1 } else { c2 };
    let u = u3.powf(1.0 / 3.0);
    let unit = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut roots = [C64::new(0.0, 0.0); 3];
    let mut uk = u;
    for root in roots.iter_mut() {
        *root = uk - p / (3.0 * uk);
        uk *= unit;
    }
    for root in roots.iter_mut() {
        for _ in 0..3 {
            let x = *root;
            let f = 4.0 * x * x * x - g2 * x - g3;
            let fp = 12.0 * x * x - g2;
            if fp.norm() == 0.0 {
                break;
            }
            let step = f / fp;
            if !step.is_finite() {
                break;
            }
            *root = x - step;
        }
    }
    Some(roots)
}
