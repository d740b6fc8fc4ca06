//! Dimension of the motivic Galois group of a 1-motive from declared
//! dependence data.
//!
//! ```text
//! dim Gal = dim reductive + dim UR
//! dim reductive = 4 Σ_j 1/dim_Q k_j - n + 1          (n ≥ 1)
//! dim UR = 2 dim B + dim Z1 + dim Z/Z1
//! ```
//!
//! `dim B` counts the `k_j`-independent abelian logarithms `p_{jk}, q_{ji}`,
//! `dim Z1` the independent logarithms of the pairing values off its kernel
//! and `dim Z/Z1` the independent `ψ`-logarithms on the kernel. All of them
//! come from exact relation data; nothing here guesses a relation
//! numerically.

use crate::field::{FieldTag, QuadraticFieldScalar};
use crate::lattice::{CmDescriptor, CurveData};
use crate::motive::{period_generators, OneMotiveSpec};
use crate::rank::{rank, rank_over_field};
use crate::third_kind::ThirdKindContext;
use crate::weierstrass::{elliptic_exp, wp_and_prime};
use crate::{Error, Result, C64};
use num_rational::BigRational;

/// The discrete data the dimension formulas depend on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotiveShape {
    pub r: usize,
    pub s: usize,
    /// `k_j = End(E_j) ⊗ Q` for each curve.
    pub fields: Vec<FieldTag>,
}

impl MotiveShape {
    pub fn new(r: usize, s: usize, fields: Vec<FieldTag>) -> Self {
        MotiveShape { r, s, fields }
    }

    pub fn of(m: &OneMotiveSpec) -> Self {
        MotiveShape {
            r: m.r(),
            s: m.s(),
            fields: m.curves().iter().map(endomorphism_field).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }
}

pub fn endomorphism_field(curve: &CurveData) -> FieldTag {
    match curve.cm() {
        Some(CmDescriptor { discriminant, .. }) => FieldTag::Imaginary {
            discriminant: *discriminant,
        },
        None => FieldTag::Rational,
    }
}

/// A `k_j`-linear relation among `p_{j1..r}, q_{j1..s}` modulo `k_j Λ_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianRelation {
    pub curve: usize,
    /// `r + s` coefficients: first the `p`'s, then the `q`'s.
    pub coeffs: Vec<QuadraticFieldScalar>,
}

/// Declared dependence data of a 1-motive.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DependenceProfile {
    pub abelian_relations: Vec<AbelianRelation>,
    /// `r × s`; entry `(k, i)` is true when the pairing of `P_k` and `Q_i`
    /// is a root of unity.
    pub pairing_kernel: Vec<Vec<bool>>,
    /// Relations mod `2πiQ` among the pairing logarithms of the non-kernel
    /// pairs, taken in row-major `(k, i)` order.
    pub pairing_relations: Vec<Vec<BigRational>>,
    /// Relations mod `2πiQ` among the `ψ`-logarithms of the kernel pairs,
    /// in row-major `(k, i)` order.
    pub psi_relations: Vec<Vec<BigRational>>,
}

impl DependenceProfile {
    fn kernel_pairs(&self) -> usize {
        self.pairing_kernel.iter().flatten().filter(|&&b| b).count()
    }

    fn validate(&self, shape: &MotiveShape) -> Result<()> {
        if self.pairing_kernel.len() != shape.r
            || self.pairing_kernel.iter().any(|row| row.len() != shape.s)
        {
            return Err(Error::Input(format!(
                "pairing_kernel must be {} x {}",
                shape.r, shape.s
            )));
        }
        if shape.n() == 0 && self.pairing_kernel.iter().flatten().any(|&b| !b) {
            return Err(Error::Input(
                "without an abelian part every pair lies in the pairing kernel".into(),
            ));
        }
        for (idx, rel) in self.abelian_relations.iter().enumerate() {
            if rel.curve >= shape.n() {
                return Err(Error::Input(format!(
                    "abelian relation {idx} refers to curve {} but there are {}",
                    rel.curve + 1,
                    shape.n()
                )));
            }
        }
        Ok(())
    }
}

/// The dimensions of the motivic Galois group and its pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaloisDims {
    pub dim_reductive: usize,
    pub dim_b: usize,
    pub dim_z1: usize,
    pub dim_z_over_z1: usize,
    pub dim_ur: usize,
    pub dim_total: usize,
}

/// `4 Σ_j 1/dim_Q k_j - n + 1`, or for `n = 0` the dimension of `G_m`
/// when there is a torus and 0 otherwise.
pub fn dim_reductive(shape: &MotiveShape) -> usize {
    let n = shape.n();
    if n == 0 {
        return usize::from(shape.s >= 1);
    }
    let sum: usize = shape.fields.iter().map(|f| 4 / f.degree()).sum();
    let dim = sum + 1 - n;
    let non_cm = shape.fields.iter().filter(|f| f.degree() == 1).count();
    debug_assert_eq!(dim, 3 * non_cm + (n - non_cm) + 1);
    dim
}

pub fn dim_galois(shape: &MotiveShape, profile: &DependenceProfile) -> Result<GaloisDims> {
    profile.validate(shape)?;
    let (r, s) = (shape.r, shape.s);
    let mut dim_b = 0;
    for (j, &field) in shape.fields.iter().enumerate() {
        let rows: Vec<Vec<QuadraticFieldScalar>> = profile
            .abelian_relations
            .iter()
            .filter(|rel| rel.curve == j)
            .map(|rel| rel.coeffs.clone())
            .collect();
        let rk = rank_over_field(&rows, r + s, field)
            .map_err(|e| Error::Input(format!("abelian relations of curve {}: {e}", j + 1)))?;
        dim_b += r + s - rk;
    }
    let kernel = profile.kernel_pairs();
    let off_kernel = r * s - kernel;
    let rk_pairing = rank(&profile.pairing_relations, off_kernel)
        .map_err(|e| Error::Input(format!("pairing relations: {e}")))?;
    let rk_psi = rank(&profile.psi_relations, kernel)
        .map_err(|e| Error::Input(format!("psi relations: {e}")))?;
    let dim_z1 = off_kernel - rk_pairing;
    let dim_z_over_z1 = kernel - rk_psi;
    let dim_reductive = dim_reductive(shape);
    let dim_ur = 2 * dim_b + dim_z1 + dim_z_over_z1;
    debug_assert!(dim_b <= shape.n() * (r + s));
    debug_assert!(dim_z1 + dim_z_over_z1 <= r * s);
    Ok(GaloisDims {
        dim_reductive,
        dim_b,
        dim_z1,
        dim_z_over_z1,
        dim_ur,
        dim_total: dim_reductive + dim_ur,
    })
}

/// True when both toric arrows are trivial: every pair lies in the pairing
/// kernel and every `ψ`-logarithm is in `2πiQ`.
pub fn is_deficient(shape: &MotiveShape, profile: &DependenceProfile) -> Result<bool> {
    let dims = dim_galois(shape, profile)?;
    let all_kernel = profile.kernel_pairs() == shape.r * shape.s;
    Ok(all_kernel && dims.dim_z1 == 0 && dims.dim_z_over_z1 == 0)
}

/// One row of the dimension table for `r = n = s = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseRow {
    pub label: &'static str,
    pub dim_ur: usize,
    pub cm_total: usize,
    pub non_cm_total: usize,
}

/// Discriminant used for the CM column of the table.
const TABLE_CM_DISCRIMINANT: i64 = -4;

/// Dimensions for `[u: Z → G]`, `G` an extension of one curve by `G_m`, in
/// the six standard dependence situations.
pub fn case_table() -> Vec<CaseRow> {
    use num_bigint::BigInt;
    let one = || vec![BigRational::from_integer(BigInt::from(1))];
    let unit = |idx: usize| {
        let mut coeffs = vec![QuadraticFieldScalar::zero(); 2];
        coeffs[idx] = QuadraticFieldScalar::one();
        AbelianRelation { curve: 0, coeffs }
    };
    let (p_torsion, q_torsion) = (unit(0), unit(1));
    let kernel = |b: bool| vec![vec![b]];
    let rows: Vec<(&'static str, DependenceProfile)> = vec![
        (
            "Q, R torsion",
            DependenceProfile {
                abelian_relations: vec![p_torsion.clone(), q_torsion.clone()],
                pairing_kernel: kernel(true),
                pairing_relations: vec![],
                psi_relations: vec![one()],
            },
        ),
        (
            "P, Q torsion",
            DependenceProfile {
                abelian_relations: vec![p_torsion.clone(), q_torsion.clone()],
                pairing_kernel: kernel(true),
                ..Default::default()
            },
        ),
        (
            "R torsion",
            DependenceProfile {
                abelian_relations: vec![p_torsion.clone()],
                pairing_kernel: kernel(true),
                pairing_relations: vec![],
                psi_relations: vec![one()],
            },
        ),
        (
            "Q torsion",
            DependenceProfile {
                abelian_relations: vec![q_torsion],
                pairing_kernel: kernel(true),
                ..Default::default()
            },
        ),
        (
            "P torsion",
            DependenceProfile {
                abelian_relations: vec![p_torsion],
                pairing_kernel: kernel(true),
                ..Default::default()
            },
        ),
        (
            "P, Q End-lin. indep.",
            DependenceProfile {
                pairing_kernel: kernel(false),
                ..Default::default()
            },
        ),
    ];
    let cm = FieldTag::Imaginary {
        discriminant: TABLE_CM_DISCRIMINANT,
    };
    rows.into_iter()
        .map(|(label, profile)| {
            let non_cm = dim_galois(&MotiveShape::new(1, 1, vec![FieldTag::Rational]), &profile)
                .expect("table profiles are consistent");
            let with_cm = dim_galois(&MotiveShape::new(1, 1, vec![cm]), &profile)
                .expect("table profiles are consistent");
            debug_assert_eq!(non_cm.dim_ur, with_cm.dim_ur);
            CaseRow {
                label,
                dim_ur: non_cm.dim_ur,
                cm_total: with_cm.dim_total,
                non_cm_total: non_cm.dim_total,
            }
        })
        .collect()
}

/// A number in the transcendence statement.
#[derive(Clone, Debug, PartialEq)]
pub enum ReportValue {
    Number(C64),
    /// Affine coordinates of a point; `None` for points at infinity or
    /// coordinates with a pole.
    Point(Vec<Option<C64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportEntry {
    pub label: String,
    pub value: ReportValue,
}

/// The statement `tr.deg ≥ dim Gal` for a given motive, without any
/// judgment on its truth.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjectureReport {
    /// `"schanuel"`, `"elliptico-toric"` or `"1-motivic elliptic"`.
    pub shape: &'static str,
    pub lhs: Vec<ReportEntry>,
    pub rhs: usize,
    pub dims: GaloisDims,
    pub inequality_text: String,
}

pub fn conjecture_report(
    m: &OneMotiveSpec,
    profile: &DependenceProfile,
) -> Result<ConjectureReport> {
    let shape = MotiveShape::of(m);
    let dims = dim_galois(&shape, profile)?;
    let mut lhs = Vec::new();
    let num = |label: String, v: C64| ReportEntry {
        label,
        value: ReportValue::Number(v),
    };
    for (j, curve) in m.curves().iter().enumerate() {
        lhs.push(num(format!("g2[{}]", j + 1), curve.g2()));
        lhs.push(num(format!("g3[{}]", j + 1), curve.g3()));
    }
    for (j, curve) in m.curves().iter().enumerate() {
        for i in 0..m.s() {
            let pt = elliptic_exp(m.q(j, i), curve);
            let coords = if pt.at_infinity {
                vec![None, None]
            } else {
                vec![Some(pt.x), Some(pt.y)]
            };
            lhs.push(ReportEntry {
                label: format!("Q[{},{}]", j + 1, i + 1),
                value: ReportValue::Point(coords),
            });
        }
    }
    for k in 0..m.r() {
        lhs.push(ReportEntry {
            label: format!("R[{}]", k + 1),
            value: ReportValue::Point(r_point(m, k)?),
        });
    }
    let cm_dropped: Vec<String> = m
        .curves()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_cm())
        .flat_map(|(j, _)| [format!("omega[{},2]", j + 1), format!("eta[{},2]", j + 1)])
        .collect();
    for g in period_generators(m)?.values {
        if !cm_dropped.contains(&g.label) {
            lhs.push(num(g.label, g.value));
        }
    }
    let shape_name = if m.n() == 0 {
        "schanuel"
    } else if (0..m.n()).all(|j| (0..m.s()).all(|i| m.is_split(j, i))) {
        "elliptico-toric"
    } else {
        "1-motivic elliptic"
    };
    let labels: Vec<&str> = lhs.iter().map(|e| e.label.as_str()).collect();
    let inequality_text = format!("tran.deg_Q Q({}) >= {}", labels.join(", "), dims.dim_total);
    Ok(ConjectureReport {
        shape: shape_name,
        lhs,
        rhs: dims.dim_total,
        dims,
        inequality_text,
    })
}

/// Affine coordinates of `R_k ∈ G`: for each curve `x, y` of `P_{jk}`, then
/// the fibre coordinates of every `(j, i)`. With no curves, `exp(l_{ik})`.
fn r_point(m: &OneMotiveSpec, k: usize) -> Result<Vec<Option<C64>>> {
    if m.n() == 0 {
        return Ok((0..m.s()).map(|i| Some(m.torus_log(k, i).exp())).collect());
    }
    let mut coords = Vec::new();
    for (j, curve) in m.curves().iter().enumerate() {
        match wp_and_prime(m.p(j, k), curve) {
            Ok((x, y)) => coords.extend([Some(x), Some(y)]),
            Err(_) => coords.extend([None, None]),
        }
    }
    for (j, curve) in m.curves().iter().enumerate() {
        for i in 0..m.s() {
            let (p, l) = (m.p(j, k), m.l(j, i, k));
            if m.is_split(j, i) {
                coords.extend([Some(l.exp()), None]);
                continue;
            }
            if curve.is_lattice_point(p) {
                coords.extend([None, None]);
                continue;
            }
            let ctx = ThirdKindContext::new(curve, m.q(j, i))?;
            let h = ctx.semiabelian_exp(l, p);
            let fibre = |v: C64| {
                let a = v / h[2];
                a.is_finite().then_some(a)
            };
            coords.extend([fibre(h[3]), fibre(h[4])]);
        }
    }
    Ok(coords)
}

/// Numerical check of one declared abelian relation.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationResidual {
    pub index: usize,
    pub curve: usize,
    /// `Σ c_t · symbol_t` with `γ` acting by the CM action.
    pub combination: C64,
    /// Smallest `N ≤ MAX_DENOMINATOR` with `N · combination ∈ Λ`, if any.
    pub denominator: Option<u32>,
    /// Distance of `N · combination` to `Λ` divided by the shortest period,
    /// minimized over `N`.
    pub residual: f64,
    pub flagged: bool,
}

pub const RESIDUAL_THRESHOLD: f64 = 1e-6;
pub const MAX_DENOMINATOR: u32 = 24;

pub fn validate_profile(
    m: &OneMotiveSpec,
    profile: &DependenceProfile,
) -> Result<Vec<RelationResidual>> {
    let shape = MotiveShape::of(m);
    profile.validate(&shape)?;
    let (r, s) = (m.r(), m.s());
    let mut out = Vec::new();
    for (index, rel) in profile.abelian_relations.iter().enumerate() {
        let j = rel.curve;
        let curve = &m.curves()[j];
        if rel.coeffs.len() != r + s {
            return Err(Error::Input(format!(
                "abelian relation {index} has {} coefficients, expected {}",
                rel.coeffs.len(),
                r + s
            )));
        }
        let gamma = curve.cm().map_or(C64::new(0.0, 0.0), |cm| cm.action);
        let symbols = (0..r).map(|k| m.p(j, k)).chain((0..s).map(|i| m.q(j, i)));
        let combination: C64 = rel
            .coeffs
            .iter()
            .zip(symbols)
            .map(|(c, v)| c.to_complex(gamma) * v)
            .sum();
        let mut best = f64::INFINITY;
        let mut denominator = None;
        for n in 1..=MAX_DENOMINATOR {
            let d = curve.distance_to_lattice(combination * n as f64) / curve.scale();
            best = best.min(d);
            if d <= RESIDUAL_THRESHOLD {
                denominator = Some(n);
                best = d;
                break;
            }
        }
        out.push(RelationResidual {
            index,
            curve: j,
            combination,
            denominator,
            residual: best,
            flagged: denominator.is_none(),
        });
    }
    Ok(out)
}
