//! JSON input schemas and deterministic output encoding.
//!
//! Complex numbers are `[re, im]` (a bare number is read as real). Exact
//! rationals are integers or strings `"a/b"`. Output floats are written with
//! 17 significant digits; non-finite values become `null`.
//!
//! Curve:
//!
//! ```json
//! {"g2": [4, 0], "g3": [0, 0], "cm": {"discriminant": -4}}
//! {"omega1": [1, 0], "omega2": [0.2, 1.1]}
//! ```
//!
//! Motive (indices `q_logs[j][i]`, `p_logs[j][k]`, `l_logs[j][i][k]`,
//! `torus_logs[k][i]`):
//!
//! ```json
//! {"curves": [...], "q_logs": [[[0.3, 0.1]]], "p_logs": [[[0.2, 0.4]]],
//!  "l_logs": [[[[0.1, 0]]]]}
//! ```
//!
//! Profile (curve numbers are 1-based; `coeffs` entries are `a` or `[a, b]`
//! meaning `a + b γ`):
//!
//! ```json
//! {"abelian_relations": [{"curve": 1, "coeffs": [1, 0]}],
//!  "pairing_kernel": [[true]], "pairing_relations": [], "psi_relations": [[1]]}
//! ```

use crate::field::QuadraticFieldScalar;
use crate::galois::{AbelianRelation, DependenceProfile, MotiveShape};
use crate::lattice::{curve_from_invariants, CmDescriptor, CurveData, LatticeBasis};
use crate::motive::{OneMotiveSpec, PeriodMatrix};
use crate::{Error, Result, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use std::fmt;

/// A float written with 17 significant digits, or `null` if not finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fx(pub f64);

impl Serialize for Fx {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw =
            RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// A complex number as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx(pub C64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [Fx(self.0.re), Fx(self.0.im)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Cx;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a complex number [re, im] or a real number")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Cx, E> {
                Ok(Cx(C64::new(v, 0.0)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Cx, E> {
                Ok(Cx(C64::new(v as f64, 0.0)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Cx, E> {
                Ok(Cx(C64::new(v as f64, 0.0)))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Cx, A::Error> {
                let re: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Cx(C64::new(re, im)))
            }
        }
        d.deserialize_any(V)
    }
}

/// Parses `"a"`, `"-a/b"` (whitespace-tolerant) into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Input(format!("`{s}` is not a rational number a or a/b"));
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Input(format!("`{s}` has a zero denominator")));
    }
    Ok(BigRational::new(num, den))
}

/// Exact rational in JSON: an integer or a string `"a/b"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(pub BigRational);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a string \"a/b\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rat, E> {
                Ok(Rat(BigRational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rat, E> {
                Ok(Rat(BigRational::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rat, E> {
                Err(E::custom(format!(
                    "inexact number {v}; write non-integers as \"a/b\""
                )))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rat, E> {
                parse_rational(v).map(Rat).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// `a` or `[a, b]` for `a + b γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ScalarJson(BigRational, BigRational);

impl<'de> Deserialize<'de> for ScalarJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair(Rat, Rat),
            Single(Rat),
        }
        match Repr::deserialize(d).map_err(|_| {
            de::Error::custom("expected a rational a, \"a/b\" or a pair [a, b] for a + bγ")
        })? {
            Repr::Pair(a, b) => Ok(ScalarJson(a.0, b.0)),
            Repr::Single(a) => Ok(ScalarJson(a.0, BigRational::zero())),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CmJson {
    discriminant: i64,
    action: Option<Cx>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveJson {
    g2: Option<Cx>,
    g3: Option<Cx>,
    omega1: Option<Cx>,
    omega2: Option<Cx>,
    cm: Option<CmJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MotiveJson {
    curves: Vec<CurveJson>,
    #[serde(default)]
    q_logs: Vec<Vec<Cx>>,
    #[serde(default)]
    p_logs: Vec<Vec<Cx>>,
    #[serde(default)]
    l_logs: Vec<Vec<Vec<Cx>>>,
    #[serde(default)]
    torus_logs: Vec<Vec<Cx>>,
    r: Option<usize>,
    s: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AbelianJson {
    curve: usize,
    coeffs: Vec<ScalarJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileJson {
    #[serde(default)]
    abelian_relations: Vec<AbelianJson>,
    #[serde(default)]
    pairing_kernel: Vec<Vec<bool>>,
    #[serde(default)]
    pairing_relations: Vec<Vec<Rat>>,
    #[serde(default)]
    psi_relations: Vec<Vec<Rat>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CombinedJson {
    motive: Box<RawValue>,
    profile: Box<RawValue>,
}

fn from_json<'de, T: Deserialize<'de>>(text: &'de str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| Error::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    Ok(value)
}

fn at(path: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Schema { .. } => e,
        other => Error::Schema {
            path,
            message: other.to_string(),
        },
    }
}

fn build_curve(c: CurveJson) -> Result<CurveData> {
    let curve = match (c.g2, c.g3, c.omega1, c.omega2) {
        (Some(g2), Some(g3), None, None) => curve_from_invariants(g2.0, g3.0)?,
        (None, None, Some(w1), Some(w2)) => {
            CurveData::from_periods(LatticeBasis::new(w1.0, w2.0)?)?
        }
        _ => {
            return Err(Error::Input(
                "give exactly one of {g2, g3} or {omega1, omega2}".into(),
            ))
        }
    };
    match c.cm {
        None => Ok(curve),
        Some(cm) => {
            let desc = match cm.action {
                Some(a) => CmDescriptor::with_action(cm.discriminant, a.0)?,
                None => CmDescriptor::new(cm.discriminant)?,
            };
            curve.with_cm(desc)
        }
    }
}

/// Parses a single curve description.
pub fn parse_curve(text: &str) -> Result<CurveData> {
    build_curve(from_json(text)?).map_err(at(".".into()))
}

fn unwrap2(v: Vec<Vec<Cx>>) -> Vec<Vec<C64>> {
    v.into_iter()
        .map(|r| r.into_iter().map(|z| z.0).collect())
        .collect()
}

fn build_motive(m: MotiveJson) -> Result<OneMotiveSpec> {
    let curves = m
        .curves
        .into_iter()
        .enumerate()
        .map(|(j, c)| build_curve(c).map_err(at(format!("curves[{j}]"))))
        .collect::<Result<Vec<_>>>()?;
    let n = curves.len();
    let r = m.r.unwrap_or_else(|| {
        if n > 0 {
            m.p_logs.first().map_or(0, Vec::len)
        } else {
            m.torus_logs.len()
        }
    });
    let s = m.s.unwrap_or_else(|| {
        if n > 0 {
            m.q_logs.first().map_or(0, Vec::len)
        } else {
            m.torus_logs.first().map_or(0, Vec::len)
        }
    });
    let l_logs = m.l_logs.into_iter().map(unwrap2).collect();
    OneMotiveSpec::new(
        r,
        s,
        curves,
        unwrap2(m.q_logs),
        unwrap2(m.p_logs),
        l_logs,
        unwrap2(m.torus_logs),
    )
    .map_err(at(".".into()))
}

/// Parses a motive description.
pub fn parse_motive(text: &str) -> Result<OneMotiveSpec> {
    build_motive(from_json(text)?)
}

fn build_profile(p: ProfileJson, shape: &MotiveShape) -> Result<DependenceProfile> {
    let mut abelian_relations = Vec::new();
    for (idx, rel) in p.abelian_relations.into_iter().enumerate() {
        let path = format!("abelian_relations[{idx}]");
        if rel.curve == 0 || rel.curve > shape.n() {
            return Err(Error::Schema {
                path: format!("{path}.curve"),
                message: format!("curve number must be in 1..={}", shape.n()),
            });
        }
        let field = shape.fields[rel.curve - 1];
        let coeffs = rel
            .coeffs
            .into_iter()
            .enumerate()
            .map(|(t, ScalarJson(a, b))| {
                QuadraticFieldScalar::new(a, b, field).map_err(at(format!("{path}.coeffs[{t}]")))
            })
            .collect::<Result<Vec<_>>>()?;
        abelian_relations.push(AbelianRelation {
            curve: rel.curve - 1,
            coeffs,
        });
    }
    let rats = |v: Vec<Vec<Rat>>| {
        v.into_iter()
            .map(|r| r.into_iter().map(|x| x.0).collect())
            .collect()
    };
    Ok(DependenceProfile {
        abelian_relations,
        pairing_kernel: p.pairing_kernel,
        pairing_relations: rats(p.pairing_relations),
        psi_relations: rats(p.psi_relations),
    })
}

/// Parses a dependence profile for a motive of the given shape.
pub fn parse_profile(text: &str, shape: &MotiveShape) -> Result<DependenceProfile> {
    build_profile(from_json(text)?, shape)
}

/// Parses `{"motive": ..., "profile": ...}`.
pub fn parse_motive_with_profile(text: &str) -> Result<(OneMotiveSpec, DependenceProfile)> {
    let combined: CombinedJson = from_json(text)?;
    let motive = parse_motive(combined.motive.get()).map_err(|e| prefix("motive", e))?;
    let shape = MotiveShape::of(&motive);
    let profile =
        parse_profile(combined.profile.get(), &shape).map_err(|e| prefix("profile", e))?;
    Ok((motive, profile))
}

fn prefix(root: &str, e: Error) -> Error {
    match e {
        Error::Schema { path, message } => Error::Schema {
            path: if path == "." {
                root.to_string()
            } else {
                format!("{root}.{path}")
            },
            message,
        },
        other => other,
    }
}

#[derive(Serialize)]
struct PeriodMatrixOut<'a> {
    size: usize,
    row_labels: &'a [String],
    col_labels: &'a [String],
    entries: Vec<Vec<Cx>>,
    determinant: Cx,
}

/// JSON encoding of a period matrix together with its determinant.
pub fn period_matrix_json(m: &PeriodMatrix) -> String {
    let out = PeriodMatrixOut {
        size: m.size(),
        row_labels: &m.row_labels,
        col_labels: &m.col_labels,
        entries: m
            .entries
            .iter()
            .map(|r| r.iter().map(|&z| Cx(z)).collect())
            .collect(),
        determinant: Cx(m.determinant()),
    };
    to_json(&out)
}

/// One line per row, `re,im` pairs separated by commas.
pub fn period_matrix_csv(m: &PeriodMatrix) -> String {
    let mut out = String::new();
    for row in &m.entries {
        let cells: Vec<String> = row
            .iter()
            .flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)])
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Float in the output format; `nan`/`inf` spelled out for CSV.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types always serialize");
    s.push('\n');
    s
}
