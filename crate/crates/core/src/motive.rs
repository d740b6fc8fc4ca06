//! The 1-motive `M = [u: Z^r → G]`, `G` an extension of `E_1 × … × E_n` by
//! `G_m^s`, and its period matrices.
//!
//! Index conventions: `k` runs over the lattice `Z^r`, `j` over curves and
//! `i` over the torus factors. The motive is given by logarithms:
//! `p_{jk}` (abelian part of `u(z_k)`), `q_{ji}` (the extension class) and
//! `l_{jik}` (toric coordinates).
//!
//! Full matrix layout, `N = rn + 2n + s` (`r + s` when there are no curves):
//!
//! ```text
//!          df_{jk}   (ω_j, η_j)   ξ_i
//! β_{jk} [   Id        B           C  ]
//! γ_{jc} [   0         D           E  ]
//! δ_i    [   0         0       2πi Id ]
//! ```

use crate::lattice::{CurveData, CycleIndex};
use crate::third_kind::ThirdKindContext;
use crate::weierstrass::zeta;
use crate::{Error, Result, C64, TWO_PI_I};

/// Logarithmic description of a 1-motive.
#[derive(Clone, Debug)]
pub struct OneMotiveSpec {
    r: usize,
    s: usize,
    curves: Vec<CurveData>,
    q_logs: Vec<Vec<C64>>,
    p_logs: Vec<Vec<C64>>,
    l_logs: Vec<Vec<Vec<C64>>>,
    torus_logs: Vec<Vec<C64>>,
}

impl OneMotiveSpec {
    /// Validates shapes: `q_logs` is `n × s`, `p_logs` is `n × r`, `l_logs` is
    /// `n × s × r` and, for `n = 0`, `torus_logs` is `r × s` (empty otherwise).
    pub fn new(
        r: usize,
        s: usize,
        curves: Vec<CurveData>,
        q_logs: Vec<Vec<C64>>,
        p_logs: Vec<Vec<C64>>,
        l_logs: Vec<Vec<Vec<C64>>>,
        torus_logs: Vec<Vec<C64>>,
    ) -> Result<Self> {
        let n = curves.len();
        let shape = |name: &str, rows: usize, want: usize| -> Result<()> {
            if rows != want {
                return Err(Error::Input(format!(
                    "{name} has {rows} entries, expected {want}"
                )));
            }
            Ok(())
        };
        shape("q_logs", q_logs.len(), n)?;
        shape("p_logs", p_logs.len(), n)?;
        shape("l_logs", l_logs.len(), n)?;
        for j in 0..n {
            shape(&format!("q_logs[{j}]"), q_logs[j].len(), s)?;
            shape(&format!("p_logs[{j}]"), p_logs[j].len(), r)?;
            shape(&format!("l_logs[{j}]"), l_logs[j].len(), s)?;
            for i in 0..s {
                shape(&format!("l_logs[{j}][{i}]"), l_logs[j][i].len(), r)?;
            }
        }
        if n == 0 {
            shape("torus_logs", torus_logs.len(), r)?;
            for (k, row) in torus_logs.iter().enumerate() {
                shape(&format!("torus_logs[{k}]"), row.len(), s)?;
            }
        } else if !torus_logs.is_empty() {
            return Err(Error::Input(
                "torus_logs is only used when there are no curves; use l_logs".into(),
            ));
        }
        let all_finite = q_logs
            .iter()
            .chain(&p_logs)
            .chain(&torus_logs)
            .flatten()
            .chain(l_logs.iter().flatten().flatten())
            .all(|z| z.is_finite());
        if !all_finite {
            return Err(Error::Input("non-finite logarithm in motive".into()));
        }
        Ok(OneMotiveSpec {
            r,
            s,
            curves,
            q_logs,
            p_logs,
            l_logs,
            torus_logs,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.curves.len()
    }

    pub fn curves(&self) -> &[CurveData] {
        &self.curves
    }

    pub fn q(&self, j: usize, i: usize) -> C64 {
        self.q_logs[j][i]
    }

    pub fn p(&self, j: usize, k: usize) -> C64 {
        self.p_logs[j][k]
    }

    pub fn l(&self, j: usize, i: usize, k: usize) -> C64 {
        self.l_logs[j][i][k]
    }

    /// Toric logarithm of `u(z_k)` in the `i`-th factor when `n = 0`.
    pub fn torus_log(&self, k: usize, i: usize) -> C64 {
        self.torus_logs[k][i]
    }

    /// `q_{ji} ∈ Λ_j`: the extension is split in this coordinate.
    pub fn is_split(&self, j: usize, i: usize) -> bool {
        self.curves[j].is_lattice_point(self.q_logs[j][i])
    }
}

/// The 1-motive `[z_k Z → G_{ji}]` obtained by projecting onto one curve,
/// one torus factor and one lattice generator.
#[derive(Clone, Debug)]
pub struct ComponentMotive<'a> {
    pub j: usize,
    pub i: usize,
    pub k: usize,
    pub curve: &'a CurveData,
    pub q: C64,
    /// `None` when `q ∈ Λ` (split extension).
    pub ctx: Option<ThirdKindContext<'a>>,
    pub p: C64,
    pub l: C64,
}

/// All `r s n` components, ordered by `j`, then `i`, then `k`.
pub fn decompose(m: &OneMotiveSpec) -> Result<Vec<ComponentMotive<'_>>> {
    let mut out = Vec::with_capacity(m.r * m.s * m.n());
    for (j, curve) in m.curves.iter().enumerate() {
        for i in 0..m.s {
            let q = m.q(j, i);
            let ctx = if m.is_split(j, i) {
                None
            } else {
                Some(ThirdKindContext::new(curve, q).map_err(|e| Error::component(j, i, 0, e))?)
            };
            for k in 0..m.r {
                out.push(ComponentMotive {
                    j,
                    i,
                    k,
                    curve,
                    q,
                    ctx: ctx.clone(),
                    p: m.p(j, k),
                    l: m.l(j, i, k),
                });
            }
        }
    }
    Ok(out)
}

/// A square complex matrix with row labels (homology) and column labels
/// (de Rham).
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMatrix {
    pub entries: Vec<Vec<C64>>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl PeriodMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn determinant(&self) -> C64 {
        determinant(&self.entries)
    }
}

pub fn determinant(m: &[Vec<C64>]) -> C64 {
    let n = m.len();
    let mut a: Vec<Vec<C64>> = m.to_vec();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].norm().partial_cmp(&a[y][col].norm()).unwrap())
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for row in col + 1..n {
            let factor = a[row][col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[row][c] -= factor * v;
            }
        }
    }
    det
}

/// Entries of one component: the `β` row beyond the `df` column and the
/// third-kind column.
struct ComponentEntries {
    zeta_p: C64,
    top: C64,
    xi: [C64; 2],
}

fn component_entries(c: &ComponentMotive) -> Result<ComponentEntries> {
    let wrap = |e| Error::component(c.j, c.i, c.k, e);
    let zeta_p = zeta(c.p, c.curve).map_err(wrap)?;
    let (top, xi) = match &c.ctx {
        None => (c.l, [C64::new(0.0, 0.0); 2]),
        Some(ctx) => (
            ctx.log_f_q(c.p).map_err(wrap)? + c.l,
            [
                ctx.quasi_period(CycleIndex::First),
                ctx.quasi_period(CycleIndex::Second),
            ],
        ),
    };
    Ok(ComponentEntries { zeta_p, top, xi })
}

/// The 4×4 matrix of a component, rows `β_R, γ1, γ2, δ_{-Q}`, columns
/// `df, ω, η, ξ_Q`.
pub fn component_period_matrix(c: &ComponentMotive) -> Result<PeriodMatrix> {
    let e = component_entries(c)?;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let curve = c.curve;
    let w = |i| curve.omega(i);
    let h = |i| curve.eta(i);
    let entries = vec![
        vec![one, c.p, e.zeta_p, e.top],
        vec![zero, w(CycleIndex::First), h(CycleIndex::First), e.xi[0]],
        vec![zero, w(CycleIndex::Second), h(CycleIndex::Second), e.xi[1]],
        vec![zero, zero, zero, TWO_PI_I],
    ];
    Ok(PeriodMatrix {
        entries,
        row_labels: ["beta_R", "gamma_1", "gamma_2", "delta_-Q"]
            .map(String::from)
            .to_vec(),
        col_labels: ["df", "omega", "eta", "xi_Q"].map(String::from).to_vec(),
    })
}

/// Block period matrix of the whole motive.
pub fn full_period_matrix(m: &OneMotiveSpec) -> Result<PeriodMatrix> {
    let (r, s, n) = (m.r, m.s, m.n());
    let head = if n == 0 { r } else { r * n + 2 * n };
    let size = head + s;
    let zero = C64::new(0.0, 0.0);
    let mut a = vec![vec![zero; size]; size];
    let beta = |j: usize, k: usize| j * r + k;
    let gamma = |j: usize, c: usize| r * n + 2 * j + c;
    let delta = |i: usize| head + i;
    let mut row_labels = vec![String::new(); size];
    let mut col_labels = vec![String::new(); size];

    if n == 0 {
        for k in 0..r {
            a[k][k] = C64::new(1.0, 0.0);
            row_labels[k] = format!("beta[{}]", k + 1);
            col_labels[k] = format!("df[{}]", k + 1);
            for i in 0..s {
                a[k][delta(i)] = m.torus_log(k, i);
            }
        }
    }
    for (j, curve) in m.curves.iter().enumerate() {
        for k in 0..r {
            let row = beta(j, k);
            a[row][row] = C64::new(1.0, 0.0);
            row_labels[row] = format!("beta[{},{}]", j + 1, k + 1);
            col_labels[row] = format!("df[{},{}]", j + 1, k + 1);
            let p = m.p(j, k);
            a[row][gamma(j, 0)] = p;
            if s == 0 {
                a[row][gamma(j, 1)] = zeta(p, curve).map_err(|e| Error::component(j, 0, k, e))?;
            }
        }
        for (c, cycle) in CycleIndex::BOTH.into_iter().enumerate() {
            let row = gamma(j, c);
            row_labels[row] = format!("gamma[{},{}]", j + 1, c + 1);
            a[row][gamma(j, 0)] = curve.omega(cycle);
            a[row][gamma(j, 1)] = curve.eta(cycle);
        }
        col_labels[gamma(j, 0)] = format!("omega[{}]", j + 1);
        col_labels[gamma(j, 1)] = format!("eta[{}]", j + 1);
    }
    for comp in decompose(m)? {
        let e = component_entries(&comp)?;
        let (j, i, k) = (comp.j, comp.i, comp.k);
        a[beta(j, k)][gamma(j, 1)] = e.zeta_p;
        a[beta(j, k)][delta(i)] = e.top;
        a[gamma(j, 0)][delta(i)] = e.xi[0];
        a[gamma(j, 1)][delta(i)] = e.xi[1];
    }
    for i in 0..s {
        a[delta(i)][delta(i)] = TWO_PI_I;
        row_labels[delta(i)] = format!("delta[{}]", i + 1);
        col_labels[delta(i)] = format!("xi[{}]", i + 1);
    }
    Ok(PeriodMatrix {
        entries: a,
        row_labels,
        col_labels,
    })
}

/// A period together with the name of the integral it comes from.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledValue {
    pub label: String,
    pub value: C64,
}

impl LabeledValue {
    fn new(label: impl Into<String>, value: C64) -> Self {
        LabeledValue {
            label: label.into(),
            value,
        }
    }
}

/// The generators of the field of periods.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodGenerators {
    /// Length of the list before removing exact duplicates.
    pub raw_count: usize,
    pub values: Vec<LabeledValue>,
}

/// `1, 2πi, ω_{jc}, η_{jc}, p_{jk}, ζ_j(p_{jk}), η_{jc} q_{ji} - ω_{jc} ζ_j(q_{ji})`
/// and `log f_{q_{ji}}(p_{jk}) + l_{jik}` (or `l_{ik}` when `n = 0`).
pub fn period_generators(m: &OneMotiveSpec) -> Result<PeriodGenerators> {
    let mut raw = vec![
        LabeledValue::new("1", C64::new(1.0, 0.0)),
        LabeledValue::new("2pi*i", TWO_PI_I),
    ];
    let comps = decompose(m)?;
    for (j, curve) in m.curves.iter().enumerate() {
        let j1 = j + 1;
        for c in CycleIndex::BOTH {
            raw.push(LabeledValue::new(
                format!("omega[{j1},{}]", c.number()),
                curve.omega(c),
            ));
        }
        for c in CycleIndex::BOTH {
            raw.push(LabeledValue::new(
                format!("eta[{j1},{}]", c.number()),
                curve.eta(c),
            ));
        }
        for k in 0..m.r {
            let p = m.p(j, k);
            let zp = zeta(p, curve).map_err(|e| Error::component(j, 0, k, e))?;
            raw.push(LabeledValue::new(format!("p[{j1},{}]", k + 1), p));
            raw.push(LabeledValue::new(format!("zeta(p[{j1},{}])", k + 1), zp));
        }
        for i in 0..m.s {
            let xi = match comps.iter().find(|c| c.j == j && c.i == i) {
                Some(ComponentMotive { ctx: Some(ctx), .. }) => {
                    CycleIndex::BOTH.map(|c| ctx.quasi_period(c))
                }
                Some(ComponentMotive { ctx: None, .. }) => [C64::new(0.0, 0.0); 2],
                // r = 0: no component carries the context
                None if m.is_split(j, i) => [C64::new(0.0, 0.0); 2],
                None => {
                    let ctx = ThirdKindContext::new(curve, m.q(j, i))
                        .map_err(|e| Error::component(j, i, 0, e))?;
                    CycleIndex::BOTH.map(|c| ctx.quasi_period(c))
                }
            };
            for (c, v) in xi.into_iter().enumerate() {
                raw.push(LabeledValue::new(
                    format!("xi[{j1},{};{}]", i + 1, c + 1),
                    v,
                ));
            }
        }
    }
    for comp in &comps {
        let e = component_entries(comp)?;
        raw.push(LabeledValue::new(
            format!("logf[{},{},{}]", comp.j + 1, comp.i + 1, comp.k + 1),
            e.top,
        ));
    }
    if m.n() == 0 {
        for k in 0..m.r {
            for i in 0..m.s {
                raw.push(LabeledValue::new(
                    format!("l[{},{}]", i + 1, k + 1),
                    m.torus_log(k, i),
                ));
            }
        }
    }
    let raw_count = raw.len();
    let mut values: Vec<LabeledValue> = Vec::with_capacity(raw_count);
    for v in raw {
        if !values.iter().any(|u| u.value == v.value) {
            values.push(v);
        }
    }
    Ok(PeriodGenerators { raw_count, values })
}

/// `2 + 4n + 2rn + 2sn + rsn` for `n ≥ 1`, `2 + rs` for `n = 0`.
pub fn generator_count(r: usize, s: usize, n: usize) -> usize {
    if n == 0 {
        2 + r * s
    } else {
        2 + 4 * n + 2 * r * n + 2 * s * n + r * s * n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::curve_from_invariants;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample(r: usize, s: usize, n: usize) -> OneMotiveSpec {
        let curves: Vec<CurveData> = (0..n)
            .map(|j| {
                curve_from_invariants(c(1.0 + j as f64, 0.3), c(-0.2, 0.5 + j as f64)).unwrap()
            })
            .collect();
        let val = |a: usize, b: usize, d: usize| {
            c(
                0.11 + 0.07 * a as f64 + 0.031 * d as f64,
                0.13 + 0.05 * b as f64,
            )
        };
        let q_logs = (0..n)
            .map(|j| (0..s).map(|i| val(j, i, 1)).collect())
            .collect();
        let p_logs = (0..n)
            .map(|j| (0..r).map(|k| val(j, k, 5) * 1.7).collect())
            .collect();
        let l_logs = (0..n)
            .map(|j| {
                (0..s)
                    .map(|i| (0..r).map(|k| val(i, k, j)).collect())
                    .collect()
            })
            .collect();
        let torus = if n == 0 {
            (0..r)
                .map(|k| (0..s).map(|i| val(k, i, 0)).collect())
                .collect()
        } else {
            vec![]
        };
        OneMotiveSpec::new(r, s, curves, q_logs, p_logs, l_logs, torus).unwrap()
    }

    #[test]
    fn decomposition_covers_every_index_once() {
        let m = sample(2, 3, 2);
        let comps = decompose(&m).unwrap();
        assert_eq!(comps.len(), 12);
        let mut seen: Vec<_> = comps.iter().map(|c| (c.j, c.i, c.k)).collect();
        seen.dedup();
        assert_eq!(seen.len(), 12);
        for c in &comps {
            assert_eq!(c.p, m.p(c.j, c.k));
            assert_eq!(c.q, m.q(c.j, c.i));
            assert_eq!(c.l, m.l(c.j, c.i, c.k));
        }
    }

    #[test]
    fn component_matrix_structure() {
        let m = sample(1, 1, 1);
        let comps = decompose(&m).unwrap();
        let pm = component_period_matrix(&comps[0]).unwrap();
        assert_eq!(pm.get(3, 3), TWO_PI_I);
        for r in 1..4 {
            assert_eq!(pm.get(r, 0), c(0.0, 0.0));
        }
        assert!((pm.determinant().norm() - TWO_PI_I.norm_sqr()).abs() < 1e-9);
        assert_eq!(full_period_matrix(&m).unwrap().entries, pm.entries);
    }

    #[test]
    fn full_matrix_shape_and_determinant() {
        let m = sample(2, 3, 2);
        let pm = full_period_matrix(&m).unwrap();
        assert_eq!(pm.size(), 11);
        let d = pm.determinant();
        let expected = TWO_PI_I.powi(2 + 3);
        assert!(
            (d - expected).norm() < 1e-9 * expected.norm()
                || (d + expected).norm() < 1e-9 * expected.norm()
        );
    }

    #[test]
    fn torus_only_motive() {
        let m = sample(2, 2, 0);
        let pm = full_period_matrix(&m).unwrap();
        assert_eq!(pm.size(), 4);
        assert_eq!(pm.get(0, 2), m.torus_log(0, 0));
        assert_eq!(pm.get(3, 3), TWO_PI_I);
        let g = period_generators(&sample(1, 1, 0)).unwrap();
        assert_eq!(g.raw_count, 3);
    }

    #[test]
    fn generator_counts() {
        assert_eq!(generator_count(2, 3, 2), 42);
        assert_eq!(period_generators(&sample(1, 1, 1)).unwrap().raw_count, 11);
        assert_eq!(period_generators(&sample(2, 3, 2)).unwrap().raw_count, 42);
    }

    #[test]
    fn split_extension_uses_toric_entries() {
        let e = curve_from_invariants(c(1.0, 0.3), c(-0.2, 0.5)).unwrap();
        let q = e.omega(CycleIndex::First);
        let l = c(0.3, 0.2);
        let m = OneMotiveSpec::new(
            1,
            1,
            vec![e],
            vec![vec![q]],
            vec![vec![c(0.2, 0.1)]],
            vec![vec![vec![l]]],
            vec![],
        )
        .unwrap();
        let pm = full_period_matrix(&m).unwrap();
        assert_eq!(pm.get(0, 3), l);
        assert_eq!(pm.get(1, 3), c(0.0, 0.0));
        assert_eq!(pm.get(2, 3), c(0.0, 0.0));
    }

    #[test]
    fn p_in_lattice_names_the_component() {
        let e = curve_from_invariants(c(1.0, 0.3), c(-0.2, 0.5)).unwrap();
        let p = e.omega(CycleIndex::Second);
        let m = OneMotiveSpec::new(
            1,
            1,
            vec![e],
            vec![vec![c(0.3, 0.1)]],
            vec![vec![p]],
            vec![vec![vec![c(0.0, 0.0)]]],
            vec![],
        )
        .unwrap();
        match full_period_matrix(&m) {
            Err(Error::Component {
                j: 1, i: 1, k: 1, ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shape_errors() {
        let e = curve_from_invariants(c(1.0, 0.3), c(-0.2, 0.5)).unwrap();
        assert!(OneMotiveSpec::new(
            1,
            1,
            vec![e],
            vec![vec![]],
            vec![vec![c(0.1, 0.0)]],
            vec![vec![vec![]]],
            vec![]
        )
        .is_err());
    }
}
