//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line; the
//! test fails if any criterion fails.

mod common;

use common::{c, random_curve};
use motive_periods::field::FieldTag;
use motive_periods::galois::{
    case_table, conjecture_report, dim_galois, AbelianRelation, DependenceProfile, MotiveShape,
    ReportValue,
};
use motive_periods::lattice::{CurveData, CycleIndex};
use motive_periods::motive::{
    component_period_matrix, decompose, full_period_matrix, OneMotiveSpec,
};
use motive_periods::quadrature::QuadratureOptions;
use motive_periods::rank::rank;
use motive_periods::third_kind::ThirdKindContext;
use motive_periods::verify::{self, relative_error, CheckRecord};
use motive_periods::weierstrass::zeta;
use motive_periods::{C64, TWO_PI_I};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::time::{Duration, Instant};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(records: &[CheckRecord]) -> Outcome {
    let failed: Vec<&CheckRecord> = records.iter().filter(|r| !r.passed).collect();
    let worst = records
        .iter()
        .map(|r| r.max_residual / r.tolerance.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let samples: usize = records.iter().map(|r| r.samples).sum();
    let mut detail = format!(
        "{} checks, {samples} samples, worst residual/tolerance {worst:.2e}",
        records.len()
    );
    if let Some(f) = failed.first() {
        detail.push_str(&format!(
            "; first failure {} residual {:.3e} tol {:.1e} {}",
            f.name,
            f.max_residual,
            f.tolerance,
            f.error.as_deref().unwrap_or("")
        ));
    }
    Outcome {
        passed: failed.is_empty(),
        detail,
    }
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail
        .push_str(&format!(" in {:.2}s", took.as_secs_f64()));
    if let Some(b) = budget {
        o.detail.push_str(&format!(" (budget {}s)", b.as_secs()));
        if took > b {
            o.passed = false;
        }
    }
    o
}

fn curves(seed: u64, count: usize) -> Vec<CurveData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_curve(&mut rng)).collect()
}

fn legendre_relation() -> Outcome {
    let recs: Vec<CheckRecord> = curves(1, 25)
        .iter()
        .map(|e| verify::legendre(e, 1e-9))
        .collect();
    outcome(&recs)
}

fn functional_equations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut recs = Vec::new();
    for e in curves(2, 10) {
        let pts: Vec<C64> = (0..100)
            .map(|_| verify::random_point(&e, &mut rng, 1.5))
            .collect();
        recs.push(verify::periods_wp(&e, &pts, 1e-9));
        recs.push(verify::periods_zeta(&e, &pts, 1e-9));
        let mut fq = Vec::new();
        let mut fq_sigma = Vec::new();
        for (idx, &z) in pts.iter().enumerate() {
            let q = verify::random_q(&e, &mut rng);
            if e.distance_to_lattice(z + q) < 0.05 * e.scale() {
                continue;
            }
            let ctx = ThirdKindContext::new(&e, q).expect("q off the lattice");
            fq.push(verify::periods_fq(&ctx, &[z], 1e-9));
            let z2 = pts[(idx + 1) % pts.len()];
            fq_sigma.push(verify::fq_sigma(&ctx, &[z, z2], 1e-9));
        }
        recs.extend(fq);
        recs.extend(fq_sigma);
    }
    outcome(&recs)
}

fn quadrature_vs_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = QuadratureOptions::default();
    let mut recs = Vec::new();
    for e in curves(3, 10) {
        recs.extend(verify::quadrature_cycles(&e, None, 1e-6, &opts));
        for _ in 0..5 {
            let ctx = ThirdKindContext::new(&e, verify::random_q(&e, &mut rng)).unwrap();
            let third = verify::quadrature_cycles(&e, Some(&ctx), 1e-6, &opts);
            recs.push(third.last().unwrap().clone());
        }
    }
    outcome(&recs)
}

fn residues() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = QuadratureOptions::default();
    let mut recs = Vec::new();
    for e in curves(4, 10) {
        for _ in 0..2 {
            let ctx = ThirdKindContext::new(&e, verify::random_q(&e, &mut rng)).unwrap();
            recs.push(verify::residues(&ctx, 1e-8, &opts));
        }
    }
    outcome(&recs)
}

fn random_motive(rng: &mut ChaCha8Rng, r: usize, n: usize, s: usize) -> OneMotiveSpec {
    let curves: Vec<CurveData> = (0..n).map(|_| random_curve(rng)).collect();
    let q = curves
        .iter()
        .map(|e| (0..s).map(|_| verify::random_q(e, rng)).collect())
        .collect();
    let p = curves
        .iter()
        .map(|e| (0..r).map(|_| verify::random_point(e, rng, 0.5)).collect())
        .collect();
    let mut g = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let l = (0..n)
        .map(|_| (0..s).map(|_| (0..r).map(|_| g()).collect()).collect())
        .collect();
    OneMotiveSpec::new(r, s, curves, q, p, l, vec![]).unwrap()
}

/// Every entry of a component matrix against its defining expression.
fn component_symbols(m: &OneMotiveSpec) -> CheckRecord {
    let mut res = Vec::new();
    for comp in decompose(m).unwrap() {
        let pm = component_period_matrix(&comp).unwrap();
        let e = comp.curve;
        let ctx = comp.ctx.as_ref().unwrap();
        let zq = zeta(comp.q, e).unwrap();
        let expected = [
            [
                c(1.0, 0.0),
                comp.p,
                zeta(comp.p, e).unwrap(),
                ctx.log_f_q(comp.p).unwrap() + comp.l,
            ],
            [
                c(0.0, 0.0),
                e.omega(CycleIndex::First),
                e.eta(CycleIndex::First),
                e.eta(CycleIndex::First) * comp.q - e.omega(CycleIndex::First) * zq,
            ],
            [
                c(0.0, 0.0),
                e.omega(CycleIndex::Second),
                e.eta(CycleIndex::Second),
                e.eta(CycleIndex::Second) * comp.q - e.omega(CycleIndex::Second) * zq,
            ],
            [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), TWO_PI_I],
        ];
        for (row, exp) in expected.iter().enumerate() {
            for (col, &x) in exp.iter().enumerate() {
                res.push(relative_error(pm.get(row, col), x, 1.0));
            }
        }
        let det = pm.determinant();
        let want = -TWO_PI_I * TWO_PI_I;
        res.push(relative_error(det, want, 0.0).min(relative_error(det, -want, 0.0)));
        let labels_ok = pm.row_labels == ["beta_R", "gamma_1", "gamma_2", "delta_-Q"]
            && pm.col_labels == ["df", "omega", "eta", "xi_Q"];
        res.push(if labels_ok { 0.0 } else { 1.0 });
    }
    let max = res.iter().copied().fold(0.0, f64::max);
    CheckRecord {
        name: "component-symbols".into(),
        passed: max <= 1e-9,
        max_residual: max,
        tolerance: 1e-9,
        samples: res.len(),
        error: None,
    }
}

/// Block layout of the two-curve, two-point, three-torus example.
fn eleven_by_eleven(m: &OneMotiveSpec) -> CheckRecord {
    let pm = full_period_matrix(m).unwrap();
    let mut bad = usize::from(pm.size() != 11);
    let zero = c(0.0, 0.0);
    let p = |j, k| m.p(j, k);
    for row in 0..11 {
        for col in 0..11 {
            let v = pm.get(row, col);
            let ok = match (row, col) {
                (0..=3, 0..=3) => v == if row == col { c(1.0, 0.0) } else { zero },
                (8..=10, _) => v == if row == col { TWO_PI_I } else { zero },
                (4..=7, 0..=3) => v == zero,
                (0 | 1, 4) => v == p(0, row),
                (2 | 3, 6) => v == p(1, row - 2),
                (0 | 1, 6 | 7) | (2 | 3, 4 | 5) => v == zero,
                (4 | 5, 6 | 7) | (6 | 7, 4 | 5) => v == zero,
                (4, 4) => v == m.curves()[0].omega(CycleIndex::First),
                (5, 5) => v == m.curves()[0].eta(CycleIndex::Second),
                (6, 6) => v == m.curves()[1].omega(CycleIndex::First),
                (7, 7) => v == m.curves()[1].eta(CycleIndex::Second),
                _ => true,
            };
            bad += usize::from(!ok);
        }
    }
    let rows = [
        "beta[1,1]",
        "beta[1,2]",
        "beta[2,1]",
        "beta[2,2]",
        "gamma[1,1]",
        "gamma[1,2]",
        "gamma[2,1]",
        "gamma[2,2]",
        "delta[1]",
        "delta[2]",
        "delta[3]",
    ];
    let cols = [
        "df[1,1]", "df[1,2]", "df[2,1]", "df[2,2]", "omega[1]", "eta[1]", "omega[2]", "eta[2]",
        "xi[1]", "xi[2]", "xi[3]",
    ];
    bad += usize::from(pm.row_labels != rows) + usize::from(pm.col_labels != cols);
    CheckRecord {
        name: "full-11x11".into(),
        passed: bad == 0,
        max_residual: bad as f64,
        tolerance: 0.0,
        samples: 121,
        error: None,
    }
}

fn matrix_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut recs = Vec::new();
    for _ in 0..5 {
        let m = random_motive(&mut rng, 1, 1, 1);
        recs.push(component_symbols(&m));
        recs.extend(verify::matrix_structure(&m, 1e-9));
    }
    let big = random_motive(&mut rng, 2, 2, 3);
    recs.push(component_symbols(&big));
    recs.push(eleven_by_eleven(&big));
    recs.extend(verify::matrix_structure(&big, 1e-9));
    recs.push(verify::matrix_oracle(
        &big,
        1e-6,
        &QuadratureOptions::default(),
    ));
    outcome(&recs)
}

fn table_regression() -> Outcome {
    let got: Vec<(usize, usize, usize)> = case_table()
        .iter()
        .map(|r| (r.dim_ur, r.cm_total, r.non_cm_total))
        .collect();
    let want = vec![
        (0, 2, 4),
        (1, 3, 5),
        (2, 4, 6),
        (3, 5, 7),
        (3, 5, 7),
        (5, 7, 9),
    ];
    Outcome {
        passed: got == want,
        detail: format!("rows {got:?}"),
    }
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn float_rank(rows: &[Vec<i64>], cols: usize) -> usize {
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j] as f64);
    let sv = m.svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&x| x > 1e-9 * top.max(1.0)).count()
}

/// Random integer matrix of rank at most `k` as a product `A (m×k) · B (k×n)`.
fn low_rank(rng: &mut ChaCha8Rng, m: usize, n: usize, k: usize) -> Vec<Vec<i64>> {
    let a: Vec<Vec<i64>> = (0..m)
        .map(|_| (0..k).map(|_| rng.gen_range(-3..=3)).collect())
        .collect();
    let b: Vec<Vec<i64>> = (0..k)
        .map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect())
        .collect();
    (0..m)
        .map(|i| {
            (0..n)
                .map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

fn rank_engine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let (mut full, mut deficient) = (0, 0);
    for inst in 0..200 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=m.min(n));
        let rows = if inst % 2 == 0 {
            low_rank(&mut rng, m, n, k)
        } else {
            (0..m)
                .map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect())
                .collect()
        };
        let exact: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect();
        let rk = rank(&exact, n).unwrap();
        if rk == m.min(n) {
            full += 1;
        } else {
            deficient += 1;
        }
        if rk != float_rank(&rows, n) {
            failures.push(format!("instance {inst}: float oracle disagrees"));
        }
        // row operations: swap, scale by a nonzero rational, add a multiple
        let mut ops = exact.clone();
        for _ in 0..5 {
            let a = rng.gen_range(0..m);
            let b = rng.gen_range(0..m);
            match rng.gen_range(0..3) {
                0 => ops.swap(a, b),
                1 => {
                    let f = BigRational::new(
                        BigInt::from(rng.gen_range(1..5)),
                        BigInt::from(rng.gen_range(1..5)),
                    );
                    ops[a] = ops[a].iter().map(|x| x * &f).collect();
                }
                _ if a != b => {
                    let f = int(rng.gen_range(-3..=3));
                    let add: Vec<BigRational> = ops[b].iter().map(|x| x * &f).collect();
                    ops[a] = ops[a].iter().zip(&add).map(|(x, y)| x + y).collect();
                }
                _ => {}
            }
        }
        if rank(&ops, n).unwrap() != rk {
            failures.push(format!("instance {inst}: row operations changed the rank"));
        }
        let mut dup = exact.clone();
        dup.extend(exact.iter().cloned());
        dup.push(vec![int(0); n]);
        if rank(&dup, n).unwrap() != rk {
            failures.push(format!("instance {inst}: duplicates changed the rank"));
        }
        // quotient dimensions only shrink as relations accumulate
        let shape = MotiveShape::new(n.saturating_sub(1).max(1), 1, vec![FieldTag::Rational]);
        let width = shape.r + shape.s;
        let mut profile = DependenceProfile {
            pairing_kernel: vec![vec![false]; shape.r],
            ..Default::default()
        };
        let mut last = dim_galois(&shape, &profile).unwrap().dim_total;
        for row in &rows {
            let coeffs = (0..width)
                .map(|t| {
                    motive_periods::field::QuadraticFieldScalar::from_integer(
                        row.get(t).copied().unwrap_or(0),
                    )
                })
                .collect();
            profile
                .abelian_relations
                .push(AbelianRelation { curve: 0, coeffs });
            let d = dim_galois(&shape, &profile).unwrap().dim_total;
            if d > last {
                failures.push(format!("instance {inst}: dimension grew"));
            }
            last = d;
        }
    }
    Outcome {
        passed: failures.is_empty() && full > 0 && deficient > 0,
        detail: format!(
            "200 instances ({full} full rank, {deficient} deficient){}",
            failures
                .first()
                .map(|f| format!("; {f}"))
                .unwrap_or_default()
        ),
    }
}

fn degenerations() -> Outcome {
    let mut notes = Vec::new();
    // torus only: R = exp(l) and the logs themselves
    let l = c(0.3, 0.7);
    let m = OneMotiveSpec::new(1, 1, vec![], vec![], vec![], vec![], vec![vec![l]]).unwrap();
    let profile = DependenceProfile {
        pairing_kernel: vec![vec![true]],
        ..Default::default()
    };
    let rep = conjecture_report(&m, &profile).unwrap();
    let labels: Vec<&str> = rep.lhs.iter().map(|e| e.label.as_str()).collect();
    let r_ok = matches!(&rep.lhs[0].value, ReportValue::Point(v) if v.len() == 1 && v[0].is_some_and(|x| (x - l.exp()).norm() < 1e-14));
    let schanuel = rep.shape == "schanuel"
        && labels == ["R[1]", "1", "2pi*i", "l[1,1]"]
        && r_ok
        && rep.rhs == 2
        && rep.dims.dim_reductive == 1
        && rep.dims.dim_ur == 1;
    if !schanuel {
        notes.push(format!("torus-only report {labels:?} >= {}", rep.rhs));
    }
    // split extension: q a period
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let e = random_curve(&mut rng);
    let q = e.omega(CycleIndex::First) - e.omega(CycleIndex::Second);
    let p = verify::random_point(&e, &mut rng, 0.5);
    let split = OneMotiveSpec::new(
        1,
        1,
        vec![e],
        vec![vec![q]],
        vec![vec![p]],
        vec![vec![vec![l]]],
        vec![],
    )
    .unwrap();
    let split_ok = (|| -> motive_periods::Result<bool> {
        let comp = &decompose(&split)?[0];
        let pm = component_period_matrix(comp)?;
        let full = full_period_matrix(&split)?;
        let rep = conjecture_report(
            &split,
            &DependenceProfile {
                pairing_kernel: vec![vec![true]],
                ..Default::default()
            },
        )?;
        Ok(comp.ctx.is_none()
            && pm.get(0, 3) == l
            && pm.get(1, 3) == c(0.0, 0.0)
            && pm.get(2, 3) == c(0.0, 0.0)
            && full.size() == 4
            && rep.shape == "elliptico-toric")
    })();
    match split_ok {
        Ok(true) => {}
        Ok(false) => notes.push("split factor did not use the split formulas".into()),
        Err(e) => notes.push(format!("split factor raised {e}")),
    }
    Outcome {
        passed: notes.is_empty(),
        detail: if notes.is_empty() {
            "torus-only report is Schanuel-shaped; split factor handled".into()
        } else {
            notes.join("; ")
        },
    }
}

fn ode_residual() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let recs: Vec<CheckRecord> = curves(9, 10)
        .iter()
        .map(|e| {
            let pts: Vec<C64> = (0..100)
                .map(|_| verify::random_point(e, &mut rng, 1.5))
                .collect();
            verify::ode_residual(e, &pts, 1e-8)
        })
        .collect();
    outcome(&recs)
}

/// Name, time budget in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        ("legendre relation", Some(5), legendre_relation),
        ("functional equations", Some(30), functional_equations),
        (
            "quadrature vs closed form",
            Some(120),
            quadrature_vs_closed_form,
        ),
        ("residues", None, residues),
        ("matrix structure", None, matrix_structure),
        ("dimension table", None, table_regression),
        ("rank engine", None, rank_engine),
        ("degenerations", None, degenerations),
        ("weierstrass ode", None, ode_residual),
    ];
    let mut failed = Vec::new();
    for (idx, (name, budget, run)) in criteria.into_iter().enumerate() {
        let o = timed(budget.map(Duration::from_secs), run);
        let tag = if o.passed { "PASS" } else { "FAIL" };
        // bypasses the test harness capture so the lines always show
        let _ = writeln!(
            std::io::stderr(),
            "[{tag}] {}. {name}: {}",
            idx + 1,
            o.detail
        );
        if !o.passed {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
