mod common;

use common::{c, random_curve};
use motive_periods::field::{FieldTag, QuadraticFieldScalar};
use motive_periods::galois::{dim_reductive, MotiveShape};
use motive_periods::lattice::{
    curve_from_invariants, invariants_from_periods, reduce_mod_lattice, CurveData, CycleIndex,
    LatticeBasis,
};
use motive_periods::rank::{rank, rank_over_field};
use motive_periods::third_kind::ThirdKindContext;
use motive_periods::weierstrass::{elliptic_exp, elliptic_log, sigma, wp_and_prime, zeta};
use motive_periods::C64;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn curve_from_seed(seed: u64) -> CurveData {
    random_curve(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn basis() -> impl Strategy<Value = LatticeBasis> {
    (0.3f64..3.0, -3.0f64..3.0, -1.5f64..1.5, 0.2f64..2.0).prop_map(|(r, arg, tx, ty)| {
        let w1 = C64::from_polar(r, arg);
        LatticeBasis::new(w1, w1 * c(tx, ty)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_lands_in_fundamental_domain(b in basis(), x in -50.0f64..50.0, y in -50.0f64..50.0) {
        let z = b.omega1() * x + b.omega2() * y;
        let (z0, m, n) = reduce_mod_lattice(z, &b);
        let (u, v) = b.coordinates(z0);
        prop_assert!((0.0..1.0).contains(&u) && (0.0..1.0).contains(&v), "{u} {v}");
        prop_assert!((z0 + b.point(m, n) - z).norm() <= 1e-9 * z.norm().max(1.0));
    }

    #[test]
    fn wp_is_even_and_periodic(seed in 0u64..200, x in -2.0f64..2.0, y in -2.0f64..2.0, m in -3i64..=3, n in -3i64..=3) {
        let e = curve_from_seed(seed);
        let l = e.lattice();
        let z = l.omega1() * x + l.omega2() * y;
        prop_assume!(e.distance_to_lattice(z) > 0.05 * e.scale());
        let (p, dp) = wp_and_prime(z, &e).unwrap();
        let (pm, dpm) = wp_and_prime(-z, &e).unwrap();
        let (ps, _) = wp_and_prime(z + l.point(m, n), &e).unwrap();
        let size = p.norm().max(e.scale().powi(-2));
        prop_assert!((p - pm).norm() <= 1e-9 * size);
        prop_assert!((dp + dpm).norm() <= 1e-9 * dp.norm().max(e.scale().powi(-3)));
        prop_assert!((p - ps).norm() <= 1e-9 * size);
    }

    #[test]
    fn zeta_shifts_by_quasi_periods(seed in 0u64..200, x in -1.0f64..1.0, y in -1.0f64..1.0, m in -2i64..=2, n in -2i64..=2) {
        let e = curve_from_seed(seed);
        let l = e.lattice();
        let z = l.omega1() * x + l.omega2() * y;
        prop_assume!(e.distance_to_lattice(z) > 0.05 * e.scale());
        let eta = e.eta(CycleIndex::First) * m as f64 + e.eta(CycleIndex::Second) * n as f64;
        let lhs = zeta(z + l.point(m, n), &e).unwrap();
        let rhs = zeta(z, &e).unwrap() + eta;
        prop_assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0 / e.scale()));
    }

    #[test]
    fn elliptic_log_inverts_exp(seed in 0u64..200, x in -0.5f64..0.5, y in -0.5f64..0.5) {
        let e = curve_from_seed(seed);
        let l = e.lattice();
        let z = l.omega1() * x + l.omega2() * y;
        prop_assume!(e.distance_to_lattice(z) > 0.05 * e.scale());
        prop_assume!(e.distance_to_lattice(2.0 * z) > 0.05 * e.scale());
        let back = elliptic_log(&elliptic_exp(z, &e), &e).unwrap();
        prop_assert!(e.distance_to_lattice(back - z) <= 1e-8 * e.scale());
    }

    #[test]
    fn fq_has_divisor_of_degree_zero(seed in 0u64..200, qx in -0.45f64..0.45, qy in -0.45f64..0.45) {
        let e = curve_from_seed(seed);
        let l = e.lattice();
        let q = l.omega1() * qx + l.omega2() * qy;
        prop_assume!(e.distance_to_lattice(q) > 0.05 * e.scale());
        let ctx = ThirdKindContext::new(&e, q).unwrap();
        prop_assert_eq!(ctx.residue_at(c(0.0, 0.0)), -1);
        prop_assert_eq!(ctx.residue_at(-q), 1);
    }

    #[test]
    fn rank_is_monotone_and_bounded(rows in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 4), 0..7)) {
        let exact: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .collect();
        let mut last = 0;
        for k in 0..=exact.len() {
            let rk = rank(&exact[..k], 4).unwrap();
            prop_assert!(rk >= last && rk <= last + 1 && rk <= 4);
            last = rk;
        }
    }

    #[test]
    fn rational_rank_equals_rank_in_any_field(rows in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 3), 0..5), d in prop::sample::select(vec![-1i64, -2, -3, -7, -11])) {
        let q: Vec<Vec<QuadraticFieldScalar>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| QuadraticFieldScalar::from_integer(x)).collect())
            .collect();
        let over_q = rank_over_field(&q, 3, FieldTag::Rational).unwrap();
        let over_k = rank_over_field(&q, 3, FieldTag::imaginary(d).unwrap()).unwrap();
        prop_assert_eq!(over_q, over_k);
    }
}

#[test]
fn reductive_dimension_over_all_cm_patterns() {
    let cm = FieldTag::imaginary(-3).unwrap();
    for n in 1..=6usize {
        for mask in 0u32..(1 << n) {
            let fields: Vec<FieldTag> = (0..n)
                .map(|j| {
                    if mask >> j & 1 == 1 {
                        cm
                    } else {
                        FieldTag::Rational
                    }
                })
                .collect();
            let cms = mask.count_ones() as usize;
            let expected = 3 * (n - cms) + cms + 1;
            assert_eq!(dim_reductive(&MotiveShape::new(1, 1, fields)), expected);
        }
    }
    assert_eq!(dim_reductive(&MotiveShape::new(2, 3, vec![])), 1);
    assert_eq!(dim_reductive(&MotiveShape::new(2, 0, vec![])), 0);
}

/// `g2 = 60 Σ' ω^-4`, `g3 = 140 Σ' ω^-6` summed over growing boxes with a
/// Richardson step on the box size.
fn eisenstein(b: &LatticeBasis, radius: i64) -> (C64, C64) {
    let box_sum = |r: i64| {
        let (mut g4, mut g6) = (c(0.0, 0.0), c(0.0, 0.0));
        for m in -r..=r {
            for n in -r..=r {
                if m == 0 && n == 0 {
                    continue;
                }
                let w = b.point(m, n);
                let w2 = w * w;
                g4 += 1.0 / (w2 * w2);
                g6 += 1.0 / (w2 * w2 * w2);
            }
        }
        (60.0 * g4, 140.0 * g6)
    };
    let (a2, a3) = box_sum(radius);
    let (b2, b3) = box_sum(2 * radius);
    // the tail of the weight-4 sum decays like r^-2
    ((4.0 * b2 - a2) / 3.0, b3 + (b3 - a3) / 15.0)
}

#[test]
fn invariants_match_eisenstein_sums() {
    for (w1, w2) in [
        (c(1.0, 0.0), c(0.0, 1.0)),
        (c(1.0, 0.0), c(0.5, 0.866_025_403_784_438_6)),
        (c(1.3, 0.2), c(-0.4, 1.7)),
        (c(0.7, -0.3), c(0.9, 1.1)),
    ] {
        let b = LatticeBasis::new(w1, w2).unwrap();
        let (g2, g3) = invariants_from_periods(&b).unwrap();
        let (e2, e3) = eisenstein(&b, 60);
        let s = b.omega1().norm();
        assert!(
            (g2 - e2).norm() < 1e-4 * s.powi(-4).max(g2.norm()),
            "{g2} {e2}"
        );
        assert!(
            (g3 - e3).norm() < 1e-4 * s.powi(-6).max(g3.norm()),
            "{g3} {e3}"
        );
    }
}

#[test]
fn lemniscatic_periods_match_gamma_values() {
    // g2 = 4, g3 = 0: real period 2ϖ with ϖ = Γ(1/4)² / (2√(2π))
    let e = curve_from_invariants(c(4.0, 0.0), c(0.0, 0.0)).unwrap();
    let varpi = 2.622_057_554_292_119_8;
    let shortest = [e.omega(CycleIndex::First), e.omega(CycleIndex::Second)]
        .iter()
        .map(|w| w.norm())
        .fold(f64::INFINITY, f64::min);
    assert!((shortest - varpi).abs() < 1e-12, "{shortest}");
}

#[test]
fn sigma_ratio_across_a_lattice_point() {
    let e = curve_from_seed(17);
    let l = e.lattice();
    let h = 1e-4 * e.scale();
    for (m, n) in [(1, 0), (0, 1), (2, -1)] {
        let w = l.point(m, n);
        // σ(w + h) / σ(w - h) = -exp(2 η(w) h)
        let ratio = sigma(w + h, &e) / sigma(w - h, &e);
        let expected = -(2.0 * e.eta_of(m, n) * h).exp();
        assert!((ratio - expected).norm() < 1e-9, "{ratio} {expected}");
    }
}
