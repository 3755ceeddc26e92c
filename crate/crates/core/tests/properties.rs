use num_traits::Zero;
use proptest::prelude::*;
use tandem_core::asymptotics::{chamber_infimum, rate_function, relaxation_time};
use tandem_core::kernels::{km_kernel, noncrossing_prob, pi_q, pi_q_support, lambda_q};
use tandem_core::queueprobs::{kt00_sum31, kt00_sum32, kt_general, mm1_kt};
use tandem_core::symfunc::{complete_homogeneous, elementary, enumerate_gt, schur, SchurMethod};
use tandem_core::types::permutations;
use tandem_core::{Exact, QueueState, RateVector, WeylPoint};

fn rational() -> impl Strategy<Value = Exact> {
    (1i64..=15, 1i64..=7).prop_map(|(n, d)| Exact::new(n.into(), d.into()))
}

fn rationals(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Exact>> {
    prop::collection::vec(rational(), len)
}

fn distinct(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Exact>> {
    rationals(len).prop_filter("distinct", |v| {
        (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] != v[j]))
    })
}

/// Two-decimal rates in `[lo, hi]`.
fn decimal_rates(len: usize, lo: u32, hi: u32) -> impl Strategy<Value = RateVector> {
    prop::collection::vec(lo..=hi, len)
        .prop_map(|v| {
            let s: Vec<String> = v.iter().map(|c| format!("{}.{:02}", c / 100, c % 100)).collect();
            RateVector::parse(&s.join(",")).unwrap()
        })
        .prop_filter("distinct", |nu| nu.is_distinct(1e-3))
}

fn stable_rates(stations: usize) -> impl Strategy<Value = RateVector> {
    decimal_rates(stations + 1, 50, 500).prop_filter("stable", |nu| nu.is_stable() && nu.max_load() < 0.9)
}

fn chamber(len: usize, max: i64) -> impl Strategy<Value = WeylPoint> {
    prop::collection::vec(0..=max, len).prop_map(|mut v| {
        v.sort_by(|a, b| b.cmp(a));
        WeylPoint::new(v).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn e_h_orthogonality(alpha in rationals(1..=5), n in 1i64..=10) {
        let mut s = Exact::zero();
        for r in 0..=n {
            let term = elementary(r, &alpha) * complete_homogeneous(n - r, &alpha);
            s = if r % 2 == 0 { s + term } else { s - term };
        }
        prop_assert!(s.is_zero());
    }

    #[test]
    fn schur_is_symmetric(alpha in rationals(1..=4), shape in chamber(4, 4), seed in 0usize..24) {
        let len = alpha.len();
        let z = WeylPoint::new(shape.coords()[..len].to_vec()).unwrap();
        let perm = permutations(len).nth(seed % (1..=len).product::<usize>()).unwrap();
        let permuted: Vec<Exact> = perm.iter().map(|&k| alpha[k].clone()).collect();
        let a: Exact = schur(&z, &alpha, SchurMethod::GtSum).unwrap();
        let b: Exact = schur(&z, &permuted, SchurMethod::GtSum).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pattern_count_is_schur_at_ones(shape in chamber(4, 4)) {
        let ones = vec![Exact::from_integer(1.into()); 4];
        let count = enumerate_gt(&shape, None).count() as i64;
        let s: Exact = schur(&shape, &ones, SchurMethod::GtSum).unwrap();
        prop_assert_eq!(s, Exact::from_integer(count.into()));
    }

    #[test]
    fn pi_q_left_inverts_lambda_q(
        rates in distinct(2..=3),
        q in prop::collection::vec(0i64..=4, 2),
        q2 in prop::collection::vec(0i64..=4, 2),
    ) {
        let nu = RateVector::from_exact(rates).unwrap();
        let stations = nu.stations();
        let q = QueueState::new(q[..stations].to_vec()).unwrap();
        let q2 = QueueState::new(q2[..stations].to_vec()).unwrap();
        let mut s = Exact::zero();
        for z in pi_q_support(&q) {
            let c: Exact = pi_q(&q, &z, &nu).unwrap();
            if !c.is_zero() {
                s += c * lambda_q::<Exact>(&z, &q2, &nu).unwrap();
            }
        }
        let want = Exact::from_integer(i64::from(q == q2).into());
        prop_assert_eq!(s, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kt00_symmetric_in_services(nu in stable_rates(3), t in 0.1f64..3.0, seed in 0usize..6) {
        let perm: Vec<usize> = std::iter::once(0)
            .chain(permutations(3).nth(seed).unwrap().into_iter().map(|k| k + 1))
            .collect();
        let a = kt00_sum31(&t, &nu, 1e-13).unwrap().value;
        let b = kt00_sum31(&t, &nu.permuted(&perm), 1e-13).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-10 * a.abs(), "{} vs {}", a, b);
    }

    #[test]
    fn theorem_forms_agree(nu in stable_rates(2), t in 0.1f64..5.0) {
        let a = kt00_sum31(&t, &nu, 1e-12).unwrap();
        let b = kt00_sum32(&t, &nu, 1e-12).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.abs_error + b.abs_error + 1e-10);
    }

    #[test]
    fn probabilities_in_unit_interval(
        nu in decimal_rates(3, 50, 400),
        q in prop::collection::vec(0i64..=3, 2),
        q2 in prop::collection::vec(0i64..=3, 2),
        t in 0.1f64..2.0,
    ) {
        let q = QueueState::new(q).unwrap();
        let q2 = QueueState::new(q2).unwrap();
        let v = kt_general(&q, &q2, &t, &nu, 1e-10).unwrap();
        prop_assert!(v.value >= -v.abs_error - 1e-12 && v.value <= 1.0 + v.abs_error + 1e-12, "{:?}", v);
        let x = WeylPoint::new(vec![q.values()[0] + q.values()[1], q.values()[1], 0]).unwrap();
        let p = noncrossing_prob(&x, &t, &nu, 1e-10).unwrap();
        prop_assert!(p.value >= -p.abs_error - 1e-12 && p.value <= 1.0 + p.abs_error + 1e-12);
    }

    #[test]
    fn km_entries_are_probabilities(
        nu in decimal_rates(3, 50, 400),
        z in chamber(3, 3),
        step in prop::collection::vec(0i64..=3, 3),
        t in 0.1f64..2.0,
    ) {
        let z2: Vec<i64> = z.coords().iter().zip(&step).map(|(a, b)| a + b).collect();
        if let Ok(z2) = WeylPoint::new(z2) {
            let v: f64 = km_kernel(&z, &z2, &t, &nu).unwrap();
            prop_assert!(v >= -1e-14 && v <= 1.0 + 1e-14, "{}", v);
        }
    }

    #[test]
    fn mm1_is_a_noncrossing_probability(nu0 in 0.2f64..3.0, nu1 in 0.2f64..3.0, t in 0.05f64..5.0) {
        let nu = RateVector::new(&[nu1, nu0]).unwrap();
        let p = noncrossing_prob(&WeylPoint::zero(2), &t, &nu, 1e-13).unwrap();
        let m = mm1_kt(0, 0, t, nu0, nu1);
        prop_assert!((p.value - m).abs() <= p.abs_error + 1e-12, "{} vs {}", p.value, m);
    }
}

fn chamber_real(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..8.0, len).prop_map(|mut v| {
        v.sort_by(|a, b| b.total_cmp(a));
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rate_function_is_convex(
        nu in decimal_rates(4, 10, 600),
        x in prop::collection::vec(0.0f64..8.0, 4),
        y in prop::collection::vec(0.0f64..8.0, 4),
    ) {
        let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let lhs = rate_function(&m, &nu);
        let rhs = 0.5 * (rate_function(&x, &nu) + rate_function(&y, &nu));
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn infimum_is_a_lower_bound(nu in stable_rates(3), x in chamber_real(4), seed in 0usize..24) {
        let inf = chamber_infimum(&nu).unwrap();
        let sigma = permutations(4).filter(|s| s[3] != 0).nth(seed % 18).unwrap();
        let v = rate_function(&x, &nu.permuted(&sigma));
        prop_assert!(inf.value <= v + 1e-12, "{} > {} at {:?}", inf.value, v, x);
    }

    #[test]
    fn bottleneck_reduction(nu in stable_rates(3)) {
        let slow = nu.rates()[1..].iter().copied().fold(f64::INFINITY, f64::min);
        let pos = nu.rates().iter().position(|&r| r == slow).unwrap();
        let pair = nu.permuted(&[0, pos]);
        let a = relaxation_time(&nu).unwrap();
        let b = relaxation_time(&pair).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }
}
