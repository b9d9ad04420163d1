use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use schurcat::{qbinom, qint, QPoint, QScalar};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `[n choose k]` at base `q^d` from the inversion count of k-subsets: the standard Gaussian
/// coefficient in `q^{2d}`, recentred by `q^{-d k (n-k)}`.
fn subset_oracle(n: u32, k: u32, d: u32) -> QScalar {
    let mut terms = vec![];
    for mask in 0u32..(1 << n) {
        if mask.count_ones() != k {
            continue;
        }
        let sum: i64 = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b as i64).sum();
        let inv = sum - (k as i64) * (k as i64 - 1) / 2;
        let e = d as i64 * (2 * inv - (k as i64) * (n as i64 - k as i64));
        terms.push((e, rat(1, 1)));
    }
    QScalar::laurent(terms)
}

fn binomial(n: u32, k: u32) -> BigRational {
    let mut acc = rat(1, 1);
    for i in 0..k {
        acc = acc * rat((n - i) as i64, (i + 1) as i64);
    }
    acc
}

fn laurent() -> impl Strategy<Value = QScalar> {
    prop::collection::vec((-4i64..=4, -3i64..=3), 0..4)
        .prop_map(|ts| QScalar::laurent(ts.into_iter().map(|(e, c)| (e, rat(c, 1)))))
}

fn scalar() -> impl Strategy<Value = QScalar> {
    (laurent(), laurent()).prop_map(|(a, b)| if b.is_zero() { a } else { a.div(&b).unwrap() })
}

#[test]
fn qbinom_matches_subset_count() {
    for d in 1..=3 {
        for n in 0..=8 {
            for k in 0..=n {
                assert_eq!(qbinom(n, k as i64, d), subset_oracle(n, k, d), "n={n} k={k} d={d}");
            }
        }
    }
}

#[test]
fn qbinom_out_of_range_is_zero() {
    assert!(qbinom(4, -1, 1).is_zero());
    assert!(qbinom(4, 5, 1).is_zero());
}

#[test]
fn qint_small_values() {
    assert_eq!(qint(0, 1), QScalar::zero());
    assert_eq!(qint(1, 1), QScalar::one());
    assert_eq!(qint(2, 1), QScalar::parse("q + q^-1").unwrap());
    assert_eq!(qint(-2, 2), QScalar::parse("-q^2 - q^-2").unwrap());
}

proptest! {
    #[test]
    fn q_pascal_both_forms(n in 1u32..=8, k in 0i64..=8, d in 1u32..=3) {
        let k = k.min(n as i64);
        let lhs = qbinom(n, k, d);
        let di = d as i64;
        let r1 = &(&QScalar::q_pow(-di * k) * &qbinom(n - 1, k, d))
            + &(&QScalar::q_pow(di * (n as i64 - k)) * &qbinom(n - 1, k - 1, d));
        let r2 = &(&QScalar::q_pow(di * k) * &qbinom(n - 1, k, d))
            + &(&QScalar::q_pow(-di * (n as i64 - k)) * &qbinom(n - 1, k - 1, d));
        prop_assert_eq!(&lhs, &r1);
        prop_assert_eq!(&lhs, &r2);
    }

    #[test]
    fn qbinom_bar_invariant_and_classical_limit(n in 0u32..=8, k in 0u32..=8, d in 1u32..=3) {
        let k = k.min(n);
        let b = qbinom(n, k as i64, d);
        prop_assert_eq!(b.bar(), b.clone());
        prop_assert_eq!(b.specialize(&QPoint::One).unwrap(), binomial(n, k));
    }

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a - &a, QScalar::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), QScalar::one());
        }
    }

    #[test]
    fn bar_is_a_ring_involution(a in scalar(), b in scalar()) {
        prop_assert_eq!(a.bar().bar(), a.clone());
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
    }

    #[test]
    fn specialization_is_a_homomorphism(a in scalar(), b in scalar(), p in prop::sample::select(vec![(2i64, 1i64), (3, 2), (-5, 7)])) {
        let at = QPoint::Rational(rat(p.0, p.1));
        if let (Ok(x), Ok(y)) = (a.specialize(&at), b.specialize(&at)) {
            prop_assert_eq!((&a * &b).specialize(&at).unwrap(), &x * &y);
            prop_assert_eq!((&a + &b).specialize(&at).unwrap(), &x + &y);
        }
    }

    #[test]
    fn text_and_json_round_trip(a in scalar()) {
        prop_assert_eq!(QScalar::parse(&a.to_string()).unwrap(), a.clone());
        let j = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<QScalar>(&j).unwrap(), a);
    }
}

#[test]
fn division_by_zero_is_an_error() {
    assert!(QScalar::one().div(&QScalar::zero()).is_err());
    assert!(QScalar::parse("1/(q - 1)").unwrap().specialize(&QPoint::One).is_err());
}
