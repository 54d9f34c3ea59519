//! Property tests for the exact series ring.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use strebel::series::{Rational, TruncatedSeries};

const ORDER: usize = 16;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..30, 1i64..12).prop_map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
}

fn series() -> impl Strategy<Value = TruncatedSeries> {
    proptest::collection::vec(rational(), ORDER + 1).prop_map(TruncatedSeries::from_coeffs)
}

fn unit_series() -> impl Strategy<Value = TruncatedSeries> {
    series().prop_map(|s| {
        if s.coeff(0).is_zero() {
            s.add(&TruncatedSeries::one(ORDER))
        } else {
            s
        }
    })
}

fn monic_series() -> impl Strategy<Value = TruncatedSeries> {
    proptest::collection::vec(rational(), ORDER + 1).prop_map(|mut coeffs| {
        coeffs[0] = Rational::zero();
        coeffs[1] = Rational::one();
        TruncatedSeries::from_coeffs(coeffs)
    })
}

fn canonical(s: &TruncatedSeries) -> bool {
    s.coeffs()
        .iter()
        .all(|c| c.denom().is_positive() && c.numer().gcd(c.denom()).abs() <= BigInt::one())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mul_commutes(a in series(), b in series()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
    }

    #[test]
    fn mul_associates(a in series(), b in series(), c in series()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn mul_distributes(a in series(), b in series(), c in series()) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn recip_is_inverse(a in unit_series()) {
        let inv = a.recip().unwrap();
        prop_assert_eq!(a.mul(&inv), TruncatedSeries::one(ORDER));
        prop_assert!(canonical(&inv));
    }

    #[test]
    fn reversion_round_trip(a in monic_series()) {
        let g = a.reversion().unwrap();
        prop_assert_eq!(a.compose(&g).unwrap(), TruncatedSeries::identity(ORDER));
        prop_assert_eq!(g.compose(&a).unwrap(), TruncatedSeries::identity(ORDER));
    }

    #[test]
    fn results_stay_canonical(a in series(), b in series()) {
        prop_assert!(canonical(&a.mul(&b)));
        prop_assert!(canonical(&a.add(&b)));
        prop_assert!(canonical(&a.sub(&b)));
    }

    #[test]
    fn pow_matches_repeated_mul(a in series(), k in 0u64..6) {
        let mut expected = TruncatedSeries::one(ORDER);
        for _ in 0..k {
            expected = expected.mul(&a);
        }
        prop_assert_eq!(a.pow(k), expected);
    }
}
