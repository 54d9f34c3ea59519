//! Modified Bessel functions of the first kind `I_k`, both as exact series
//! and as floating-point values, plus factorial helpers.
//!
//! The float evaluator sums the defining series with term-ratio stopping and
//! is reference-grade on `0 <= x <= 50` (relative error ~1e-15, guaranteed
//! well under 1e-14). Larger arguments are a domain error here; asymptotic
//! callers work in log space instead (see `asymptotics::ln_i0`).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::{factorial, Rational, TruncatedSeries};

/// Largest argument accepted by [`bessel_eval`].
pub const MAX_FLOAT_ARG: f64 = 50.0;

/// Exact series of `I_k`: the coefficient of `z^{2j+k}` is
/// `1 / (2^{2j+k} j! (j+k)!)`, every other slot zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BesselSeries {
    pub index: u32,
    pub series: TruncatedSeries,
}

/// Exact truncated series of `I_k(z)` up to `z^order`.
pub fn bessel_series(k: u32, order: usize) -> BesselSeries {
    assert!(
        order >= k as usize,
        "order {order} too small to hold the leading z^{k} term of I_{k}"
    );
    let series = TruncatedSeries::from_fn(order, |m| {
        if m < k as usize || !(m - k as usize).is_multiple_of(2) {
            return Rational::zero();
        }
        let j = (m - k as usize) / 2;
        let den = (BigInt::one() << m) * factorial(j) * factorial(j + k as usize);
        Rational::new(BigInt::one(), den)
    });
    BesselSeries { index: k, series }
}

/// Even-variable form: the series of `I_k(sqrt(w)) / sqrt(w)^k` in `w`,
/// whose coefficient of `w^j` is `1 / (2^{2j+k} j! (j+k)!)`.
///
/// Working in `w = z^2` halves every convolution length; all series in this
/// crate built from products of `I_0` use it.
pub fn bessel_even_series(k: u32, order: usize) -> TruncatedSeries {
    TruncatedSeries::from_fn(order, |j| {
        let den =
            (BigInt::one() << (2 * j + k as usize)) * factorial(j) * factorial(j + k as usize);
        Rational::new(BigInt::one(), den)
    })
}

/// `I_k(x)` for `0 <= x <= 50` by direct series summation.
pub fn bessel_eval(k: u32, x: f64) -> Result<f64> {
    if !(0.0..=MAX_FLOAT_ARG).contains(&x) {
        return Err(Error::Domain(format!(
            "bessel_eval supports 0 <= x <= {MAX_FLOAT_ARG}, got {x}"
        )));
    }
    Ok(bessel_eval_unchecked(k, x))
}

pub(crate) fn bessel_eval_unchecked(k: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    // term_0 = (x/2)^k / k!
    let mut term = 1.0;
    for j in 1..=k {
        term *= half / j as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut j = 1.0;
    loop {
        term *= q / (j * (j + k as f64));
        sum += term;
        if term <= f64::EPSILON * sum {
            return sum;
        }
        j += 1.0;
    }
}

/// Exact partial sum of the `I_k` series at a rational point, `terms` terms.
///
/// Cross-check oracle for the float evaluator.
pub fn bessel_eval_exact_partial(k: u32, x: &Rational, terms: usize) -> Rational {
    let x2 = x * x;
    let mut acc = Rational::zero();
    // term_j = x^{2j+k} / (2^{2j+k} j! (j+k)!)
    let mut term = Rational::new(
        num_traits::pow::pow(x.numer().clone(), k as usize),
        num_traits::pow::pow(x.denom().clone(), k as usize)
            * (BigInt::one() << k)
            * factorial(k as usize),
    );
    for j in 0..terms {
        acc += &term;
        let den = Rational::from(BigInt::from(4 * (j + 1) * (j + 1 + k as usize)));
        term = term * &x2 / den;
    }
    acc
}

/// Double factorial `n!!` with the empty-product conventions
/// `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> BigInt {
    assert!(n >= -1, "double factorial needs n >= -1, got {n}");
    let mut acc = BigInt::one();
    let mut m = n;
    while m >= 2 {
        acc *= BigInt::from(m);
        m -= 2;
    }
    acc
}

/// Scaled-integer power series: `out[k] = 4^k k!^2 [w^k] I_0(sqrt w)^M`,
/// a sum of squared multinomial coefficients and hence an integer.
///
/// `I_0` itself is the all-ones vector in this representation; products obey
/// the binomial-squared twisted convolution
/// `(a*b)[k] = sum_j C(k,j)^2 a[j] b[k-j]`. Working with these integers
/// avoids all the gcd reductions a rational convolution would pay for.
pub(crate) fn i0_pow_scaled(exponent: usize, order: usize) -> Vec<num_bigint::BigUint> {
    use num_bigint::BigUint;
    let binom_sq = binomial_squares(order);
    let mut result: Option<Vec<BigUint>> = None;
    let mut base: Vec<BigUint> = vec![BigUint::one(); order + 1];
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => twisted_mul(&r, &base, &binom_sq),
            });
        }
        e >>= 1;
        if e > 0 {
            base = twisted_mul(&base, &base, &binom_sq);
        }
    }
    result.unwrap_or_else(|| {
        let mut one = vec![BigUint::zero(); order + 1];
        one[0] = BigUint::one();
        one
    })
}

/// The diagonal `4^{k-1} ((k-1)!)^2 [w^{k-1}] I_0(sqrt w)^k` for
/// `k = 1 ..= count`, by one pass of the twisted row recurrence
/// `T^{(M+1)}[k] = sum_j C(k,j)^2 T^{(M)}[j]`.
pub(crate) fn i0_power_diagonal(count: usize) -> Vec<num_bigint::BigUint> {
    use num_bigint::BigUint;
    assert!(count >= 1);
    let order = count - 1;
    let binom_sq = binomial_squares(order);
    let mut row: Vec<BigUint> = vec![BigUint::one(); order + 1]; // I_0^1
    let mut out = Vec::with_capacity(count);
    out.push(row[0].clone());
    for _exp in 2..=count {
        row = (0..=order)
            .map(|k| {
                let mut acc = BigUint::zero();
                for j in 0..=k {
                    acc += &binom_sq[k][j] * &row[j];
                }
                acc
            })
            .collect();
        if out.len() < count {
            out.push(row[out.len()].clone());
        }
    }
    out
}

pub(crate) fn binomial_squares(order: usize) -> Vec<Vec<num_bigint::BigUint>> {
    use num_bigint::BigUint;
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut row = Vec::with_capacity(k + 1);
        for j in 0..=k {
            let b: BigUint = if j == 0 {
                BigUint::one()
            } else {
                let mut num = BigUint::one();
                for i in 0..j.min(k - j) {
                    num = num * BigUint::from(k - i) / BigUint::from(i + 1);
                }
                num
            };
            row.push(&b * &b);
        }
        rows.push(row);
    }
    rows
}

pub(crate) fn twisted_mul(
    a: &[num_bigint::BigUint],
    b: &[num_bigint::BigUint],
    binom_sq: &[Vec<num_bigint::BigUint>],
) -> Vec<num_bigint::BigUint> {
    use num_bigint::BigUint;
    let n = a.len();
    let mut out = vec![BigUint::zero(); n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = BigUint::zero();
        for j in 0..=k {
            acc += &binom_sq[k][j] * &a[j] * &b[k - j];
        }
        *slot = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, ratio, rational_to_f64};

    #[test]
    fn i0_series_low_coefficients() {
        let s = bessel_series(0, 6).series;
        assert_eq!(s.coeff(0), &rat(1));
        assert_eq!(s.coeff(2), &ratio(1, 4));
        assert_eq!(s.coeff(4), &ratio(1, 64));
        assert_eq!(s.coeff(6), &ratio(1, 2304));
        assert_eq!(s.coeff(1), &rat(0));
        assert_eq!(s.coeff(3), &rat(0));
    }

    #[test]
    fn i1_leading_term() {
        let s = bessel_series(1, 3).series;
        assert_eq!(s.coeff(0), &rat(0));
        assert_eq!(s.coeff(1), &ratio(1, 2));
    }

    #[test]
    fn i2_z4_coefficient() {
        // 1/(2^4 * 1! * 3!) = 1/96
        let s = bessel_series(2, 4).series;
        assert_eq!(s.coeff(4), &ratio(1, 96));
    }

    #[test]
    fn i0_squared_convolution() {
        // I_0^2 = 1 + z^2/2 + 3 z^4/32 + ...
        let sq = bessel_series(0, 4).series.pow(2);
        assert_eq!(sq.coeff(0), &rat(1));
        assert_eq!(sq.coeff(2), &ratio(1, 2));
        assert_eq!(sq.coeff(4), &ratio(3, 32));
    }

    #[test]
    fn i0_fifth_power_z4() {
        // 5*(1/64) + 10*(1/16) = 45/64
        let p = bessel_series(0, 4).series.pow(5);
        assert_eq!(p.coeff(4), &ratio(45, 64));
    }

    #[test]
    fn recip_i0_low_orders() {
        // 1/(1 + t) = 1 - t + t^2 with t = z^2/4 + z^4/64:
        // z^4 coefficient -1/64 + 1/16 = 3/64.
        let inv = bessel_series(0, 4).series.recip().unwrap();
        assert_eq!(inv.coeff(0), &rat(1));
        assert_eq!(inv.coeff(2), &ratio(-1, 4));
        assert_eq!(inv.coeff(4), &ratio(3, 64));
    }

    #[test]
    fn even_series_matches_full_series() {
        let even = bessel_even_series(0, 5);
        let full = bessel_series(0, 10).series;
        for j in 0..=5 {
            assert_eq!(even.coeff(j), full.coeff(2 * j));
        }
        let even1 = bessel_even_series(1, 4);
        let full1 = bessel_series(1, 9).series;
        for j in 0..=4 {
            assert_eq!(even1.coeff(j), full1.coeff(2 * j + 1));
        }
    }

    #[test]
    fn eval_at_zero() {
        assert_eq!(bessel_eval(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_eval(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn eval_against_exact_partial_sum() {
        // 50 exact terms at x = 1 are far below f64 resolution.
        let exact = rational_to_f64(&bessel_eval_exact_partial(0, &rat(1), 50));
        let float = bessel_eval(0, 1.0).unwrap();
        assert!((float - exact).abs() <= 1e-15 * exact);

        let exact2 = rational_to_f64(&bessel_eval_exact_partial(2, &ratio(5, 2), 60));
        let float2 = bessel_eval(2, 2.5).unwrap();
        assert!((float2 - exact2).abs() <= 1e-14 * exact2);
    }

    #[test]
    fn eval_near_criticality() {
        // u_c I_1(u_c) - 2 I_0(u_c) crosses zero at u_c = 2.5844...
        let u = 2.5844;
        let lhs = u * bessel_eval(1, u).unwrap() - 2.0 * bessel_eval(0, u).unwrap();
        assert!(lhs.abs() <= 1e-3 * bessel_eval(0, u).unwrap());
    }

    #[test]
    fn eval_domain_error() {
        assert!(bessel_eval(0, 50.5).is_err());
        assert!(bessel_eval(0, -0.1).is_err());
    }

    #[test]
    fn recurrence_in_floats() {
        // I_{k-1}(x) - I_{k+1}(x) = (2k/x) I_k(x)
        for &x in &[0.5, 1.0, 2.5844, 5.0] {
            for k in 1..=10u32 {
                let lhs = bessel_eval(k - 1, x).unwrap() - bessel_eval(k + 1, x).unwrap();
                let rhs = 2.0 * k as f64 / x * bessel_eval(k, x).unwrap();
                let scale = bessel_eval(k - 1, x).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * scale,
                    "recurrence residual too large at k={k}, x={x}"
                );
            }
        }
    }

    #[test]
    fn recurrence_exact_at_series_level() {
        // x*(I_{k-1} - I_{k+1}) = 2k I_k coefficient-wise.
        let order = 16;
        for k in 1..=6u32 {
            let low = bessel_series(k - 1, order).series;
            let high = bessel_series(k + 1, order).series;
            let mid = bessel_series(k, order).series;
            let diff = low.sub(&high);
            for m in 0..order {
                // coefficient of z^{m+1} in x*(I_{k-1}-I_{k+1}) is diff[m]
                let lhs = diff.coeff(m).clone();
                let rhs = mid.coeff(m + 1) * rat(2 * k as i64);
                assert_eq!(lhs, rhs, "series recurrence failed at k={k}, z^{m}");
            }
        }
    }

    #[test]
    fn i1_is_derivative_of_i0() {
        let d = bessel_series(0, 12).series.derivative();
        let i1 = bessel_series(1, 11).series;
        assert_eq!(d, i1);
    }

    #[test]
    fn i0_monotone_increasing() {
        let mut prev = bessel_eval(0, 0.0).unwrap();
        for i in 1..=100 {
            let x = 0.5 * i as f64;
            let v = bessel_eval(0, x).unwrap();
            assert!(v > prev, "I_0 not increasing at x={x}");
            prev = v;
        }
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(-1), BigInt::from(1));
        assert_eq!(double_factorial(0), BigInt::from(1));
        assert_eq!(double_factorial(5), BigInt::from(15));
        assert_eq!(double_factorial(9), BigInt::from(945));
        assert_eq!(double_factorial(10), BigInt::from(3840));
    }

    #[test]
    #[should_panic(expected = "n >= -1")]
    fn double_factorial_rejects_below_minus_one() {
        let _ = double_factorial(-2);
    }
}
