//! Truncated formal power series over arbitrary-precision rationals.
//!
//! A [`TruncatedSeries`] stores coefficients of `x^0 .. x^order` exactly;
//! arithmetic never reads or fabricates coefficients beyond the truncation
//! order. Binary operations require both operands to carry the *same* order
//! and panic otherwise: silent re-truncation is the classic source of wrong
//! coefficients, so mixing orders must be explicit via [`TruncatedSeries::truncated`].
//!
//! Convolutions are quadratic in the order. Orders used in this crate stay
//! below ~800, for which quadratic cost is acceptable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar: arbitrary-precision, always in lowest terms,
/// denominator positive (both invariants maintained by `num-rational`).
pub type Rational = BigRational;

/// Build a rational from an integer pair, reducing to lowest terms.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer-valued rational.
pub fn rat(num: i64) -> Rational {
    Rational::from(BigInt::from(num))
}

/// Format a rational as `p/q`, denominator always explicit.
pub fn frac_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Exact `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// One-variable formal power series truncated at `order` (inclusive).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// The zero series `0 + O(x^{order+1})`.
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    /// The constant series `1`.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// The identity series `x`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    /// Series with coefficients `f(0), f(1), ..., f(order)`.
    pub fn from_fn(order: usize, f: impl Fn(usize) -> Rational) -> Self {
        Self {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    /// Series from an explicit coefficient vector; the order is `len - 1`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "series needs at least the x^0 coefficient"
        );
        Self { coeffs }
    }

    /// Truncation order (inclusive degree of the last stored coefficient).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^k`. Panics if `k` exceeds the truncation order.
    pub fn coeff(&self, k: usize) -> &Rational {
        assert!(
            k <= self.order(),
            "coefficient x^{k} requested from a series truncated at order {}",
            self.order()
        );
        &self.coeffs[k]
    }

    /// All coefficients, index = exponent.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Explicit re-truncation to a lower (or equal) order.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(
            order <= self.order(),
            "cannot extend a series truncated at order {} to order {order}",
            self.order()
        );
        Self {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    fn assert_same_order(&self, other: &Self, op: &str) {
        assert!(
            self.order() == other.order(),
            "{op} on mismatched truncation orders {} and {}",
            self.order(),
            other.order()
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_order(other, "add");
        Self::from_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_order(other, "sub");
        Self::from_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Cauchy product truncated to the common order.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_order(other, "mul");
        let n = self.order();
        let mut out = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(out)
    }

    /// `self^k` by binary exponentiation; `k = 0` gives the constant 1.
    pub fn pow(&self, k: u64) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplicative inverse: `b` with `self * b = 1` to the truncation order.
    pub fn recip(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::Domain(
                "cannot invert a series with zero constant term".into(),
            ));
        }
        let n = self.order();
        let inv_a0 = a0.recip();
        let mut b = vec![Rational::zero(); n + 1];
        b[0] = inv_a0.clone();
        for k in 1..=n {
            let mut acc = Rational::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &b[k - j];
                }
            }
            b[k] = -acc * &inv_a0;
        }
        Ok(Self::from_coeffs(b))
    }

    /// Composition `self ∘ inner`, requiring `inner(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.assert_same_order(inner, "compose");
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Domain(
                "composition requires the inner series to vanish at 0".into(),
            ));
        }
        // Horner evaluation in the series ring.
        let n = self.order();
        let mut result = Self::zero(n);
        result.coeffs[0] = self.coeffs[n].clone();
        for k in (0..n).rev() {
            result = result.mul(inner);
            result.coeffs[0] += &self.coeffs[k];
        }
        Ok(result)
    }

    /// Formal derivative, truncated at `order - 1`.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        assert!(n >= 1, "cannot differentiate a constant-only series");
        Self::from_fn(n - 1, |k| &self.coeffs[k + 1] * rat((k + 1) as i64))
    }

    /// Compositional inverse: `g` with `self(g(w)) = w` to the truncation order.
    ///
    /// Requires `self(0) = 0` and `self'(0) ≠ 0`. Newton iteration on series,
    /// working at order `2^k` on pass `k` so the cost is dominated by the
    /// final doubling; all arithmetic is exact.
    pub fn reversion(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Domain(
                "reversion requires a series vanishing at 0".into(),
            ));
        }
        let n = self.order();
        if n < 1 || self.coeffs[1].is_zero() {
            return Err(Error::Domain(
                "reversion requires a nonzero linear coefficient".into(),
            ));
        }
        let mut g = Self::from_coeffs(vec![Rational::zero(), self.coeffs[1].recip()]);
        let mut correct = 1usize;
        while correct < n {
            let work = (2 * correct).min(n);
            let target = self.truncated(work);
            // derivative padded back to `work`; its top coefficient only
            // feeds terms beyond the truncation inside the update
            let mut deriv = target.derivative().coeffs;
            deriv.push(Rational::zero());
            let deriv = Self::from_coeffs(deriv);
            // zero-extend the current iterate as the Newton starting guess
            let mut guess = g.coeffs;
            guess.resize(work + 1, Rational::zero());
            let guess = Self::from_coeffs(guess);
            let residual = target.compose(&guess)?.sub(&Self::identity(work));
            let slope = deriv.compose(&guess)?;
            g = guess.sub(&residual.mul(&slope.recip()?));
            correct = work;
        }
        Ok(g)
    }

    /// Evaluate in floating point at `x` (Horner).
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    /// Evaluate exactly at a rational point (Horner).
    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Laurent series `x^{val} * (power series)` with exact coefficients.
///
/// Only what the positive-part projection needs: products, valuation shifts
/// and the projection itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    val: i64,
    ser: TruncatedSeries,
}

impl Laurent {
    /// Wrap a power series as a Laurent series with valuation shift `val`.
    pub fn new(val: i64, ser: TruncatedSeries) -> Self {
        Self { val, ser }
    }

    pub fn from_series(ser: TruncatedSeries) -> Self {
        Self { val: 0, ser }
    }

    pub fn valuation_shift(&self) -> i64 {
        self.val
    }

    pub fn series_part(&self) -> &TruncatedSeries {
        &self.ser
    }

    /// Coefficient of `x^k`; zero below the valuation, panics above the
    /// highest exactly-known exponent `val + order`.
    pub fn coeff(&self, k: i64) -> Rational {
        if k < self.val {
            return Rational::zero();
        }
        self.ser.coeff((k - self.val) as usize).clone()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            val: self.val + other.val,
            ser: self.ser.mul(&other.ser),
        }
    }

    /// Keep only coefficients of nonnegative powers, as a power series
    /// truncated at `order`. Requires enough known coefficients.
    pub fn positive_part(&self, order: usize) -> TruncatedSeries {
        let highest = self.val + self.ser.order() as i64;
        assert!(
            order as i64 <= highest,
            "positive part to order {order} needs coefficients up to x^{order}, \
             but the Laurent series is only known to x^{highest}"
        );
        TruncatedSeries::from_fn(order, |k| self.coeff(k as i64))
    }

    /// The discarded strictly-negative part, as coefficients of
    /// `x^{-1}, x^{-2}, ...` (index j holds the coefficient of `x^{-(j+1)}`).
    pub fn polar_part(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut k = -1i64;
        while k >= self.val {
            out.push(self.coeff(k));
            k -= 1;
        }
        out
    }
}

/// Convert an exact rational to the nearest f64, robust to numerators and
/// denominators far beyond f64 range.
pub fn rational_to_f64(x: &Rational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    // num-rational's to_f64 handles the common range; fall back to log-space
    // scaling for extreme magnitudes.
    let direct = num_traits::ToPrimitive::to_f64(x);
    if let Some(v) = direct {
        if v.is_finite() && (v != 0.0 || x.is_zero()) {
            return v;
        }
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let ln = ln_rational_abs(x);
    sign * ln.exp()
}

/// Natural log of `|x|` for a nonzero rational of arbitrary magnitude.
pub fn ln_rational_abs(x: &Rational) -> f64 {
    assert!(!x.is_zero(), "log of zero rational");
    ln_bigint_abs(x.numer()) - ln_bigint_abs(x.denom())
}

/// Natural log of `|n|` for a nonzero big integer of arbitrary magnitude.
pub fn ln_bigint_abs(n: &BigInt) -> f64 {
    let mag = n.magnitude();
    let bits = mag.bits();
    if bits <= 53 {
        return num_traits::ToPrimitive::to_f64(mag)
            .expect("<=53-bit integer fits f64")
            .ln();
    }
    // Take the top 53 bits and account for the shift.
    let shift = bits - 53;
    let top: num_bigint::BigUint = mag >> shift;
    let top = num_traits::ToPrimitive::to_f64(&top).expect("53-bit integer fits f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
