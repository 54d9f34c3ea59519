//! Exact volumes and correlation generating functions.
//!
//! Everything here is driven by one residue pattern: a volume with prescribed
//! perimeters is a coefficient of a product of `I_0` series, and summing over
//! the number of faces turns that coefficient into a rational function of
//! `u(m)` with the single simple zero `2 I_0(u) - u I_1(u)` in the
//! denominator. Exact statements live on rational series in `m = mu L^2`;
//! float evaluators follow the same formulas through `u_newton` and Taylor
//! jets, never finite differences.
//!
//! Scaled-integer convolutions: the coefficient `4^k k!^2 [w^k] I_0(sqrt w)^M`
//! is a sum of squared multinomials, hence an integer. Powers of `I_0` are
//! computed in that representation (binomial-squared twisted convolution),
//! which avoids every gcd reduction a rational convolution would pay for.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::bessel::{bessel_even_series, binomial_squares, i0_pow_scaled};
use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::series::{factorial, rational_to_f64, Laurent, Rational, TruncatedSeries};
use crate::taylor::{bessel_jet, u_jet, Jet};
use crate::ucurve::{critical_constants, u_newton, u_squared_series};

/// Largest Bessel argument the float evaluators accept before the caller
/// must switch to the log-space routines in `asymptotics`.
const MAX_DIRECT_BESSEL_ARG: f64 = 600.0;

/// A fixed-perimeter stratum: `M >= 3` positive rational perimeters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    perimeters: Vec<Rational>,
}

impl Stratum {
    pub fn new(perimeters: impl Into<Vec<Rational>>) -> Self {
        let perimeters = perimeters.into();
        assert!(
            perimeters.len() >= 3,
            "a stratum needs at least 3 faces, got {}",
            perimeters.len()
        );
        assert!(
            perimeters.iter().all(|p| p > &Rational::zero()),
            "perimeters must be positive"
        );
        Self { perimeters }
    }

    pub fn perimeters(&self) -> &[Rational] {
        &self.perimeters
    }
}

/// Exact stratum volume together with its homogeneity degree in the
/// perimeters (scaling every perimeter by `t` scales the volume by
/// `t^degree`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumVolume {
    pub value: Rational,
    pub degree: usize,
}

/// Volume of the stratum with the given perimeters:
/// `(1/2) (M-3)! [z^{2(M-3)}] prod_i I_0(L_i z)`, exact.
pub fn stratum_volume(s: &Stratum) -> StratumVolume {
    let m_faces = s.perimeters.len();
    let top = m_faces - 3;
    // Work in w = z^2: I_0(L z) has w-coefficients (L^2/4)^d / d!^2.
    let mut product = TruncatedSeries::one(top);
    for perimeter in &s.perimeters {
        let l2 = perimeter * perimeter;
        let factor = TruncatedSeries::from_fn(top, |d| {
            let mut c = Rational::new(BigInt::one(), BigInt::one() << (2 * d));
            let f = factorial(d);
            c /= Rational::from(&f * &f);
            for _ in 0..d {
                c *= &l2;
            }
            c
        });
        product = product.mul(&factor);
    }
    let value = product.coeff(top) * Rational::new(factorial(top), BigInt::from(2));
    StratumVolume {
        value,
        degree: 2 * top,
    }
}

/// Uniform-perimeter volume divided by `L^{2N}`:
/// `(N!/2) [z^{2N}] I_0(z)^{N+3}`, exact for any `N`.
pub fn volume_uniform(n: usize) -> Rational {
    let scaled = i0_pow_scaled(n + 3, n);
    // [w^N] I_0^{N+3} = scaled[N] / (4^N N!^2); multiply by N!/2.
    Rational::new(
        BigInt::from(scaled[n].clone()),
        (BigInt::one() << (2 * n + 1)) * factorial(n),
    )
}

/// All uniform volumes up to `n_max` in one pass of the twisted recurrence
/// `T^{(M+1)}[k] = sum_j C(k,j)^2 T^{(M)}[j]`.
pub fn volume_uniform_table(n_max: usize) -> Vec<Rational> {
    let binom_sq = binomial_squares(n_max);
    let mut row: Vec<BigUint> = vec![BigUint::one(); n_max + 1]; // I_0^1
    let mut out = Vec::with_capacity(n_max + 1);
    for m_exp in 2..=n_max + 3 {
        let next: Vec<BigUint> = (0..=n_max)
            .map(|k| {
                let mut acc = BigUint::zero();
                for j in 0..=k {
                    acc += &binom_sq[k][j] * &row[j];
                }
                acc
            })
            .collect();
        row = next;
        if m_exp >= 3 {
            let n = m_exp - 3;
            out.push(Rational::new(
                BigInt::from(row[n].clone()),
                (BigInt::one() << (2 * n + 1)) * factorial(n),
            ));
        }
    }
    out
}

/// Exact series in `w` of `I_0^4 / (2 I_0 - u I_1)`, the universal residue
/// factor (`u I_1(u) = w J(w)` with `J = I_1(sqrt w)/sqrt w`).
pub(crate) fn residue_factor_series(order: usize) -> TruncatedSeries {
    let i0 = bessel_even_series(0, order);
    let j1 = bessel_even_series(1, order);
    let shifted = TruncatedSeries::from_fn(order, |k| {
        if k == 0 {
            Rational::zero()
        } else {
            j1.coeff(k - 1).clone()
        }
    });
    let denom = i0.scale(&Rational::from(BigInt::from(2))).sub(&shifted);
    i0.pow(4)
        .mul(&denom.recip().expect("denominator has constant term 2"))
}

/// Exact series in `m` of the third mu-derivative of the volume generating
/// function: `I_0(u)^4 / (2 I_0(u) - u I_1(u))` re-expanded through `w(m)`.
pub fn d3z_closed_series(order: usize) -> TruncatedSeries {
    assert!(order >= 1);
    residue_factor_series(order)
        .compose(&u_squared_series(order))
        .expect("w(m) vanishes at 0")
}

/// Exact series in `m` of `L^2` times the second mu-derivative:
/// `u^2 (I_0(u)^2 - I_1(u)^2) / 2` through `w(m)`.
pub fn d2z_closed_series(order: usize) -> TruncatedSeries {
    assert!(order >= 1);
    let i0 = bessel_even_series(0, order);
    let j1 = bessel_even_series(1, order);
    // u^2 (I_0^2 - I_1^2) / 2 = (w I_0(sqrt w)^2 - w^2 J^2) / 2
    let i0sq = i0.pow(2);
    let j1sq = j1.pow(2);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let even = TruncatedSeries::from_fn(order, |k| {
        let mut acc = Rational::zero();
        if k >= 1 {
            acc += i0sq.coeff(k - 1);
        }
        if k >= 2 {
            acc -= j1sq.coeff(k - 2);
        }
        acc * &half
    });
    even.compose(&u_squared_series(order))
        .expect("w(m) vanishes at 0")
}

/// One-point volume at `N`: coefficients of the polynomial in `r^2 = (L_1/L)^2`,
/// index `d` holding `(N!/2) 4^{-d} d!^{-2} [z^{2(N-d)}] I_0^{N+2}`.
///
/// The full one-point volume is `L^{2N}` times this polynomial at `r = L_1/L`.
pub fn one_point_exact(n: usize) -> Vec<Rational> {
    let scaled = i0_pow_scaled(n + 2, n);
    let n_fact = factorial(n);
    (0..=n)
        .map(|d| {
            // (N!/2) / (4^d d!^2) * scaled[n-d] / (4^{n-d} (n-d)!^2)
            let df = factorial(d);
            let nd = factorial(n - d);
            Rational::new(
                &n_fact * BigInt::from(scaled[n - d].clone()),
                (BigInt::one() << (2 * n + 1)) * (&df * &df) * (&nd * &nd),
            )
        })
        .collect()
}

/// Evaluate [`one_point_exact`] at a rational ratio `r`, exactly.
pub fn one_point_eval(n: usize, r: &Rational) -> Rational {
    let coeffs = one_point_exact(n);
    let r2 = r * r;
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * &r2 + c;
    }
    acc
}

/// The Laurent expansion in `m` of `u^{2D} I_0^4 / (2 I_0 - u I_1)`,
/// exactly, with valuation `D`.
pub fn fd_laurent(d_param: i64, order: usize) -> Laurent {
    assert!(order >= 1);
    let slack = d_param.unsigned_abs() as usize;
    let q = order + slack;
    // one extra order so the unit series t = w(m)/m is exact through m^q
    let w_ext = u_squared_series(q + 1);
    let w = w_ext.truncated(q);
    let t = TruncatedSeries::from_fn(q, |k| w_ext.coeff(k + 1).clone());
    let t_pow = if d_param >= 0 {
        t.pow(d_param as u64)
    } else {
        t.recip()
            .expect("w(m)/m has constant term 1")
            .pow((-d_param) as u64)
    };
    let g = residue_factor_series(q)
        .compose(&w)
        .expect("w(m) vanishes at 0");
    Laurent::new(d_param, t_pow.mul(&g))
}

/// Positive-part projection of [`fd_laurent`]: the power-series part of the
/// auxiliary generating function, truncated at `order`.
///
/// For `D >= 0` nothing is discarded; for `D < 0` exactly `-D` polar terms
/// are removed.
pub fn positive_part_fd(d_param: i64, order: usize) -> TruncatedSeries {
    fd_laurent(d_param, order).positive_part(order)
}

/// Exact `m`-series of the `n`-point generating function at rational
/// perimeter ratios, for `n >= 3`.
///
/// Coefficient of `m^{N+3}` reproduces the stratum volume with `N+3` uniform
/// faces and `n` marked ones divided by `(N+3)!`; physical `L`-powers
/// (`L^{2(n-3)}` from the mu-derivatives) are stripped.
pub fn zhat_series(n: usize, ratios: &[Rational], order: usize) -> TruncatedSeries {
    assert!(n >= 3, "n-point functions need n >= 3, got {n}");
    assert_eq!(ratios.len(), n, "need one perimeter ratio per marked face");
    let bracket = zhat_bracket_series(n, ratios, order);
    // multiply the positive part by m^n, then apply (d/dm)^{n-3}
    let mut series = TruncatedSeries::from_fn(order, |k| {
        if k >= n {
            bracket.coeff(k as i64 - n as i64)
        } else {
            Rational::zero()
        }
    });
    for _ in 3..n {
        series = derivative_padded(&series);
    }
    series
}

/// Laurent series in `m` of the bracket
/// `u^{-2n} I_0^4/(2I_0 - u I_1) prod_i I_0(u r_i)`.
fn zhat_bracket_series(n: usize, ratios: &[Rational], order: usize) -> Laurent {
    let q = order + n;
    let w_ext = u_squared_series(q + 1);
    let w = w_ext.truncated(q);
    let t = TruncatedSeries::from_fn(q, |k| w_ext.coeff(k + 1).clone());
    let mut unit = t
        .recip()
        .expect("w(m)/m has constant term 1")
        .pow(n as u64)
        .mul(&residue_factor_series(q).compose(&w).expect("w(0)=0"));
    for r in ratios {
        let r2 = r * r;
        let factor = TruncatedSeries::from_fn(q, |d| {
            let mut c = Rational::new(BigInt::one(), BigInt::one() << (2 * d));
            let f = factorial(d);
            c /= Rational::from(&f * &f);
            for _ in 0..d {
                c *= &r2;
            }
            c
        });
        unit = unit.mul(&factor.compose(&w).expect("w(0)=0"));
    }
    Laurent::new(-(n as i64), unit)
}

/// Derivative that keeps the truncation order by padding the top slot with
/// zero; only used where the series is then read strictly below the top.
fn derivative_padded(s: &TruncatedSeries) -> TruncatedSeries {
    let mut coeffs = s.derivative().coeffs().to_vec();
    coeffs.push(Rational::zero());
    TruncatedSeries::from_coeffs(coeffs)
}

/// Check the float arguments shared by the closed-form evaluators.
fn check_m_domain(m: f64) -> Result<f64> {
    let crits = critical_constants();
    if !(0.0..crits.m_c).contains(&m) {
        return Err(Error::Domain(format!(
            "closed-form evaluation needs 0 <= m < m_c = {}, got {m} (pole at m_c)",
            crits.m_c
        )));
    }
    Ok(crits.m_c)
}

/// Float value of the `n`-point generating function (`n >= 3`) at perimeter
/// ratios `ratios`, coupling `m`, uniform perimeter `length`.
///
/// The positive-part projection is honored exactly: the discarded polar part
/// of the bracket is a degree-`(n-1)` polynomial in `m` whose coefficients
/// are computed from the exact series with the ratios lifted to rationals.
/// The `n - 3` mu-derivatives are Taylor jets through `u(m)`.
pub fn zhat_value(n: usize, ratios: &[f64], m: f64, length: f64) -> Result<f64> {
    assert!(n >= 3, "n-point functions need n >= 3, got {n}");
    assert_eq!(ratios.len(), n);
    check_m_domain(m)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    let u0 = u_newton(m)?;
    for &r in ratios {
        if r <= 0.0 {
            return Err(Error::Domain("perimeter ratios must be positive".into()));
        }
        if r * u0 > MAX_DIRECT_BESSEL_ARG {
            return Err(Error::Accuracy(format!(
                "ratio {r} needs I_0 at argument {} > {MAX_DIRECT_BESSEL_ARG}; \
                 use the log-space asymptotic evaluator",
                r * u0
            )));
        }
    }

    // exact polar-polynomial coefficients b_0..b_{n-1}
    let exact_ratios: Vec<Rational> = ratios
        .iter()
        .map(|&r| Rational::from_float(r).expect("finite ratio"))
        .collect();
    let bracket = zhat_bracket_series(n, &exact_ratios, n - 1);
    let polar_poly: Vec<f64> = (0..n)
        .map(|j| rational_to_f64(&bracket.coeff(j as i64 - n as i64)))
        .collect();

    let derivatives = n - 3;
    let len = derivatives + 1;
    let jet = zhat_bracket_jet(n, ratios, u0, len);
    // B(m) = m^n * bracket; subtract the polynomial sum_j b_j m^j
    let m_jet = Jet::variable(m, len);
    let b = m_jet.powi(n as i32).mul(&jet);
    let mut correction = Jet::constant(0.0, len);
    for (j, &c) in polar_poly.iter().enumerate() {
        correction = correction.add(&m_jet.powi(j as i32).scale(c));
    }
    let net = b.sub(&correction);
    // d/dmu = L^2 d/dm, applied n-3 times
    let raw = length.powi(2 * derivatives as i32) * net.derivative(derivatives);
    if raw.is_finite() {
        Ok(raw)
    } else {
        Err(Error::Numeric("n-point evaluation overflowed".into()))
    }
}

/// Jet in `m` of the bracket `u^{-2n} I_0^4/(2I_0 - u I_1) prod I_0(u r_i)`.
fn zhat_bracket_jet(n: usize, ratios: &[f64], u0: f64, len: usize) -> Jet {
    let len = len.max(1);
    let u = u_jet(u0, len);
    let du = u.sub(&Jet::constant(u0, len)); // vanishing inner jet
    let i0 = bessel_jet(0, u0, len).compose(&du);
    let i1 = bessel_jet(1, u0, len).compose(&du);
    let denom = i0.scale(2.0).sub(&u.mul(&i1));
    let mut acc = u.powi(-(2 * n as i32)).mul(&i0.powi(4)).mul(&denom.recip());
    for &r in ratios {
        let scaled_inner = du.scale(r);
        let factor = bessel_jet(0, r * u0, len).compose(&scaled_inner);
        acc = acc.mul(&factor);
    }
    acc
}

/// Third mu-derivative of the one-point generating function:
/// `I_0(u)^3 I_0(u L_1/L) / (2 I_0(u) - u I_1(u))`.
///
/// This is the member of the derivative tower that actually diverges at the
/// critical point (like `(1 - mu/mu_c)^{-1/2}`).
pub fn one_point_d3mu(mu: f64, length: f64, l1: f64) -> Result<f64> {
    let m = mu * length * length;
    check_m_domain(m)?;
    let u = u_newton(m)?;
    let r = l1 / length;
    if r * u > MAX_DIRECT_BESSEL_ARG {
        return Err(Error::Accuracy(
            "ratio too large for direct evaluation".into(),
        ));
    }
    let i0 = crate::bessel::bessel_eval_unchecked(0, u);
    let i1 = crate::bessel::bessel_eval_unchecked(1, u);
    let i0r = crate::bessel::bessel_eval_unchecked(0, r * u);
    Ok(i0.powi(3) * i0r / (2.0 * i0 - u * i1))
}

/// One-point generating function `H(mu, L, L_1) = sum_N mu^{N+3}/(N+3)! f_N`,
/// resummed in closed form.
///
/// Repeated integration of the third derivative collapses to a single smooth
/// integral: substituting `t = v^2/(L^2 I_0(v))` into the Cauchy formula
/// `H = (1/2) int_0^mu (mu - t)^2 (d^3 H)(t) dt` cancels the singular
/// denominator exactly, leaving
/// `H = (1/(2 L^2)) int_0^{u(m)} (mu - t(v))^2 v I_0(v) I_0(v L_1/L) dv`.
pub fn one_point_resummed(mu: f64, length: f64, l1: f64) -> Result<f64> {
    one_point_cauchy(mu, length, l1, 2)
}

/// First mu-derivative of [`one_point_resummed`] (same kernel, one power of
/// `(mu - t)` fewer).
pub fn one_point_resummed_dmu(mu: f64, length: f64, l1: f64) -> Result<f64> {
    one_point_cauchy(mu, length, l1, 1)
}

fn one_point_cauchy(mu: f64, length: f64, l1: f64, k: u32) -> Result<f64> {
    let l2 = length * length;
    let m = mu * l2;
    check_m_domain(m)?;
    let u = u_newton(m)?;
    let r = l1 / length;
    if r * u > MAX_DIRECT_BESSEL_ARG {
        return Err(Error::Accuracy(
            "L_1/L too large for direct quadrature; use the asymptotic regimes".into(),
        ));
    }
    let integrand = move |v: f64| {
        let i0 = crate::bessel::bessel_eval_unchecked(0, v);
        let t = v * v / (l2 * i0);
        let i0r = crate::bessel::bessel_eval_unchecked(0, r * v);
        (mu - t).powi(k as i32) * v * i0 * i0r
    };
    let scale = (mu.powi(k as i32) * u * 10.0).abs().max(1e-300);
    let norm = if k == 2 { 2.0 } else { 1.0 };
    Ok(adaptive_simpson(&integrand, 0.0, u, 1e-14 * scale) / (norm * l2))
}

/// The Laplace-side correlation kernel
/// `mu^n L^{2n} u^{-2n} I_0^4/(2I_0 - u I_1) prod_i (z_i^2 - u^2/L^2)^{-1/2}`.
///
/// Square roots take the branch positive for large real `z_i`, cut on the
/// segment `[-i u/L, i u/L]`; real `z_i` must satisfy `z_i^2 > u^2/L^2`.
pub fn f_kernel(n: usize, z: &[f64], m: f64, length: f64) -> Result<f64> {
    assert!(n >= 3, "kernel defined for n >= 3");
    assert_eq!(z.len(), n);
    check_m_domain(m)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    let u = u_newton(m)?;
    let jet = f_kernel_jet(n, z, m, u, length, 1)?;
    Ok(jet.value())
}

/// `n`-th mu-derivative of [`f_kernel`], i.e. the third mu-derivative of the
/// Laplace-transformed `n`-point function. Exact chain-rule tower in `u`.
pub fn d3f_value(n: usize, z: &[f64], m: f64, length: f64) -> Result<f64> {
    assert!(n >= 3);
    assert_eq!(z.len(), n);
    check_m_domain(m)?;
    if m == 0.0 {
        return Err(Error::Domain(
            "the mu-derivative tower needs 0 < m: u ~ sqrt(m) is not smooth at the origin".into(),
        ));
    }
    let u = u_newton(m)?;
    let jet = f_kernel_jet(n, z, m, u, length, n + 1)?;
    // d/dmu = L^2 d/dm
    Ok(length.powi(2 * n as i32) * jet.derivative(n))
}

fn f_kernel_jet(n: usize, z: &[f64], m: f64, u0: f64, length: f64, len: usize) -> Result<Jet> {
    let u = u_jet(u0, len);
    let du = u.sub(&Jet::constant(u0, len));
    let i0 = bessel_jet(0, u0, len).compose(&du);
    let i1 = bessel_jet(1, u0, len).compose(&du);
    let denom = i0.scale(2.0).sub(&u.mul(&i1));
    let m_jet = Jet::variable(m, len);
    // mu^n L^{2n} = m^n
    let mut acc = m_jet
        .powi(n as i32)
        .mul(&u.powi(-(2 * n as i32)))
        .mul(&i0.powi(4))
        .mul(&denom.recip());
    let l2 = length * length;
    for &zi in z {
        let arg = zi * zi - u0 * u0 / l2;
        if arg <= 0.0 {
            return Err(Error::Domain(format!(
                "z = {zi} lies on or inside the branch cut (z^2 <= u^2/L^2)"
            )));
        }
        let arg_jet = Jet::constant(zi * zi, len).sub(&u.mul(&u).scale(1.0 / l2));
        acc = acc.mul(&arg_jet.sqrt().recip());
    }
    Ok(acc)
}
