//! The inversion `u(m)` of `m = u^2 / I_0(u)` on its principal branch,
//! the critical constants where that map folds, and its derivative.
//!
//! `m = mu L^2` is the single dimensionless coupling of the model; every
//! generating function is re-expressed through `u(m)`. The map increases
//! from 0 to `m_c` as `u` runs over `[0, u_c]` and has a quadratic maximum
//! at `u_c`, which is where criticality comes from.

use std::sync::{Mutex, OnceLock};

use crate::bessel::{bessel_eval_unchecked, bessel_even_series};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

/// Constants of the critical point and of the volume asymptotics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalConstants {
    /// Positive root of `u I_1(u) = 2 I_0(u)`.
    pub u_c: f64,
    /// Critical coupling `m_c = u_c^2 / I_0(u_c)`.
    pub m_c: f64,
    /// Volume-asymptotics constant `I_0(u_c)^3 / (sqrt(2) sqrt(u_c^2 - 4))`.
    pub c_volume: f64,
    /// Curvature constant `(u_c^2 - 4) / (2 u_c^2)` of `mu/mu_c` near `u_c`.
    pub a: f64,
    /// Slope constant `sqrt(2 u_c^2 / (u_c^2 - 4))` of `u_c - u` in
    /// `sqrt(1 - mu/mu_c)`.
    pub b: f64,
}

impl CriticalConstants {
    /// JSON object with stable key order `u_c, m_c, C, a, b`.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"u_c\":{},\"m_c\":{},\"C\":{},\"a\":{},\"b\":{}}}",
            self.u_c, self.m_c, self.c_volume, self.a, self.b
        )
    }
}

/// Residual tolerance of the `u_c` root solve.
const ROOT_TOL: f64 = 1e-13;

/// Residual tolerance guaranteed by [`u_newton`].
const INVERT_TOL: f64 = 1e-12;

/// `u_c I_1(u_c) - 2 I_0(u_c)`, the criticality residual.
fn criticality_residual(u: f64) -> f64 {
    u * bessel_eval_unchecked(1, u) - 2.0 * bessel_eval_unchecked(0, u)
}

/// Solve the critical point and derived constants.
///
/// `u_c` is bracketed in `[1, 5]` (the residual changes sign there), refined
/// by bisection and polished by Newton with `d/du (u I_1 - 2 I_0) = u I_0 - 2 I_1`.
pub fn critical_constants() -> CriticalConstants {
    static CACHE: OnceLock<CriticalConstants> = OnceLock::new();
    *CACHE.get_or_init(|| {
        let (mut lo, mut hi) = (1.0f64, 5.0f64);
        debug_assert!(criticality_residual(lo) < 0.0 && criticality_residual(hi) > 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if criticality_residual(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut u = 0.5 * (lo + hi);
        for _ in 0..8 {
            let f = criticality_residual(u);
            if f.abs() <= ROOT_TOL * bessel_eval_unchecked(0, u) {
                break;
            }
            let fp = u * bessel_eval_unchecked(0, u) - 2.0 * bessel_eval_unchecked(1, u);
            u -= f / fp;
        }
        let i0 = bessel_eval_unchecked(0, u);
        let u2m4 = u * u - 4.0;
        CriticalConstants {
            u_c: u,
            m_c: u * u / i0,
            c_volume: i0.powi(3) / (std::f64::consts::SQRT_2 * u2m4.sqrt()),
            a: u2m4 / (2.0 * u * u),
            b: (2.0 * u * u / u2m4).sqrt(),
        }
    })
}

/// `m(u) = u^2 / I_0(u)` for `u >= 0`.
pub fn m_of_u(u: f64) -> f64 {
    u * u / bessel_eval_unchecked(0, u)
}

/// Derivative of `m(u)`: `(2u I_0 - u^2 I_1) / I_0^2`. Vanishes at 0 and `u_c`.
pub fn dm_du(u: f64) -> f64 {
    let i0 = bessel_eval_unchecked(0, u);
    let i1 = bessel_eval_unchecked(1, u);
    (2.0 * u * i0 - u * u * i1) / (i0 * i0)
}

/// Invert `m = u^2 / I_0(u)` on the principal branch `u ∈ [0, u_c]`.
///
/// Bisection against the monotone branch, then Newton polish away from the
/// critical top where the derivative vanishes. Residual `|m(u) - m| <= 1e-12`.
pub fn u_newton(m: f64) -> Result<f64> {
    let crits = critical_constants();
    if !(0.0..=crits.m_c).contains(&m) {
        return Err(Error::Domain(format!(
            "u(m) needs 0 <= m <= m_c = {}, got {m}; no real solution on the principal branch",
            crits.m_c
        )));
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    if m == crits.m_c {
        return Ok(crits.u_c);
    }
    let (mut lo, mut hi) = (0.0f64, crits.u_c);
    for _ in 0..70 {
        let mid = 0.5 * (lo + hi);
        if m_of_u(mid) < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u = 0.5 * (lo + hi);
    // Newton only helps where the map is not flat; near u_c bisection has
    // already pinned u far below the residual tolerance.
    for _ in 0..4 {
        let slope = dm_du(u);
        if slope.abs() < 1e-6 {
            break;
        }
        let next = u - (m_of_u(u) - m) / slope;
        if next.is_finite() && (0.0..=crits.u_c).contains(&next) {
            u = next;
        } else {
            break;
        }
        if (m_of_u(u) - m).abs() <= 0.1 * INVERT_TOL {
            break;
        }
    }
    debug_assert!((m_of_u(u) - m).abs() <= INVERT_TOL * m.max(1.0));
    Ok(u)
}

/// Exact series of `w = u^2` in `m`, the compositional inverse of
/// `m(w) = w / I_0(sqrt(w))` (an even function of `u`, hence a true power
/// series in `w`).
///
/// Lagrange inversion turns each coefficient into one integer:
/// `[m^k] w(m) = (1/k) [w^{k-1}] I_0(sqrt w)^k`, and
/// `4^{k-1} ((k-1)!)^2 [w^{k-1}] I_0^k` is a sum of squared multinomials
/// computed by the scaled twisted recurrence — no rational gcds at all.
/// Newton reversion of `m(w)` gives the same series and is kept as a
/// cross-check in the tests.
///
/// The coefficients do not depend on the truncation order, so the highest
/// order computed so far is cached and lower orders are served by explicit
/// truncation.
pub fn u_squared_series(order: usize) -> TruncatedSeries {
    assert!(order >= 1, "u^2 series needs order >= 1");
    static CACHE: Mutex<Option<TruncatedSeries>> = Mutex::new(None);
    let mut guard = CACHE.lock().expect("w(m) cache poisoned");
    if let Some(cached) = guard.as_ref() {
        if cached.order() >= order {
            return cached.truncated(order);
        }
    }
    let fresh = compute_u_squared_series(order);
    *guard = Some(fresh.clone());
    fresh
}

fn compute_u_squared_series(order: usize) -> TruncatedSeries {
    use num_bigint::BigInt;
    let diagonal = crate::bessel::i0_power_diagonal(order);
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(crate::series::Rational::from(BigInt::from(0)));
    let mut fact = BigInt::from(1); // (k-1)!
    for (idx, scaled) in diagonal.into_iter().enumerate() {
        let k = idx + 1;
        if k > 1 {
            fact *= BigInt::from(k - 1);
        }
        // c_k = scaled / (k 4^{k-1} ((k-1)!)^2)
        let den = BigInt::from(k) * (BigInt::from(1) << (2 * (k - 1))) * (&fact * &fact);
        coeffs.push(crate::series::Rational::new(BigInt::from(scaled), den));
    }
    TruncatedSeries::from_coeffs(coeffs)
}

/// The series `m(w) = w / I_0(sqrt w)` itself, used by the reversion
/// cross-checks.
pub fn m_of_w_series(order: usize) -> TruncatedSeries {
    let i0_recip = bessel_even_series(0, order)
        .recip()
        .expect("I_0 has unit constant term");
    TruncatedSeries::from_fn(order, |k| {
        if k == 0 {
            num_traits::Zero::zero()
        } else {
            i0_recip.coeff(k - 1).clone()
        }
    })
}
