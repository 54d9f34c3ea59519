//! The one-parameter family of spectral curves, its Laplace transform, and
//! the critical blow-up onto the `(xi^2 - 2, xi^3 - 3 xi)` cusp curve.
//!
//! The curve is `x(z) = z^2 + u^2/L^2`, `y(z) = z - (1/2) sum_k t[k] z^{2k-1}`
//! with times `t[k] = mu L^{2k} I_k(u) / ((2k-1)!! u^k)`. Times decay
//! factorially in `k`, so a modest truncation carries full double precision.

use crate::bessel::{bessel_eval_unchecked, double_factorial};
use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::series::rational_to_f64;
use crate::ucurve::{critical_constants, u_newton};

/// Truncated spectral curve at fixed coupling.
#[derive(Clone, Debug)]
pub struct CurveModel {
    /// Coupling `m = mu L^2`.
    pub m: f64,
    /// Principal-branch solution of `m = u^2/I_0(u)`.
    pub u: f64,
    /// Uniform perimeter `L`.
    pub length: f64,
    /// Times `t[k]`, index `k = 0..=truncation`; `t[0] = u^2/L^2` is the
    /// branch-point location, `t[k>=1]` multiply `z^{2k-1}` in `y`.
    pub times: Vec<f64>,
    /// Truncation index `K`; `y` is a polynomial of degree `2K - 1`.
    pub truncation: usize,
    /// Magnitude of the first dropped time, reported as the truncation tail.
    pub tail_bound: f64,
}

/// `I_k(u)/u^k` summed directly, finite at `u = 0` (value `1/(2^k k!)`).
fn ik_over_uk(k: u32, u: f64) -> f64 {
    let q = 0.25 * u * u;
    let mut term = 1.0;
    for j in 1..=k {
        term /= 2.0 * j as f64;
    }
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

/// Build the curve at coupling `m < m_c` with `K+1` stored times.
pub fn build_curve(m: f64, length: f64, truncation: usize) -> Result<CurveModel> {
    assert!(truncation >= 1, "need at least the t_3 time");
    let crits = critical_constants();
    if !(0.0..crits.m_c).contains(&m) {
        return Err(Error::Domain(format!(
            "spectral curve needs 0 <= m < m_c = {}, got {m}",
            crits.m_c
        )));
    }
    let u = u_newton(m)?;
    let mu = m / (length * length);
    let mut times = Vec::with_capacity(truncation + 1);
    times.push(u * u / (length * length));
    for k in 1..=truncation as u32 {
        let df = rational_to_f64(&num_rational::BigRational::from(double_factorial(
            2 * k as i64 - 1,
        )));
        let t = mu * length.powi(2 * k as i32) * ik_over_uk(k, u) / df;
        times.push(t);
    }
    let k_next = truncation as u32 + 1;
    let df_next = rational_to_f64(&num_rational::BigRational::from(double_factorial(
        2 * k_next as i64 - 1,
    )));
    let tail_bound = mu * length.powi(2 * k_next as i32) * ik_over_uk(k_next, u) / df_next;
    Ok(CurveModel {
        m,
        u,
        length,
        times,
        truncation,
        tail_bound,
    })
}

impl CurveModel {
    /// `x(z) = z^2 + u^2/L^2`.
    pub fn x_eval(&self, z: f64) -> f64 {
        z * z + self.times[0]
    }

    /// `y(z) = z - (1/2) sum_{k>=1} t[k] z^{2k-1}`.
    pub fn y_eval(&self, z: f64) -> f64 {
        let mut acc = 0.0;
        // Horner in z^2 over the odd polynomial
        for k in (1..=self.truncation).rev() {
            acc = (acc + self.times[k]) * if k > 1 { z * z } else { 1.0 };
        }
        z - 0.5 * z * acc
    }

    /// Coefficient of `z^{2k-1}` in `y` (k = 0 meaning the bare `z` term
    /// is handled by `k = 1`): returns `delta_{k,1} - t[k]/2`.
    pub fn y_coeff(&self, k: usize) -> f64 {
        assert!((1..=self.truncation).contains(&k));
        let base = if k == 1 { 1.0 } else { 0.0 };
        base - 0.5 * self.times[k]
    }

    /// `y'(0) = 1 - u I_1(u) / (2 I_0(u))`; vanishes exactly at the critical
    /// coupling, positive below it.
    pub fn y_slope_origin(&self) -> f64 {
        self.y_coeff(1)
    }

    /// Sample `(z, x, y)` rows for plotting, `z` from 0 to `z_max`.
    pub fn sample(&self, z_max: f64, steps: usize) -> Vec<(f64, f64, f64)> {
        (0..=steps)
            .map(|i| {
                let z = z_max * i as f64 / steps as f64;
                (z, self.x_eval(z), self.y_eval(z))
            })
            .collect()
    }
}

/// Residual of the `u`-derivative identity of the 1-form `y dx`.
///
/// At fixed `x`, the derivative collapses to `(-2u/L^2 + mu I_1(u)) dz`
/// because every `z^{2k}` coefficient carries the Bessel-recurrence combination
/// `I_{k+1} - I_{k-1} + 2k I_k/u`. Returns the worst recurrence residual over
/// `k <= K` combined with the constant-term residual of the stored times.
pub fn ydx_du_check(curve: &CurveModel) -> f64 {
    let u = curve.u;
    if u == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for k in 1..=curve.truncation.min(40) as u32 {
        let residual = bessel_eval_unchecked(k + 1, u) - bessel_eval_unchecked(k - 1, u)
            + 2.0 * k as f64 / u * bessel_eval_unchecked(k, u);
        worst = worst.max(residual.abs());
    }
    // constant term: (u/L^2) t[1] must equal mu I_1(u)
    let mu = curve.m / (curve.length * curve.length);
    let const_residual =
        u / (curve.length * curve.length) * curve.times[1] - mu * bessel_eval_unchecked(1, u);
    worst.max(const_residual.abs())
}

/// Closed-form Laplace transform of `y dx` over the positive branch:
/// `(sqrt(pi)/2) e^{-v u^2/L^2} v^{-3/2} (1/I_0(u)) *
///  (I_0(u) - (u^2 v / L^2) sum_{k>=1} I_k(u) L^{2k} / (2^k u^k v^k))`.
///
/// The `k`-sum decays factorially; it is summed to the curve truncation with
/// a tail check.
pub fn ydx_laplace(curve: &CurveModel, v: f64) -> Result<f64> {
    if v <= 0.0 {
        return Err(Error::Domain(format!(
            "Laplace variable must be positive, got {v}"
        )));
    }
    let u = curve.u;
    let l2 = curve.length * curve.length;
    let i0 = bessel_eval_unchecked(0, u);
    let mut sum = 0.0;
    let mut last_term: f64 = 0.0;
    for k in 1..=curve.truncation.max(40) as u32 {
        // I_k(u) L^{2k} / (2^k u^k v^k) = (I_k/u^k) (L^2/(2v))^k
        let term = ik_over_uk(k, u) * (l2 / (2.0 * v)).powi(k as i32);
        sum += term;
        last_term = term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) && k >= 8 {
            last_term = 0.0;
            break;
        }
    }
    if last_term.abs() > 1e-12 * sum.abs().max(1e-300) {
        return Err(Error::Accuracy(format!(
            "k-sum not converged at truncation {} for v = {v}",
            curve.truncation
        )));
    }
    let bracket = i0 - u * u * v / l2 * sum;
    Ok(0.5 * std::f64::consts::PI.sqrt() / i0 * (-v * u * u / l2).exp() * v.powf(-1.5) * bracket)
}

/// Quadrature oracle for [`ydx_laplace`]: integrates
/// `y(z) e^{-v x(z)} dx` over the real parametrization `z in [0, inf)`.
pub fn ydx_laplace_quadrature(curve: &CurveModel, v: f64) -> f64 {
    let z_max = (50.0 / v).sqrt();
    let f = |z: f64| curve.y_eval(z) * (-v * curve.x_eval(z)).exp() * 2.0 * z;
    adaptive_simpson(&f, 0.0, z_max, 1e-14)
}

/// The blow-up of the curve near criticality under
/// `z = -sqrt(u_c - u) (sqrt(u)/L) xi`.
#[derive(Clone, Debug)]
pub struct BlowupCurve {
    /// `u_c - u`, the resolution scale.
    pub u_gap: f64,
    /// Theory prefactor of `x`: `(u_c - u) u_c / L^2`.
    pub px: f64,
    /// Theory prefactor of `y`: `(u_c - u)^{3/2} (u_c^2 - 4) / (6 L sqrt(u_c))`.
    pub py: f64,
    /// Measured `xi^2` coefficient of `x - u_c^2/L^2` before normalization.
    pub px_measured: f64,
    /// Measured `xi^3` coefficient of `y` before normalization.
    pub py_measured: f64,
    /// Coefficients of `1, xi, xi^2` in `(x - u_c^2/L^2)/px`; tends to `(-2, 0, 1)`.
    pub x_tilde: [f64; 3],
    /// Coefficients of `xi, xi^3, xi^5, xi^7` in `y/py`; tends to `(-3, 1, 0, 0)`.
    pub y_tilde: [f64; 4],
    /// Scale of the dropped `O((u_c - u)^2)` remainder.
    pub remainder_estimate: f64,
}

/// Blow up the curve at coupling `m` close to (but below) `m_c`.
pub fn blowup(m: f64, length: f64) -> Result<BlowupCurve> {
    let crits = critical_constants();
    let curve = build_curve(m, length, 8)?;
    let u = curve.u;
    let gap = crits.u_c - u;
    // z = s xi with s = -sqrt(gap) sqrt(u)/L
    let s = -(gap.sqrt()) * u.sqrt() / length;
    let px = gap * crits.u_c / (length * length);
    let py = gap.powf(1.5) * (crits.u_c * crits.u_c - 4.0) / (6.0 * length * crits.u_c.sqrt());

    let x0 = curve.times[0] - crits.u_c * crits.u_c / (length * length);
    let x_tilde = [x0 / px, 0.0, s * s / px];
    let mut y_tilde = [0.0; 4];
    for (slot, k) in (1..=4usize).enumerate() {
        let coeff = if k <= curve.truncation {
            curve.y_coeff(k) * s.powi(2 * k as i32 - 1)
        } else {
            0.0
        };
        y_tilde[slot] = coeff / py;
    }
    Ok(BlowupCurve {
        u_gap: gap,
        px,
        py,
        px_measured: s * s,
        py_measured: if curve.truncation >= 2 {
            curve.y_coeff(2) * s.powi(3)
        } else {
            0.0
        },
        x_tilde,
        y_tilde,
        remainder_estimate: gap * gap,
    })
}

/// Three-point amplitude of the cusp curve: `1/(6 xi_1 xi_2 xi_3)`.
pub fn f03_32(xi: [f64; 3]) -> Result<f64> {
    if xi.contains(&0.0) {
        return Err(Error::Domain(
            "cusp-curve amplitude at zero argument".into(),
        ));
    }
    Ok(1.0 / (6.0 * xi[0] * xi[1] * xi[2]))
}

/// Four-point amplitude of the cusp curve:
/// `-(1/(36 xi_1 xi_2 xi_3 xi_4)) (1 + sum_i 1/xi_i^2)`.
pub fn f04_32(xi: [f64; 4]) -> Result<f64> {
    if xi.contains(&0.0) {
        return Err(Error::Domain(
            "cusp-curve amplitude at zero argument".into(),
        ));
    }
    let product: f64 = xi.iter().product();
    let correction: f64 = 1.0 + xi.iter().map(|&x| 1.0 / (x * x)).sum::<f64>();
    Ok(-correction / (36.0 * product))
}
