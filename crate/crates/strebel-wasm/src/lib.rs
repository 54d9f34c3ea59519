//! Thin wasm-bindgen exports for the browser demo. All drawing happens in
//! JavaScript; these functions only compute plain `f64` buffers, so the same
//! code paths compile and test natively.

use wasm_bindgen::prelude::*;

use strebel::amplitudes::volume_uniform_table;
use strebel::asymptotics::volume_asymptotic_log;
use strebel::series::ln_rational_abs;
use strebel::spectral::{blowup, build_curve};
use strebel::ucurve::{critical_constants, m_of_u};

fn clamp_fraction(m_frac: f64) -> f64 {
    m_frac.clamp(0.0, 1.0 - 1e-9)
}

/// Critical constants as the same JSON object the CLI prints.
#[wasm_bindgen]
pub fn critical_constants_json() -> String {
    critical_constants().to_json()
}

/// Spectral-curve samples at coupling `m = m_frac * m_c`: a flat buffer of
/// `(z, x, y)` triples over `z in [-z_max, z_max]`.
#[wasm_bindgen]
pub fn curve_samples(m_frac: f64, z_max: f64, steps: u32) -> Vec<f64> {
    let crits = critical_constants();
    let m = clamp_fraction(m_frac) * crits.m_c;
    let curve = build_curve(m, 1.0, 24).expect("coupling clamped below m_c");
    let steps = steps.max(2);
    let mut out = Vec::with_capacity(3 * (steps as usize + 1));
    for i in 0..=steps {
        let z = -z_max + 2.0 * z_max * i as f64 / steps as f64;
        out.push(z);
        out.push(curve.x_eval(z));
        out.push(curve.y_eval(z));
    }
    out
}

/// Curve metadata at coupling `m = m_frac * m_c`.
#[wasm_bindgen]
pub fn curve_info_json(m_frac: f64) -> String {
    let crits = critical_constants();
    let m = clamp_fraction(m_frac) * crits.m_c;
    let curve = build_curve(m, 1.0, 24).expect("coupling clamped below m_c");
    format!(
        "{{\"m\":{},\"u\":{},\"branch_point\":{},\"y_slope_origin\":{},\"tail_bound\":{}}}",
        curve.m,
        curve.u,
        curve.times[0],
        curve.y_slope_origin(),
        curve.tail_bound
    )
}

/// Blow-up comparison at distance `eps = 1 - m/m_c`: flat buffer of
/// `(xi, x_tilde, y_tilde, xi^2 - 2, xi^3 - 3 xi)` rows.
#[wasm_bindgen]
pub fn blowup_samples(eps: f64, xi_max: f64, steps: u32) -> Vec<f64> {
    let crits = critical_constants();
    let eps = eps.clamp(1e-12, 0.5);
    let b = blowup(crits.m_c * (1.0 - eps), 1.0).expect("clamped below m_c");
    let steps = steps.max(2);
    let mut out = Vec::with_capacity(5 * (steps as usize + 1));
    for i in 0..=steps {
        let xi = -xi_max + 2.0 * xi_max * i as f64 / steps as f64;
        let x_tilde = b.x_tilde[0] + b.x_tilde[2] * xi * xi;
        let y_tilde = b.y_tilde[0] * xi
            + b.y_tilde[1] * xi.powi(3)
            + b.y_tilde[2] * xi.powi(5)
            + b.y_tilde[3] * xi.powi(7);
        out.push(xi);
        out.push(x_tilde);
        out.push(y_tilde);
        out.push(xi * xi - 2.0);
        out.push(xi.powi(3) - 3.0 * xi);
    }
    out
}

/// Blow-up metadata (prefactor ratios and the resolution scale).
#[wasm_bindgen]
pub fn blowup_info_json(eps: f64) -> String {
    let crits = critical_constants();
    let eps = eps.clamp(1e-12, 0.5);
    let b = blowup(crits.m_c * (1.0 - eps), 1.0).expect("clamped below m_c");
    format!(
        "{{\"eps\":{eps},\"u_gap\":{},\"px_ratio\":{},\"py_ratio\":{},\"x0\":{},\"y1\":{}}}",
        b.u_gap,
        b.px_measured / b.px,
        b.py_measured / b.py,
        b.x_tilde[0],
        b.y_tilde[0]
    )
}

/// The fold curve `m(u) = u^2/I_0(u)`: flat `(u, m)` pairs up to `u_max`.
#[wasm_bindgen]
pub fn fold_samples(u_max: f64, steps: u32) -> Vec<f64> {
    let steps = steps.max(2);
    let mut out = Vec::with_capacity(2 * (steps as usize + 1));
    for i in 0..=steps {
        let u = u_max * i as f64 / steps as f64;
        out.push(u);
        out.push(m_of_u(u));
    }
    out
}

/// The solved branch point at `m = m_frac * m_c` as `[u, m]`.
#[wasm_bindgen]
pub fn fold_point(m_frac: f64) -> Vec<f64> {
    let crits = critical_constants();
    let m = clamp_fraction(m_frac) * crits.m_c;
    let u = strebel::ucurve::u_newton(m).expect("clamped below m_c");
    vec![u, m]
}

/// Exact-vs-asymptotic volume ratios: flat `(N, ratio)` pairs for
/// `N = 1 ..= n_max`.
#[wasm_bindgen]
pub fn volume_ratio_series(n_max: u32) -> Vec<f64> {
    let table = volume_uniform_table(n_max as usize);
    let mut out = Vec::with_capacity(2 * n_max as usize);
    for (n, v) in table.iter().enumerate().skip(1) {
        let ratio = (ln_rational_abs(v) - volume_asymptotic_log(n as u64)).exp();
        out.push(n as f64);
        out.push(ratio);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_well_formed() {
        let s = curve_samples(0.9, 2.0, 10);
        assert_eq!(s.len(), 33);
        assert!(s.iter().all(|v| v.is_finite()));
        let b = blowup_samples(1e-4, 2.2, 10);
        assert_eq!(b.len(), 55);
        let f = fold_samples(4.2, 10);
        assert_eq!(f.len(), 22);
        let v = volume_ratio_series(12);
        assert_eq!(v.len(), 24);
    }

    #[test]
    fn json_exports_parse_enough() {
        let j = critical_constants_json();
        assert!(j.contains("\"u_c\":") && j.contains("\"C\":"));
        assert!(curve_info_json(0.5).contains("\"u\":"));
        assert!(blowup_info_json(1e-5).contains("py_ratio"));
    }

    #[test]
    fn clamping_keeps_domain() {
        // even m_frac = 1.0 must stay valid through clamping
        let p = fold_point(1.0);
        assert!(p[0] <= critical_constants().u_c);
        let s = curve_samples(1.0, 1.0, 4);
        assert!(s.iter().all(|v| v.is_finite()));
    }
}
