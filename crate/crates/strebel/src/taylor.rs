//! Short floating-point Taylor expansions around a working point.
//!
//! The correlation kernels need a handful of exact mu-derivatives of
//! functions of `u(m)`. Finite differences cancel catastrophically near the
//! critical point, so derivatives are propagated analytically instead: expand
//! `m(u)` around `u0`, revert to get `u(m)` around `m0`, and push Taylor jets
//! through every factor. Jets are tiny (length <= 8 or so); all operations
//! are naive and quadratic.

use crate::bessel::bessel_eval_unchecked;
use crate::ucurve::m_of_u;

/// Taylor coefficients `c[j]` of `f(x0 + t) = sum c[j] t^j` (not derivatives;
/// the `j!` is folded in).
#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(value: f64, len: usize) -> Self {
        let mut c = vec![0.0; len];
        c[0] = value;
        Jet(c)
    }

    /// The local coordinate `t` itself.
    pub fn variable(value: f64, len: usize) -> Self {
        let mut c = vec![0.0; len];
        c[0] = value;
        if len > 1 {
            c[1] = 1.0;
        }
        Jet(c)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `j`-th derivative at the expansion point.
    pub fn derivative(&self, j: usize) -> f64 {
        let mut fac = 1.0;
        for i in 2..=j {
            fac *= i as f64;
        }
        self.0[j] * fac
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.len().min(o.len());
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                out[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(out)
    }

    pub fn recip(&self) -> Jet {
        let n = self.len();
        let a0 = self.0[0];
        assert!(a0 != 0.0, "jet reciprocal at a zero value");
        let mut b = vec![0.0; n];
        b[0] = 1.0 / a0;
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.0[j] * b[k - j];
            }
            b[k] = -acc / a0;
        }
        Jet(b)
    }

    pub fn div(&self, o: &Jet) -> Jet {
        self.mul(&o.recip())
    }

    /// Integer power by repeated multiplication (exponents stay tiny).
    pub fn powi(&self, k: i32) -> Jet {
        if k < 0 {
            return self.recip().powi(-k);
        }
        let mut out = Jet::constant(1.0, self.len());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Composition `self(inner)` where `inner` has zero constant term.
    pub fn compose(&self, inner: &Jet) -> Jet {
        assert!(
            inner.0[0] == 0.0,
            "jet composition requires a vanishing inner constant term"
        );
        let n = self.len().min(inner.len());
        let mut out = Jet::constant(self.0[n - 1], n);
        for k in (0..n - 1).rev() {
            out = out.mul(inner);
            out.0[0] += self.0[k];
        }
        out
    }

    /// Compositional inverse of a jet with zero constant term and nonzero
    /// linear term; returns the jet of the inverse map's deviation.
    pub fn revert(&self) -> Jet {
        assert!(self.0[0] == 0.0 && self.0[1] != 0.0, "jet not invertible");
        let n = self.len();
        let mut g = vec![0.0; n];
        g[1] = 1.0 / self.0[1];
        // Order-by-order: the coefficient of t^k in self(g) must vanish.
        for k in 2..n {
            let partial = Jet(g.clone());
            let val = self.compose(&partial);
            g[k] = -val.0[k] / self.0[1];
        }
        Jet(g)
    }

    pub fn sqrt(&self) -> Jet {
        let n = self.len();
        let a0 = self.0[0];
        assert!(a0 > 0.0, "jet sqrt needs a positive value");
        let mut b = vec![0.0; n];
        b[0] = a0.sqrt();
        // (sum b)^2 = self, solved order by order.
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..k {
                acc += b[j] * b[k - j];
            }
            b[k] = (self.0[k] - acc) / (2.0 * b[0]);
        }
        Jet(b)
    }
}

/// Taylor jet of `I_k` around `u0 > 0`.
///
/// Derivatives come from `I_m' = (I_{m-1} + I_{m+1}) / 2` with the reflection
/// `I_{-m} = I_m`, accumulated as linear combinations over Bessel orders and
/// then evaluated; exact in exact arithmetic, stable in floats because all
/// coefficients are positive.
pub fn bessel_jet(k: u32, u0: f64, len: usize) -> Jet {
    // combo[j][m] = weight of I_m in the j-th derivative of I_k
    let max_order = k as usize + len + 1;
    let values: Vec<f64> = (0..=max_order as u32)
        .map(|m| bessel_eval_unchecked(m, u0))
        .collect();
    let mut combo = vec![0.0; max_order + 1];
    combo[k as usize] = 1.0;
    let mut out = Vec::with_capacity(len);
    let mut factorial = 1.0;
    for j in 0..len {
        if j > 0 {
            factorial *= j as f64;
        }
        let value: f64 = combo.iter().zip(&values).map(|(c, v)| c * v).sum();
        out.push(value / factorial);
        // differentiate the combination once
        let mut next = vec![0.0; max_order + 1];
        for (m, &c) in combo.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if m == 0 {
                next[1] += c; // I_0' = I_1
            } else {
                next[m - 1] += 0.5 * c;
                if m < max_order {
                    next[m + 1] += 0.5 * c;
                }
            }
        }
        combo = next;
    }
    Jet(out)
}

/// Taylor jet of the inverse branch `u(m)` around `m0 = m(u0)`, as the jet of
/// `u` in the local variable `t = m - m0`.
pub fn u_jet(u0: f64, len: usize) -> Jet {
    if len == 1 {
        return Jet(vec![u0]);
    }
    // m(u0 + s) - m0 as a jet in s
    let u = Jet::variable(u0, len);
    let u_sq = u.mul(&u);
    let i0 = bessel_jet(0, u0, len);
    let mut m_shift = u_sq.div(&i0);
    let m0 = m_shift.0[0];
    m_shift.0[0] = 0.0;
    debug_assert!((m0 - m_of_u(u0)).abs() <= 1e-12 * m0.max(1.0));
    // s(t) with m(u0 + s(t)) = m0 + t
    let s_of_t = m_shift.revert();
    let mut u_of_t = s_of_t;
    u_of_t.0[0] = u0;
    u_of_t
}
