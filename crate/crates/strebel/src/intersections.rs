//! Genus-zero intersection numbers of psi-classes.
//!
//! Two independent routes: the closed form `(n-3)! / prod d_i!` on the
//! dimension shell `sum d_i = n - 3`, and a recursive string-equation
//! evaluator used as an oracle against it.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::series::{factorial, Rational};

/// A product of tau-insertions, one exponent per marked point.
///
/// The bracket is symmetric, so exponents are canonicalized by sorting.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TauProduct {
    exponents: Vec<usize>,
}

impl TauProduct {
    pub fn new(exponents: impl Into<Vec<usize>>) -> Self {
        let mut exponents = exponents.into();
        assert!(
            exponents.len() >= 3,
            "genus-zero brackets need at least 3 marked points, got {}",
            exponents.len()
        );
        exponents.sort_unstable();
        Self { exponents }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    fn dimension_matches(&self) -> bool {
        self.exponents.iter().sum::<usize>() == self.len() - 3
    }
}

/// Closed form: `(n-3)! / prod d_i!` when `sum d_i = n - 3`, else zero.
pub fn intersection_number(t: &TauProduct) -> Rational {
    if !t.dimension_matches() {
        return Rational::zero();
    }
    let mut den = BigInt::one();
    for &d in t.exponents() {
        den *= factorial(d);
    }
    Rational::new(factorial(t.len() - 3), den)
}

/// String-equation evaluation, independent of the closed form.
///
/// Removes one `tau_0` insertion (the dimension shell guarantees at least
/// three) and sums over lowering each remaining positive exponent, down to
/// the base case `<tau_0^3> = 1`. Off-shell input evaluates to zero.
pub fn string_equation_oracle(t: &TauProduct) -> Rational {
    if !t.dimension_matches() {
        return Rational::zero();
    }
    let mut memo = HashMap::new();
    string_rec(t.exponents(), &mut memo)
}

fn string_rec(sorted: &[usize], memo: &mut HashMap<Vec<usize>, Rational>) -> Rational {
    if sorted.len() == 3 {
        // on-shell with n = 3 forces (0,0,0)
        return Rational::one();
    }
    if let Some(v) = memo.get(sorted) {
        return v.clone();
    }
    // sorted[0] is a zero exponent: on shell, sum d = n-3 < n.
    debug_assert_eq!(sorted[0], 0);
    let rest = &sorted[1..];
    let mut acc = Rational::zero();
    for (i, &d) in rest.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let mut child: Vec<usize> = rest.to_vec();
        child[i] = d - 1;
        child.sort_unstable();
        acc += string_rec(&child, memo);
    }
    memo.insert(sorted.to_vec(), acc.clone());
    acc
}

/// All on-shell exponent tuples (as sorted multisets) with `n` marked points.
pub fn on_shell_tuples(n: usize) -> Vec<TauProduct> {
    assert!(n >= 3);
    let mut out = Vec::new();
    let mut current = Vec::new();
    gen_partitions(n - 3, n, n - 3, &mut current, &mut out);
    out
}

fn gen_partitions(
    remaining: usize,
    slots: usize,
    max_part: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<TauProduct>,
) {
    if current.len() == slots {
        if remaining == 0 {
            let mut exps = current.clone();
            exps.reverse();
            out.push(TauProduct::new(exps));
        }
        return;
    }
    let cap = max_part.min(remaining);
    for part in (0..=cap).rev() {
        current.push(part);
        gen_partitions(remaining - part, slots, part, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn three_point_base_case() {
        let t = TauProduct::new(vec![0, 0, 0]);
        assert_eq!(intersection_number(&t), rat(1));
        assert_eq!(string_equation_oracle(&t), rat(1));
    }

    #[test]
    fn four_point() {
        let t = TauProduct::new(vec![1, 0, 0, 0]);
        assert_eq!(intersection_number(&t), rat(1));
        assert_eq!(string_equation_oracle(&t), rat(1));
    }

    #[test]
    fn five_point_two_ones() {
        let t = TauProduct::new(vec![1, 1, 0, 0, 0]);
        assert_eq!(string_equation_oracle(&t), rat(2));
        assert_eq!(intersection_number(&t), rat(2));
    }

    #[test]
    fn five_point_single_two() {
        // two string reductions: <tau_2 tau_0^4> = 1
        let t = TauProduct::new(vec![2, 0, 0, 0, 0]);
        assert_eq!(string_equation_oracle(&t), rat(1));
    }

    #[test]
    fn six_point_tau3() {
        // closed form 3!/3! = 1
        let t = TauProduct::new(vec![3, 0, 0, 0, 0, 0]);
        assert_eq!(intersection_number(&t), rat(1));
        assert_eq!(string_equation_oracle(&t), rat(1));
    }

    #[test]
    fn off_shell_is_zero() {
        let t = TauProduct::new(vec![2, 2, 0, 0]);
        assert_eq!(intersection_number(&t), rat(0));
        assert_eq!(string_equation_oracle(&t), rat(0));
    }

    #[test]
    fn symmetry_under_permutation() {
        let a = TauProduct::new(vec![2, 0, 1, 0, 0, 0]);
        let b = TauProduct::new(vec![0, 0, 2, 0, 1, 0]);
        assert_eq!(a, b);
        assert_eq!(intersection_number(&a), intersection_number(&b));
    }

    #[test]
    fn closed_form_equals_oracle_exhaustively() {
        for n in 3..=9 {
            for t in on_shell_tuples(n) {
                assert_eq!(
                    intersection_number(&t),
                    string_equation_oracle(&t),
                    "mismatch at exponents {:?}",
                    t.exponents()
                );
            }
        }
    }

    #[test]
    #[should_panic(expected = "at least 3 marked points")]
    fn too_few_points_panics() {
        let _ = TauProduct::new(vec![0, 0]);
    }
}
