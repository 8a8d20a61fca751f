//! The classical objects the generalized trees extend: Stern's diatomic
//! sequence, the Newman iteration that walks the Calkin-Wilf sequence, and
//! the Dilcher-Stolarsky q-polynomials.
//!
//! All arithmetic is exact. The Newman step in particular takes an exact
//! rational floor; values near integer boundaries are where approximate
//! implementations go wrong.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::expansions::{f_poly, HyperParams};
use crate::qpoly::{format_rational, QPoly, Rational};
use crate::report::VerifyReport;

/// Stern's diatomic value `b_n`, defined by `b_1 = 1`, `b_{2n} = b_n`,
/// `b_{2n+1} = b_n + b_{n+1}`.
///
/// Computed by descending on the pair `(b_n, b_{n+1})`, which takes
/// O(log n) steps.
pub fn stern(n: u64) -> BigInt {
    assert!(n >= 1, "stern is defined for n >= 1");
    stern_pair(n).0
}

/// `(b_n, b_{n+1})` for `n >= 1`.
fn stern_pair(n: u64) -> (BigInt, BigInt) {
    if n == 1 {
        return (BigInt::one(), BigInt::one());
    }
    let (lo, hi) = stern_pair(n / 2);
    if n.is_multiple_of(2) {
        // (b_{2k}, b_{2k+1}) = (b_k, b_k + b_{k+1})
        let sum = &lo + &hi;
        (lo, sum)
    } else {
        // (b_{2k+1}, b_{2k+2}) = (b_k + b_{k+1}, b_{k+1})
        let sum = &lo + &hi;
        (sum, hi)
    }
}

/// The first `count` terms of the Calkin-Wilf sequence via the recurrence
/// `x_{n+1} = 1 / (2*floor(x_n) + 1 - x_n)` with `x_1 = 1`.
pub fn newman_seq(count: usize) -> Vec<Rational> {
    assert!(count >= 1, "newman_seq needs at least one term");
    let mut out = Vec::with_capacity(count);
    let mut x = Rational::one();
    out.push(x.clone());
    for _ in 1..count {
        let floor = Rational::from_integer(x.numer().div_floor(x.denom()));
        let den = Rational::from_integer(BigInt::from(2)) * floor + Rational::one() - x;
        x = den.recip();
        out.push(x.clone());
    }
    out
}

thread_local! {
    static F_POLYS: RefCell<HashMap<u64, QPoly>> = RefCell::new(HashMap::new());
}

/// The Dilcher-Stolarsky polynomial `F_n(q)`: `F_0 = F_1 = 1`,
/// `F_{2n} = F_n`, `F_{2n+1} = q*F_n + F_{n+1}` for `n >= 1`.
pub fn dilcher_stolarsky(n: u64) -> QPoly {
    if n <= 1 {
        return QPoly::one();
    }
    if let Some(hit) = F_POLYS.with(|memo| memo.borrow().get(&n).cloned()) {
        return hit;
    }
    let k = n / 2;
    let value = if n.is_multiple_of(2) {
        dilcher_stolarsky(k)
    } else {
        &dilcher_stolarsky(k).mul_q_power(1) + &dilcher_stolarsky(k + 1)
    };
    F_POLYS.with(|memo| memo.borrow_mut().insert(n, value.clone()));
    value
}

/// Cross-checks the three classical sequences against each other and against
/// the binary weight recurrence (`m = 2`, `c = 0`):
///
/// - the Calkin-Wilf term at position `n` is `b_n / b_{n+1}`;
/// - `F_n(1) = b_n`;
/// - `F_{n+1}(q)` equals the `m=2, c=0` weight polynomial at `n`;
/// - every Calkin-Wilf term is positive and in lowest terms.
pub fn verify_classic(bound: u64) -> VerifyReport {
    let mut report = VerifyReport::new("classical-anchors", format!("n=1..={bound}"));
    let params = HyperParams::new(2, 0).expect("m=2 c=0 is valid");
    let seq = newman_seq(bound as usize);
    for (i, term) in seq.iter().enumerate() {
        let n = (i + 1) as u64;
        let expected = Rational::new(stern(n), stern(n + 1));
        report.check(
            *term == expected,
            format!("calkin-wilf term {n}"),
            format_rational(&expected),
            format_rational(term),
        );
        report.check(
            term.numer() > &BigInt::zero() && term.numer().gcd(term.denom()).is_one(),
            format!("term {n} positive and reduced"),
            "numerator > 0, gcd(num, den) = 1",
            format_rational(term),
        );
        let f_ratio = Rational::new(
            f_poly(n as i64 - 1, &params).eval_at_one(),
            f_poly(n as i64, &params).eval_at_one(),
        );
        report.check(
            *term == f_ratio,
            format!("term {n} vs f-quotient at q=1"),
            format_rational(term),
            format_rational(&f_ratio),
        );
    }
    // Within the first four levels, position 2n holds the left child
    // a/(a+b) of position n, and position 2n+1 the right child (a+b)/b.
    for n in 1..=7usize {
        if 2 * n + 1 > seq.len() {
            break;
        }
        let (a, b) = (seq[n - 1].numer(), seq[n - 1].denom());
        let left = Rational::new(a.clone(), a + b);
        let right = Rational::new(a + b, b.clone());
        report.check(
            seq[2 * n - 1] == left,
            format!("left child of term {n}"),
            format_rational(&left),
            format_rational(&seq[2 * n - 1]),
        );
        report.check(
            seq[2 * n] == right,
            format!("right child of term {n}"),
            format_rational(&right),
            format_rational(&seq[2 * n]),
        );
    }
    for n in 1..=bound {
        let fq = dilcher_stolarsky(n);
        report.check(
            fq.eval_at_one() == stern(n),
            format!("F_{n}(1) vs b_{n}"),
            stern(n).to_string(),
            fq.eval_at_one().to_string(),
        );
    }
    for n in 0..=bound {
        let lhs = dilcher_stolarsky(n + 1);
        let rhs = f_poly(n as i64, &params);
        report.check(
            lhs == rhs,
            format!("F_{}(q) vs binary weight polynomial at {n}", n + 1),
            rhs.to_string(),
            lhs.to_string(),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stern_opening_values() {
        let expected = [1u32, 1, 2, 1, 3, 2, 3, 1, 4, 3, 5, 2, 5, 3, 4];
        for (i, &want) in expected.iter().enumerate() {
            assert_eq!(stern(i as u64 + 1), BigInt::from(want));
        }
        assert_eq!(stern(11), BigInt::from(5));
        for k in 0..=10 {
            assert_eq!(stern(1u64 << k), BigInt::one());
        }
    }

    #[test]
    fn newman_walks_the_calkin_wilf_sequence() {
        let seq = newman_seq(15);
        let expected = [
            (1, 1),
            (1, 2),
            (2, 1),
            (1, 3),
            (3, 2),
            (2, 3),
            (3, 1),
            (1, 4),
            (4, 3),
            (3, 5),
            (5, 2),
            (2, 5),
            (5, 3),
            (3, 4),
            (4, 1),
        ];
        for (term, (n, d)) in seq.iter().zip(expected) {
            assert_eq!(*term, Rational::new(BigInt::from(n), BigInt::from(d)));
        }
    }

    #[test]
    fn newman_numerators_follow_stern() {
        let seq = newman_seq(500);
        for (i, term) in seq.iter().enumerate() {
            let n = i as u64 + 1;
            assert_eq!(*term, Rational::new(stern(n), stern(n + 1)), "term {n}");
        }
    }

    #[test]
    fn dilcher_stolarsky_base_cases_and_alias() {
        assert_eq!(dilcher_stolarsky(0), QPoly::one());
        assert_eq!(dilcher_stolarsky(1), QPoly::one());
        assert_eq!(dilcher_stolarsky(3), QPoly::from_ints(&[1, 1]));
        let params = HyperParams::new(2, 0).unwrap();
        for n in 0..=500i64 {
            assert_eq!(dilcher_stolarsky(n as u64 + 1), f_poly(n, &params), "n={n}");
        }
    }

    #[test]
    fn verify_classic_passes() {
        let report = verify_classic(200);
        assert!(report.passed(), "{report}");
    }
}
