//! Exact arithmetic on integer-coefficient polynomials in `q` and on ratios
//! of such polynomials.
//!
//! Everything in this module is exact: coefficients are arbitrary-precision
//! integers, evaluation points are arbitrary-precision rationals, and no
//! floating point appears anywhere. Polynomials are dense, stored in
//! ascending degree with no trailing zero coefficient, so the zero
//! polynomial is the empty coefficient vector and `degree` is well-defined
//! as `len - 1`.
//!
//! [`QRat`] values are deliberately *not* reduced to a canonical form.
//! Equality of ratios is extensional, via cross-multiplication
//! ([`QRat::equiv`]), which is all the tree identities need and avoids
//! polynomial GCD entirely.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as DeError;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational scalar, used for specializations such as q = 1 or q = -r^2.
///
/// Values are kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Error raised when evaluating a ratio whose denominator vanishes at the
/// requested point.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("denominator vanishes at q = {point}")]
    DivisionByZero { point: String },
}

/// Dense univariate polynomial in `q` with `BigInt` coefficients.
///
/// Index `i` of the coefficient vector holds the coefficient of `q^i`.
/// The representation is canonical: no trailing zeros are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    coeffs: Vec<BigInt>,
}

impl QPoly {
    /// Builds a polynomial from ascending-degree coefficients, trimming
    /// trailing zeros.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    /// Convenience constructor from machine integers (ascending degree).
    pub fn from_ints(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    /// The monomial `q`.
    pub fn q() -> Self {
        QPoly::monomial(BigInt::one(), 1)
    }

    /// The monomial `coeff * q^degree`.
    pub fn monomial(coeff: BigInt, degree: usize) -> Self {
        if coeff.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = coeff;
        QPoly { coeffs }
    }

    /// `1 + q + ... + q^{terms-1}`; the zero polynomial when `terms == 0`.
    pub fn geometric(terms: usize) -> Self {
        QPoly {
            coeffs: vec![BigInt::one(); terms],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Ascending-degree coefficient slice (canonical, no trailing zeros).
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `q^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Multiplies by `q^k`.
    pub fn mul_q_power(&self, k: usize) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        QPoly { coeffs }
    }

    /// Exact Horner evaluation at a rational point.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Rational::from_integer(c.clone());
        }
        acc
    }

    /// Sum of the coefficients, i.e. the value at q = 1.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }
}

impl<'b> Add<&'b QPoly> for &QPoly {
    type Output = QPoly;

    fn add(self, rhs: &'b QPoly) -> QPoly {
        let (longer, shorter) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = longer.coeffs.clone();
        for (i, c) in shorter.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        QPoly::new(coeffs)
    }
}

impl<'b> Sub<&'b QPoly> for &QPoly {
    type Output = QPoly;

    fn sub(self, rhs: &'b QPoly) -> QPoly {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < rhs.coeffs.len() {
            coeffs.resize(rhs.coeffs.len(), BigInt::zero());
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] -= c;
        }
        QPoly::new(coeffs)
    }
}

impl<'b> Mul<&'b QPoly> for &QPoly {
    type Output = QPoly;

    fn mul(self, rhs: &'b QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        QPoly::new(coeffs)
    }
}

impl Neg for &QPoly {
    type Output = QPoly;

    fn neg(self) -> QPoly {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Renders a coefficient slice as a polynomial in `var`.
///
/// `spaced` selects " + " separators (standalone display); the compact form
/// is used inside fraction rendering so labels stay whitespace-free.
pub(crate) fn format_poly(coeffs: &[BigInt], var: &str, spaced: bool) -> String {
    if coeffs.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if first {
            if c.is_negative() {
                out.push('-');
            }
            first = false;
        } else if c.is_negative() {
            out.push_str(if spaced { " - " } else { "-" });
        } else {
            out.push_str(if spaced { " + " } else { "+" });
        }
        let show_mag = i == 0 || !mag.is_one();
        if show_mag {
            out.push_str(&mag.to_string());
        }
        if i == 1 {
            out.push_str(var);
        } else if i > 1 {
            out.push_str(var);
            out.push('^');
            out.push_str(&i.to_string());
        }
    }
    if out.is_empty() {
        // All coefficients zero is unreachable in canonical form.
        out.push('0');
    }
    out
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(&self.coeffs, "q", true))
    }
}

impl Serialize for QPoly {
    /// A JSON array of decimal integer strings, ascending degree:
    /// `1 + 2q + q^2` serializes as `["1","2","1"]`.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&c.to_string())?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for QPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        let coeffs = raw
            .iter()
            .map(|s| {
                s.parse::<BigInt>()
                    .map_err(|_| D::Error::custom(format!("invalid integer coefficient {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QPoly::new(coeffs))
    }
}

/// Ratio of two integer polynomials in `q`, stored exactly as produced.
///
/// The denominator is never the zero polynomial. No reduction is performed;
/// use [`QRat::equiv`] for mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QRat {
    num: QPoly,
    den: QPoly,
}

impl QRat {
    /// Builds `num/den`.
    ///
    /// Panics if `den` is the zero polynomial; a zero denominator is always
    /// a construction bug, never data.
    pub fn new(num: QPoly, den: QPoly) -> Self {
        assert!(!den.is_zero(), "QRat denominator must be nonzero");
        QRat { num, den }
    }

    /// The ratio 1/1.
    pub fn one() -> Self {
        QRat::new(QPoly::one(), QPoly::one())
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    /// Extensional equality by cross-multiplication:
    /// `num1 * den2 == num2 * den1` as canonical polynomials.
    pub fn equiv(&self, other: &QRat) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    /// Swaps numerator and denominator. Panics on a zero numerator.
    pub fn reciprocal(&self) -> QRat {
        QRat::new(self.den.clone(), self.num.clone())
    }

    /// Exact evaluation at a rational point, in lowest terms.
    pub fn eval(&self, x: &Rational) -> Result<Rational, EvalError> {
        let den = self.den.eval(x);
        if den.is_zero() {
            return Err(EvalError::DivisionByZero {
                point: x.to_string(),
            });
        }
        Ok(self.num.eval(x) / den)
    }
}

impl<'b> Mul<&'b QRat> for &QRat {
    type Output = QRat;

    fn mul(self, rhs: &'b QRat) -> QRat {
        QRat::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Wraps a polynomial in parentheses unless it is a single nonnegative term.
fn fraction_part(p: &QPoly) -> String {
    let body = format_poly(p.coeffs(), "q", false);
    let nonzero_terms = p.coeffs().iter().filter(|c| !c.is_zero()).count();
    if nonzero_terms <= 1 && !body.starts_with('-') {
        body
    } else {
        format!("({body})")
    }
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}",
            fraction_part(&self.num),
            fraction_part(&self.den)
        )
    }
}

impl Serialize for QRat {
    /// `{"num": [...], "den": [...]}` with the [`QPoly`] coefficient schema.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("QRat", 2)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for QRat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: QPoly,
            den: QPoly,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.den.is_zero() {
            return Err(D::Error::custom("QRat denominator must be nonzero"));
        }
        Ok(QRat::new(raw.num, raw.den))
    }
}

/// Formats a rational as `num/den`, keeping an explicit denominator of 1.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn add_is_coefficientwise_and_canonical() {
        let one_plus_q = QPoly::from_ints(&[1, 1]);
        let q = QPoly::q();
        assert_eq!(&one_plus_q + &q, QPoly::from_ints(&[1, 2]));
        // Additive identity.
        assert_eq!(&one_plus_q + &QPoly::zero(), one_plus_q);
        // Full cancellation canonicalizes to the empty coefficient vector.
        let minus = QPoly::from_ints(&[-1, -1]);
        let sum = &one_plus_q + &minus;
        assert!(sum.is_zero());
        assert_eq!(sum.coeffs().len(), 0);
    }

    #[test]
    fn mul_is_exact_convolution() {
        let one_plus_q = QPoly::from_ints(&[1, 1]);
        assert_eq!(&one_plus_q * &one_plus_q, QPoly::from_ints(&[1, 2, 1]));
        assert!((&one_plus_q * &QPoly::zero()).is_zero());
        let one_minus_q = QPoly::from_ints(&[1, -1]);
        assert_eq!(&one_plus_q * &one_minus_q, QPoly::from_ints(&[1, 0, -1]));
    }

    #[test]
    fn eval_is_exact_horner() {
        let p = QPoly::from_ints(&[1, 2, 1]);
        assert_eq!(p.eval(&rat(1, 1)), rat(4, 1));
        assert_eq!(QPoly::zero().eval(&rat(7, 3)), rat(0, 1));
        let one_plus_q = QPoly::from_ints(&[1, 1]);
        assert_eq!(one_plus_q.eval(&rat(-4, 1)), rat(-3, 1));
    }

    #[test]
    fn qrat_equiv_cross_multiplies() {
        let r1 = QRat::new(QPoly::from_ints(&[1, 1]), QPoly::from_ints(&[1, 2, 1]));
        let r2 = QRat::new(QPoly::one(), QPoly::from_ints(&[1, 1]));
        assert!(r1.equiv(&r2));

        let r3 = QRat::new(QPoly::one(), QPoly::one());
        assert!(!r3.equiv(&r2));

        let r4 = QRat::new(QPoly::q(), QPoly::monomial(BigInt::one(), 2));
        let r5 = QRat::new(QPoly::one(), QPoly::q());
        assert!(r4.equiv(&r5));
    }

    #[test]
    fn qrat_eval_reduces_and_detects_zero_denominator() {
        let r = QRat::new(QPoly::from_ints(&[1, 1]), QPoly::from_ints(&[1, 2]));
        assert_eq!(r.eval(&rat(1, 1)).unwrap(), rat(2, 3));

        let p = QPoly::from_ints(&[3, 1, 4]);
        let same = QRat::new(p.clone(), p);
        assert_eq!(same.eval(&rat(5, 7)).unwrap(), rat(1, 1));

        let third = QRat::new(QPoly::one(), QPoly::from_ints(&[1, 1, 1]));
        assert_eq!(third.eval(&rat(1, 1)).unwrap(), rat(1, 3));

        let vanishing = QRat::new(QPoly::one(), QPoly::from_ints(&[1, 1]));
        assert!(matches!(
            vanishing.eval(&rat(-1, 1)),
            Err(EvalError::DivisionByZero { .. })
        ));
    }

    #[test]
    fn display_formats() {
        assert_eq!(QPoly::from_ints(&[1, 2, 1]).to_string(), "1 + 2q + q^2");
        assert_eq!(QPoly::from_ints(&[0, -1, 3]).to_string(), "-q + 3q^2");
        assert_eq!(QPoly::zero().to_string(), "0");
        let r = QRat::new(QPoly::from_ints(&[1, 1]), QPoly::from_ints(&[1, 2]));
        assert_eq!(r.to_string(), "(1+q)/(1+2q)");
        assert_eq!(QRat::one().to_string(), "1/1");
        let q_over = QRat::new(QPoly::q(), QPoly::from_ints(&[0, 0, 1]));
        assert_eq!(q_over.to_string(), "q/q^2");
    }

    #[test]
    fn serde_round_trip_matches_schema() {
        let p = QPoly::from_ints(&[1, 2, 1]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"["1","2","1"]"#);
        let back: QPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);

        let r = QRat::new(QPoly::from_ints(&[1, 1]), QPoly::from_ints(&[1, 2]));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"num":["1","1"],"den":["1","2"]}"#);
        let back: QRat = serde_json::from_str(&json).unwrap();
        assert!(back.equiv(&r));
    }

    #[test]
    #[should_panic(expected = "denominator must be nonzero")]
    fn zero_denominator_is_rejected() {
        let _ = QRat::new(QPoly::one(), QPoly::zero());
    }

    #[test]
    fn deserialization_validates_input() {
        assert!(serde_json::from_str::<QPoly>(r#"["1","x"]"#).is_err());
        assert!(serde_json::from_str::<QRat>(r#"{"num":["1"],"den":[]}"#).is_err());
        // Trailing zeros canonicalize away on the way in.
        let p: QPoly = serde_json::from_str(r#"["1","2","0"]"#).unwrap();
        assert_eq!(p, QPoly::from_ints(&[1, 2]));
    }
}
