//! Constructive q=1 density search: given a reduced fraction in (0, 1],
//! produce a root-to-vertex path realizing it in the chosen tree family,
//! and verify by replay.
//!
//! The construction is case-split exactly like the child rules:
//!
//! - `c = m-1` (m >= 3): reach 1/x along the root's final branch, step to
//!   1/2, ride the `(m-1)`-branch whose labels are consecutive Fibonacci
//!   quotients, and take one final child. The stopping time comes from the
//!   Fibonacci entry point of `b - a`.
//! - `c = 0`: recursion on `a + b`, using the `(m-1)`-st child for targets
//!   at most 1/2 and the final-child iteration
//!   `x/y -> (iy-(i-1)x)/((i+1)y-ix)` otherwise. Runs on the definition
//!   root 1/1.
//! - middle `c`: recursion on `a + b` through the two local child maps
//!   `p -> 1/(1+p)` and `p -> p/(1+p)`.
//!
//! [`replay_path`] walks the structural child rules in exact rational
//! arithmetic specialized at q = 1, so a found path is always checked
//! against an independent evaluation route.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::cwtree::{RootMode, TreeFamily, TreeParams};
use crate::expansions::f_poly;
use crate::qpoly::Rational;
use crate::report::VerifyReport;

/// Hard cap on materialized path length. The `c = m-1` construction can
/// demand `u*a` steps where `u` comes from a Fibonacci value, so honest
/// inputs can explode; beyond this the path is refused rather than built.
const PATH_STEP_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("no Fibonacci multiple of {d} found within {bound} terms")]
    SearchBoundExceeded { d: String, bound: String },
    #[error("constructed path of {steps} steps exceeds the cap of {PATH_STEP_CAP}")]
    PathTooLong { steps: String },
    #[error("path step {step} out of range 1..={m}")]
    InvalidStep { step: u32, m: u32 },
    #[error("replay position {index} exceeds the supported index range")]
    IndexOutOfRange { index: String },
}

/// A reduced fraction `a/b` with `1 <= a <= b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fraction {
    a: BigUint,
    b: BigUint,
}

impl Fraction {
    pub fn new(a: BigUint, b: BigUint) -> Result<Self, DensityError> {
        if a.is_zero() || b.is_zero() {
            return Err(DensityError::InvalidTarget(format!(
                "{a}/{b}: numerator and denominator must be positive"
            )));
        }
        if a > b {
            return Err(DensityError::InvalidTarget(format!(
                "{a}/{b}: target must lie in (0, 1]"
            )));
        }
        if !a.gcd(&b).is_one() {
            return Err(DensityError::InvalidTarget(format!(
                "{a}/{b}: target must be in lowest terms"
            )));
        }
        Ok(Fraction { a, b })
    }

    pub fn from_u64(a: u64, b: u64) -> Result<Self, DensityError> {
        Fraction::new(BigUint::from(a), BigUint::from(b))
    }

    pub fn numer(&self) -> &BigUint {
        &self.a
    }

    pub fn denom(&self) -> &BigUint {
        &self.b
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(BigInt::from(self.a.clone()), BigInt::from(self.b.clone()))
    }

    fn from_rational(x: &Rational) -> Result<Self, DensityError> {
        let (a, b) = (x.numer(), x.denom());
        let a = a
            .to_biguint()
            .ok_or_else(|| DensityError::InvalidTarget(format!("{x} is not positive")))?;
        let b = b
            .to_biguint()
            .ok_or_else(|| DensityError::InvalidTarget(format!("{x} is not positive")))?;
        Fraction::new(a, b)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.b)
    }
}

/// A root-to-vertex walk: child positions in `1..=m`, outermost first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Path {
    steps: Vec<u32>,
}

impl Path {
    pub fn new(steps: Vec<u32>) -> Self {
        Path { steps }
    }

    pub fn steps(&self) -> &[u32] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self.steps.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", rendered.join(","))
    }
}

/// Fibonacci with the indexing `fib(0) = fib(1) = 1`.
pub fn fib(i: u64) -> BigUint {
    let mut prev = BigUint::one();
    let mut cur = BigUint::one();
    for _ in 0..i {
        let next = &prev + &cur;
        prev = cur;
        cur = next;
    }
    prev
}

/// Smallest `k >= 1` with `d | fib(k)`. Such `k` always exists; the scan is
/// bounded at `6d` as an internal sanity check that must never trigger.
pub fn fib_entry_point(d: &BigUint) -> Result<u64, DensityError> {
    if d.is_zero() {
        return Err(DensityError::InvalidTarget(
            "Fibonacci entry point needs d >= 1".into(),
        ));
    }
    first_fib_multiple(d, 1)
}

/// Smallest `k >= start` with `d | fib(k)`, scanning residues mod `d`.
fn first_fib_multiple(d: &BigUint, start: u64) -> Result<u64, DensityError> {
    let bound = d * 6u32 + BigUint::from(start);
    let mut prev = BigUint::one() % d; // fib(0) mod d
    let mut cur = BigUint::one() % d; // fib(1) mod d
    let mut k: u64 = 1;
    loop {
        if k >= start && cur.is_zero() {
            return Ok(k);
        }
        if BigUint::from(k) > bound {
            return Err(DensityError::SearchBoundExceeded {
                d: d.to_string(),
                bound: bound.to_string(),
            });
        }
        let next = (&prev + &cur) % d;
        prev = cur;
        cur = next;
        k += 1;
    }
}

fn ensure_supported(params: &TreeParams) -> Result<(), DensityError> {
    match params.family() {
        TreeFamily::MaxC if params.m() == 2 => Err(DensityError::UnsupportedCase(
            "the q=1 density construction for c = m-1 needs m >= 3".into(),
        )),
        TreeFamily::ZeroC if params.root_mode() != RootMode::Definition => {
            Err(DensityError::UnsupportedCase(
                "c = 0 density runs on the definition root 1/1; use root-mode definition".into(),
            ))
        }
        _ => Ok(()),
    }
}

fn checked_path(steps: Vec<u32>) -> Result<Path, DensityError> {
    if steps.len() as u64 > PATH_STEP_CAP {
        return Err(DensityError::PathTooLong {
            steps: steps.len().to_string(),
        });
    }
    Ok(Path::new(steps))
}

/// A path whose replay at q = 1 equals `target`. One valid path is
/// returned, not the shortest; fractions recur in these trees, so replay
/// equality is the only contract.
pub fn find_path(target: &Fraction, params: &TreeParams) -> Result<Path, DensityError> {
    ensure_supported(params)?;
    match params.family() {
        TreeFamily::MaxC => find_path_max_c(target, params.m()),
        TreeFamily::ZeroC => find_path_zero_c(target, params.m()),
        TreeFamily::MiddleC => find_path_middle(target, params.c()),
    }
}

fn find_path_max_c(target: &Fraction, m: u32) -> Result<Path, DensityError> {
    let (a, b) = (&target.a, &target.b);
    if a == b {
        return Ok(Path::default());
    }
    if a.is_one() {
        // 1/b sits on the root's final branch after b-1 steps.
        let count = (b - 1u32)
            .to_u64()
            .filter(|&c| c <= PATH_STEP_CAP)
            .ok_or_else(|| DensityError::PathTooLong {
                steps: (b - 1u32).to_string(),
            })?;
        return checked_path(vec![m; count as usize]);
    }
    // a >= 2: pick the smallest t >= 1 with (b - a) | fib(t+1), write
    // fib(t+1) = u*(b - a), and aim the final child of the t-th vertex on
    // the (m-1)-branch out of 1/2 under 1/(u*a).
    let d = b - a;
    let t = first_fib_multiple(&d, 2)? - 1;
    let u = fib(t + 1) / &d;
    let x = u * a;
    let total = &x + BigUint::from(t);
    if total > BigUint::from(PATH_STEP_CAP) {
        return Err(DensityError::PathTooLong {
            steps: total.to_string(),
        });
    }
    let x = x.to_u64().expect("bounded by the path cap") as usize;
    let t = t as usize;
    let mut steps = Vec::with_capacity(x + t);
    steps.extend(std::iter::repeat_n(m, x - 1));
    steps.push(m - 2);
    steps.extend(std::iter::repeat_n(m - 1, t - 1));
    steps.push(m);
    checked_path(steps)
}

fn find_path_zero_c(target: &Fraction, m: u32) -> Result<Path, DensityError> {
    let mut a = target.a.clone();
    let mut b = target.b.clone();
    // Suffix steps accumulate in reverse while the target shrinks.
    let mut rev: Vec<u32> = Vec::new();
    while !(a.is_one() && b.is_one()) {
        if rev.len() as u64 > PATH_STEP_CAP {
            return Err(DensityError::PathTooLong {
                steps: rev.len().to_string(),
            });
        }
        if &a * 2u32 <= b {
            // a/b is the (m-1)-st child of a/(b-a).
            rev.push(m - 1);
            b -= &a;
        } else {
            // 1/2 < a/b < 1: j is the unique integer with
            // j/(j+1) < a/b <= (j+1)/(j+2); after j final-child steps from
            // x/y (an (m-1)-st child of x/(y-x)) the label is a/b.
            let d = &b - &a;
            let over = &a * 2u32 - &b;
            let j = (&over + &d - 1u32) / &d;
            let j_small = j.to_u64().filter(|&j| j <= PATH_STEP_CAP).ok_or_else(|| {
                DensityError::PathTooLong {
                    steps: j.to_string(),
                }
            })?;
            rev.extend(std::iter::repeat_n(m, j_small as usize));
            rev.push(m - 1);
            let x = (&j + 1u32) * &a - &j * &b;
            a = x;
            b = d;
        }
    }
    rev.reverse();
    checked_path(rev)
}

fn find_path_middle(target: &Fraction, c: u32) -> Result<Path, DensityError> {
    let mut a = target.a.clone();
    let mut b = target.b.clone();
    let mut rev: Vec<u32> = Vec::new();
    while !(a.is_one() && b.is_one()) {
        if rev.len() as u64 > PATH_STEP_CAP {
            return Err(DensityError::PathTooLong {
                steps: rev.len().to_string(),
            });
        }
        let d = &b - &a;
        if a == d {
            // Target 1/2: child c of the root. Child c+1 would do as well;
            // c is fixed for determinism.
            rev.push(c);
            break;
        } else if a < d {
            // a/b is child c+1 of a/(b-a).
            rev.push(c + 1);
            b = d;
        } else {
            // a/b is child c of (b-a)/a.
            rev.push(c);
            b = a;
            a = d;
        }
    }
    rev.reverse();
    checked_path(rev)
}

/// One vertex on the replayed root-to-current chain. The reading-order
/// index grows like m^depth, so it is materialized only for order 2, the
/// one case whose sibling rule consults it.
struct ReplayNode {
    index: Option<BigUint>,
    child_pos: Option<u32>,
    value: Rational,
}

/// The q = 1 value of the label reached by walking `path` from the root via
/// the structural child rules, in lowest terms.
pub fn replay_path(path: &Path, params: &TreeParams) -> Result<Fraction, DensityError> {
    ensure_supported_replay(params)?;
    let m = params.m();
    let track_index = m == 2;
    let mut chain: Vec<ReplayNode> = vec![ReplayNode {
        index: track_index.then(BigUint::zero),
        child_pos: None,
        value: Rational::one(),
    }];
    for &k in path.steps() {
        if k < 1 || k > m {
            return Err(DensityError::InvalidStep { step: k, m });
        }
        let value = child_value_at_one(&chain, k, params)?;
        let parent = chain.last().expect("chain starts at the root");
        let index = parent.index.as_ref().map(|i| i * m + k);
        chain.push(ReplayNode {
            index,
            child_pos: Some(k),
            value,
        });
    }
    Fraction::from_rational(&chain.last().expect("chain is nonempty").value)
}

/// Replay supports every family the structural rules define, but pins the
/// c = 0 family to the definition root; the theorem-mode tree is reachable
/// through the symbolic builder instead.
fn ensure_supported_replay(params: &TreeParams) -> Result<(), DensityError> {
    if params.family() == TreeFamily::ZeroC && params.root_mode() != RootMode::Definition {
        return Err(DensityError::UnsupportedCase(
            "replay runs on the definition root 1/1; use root-mode definition".into(),
        ));
    }
    Ok(())
}

fn one() -> Rational {
    Rational::one()
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

/// The structural child rules specialized at q = 1. Labels stay in (0, 1],
/// so no denominator can vanish.
fn child_value_at_one(
    chain: &[ReplayNode],
    k: u32,
    params: &TreeParams,
) -> Result<Rational, DensityError> {
    let m = params.m();
    let parent = chain.last().expect("chain starts at the root");
    let p = parent.value.clone();
    match params.family() {
        TreeFamily::MiddleC => {
            let c = params.c();
            if k == c {
                Ok((one() + p).recip())
            } else if k == c + 1 {
                Ok((one() + p.recip()).recip())
            } else {
                Ok(half())
            }
        }
        TreeFamily::MaxC => {
            if k <= m.saturating_sub(2) {
                Ok(half())
            } else if k == m - 1 {
                Ok((one() + p).recip())
            } else {
                let mut head = chain.len() - 1;
                let mut prod = chain[head].value.clone().recip();
                while chain[head].child_pos == Some(m - 1) {
                    head -= 1;
                    prod *= chain[head].value.clone().recip();
                }
                let factor = if m == 2 {
                    if chain[head].child_pos == Some(2) {
                        let parent_index = chain[head - 1]
                            .index
                            .as_ref()
                            .expect("order-2 replay tracks indices");
                        let position = parent_index + 1u32;
                        Some(ratio_value_at_one(&position, params)?)
                    } else {
                        None
                    }
                } else if chain[head].child_pos == Some(m - 2) {
                    Some(chain[head - 1].value.clone())
                } else {
                    None
                };
                if let Some(factor) = factor {
                    prod *= factor;
                }
                Ok((one() + prod).recip())
            }
        }
        TreeFamily::ZeroC => {
            if k <= m.saturating_sub(2) {
                Ok(half())
            } else if k == m - 1 {
                Ok((one() + p.recip()).recip())
            } else {
                let mut head = chain.len() - 1;
                let mut s: u64 = 1;
                while chain[head].child_pos == Some(m) {
                    head -= 1;
                    s += 1;
                }
                let r = if chain[head].child_pos == Some(m - 1) {
                    chain[head - 1].value.clone()
                } else {
                    one()
                };
                // 1 + q + ... + q^{s-2} + q^{s-1} r at q = 1.
                let geometric = Rational::from_integer(BigInt::from(s - 1)) + r;
                Ok((one() + p / geometric).recip())
            }
        }
    }
}

/// The q = 1 ratio value at reading position `n` for the order-2 sibling
/// rule: the quotient of consecutive weight-polynomial values.
fn ratio_value_at_one(n: &BigUint, params: &TreeParams) -> Result<Rational, DensityError> {
    let n = n
        .to_i64()
        .filter(|&n| n <= (i64::MAX - 2) / 2)
        .ok_or_else(|| DensityError::IndexOutOfRange {
            index: n.to_string(),
        })?;
    let hp = params.hyper();
    Ok(Rational::new(
        f_poly(2 * n, &hp).eval_at_one(),
        f_poly(2 * n + 1, &hp).eval_at_one(),
    ))
}

/// For every reduced `a/b` with `1 <= a <= b <= bound`, finds a path and
/// replays it; failures list targets whose replay differs. Path-length
/// statistics land in the notes.
pub fn verify_density(params: &TreeParams, bound: u64) -> Result<VerifyReport, DensityError> {
    ensure_supported(params)?;
    let mut report = VerifyReport::new(
        "density-replay",
        format!("{} bound={bound}", params.describe()),
    );
    let mut count: u64 = 0;
    let mut total_steps: u64 = 0;
    let mut max_steps: usize = 0;
    for b in 1..=bound {
        for a in 1..=b {
            if a.gcd(&b) != 1 {
                continue;
            }
            let target = Fraction::from_u64(a, b)?;
            let path = find_path(&target, params)?;
            let replayed = replay_path(&path, params)?;
            report.check(replayed == target, format!("{a}/{b}"), &target, &replayed);
            count += 1;
            total_steps += path.len() as u64;
            max_steps = max_steps.max(path.len());
        }
    }
    report.note(format!(
        "targets: {count}, max path length: {max_steps}, total steps: {total_steps}"
    ));
    Ok(report)
}
