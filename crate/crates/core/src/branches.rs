//! Branch extraction and the Chebyshev closed forms for the `c = m-1` trees.
//!
//! The `(m-1)`-st branch of the root is governed by the polynomial family
//! `W_0 = 1`, `W_1 = 1 + q`, `W_j = W_{j-1} + q*W_{j-2}`: its `j`-th element
//! is `W_{j-1}/W_j` (with `W_{-1} = 1` so the sequence starts at the root).
//! `W_j` is the radical-free form of `sqrt(-q)^{j+1} U_{j+1}(1/(2 sqrt(-q)))`
//! for the Chebyshev polynomials of the second kind; the two agree exactly
//! at every point `q = -r^2` with rational `r != 0`, which is how the
//! Chebyshev connection is verified without introducing square roots.
//!
//! At `q = 1` the `W_j` are the Fibonacci numbers (1, 1, 2, 3, 5, ... with
//! the indexing `W_j(1) = fib(j+1)`), which is what the density search in
//! [`crate::density`] leans on.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::cwtree::{build_tree, ratio_label, TreeError, TreeFamily, TreeNode, TreeParams};
use crate::qpoly::{format_poly, QPoly, QRat, Rational};
use crate::report::VerifyReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("tree of {len} nodes is too shallow: branch element at index {index} is absent")]
    InsufficientDepth { index: u64, len: usize },
    #[error("child position {k} out of range 1..={m}")]
    InvalidChildPosition { k: u32, m: u32 },
}

/// Integer-coefficient polynomial in the indeterminate `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChebyPoly {
    poly: QPoly,
}

impl ChebyPoly {
    pub fn coeffs(&self) -> &[BigInt] {
        self.poly.coeffs()
    }

    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.degree()
            .map(|d| self.poly.coeff(d))
            .unwrap_or_default()
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.poly.eval(t)
    }
}

impl std::fmt::Display for ChebyPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", format_poly(self.poly.coeffs(), "t", true))
    }
}

/// The `n`-th Chebyshev polynomial of the second kind:
/// `U_0 = 1`, `U_1 = 2t`, `U_n = 2t*U_{n-1} - U_{n-2}`.
pub fn chebyshev_u(n: u32) -> ChebyPoly {
    let two_t = QPoly::from_ints(&[0, 2]);
    let mut prev = QPoly::one();
    if n == 0 {
        return ChebyPoly { poly: prev };
    }
    let mut cur = two_t.clone();
    for _ in 2..=n {
        let next = &(&two_t * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    ChebyPoly { poly: cur }
}

/// The branch polynomial `W_j`: `W_0 = 1`, `W_1 = 1+q`,
/// `W_j = W_{j-1} + q*W_{j-2}`.
///
/// For every rational `r != 0` and `q = -r^2`, `W_j(q)` equals
/// `r^{j+1} * U_{j+1}(1/(2r))` exactly.
pub fn branch_poly_w(j: u32) -> QPoly {
    let mut prev = QPoly::one();
    if j == 0 {
        return prev;
    }
    let mut cur = QPoly::from_ints(&[1, 1]);
    for _ in 2..=j {
        let next = &cur + &prev.mul_q_power(1);
        prev = cur;
        cur = next;
    }
    cur
}

/// `W_0, ..., W_count-1` in one pass.
fn w_polys(count: usize) -> Vec<QPoly> {
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        match j {
            0 => out.push(QPoly::one()),
            1 => out.push(QPoly::from_ints(&[1, 1])),
            _ => out.push(&out[j - 1] + &out[j - 2].mul_q_power(1)),
        }
    }
    out
}

/// Labels along the `k`-th branch starting at vertex `v_index`:
/// `v, k-th child of v, k-th child of that, ...`, `len` elements total.
pub fn extract_branch(
    tree: &[TreeNode],
    v_index: u64,
    k: u32,
    len: usize,
    params: &TreeParams,
) -> Result<Vec<QRat>, BranchError> {
    let m = params.m();
    if k < 1 || k > m {
        return Err(BranchError::InvalidChildPosition { k, m });
    }
    let mut out = Vec::with_capacity(len);
    let mut index = v_index;
    for step in 0..len {
        let slot = usize::try_from(index).ok().filter(|&s| s < tree.len());
        let node = slot.map(|s| &tree[s]).filter(|n| n.index == index).ok_or(
            BranchError::InsufficientDepth {
                index,
                len: tree.len(),
            },
        )?;
        out.push(node.label.clone());
        if step + 1 < len {
            index = index
                .checked_mul(u64::from(m))
                .and_then(|x| x.checked_add(u64::from(k)))
                .ok_or(BranchError::InsufficientDepth {
                    index: u64::MAX,
                    len: tree.len(),
                })?;
        }
    }
    Ok(out)
}

/// Element `i >= 1` of the final branch of a vertex with Chebyshev factor
/// `t`: `1 / (1 + q + ... + q^{i-1} + q^i * t)`.
fn final_branch_element(i: usize, t: &QPoly) -> QRat {
    QRat::new(QPoly::one(), &QPoly::geometric(i) + &t.mul_q_power(i))
}

/// Checks the four branch identities of the `c = m-1` tree up to `j_max`:
///
/// 1. the Chebyshev cross-check `W_j(-r^2) = r^{j+1} U_{j+1}(1/(2r))` for
///    `r` in 1..=3;
/// 2. the root's `(m-1)`-branch equals `{W_{j-1}/W_j}`;
/// 3. for each vertex `v` on that branch, `v`'s final branch equals
///    `{v, 1/(1+q*W_j), 1/(1+q+q^2*W_j), ...}` and `v`'s `j`-th branches for
///    `j <= m-2` are constant 1/(1+q) after `v` (both skipped for `m = 2`,
///    where the order-2 sibling rule changes the final branch);
/// 4. the recurrence `x_{m^j - 1} = 1/(1 + q*x_{m^{j-1} - 1})` against the
///    ratio oracle.
///
/// Tree-extraction checks run on a tree of depth `min(j_max, depth guard)`;
/// the Chebyshev and ratio-recurrence checks run to `j_max` directly.
pub fn verify_branch_theorems(
    params: &TreeParams,
    j_max: u32,
) -> Result<VerifyReport, BranchError> {
    if params.family() != TreeFamily::MaxC {
        return Err(BranchError::Tree(TreeError::InvalidParams(format!(
            "branch closed forms apply to c = m-1, got {}",
            params.describe()
        ))));
    }
    let m = params.m();
    let mut report = VerifyReport::new(
        "branch-closed-forms",
        format!("{} j_max={j_max}", params.describe()),
    );

    let w = w_polys(j_max as usize + 2);
    for j in 0..=j_max {
        for r in 1..=3i64 {
            let point = Rational::from_integer(BigInt::from(-r * r));
            let lhs = w[j as usize].eval(&point);
            let arg = Rational::new(BigInt::one(), BigInt::from(2 * r));
            let rhs =
                Rational::from_integer(BigInt::from(r).pow(j + 1)) * chebyshev_u(j + 1).eval(&arg);
            report.check(
                lhs == rhs,
                format!("W_{j} at q=-{}^2", r),
                rhs.to_string(),
                lhs.to_string(),
            );
        }
    }

    let depth = j_max.min(params.depth_guard());
    let tree = build_tree(params, depth)?;

    let root_branch = extract_branch(&tree, 0, m - 1, depth as usize + 1, params)?;
    for (j, label) in root_branch.iter().enumerate() {
        let expected = if j == 0 {
            QRat::one()
        } else {
            QRat::new(w[j - 1].clone(), w[j].clone())
        };
        report.check(
            label.equiv(&expected),
            format!("(m-1)-branch element {j}"),
            &expected,
            label,
        );
    }

    if m == 2 {
        report.note(
            "order 2: final-branch and constant-branch closed forms require m >= 3 \
             (the order-2 sibling rule changes the final branch); those checks are skipped",
        );
    } else {
        for j in 0..=depth {
            let v_index = u64::from(m).pow(j) - 1;
            let len = (depth - j) as usize + 1;
            let final_branch = extract_branch(&tree, v_index, m, len, params)?;
            for (i, label) in final_branch.iter().enumerate() {
                let expected = if i == 0 {
                    if j == 0 {
                        QRat::one()
                    } else {
                        QRat::new(w[j as usize - 1].clone(), w[j as usize].clone())
                    }
                } else {
                    final_branch_element(i, &w[j as usize])
                };
                report.check(
                    label.equiv(&expected),
                    format!("final branch of vertex {v_index}, element {i}"),
                    &expected,
                    label,
                );
            }
            let one_over = QRat::new(QPoly::one(), QPoly::geometric(2));
            for pos in 1..=m - 2 {
                let branch = extract_branch(&tree, v_index, pos, len, params)?;
                for (i, label) in branch.iter().enumerate().skip(1) {
                    report.check(
                        label.equiv(&one_over),
                        format!("branch {pos} of vertex {v_index}, element {i}"),
                        &one_over,
                        label,
                    );
                }
            }
        }
    }

    let mut prev = ratio_label(0, params);
    for j in 1..=j_max {
        let index = u64::from(m)
            .checked_pow(j)
            .and_then(|x| x.checked_sub(1))
            .filter(|&x| i64::try_from(x).is_ok())
            .ok_or_else(|| {
                BranchError::Tree(TreeError::InvalidParams(format!(
                    "m^{j} - 1 exceeds the supported index range"
                )))
            })?;
        let cur = ratio_label(index, params);
        // 1/(1 + q*prev) = prev.den / (prev.den + q*prev.num)
        let expected = QRat::new(prev.den().clone(), prev.den() + &prev.num().mul_q_power(1));
        report.check(
            cur.equiv(&expected),
            format!("ratio recurrence at index m^{j}-1 = {index}"),
            &expected,
            &cur,
        );
        prev = cur;
    }

    Ok(report)
}
