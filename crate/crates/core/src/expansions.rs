//! Hyper m-expansions and their weight polynomials.
//!
//! An expansion of `n` (for fixed parameters `m >= 2`, `0 <= c <= m-1`) is a
//! partition of `n` into powers of `m` in which each power appears either at
//! most `m-1` times or exactly `m+c` times. Two routes compute the weight
//! polynomial:
//!
//! - [`g_poly`] sums `q^h` over the full enumeration, where the statistic
//!   `h` counts the powers used exactly `m+c` times — the independent oracle;
//! - [`f_poly`] evaluates the base-`m` recurrence
//!   `f(m*k + c) = f(k) + q*f(k-1)`, `f(m*k + j) = f(k)` for `j != c`,
//!   with `f(0) = 1` and `f(d) = 0` for `d < 0`.
//!
//! [`verify_f_equals_g`] checks the two routes against each other over a
//! range of `n`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use thiserror::Error;

use crate::qpoly::QPoly;
use crate::report::VerifyReport;

/// Parameter validation error for [`HyperParams`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid parameters: require m >= 2 and 0 <= c <= m-1, got m={m}, c={c}")]
pub struct InvalidHyperParams {
    pub m: u32,
    pub c: u32,
}

/// The pair `(m, c)` with `m >= 2` and `0 <= c <= m-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HyperParams {
    m: u32,
    c: u32,
}

impl HyperParams {
    pub fn new(m: u32, c: u32) -> Result<Self, InvalidHyperParams> {
        if m < 2 || c > m - 1 {
            return Err(InvalidHyperParams { m, c });
        }
        Ok(HyperParams { m, c })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    /// The distinguished multiplicity `m + c`.
    pub fn heavy_mult(&self) -> u32 {
        self.m + self.c
    }

    /// The admissible multiplicity set `{0, 1, ..., m-1, m+c}`.
    pub fn allows(&self, mult: u32) -> bool {
        mult < self.m || mult == self.heavy_mult()
    }
}

/// One expansion: a map from exponent `e` to the multiplicity of the part
/// `m^e`. Only nonzero multiplicities are stored, each admissible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    mult: BTreeMap<u32, u32>,
}

impl Expansion {
    /// Exponent-to-multiplicity map (ascending exponent).
    pub fn multiplicities(&self) -> &BTreeMap<u32, u32> {
        &self.mult
    }

    /// The integer this expansion partitions.
    pub fn value(&self, m: u32) -> BigInt {
        let base = BigInt::from(m);
        self.mult
            .iter()
            .map(|(&e, &k)| base.pow(e) * BigInt::from(k))
            .sum()
    }

    /// The statistic `h`: how many powers appear exactly `m + c` times.
    pub fn weight(&self, params: &HyperParams) -> u32 {
        let heavy = params.heavy_mult();
        self.mult.values().filter(|&&k| k == heavy).count() as u32
    }

    /// Renders the expansion as summed parts, largest power first, e.g.
    /// `27 + 9x2 + 1x2` for the map `{3: 1, 2: 2, 0: 2}` with `m = 3`.
    pub fn render(&self, m: u32) -> String {
        if self.mult.is_empty() {
            return "0".to_string();
        }
        let base = BigInt::from(m);
        self.mult
            .iter()
            .rev()
            .map(|(&e, &k)| {
                let part = base.pow(e);
                if k == 1 {
                    part.to_string()
                } else {
                    format!("{part}x{k}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// The statistic `h` for one expansion (count of powers used `m+c` times).
pub fn hyper_weight(x: &Expansion, params: &HyperParams) -> u32 {
    x.weight(params)
}

/// Runs `visit` once per expansion of `n`, in decreasing lexicographic order
/// of multiplicity tuples read over descending exponents. The visited slice
/// holds `(exponent, multiplicity)` pairs with nonzero multiplicities; the
/// second argument is the statistic `h`.
fn enumerate_with<F: FnMut(&[(u32, u32)], u32)>(n: u64, params: &HyperParams, visit: &mut F) {
    if n == 0 {
        visit(&[], 0);
        return;
    }
    let m = u64::from(params.m);
    let mut top = 0u32;
    let mut power = 1u64;
    while power <= n / m {
        power *= m;
        top += 1;
    }
    // powers[e] = m^e for e = 0..=top.
    let mut powers = Vec::with_capacity(top as usize + 1);
    let mut p = 1u64;
    for _ in 0..=top {
        powers.push(p);
        p = p.saturating_mul(m);
    }
    let mut stack: Vec<(u32, u32)> = Vec::with_capacity(top as usize + 1);
    descend(top as i64, n, params, &powers, &mut stack, 0, visit);
}

fn descend<F: FnMut(&[(u32, u32)], u32)>(
    e: i64,
    residual: u64,
    params: &HyperParams,
    powers: &[u64],
    stack: &mut Vec<(u32, u32)>,
    h: u32,
    visit: &mut F,
) {
    if e < 0 {
        if residual == 0 {
            visit(stack, h);
        }
        return;
    }
    // Remaining capacity with every exponent <= e at the heavy multiplicity:
    // (m+c) * (m^{e+1} - 1) / (m - 1).
    let m = u128::from(params.m);
    let cap = u128::from(params.heavy_mult()) * (u128::from(powers[e as usize]) * m - 1) / (m - 1);
    if u128::from(residual) > cap {
        return;
    }
    let pe = powers[e as usize];
    let heavy = params.heavy_mult();
    let mults = std::iter::once(heavy).chain((0..params.m).rev());
    for j in mults {
        let used = u64::from(j) * pe;
        if used > residual {
            continue;
        }
        if j > 0 {
            stack.push((e as u32, j));
        }
        let h_next = if j == heavy { h + 1 } else { h };
        descend(e - 1, residual - used, params, powers, stack, h_next, visit);
        if j > 0 {
            stack.pop();
        }
    }
}

/// The complete, duplicate-free list of expansions of `n`.
///
/// `n = 0` yields the single empty expansion. Output order is deterministic:
/// decreasing lexicographic order of multiplicity tuples over descending
/// exponents (largest admissible multiplicity of the largest power first).
pub fn enumerate_expansions(n: u64, params: &HyperParams) -> Vec<Expansion> {
    let mut out = Vec::new();
    enumerate_with(n, params, &mut |parts, _| {
        out.push(Expansion {
            mult: parts.iter().copied().collect(),
        });
    });
    out
}

/// The weight polynomial by full enumeration: `sum over expansions of q^h`.
///
/// `g(0) = 1`; `g(n) = 0` for `n < 0`.
pub fn g_poly(n: i64, params: &HyperParams) -> QPoly {
    if n < 0 {
        return QPoly::zero();
    }
    let mut coeffs: Vec<BigInt> = Vec::new();
    enumerate_with(n as u64, params, &mut |_, h| {
        let h = h as usize;
        if coeffs.len() <= h {
            coeffs.resize(h + 1, BigInt::from(0));
        }
        coeffs[h] += 1u32;
    });
    QPoly::new(coeffs)
}

thread_local! {
    static F_MEMO: RefCell<HashMap<(u32, u32, i64), QPoly>> = RefCell::new(HashMap::new());
}

/// The weight polynomial by the base-`m` recurrence, memoized per `(m, c, n)`.
///
/// `f(0) = 1`; `f(n) = 0` for `n < 0`; for `n = m*k + j` with `j != c` the
/// value is `f(k)`, and `f(m*k + c) = f(k) + q*f(k-1)`.
pub fn f_poly(n: i64, params: &HyperParams) -> QPoly {
    if n < 0 {
        return QPoly::zero();
    }
    if n == 0 {
        return QPoly::one();
    }
    let key = (params.m, params.c, n);
    if let Some(hit) = F_MEMO.with(|memo| memo.borrow().get(&key).cloned()) {
        return hit;
    }
    let m = i64::from(params.m);
    let k = n / m;
    let j = n % m;
    let value = if j == i64::from(params.c) {
        &f_poly(k, params) + &f_poly(k - 1, params).mul_q_power(1)
    } else {
        f_poly(k, params)
    };
    F_MEMO.with(|memo| memo.borrow_mut().insert(key, value.clone()));
    value
}

/// Checks `f_poly(n) == g_poly(n)` as canonical polynomials for all
/// `0 <= n <= n_max`, computing the two sides independently.
pub fn verify_f_equals_g(params: &HyperParams, n_max: i64) -> VerifyReport {
    let mut report = VerifyReport::new(
        "recurrence-vs-enumeration",
        format!("m={} c={} n=0..={}", params.m, params.c, n_max),
    );
    for n in 0..=n_max {
        let f = f_poly(n, params);
        let g = g_poly(n, params);
        report.check(f == g, format!("n={n}"), g.to_string(), f.to_string());
    }
    if params.m == 3 && params.c == 2 && n_max >= 47 {
        report.note(
            "n=47: the multiplicity set {0,1,2,5} admits exactly 4 expansions \
             (27 + 9x2 + 1x2; 27 + 9 + 3x2 + 1x5; 27 + 3x5 + 1x5; 9x5 + 1x2) with weights \
             summing to 1 + 2q + q^2; near-variants that use a power six times are \
             inadmissible (multiplicity 6 is not in the set) and would sum to 48 or 56, \
             not 47",
        );
    }
    report
}
