//! Exact arithmetic for hyper m-expansion weight polynomials and the
//! generalized q-Calkin-Wilf trees they label.
//!
//! The crate is organized around a chain of mutually checking routes:
//!
//! - [`qpoly`]: dense integer polynomials in `q`, their un-reduced ratios,
//!   and exact rational evaluation;
//! - [`expansions`]: enumeration of hyper m-expansions with the heavy-use
//!   statistic (the oracle `g`) against the base-`m` recurrence `f`;
//! - [`classic`]: Stern's diatomic sequence, the Newman iteration, and the
//!   Dilcher-Stolarsky polynomials anchoring the `m = 2` specialization;
//! - [`cwtree`]: the three structural tree families and the ratio oracle
//!   for their vertex labels;
//! - [`branches`]: branch extraction and the Chebyshev closed forms;
//! - [`density`]: the constructive q = 1 search with replay verification;
//! - [`report`]: the report type every `verify_*` sweep produces.

pub mod branches;
pub mod classic;
pub mod cwtree;
pub mod density;
pub mod expansions;
pub mod qpoly;
pub mod report;

pub use branches::{
    branch_poly_w, chebyshev_u, extract_branch, verify_branch_theorems, BranchError, ChebyPoly,
};
pub use classic::{dilcher_stolarsky, newman_seq, stern, verify_classic};
pub use cwtree::{
    build_tree, child_label, ratio_label, root_label, verify_tree_vs_ratio, NodeLookup, RootMode,
    TreeError, TreeFamily, TreeNode, TreeParams, DEFAULT_DEPTH_GUARD,
};
pub use density::{
    fib, fib_entry_point, find_path, replay_path, verify_density, DensityError, Fraction, Path,
};
pub use expansions::{
    enumerate_expansions, f_poly, g_poly, hyper_weight, verify_f_equals_g, Expansion, HyperParams,
    InvalidHyperParams,
};
pub use qpoly::{format_rational, EvalError, QPoly, QRat, Rational};
pub use report::{Failure, VerifyReport};
