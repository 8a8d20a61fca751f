//! Cross-module identity sweeps: the enumeration oracle against the
//! recurrence over the full parameter grid, tree labels against the ratio
//! oracle, branch closed forms, density replay, and reconstruction of chain
//! rules from serialized ancestor chains alone.

use std::collections::HashMap;

use qcw_core::{
    build_tree, child_label, dilcher_stolarsky, f_poly, ratio_label, verify_branch_theorems,
    verify_density, verify_f_equals_g, verify_tree_vs_ratio, HyperParams, RootMode, TreeParams,
};

#[test]
fn recurrence_equals_enumeration_across_the_grid() {
    for m in 2..=5u32 {
        for c in 0..m {
            let params = HyperParams::new(m, c).unwrap();
            let report = verify_f_equals_g(&params, 300);
            assert!(report.passed(), "m={m} c={c}: {report}");
        }
    }
}

#[test]
fn binary_weight_polynomials_alias_the_classical_family() {
    let params = HyperParams::new(2, 0).unwrap();
    for n in 0..=500i64 {
        assert_eq!(f_poly(n, &params), dilcher_stolarsky(n as u64 + 1), "n={n}");
    }
}

#[test]
fn tree_labels_match_the_ratio_oracle_at_depth_four() {
    let params = TreeParams::new(3, 2, RootMode::Definition).unwrap();
    let report = verify_tree_vs_ratio(&params, 4).unwrap();
    assert_eq!(report.checks, 121);
    assert!(report.passed(), "{report}");

    let theorem = TreeParams::new(3, 0, RootMode::Theorem).unwrap();
    let report = verify_tree_vs_ratio(&theorem, 3).unwrap();
    assert!(report.passed(), "{report}");

    let definition = TreeParams::new(3, 0, RootMode::Definition).unwrap();
    let report = verify_tree_vs_ratio(&definition, 3).unwrap();
    assert!(!report.passed());
}

#[test]
fn branch_closed_forms_hold_at_depth_four() {
    for (m, c) in [(3, 2), (4, 3), (2, 1)] {
        let params = TreeParams::new(m, c, RootMode::Definition).unwrap();
        let report = verify_branch_theorems(&params, 4).unwrap();
        assert!(report.passed(), "m={m} c={c}: {report}");
    }
}

#[test]
fn density_replays_exactly_at_bound_25() {
    let cases = [
        (3, 2),
        (4, 3),
        (5, 4),
        (2, 0),
        (3, 0),
        (4, 0),
        (3, 1),
        (4, 2),
        (5, 2),
    ];
    for (m, c) in cases {
        let params = TreeParams::new(m, c, RootMode::Definition).unwrap();
        let report = verify_density(&params, 25).unwrap();
        assert!(report.passed(), "m={m} c={c}: {report}");
    }
}

/// The chain rules consult ancestors only (for m >= 3): rebuilding a child
/// label from a context holding nothing but the ancestor chain gives the
/// same result as the full breadth-first prefix.
#[test]
fn chain_rules_reconstruct_from_ancestors_alone() {
    for (m, c, mode) in [
        (3, 2, RootMode::Definition),
        (4, 3, RootMode::Definition),
        (3, 0, RootMode::Definition),
        (3, 0, RootMode::Theorem),
    ] {
        let params = TreeParams::new(m, c, mode).unwrap();
        let nodes = build_tree(&params, 4).unwrap();
        for index in [5u64, 20, 37, (nodes.len() as u64 - 1) / 2] {
            let mut sparse: HashMap<u64, qcw_core::TreeNode> = HashMap::new();
            let mut cursor = Some(index);
            while let Some(i) = cursor {
                let node = nodes[i as usize].clone();
                cursor = node.parent;
                sparse.insert(i, node);
            }
            for k in 1..=m {
                let from_chain = child_label(&sparse, index, k, &params).unwrap();
                let from_tree = child_label(&nodes[..], index, k, &params).unwrap();
                assert!(
                    from_chain.equiv(&from_tree),
                    "m={m} c={c} mode={mode:?} vertex={index} child={k}"
                );
            }
        }
    }
}

/// Middle-family child labels depend on the parent alone: a context holding
/// only the parent vertex suffices.
#[test]
fn middle_family_children_are_local() {
    let params = TreeParams::new(4, 2, RootMode::Definition).unwrap();
    let nodes = build_tree(&params, 3).unwrap();
    for index in [0u64, 3, 17, 40] {
        let mut lone: HashMap<u64, qcw_core::TreeNode> = HashMap::new();
        lone.insert(index, nodes[index as usize].clone());
        for k in 1..=4 {
            let local = child_label(&lone, index, k, &params).unwrap();
            let full = child_label(&nodes[..], index, k, &params).unwrap();
            assert!(local.equiv(&full), "vertex={index} child={k}");
        }
    }
}

/// The order-2 tree realizes its ratio sequence once the sibling factor is
/// in play; the structural labels equal f(2n)/f(2n+1) vertex by vertex.
#[test]
fn order_two_labels_are_consecutive_weight_quotients() {
    let params = TreeParams::new(2, 1, RootMode::Definition).unwrap();
    let nodes = build_tree(&params, 6).unwrap();
    for node in &nodes {
        let expected = ratio_label(node.index, &params);
        assert!(
            node.label.equiv(&expected),
            "vertex {}: {} vs {}",
            node.index,
            node.label,
            expected
        );
    }
}
