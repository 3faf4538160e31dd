use std::collections::BTreeMap;

use hdr_core::operators::{delta_star, nabla_star, VBasisVector};
use hdr_core::oracle::{adjoint_via_linear_solve, AdjointMatrix, AdjointOf};
use hdr_core::ring::{Element, ScalarField, TruncationParams};

fn closed_form(op: AdjointOf, oracle: &AdjointMatrix, params: TruncationParams) -> AdjointMatrix {
    let q = ScalarField::Rational;
    let domain = match op {
        AdjointOf::Nabla => params,
        AdjointOf::Delta(_) => params.with_k(params.k - 1).unwrap(),
    };
    oracle
        .keys()
        .map(|v| {
            let comb = match op {
                AdjointOf::Nabla => nabla_star(v, params, q),
                AdjointOf::Delta(k) => delta_star(k, v, params, q),
            };
            let column: BTreeMap<VBasisVector, Element> = comb
                .terms()
                .filter(|(w, _)| w.fits(&domain))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect();
            (v.clone(), column)
        })
        .collect()
}

fn check(op: AdjointOf, params: TruncationParams) {
    let oracle = adjoint_via_linear_solve(op, params).unwrap();
    assert!(!oracle.is_empty());
    let closed = closed_form(op, &oracle, params);
    for (v, column) in &oracle {
        assert_eq!(column, &closed[v], "{op:?} at {v:?}");
    }
}

#[test]
fn nabla_adjoint_matches_linear_solve() {
    check(AdjointOf::Nabla, TruncationParams::new(2, 2, 3).unwrap());
}

#[test]
fn delta_adjoints_match_linear_solve() {
    let p = TruncationParams::new(2, 2, 3).unwrap();
    for k in 0..=2 {
        check(AdjointOf::Delta(k), p);
    }
}

#[test]
fn oracle_columns_are_populated() {
    let p = TruncationParams::new(2, 2, 4).unwrap();
    let oracle = adjoint_via_linear_solve(AdjointOf::Nabla, p).unwrap();
    let entries: usize = oracle.values().map(|c| c.len()).sum();
    let with_theta = oracle
        .values()
        .flat_map(|c| c.values())
        .filter(|e| e.terms().any(|(m, _)| !m.theta_exps().is_empty()))
        .count();
    eprintln!("vectors {} entries {} theta {}", oracle.len(), entries, with_theta);
    assert!(entries > oracle.len() && with_theta > 0);
    check(AdjointOf::Nabla, p);
    check(AdjointOf::Delta(0), p);
}
