use rand::rngs::StdRng;
use rand::SeedableRng;

use super::{delta_star, nabla_star, op_nabla, op_theta, Operators, PairingTable, VBasisVector};
use crate::combinatorics::{enumerate_t_with, RowFill};
use crate::error::Result;
use crate::report::{Check, Report};
use crate::ring::random::{random_element, RandomShape};
use crate::ring::{Element, ScalarField, TruncationParams};

/// Every basis vector `h^{[j]} ζ_{s,i}` of `V` inside `B(n, K, m)`.
pub fn v_basis(params: &TruncationParams) -> Vec<VBasisVector> {
    (0..params.m)
        .flat_map(|s| enumerate_t_with(params.k, s, params, RowFill::Any))
        .map(|t| VBasisVector::new(t.j, t.i))
        .collect()
}

fn first_failure(name: &str, failure: Option<serde_json::Value>) -> Check {
    match failure {
        None => Check::global(name, true),
        Some(w) => Check::global(name, false).with_residual(w),
    }
}

/// `∇² = 0` and `Θ² = 0` on `samples` seeded random elements, and
/// `⟨∇b, v⟩ = ⟨b, ∇*v⟩`, `⟨δ_k b, v⟩ = ⟨b, δ*_k v⟩` for every basis vector
/// `v` and `k = 0..=K`. For `δ_k` the random `b` avoid row `K`, where the
/// shift would leave the truncation.
pub fn verify_operators(params: TruncationParams, samples: usize, seed: u64) -> Result<Report> {
    let field = ScalarField::Rational;
    let ops = Operators::new(params, field);
    let mut rng = StdRng::seed_from_u64(seed);
    let shape = RandomShape::for_params(&params);
    let low = RandomShape {
        max_row: params.k - 1,
        ..shape
    };
    let elements: Vec<Element> = (0..samples)
        .map(|_| random_element(&mut rng, params, field, &shape))
        .collect();
    let low_elements: Vec<Element> = (0..samples)
        .map(|_| random_element(&mut rng, params, field, &low))
        .collect();

    let witness = |x: &Element, r: &Element| {
        serde_json::json!({ "input": x.to_json(), "result": r.to_json() })
    };
    let nabla2 = crate::par::map(&elements, |x| {
        let y = op_nabla(&op_nabla(x));
        (!y.is_zero()).then(|| witness(x, &y))
    });
    let theta2 = crate::par::map(&elements, |x| {
        let y = op_theta(&op_theta(x));
        (!y.is_zero()).then(|| witness(x, &y))
    });
    let mut report = Report::new(params);
    report.push(first_failure("nabla_squared", nabla2.into_iter().flatten().next()));
    report.push(first_failure("theta_squared", theta2.into_iter().flatten().next()));

    let basis = v_basis(&params);
    let adjoint = |b: &Element| -> Option<serde_json::Value> {
        let image = PairingTable::new(&op_nabla(b));
        let source = PairingTable::new(b);
        basis
            .iter()
            .find(|v| image.pair_basis(v) != source.pair(&nabla_star(v, params, field)))
            .map(|v| serde_json::json!({ "input": b.to_json(), "vector": format!("{v:?}") }))
    };
    let failures = crate::par::map(&elements, adjoint);
    report.push(first_failure("nabla_adjoint", failures.into_iter().flatten().next()));

    for k in 0..=params.k {
        let failures = crate::par::map(&low_elements, |b| -> Result<Option<serde_json::Value>> {
            let image = PairingTable::new(&ops.delta(k, b)?);
            let source = PairingTable::new(b);
            Ok(basis
                .iter()
                .find(|v| image.pair_basis(v) != source.pair(&delta_star(k, v, params, field)))
                .map(|v| serde_json::json!({ "input": b.to_json(), "vector": format!("{v:?}") })))
        });
        let mut first = None;
        for f in failures {
            if let Some(w) = f? {
                first.get_or_insert(w);
            }
        }
        report.push(first_failure(&format!("delta_adjoint_{k}"), first));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_small() {
        let p = TruncationParams::new(2, 2, 3).unwrap();
        let report = verify_operators(p, 20, 1).unwrap();
        assert!(report.all_pass(), "{}", report.to_json_string());
        assert_eq!(report.checks.len(), 6);
        assert_eq!(v_basis(&p).len(), 60);
    }
}
