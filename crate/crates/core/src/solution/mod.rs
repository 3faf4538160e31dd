//! The explicit solution `φ_∞` of `Dφ = 0` with initial values
//! `φ(0, s) = Σ_{|I| = s} e_I ζ_{0,I}`, and its verification both on whole
//! elements and through the pairing with `V`.

mod lemma;

pub use lemma::{lemma_mk_terms, verify_lemma_aggregation, MkTerms};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::combinatorics::{
    coeff_a, enumerate_t, enumerate_t_with, enumerate_tr, sign_e, subsets, RowFill, TTriple,
};
use crate::error::{Error, Result};
use crate::operators::{
    delta_star, nabla_star, op_theta, Operators, PairingTable, PhiTable, VBasisVector,
};
use crate::par;
use crate::report::{Check, Report};
use crate::ring::{Element, Monomial, ScalarField, Sign, TruncationParams};

/// `Σ_{I ⊆ {1..n}, |I| = s} e_I ζ_{0,I}`.
pub fn phi_initial(s: i64, params: TruncationParams) -> Element {
    let mut out = Element::zero(params, ScalarField::Rational);
    if s < 0 {
        return out;
    }
    for set in subsets(params.n, s as u32) {
        let zeta = set.iter().map(|&l| (0, l)).collect();
        out.accumulate(
            Monomial::e(&set).with_sorted_zeta(zeta),
            BigRational::one(),
        );
    }
    out
}

/// The contribution of one `(j, s, i) ∈ T(r, s)`:
/// `a(j, s) Σ_{ī} j_ī θ_ī^{-1} θ^j e_{i,ī} h^{[j]} ζ_{s,i}`.
pub fn phi_summand(r: u32, t: &TTriple, params: TruncationParams) -> Element {
    let mut out = Element::zero(params, ScalarField::Rational);
    let base = coeff_a(&t.j, &t.s) * t.j.divided_power_factor();
    let lower = t.i.flat();
    let zeta = t.i.zeta();
    for upper in enumerate_tr(r, &t.j) {
        let Some((sign, set)) = sign_e(&lower, upper.entries()) else {
            continue;
        };
        let weight = BigRational::from_integer(BigInt::from(t.j.weight_at(&upper)));
        let mono = Monomial::one()
            .with_theta(t.j.theta_exps())
            .with_theta(upper.inverse_theta_exps())
            .with_e(&set)
            .with_h(t.j.h_exps())
            .with_sorted_zeta(zeta.clone());
        out.accumulate_signed(sign, mono, &base * weight);
    }
    out
}

/// `φ_∞(r, s)` in `B(n, K, m)` over `Q`; zero when `r < 0` or `s < 0`.
pub fn phi_infinity(r: i64, s: i64, params: TruncationParams) -> Result<Element> {
    if r < 0 || s < 0 {
        return Ok(Element::zero(params, ScalarField::Rational));
    }
    if r > i64::from(params.k) {
        return Err(Error::RowsTooFew { r, max_row: params.k });
    }
    let triples = enumerate_t(r as u32, s as u32, &params);
    let parts = par::map(&triples, |t| phi_summand(r as u32, t, params));
    Ok(Element::sum(params, ScalarField::Rational, &parts))
}

/// All cells `0 <= r <= max_r`, `0 <= s <= max_s` of `φ_∞`.
pub fn phi_table(max_r: u32, max_s: u32, params: TruncationParams) -> Result<PhiTable> {
    let cells: Vec<(i64, i64)> = (0..=max_r as i64)
        .flat_map(|r| (0..=max_s as i64).map(move |s| (r, s)))
        .collect();
    let values = par::map(&cells, |&(r, s)| phi_infinity(r, s, params));
    let mut table = PhiTable::new(params, ScalarField::Rational);
    for (&(r, s), v) in cells.iter().zip(values) {
        table.insert(r, s, v?)?;
    }
    Ok(table)
}

/// Checks `∇φ(r, s) + (−1)^{s+1} Σ_k (−1)^k δ_k φ(r−1, s+1) = Θφ(r, s+1)`
/// for `0 <= r <= max_r`, `−1 <= s <= max_s`.
pub fn verify_theorem(max_r: u32, max_s: u32, params: TruncationParams) -> Result<Report> {
    let table = phi_table(max_r, max_s + 1, params)?;
    verify_table(&table, max_r, max_s)
}

/// The theorem's identity on an arbitrary table (over `Q` or `F_p`), each
/// cell checked on whole elements (`element`) and against every basis vector
/// of `V` through the adjoints (`pairing`).
pub fn verify_table(table: &PhiTable, max_r: u32, max_s: u32) -> Result<Report> {
    let ops = Operators::new(table.params(), table.field());
    let cells: Vec<(i64, i64)> = (0..=max_r as i64)
        .flat_map(|r| (-1..=max_s as i64).map(move |s| (r, s)))
        .collect();
    let results = par::map(&cells, |&(r, s)| verify_cell(&ops, table, r, s));
    let mut report = Report::new(table.params());
    for checks in results {
        for c in checks? {
            report.push(c);
        }
    }
    Ok(report)
}

/// The `element` and `pairing` checks of one cell `(r, s)`, i.e. of
/// `D(φ)(r, s+1) = 0`.
pub fn verify_cell(ops: &Operators, table: &PhiTable, r: i64, s: i64) -> Result<Vec<Check>> {
    let params = table.params();
    let field = table.field();
    let residual = ops.big_d(table, r, s + 1)?;
    let element = Check::from_residual(r, s, "element", &residual);

    let current = PairingTable::new(&table.get(r, s)?);
    let previous = PairingTable::new(&table.get(r - 1, s + 1)?);
    let target = PairingTable::new(&op_theta(&table.get(r, s + 1)?));
    let sign = Sign::of_power(s + 1);
    let mut failure: Option<(VBasisVector, Element)> = None;
    for t in enumerate_t_with(r as u32, (s + 1) as u32, &params, RowFill::Any) {
        let v = VBasisVector::new(t.j, t.i);
        let mut lhs = current.pair(&nabla_star(&v, params, field));
        for k in 0..=r as u32 {
            let term = previous.pair(&delta_star(k, &v, params, field));
            if sign * Sign::of_power(i64::from(k)) == Sign::Plus {
                lhs += &term;
            } else {
                lhs -= &term;
            }
        }
        let diff = &lhs - &target.pair_basis(&v);
        if !diff.is_zero() {
            failure = Some((v, diff));
            break;
        }
    }
    let pairing = match failure {
        None => Check::new(r, s, "pairing", true),
        Some((v, diff)) => Check::new(r, s, "pairing", false).with_residual(serde_json::json!({
            "vector": format!("{v:?}"),
            "difference": diff.to_json(),
        })),
    };
    Ok(vec![element, pairing])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_text;

    fn params(n: u32, k: u32, m: u32) -> TruncationParams {
        TruncationParams::new(n, k, m).unwrap()
    }

    #[test]
    fn initial_values() {
        let p = params(2, 1, 4);
        let q = ScalarField::Rational;
        assert_eq!(phi_initial(0, p), parse_text("e{}", p, q).unwrap());
        assert_eq!(
            phi_initial(1, p),
            parse_text("e{1}·z[0,1] + e{2}·z[0,2]", p, q).unwrap()
        );
        assert!(phi_initial(3, p).is_zero());
        let p = params(3, 1, 5);
        for s in 0..=3 {
            assert_eq!(phi_infinity(0, s, p).unwrap(), phi_initial(s, p));
        }
    }

    #[test]
    fn first_row_closed_form() {
        let p = params(1, 1, 4);
        let want = parse_text(
            "e{1}·h[1,1] + 1/2·th1·e{1}·h[1,1]^2 + 1/6·th1^2·e{1}·h[1,1]^3",
            p,
            ScalarField::Rational,
        )
        .unwrap();
        assert_eq!(phi_infinity(1, 0, p).unwrap(), want);
        assert!(phi_infinity(-1, 0, p).unwrap().is_zero());
        assert!(phi_infinity(0, -2, p).unwrap().is_zero());
        assert!(matches!(phi_infinity(2, 0, p), Err(Error::RowsTooFew { .. })));
    }

    #[test]
    fn theorem_small() {
        let report = verify_theorem(2, 2, params(2, 2, 5)).unwrap();
        assert!(report.all_pass(), "{}", report.to_json_string());
        assert_eq!(report.checks.len(), 3 * 4 * 2);
    }

    #[test]
    fn corrupted_table_fails() {
        let p = params(2, 1, 4);
        let mut table = phi_table(1, 2, p).unwrap();
        let mut bad = table.get(1, 1).unwrap();
        let (mono, c) = bad.terms().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        bad += &Element::term(mono, c, p, ScalarField::Rational).unwrap();
        table.insert(1, 1, bad).unwrap();
        let report = verify_table(&table, 1, 0).unwrap();
        assert!(!report.all_pass());
        let failed: Vec<_> = report.failures().map(|c| (c.r.unwrap(), c.s.unwrap(), c.check.as_str())).collect();
        assert!(failed.contains(&(1, 0, "element")));
        assert!(failed.contains(&(1, 0, "pairing")));
        assert!(report.failures().all(|c| c.residual.is_some()));
    }

    #[test]
    fn structure_of_phi() {
        let p = params(2, 2, 5);
        for r in 0..=2 {
            for s in 0..=2 {
                let phi = phi_infinity(r, s, p).unwrap();
                for (mono, _) in phi.terms() {
                    assert!(mono.theta_exps().iter().all(|&(_, e)| e >= 0));
                    assert_eq!(mono.zeta_degree() as i64, s);
                    assert_eq!(mono.e_set().map(|e| e.len() as i64), Some(r + s));
                }
                assert_eq!(phi, phi_infinity(r, s, p).unwrap());
            }
        }
    }
}
