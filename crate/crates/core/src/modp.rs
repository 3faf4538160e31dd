//! The characteristic-`p` shadow of `φ_∞`: integrality of the truncation
//! at `m = p`, reduction to `F_p`, the identity over `F_p`, and the
//! regrouped coefficients `a'` of the symmetric closed form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{all_upper, sign_e, subsets, weak_compositions, IndexSeq, SVector};
use crate::error::{Error, Result};
use crate::operators::PhiTable;
use crate::par;
use crate::report::{Check, Report};
use crate::ring::{factorial, is_p_integral, Element, Monomial, ScalarField, TruncationParams};
use crate::solution::{phi_infinity, phi_table, verify_table};

/// Outcome of an integrality scan: the monomials whose coefficient has a
/// denominator divisible by `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Integrality {
    pub prime: u64,
    pub offending: Vec<(String, String)>,
}

impl Integrality {
    pub fn is_integral(&self) -> bool {
        self.offending.is_empty()
    }
}

pub fn check_p_integrality(e: &Element, p: u64) -> Integrality {
    Integrality {
        prime: p,
        offending: e
            .terms()
            .filter(|(_, c)| !is_p_integral(c, p))
            .map(|(m, c)| (m.to_string(), c.to_string()))
            .collect(),
    }
}

/// Coefficient-wise image `a/b ↦ a·b^{-1} mod p` of an element over `Q`.
pub fn reduce_mod_p(e: &Element, p: u64) -> Result<Element> {
    let field = ScalarField::prime(p)?;
    match e.field() {
        ScalarField::Rational => {}
        f if f == field => return Ok(e.clone()),
        _ => return Err(Error::NotRational),
    }
    if u64::from(e.params().m) > p {
        return Err(Error::TruncationAbovePrime { prime: p, m: e.params().m });
    }
    e.with_field(field)
}

/// Builds `φ_p = φ_∞ mod 𝔟_p` reduced to `F_p` and checks the identity with
/// all arithmetic over `F_p`. Requires `m = p`.
pub fn verify_theorem_mod_p(p: u64, max_r: u32, max_s: u32, params: TruncationParams) -> Result<Report> {
    ScalarField::prime(p)?;
    if u64::from(params.m) != p {
        return Err(Error::InvalidParams(format!(
            "mod-{p} verification pins m = p, got m = {}",
            params.m
        )));
    }
    let table = phi_table(max_r, max_s + 1, params)?;
    let mut report = Report::new(params);
    let mut reduced = PhiTable::new(params, ScalarField::Prime(p));
    for (&(r, s), value) in table.cells() {
        let integrality = check_p_integrality(value, p);
        let mut check = Check::new(r, s, "integrality", integrality.is_integral()).with_prime(p);
        if !integrality.is_integral() {
            check = check.with_residual(serde_json::to_value(&integrality)?);
            report.push(check);
            return Ok(report);
        }
        report.push(check);
        reduced.insert(r, s, reduce_mod_p(value, p)?)?;
    }
    for c in verify_table(&reduced, max_r, max_s)?.checks {
        report.push(c.with_prime(p));
    }
    Ok(report)
}

/// One coefficient `a'(J, s)`. `J_k >= 1` is the full `h`-degree of row `k`
/// (the power of `Σ_l θ_l h_{k,l}` plus the `h_ī` factor).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegroupedEntry {
    pub j: Vec<u32>,
    pub s: Vec<u32>,
    pub coeff: String,
}

/// `φ_∞(r, s) = Σ_{s, J} a'(J, s) Π_k (Σ_l θ_l h_{k,l})^{[J_k − 1]} · Σ_{i, ī} e_{i,ī} ζ_{s,i} h_ī`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegroupedForm {
    pub r: u32,
    pub s: u32,
    pub params: TruncationParams,
    pub coefficients: BTreeMap<(Vec<u32>, SVector), BigRational>,
}

impl RegroupedForm {
    /// `Σ a'·(basis element)`, to compare against `φ_∞`.
    pub fn reassemble(&self) -> Element {
        let mut out = Element::zero(self.params, ScalarField::Rational);
        for ((j, sv), c) in &self.coefficients {
            out += &regroup_basis(self.r, j, sv, self.params).scale(c);
        }
        out
    }

    /// Whether every `a'` with `s + Σ J < p` is `p`-integral.
    pub fn integral_at(&self, p: u64) -> bool {
        self.coefficients
            .iter()
            .filter(|((j, _), _)| u64::from(self.s + j.iter().sum::<u32>()) < p)
            .all(|(_, c)| is_p_integral(c, p))
    }

    pub fn get(&self, j: &[u32], s: &SVector) -> Option<&BigRational> {
        self.coefficients.get(&(j.to_vec(), s.clone()))
    }

    pub fn entries(&self) -> Vec<RegroupedEntry> {
        self.coefficients
            .iter()
            .map(|((j, sv), c)| RegroupedEntry {
                j: j.clone(),
                s: sv.values().to_vec(),
                coeff: c.to_string(),
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "r": self.r,
            "s": self.s,
            "params": self.params,
            "entries": self.entries(),
        })
    }
}

/// `Π_k (Σ_l θ_l h_{k,l})^{[J_k − 1]} · Σ_{i, ī} e_{i,ī} ζ_{s,i} h_ī`.
pub fn regroup_basis(r: u32, j: &[u32], sv: &SVector, params: TruncationParams) -> Element {
    let q = ScalarField::Rational;
    let mut out = Element::one(params, q);
    for (idx, &jk) in j.iter().enumerate() {
        let k = idx as u32 + 1;
        let mut linear = Element::zero(params, q);
        for l in 1..=params.n {
            linear.accumulate(Monomial::theta(l, 1).with_h([((k, l), 1)]), BigRational::one());
        }
        let mut power = Element::one(params, q);
        for _ in 1..jk {
            power = &power * &linear;
        }
        out = &out * &power.scale(&BigRational::new(BigInt::one(), factorial(jk - 1)));
    }
    let mut symmetric = Element::zero(params, q);
    let mut seqs: Vec<Vec<(u32, Vec<u32>)>> = vec![vec![]];
    for (row, &count) in sv.values().iter().enumerate() {
        if count == 0 {
            continue;
        }
        let choices = subsets(params.n, count);
        seqs = seqs
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push((row as u32, c.clone()));
                    p
                })
            })
            .collect();
    }
    let uppers = all_upper(r, params.n);
    for blocks in seqs {
        let seq = IndexSeq::from_blocks(blocks).expect("increasing blocks");
        let lower = seq.flat();
        for upper in &uppers {
            let Some((sign, set)) = sign_e(&lower, upper.entries()) else {
                continue;
            };
            let h = upper
                .entries()
                .iter()
                .enumerate()
                .map(|(idx, &i)| ((idx as u32 + 1, i), 1));
            let mono = Monomial::e(&set).with_h(h).with_sorted_zeta(seq.zeta());
            symmetric.accumulate_signed(sign, mono, BigRational::one());
        }
    }
    &out * &symmetric
}

/// Solves for `a'(J, s)` by matching `φ_∞(r, s)` against the regrouped
/// basis elements, then checks that the reassembly is exact.
pub fn extract_regrouped(r: u32, s: u32, params: TruncationParams) -> Result<RegroupedForm> {
    let phi = phi_infinity(i64::from(r), i64::from(s), params)?;
    if s >= params.m {
        return Ok(RegroupedForm { r, s, params, coefficients: BTreeMap::new() });
    }
    let budget = params.m - 1 - s;
    let mut keys: Vec<(Vec<u32>, SVector)> = Vec::new();
    for svals in weak_compositions(s, r as usize + 1) {
        let sv = SVector::new(svals);
        for extra in 0..=budget.saturating_sub(r) {
            if r == 0 && extra > 0 {
                break;
            }
            for comp in weak_compositions(extra, r as usize) {
                let j: Vec<u32> = comp.iter().map(|x| x + 1).collect();
                if s + j.iter().sum::<u32>() < params.m {
                    keys.push((j, sv.clone()));
                }
            }
        }
    }
    let solved = par::map(&keys, |(j, sv)| {
        let basis = regroup_basis(r, j, sv, params);
        let pivot = basis.terms().next().map(|(m, c)| (m.clone(), c.clone()));
        pivot.map(|(m, c)| phi.coeff(&m) / c)
    });
    let coefficients: BTreeMap<(Vec<u32>, SVector), BigRational> = keys
        .into_iter()
        .zip(solved)
        .filter_map(|(key, c)| c.filter(|c| !c.is_zero()).map(|c| (key, c)))
        .collect();
    let form = RegroupedForm { r, s, params, coefficients };
    let diff = &form.reassemble() - &phi;
    if let Some((witness, _)) = diff.terms().next() {
        return Err(Error::RegroupInconsistent { witness: witness.to_string() });
    }
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_text;

    fn params(n: u32, k: u32, m: u32) -> TruncationParams {
        TruncationParams::new(n, k, m).unwrap()
    }

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn integrality_examples() {
        let p = params(1, 1, 3);
        let phi = phi_infinity(1, 0, p).unwrap();
        assert!(check_p_integrality(&phi, 3).is_integral());
        let big = params(1, 1, 4);
        let h3 = parse_text("1/6·h[1,1]^3", big, ScalarField::Rational).unwrap();
        assert!(!check_p_integrality(&h3, 3).is_integral());
        let t = parse_text("1/2·th1", p, ScalarField::Rational).unwrap();
        assert!(check_p_integrality(&t, 3).is_integral());
    }

    #[test]
    fn reduction_examples() {
        let p = params(1, 1, 3);
        let x = parse_text("1/2·h[1,1]^2", p, ScalarField::Rational).unwrap();
        let want = parse_text("2·h[1,1]^2", p, ScalarField::Prime(3)).unwrap();
        assert_eq!(reduce_mod_p(&x, 3).unwrap(), want);
        let x = parse_text("3·th1", p, ScalarField::Rational).unwrap();
        assert!(reduce_mod_p(&x, 3).unwrap().is_zero());
        let x = parse_text("1/3·th1", p, ScalarField::Rational).unwrap();
        assert!(matches!(reduce_mod_p(&x, 3), Err(Error::NotIntegral { .. })));
        assert!(matches!(reduce_mod_p(&x, 2), Err(Error::TruncationAbovePrime { .. })));
    }

    #[test]
    fn theorem_mod_small_primes() {
        for (prime, r, s, n) in [(3u64, 1, 1, 2), (2, 1, 0, 1), (5, 2, 2, 2)] {
            let p = params(n, r.max(1), prime as u32);
            let report = verify_theorem_mod_p(prime, r, s, p).unwrap();
            assert!(report.all_pass(), "{}", report.to_json_string());
        }
    }

    #[test]
    fn regrouped_first_row() {
        let p = params(1, 1, 4);
        let form = extract_regrouped(1, 0, p).unwrap();
        let s0 = SVector::default();
        for j in 1..=3 {
            assert_eq!(form.get(&[j], &s0), Some(&q(1, j as i64)));
        }
        assert_eq!(form.coefficients.len(), 3);
    }

    #[test]
    fn regrouped_initial_row() {
        let p = params(3, 1, 4);
        let form = extract_regrouped(0, 2, p).unwrap();
        assert_eq!(form.coefficients.len(), 1);
        assert_eq!(form.get(&[], &SVector::new([2])), Some(&q(1, 1)));
    }

    #[test]
    fn regrouped_integrality() {
        let p = params(2, 2, 5);
        for r in 0..=2 {
            for s in 0..=2 {
                let form = extract_regrouped(r, s, p).unwrap();
                for prime in [2, 3, 5] {
                    assert!(form.integral_at(prime), "({r},{s}) at {prime}");
                }
            }
        }
    }
}
