//! One line per acceptance criterion. Every comparison is exact.

use std::process::ExitCode;
use std::time::Instant;

use hdr_core::combinatorics::{enumerate_t_with, RowFill, SVector};
use hdr_core::modp::{extract_regrouped, verify_theorem_mod_p};
use hdr_core::operators::{delta_star, nabla_star, op_nabla, op_theta, verify_operators, VBasisVector};
use hdr_core::oracle::{adjoint_via_linear_solve, brute_count_t, AdjointOf, DenseRing};
use hdr_core::ring::random::{random_element, RandomShape};
use hdr_core::ring::{parse_text, Element, Monomial, ScalarField, TruncationParams};
use hdr_core::skewforms::{e_family, higgs_extend, higgs_value, rho1_symmetrize, SkewFamily};
use hdr_core::solution::{phi_infinity, phi_table, verify_lemma_aggregation, verify_theorem};
use hdr_core::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::SeedableRng;

const Q: ScalarField = ScalarField::Rational;

fn params(n: u32, k: u32, m: u32) -> TruncationParams {
    TruncationParams::new(n, k, m).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Outcome {
        Outcome { pass, detail: detail.into() }
    }
}

fn solvability() -> Result<Outcome> {
    let mut total = 0;
    let mut failed = 0;
    for p in [params(2, 3, 5), params(3, 3, 4)] {
        let report = verify_theorem(3, 3, p)?;
        total += report.checks.len();
        failed += report.failures().count();
    }
    Ok(Outcome::new(failed == 0, format!("{total} checks, {failed} failed")))
}

fn initial_condition() -> Result<Outcome> {
    let p = params(3, 1, 4);
    let want = [
        "e{}",
        "e{1}·z[0,1] + e{2}·z[0,2] + e{3}·z[0,3]",
        "e{1,2}·z[0,1]·z[0,2] + e{1,3}·z[0,1]·z[0,3] + e{2,3}·z[0,2]·z[0,3]",
        "e{1,2,3}·z[0,1]·z[0,2]·z[0,3]",
    ];
    let mut bad = Vec::new();
    for (s, text) in want.iter().enumerate() {
        if phi_infinity(0, s as i64, p)? != parse_text(text, p, Q)? {
            bad.push(s);
        }
    }
    Ok(Outcome::new(bad.is_empty(), format!("s = 0..3, mismatches {bad:?}")))
}

fn nilpotency() -> Result<Outcome> {
    let p = params(2, 2, 4);
    let shape = RandomShape::for_params(&p);
    let mut rng = StdRng::seed_from_u64(7);
    let mut bad = 0;
    let mut nonzero = 0;
    for _ in 0..500 {
        let x = random_element(&mut rng, p, Q, &shape);
        let nx = op_nabla(&x);
        if !nx.is_zero() {
            nonzero += 1;
        }
        if !op_nabla(&nx).is_zero() || !op_theta(&op_theta(&x)).is_zero() {
            bad += 1;
        }
    }
    Ok(Outcome::new(
        bad == 0 && nonzero > 0,
        format!("500 elements, {bad} failures, {nonzero} with nonzero ∇x"),
    ))
}

fn adjointness() -> Result<Outcome> {
    let p = params(2, 2, 4);
    let report = verify_operators(p, 100, 11)?;
    let sampled_ok = report.all_pass();
    let mut entries = 0;
    let mut mismatches = 0;
    for op in [AdjointOf::Nabla, AdjointOf::Delta(0), AdjointOf::Delta(1), AdjointOf::Delta(2)] {
        let domain = match op {
            AdjointOf::Nabla => p,
            AdjointOf::Delta(_) => p.with_k(p.k - 1)?,
        };
        for (v, column) in adjoint_via_linear_solve(op, p)? {
            let closed = match op {
                AdjointOf::Nabla => nabla_star(&v, p, Q),
                AdjointOf::Delta(k) => delta_star(k, &v, p, Q),
            };
            let closed: Vec<(&VBasisVector, &Element)> =
                closed.terms().filter(|(w, _)| w.fits(&domain)).collect();
            entries += column.len();
            if closed.len() != column.len()
                || closed.iter().any(|(w, c)| column.get(*w) != Some(*c))
            {
                mismatches += 1;
            }
        }
    }
    Ok(Outcome::new(
        sampled_ok && mismatches == 0 && entries > 0,
        format!(
            "{} sampled checks, oracle {entries} entries, {mismatches} mismatched columns",
            report.checks.len()
        ),
    ))
}

const LEMMA_GRID: [(u32, i64); 4] = [(1, 0), (1, 1), (2, 0), (2, 1)];

fn lemma_checks(names: &[&str]) -> Result<Outcome> {
    let table = phi_table(2, 2, params(2, 2, 4))?;
    let mut total = 0;
    let mut failed = Vec::new();
    for (r, s) in LEMMA_GRID {
        let report = verify_lemma_aggregation(r, s, &table)?;
        for c in report.checks.iter().filter(|c| names.contains(&c.check.as_str())) {
            total += 1;
            if !c.pass {
                failed.push(format!("({r},{s}) {}", c.check));
            }
        }
    }
    Ok(Outcome::new(
        failed.is_empty() && total == LEMMA_GRID.len() * names.len(),
        format!("{total} checks, failed {failed:?}"),
    ))
}

fn mod_p() -> Result<Outcome> {
    let mut total = 0;
    let mut failed = 0;
    for prime in [2u64, 3, 5] {
        let report = verify_theorem_mod_p(prime, 2, 2, params(2, 2, prime as u32))?;
        total += report.checks.len();
        failed += report.failures().count();
    }
    Ok(Outcome::new(failed == 0, format!("{total} checks over p = 2, 3, 5, {failed} failed")))
}

fn regrouping() -> Result<Outcome> {
    let p = params(2, 2, 5);
    let mut problems = Vec::new();
    for r in 0..=2u32 {
        for s in 0..=2u32 {
            let form = extract_regrouped(r, s, p)?;
            if form.reassemble() != phi_infinity(r as i64, s as i64, p)? {
                problems.push(format!("reassemble ({r},{s})"));
            }
            for prime in [2, 3, 5] {
                if !form.integral_at(prime) {
                    problems.push(format!("integrality ({r},{s}) p={prime}"));
                }
            }
        }
    }
    let first = extract_regrouped(1, 0, p)?;
    for j in 1..p.m {
        let want = BigRational::new(BigInt::from(1), BigInt::from(j));
        if first.get(&[j], &SVector::default()) != Some(&want) {
            problems.push(format!("a'({j}) at (1,0)"));
        }
    }
    Ok(Outcome::new(problems.is_empty(), format!("problems {problems:?}")))
}

fn first_row_closed_form() -> Result<Outcome> {
    let p = params(1, 1, 4);
    let want = parse_text("e{1}·h[1,1] + 1/2·th1·e{1}·h[1,1]^2 + 1/6·th1^2·e{1}·h[1,1]^3", p, Q)?;
    let got = phi_infinity(1, 0, p)?;
    Ok(Outcome::new(got == want, got.to_text()))
}

fn oracle_equivalence() -> Result<Outcome> {
    let p = params(2, 2, 3);
    let ring = DenseRing::new(p)?;
    let thetas = [
        Element::one(p, Q),
        Element::term(Monomial::theta(1, -1), BigRational::from_integer(3.into()), p, Q)?,
        Element::term(Monomial::theta(2, 2), BigRational::new((-1).into(), 2.into()), p, Q)?,
    ];
    let basis: Vec<Element> = ring
        .basis_monomials()
        .into_iter()
        .map(|m| Element::monomial(m, p))
        .collect::<Result<_>>()?;
    let mut products = 0;
    let mut mismatches = 0;
    for (i, a) in basis.iter().enumerate() {
        let a = &thetas[i % thetas.len()] * a;
        for (j, b) in basis.iter().enumerate() {
            let b = &thetas[(i + j) % thetas.len()] * b;
            products += 1;
            if ring.mul_elements(&a, &b) != &a * &b {
                mismatches += 1;
            }
        }
    }
    let mut counted = 0;
    let mut count_mismatches = Vec::new();
    for n in 1..=2 {
        for k in 1..=2 {
            for m in 1..=4 {
                let q = params(n, k, m);
                for r in 0..=k {
                    for s in 0..=3 {
                        for fill in [RowFill::Occupied, RowFill::Any] {
                            counted += 1;
                            let fast = enumerate_t_with(r, s, &q, fill).len();
                            if brute_count_t(r, s, q, fill) != fast {
                                count_mismatches.push((n, k, m, r, s));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Outcome::new(
        mismatches == 0 && count_mismatches.is_empty(),
        format!(
            "{products} products with {mismatches} mismatches, {counted} counts with mismatches {count_mismatches:?}"
        ),
    ))
}

fn permutations(items: &[u32]) -> Vec<(Vec<u32>, bool)> {
    if items.len() <= 1 {
        return vec![(items.to_vec(), false)];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for (mut tail, odd) in permutations(&rest) {
            tail.insert(0, head);
            out.push((tail, odd ^ (i % 2 == 1)));
        }
    }
    out
}

fn random_family(degree: u32, p: TruncationParams, rng: &mut StdRng) -> Result<SkewFamily> {
    let shape = RandomShape { max_terms: 3, ..RandomShape::for_params(&p) };
    let values: Vec<(Vec<u32>, Element)> = e_family(degree, p, Q)
        .increasing()
        .map(|(t, _)| (t.clone(), random_element(rng, p, Q, &shape)))
        .collect();
    rho1_symmetrize(degree, values, p, Q)
}

fn skew_symmetry() -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(3);
    let mut tuples = 0;
    let mut bad = Vec::new();
    for n in 1..=3u32 {
        let p = params(n, 1, 3);
        for degree in 0..=2u32 {
            if degree + 1 > n {
                continue;
            }
            for x in [e_family(degree, p, Q), random_family(degree, p, &mut rng)?] {
                let tx = higgs_extend(&x);
                for (base, _) in e_family(degree + 1, p, Q).increasing() {
                    let reference = higgs_value(&x, base);
                    for (perm, odd) in permutations(base) {
                        tuples += 1;
                        let want = if odd { -&reference } else { reference.clone() };
                        if higgs_value(&x, &perm) != want || tx.value_at(&perm) != want {
                            bad.push((n, degree, perm));
                        }
                    }
                }
            }
        }
    }
    Ok(Outcome::new(bad.is_empty(), format!("{tuples} permuted tuples, failures {bad:?}")))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("solvability of the D equation", solvability),
        ("initial condition", initial_condition),
        ("operator nilpotency", nilpotency),
        ("adjoint formulas", adjointness),
        ("M_k decomposition", || lemma_checks(&["lemma"])),
        ("proof aggregation", || lemma_checks(&["expression_a", "expression_b", "boundary", "coincidence"])),
        ("mod-p reduction", mod_p),
        ("regrouped coefficients", regrouping),
        ("first-row closed form", first_row_closed_form),
        ("oracle equivalence", oracle_equivalence),
        ("Higgs extension skew symmetry", skew_symmetry),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        all &= outcome.pass;
        println!(
            "criterion {:>2} {} {name}: {} [{:.2?}]",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
