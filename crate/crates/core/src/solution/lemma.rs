//! The per-row decomposition `M_k = A_k + B_k^- + B_k^+` behind the proof
//! of `Dφ_∞ = 0`, and the regroupings that assemble the rows into `Θφ_∞`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::combinatorics::{coeff_a, enumerate_t_with, enumerate_tr, sign_e, JMatrix, RowFill, UpperSeq};
use crate::error::{Error, Result};
use crate::operators::{delta_star, nabla_star_k, op_theta, PairingTable, PhiTable, VBasisVector};
use crate::par;
use crate::report::{Check, Report};
use crate::ring::{Element, Monomial, ScalarField, Sign, TruncationParams};

/// The four `S`-valued quantities of the lemma for one row `k` and one
/// basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MkTerms {
    pub m: Element,
    pub a: Element,
    pub b_minus: Element,
    pub b_plus: Element,
}

impl MkTerms {
    pub fn residual(&self) -> Element {
        let mut out = self.m.clone();
        out -= &self.a;
        out -= &self.b_minus;
        out -= &self.b_plus;
        out
    }
}

struct Cell {
    params: TruncationParams,
    field: ScalarField,
    r: u32,
    s: i64,
    current: PairingTable,
    previous: PairingTable,
    target: PairingTable,
}

impl Cell {
    fn new(table: &PhiTable, r: u32, s: i64) -> Result<Cell> {
        if r == 0 || s < 0 {
            return Err(Error::InvalidParams(format!(
                "the row decomposition needs r > 0 and s >= 0, got ({r}, {s})"
            )));
        }
        let ri = i64::from(r);
        Ok(Cell {
            params: table.params(),
            field: table.field(),
            r,
            s,
            current: PairingTable::new(&table.get(ri, s)?),
            previous: PairingTable::new(&table.get(ri - 1, s + 1)?),
            target: PairingTable::new(&op_theta(&table.get(ri, s + 1)?)),
        })
    }

    fn zero(&self) -> Element {
        Element::zero(self.params, self.field)
    }

    /// `c · θ^j θ_ī^{-1} θ_extra e_{lower, ī}` added into `out`.
    fn add_s_term(
        &self,
        out: &mut Element,
        coeff: BigRational,
        j: &JMatrix,
        upper: &UpperSeq,
        lower: &[u32],
        extra_theta: Option<u32>,
    ) {
        let Some((sign, set)) = sign_e(lower, upper.entries()) else {
            return;
        };
        let mut mono = Monomial::one()
            .with_theta(j.theta_exps())
            .with_theta(upper.inverse_theta_exps())
            .with_e(&set);
        if let Some(i) = extra_theta {
            mono = mono.with_theta([(i, 1)]);
        }
        let coeff = self.field.reduce(&coeff).expect("p-integral lemma coefficient");
        out.accumulate_signed(sign, mono, coeff);
    }

    fn sign(&self, k: u32) -> Sign {
        Sign::of_power(self.s + 1 + i64::from(k))
    }

    fn m_k(&self, k: u32, v: &VBasisVector) -> Element {
        let mut out = self.current.pair(&nabla_star_k(k, v, self.params, self.field));
        let delta = self.previous.pair(&delta_star(k, v, self.params, self.field));
        match self.sign(k) {
            Sign::Plus => out += &delta,
            Sign::Minus => out -= &delta,
        }
        out
    }

    /// `A_k`: one term per `ζ` entry of row `k`, signed by its position.
    fn a_k(&self, k: u32, v: &VBasisVector) -> Element {
        let a = coeff_a(&v.j, &v.zeta.s_vector());
        let mut out = self.zero();
        let zeta = v.zeta.zeta();
        for (pos, &(row, col)) in zeta.iter().enumerate() {
            if row != k {
                continue;
            }
            self.add_position_term(&mut out, &a, v, pos, col);
        }
        out
    }

    fn add_position_term(&self, out: &mut Element, a: &BigRational, v: &VBasisVector, pos: usize, col: u32) {
        let lower = v.zeta.del_position(pos).flat();
        let sign = if pos % 2 == 0 { 1 } else { -1 };
        for upper in enumerate_tr(self.r, &v.j) {
            let w = BigInt::from(v.j.weight_at(&upper)) * sign;
            self.add_s_term(out, a * BigRational::from_integer(w), &v.j, &upper, &lower, Some(col));
        }
    }

    fn row_tail(v: &VBasisVector, from_j: u32, from_s: u32) -> i64 {
        i64::from(v.j.tail_sum(from_j)) + i64::from(v.zeta.s_vector().tail_sum(from_s))
    }

    /// Sum over `ī ∈ T(r−1)` of `c · j'_ī θ^j θ_ī^{-1} e_{i, ī}`.
    fn upper_sum(&self, out: &mut Element, c: &BigRational, v: &VBasisVector, weights: &JMatrix) {
        let lower = v.zeta.flat();
        for upper in enumerate_tr(self.r - 1, weights) {
            let w = BigRational::from_integer(BigInt::from(weights.weight_at(&upper)));
            self.add_s_term(out, c * w, &v.j, &upper, &lower, None);
        }
    }

    fn b_minus(&self, k: u32, v: &VBasisVector) -> Element {
        let mut out = self.zero();
        if k == 0 {
            return out;
        }
        let a = coeff_a(&v.j, &v.zeta.s_vector());
        let f = (1 - i64::from(v.j.row_sum(k))).max(Self::row_tail(v, k + 1, k));
        let c = a * BigRational::from_integer((self.sign(k).as_i64() * f).into());
        self.upper_sum(&mut out, &c, v, &v.j.del_row(k));
        out
    }

    fn b_plus(&self, k: u32, v: &VBasisVector) -> Element {
        let mut out = self.zero();
        if k == self.r {
            return out;
        }
        let a = coeff_a(&v.j, &v.zeta.s_vector());
        let f = Self::row_tail(v, k + 1, k + 1).max(1);
        let c = a * BigRational::from_integer((self.sign(k).as_i64() * f).into());
        self.upper_sum(&mut out, &c, v, &v.j.del_row(k + 1));
        out
    }

    fn terms(&self, k: u32, v: &VBasisVector) -> MkTerms {
        MkTerms {
            m: self.m_k(k, v),
            a: self.a_k(k, v),
            b_minus: self.b_minus(k, v),
            b_plus: self.b_plus(k, v),
        }
    }

    /// `Σ_k A_k` regrouped over all `ζ` positions at once.
    fn expression_a(&self, v: &VBasisVector) -> Element {
        let a = coeff_a(&v.j, &v.zeta.s_vector());
        let mut out = self.zero();
        for (pos, &(_, col)) in v.zeta.zeta().iter().enumerate() {
            self.add_position_term(&mut out, &a, v, pos, col);
        }
        out
    }

    /// `Σ_{k<r} (−1)^{s+1+k} a j_{k+1} Σ_{ī ∈ T(r−1)} Del_{k+1}(j)_ī …`.
    fn expression_b_rows(&self, v: &VBasisVector) -> Element {
        let a = coeff_a(&v.j, &v.zeta.s_vector());
        let mut out = self.zero();
        for k in 0..self.r {
            let jk = i64::from(v.j.row_sum(k + 1));
            let c = &a * BigRational::from_integer((self.sign(k).as_i64() * jk).into());
            self.upper_sum(&mut out, &c, v, &v.j.del_row(k + 1));
        }
        out
    }

    /// The same sum over `ī ∈ T(r)`: `Σ a j_ī θ^j θ_ī^{-1} Σ_{k<r} (−1)^{s+1+k} θ_{i^{k+1}} e_{i, Del_{k+1}(ī)}`.
    fn expression_b_full(&self, v: &VBasisVector) -> Element {
        let a = coeff_a(&v.j, &v.zeta.s_vector());
        let lower = v.zeta.flat();
        let mut out = self.zero();
        for upper in enumerate_tr(self.r, &v.j) {
            let w = BigInt::from(v.j.weight_at(&upper));
            for k in 0..self.r {
                let c = &a * BigRational::from_integer(&w * self.sign(k).as_i64());
                let reduced = upper.del(k as usize + 1);
                // θ_ī^{-1} θ_{i^{k+1}} = θ_{Del(ī)}^{-1}
                self.add_s_term(&mut out, c, &v.j, &reduced, &lower, None);
            }
        }
        out
    }

    /// `(−1)^{s+r} a j_r Σ_{ī ∈ T(r−1)} Del_r(j)_ī …`, the closing pair.
    fn boundary(&self, v: &VBasisVector) -> Element {
        let a = coeff_a(&v.j, &v.zeta.s_vector());
        let jr = i64::from(v.j.row_sum(self.r));
        let sign = Sign::of_power(self.s + i64::from(self.r)).as_i64();
        let c = a * BigRational::from_integer((sign * jr).into());
        let mut out = self.zero();
        self.upper_sum(&mut out, &c, v, &v.j.del_row(self.r));
        out
    }
}

/// `(M_k, A_k, B_k^-, B_k^+)` at basis vector `v`, where `M_k` is computed
/// through the pairing and the other three from their closed forms.
pub fn lemma_mk_terms(k: u32, r: u32, s: i64, v: &VBasisVector, table: &PhiTable) -> Result<MkTerms> {
    if k > r {
        return Err(Error::RowChoice { k, r });
    }
    Ok(Cell::new(table, r, s)?.terms(k, v))
}

/// Checks, for every `v ∈ T_m(r, s+1)`: the row decomposition for each `k`
/// (`lemma`), the regrouping of `Σ A_k` (`expression_a`), the telescoped
/// `Σ (B_k^- + B_k^+)` in both displayed forms (`expression_b`), the closing
/// pair `B_{r−1}^+ + B_r^-` (`boundary`), and that `Σ_k M_k` as well as the
/// regrouped sum equal `⟨Θφ(r, s+1), v⟩` (`coincidence`).
pub fn verify_lemma_aggregation(r: u32, s: i64, table: &PhiTable) -> Result<Report> {
    let cell = Cell::new(table, r, s)?;
    let vectors: Vec<VBasisVector> =
        enumerate_t_with(r, (s + 1) as u32, &table.params(), RowFill::Any)
            .into_iter()
            .map(|t| VBasisVector::new(t.j, t.i))
            .collect();
    let names = ["lemma", "expression_a", "expression_b", "boundary", "coincidence"];
    let outcomes = par::map(&vectors, |v| check_vector(&cell, v));
    let mut report = Report::new(table.params());
    for (idx, name) in names.iter().enumerate() {
        let failure = vectors
            .iter()
            .zip(&outcomes)
            .find_map(|(v, o)| o[idx].as_ref().map(|d| (v, d)));
        let check = match failure {
            None => Check::new(i64::from(r), s, *name, true),
            Some((v, diff)) => Check::new(i64::from(r), s, *name, false).with_residual(serde_json::json!({
                "vector": format!("{v:?}"),
                "difference": diff.to_json(),
            })),
        };
        report.push(check);
    }
    Ok(report)
}

fn nonzero(e: Element) -> Option<Element> {
    (!e.is_zero()).then_some(e)
}

fn check_vector(cell: &Cell, v: &VBasisVector) -> [Option<Element>; 5] {
    let mut lemma = None;
    let mut m_sum = cell.zero();
    let mut a_sum = cell.zero();
    let mut b_sum = cell.zero();
    let mut b_pairs = cell.zero();
    let terms: Vec<MkTerms> = (0..=cell.r).map(|k| cell.terms(k, v)).collect();
    for (k, t) in terms.iter().enumerate() {
        if lemma.is_none() {
            lemma = nonzero(t.residual());
        }
        m_sum += &t.m;
        a_sum += &t.a;
        b_sum += &t.b_minus;
        b_sum += &t.b_plus;
        if k + 1 < terms.len() {
            b_pairs += &t.b_plus;
            b_pairs += &terms[k + 1].b_minus;
        }
    }
    let expr_a = cell.expression_a(v);
    let expr_b = cell.expression_b_rows(v);
    let expr_b_full = cell.expression_b_full(v);
    let expression_a = nonzero(&a_sum - &expr_a);
    let expression_b = nonzero(&b_sum - &b_pairs)
        .or_else(|| nonzero(&b_sum - &expr_b))
        .or_else(|| nonzero(&expr_b - &expr_b_full));
    let last = &terms[cell.r as usize];
    let before = &terms[cell.r as usize - 1];
    let boundary = nonzero(&(&before.b_plus + &last.b_minus) - &cell.boundary(v));
    let theta = cell.target.pair_basis(v);
    let coincidence = nonzero(&m_sum - &theta).or_else(|| nonzero(&(&expr_a + &expr_b_full) - &theta));
    [lemma, expression_a, expression_b, boundary, coincidence]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::IndexSeq;
    use crate::solution::phi_table;

    fn params(n: u32, k: u32, m: u32) -> TruncationParams {
        TruncationParams::new(n, k, m).unwrap()
    }

    #[test]
    fn edge_rows_vanish() {
        let p = params(2, 2, 4);
        let table = phi_table(2, 2, p).unwrap();
        let v = VBasisVector::new(JMatrix::unit(1, 1), IndexSeq::from_zeta(&[(0, 2)]));
        let t0 = lemma_mk_terms(0, 1, 0, &v, &table).unwrap();
        assert!(t0.b_minus.is_zero());
        let t1 = lemma_mk_terms(1, 1, 0, &v, &table).unwrap();
        assert!(t1.b_plus.is_zero());
        assert!(t0.residual().is_zero() && t1.residual().is_zero());
        assert!(matches!(
            lemma_mk_terms(3, 1, 0, &v, &table),
            Err(Error::RowChoice { k: 3, r: 1 })
        ));
    }

    #[test]
    fn aggregation_grid() {
        let p = params(2, 2, 4);
        let table = phi_table(2, 2, p).unwrap();
        for (r, s) in [(1, 0), (1, 1), (2, 0), (2, 1)] {
            let report = verify_lemma_aggregation(r, s, &table).unwrap();
            assert!(report.all_pass(), "{}", report.to_json_string());
            assert_eq!(report.checks.len(), 5);
        }
    }

    #[test]
    fn corrupted_cell_is_caught() {
        let p = params(2, 2, 4);
        let mut table = phi_table(2, 2, p).unwrap();
        let bad = table.get(1, 0).unwrap().scale_int(2);
        table.insert(1, 0, bad).unwrap();
        let report = verify_lemma_aggregation(1, 0, &table).unwrap();
        let failed: Vec<&str> = report.failures().map(|c| c.check.as_str()).collect();
        assert!(failed.contains(&"lemma") && failed.contains(&"coincidence"), "{failed:?}");
    }
}
