//! The pairing `⟨b, v⟩` between `B` and the free `S`-module `V_S` on the
//! divided-power basis `h^{[j]} ζ_{s,i}`, and the closed-form adjoints of
//! `∇` and `δ_k`.

use std::borrow::Cow;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use crate::combinatorics::{IndexSeq, JMatrix};
use crate::ring::{Element, Monomial, ScalarField, Sign, TruncationParams};

/// Basis vector `h^{[j]} ζ_{s,i}` of `V`. Rows are unbounded so that
/// adjoints can name vectors beyond the truncation; those pair to zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VBasisVector {
    pub j: JMatrix,
    pub zeta: IndexSeq,
}

impl VBasisVector {
    pub fn new(j: JMatrix, zeta: IndexSeq) -> VBasisVector {
        VBasisVector { j, zeta }
    }

    /// The basis vector carrying the `h`/`ζ` part of a monomial.
    pub fn of_monomial(mono: &Monomial) -> VBasisVector {
        VBasisVector {
            j: JMatrix::from_entries(mono.h_exps().iter().copied()),
            zeta: IndexSeq::from_zeta(mono.zeta_slots()),
        }
    }

    pub fn degree(&self) -> u32 {
        self.j.total() + self.zeta.len() as u32
    }

    /// Whether the vector is a basis element of `V` inside `B(n, K, m)`.
    pub fn fits(&self, params: &TruncationParams) -> bool {
        self.j
            .entries()
            .all(|((k, l), _)| k >= 1 && k <= params.k && l >= 1 && l <= params.n)
            && self
                .zeta
                .zeta()
                .iter()
                .all(|&(k, l)| k <= params.k && l >= 1 && l <= params.n)
            && self.degree() < params.m
    }
}

/// Finite `S`-linear combination of basis vectors; coefficients are
/// elements of `S` (only `θ` and `e` factors).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VCombination {
    terms: BTreeMap<VBasisVector, Element>,
    params: TruncationParams,
    field: ScalarField,
}

impl VCombination {
    pub fn zero(params: TruncationParams, field: ScalarField) -> VCombination {
        VCombination {
            terms: BTreeMap::new(),
            params,
            field,
        }
    }

    pub fn basis(v: VBasisVector, params: TruncationParams, field: ScalarField) -> VCombination {
        let mut out = VCombination::zero(params, field);
        out.add_monomial(v, Sign::Plus, Monomial::one());
        out
    }

    pub fn add(&mut self, v: VBasisVector, coeff: &Element) {
        assert!(
            coeff.terms().all(|(m, _)| m.is_in_s()),
            "coefficients of V_S lie in S"
        );
        let slot = self
            .terms
            .entry(v.clone())
            .or_insert_with(|| Element::zero(self.params, self.field));
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&v);
        }
    }

    /// Adds `±s · v` for a single `S`-monomial `s`.
    pub fn add_monomial(&mut self, v: VBasisVector, sign: Sign, s: Monomial) {
        let mut c = Element::zero(self.params, self.field);
        c.accumulate_signed(sign, s, BigRational::one());
        self.add(v, &c);
    }

    pub fn add_combination(&mut self, other: &VCombination) {
        for (v, c) in &other.terms {
            self.add(v.clone(), c);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VBasisVector, &Element)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops vectors outside `B(n, K, m)`; they pair to zero with every `b`.
    pub fn restrict(&self, params: &TruncationParams) -> VCombination {
        VCombination {
            terms: self
                .terms
                .iter()
                .filter(|(v, _)| v.fits(params))
                .map(|(v, c)| (v.clone(), c.clone()))
                .collect(),
            params: self.params,
            field: self.field,
        }
    }
}

/// `⟨b, v⟩` for a single basis vector: the `S`-coefficient of
/// `h^{[j]} ζ_{s,i}` in `b`, i.e. the raw coefficient times `Π j_{k,l}!`.
pub fn pairing_basis(b: &Element, v: &VBasisVector) -> Element {
    let h = v.j.h_exps();
    let zeta = v.zeta.zeta();
    let fact = BigRational::from_integer(v.j.factorial_product());
    let mut out = b.zero_like();
    for (mono, c) in b.terms() {
        if mono.h_exps() == h.as_slice() && mono.zeta_slots() == zeta.as_slice() {
            out.accumulate(mono.s_part(), c * &fact);
        }
    }
    out
}

/// `b` decomposed along the basis of `V`, for repeated pairings.
#[derive(Debug, Clone)]
pub struct PairingTable {
    groups: BTreeMap<VBasisVector, Element>,
    zero: Element,
}

impl PairingTable {
    pub fn new(b: &Element) -> PairingTable {
        let mut groups: BTreeMap<VBasisVector, Element> = BTreeMap::new();
        for (mono, c) in b.terms() {
            let v = VBasisVector::of_monomial(mono);
            let fact = BigRational::from_integer(v.j.factorial_product());
            groups
                .entry(v)
                .or_insert_with(|| b.zero_like())
                .accumulate(mono.s_part(), c * fact);
        }
        PairingTable {
            groups,
            zero: b.zero_like(),
        }
    }

    pub fn pair_basis(&self, v: &VBasisVector) -> Element {
        self.groups.get(v).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn pair(&self, comb: &VCombination) -> Element {
        let mut out = self.zero.clone();
        for (v, coeff) in comb.terms() {
            if let Some(bv) = self.groups.get(v) {
                let coeff = if coeff.params() == bv.params() && coeff.field() == bv.field() {
                    Cow::Borrowed(coeff)
                } else {
                    Cow::Owned(
                        coeff
                            .embed(bv.params())
                            .and_then(|c| c.with_field(bv.field()))
                            .expect("S-coefficients embed in any truncation"),
                    )
                };
                out += &(coeff.as_ref() * bv);
            }
        }
        out
    }

    /// Basis vectors with a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = &VBasisVector> {
        self.groups.keys()
    }
}

/// `⟨b, Σ c_v v⟩ = Σ c_v ⟨b, v⟩`.
pub fn pairing(b: &Element, comb: &VCombination) -> Element {
    PairingTable::new(b).pair(comb)
}

/// `∇*_k`: removes each `ζ` entry of row `k` and compensates with the
/// matching `h` (or `θ` for `k = 0`). The sign is the parity of the removed
/// entry's position in the flattened `ζ` word.
pub fn nabla_star_k(
    k: u32,
    v: &VBasisVector,
    params: TruncationParams,
    field: ScalarField,
) -> VCombination {
    let mut out = VCombination::zero(params, field);
    for (pos, (row, col)) in v.zeta.zeta().into_iter().enumerate() {
        if row != k {
            continue;
        }
        let sign = Sign::from_parity(pos % 2 == 1);
        let rest = v.zeta.del_position(pos);
        if k == 0 {
            out.add_monomial(
                VBasisVector::new(v.j.clone(), rest.clone()),
                sign,
                Monomial::theta(col, 1),
            );
            out.add_monomial(
                VBasisVector::new(v.j.bumped(1, col), rest),
                sign * Sign::Minus,
                Monomial::one(),
            );
        } else {
            out.add_monomial(
                VBasisVector::new(v.j.bumped(k, col), rest.clone()),
                sign,
                Monomial::one(),
            );
            out.add_monomial(
                VBasisVector::new(v.j.bumped(k + 1, col), rest),
                sign * Sign::Minus,
                Monomial::one(),
            );
        }
    }
    out
}

/// `∇* = Σ_k ∇*_k`.
pub fn nabla_star(v: &VBasisVector, params: TruncationParams, field: ScalarField) -> VCombination {
    let mut out = VCombination::zero(params, field);
    let mut rows: Vec<u32> = v.zeta.blocks().iter().map(|(k, _)| *k).collect();
    rows.dedup();
    for k in rows {
        out.add_combination(&nabla_star_k(k, v, params, field));
    }
    out
}

/// `δ*_k`: zero when `ζ` row `k` is occupied; otherwise `δ*_0` moves
/// `h` row 1 into `θ^{j_1}` and every row down by one, and `δ*_k` (`k > 0`)
/// merges `h` rows `k`, `k + 1` and closes the gap at `ζ` row `k`.
pub fn delta_star(
    k: u32,
    v: &VBasisVector,
    params: TruncationParams,
    field: ScalarField,
) -> VCombination {
    let mut out = VCombination::zero(params, field);
    if v.zeta.s_vector().get(k) != 0 {
        return out;
    }
    if k == 0 {
        let first: Vec<(u32, i32)> = v
            .j
            .entries()
            .filter(|&((row, _), _)| row == 1)
            .map(|((_, l), e)| (l, e as i32))
            .collect();
        let target = VBasisVector::new(v.j.del_row(1), v.zeta.del_row(0));
        out.add_monomial(target, Sign::Plus, Monomial::one().with_theta(first));
    } else {
        let target = VBasisVector::new(v.j.merge_rows(k), v.zeta.del_row(k));
        out.add_monomial(target, Sign::Plus, Monomial::one());
    }
    out
}
