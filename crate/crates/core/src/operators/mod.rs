//! Operators on `B(n, K, m)`: the derivation `d`, the connection `∇`, the
//! Higgs contraction `Θ`, the row shifts and `δ_s`, and the operator `D` on
//! tables `φ: Z × Z → B`.

mod checks;
mod pairing;

pub use checks::{v_basis, verify_operators};

pub use pairing::{
    delta_star, nabla_star, nabla_star_k, pairing, pairing_basis, PairingTable, VBasisVector,
    VCombination,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ring::{binomial, exp_theta_h, Element, ScalarField, Sign, Slot, TruncationParams};

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `d`: `dθ = de = dζ = 0`, `dh_{k,l} = ζ_{k,l} − ζ_{k−1,l}`.
pub fn op_d(x: &Element) -> Element {
    let mut out = x.zero_like();
    for (mono, c) in x.terms() {
        for (idx, &((k, l), a)) in mono.h_exps().iter().enumerate() {
            let mut h = mono.h_exps().to_vec();
            if a == 1 {
                h.remove(idx);
            } else {
                h[idx].1 -= 1;
            }
            let coeff = c * int(a);
            for (row, sign) in [(k, Sign::Plus), (k - 1, Sign::Minus)] {
                let mut word = vec![(row, l)];
                word.extend_from_slice(mono.zeta_slots());
                let mut base = mono.clone();
                base.set_h(h.clone());
                if let Some((s, m)) = base.with_zeta_word(&word) {
                    out.accumulate_signed(sign * s, m, coeff.clone());
                }
            }
        }
    }
    out
}

/// Left multiplication by `Σ_{l=1}^{n} θ_l ζ_{0,l}`.
fn theta_zeta_left(x: &Element) -> Element {
    let mut out = x.zero_like();
    for (mono, c) in x.terms() {
        if mono.degree() + 1 >= x.params().m {
            continue;
        }
        for l in 1..=x.params().n {
            let mut word = vec![(0, l)];
            word.extend_from_slice(mono.zeta_slots());
            if let Some((s, m)) = mono.clone().with_theta([(l, 1)]).with_zeta_word(&word) {
                out.accumulate_signed(s, m, c.clone());
            }
        }
    }
    out
}

/// `∇ = d + Σ_l θ_l ζ_{0,l}`.
pub fn op_nabla(x: &Element) -> Element {
    let mut out = op_d(x);
    out += &theta_zeta_left(x);
    out
}

/// `Θ e_I = Σ_k (−1)^{k−1} θ_{i_k} e_{I∖i_k}`, extended `S`-linearly over
/// the `θ`, `h`, `ζ` factors; `Θ e_∅ = 0` and monomials without `e` vanish.
pub fn op_theta(x: &Element) -> Element {
    let mut out = x.zero_like();
    for (mono, c) in x.terms() {
        let Some(set) = mono.e_set() else { continue };
        for (idx, &i) in set.iter().enumerate() {
            let mut rest = set.to_vec();
            rest.remove(idx);
            let m = mono.clone().with_e(&rest).with_theta([(i, 1)]);
            out.accumulate_signed(Sign::from_parity(idx % 2 == 1), m, c.clone());
        }
    }
    out
}

/// `Shift_s`: for `s = 0` every row moves up by one; for `s > 0`
/// `h_{s,l} ↦ h_{s,l} + h_{s+1,l}`, rows above `s` move up, and `ζ` rows
/// `>= s` move up.
pub fn op_shift(s: u32, x: &Element) -> Result<Element> {
    let params = x.params();
    let max_row = params.k;
    let overflow = |row: u32| Error::RowOverflow { row, max_row };
    let mut out = x.zero_like();
    for (mono, c) in x.terms() {
        let zeta: Vec<Slot> = mono
            .zeta_slots()
            .iter()
            .map(|&(k, l)| if k >= s { (k + 1, l) } else { (k, l) })
            .collect();
        if let Some(&(k, _)) = zeta.iter().find(|&&(k, _)| k > max_row) {
            return Err(overflow(k));
        }
        // Each h factor maps to a sum; expand the product factor by factor.
        let mut partial: Vec<(Vec<(Slot, u32)>, BigInt)> = vec![(Vec::new(), BigInt::one())];
        for &((k, l), a) in mono.h_exps() {
            let images: Vec<(Vec<(Slot, u32)>, BigInt)> = if s == 0 || k > s {
                vec![(vec![((k + 1, l), a)], BigInt::one())]
            } else if k < s {
                vec![(vec![((k, l), a)], BigInt::one())]
            } else {
                (0..=a)
                    .map(|b| (vec![((k, l), a - b), ((k + 1, l), b)], binomial(a, b)))
                    .collect()
            };
            for (img, _) in &images {
                if let Some(&((row, _), _)) = img.iter().find(|&&((row, _), e)| e > 0 && row > max_row) {
                    return Err(overflow(row));
                }
            }
            partial = partial
                .into_iter()
                .flat_map(|(h, w)| {
                    images.iter().map(move |(img, iw)| {
                        let mut h2 = h.clone();
                        h2.extend(img.iter().copied());
                        (h2, &w * iw)
                    })
                })
                .collect();
        }
        for (h, w) in partial {
            let mut m = mono.clone();
            m.set_h(Vec::new());
            let m = m.with_h(h).with_sorted_zeta(zeta.clone());
            out.accumulate(m, c * BigRational::from_integer(w));
        }
    }
    Ok(out)
}

/// Operator context for one ring; caches `exp(Σ θ_l h_{1,l})`.
#[derive(Debug, Clone)]
pub struct Operators {
    params: TruncationParams,
    field: ScalarField,
    exp: Element,
}

impl Operators {
    pub fn new(params: TruncationParams, field: ScalarField) -> Operators {
        Operators {
            params,
            field,
            exp: exp_theta_h(params, field),
        }
    }

    pub fn params(&self) -> TruncationParams {
        self.params
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    fn check(&self, x: &Element) -> Result<()> {
        if x.params() != self.params || x.field() != self.field {
            return Err(Error::RingMismatch {
                left: format!("{} over {}", self.params, self.field),
                right: format!("{} over {}", x.params(), x.field()),
            });
        }
        Ok(())
    }

    /// `δ_0 = exp(Σ θ_l h_{1,l}) · Shift_0`, `δ_s = Shift_s` for `s > 0`.
    pub fn delta(&self, s: u32, x: &Element) -> Result<Element> {
        self.check(x)?;
        let shifted = op_shift(s, x)?;
        if s == 0 {
            shifted.try_mul(&self.exp)
        } else {
            Ok(shifted)
        }
    }

    /// `D(φ)(r, s) = ∇φ(r, s−1) + (−1)^s Σ_{k=0}^{r} (−1)^k δ_k φ(r−1, s) − Θφ(r, s)`.
    pub fn big_d(&self, phi: &PhiTable, r: i64, s: i64) -> Result<Element> {
        let mut out = op_nabla(&phi.get(r, s - 1)?);
        let prev = phi.get(r - 1, s)?;
        if r >= 0 && !prev.is_zero() {
            let mut sum = Element::zero(self.params, self.field);
            for k in 0..=r as u32 {
                let term = self.delta(k, &prev)?;
                if k % 2 == 0 {
                    sum += &term;
                } else {
                    sum -= &term;
                }
            }
            if s.rem_euclid(2) == 0 {
                out += &sum;
            } else {
                out -= &sum;
            }
        }
        out -= &op_theta(&phi.get(r, s)?);
        Ok(out)
    }
}

/// `δ_s` with a freshly built `exp` factor. Prefer [`Operators::delta`] in
/// loops.
pub fn op_delta(s: u32, x: &Element) -> Result<Element> {
    Operators::new(x.params(), x.field()).delta(s, x)
}

/// `D(φ)(r, s)`.
#[allow(non_snake_case)]
pub fn op_D(phi: &PhiTable, r: i64, s: i64) -> Result<Element> {
    Operators::new(phi.params(), phi.field()).big_d(phi, r, s)
}

/// A table `(r, s) ↦ φ(r, s)`. Cells with a negative index are zero and
/// never stored; any other missing cell is an error when queried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiTable {
    entries: BTreeMap<(i64, i64), Element>,
    params: TruncationParams,
    field: ScalarField,
}

impl PhiTable {
    pub fn new(params: TruncationParams, field: ScalarField) -> PhiTable {
        PhiTable {
            entries: BTreeMap::new(),
            params,
            field,
        }
    }

    pub fn params(&self) -> TruncationParams {
        self.params
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn insert(&mut self, r: i64, s: i64, value: Element) -> Result<()> {
        if r < 0 || s < 0 {
            return Err(Error::InvalidParams(format!(
                "cell ({r}, {s}) is identically zero"
            )));
        }
        if value.params() != self.params || value.field() != self.field {
            return Err(Error::RingMismatch {
                left: format!("{} over {}", self.params, self.field),
                right: format!("{} over {}", value.params(), value.field()),
            });
        }
        self.entries.insert((r, s), value);
        Ok(())
    }

    pub fn get(&self, r: i64, s: i64) -> Result<Element> {
        if r < 0 || s < 0 {
            return Ok(Element::zero(self.params, self.field));
        }
        self.entries
            .get(&(r, s))
            .cloned()
            .ok_or(Error::MissingCell { r, s })
    }

    pub fn contains(&self, r: i64, s: i64) -> bool {
        r < 0 || s < 0 || self.entries.contains_key(&(r, s))
    }

    pub fn cells(&self) -> impl Iterator<Item = (&(i64, i64), &Element)> {
        self.entries.iter()
    }

    /// Copy with every cell passed through `f`.
    pub fn map_cells(&self, mut f: impl FnMut(&Element) -> Result<Element>) -> Result<PhiTable> {
        let mut out: Option<PhiTable> = None;
        for (&(r, s), e) in &self.entries {
            let v = f(e)?;
            let table = out.get_or_insert_with(|| PhiTable::new(v.params(), v.field()));
            table.insert(r, s, v)?;
        }
        Ok(out.unwrap_or_else(|| self.clone()))
    }
}
