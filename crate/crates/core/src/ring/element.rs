use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::monomial::{mono_mul, Monomial, Sign};
use super::{factorial, ScalarField, TruncationParams};
use crate::error::{Error, Result};

/// Finite linear combination of canonical monomials in `B(n, K, m)`.
///
/// Zero coefficients are never stored, so two elements are equal exactly
/// when their term maps agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<Monomial, BigRational>,
    params: TruncationParams,
    field: ScalarField,
}

impl Element {
    pub fn zero(params: TruncationParams, field: ScalarField) -> Element {
        Element {
            terms: BTreeMap::new(),
            params,
            field,
        }
    }

    pub fn one(params: TruncationParams, field: ScalarField) -> Element {
        let mut e = Element::zero(params, field);
        e.accumulate(Monomial::one(), BigRational::one());
        e
    }

    /// `coeff · mono`, rejecting monomials outside the bounds. A monomial of
    /// degree `>= m` is rejected too rather than silently projected away.
    pub fn term(
        mono: Monomial,
        coeff: BigRational,
        params: TruncationParams,
        field: ScalarField,
    ) -> Result<Element> {
        if !mono.fits(&params) {
            return Err(Error::OutOfBounds {
                monomial: mono.to_string(),
                params,
            });
        }
        let coeff = field.reduce(&coeff)?;
        let mut e = Element::zero(params, field);
        e.accumulate(mono, coeff);
        Ok(e)
    }

    /// A single monomial with coefficient one over `Q`.
    pub fn monomial(mono: Monomial, params: TruncationParams) -> Result<Element> {
        Element::term(mono, BigRational::one(), params, ScalarField::Rational)
    }

    pub fn from_terms(
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
        params: TruncationParams,
        field: ScalarField,
    ) -> Result<Element> {
        let mut e = Element::zero(params, field);
        for (mono, c) in terms {
            e.try_add_assign(&Element::term(mono, c, params, field)?)?;
        }
        Ok(e)
    }

    pub fn params(&self) -> TruncationParams {
        self.params
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> btree_map::Iter<'_, Monomial, BigRational> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> BigRational {
        self.terms.get(mono).cloned().unwrap_or_else(BigRational::zero)
    }

    /// A zero element in the same ring.
    pub fn zero_like(&self) -> Element {
        Element::zero(self.params, self.field)
    }

    /// Adds `coeff · mono` in place. Terms of degree `>= m` are dropped
    /// (projection to `B_m`); the coefficient is mapped into the field.
    pub(crate) fn accumulate(&mut self, mono: Monomial, coeff: BigRational) {
        if mono.degree() >= self.params.m || coeff.is_zero() {
            return;
        }
        debug_assert!(mono.fits(&self.params), "{mono} outside {}", self.params);
        let coeff = self.field.reduce_or_panic(coeff);
        match self.terms.entry(mono) {
            btree_map::Entry::Vacant(v) => {
                if !coeff.is_zero() {
                    v.insert(coeff);
                }
            }
            btree_map::Entry::Occupied(mut o) => {
                let sum = self.field.reduce_or_panic(o.get() + coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub(crate) fn accumulate_signed(&mut self, sign: Sign, mono: Monomial, coeff: BigRational) {
        match sign {
            Sign::Plus => self.accumulate(mono, coeff),
            Sign::Minus => self.accumulate(mono, -coeff),
        }
    }

    fn check_same_ring(&self, other: &Element) -> Result<()> {
        if self.params != other.params || self.field != other.field {
            return Err(Error::RingMismatch {
                left: format!("{} over {}", self.params, self.field),
                right: format!("{} over {}", other.params, other.field),
            });
        }
        Ok(())
    }

    pub fn try_add_assign(&mut self, other: &Element) -> Result<()> {
        self.check_same_ring(other)?;
        for (mono, c) in &other.terms {
            self.accumulate(mono.clone(), c.clone());
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        let mut out = self.clone();
        out.try_add_assign(other)?;
        Ok(out)
    }

    pub fn try_sub(&self, other: &Element) -> Result<Element> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Element) -> Result<Element> {
        self.check_same_ring(other)?;
        let mut out = self.zero_like();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((sign, mono)) = mono_mul(a, b, &self.params) {
                    out.accumulate_signed(sign, mono, ca * cb);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> Element {
        let mut out = self.zero_like();
        for (mono, coeff) in &self.terms {
            out.accumulate(mono.clone(), coeff * c);
        }
        out
    }

    pub fn scale_int(&self, c: i64) -> Element {
        self.scale(&BigRational::from_integer(BigInt::from(c)))
    }

    fn neg_ref(&self) -> Element {
        self.scale_int(-1)
    }

    /// Image in `B(n, K, m')` for `m' <= m`.
    pub fn project(&self, m: u32) -> Result<Element> {
        if m > self.params.m {
            return Err(Error::InvalidParams(format!(
                "cannot project from m={} up to m={m}",
                self.params.m
            )));
        }
        let params = self.params.with_m(m)?;
        let mut out = Element::zero(params, self.field);
        for (mono, c) in &self.terms {
            out.accumulate(mono.clone(), c.clone());
        }
        Ok(out)
    }

    /// Re-tags the element with other bounds; fails if some term does not fit.
    pub fn embed(&self, params: TruncationParams) -> Result<Element> {
        let mut out = Element::zero(params, self.field);
        for (mono, c) in &self.terms {
            if !mono.fits(&params) {
                return Err(Error::OutOfBounds {
                    monomial: mono.to_string(),
                    params,
                });
            }
            out.accumulate(mono.clone(), c.clone());
        }
        Ok(out)
    }

    /// Same terms viewed over another field (coefficients are reduced).
    pub(crate) fn with_field(&self, field: ScalarField) -> Result<Element> {
        let mut out = Element::zero(self.params, field);
        for (mono, c) in &self.terms {
            let r = field.reduce(c)?;
            out.accumulate(mono.clone(), r);
        }
        Ok(out)
    }

    pub fn sum<'a>(
        params: TruncationParams,
        field: ScalarField,
        items: impl IntoIterator<Item = &'a Element>,
    ) -> Element {
        let mut out = Element::zero(params, field);
        for item in items {
            out += item;
        }
        out
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, BigRational> {
        self.terms
    }
}

impl std::ops::AddAssign<&Element> for Element {
    fn add_assign(&mut self, rhs: &Element) {
        self.try_add_assign(rhs).expect("element addition");
    }
}

impl std::ops::SubAssign<&Element> for Element {
    fn sub_assign(&mut self, rhs: &Element) {
        self.try_add_assign(&rhs.neg_ref()).expect("element subtraction");
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs).expect("element addition")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.try_sub(rhs).expect("element subtraction")
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.try_mul(rhs).expect("element multiplication")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.neg_ref()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format::element_text(self, super::TextStyle::Plain))
    }
}

/// `exp(Σ_{l=1}^{n} θ_l h_{1,l})` truncated to `B(n, K, m)`.
///
/// # Panics
/// Over `F_p` with `m > p`, where `1/q!` is undefined.
pub fn exp_theta_h(params: TruncationParams, field: ScalarField) -> Element {
    if let ScalarField::Prime(p) = field {
        assert!(
            u64::from(params.m) <= p,
            "exp(θh) over F_{p} needs m <= p (m = {})",
            params.m
        );
    }
    let mut generator = Element::zero(params, field);
    for l in 1..=params.n {
        generator.accumulate(
            Monomial::theta(l, 1).with_h([((1, l), 1)]),
            BigRational::one(),
        );
    }
    let mut power = Element::one(params, field);
    let mut out = power.clone();
    for q in 1..params.m {
        power = &power * &generator;
        out += &power.scale(&BigRational::new(BigInt::one(), factorial(q)));
    }
    out
}
