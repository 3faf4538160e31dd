//! Skew-symmetric coefficient families `x_{i_1,…,i_q}` with values in `S`,
//! the symmetrization `ρ_1`, and the Higgs extension
//! `θ(x)_{i_1…i_{q+1}} = Σ_k (−1)^{k−1} θ_{i_k} x_{i_1…î_k…i_{q+1}}`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use crate::combinatorics::subsets;
use crate::error::{Error, Result};
use crate::ring::{Element, Monomial, ScalarField, Sign, TruncationParams};

/// Values on strictly increasing tuples in `{1..n}^q`; every other tuple is
/// read through the sign of its sorting permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewFamily {
    degree: u32,
    params: TruncationParams,
    field: ScalarField,
    values: BTreeMap<Vec<u32>, Element>,
}

/// Sorts a tuple, returning the sign of the permutation; `None` on a repeat.
fn sort_tuple(tuple: &[u32]) -> Option<(Sign, Vec<u32>)> {
    let mut v = tuple.to_vec();
    let mut odd = false;
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            if v[a] == v[b] {
                return None;
            }
            if v[a] > v[b] {
                odd = !odd;
            }
        }
    }
    v.sort_unstable();
    Some((Sign::from_parity(odd), v))
}

impl SkewFamily {
    pub fn zero(degree: u32, params: TruncationParams, field: ScalarField) -> SkewFamily {
        SkewFamily {
            degree,
            params,
            field,
            values: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn params(&self) -> TruncationParams {
        self.params
    }

    /// Stored values, keyed by increasing tuples.
    pub fn increasing(&self) -> impl Iterator<Item = (&Vec<u32>, &Element)> {
        self.values.iter()
    }

    /// `x_{i_1…i_q}` at any tuple: `sgn(σ)·x` at its sorted form, zero on
    /// repeats.
    pub fn value_at(&self, tuple: &[u32]) -> Element {
        assert_eq!(tuple.len() as u32, self.degree, "tuple length");
        let zero = Element::zero(self.params, self.field);
        let Some((sign, sorted)) = sort_tuple(tuple) else {
            return zero;
        };
        match self.values.get(&sorted) {
            None => zero,
            Some(v) if sign == Sign::Plus => v.clone(),
            Some(v) => -v,
        }
    }
}

/// `ρ_1`: extends values given on increasing tuples by `sgn(σ)` to all
/// tuples.
pub fn rho1_symmetrize(
    degree: u32,
    values: impl IntoIterator<Item = (Vec<u32>, Element)>,
    params: TruncationParams,
    field: ScalarField,
) -> Result<SkewFamily> {
    let mut family = SkewFamily::zero(degree, params, field);
    for (tuple, value) in values {
        if tuple.len() as u32 != degree
            || !tuple.windows(2).all(|w| w[0] < w[1])
            || tuple.iter().any(|&i| i == 0 || i > params.n)
        {
            return Err(Error::NotIncreasing(tuple));
        }
        if !value.is_zero() {
            family.values.insert(tuple, value);
        }
    }
    Ok(family)
}

/// The Higgs extension evaluated straight from the defining sum at an
/// arbitrary tuple, without using any symmetry of the result.
pub fn higgs_value(x: &SkewFamily, tuple: &[u32]) -> Element {
    assert_eq!(tuple.len() as u32, x.degree + 1, "tuple length");
    let mut out = Element::zero(x.params, x.field);
    for (k, &i) in tuple.iter().enumerate() {
        let mut rest = tuple.to_vec();
        rest.remove(k);
        let theta = Element::term(Monomial::theta(i, 1), BigRational::one(), x.params, x.field)
            .expect("θ_i fits");
        let term = &theta * &x.value_at(&rest);
        if k % 2 == 0 {
            out += &term;
        } else {
            out -= &term;
        }
    }
    out
}

/// `θ(x)`, of degree `q + 1`.
pub fn higgs_extend(x: &SkewFamily) -> SkewFamily {
    let values = subsets(x.params.n, x.degree + 1)
        .into_iter()
        .map(|t| {
            let v = higgs_value(x, &t);
            (t, v)
        })
        .collect::<Vec<_>>();
    rho1_symmetrize(x.degree + 1, values, x.params, x.field).expect("increasing tuples")
}

/// The family `x_I = e_I` on increasing `I` with `|I| = q`.
pub fn e_family(degree: u32, params: TruncationParams, field: ScalarField) -> SkewFamily {
    let values = subsets(params.n, degree).into_iter().map(|t| {
        let e = Element::term(Monomial::e(&t), BigRational::one(), params, field).expect("e_I fits");
        (t, e)
    });
    rho1_symmetrize(degree, values, params, field).expect("increasing tuples")
}
