//! Seeded random elements for property checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{Element, Monomial, ScalarField, Slot, TruncationParams};

/// Shape knobs for [`random_element`].
#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub max_terms: usize,
    /// θ exponents are drawn from `-theta_span..=theta_span`.
    pub theta_span: i32,
    /// Highest row used for `h` and `ζ` (capped at `K`).
    pub max_row: u32,
}

impl RandomShape {
    pub fn for_params(params: &TruncationParams) -> Self {
        RandomShape {
            max_terms: 6,
            theta_span: 2,
            max_row: params.k,
        }
    }
}

pub fn random_monomial<R: Rng + ?Sized>(rng: &mut R, params: &TruncationParams, shape: &RandomShape) -> Monomial {
    let max_row = shape.max_row.min(params.k);
    let mut mono = Monomial::one();
    for l in 1..=params.n {
        if rng.gen_bool(0.4) {
            let exp = rng.gen_range(-shape.theta_span..=shape.theta_span);
            mono = mono.with_theta([(l, exp)]);
        }
    }
    if rng.gen_bool(0.5) {
        let set: Vec<u32> = (1..=params.n).filter(|_| rng.gen_bool(0.5)).collect();
        mono = mono.with_e(&set);
    }
    let degree = rng.gen_range(0..params.m);
    let mut zeta_pool: Vec<Slot> = (0..=max_row)
        .flat_map(|k| (1..=params.n).map(move |l| (k, l)))
        .collect();
    zeta_pool.shuffle(rng);
    let zeta_count = rng.gen_range(0..=degree).min(zeta_pool.len() as u32);
    let word = &zeta_pool[..zeta_count as usize];
    let h_count = degree - zeta_count;
    if max_row >= 1 {
        for _ in 0..h_count {
            let slot = (rng.gen_range(1..=max_row), rng.gen_range(1..=params.n));
            mono = mono.with_h([(slot, 1)]);
        }
    }
    let (_, mono) = mono.with_zeta_word(word).expect("distinct slots");
    mono
}

pub fn random_coeff<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let num = rng.gen_range(-5i64..=5);
    let den = rng.gen_range(1i64..=4);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Random element of `B(n, K, m)`; over `F_p` the coefficients are reduced.
pub fn random_element<R: Rng + ?Sized>(
    rng: &mut R,
    params: TruncationParams,
    field: ScalarField,
    shape: &RandomShape,
) -> Element {
    let mut out = Element::zero(params, field);
    let terms = rng.gen_range(1..=shape.max_terms.max(1));
    for _ in 0..terms {
        let mono = random_monomial(rng, &params, shape);
        let mut c = random_coeff(rng);
        if let ScalarField::Prime(p) = field {
            // keep denominators invertible
            while !super::is_p_integral(&c, p) {
                c = random_coeff(rng);
            }
        }
        out.accumulate(mono, c);
    }
    out
}
