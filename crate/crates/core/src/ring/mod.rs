//! Truncated Higgs-de Rham ring `B(n, K, m)`.
//!
//! Four generator families: commuting invertible `θ_l`, square-zero `e_I`
//! (any product of two vanishes), commuting `h_{k,l}` and anticommuting
//! `ζ_{k,l}`. Elements are kept modulo monomials of total `h`+`ζ` degree
//! at least `m`, with column indices `l <= n` and row indices `k <= K`.

mod element;
mod format;
mod monomial;
pub mod random;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use element::{exp_theta_h, Element};
pub use format::{parse_element_json, parse_text, TextStyle};
pub use monomial::{mono_mul, Monomial, Sign, Slot};

/// Bounds `(n, K, m)` that make the completed ring finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TruncationParams {
    /// Largest column index.
    pub n: u32,
    /// Largest row index; `ζ` rows run over `0..=K`, `h` rows over `1..=K`.
    #[serde(rename = "K")]
    pub k: u32,
    /// Total `h`+`ζ` degree bound (exclusive).
    pub m: u32,
}

impl TruncationParams {
    pub fn new(n: u32, k: u32, m: u32) -> Result<Self> {
        if n == 0 || k == 0 || m == 0 {
            return Err(Error::InvalidParams(format!(
                "n, K, m must all be positive (got n={n}, K={k}, m={m})"
            )));
        }
        Ok(TruncationParams { n, k, m })
    }

    pub fn with_m(self, m: u32) -> Result<Self> {
        TruncationParams::new(self.n, self.k, m)
    }

    pub fn with_k(self, k: u32) -> Result<Self> {
        TruncationParams::new(self.n, k, self.m)
    }
}

impl fmt::Display for TruncationParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} K={} m={}", self.n, self.k, self.m)
    }
}

/// Coefficient field of an [`Element`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarField {
    Rational,
    /// Residues are stored as integers in `0..p`.
    Prime(u64),
}

impl ScalarField {
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(ScalarField::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> Option<u64> {
        match self {
            ScalarField::Rational => None,
            ScalarField::Prime(p) => Some(*p),
        }
    }

    /// Maps a rational into this field. Fails only over `F_p` when `p`
    /// divides the reduced denominator.
    pub fn reduce(&self, c: &BigRational) -> Result<BigRational> {
        match self {
            ScalarField::Rational => Ok(c.clone()),
            ScalarField::Prime(p) => {
                let p_big = BigInt::from(*p);
                let den = c.denom().mod_floor(&p_big);
                if den.is_zero() {
                    return Err(Error::NotIntegral {
                        coeff: c.clone(),
                        prime: *p,
                    });
                }
                let num = c.numer().mod_floor(&p_big);
                let inv = mod_inverse(&den, &p_big);
                Ok(BigRational::from_integer((num * inv).mod_floor(&p_big)))
            }
        }
    }

    pub(crate) fn reduce_or_panic(&self, c: BigRational) -> BigRational {
        match self {
            ScalarField::Rational => c,
            ScalarField::Prime(_) => self
                .reduce(&c)
                .unwrap_or_else(|e| panic!("coefficient arithmetic left the field: {e}")),
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Rational => write!(f, "Q"),
            ScalarField::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let ext = a.extended_gcd(p);
    debug_assert!(ext.gcd.is_one());
    ext.x.mod_floor(p)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `true` iff the reduced denominator of `c` is prime to `p`.
pub fn is_p_integral(c: &BigRational, p: u64) -> bool {
    !(c.denom().abs() % BigInt::from(p)).is_zero()
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_reject_zero() {
        assert!(TruncationParams::new(0, 1, 1).is_err());
        assert!(TruncationParams::new(1, 0, 1).is_err());
        assert!(TruncationParams::new(1, 1, 0).is_err());
        assert!(TruncationParams::new(1, 1, 1).is_ok());
    }

    #[test]
    fn reduce_mod_three() {
        let f = ScalarField::prime(3).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f.reduce(&half).unwrap(), BigRational::from_integer(2.into()));
        let neg = BigRational::from_integer((-4).into());
        assert_eq!(f.reduce(&neg).unwrap(), BigRational::from_integer(2.into()));
        let third = BigRational::new(1.into(), 3.into());
        assert!(matches!(f.reduce(&third), Err(Error::NotIntegral { .. })));
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(ScalarField::prime(4).is_err());
    }
}
