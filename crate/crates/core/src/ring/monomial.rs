use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use super::TruncationParams;

/// `(row, column)` position of an `h` or `ζ` generator.
pub type Slot = (u32, u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn of_power(exponent: i64) -> Sign {
        Sign::from_parity(exponent.rem_euclid(2) == 1)
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self != rhs)
    }
}

/// Canonical monomial `θ^a · e_I · h^J · ζ_{z_1} ⋯ ζ_{z_t}`.
///
/// The derived order compares `(zeta, e, h, theta)` lexicographically; it
/// fixes the term order of every serialized element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    zeta: Vec<Slot>,
    e: Option<Vec<u32>>,
    h: Vec<(Slot, u32)>,
    theta: Vec<(u32, i32)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn theta(l: u32, exp: i32) -> Monomial {
        Monomial::one().with_theta([(l, exp)])
    }

    /// `e_I`; `e(&[])` is the generator `e_∅`, distinct from `1`.
    pub fn e(set: &[u32]) -> Monomial {
        Monomial::one().with_e(set)
    }

    pub fn h(k: u32, l: u32, exp: u32) -> Monomial {
        Monomial::one().with_h([((k, l), exp)])
    }

    pub fn zeta(k: u32, l: u32) -> Monomial {
        Monomial {
            zeta: vec![(k, l)],
            ..Monomial::default()
        }
    }

    /// Multiplies in extra `θ` powers (zero exponents cancel).
    pub fn with_theta(mut self, factors: impl IntoIterator<Item = (u32, i32)>) -> Monomial {
        for (l, exp) in factors {
            add_exponent(&mut self.theta, l, exp);
        }
        self
    }

    /// Replaces the `e` factor.
    pub fn with_e(mut self, set: &[u32]) -> Monomial {
        let mut set = set.to_vec();
        set.sort_unstable();
        set.dedup();
        self.e = Some(set);
        self
    }

    pub fn without_e(mut self) -> Monomial {
        self.e = None;
        self
    }

    pub fn with_h(mut self, factors: impl IntoIterator<Item = (Slot, u32)>) -> Monomial {
        for (slot, exp) in factors {
            if exp > 0 {
                add_exponent(&mut self.h, slot, exp);
            }
        }
        self
    }

    /// Builds a monomial with the given `ζ` word (any order). Returns the
    /// sign of the sorting permutation, or `None` when a slot repeats.
    pub fn with_zeta_word(mut self, word: &[Slot]) -> Option<(Sign, Monomial)> {
        let (sign, sorted) = sort_word(word)?;
        self.zeta = sorted;
        Some((sign, self))
    }

    pub(crate) fn with_sorted_zeta(mut self, zeta: Vec<Slot>) -> Monomial {
        debug_assert!(zeta.windows(2).all(|w| w[0] < w[1]));
        self.zeta = zeta;
        self
    }

    pub fn zeta_slots(&self) -> &[Slot] {
        &self.zeta
    }

    pub fn e_set(&self) -> Option<&[u32]> {
        self.e.as_deref()
    }

    pub fn h_exps(&self) -> &[(Slot, u32)] {
        &self.h
    }

    pub fn theta_exps(&self) -> &[(u32, i32)] {
        &self.theta
    }

    pub fn h_degree(&self) -> u32 {
        self.h.iter().map(|&(_, e)| e).sum()
    }

    pub fn zeta_degree(&self) -> u32 {
        self.zeta.len() as u32
    }

    /// Total `h`+`ζ` degree, the grading killed by `𝔟_m`.
    pub fn degree(&self) -> u32 {
        self.h_degree() + self.zeta_degree()
    }

    pub fn is_one(&self) -> bool {
        self.zeta.is_empty() && self.e.is_none() && self.h.is_empty() && self.theta.is_empty()
    }

    /// The `θ`/`e` part, i.e. the coefficient this monomial contributes in `S`.
    pub fn s_part(&self) -> Monomial {
        Monomial {
            zeta: Vec::new(),
            e: self.e.clone(),
            h: Vec::new(),
            theta: self.theta.clone(),
        }
    }

    pub fn is_in_s(&self) -> bool {
        self.zeta.is_empty() && self.h.is_empty()
    }

    pub(crate) fn set_h(&mut self, h: Vec<(Slot, u32)>) {
        self.h = h;
    }

    pub fn fits(&self, params: &TruncationParams) -> bool {
        let col_ok = |l: u32| (1..=params.n).contains(&l);
        self.theta.iter().all(|&(l, _)| col_ok(l))
            && self.e.iter().flatten().all(|&l| col_ok(l))
            && self
                .h
                .iter()
                .all(|&((k, l), _)| (1..=params.k).contains(&k) && col_ok(l))
            && self.zeta.iter().all(|&(k, l)| k <= params.k && col_ok(l))
            && self.degree() < params.m
    }
}

fn add_exponent<K: Ord + Copy, E>(exps: &mut Vec<(K, E)>, key: K, exp: E)
where
    E: Copy + std::ops::Add<Output = E> + PartialEq + Default,
{
    match exps.binary_search_by(|(k, _)| k.cmp(&key)) {
        Ok(pos) => {
            let sum = exps[pos].1 + exp;
            if sum == E::default() {
                exps.remove(pos);
            } else {
                exps[pos].1 = sum;
            }
        }
        Err(pos) => {
            if exp != E::default() {
                exps.insert(pos, (key, exp));
            }
        }
    }
}

fn merge_exponents<K: Ord + Copy, E>(a: &[(K, E)], b: &[(K, E)]) -> Vec<(K, E)>
where
    E: Copy + std::ops::Add<Output = E> + PartialEq + Default,
{
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                let sum = a[i].1 + b[j].1;
                if sum != E::default() {
                    out.push((a[i].0, sum));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sorts a `ζ` word, returning the permutation sign; `None` on a repeat.
pub(crate) fn sort_word(word: &[Slot]) -> Option<(Sign, Vec<Slot>)> {
    let mut v = word.to_vec();
    let mut odd = false;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((Sign::from_parity(odd), v))
}

/// Merges two sorted `ζ` words; the sign counts the pairs `(x in a, y in b)`
/// with `x > y`.
fn merge_zeta(a: &[Slot], b: &[Slot]) -> Option<(Sign, Vec<Slot>)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut inversions = 0usize;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                inversions += a.len() - i;
                j += 1;
            }
            Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((Sign::from_parity(inversions % 2 == 1), out))
}

/// Product of two monomials in `B(n, K, m)`.
///
/// `None` when both carry an `e` factor, when a `ζ` slot repeats, or when
/// the product falls into `𝔟_m`.
pub fn mono_mul(a: &Monomial, b: &Monomial, params: &TruncationParams) -> Option<(Sign, Monomial)> {
    if a.e.is_some() && b.e.is_some() {
        return None;
    }
    if a.degree() + b.degree() >= params.m {
        return None;
    }
    let (sign, zeta) = merge_zeta(&a.zeta, &b.zeta)?;
    Some((
        sign,
        Monomial {
            zeta,
            e: a.e.clone().or_else(|| b.e.clone()),
            h: merge_exponents(&a.h, &b.h),
            theta: merge_exponents(&a.theta, &b.theta),
        },
    ))
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = super::format::monomial_text(self, super::TextStyle::Plain);
        f.write_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, k: u32, m: u32) -> TruncationParams {
        TruncationParams::new(n, k, m).unwrap()
    }

    #[test]
    fn zeta_product_sorted() {
        let (s, m) = mono_mul(&Monomial::zeta(0, 1), &Monomial::zeta(0, 2), &p(2, 1, 3)).unwrap();
        assert_eq!(s, Sign::Plus);
        assert_eq!(m.zeta_slots(), &[(0, 1), (0, 2)]);
    }

    #[test]
    fn zeta_product_transposed() {
        let (s, m) = mono_mul(&Monomial::zeta(0, 2), &Monomial::zeta(0, 1), &p(2, 1, 3)).unwrap();
        assert_eq!(s, Sign::Minus);
        assert_eq!(m.zeta_slots(), &[(0, 1), (0, 2)]);
    }

    #[test]
    fn two_e_factors_vanish() {
        assert!(mono_mul(&Monomial::e(&[1]), &Monomial::e(&[]), &p(2, 1, 3)).is_none());
        assert!(mono_mul(&Monomial::e(&[]), &Monomial::e(&[]), &p(2, 1, 3)).is_none());
    }

    #[test]
    fn theta_exponents_add() {
        let a = Monomial::theta(1, -1);
        let b = Monomial::theta(1, 2).with_h([((1, 1), 1)]);
        let (s, m) = mono_mul(&a, &b, &p(1, 1, 3)).unwrap();
        assert_eq!(s, Sign::Plus);
        assert_eq!(m, Monomial::theta(1, 1).with_h([((1, 1), 1)]));
        let (_, unit) = mono_mul(&Monomial::theta(1, -1), &Monomial::theta(1, 1), &p(1, 1, 3)).unwrap();
        assert!(unit.is_one());
    }

    #[test]
    fn repeated_zeta_vanishes() {
        assert!(mono_mul(&Monomial::zeta(1, 1), &Monomial::zeta(1, 1), &p(1, 1, 3)).is_none());
    }

    #[test]
    fn degree_truncation() {
        let h = Monomial::h(1, 1, 1);
        assert!(mono_mul(&h, &h, &p(1, 1, 2)).is_none());
        assert!(mono_mul(&h, &h, &p(1, 1, 3)).is_some());
    }

    #[test]
    fn word_sorting_sign() {
        let (s, w) = sort_word(&[(1, 2), (0, 1), (0, 2)]).unwrap();
        assert_eq!(w, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(s, Sign::Plus);
        let (s, _) = sort_word(&[(0, 2), (0, 1), (1, 2)]).unwrap();
        assert_eq!(s, Sign::Minus);
        assert!(sort_word(&[(0, 1), (1, 1), (0, 1)]).is_none());
    }

    #[test]
    fn e_empty_is_not_one() {
        assert!(!Monomial::e(&[]).is_one());
        assert!(Monomial::one().is_one());
    }
}
