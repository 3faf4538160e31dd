//! Brute-force reference implementations over an explicit basis. Nothing here
//! calls the sparse arithmetic or the operator code; only the data types are
//! shared, so agreement between the two is meaningful.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::{IndexSeq, JMatrix, RowFill};
use crate::error::{Error, Result};
use crate::operators::VBasisVector;
use crate::ring::{Element, Monomial, ScalarField, TruncationParams};

/// Largest finite basis the oracle agrees to tabulate.
pub const BASIS_LIMIT: usize = 4000;

/// The `e`/`h`/`ζ` part of a monomial: `e` as a column bitmask, `h` as a
/// dense exponent vector indexed by `(k−1)·n + l−1`, `ζ` as a bitmask over
/// `k·n + l−1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Key {
    e: Option<u32>,
    h: Vec<u32>,
    zeta: u64,
}

type Theta = Vec<i32>;

/// Dense-keyed element: `(θ exponents, key) → coefficient`.
type Dense = BTreeMap<(Theta, Key), BigRational>;

/// The explicit basis of the `θ`-free part of `B(n, K, m)` with its
/// multiplication table.
pub struct DenseRing {
    params: TruncationParams,
    basis: Vec<Key>,
    index: HashMap<Key, usize>,
    /// `table[a][b]` = `Some((negative, c))` when `b_a · b_b = ±b_c`.
    table: Vec<Vec<Option<(bool, usize)>>>,
}

fn degree(key: &Key) -> u32 {
    key.h.iter().sum::<u32>() + key.zeta.count_ones()
}

fn add_into(out: &mut Dense, key: (Theta, Key), c: BigRational) {
    if c.is_zero() {
        return;
    }
    let slot = out.entry(key.clone()).or_insert_with(BigRational::zero);
    *slot += c;
    if slot.is_zero() {
        out.remove(&key);
    }
}

impl DenseRing {
    pub fn new(params: TruncationParams) -> Result<DenseRing> {
        let n = params.n as usize;
        let k = params.k as usize;
        let hvars = n * k;
        let zbits = n * (k + 1);
        if zbits > 63 {
            return Err(Error::BasisOverflow { size: usize::MAX, limit: BASIS_LIMIT });
        }
        let mut hs: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..hvars {
            hs = hs
                .into_iter()
                .flat_map(|p| {
                    (0..params.m).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .filter(|p| p.iter().sum::<u32>() < params.m)
                .collect();
        }
        let mut basis = Vec::new();
        let es: Vec<Option<u32>> = std::iter::once(None)
            .chain((0..1u32 << n).map(Some))
            .collect();
        for e in &es {
            for h in &hs {
                let hd: u32 = h.iter().sum();
                for zeta in 0..1u64 << zbits {
                    if hd + zeta.count_ones() < params.m {
                        basis.push(Key { e: *e, h: h.clone(), zeta });
                    }
                }
                if basis.len() > BASIS_LIMIT {
                    return Err(Error::BasisOverflow { size: basis.len(), limit: BASIS_LIMIT });
                }
            }
        }
        let index: HashMap<Key, usize> = basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let table = basis
            .iter()
            .map(|a| {
                basis
                    .iter()
                    .map(|b| {
                        let (neg, c) = raw_product(a, b, params.m)?;
                        Some((neg, index[&c]))
                    })
                    .collect()
            })
            .collect();
        Ok(DenseRing { params, basis, index, table })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Product of two elements through the table.
    pub fn mul_elements(&self, a: &Element, b: &Element) -> Element {
        self.to_element(&self.mul(&self.to_dense(a), &self.to_dense(b)))
    }

    /// Every basis monomial (no `θ` factor), in table order.
    pub fn basis_monomials(&self) -> Vec<Monomial> {
        self.basis.iter().map(|k| self.monomial_of(&self.no_theta(), k)).collect()
    }

    /// Sign table entry for a pair of basis indices.
    pub fn sign_of(&self, a: usize, b: usize) -> Option<bool> {
        self.table[a][b].map(|(neg, _)| neg)
    }

    fn key_of(&self, mono: &Monomial) -> (Theta, Key) {
        let n = self.params.n as usize;
        let mut theta = vec![0; n];
        for &(l, x) in mono.theta_exps() {
            theta[l as usize - 1] = x;
        }
        let e = mono
            .e_set()
            .map(|set| set.iter().fold(0u32, |acc, &l| acc | 1 << (l - 1)));
        let mut h = vec![0; n * self.params.k as usize];
        for &((k, l), x) in mono.h_exps() {
            h[(k as usize - 1) * n + l as usize - 1] = x;
        }
        let zeta = mono
            .zeta_slots()
            .iter()
            .fold(0u64, |acc, &(k, l)| acc | 1 << (k as usize * n + l as usize - 1));
        (theta, Key { e, h, zeta })
    }

    fn monomial_of(&self, theta: &Theta, key: &Key) -> Monomial {
        let n = self.params.n as usize;
        let mut mono = Monomial::one().with_theta(
            theta
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| (i as u32 + 1, x)),
        );
        if let Some(mask) = key.e {
            let set: Vec<u32> = (0..n as u32).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
            mono = mono.with_e(&set);
        }
        mono = mono.with_h(
            key.h
                .iter()
                .enumerate()
                .map(|(i, &x)| (((i / n) as u32 + 1, (i % n) as u32 + 1), x)),
        );
        let word: Vec<(u32, u32)> = (0..64)
            .filter(|b| key.zeta >> b & 1 == 1)
            .map(|b| ((b / n) as u32, (b % n) as u32 + 1))
            .collect();
        let (_, mono) = mono.with_zeta_word(&word).expect("distinct ζ slots");
        mono
    }

    fn to_dense(&self, x: &Element) -> Dense {
        let mut out = Dense::new();
        for (mono, c) in x.terms() {
            add_into(&mut out, self.key_of(mono), c.clone());
        }
        out
    }

    fn to_element(&self, x: &Dense) -> Element {
        let mut out = Element::zero(self.params, ScalarField::Rational);
        for ((theta, key), c) in x {
            let mono = self.monomial_of(theta, key);
            out += &Element::term(mono, c.clone(), self.params, ScalarField::Rational)
                .expect("oracle keys stay in bounds");
        }
        out
    }

    fn mul(&self, a: &Dense, b: &Dense) -> Dense {
        let mut out = Dense::new();
        for ((ta, ka), ca) in a {
            let ia = self.index[ka];
            for ((tb, kb), cb) in b {
                let Some((neg, ic)) = self.table[ia][self.index[kb]] else {
                    continue;
                };
                let theta: Theta = ta.iter().zip(tb).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                add_into(&mut out, (theta, self.basis[ic].clone()), if neg { -c } else { c });
            }
        }
        out
    }

    fn generator(&self, theta: Theta, key: Key) -> Dense {
        let mut out = Dense::new();
        if degree(&key) < self.params.m {
            out.insert((theta, key), BigRational::one());
        }
        out
    }

    fn no_theta(&self) -> Theta {
        vec![0; self.params.n as usize]
    }

    fn h_var(&self, k: u32, l: u32) -> Dense {
        let n = self.params.n as usize;
        let mut h = vec![0; n * self.params.k as usize];
        h[(k as usize - 1) * n + l as usize - 1] = 1;
        self.generator(self.no_theta(), Key { e: None, h, zeta: 0 })
    }

    fn zeta_var(&self, k: u32, l: u32) -> Dense {
        let n = self.params.n as usize;
        let h = vec![0; n * self.params.k as usize];
        self.generator(self.no_theta(), Key { e: None, h, zeta: 1 << (k as usize * n + l as usize - 1) })
    }

    fn theta_var(&self, l: u32) -> Dense {
        let mut theta = self.no_theta();
        theta[l as usize - 1] = 1;
        let h = vec![0; self.params.n as usize * self.params.k as usize];
        self.generator(theta, Key { e: None, h, zeta: 0 })
    }

    fn one(&self) -> Dense {
        let h = vec![0; self.params.n as usize * self.params.k as usize];
        self.generator(self.no_theta(), Key { e: None, h, zeta: 0 })
    }

    fn add(&self, a: &Dense, b: &Dense, scale: i64) -> Dense {
        let mut out = a.clone();
        for (k, c) in b {
            add_into(&mut out, k.clone(), c * BigRational::from_integer(scale.into()));
        }
        out
    }

    /// `d` on a single key via the Leibniz rule over its `h` variables.
    fn d(&self, x: &Dense) -> Dense {
        let n = self.params.n as usize;
        let mut out = Dense::new();
        for ((theta, key), c) in x {
            for (idx, &a) in key.h.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let (k, l) = ((idx / n) as u32 + 1, (idx % n) as u32 + 1);
                let mut rest = key.clone();
                rest.h[idx] -= 1;
                let dh = self.add(&self.zeta_var(k, l), &self.zeta_var(k - 1, l), -1);
                let tail = self.generator(theta.clone(), rest);
                let term = self.mul(&dh, &tail);
                let scaled = term
                    .into_iter()
                    .map(|(k, v)| (k, v * c * BigRational::from_integer(a.into())));
                for (k, v) in scaled {
                    add_into(&mut out, k, v);
                }
            }
        }
        out
    }

    fn nabla(&self, x: &Dense) -> Dense {
        let mut out = self.d(x);
        for l in 1..=self.params.n {
            let left = self.mul(&self.theta_var(l), &self.zeta_var(0, l));
            out = self.add(&out, &self.mul(&left, x), 1);
        }
        out
    }

    /// Image of a monomial under the ring map sending each generator to
    /// `image`; `None` signals a row beyond `K`.
    fn substitute(
        &self,
        x: &Dense,
        h_image: &dyn Fn(u32, u32) -> Option<Dense>,
        zeta_image: &dyn Fn(u32, u32) -> Option<Dense>,
    ) -> Option<Dense> {
        let n = self.params.n as usize;
        let mut out = Dense::new();
        for ((theta, key), c) in x {
            let h0 = vec![0; key.h.len()];
            let mut acc = self.generator(theta.clone(), Key { e: key.e, h: h0, zeta: 0 });
            for (idx, &a) in key.h.iter().enumerate() {
                let img = h_image((idx / n) as u32 + 1, (idx % n) as u32 + 1);
                for _ in 0..a {
                    acc = self.mul(&acc, img.as_ref()?);
                }
            }
            for b in 0..64 {
                if key.zeta >> b & 1 == 1 {
                    acc = self.mul(&acc, &zeta_image((b / n) as u32, (b % n) as u32 + 1)?);
                }
            }
            for (k, v) in acc {
                add_into(&mut out, k, v * c);
            }
        }
        Some(out)
    }

    fn shift(&self, s: u32, x: &Dense) -> Option<Dense> {
        let max = self.params.k;
        let h_image = |k: u32, l: u32| -> Option<Dense> {
            if s == 0 || k > s {
                (k < max).then(|| self.h_var(k + 1, l))
            } else if k < s {
                Some(self.h_var(k, l))
            } else {
                (k < max).then(|| self.add(&self.h_var(k, l), &self.h_var(k + 1, l), 1))
            }
        };
        let zeta_image = |k: u32, l: u32| -> Option<Dense> {
            if k >= s {
                (k < max).then(|| self.zeta_var(k + 1, l))
            } else {
                Some(self.zeta_var(k, l))
            }
        };
        self.substitute(x, &h_image, &zeta_image)
    }

    fn exp(&self) -> Dense {
        let mut gen = Dense::new();
        for l in 1..=self.params.n {
            gen = self.add(&gen, &self.mul(&self.theta_var(l), &self.h_var(1, l)), 1);
        }
        let mut out = self.one();
        let mut power = self.one();
        let mut fact = BigInt::one();
        for q in 1..self.params.m {
            power = self.mul(&power, &gen);
            fact *= q;
            let inv = BigRational::new(BigInt::one(), fact.clone());
            for (k, v) in &power {
                add_into(&mut out, k.clone(), v * &inv);
            }
        }
        out
    }

    fn delta(&self, s: u32, x: &Dense, exp: &Dense) -> Option<Dense> {
        let shifted = self.shift(s, x)?;
        Some(if s == 0 { self.mul(exp, &shifted) } else { shifted })
    }

    /// `⟨x, v⟩` from the dense form: raw coefficient times `Π J!`.
    fn pair(&self, x: &Dense, v: &Key) -> Element {
        let fact = v.h.iter().fold(BigInt::one(), |acc, &a| {
            acc * (1..=a).fold(BigInt::one(), |f, i| f * i)
        });
        let mut out = Dense::new();
        for ((theta, key), c) in x {
            if key.h == v.h && key.zeta == v.zeta {
                let h0 = vec![0; key.h.len()];
                add_into(&mut out, (theta.clone(), Key { e: key.e, h: h0, zeta: 0 }), c * &fact);
            }
        }
        self.to_element(&out)
    }

    fn vector_of(&self, key: &Key) -> VBasisVector {
        let n = self.params.n as usize;
        let j = JMatrix::from_entries(
            key.h
                .iter()
                .enumerate()
                .map(|(i, &x)| (((i / n) as u32 + 1, (i % n) as u32 + 1), x)),
        );
        let zeta: Vec<(u32, u32)> = (0..64)
            .filter(|b| key.zeta >> b & 1 == 1)
            .map(|b| ((b / n) as u32, (b % n) as u32 + 1))
            .collect();
        VBasisVector::new(j, IndexSeq::from_zeta(&zeta))
    }
}

/// Product of two keys over the explicit basis: `None` when it vanishes.
/// The `ζ` sign counts the pairs `(x ∈ a, y ∈ b)` with `x > y`.
fn raw_product(a: &Key, b: &Key, m: u32) -> Option<(bool, Key)> {
    let e = match (a.e, b.e) {
        (Some(_), Some(_)) => return None,
        (x, y) => x.or(y),
    };
    if a.zeta & b.zeta != 0 {
        return None;
    }
    let h: Vec<u32> = a.h.iter().zip(&b.h).map(|(x, y)| x + y).collect();
    let key = Key { e, h, zeta: a.zeta | b.zeta };
    if degree(&key) >= m {
        return None;
    }
    let mut swaps = 0u32;
    for y in 0..64 {
        if b.zeta >> y & 1 == 1 {
            swaps += (a.zeta >> (y + 1)).count_ones();
        }
    }
    Some((swaps % 2 == 1, key))
}

/// Product through the explicit basis and its sign table.
pub fn dense_mul(a: &Element, b: &Element, params: TruncationParams) -> Result<Element> {
    Ok(DenseRing::new(params)?.mul_elements(a, b))
}

/// Which operator to transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjointOf {
    Nabla,
    Delta(u32),
}

/// `v ↦ (w ↦ coefficient in S)` for every basis vector `v` of `V` in the
/// truncation.
pub type AdjointMatrix = BTreeMap<VBasisVector, BTreeMap<VBasisVector, Element>>;

/// Recovers `op*` from `⟨op(u), v⟩` over the basis `u` of `B` by solving
/// the pairing system `P · X = M` with Gaussian elimination over `Q`.
/// For `δ_k` the domain is restricted to rows `< K` so that the shift stays
/// inside the truncation.
pub fn adjoint_via_linear_solve(op: AdjointOf, params: TruncationParams) -> Result<AdjointMatrix> {
    let ring = DenseRing::new(params)?;
    let n = params.n as usize;
    let max_row = match op {
        AdjointOf::Nabla => params.k,
        AdjointOf::Delta(_) => params.k - 1,
    };
    let in_rows = |key: &Key| {
        key.h.iter().enumerate().all(|(i, &x)| x == 0 || ((i / n) as u32) < max_row)
            && (0..64).all(|b| key.zeta >> b & 1 == 0 || (b / n) as u32 <= max_row)
    };
    let domain: Vec<Key> = ring
        .basis
        .iter()
        .filter(|k| k.e.is_none() && in_rows(k))
        .cloned()
        .collect();
    let vectors: Vec<Key> = ring.basis.iter().filter(|k| k.e.is_none()).cloned().collect();
    let exp = ring.exp();
    let zero = Element::zero(params, ScalarField::Rational);

    // M[u][v] = ⟨op(u), v⟩ and P[u][w] = ⟨u, w⟩ (rational).
    let mut rhs: Vec<Vec<Element>> = Vec::with_capacity(domain.len());
    let mut pmat: Vec<Vec<BigRational>> = Vec::with_capacity(domain.len());
    for u in &domain {
        let x = ring.generator(ring.no_theta(), u.clone());
        let image = match op {
            AdjointOf::Nabla => ring.nabla(&x),
            AdjointOf::Delta(k) => ring
                .delta(k, &x, &exp)
                .ok_or(Error::RowOverflow { row: max_row + 1, max_row: params.k })?,
        };
        rhs.push(vectors.iter().map(|v| ring.pair(&image, v)).collect());
        pmat.push(
            domain
                .iter()
                .map(|w| {
                    let p = ring.pair(&x, w);
                    p.coeff(&Monomial::one())
                })
                .collect(),
        );
    }

    // Solve P X = M column block by column block (P is square on `domain`).
    let size = domain.len();
    for col in 0..size {
        let pivot = (col..size)
            .find(|&r| !pmat[r][col].is_zero())
            .ok_or(Error::SingularPairing { column: col })?;
        pmat.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = BigRational::one() / pmat[col][col].clone();
        for x in &mut pmat[col][col..] {
            *x = &*x * &inv;
        }
        rhs[col] = rhs[col].iter().map(|e| e.scale(&inv)).collect();
        for row in 0..size {
            if row == col || pmat[row][col].is_zero() {
                continue;
            }
            let factor = pmat[row][col].clone();
            let pivot_row = pmat[col][col..].to_vec();
            for (x, y) in pmat[row][col..].iter_mut().zip(&pivot_row) {
                *x -= y * &factor;
            }
            let pivot_rhs = rhs[col].clone();
            for (e, p) in rhs[row].iter_mut().zip(&pivot_rhs) {
                *e -= &p.scale(&factor);
            }
        }
    }

    let mut out = AdjointMatrix::new();
    for (vi, v) in vectors.iter().enumerate() {
        let column: BTreeMap<VBasisVector, Element> = domain
            .iter()
            .enumerate()
            .filter(|(ui, _)| rhs[*ui][vi] != zero)
            .map(|(ui, w)| (ring.vector_of(w), rhs[ui][vi].clone()))
            .collect();
        out.insert(ring.vector_of(v), column);
    }
    Ok(out)
}

/// `|T_m(r, s)|` by filtering the full cartesian space of exponent matrices
/// and per-row `ζ` column masks.
pub fn brute_count_t(r: u32, s: u32, params: TruncationParams, fill: RowFill) -> usize {
    let n = params.n as usize;
    let cells = r as usize * n;
    let rows = r as usize + 1;
    let mut count = 0;
    let j_space = (params.m as usize).pow(cells as u32);
    let mask_space = 1usize << (n * rows);
    for jcode in 0..j_space {
        let mut j = Vec::with_capacity(cells);
        let mut rest = jcode;
        for _ in 0..cells {
            j.push((rest % params.m as usize) as u32);
            rest /= params.m as usize;
        }
        let jdeg: u32 = j.iter().sum();
        if jdeg + s >= params.m {
            continue;
        }
        if fill == RowFill::Occupied && (0..r as usize).any(|k| j[k * n..(k + 1) * n].iter().all(|&x| x == 0)) {
            continue;
        }
        for masks in 0..mask_space {
            if (masks.count_ones()) == s {
                count += 1;
            }
        }
    }
    count
}
