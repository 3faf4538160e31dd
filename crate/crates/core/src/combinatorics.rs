//! Index bookkeeping for the explicit solution: divided-power exponent
//! matrices, `ζ` multiplicity vectors, increasing index blocks, the rational
//! weight `a(j, s)` and the signed `e` generator attached to index data.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::ring::{factorial, Sign, Slot, TruncationParams};

/// Exponent matrix `j_{k,l}` (rows and columns from 1), sparse.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JMatrix {
    entries: BTreeMap<Slot, u32>,
}

impl JMatrix {
    pub fn new() -> JMatrix {
        JMatrix::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Slot, u32)>) -> JMatrix {
        let mut j = JMatrix::new();
        for (slot, v) in entries {
            j.add(slot, v);
        }
        j
    }

    /// Single unit entry `j(k, l)`.
    pub fn unit(k: u32, l: u32) -> JMatrix {
        JMatrix::from_entries([((k, l), 1)])
    }

    pub fn add(&mut self, slot: Slot, v: u32) {
        if v > 0 {
            *self.entries.entry(slot).or_insert(0) += v;
        }
    }

    /// `j + j(k, l)`.
    pub fn bumped(&self, k: u32, l: u32) -> JMatrix {
        let mut out = self.clone();
        out.add((k, l), 1);
        out
    }

    pub fn get(&self, k: u32, l: u32) -> u32 {
        self.entries.get(&(k, l)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Slot, u32)> + '_ {
        self.entries.iter().map(|(&s, &v)| (s, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn row_sum(&self, k: u32) -> u32 {
        self.entries
            .range((k, 0)..=(k, u32::MAX))
            .map(|(_, &v)| v)
            .sum()
    }

    pub fn total(&self) -> u32 {
        self.entries.values().sum()
    }

    /// `Σ_{k >= p} Σ_l j_{k,l}`.
    pub fn tail_sum(&self, p: u32) -> u32 {
        self.entries
            .iter()
            .filter(|(&(k, _), _)| k >= p)
            .map(|(_, &v)| v)
            .sum()
    }

    pub fn max_row(&self) -> u32 {
        self.entries.keys().map(|&(k, _)| k).max().unwrap_or(0)
    }

    /// Columns `l` with `j_{k,l} > 0`.
    pub fn row_support(&self, k: u32) -> Vec<u32> {
        self.entries
            .range((k, 0)..=(k, u32::MAX))
            .map(|(&(_, l), _)| l)
            .collect()
    }

    /// Removes row `q >= 1` and moves later rows up by one.
    pub fn del_row(&self, q: u32) -> JMatrix {
        assert!(q >= 1, "rows start at 1");
        JMatrix::from_entries(self.entries().filter(|&((k, _), _)| k != q).map(
            |((k, l), v)| {
                if k < q {
                    ((k, l), v)
                } else {
                    ((k - 1, l), v)
                }
            },
        ))
    }

    /// Adds row `q + 1` into row `q` and moves later rows up by one.
    pub fn merge_rows(&self, q: u32) -> JMatrix {
        assert!(q >= 1, "rows start at 1");
        JMatrix::from_entries(self.entries().map(|((k, l), v)| {
            if k <= q {
                ((k, l), v)
            } else {
                ((k - 1, l), v)
            }
        }))
    }

    /// `Π_k j_{k, i^k}` for an upper sequence.
    pub fn weight_at(&self, upper: &UpperSeq) -> u32 {
        upper
            .entries()
            .iter()
            .enumerate()
            .map(|(idx, &i)| self.get(idx as u32 + 1, i))
            .product()
    }

    /// Exponents of `θ^j = Π_l θ_l^{Σ_k j_{k,l}}`.
    pub fn theta_exps(&self) -> Vec<(u32, i32)> {
        let mut cols: BTreeMap<u32, i32> = BTreeMap::new();
        for ((_, l), v) in self.entries() {
            *cols.entry(l).or_insert(0) += v as i32;
        }
        cols.into_iter().collect()
    }

    /// Exponents of the raw `h` monomial underlying `h^{[j]}`.
    pub fn h_exps(&self) -> Vec<(Slot, u32)> {
        self.entries().collect()
    }

    /// `Π 1/j_{k,l}!`, the factor turning `h^j` into `h^{[j]}`.
    pub fn divided_power_factor(&self) -> BigRational {
        let den = self
            .entries
            .values()
            .fold(BigInt::one(), |acc, &v| acc * factorial(v));
        BigRational::new(BigInt::one(), den)
    }

    /// `Π j_{k,l}!`.
    pub fn factorial_product(&self) -> BigInt {
        self.entries
            .values()
            .fold(BigInt::one(), |acc, &v| acc * factorial(v))
    }
}

/// Multiplicities `s_0, s_1, …` of `ζ` rows. Indexing starts at 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SVector(Vec<u32>);

impl SVector {
    pub fn new(values: impl IntoIterator<Item = u32>) -> SVector {
        let mut v: Vec<u32> = values.into_iter().collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        SVector(v)
    }

    pub fn get(&self, l: u32) -> u32 {
        self.0.get(l as usize).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `Σ_{l >= p} s_l`.
    pub fn tail_sum(&self, p: u32) -> u32 {
        self.0.iter().skip(p as usize).sum()
    }

    /// Number of stored rows (one past the last non-zero entry).
    pub fn len(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    /// Deletes entry `q`, shifting later entries down.
    pub fn del(&self, q: u32) -> SVector {
        let mut v = self.0.clone();
        if (q as usize) < v.len() {
            v.remove(q as usize);
        }
        SVector::new(v)
    }

    pub fn factorial_product(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, &v| acc * factorial(v))
    }
}

/// Increasing column blocks `i_{l,1} < … < i_{l,s_l}`, one block per row
/// `l` with `s_l > 0`. Flattened in block order it lists the columns of
/// `ζ_{s,i}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSeq {
    blocks: Vec<(u32, Vec<u32>)>,
}

impl IndexSeq {
    /// Builds from a strictly increasing list of `(row, column)` slots.
    pub fn from_zeta(zeta: &[Slot]) -> IndexSeq {
        assert!(zeta.windows(2).all(|w| w[0] < w[1]), "ζ word must be sorted");
        let mut blocks: Vec<(u32, Vec<u32>)> = Vec::new();
        for &(k, l) in zeta {
            match blocks.last_mut() {
                Some((row, cols)) if *row == k => cols.push(l),
                _ => blocks.push((k, vec![l])),
            }
        }
        IndexSeq { blocks }
    }

    /// Validating constructor from `(row, block)` pairs.
    pub fn from_blocks(blocks: impl IntoIterator<Item = (u32, Vec<u32>)>) -> Option<IndexSeq> {
        let mut zeta = Vec::new();
        for (row, cols) in blocks {
            if !cols.windows(2).all(|w| w[0] < w[1]) || cols.contains(&0) {
                return None;
            }
            zeta.extend(cols.into_iter().map(|c| (row, c)));
        }
        if !zeta.windows(2).all(|w| w[0] < w[1]) {
            return None;
        }
        Some(IndexSeq::from_zeta(&zeta))
    }

    pub fn blocks(&self) -> &[(u32, Vec<u32>)] {
        &self.blocks
    }

    pub fn zeta(&self) -> Vec<Slot> {
        self.blocks
            .iter()
            .flat_map(|(k, cols)| cols.iter().map(move |&l| (*k, l)))
            .collect()
    }

    pub fn flat(&self) -> Vec<u32> {
        self.blocks.iter().flat_map(|(_, c)| c.iter().copied()).collect()
    }

    pub fn s_vector(&self) -> SVector {
        let len = self.blocks.last().map(|(k, _)| *k + 1).unwrap_or(0);
        let mut v = vec![0; len as usize];
        for (k, cols) in &self.blocks {
            v[*k as usize] = cols.len() as u32;
        }
        SVector::new(v)
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|(_, c)| c.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Removes the entry at flattened position `pos`.
    pub fn del_position(&self, pos: usize) -> IndexSeq {
        let mut zeta = self.zeta();
        zeta.remove(pos);
        IndexSeq::from_zeta(&zeta)
    }

    /// Removes the first occurrence of column `i`.
    pub fn del_value(&self, i: u32) -> Option<IndexSeq> {
        c_pos(i, self).map(|pos| self.del_position(pos))
    }

    /// Deletes `ζ` row `q`, which must be empty, moving later rows down.
    pub fn del_row(&self, q: u32) -> IndexSeq {
        assert!(
            self.blocks.iter().all(|(k, _)| *k != q),
            "row {q} still carries ζ entries"
        );
        IndexSeq {
            blocks: self
                .blocks
                .iter()
                .map(|(k, c)| (if *k > q { k - 1 } else { *k }, c.clone()))
                .collect(),
        }
    }
}

/// Upper sequence `i^1, …, i^r` with every entry a positive column index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpperSeq(Vec<u32>);

impl UpperSeq {
    pub fn new(entries: Vec<u32>) -> UpperSeq {
        assert!(entries.iter().all(|&i| i >= 1), "upper sequence entries are positive");
        UpperSeq(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Deletes `i^q` (`q` starts at 1).
    pub fn del(&self, q: usize) -> UpperSeq {
        let mut v = self.0.clone();
        v.remove(q - 1);
        UpperSeq(v)
    }

    /// Exponents of `θ_{ī}^{-1}`.
    pub fn inverse_theta_exps(&self) -> Vec<(u32, i32)> {
        self.0.iter().map(|&i| (i, -1)).collect()
    }
}

/// `a(j, s) = Π_l s_l! / Π_{p>=1} Π_{q=0}^{s_{p-1}} max{1, q + Σ_{k>=p} j_k + Σ_{l>=p} s_l}`.
pub fn coeff_a(j: &JMatrix, s: &SVector) -> BigRational {
    let mut den = BigInt::one();
    let last = j.max_row().max(s.len()) + 1;
    for p in 1..=last {
        let tail = j.tail_sum(p) + s.tail_sum(p);
        for q in 0..=s.get(p - 1) {
            den *= BigInt::from((q + tail).max(1));
        }
    }
    BigRational::new(s.factorial_product(), den)
}

/// Signed `e` generator `e_{i, ī}`: the lower entries followed by the upper
/// ones, sorted. `None` if an index repeats.
pub fn sign_e(lower: &[u32], upper: &[u32]) -> Option<(Sign, Vec<u32>)> {
    let mut v: Vec<u32> = lower.iter().chain(upper).copied().collect();
    let mut inversions = 0usize;
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            match v[a].cmp(&v[b]) {
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    v.sort_unstable();
    Some((Sign::from_parity(inversions % 2 == 1), v))
}

/// Zero-based position of the first occurrence of column `i` in the
/// flattened sequence.
pub fn c_pos(i: u32, seq: &IndexSeq) -> Option<usize> {
    seq.flat().iter().position(|&x| x == i)
}

/// Which rows of `j` may be empty during enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFill {
    /// Every row `1..=r` has positive row sum; exactly the triples that
    /// contribute to the solution.
    Occupied,
    /// All exponent matrices supported in rows `1..=r`.
    Any,
}

/// One element `(j, s, i)` of `T_m(r, s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TTriple {
    pub j: JMatrix,
    pub s: SVector,
    pub i: IndexSeq,
}

type TripleKey = (u32, Vec<(Slot, u32)>, Vec<u32>, Vec<Slot>);

impl TTriple {
    pub fn degree(&self) -> u32 {
        self.j.total() + self.s.total()
    }

    fn sort_key(&self) -> TripleKey {
        (
            self.degree(),
            self.j.entries().collect(),
            self.s.values().to_vec(),
            self.i.zeta(),
        )
    }
}

/// Weak compositions of `total` into `parts` parts, lexicographic.
pub(crate) fn weak_compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in weak_compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Increasing `size`-subsets of `1..=n`, lexicographic.
pub(crate) fn subsets(n: u32, size: u32) -> Vec<Vec<u32>> {
    fn go(start: u32, n: u32, size: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() as u32 == size {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            cur.push(x);
            go(x + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, size, &mut Vec::new(), &mut out);
    out
}

fn j_matrices(r: u32, n: u32, max_total: u32, fill: RowFill) -> Vec<JMatrix> {
    let cells: Vec<Slot> = (1..=r).flat_map(|k| (1..=n).map(move |l| (k, l))).collect();
    let mut out = Vec::new();
    for total in 0..=max_total {
        for comp in weak_compositions(total, cells.len()) {
            let j = JMatrix::from_entries(cells.iter().copied().zip(comp));
            if fill == RowFill::Occupied && (1..=r).any(|k| j.row_sum(k) == 0) {
                continue;
            }
            out.push(j);
        }
    }
    out
}

/// `T_m(r, s)`: rows `<= r`, columns `<= n`, `Σ s_l = s` and total degree
/// `< m`, in the order `(degree, j, s, i)`.
pub fn enumerate_t_with(r: u32, s: u32, params: &TruncationParams, fill: RowFill) -> Vec<TTriple> {
    if s >= params.m {
        return Vec::new();
    }
    let max_j = params.m - 1 - s;
    let js = j_matrices(r, params.n, max_j, fill);
    let mut out = Vec::new();
    for svals in weak_compositions(s, r as usize + 1) {
        let svec = SVector::new(svals.iter().copied());
        let mut seqs: Vec<Vec<(u32, Vec<u32>)>> = vec![vec![]];
        for (row, &count) in svals.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let choices = subsets(params.n, count);
            seqs = seqs
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |c| {
                        let mut p = prefix.clone();
                        p.push((row as u32, c.clone()));
                        p
                    })
                })
                .collect();
        }
        for blocks in seqs {
            let seq = IndexSeq::from_blocks(blocks).expect("increasing blocks");
            for j in &js {
                out.push(TTriple {
                    j: j.clone(),
                    s: svec.clone(),
                    i: seq.clone(),
                });
            }
        }
    }
    out.sort_by_cached_key(|t| t.sort_key());
    out
}

/// [`enumerate_t_with`] restricted to occupied rows, the support of the
/// solution sum.
pub fn enumerate_t(r: u32, s: u32, params: &TruncationParams) -> Vec<TTriple> {
    enumerate_t_with(r, s, params, RowFill::Occupied)
}

/// Upper sequences `ī ∈ T(r)` with `j_{k, i^k} > 0` for every `k <= r`;
/// the other choices have zero weight.
pub fn enumerate_tr(r: u32, j: &JMatrix) -> Vec<UpperSeq> {
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for k in 1..=r {
        let support = j.row_support(k);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                support.iter().map(move |&l| {
                    let mut p = prefix.clone();
                    p.push(l);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(UpperSeq).collect()
}

/// All upper sequences of length `r` over columns `1..=n`.
pub fn all_upper(r: u32, n: u32) -> Vec<UpperSeq> {
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=n).map(move |l| {
                    let mut p = prefix.clone();
                    p.push(l);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(UpperSeq).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn a_without_h_is_one() {
        for s in 0..6 {
            assert_eq!(coeff_a(&JMatrix::new(), &SVector::new([s])), q(1, 1));
        }
        assert_eq!(coeff_a(&JMatrix::new(), &SVector::new([])), q(1, 1));
    }

    #[test]
    fn a_single_row() {
        for total in 1..6u32 {
            let j = JMatrix::from_entries([((1, 1), total - 1), ((1, 2), 1)]);
            assert_eq!(coeff_a(&j, &SVector::default()), q(1, total as i64));
        }
    }

    #[test]
    fn a_by_hand() {
        // j row1 = 1, s = (1, 1): numerator 1;
        // p=1: q=0..1 -> max{1, 0+1+1}=2, max{1, 1+2}=3; p=2: q=0..1 -> 1, 1
        let j = JMatrix::unit(1, 1);
        assert_eq!(coeff_a(&j, &SVector::new([1, 1])), q(1, 6));
    }

    #[test]
    fn sign_e_cases() {
        assert_eq!(sign_e(&[2], &[1]), Some((Sign::Minus, vec![1, 2])));
        assert_eq!(sign_e(&[1], &[1]), None);
        assert_eq!(sign_e(&[], &[]), Some((Sign::Plus, vec![])));
    }

    #[test]
    fn c_pos_cases() {
        let seq = IndexSeq::from_zeta(&[(0, 3), (0, 5)]);
        assert_eq!(c_pos(3, &seq), Some(0));
        assert_eq!(c_pos(5, &seq), Some(1));
        assert_eq!(c_pos(4, &seq), None);
        let seq = IndexSeq::from_zeta(&[(0, 2), (1, 4), (1, 7)]);
        assert_eq!(c_pos(7, &seq), Some(2));
    }

    #[test]
    fn surgeries() {
        let j = JMatrix::from_entries([((1, 1), 1), ((2, 1), 1)]);
        assert_eq!(j.merge_rows(1), JMatrix::from_entries([((1, 1), 2)]));
        assert_eq!(j.del_row(1), JMatrix::from_entries([((1, 1), 1)]));
        assert_eq!(SVector::new([0, 1]).del(0), SVector::new([1]));
        let seq = IndexSeq::from_zeta(&[(0, 3), (0, 5)]);
        assert_eq!(seq.del_value(5), Some(IndexSeq::from_zeta(&[(0, 3)])));
    }

    #[test]
    fn enumerate_small() {
        let params = TruncationParams::new(2, 1, 3).unwrap();
        let t = enumerate_t(0, 1, &params);
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].i.flat(), vec![1]);
        assert_eq!(t[1].i.flat(), vec![2]);
        assert!(t.iter().all(|x| x.j.is_zero() && x.s == SVector::new([1])));

        let t = enumerate_t(0, 0, &params);
        assert_eq!(t.len(), 1);
        assert!(t[0].j.is_zero() && t[0].i.is_empty());

        let params = TruncationParams::new(1, 1, 3).unwrap();
        assert_eq!(enumerate_t(1, 0, &params).len(), 2);
        assert_eq!(enumerate_t_with(1, 0, &params, RowFill::Any).len(), 3);
    }

    #[test]
    fn upper_sequences() {
        let j = JMatrix::from_entries([((1, 1), 2)]);
        assert_eq!(enumerate_tr(1, &j), vec![UpperSeq::new(vec![1])]);
        let j = JMatrix::from_entries([((1, 1), 1), ((2, 1), 1), ((2, 2), 1)]);
        assert_eq!(
            enumerate_tr(2, &j),
            vec![UpperSeq::new(vec![1, 1]), UpperSeq::new(vec![1, 2])]
        );
        let r0 = enumerate_tr(0, &JMatrix::new());
        assert_eq!(r0, vec![UpperSeq::default()]);
        assert_eq!(JMatrix::new().weight_at(&r0[0]), 1);
    }
}
