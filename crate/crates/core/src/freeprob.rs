//! Non-crossing partitions, free cumulants of a single plaquette variable and
//! moments of words in free plaquette variables.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::poly::{BetaPolynomial, Rational};

/// Default largest size for partition enumeration and words.
pub const DEFAULT_NC_BOUND: usize = 14;

/// A set partition of {0..n-1}, stored as a restricted growth string.
/// Displayed 1-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Partition {
    labels: Vec<u8>,
}

pub type NCPartition = Partition;

impl Partition {
    /// Relabel an arbitrary block assignment into restricted growth form.
    pub fn from_labels(raw: &[usize]) -> Partition {
        let mut map: HashMap<usize, u8> = HashMap::new();
        let labels = raw
            .iter()
            .map(|r| {
                let next = map.len() as u8;
                *map.entry(*r).or_insert(next)
            })
            .collect();
        Partition { labels }
    }

    /// From 0-based blocks covering {0..n-1}.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition> {
        let mut raw = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                if i >= n || raw[i] != usize::MAX {
                    return Err(Error::Invalid(format!("blocks do not partition 0..{n}")));
                }
                raw[i] = b;
            }
        }
        if raw.contains(&usize::MAX) {
            return Err(Error::Invalid(format!("blocks do not cover 0..{n}")));
        }
        Ok(Partition::from_labels(&raw))
    }

    pub fn zero(n: usize) -> Partition {
        Partition { labels: (0..n as u8).collect() }
    }

    pub fn one(n: usize) -> Partition {
        Partition { labels: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks().iter().map(Vec::len).collect()
    }

    pub fn is_noncrossing(&self) -> bool {
        let n = self.n();
        for a in 0..n {
            for b in a + 1..n {
                if self.labels[b] == self.labels[a] {
                    continue;
                }
                for c in b + 1..n {
                    if self.labels[c] != self.labels[a] {
                        continue;
                    }
                    for d in c + 1..n {
                        if self.labels[d] == self.labels[b] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `self ⪯ other`: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.n() == other.n()
            && self.blocks().iter().all(|b| b.iter().all(|&i| other.labels[i] == other.labels[b[0]]))
    }

    /// Restriction to the given positions, relabelled 0..positions.len().
    pub fn restrict(&self, positions: &[usize]) -> Partition {
        let raw: Vec<usize> = positions.iter().map(|&i| self.labels[i] as usize).collect();
        Partition::from_labels(&raw)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.blocks() {
            write!(f, "{{")?;
            for (i, x) in b.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

fn check_bound(n: usize, bound: usize) -> Result<()> {
    if n > bound {
        return Err(Error::Bound(format!("size {n} exceeds the configured bound {bound}")));
    }
    Ok(())
}

/// All non-crossing partitions of {0..n-1}. Each element either opens a block
/// or joins one of the still open blocks, closing every block opened after it.
pub fn enumerate_nc_bounded(n: usize, bound: usize) -> Result<Vec<Partition>> {
    check_bound(n, bound)?;
    fn rec(i: usize, n: usize, labels: &mut Vec<u8>, open: &mut Vec<u8>, next: u8, out: &mut Vec<Partition>) {
        if i == n {
            out.push(Partition { labels: labels.clone() });
            return;
        }
        open.push(next);
        labels.push(next);
        rec(i + 1, n, labels, open, next + 1, out);
        labels.pop();
        open.pop();
        for s in 0..open.len() {
            let saved: Vec<u8> = open.drain(s + 1..).collect();
            labels.push(open[s]);
            rec(i + 1, n, labels, open, next, out);
            labels.pop();
            open.extend(saved);
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::with_capacity(n), &mut Vec::new(), 0, &mut out);
    Ok(out)
}

pub fn enumerate_nc(n: usize) -> Result<Vec<Partition>> {
    enumerate_nc_bounded(n, DEFAULT_NC_BOUND)
}

pub fn is_noncrossing(p: &Partition) -> bool {
    p.is_noncrossing()
}

pub fn catalan(n: usize) -> BigInt {
    let mut c = vec![BigInt::one()];
    for m in 1..=n {
        let mut s = BigInt::zero();
        for i in 0..m {
            s += &c[i] * &c[m - 1 - i];
        }
        c.push(s);
    }
    c[n].clone()
}

/// Kreweras complement: barred point i sits between i and i+1, and barred
/// points i<j share a block iff {i+1..=j} is a union of blocks of `p`.
pub fn kreweras(p: &Partition) -> Partition {
    let n = p.n();
    let blocks = p.blocks();
    let mut raw: Vec<usize> = (0..n).collect();
    for i in 0..n {
        if raw[i] != i {
            continue;
        }
        for j in i + 1..n {
            let closed = blocks.iter().all(|b| {
                let inside = b.iter().filter(|&&x| x > i && x <= j).count();
                inside == 0 || inside == b.len()
            });
            if closed {
                raw[j] = i;
            }
        }
    }
    Partition::from_labels(&raw)
}

/// μ(0, π) = Π over blocks of (−1)^{|V|−1} C_{|V|−1}.
pub fn mobius_from_zero(p: &Partition) -> BigInt {
    p.block_sizes()
        .into_iter()
        .map(|s| {
            let c = catalan(s - 1);
            if s % 2 == 0 {
                -c
            } else {
                c
            }
        })
        .product()
}

/// μ(π, σ) for π ⪯ σ, from the factorization of the interval over the blocks
/// of σ and the Kreweras anti-isomorphism on each factor.
pub fn mobius(p: &Partition, s: &Partition) -> Result<BigInt> {
    if !p.refines(s) {
        return Err(Error::Invalid(format!("{p} does not refine {s}")));
    }
    Ok(s.blocks().iter().map(|w| mobius_from_zero(&kreweras(&p.restrict(w)))).product())
}

/// Moment φ(a^m) of one plaquette variable in the large-N limit.
pub fn single_variable_moment(m: i64) -> BetaPolynomial {
    match m.unsigned_abs() {
        0 => BetaPolynomial::one(),
        1 => BetaPolynomial::beta(),
        _ => BetaPolynomial::zero(),
    }
}

/// Subsets of `rest` (as index lists), each combined with a fixed first
/// element; calls `f` for every proper or full choice.
fn for_each_subset(rest: &[usize], f: &mut dyn FnMut(&[usize])) {
    let r = rest.len();
    let mut chosen = Vec::with_capacity(r);
    for mask in 0u64..(1u64 << r) {
        chosen.clear();
        for (b, &x) in rest.iter().enumerate() {
            if mask >> b & 1 == 1 {
                chosen.push(x);
            }
        }
        f(&chosen);
    }
}

/// Cached free cumulants of a single plaquette variable and its powers.
#[derive(Clone, Debug)]
pub struct FreeOracle {
    pub bound: usize,
    cumulants: FxHashMap<Vec<i64>, BetaPolynomial>,
}

impl Default for FreeOracle {
    fn default() -> Self {
        FreeOracle::new(DEFAULT_NC_BOUND)
    }
}

impl FreeOracle {
    pub fn new(bound: usize) -> FreeOracle {
        FreeOracle { bound, cumulants: FxHashMap::default() }
    }

    pub fn table_len(&self) -> usize {
        self.cumulants.len()
    }

    /// k_m(a^{s_1}, …, a^{s_m}): the moment of the product minus the sum over
    /// every non-maximal non-crossing partition, organised by the block of the
    /// first element.
    pub fn cumulant(&mut self, s: &[i64]) -> Result<BetaPolynomial> {
        if s.is_empty() {
            return Err(Error::Invalid("cumulant of zero arguments".into()));
        }
        check_bound(s.len(), self.bound)?;
        if let Some(v) = self.cumulants.get(s) {
            return Ok(v.clone());
        }
        let m = s.len();
        let total: i64 = s.iter().sum();
        let mut value = single_variable_moment(total);
        let rest: Vec<usize> = (1..m).collect();
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        for_each_subset(&rest, &mut |c| {
            if c.len() + 1 < m {
                subsets.push(c.to_vec());
            }
        });
        for c in subsets {
            let mut block = vec![0usize];
            block.extend_from_slice(&c);
            let mut term = self.cumulant(&block.iter().map(|&i| s[i]).collect::<Vec<_>>())?;
            let mut bounds = block.clone();
            bounds.push(m);
            for w in bounds.windows(2) {
                let gap: i64 = s[w[0] + 1..w[1]].iter().sum();
                if w[1] > w[0] + 1 {
                    term = &term * &single_variable_moment(gap);
                }
            }
            value = &value - &term;
        }
        self.cumulants.insert(s.to_vec(), value.clone());
        Ok(value)
    }

    /// φ of a word in free plaquette variables: the sum over non-crossing
    /// partitions whose blocks each use a single generator, of the product of
    /// block cumulants. The word is cyclically reduced first.
    pub fn word_moment<G: Clone + Eq + Hash>(&mut self, w: &FreeWord<G>) -> Result<BetaPolynomial> {
        let w = w.cyclically_reduced();
        let n = w.len();
        check_bound(n, self.bound)?;
        let mut memo: FxHashMap<(usize, usize), BetaPolynomial> = FxHashMap::default();
        self.interval_moment(&w, 0, n, &mut memo)
    }

    fn interval_moment<G: Clone + Eq + Hash>(
        &mut self,
        w: &FreeWord<G>,
        i: usize,
        j: usize,
        memo: &mut FxHashMap<(usize, usize), BetaPolynomial>,
    ) -> Result<BetaPolynomial> {
        if i >= j {
            return Ok(BetaPolynomial::one());
        }
        if let Some(v) = memo.get(&(i, j)) {
            return Ok(v.clone());
        }
        let letters = w.letters();
        let g = &letters[i].0;
        let same: Vec<usize> = (i + 1..j).filter(|&t| letters[t].0 == *g).collect();
        let mut choices: Vec<Vec<usize>> = Vec::new();
        for_each_subset(&same, &mut |c| choices.push(c.to_vec()));
        let mut total = BetaPolynomial::zero();
        for c in choices {
            let mut block = vec![i];
            block.extend_from_slice(&c);
            let exps: Vec<i64> = block.iter().map(|&t| letters[t].1 as i64).collect();
            let mut term = self.cumulant(&exps)?;
            if term.is_zero() {
                continue;
            }
            let mut bounds = block.clone();
            bounds.push(j);
            for win in bounds.windows(2) {
                let gap = self.interval_moment(w, win[0] + 1, win[1], memo)?;
                term = &term * &gap;
                if term.is_zero() {
                    break;
                }
            }
            total += &term;
        }
        memo.insert((i, j), total.clone());
        Ok(total)
    }
}

pub fn cumulant(s: &[i64]) -> Result<BetaPolynomial> {
    FreeOracle::default().cumulant(s)
}

pub fn word_moment<G: Clone + Eq + Hash>(w: &FreeWord<G>) -> Result<BetaPolynomial> {
    FreeOracle::default().word_moment(w)
}

/// E cos^k Θ for the limiting angle density (1 + 2β cos θ)/2π.
pub fn spectral_moment(k: u32) -> BetaPolynomial {
    let binom = |n: u64, r: u64| -> BigInt { (0..r).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1)) };
    let k64 = k as u64;
    if k == 0 {
        return BetaPolynomial::one();
    }
    if k % 2 == 1 {
        let c = Rational::new(binom(k64, (k64 - 1) / 2), BigInt::one() << (k - 1));
        BetaPolynomial::monomial(1, c)
    } else {
        let c = Rational::new(binom(k64, k64 / 2), BigInt::one() << k);
        BetaPolynomial::monomial(0, c)
    }
}

/// A word in free generators; adjacent letters always carry distinct
/// generators and nonzero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FreeWord<G> {
    letters: Vec<(G, i32)>,
}

impl<G: Clone + Eq> Default for FreeWord<G> {
    fn default() -> Self {
        FreeWord { letters: Vec::new() }
    }
}

impl<G: Clone + Eq> FreeWord<G> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_letters(it: impl IntoIterator<Item = (G, i32)>) -> Self {
        let mut w = Self::new();
        for (g, e) in it {
            w.push(g, e);
        }
        w
    }

    /// Append a letter, merging with the last one when the generator repeats.
    pub fn push(&mut self, g: G, e: i32) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((g, e));
    }

    pub fn letters(&self) -> &[(G, i32)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &FreeWord<G>) -> FreeWord<G> {
        let mut w = self.clone();
        for (g, e) in &other.letters {
            w.push(g.clone(), *e);
        }
        w
    }

    pub fn inverse(&self) -> FreeWord<G> {
        FreeWord { letters: self.letters.iter().rev().map(|(g, e)| (g.clone(), -e)).collect() }
    }

    pub fn pow(&self, k: usize) -> FreeWord<G> {
        (0..k).fold(FreeWord::new(), |acc, _| acc.concat(self))
    }

    /// Sum of exponent magnitudes.
    pub fn degree(&self) -> usize {
        self.letters.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    /// Conjugate to a word whose first and last letters differ in generator.
    pub fn cyclically_reduced(&self) -> FreeWord<G> {
        let mut l = self.letters.clone();
        while l.len() >= 2 && l[0].0 == l[l.len() - 1].0 {
            let (_, e) = l.pop().expect("nonempty");
            l[0].1 += e;
            if l[0].1 == 0 {
                l.remove(0);
            }
        }
        FreeWord { letters: l }
    }

    pub fn rotate(&self, k: usize) -> FreeWord<G> {
        let n = self.letters.len();
        if n == 0 {
            return self.clone();
        }
        FreeWord::from_letters(self.letters[k % n..].iter().chain(self.letters[..k % n].iter()).cloned())
    }
}

impl<G: fmt::Display> fmt::Display for FreeWord<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, (g, e)) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if *e == 1 {
                write!(f, "q{g}")?;
            } else {
                write!(f, "q{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Commutator word (a b a⁻¹ b⁻¹)^k in two abstract generators.
pub fn commutator_word(k: usize) -> FreeWord<u32> {
    FreeWord::from_letters([(0, 1), (1, 1), (0, -1), (1, -1)]).pow(k)
}

/// Free cumulants from moments m_1..m_n of one variable by the recursive
/// inversion κ_n = m_n − Σ_{π≠1} κ_π.
pub fn cumulants_by_inversion(moments: &[Rational]) -> Result<Vec<Rational>> {
    let n = moments.len();
    check_bound(n, DEFAULT_NC_BOUND)?;
    let mut k: Vec<Rational> = Vec::with_capacity(n);
    for size in 1..=n {
        let mut v = moments[size - 1].clone();
        for p in enumerate_nc(size)? {
            if p.num_blocks() == 1 {
                continue;
            }
            v -= p.block_sizes().iter().map(|&s| k[s - 1].clone()).product::<Rational>();
        }
        k.push(v);
    }
    Ok(k)
}

/// Moments from free cumulants: m_n = Σ_π κ_π.
pub fn moments_from_cumulants(k: &[Rational]) -> Result<Vec<Rational>> {
    (1..=k.len())
        .map(|size| {
            Ok(enumerate_nc(size)?
                .iter()
                .map(|p| p.block_sizes().iter().map(|&s| k[s - 1].clone()).product::<Rational>())
                .sum())
        })
        .collect()
}

/// Free cumulants by Möbius inversion: κ_n = Σ_π m_π μ(π, 1_n).
pub fn cumulants_by_mobius(moments: &[Rational]) -> Result<Vec<Rational>> {
    (1..=moments.len())
        .map(|size| {
            let one = Partition::one(size);
            let mut acc = Rational::zero();
            for p in enumerate_nc(size)? {
                let mp: Rational = p.block_sizes().iter().map(|&s| moments[s - 1].clone()).product();
                acc += mp * Rational::from_integer(mobius(&p, &one)?);
            }
            Ok(acc)
        })
        .collect()
}

/// Result of enumerating admissible partitions of an alternating commutator
/// word: blocks are singletons or a letter paired with an inverse of the same
/// generator, and the partition is non-crossing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingletonCensus {
    pub n: usize,
    pub partitions: u64,
    pub min_singletons: usize,
}

/// The word a b a⁻¹ b⁻¹ a b … of length n, as (generator, exponent).
pub fn alternating_word(n: usize) -> Vec<(u8, i8)> {
    const CYCLE: [(u8, i8); 4] = [(0, 1), (1, 1), (0, -1), (1, -1)];
    (0..n).map(|i| CYCLE[i % 4]).collect()
}

pub fn singleton_census(word: &[(u8, i8)]) -> SingletonCensus {
    // Pending intervals on a stack: the top interval either starts with a
    // singleton or pairs its first letter with a later inverse.
    fn rec(word: &[(u8, i8)], stack: &mut Vec<(usize, usize)>, singles: usize, out: &mut SingletonCensus) {
        let Some((lo, hi)) = stack.pop() else {
            out.partitions += 1;
            out.min_singletons = out.min_singletons.min(singles);
            return;
        };
        if lo == hi {
            rec(word, stack, singles, out);
        } else {
            stack.push((lo + 1, hi));
            rec(word, stack, singles + 1, out);
            stack.pop();
            for j in lo + 1..hi {
                if word[j].0 == word[lo].0 && word[j].1 == -word[lo].1 {
                    stack.push((j + 1, hi));
                    stack.push((lo + 1, j));
                    rec(word, stack, singles, out);
                    stack.pop();
                    stack.pop();
                }
            }
        }
        stack.push((lo, hi));
    }
    let mut out = SingletonCensus { n: word.len(), partitions: 0, min_singletons: usize::MAX };
    rec(word, &mut vec![(0, word.len())], 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    #[test]
    fn small_nc_counts() {
        assert_eq!(enumerate_nc(1).unwrap().len(), 1);
        assert_eq!(enumerate_nc(3).unwrap().len(), 5);
        assert_eq!(enumerate_nc(4).unwrap().len(), 14);
        assert!(enumerate_nc(15).is_err());
    }

    #[test]
    fn crossing_examples() {
        let crossing = Partition::from_blocks(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        let nested = Partition::from_blocks(4, &[vec![0, 3], vec![1, 2]]).unwrap();
        assert!(!crossing.is_noncrossing());
        assert!(nested.is_noncrossing());
        assert!(Partition::one(5).is_noncrossing());
    }

    #[test]
    fn kreweras_examples() {
        assert_eq!(kreweras(&Partition::zero(5)), Partition::one(5));
        assert_eq!(kreweras(&Partition::one(5)), Partition::zero(5));
        let p = Partition::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(kreweras(&p).to_string(), "{1}{2,4}{3}");
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius_from_zero(&Partition::one(3)), BigInt::from(2));
        assert_eq!(mobius_from_zero(&Partition::zero(4)), BigInt::from(1));
        let p = Partition::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(mobius_from_zero(&p), BigInt::from(1));
    }

    #[test]
    fn cumulant_examples() {
        assert_eq!(cumulant(&[1]).unwrap(), BetaPolynomial::beta());
        assert_eq!(cumulant(&[-1]).unwrap(), BetaPolynomial::beta());
        assert_eq!(cumulant(&[1, -1]).unwrap(), BetaPolynomial::from_ints(&[1, 0, -1]));
        assert_eq!(single_variable_moment(2), BetaPolynomial::zero());
    }

    #[test]
    fn word_moment_examples() {
        let a = FreeWord::from_letters([(0u32, 1)]);
        assert_eq!(word_moment(&a).unwrap(), BetaPolynomial::beta());
        let ab = FreeWord::from_letters([(0u32, 1), (1, 1)]);
        assert_eq!(word_moment(&ab).unwrap(), BetaPolynomial::monomial(2, int(1)));
        let c1 = word_moment(&commutator_word(1)).unwrap();
        assert_eq!(c1, BetaPolynomial::from_ints(&[0, 0, 2, 0, -1]));
    }

    #[test]
    fn spectral_examples() {
        assert_eq!(spectral_moment(1), BetaPolynomial::beta());
        assert_eq!(spectral_moment(2), BetaPolynomial::monomial(0, rat(1, 2)));
        assert_eq!(spectral_moment(3), BetaPolynomial::monomial(1, rat(3, 4)));
    }
}
