//! Coefficients a_k of Wilson loop expectations from the loop-equation
//! recursion, memoized on (sorted loop multiset, k).

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::gauge;
use crate::lattice::{plaquettes_containing, DirectedEdge, Loop, LoopSequence, Plaquette};
use crate::ops::{deform_neg, deform_pos, split_neg, split_pos};
use crate::poly::{BetaPolynomial, Rational};

/// Which edge of the first loop the recursion is rooted at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgePolicy {
    /// Lexicographically smallest edge (by lower endpoint, then axis).
    LexMin,
    /// Highest edge along axis 0, ties broken lexicographically.
    TopmostHorizontal,
    /// A pseudo-random edge, a pure function of the loop and the seed.
    Seeded(u64),
}

impl FromStr for EdgePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lex" | "lexmin" => Ok(EdgePolicy::LexMin),
            "top" | "topmost" => Ok(EdgePolicy::TopmostHorizontal),
            _ => match s.strip_prefix("random:").or_else(|| s.strip_prefix("seeded:")) {
                Some(seed) => seed
                    .parse()
                    .map(EdgePolicy::Seeded)
                    .map_err(|_| Error::Parse { pos: 0, msg: format!("bad policy seed {seed:?}") }),
                None => Err(Error::Parse { pos: 0, msg: format!("unknown edge policy {s:?}") }),
            },
        }
    }
}

impl fmt::Display for EdgePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgePolicy::LexMin => write!(f, "lex"),
            EdgePolicy::TopmostHorizontal => write!(f, "top"),
            EdgePolicy::Seeded(s) => write!(f, "random:{s}"),
        }
    }
}

fn mix(mut h: u64, v: u64) -> u64 {
    h ^= v.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^ (h >> 31)
}

/// The positively oriented edge the recursion expands about.
pub fn root_edge(l: &Loop, policy: EdgePolicy) -> DirectedEdge {
    let mut edges: Vec<DirectedEdge> = l.edges().iter().map(|e| e.positive()).collect();
    edges.sort();
    edges.dedup();
    let top = || {
        edges
            .iter()
            .filter(|e| e.step.axis() == 0)
            .max_by(|a, b| a.tail.get(1).cmp(&b.tail.get(1)).then_with(|| b.cmp(a)))
            .cloned()
    };
    match policy {
        EdgePolicy::LexMin => edges[0].clone(),
        EdgePolicy::TopmostHorizontal => top().unwrap_or_else(|| edges[0].clone()),
        EdgePolicy::Seeded(seed) => {
            let h = l.steps().iter().fold(mix(0, seed), |h, s| mix(h, s.code() as u64));
            edges[(h % edges.len() as u64) as usize].clone()
        }
    }
}

/// One term of the expansion: `weight / m · a_k(seq)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub weight: i64,
    pub seq: Vec<Loop>,
    pub k: usize,
}

/// The expansion of a_k(seq) about the root edge of the first loop, with a
/// common denominator `m` (the multiplicity of the root edge). Identical
/// successor states are merged. `seq` must be sorted and non-empty.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub root: DirectedEdge,
    pub m: usize,
    pub terms: Vec<Term>,
}

fn normalize(mut seq: Vec<Loop>, identify_reversal: bool) -> Vec<Loop> {
    seq.retain(|l| !l.is_null());
    if identify_reversal {
        for l in seq.iter_mut() {
            let inv = l.inverse();
            if inv < *l {
                *l = inv;
            }
        }
    }
    seq.sort_unstable();
    seq
}

pub fn expand(seq: &[Loop], k: usize, policy: EdgePolicy, identify_reversal: bool) -> Result<Expansion> {
    let first = seq.first().ok_or_else(|| Error::Invalid("cannot expand the null sequence".into()))?;
    let rest = &seq[1..];
    let e = root_edge(first, policy);
    let r = e.reverse();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (x, f) in first.edges().into_iter().enumerate() {
        if f == e {
            a.push(x);
        } else if f == r {
            b.push(x);
        }
    }
    let m = a.len() + b.len();
    let mut acc: FxHashMap<(Vec<Loop>, usize), i64> = FxHashMap::default();
    let mut push = |w: i64, new: &[Loop], kk: usize| {
        let mut s: Vec<Loop> = rest.to_vec();
        s.extend_from_slice(new);
        let s = normalize(s, identify_reversal);
        *acc.entry((s, kk)).or_insert(0) += w;
    };
    for &x in &a {
        for &y in &b {
            let (o, i) = split_neg(first, x, y)?;
            push(2, &[o, i], k);
        }
    }
    for locs in [&a, &b] {
        for (i, &x) in locs.iter().enumerate() {
            for &y in &locs[i + 1..] {
                // (x, y) and (y, x) give the same pair of loops
                let (l1, l2) = split_pos(first, x, y)?;
                push(-2, &[l1, l2], k);
            }
        }
    }
    if k >= 1 {
        let plaqs: Vec<Plaquette> = plaquettes_containing(&e);
        for &x in a.iter().chain(b.iter()) {
            for p in &plaqs {
                push(1, &[deform_neg(first, x, p)?], k - 1);
                push(-1, &[deform_pos(first, x, p)?], k - 1);
            }
        }
    }
    let mut terms: Vec<Term> =
        acc.into_iter().filter(|(_, w)| *w != 0).map(|((seq, k), weight)| Term { weight, seq, k }).collect();
    terms.sort_by(|p, q| (p.k, &p.seq).cmp(&(q.k, &q.seq)));
    Ok(Expansion { root: e, m, terms })
}

/// Dershowitz–Manna comparison of length multisets: `a < b`.
pub fn multiset_less(a: &[usize], b: &[usize]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(|x, y| y.cmp(x));
    b.sort_unstable_by(|x, y| y.cmp(x));
    a < b
}

/// Resource limits. Exceeding any of them aborts with [`Error::Budget`].
#[derive(Clone, Debug)]
pub struct Budget {
    pub max_memo: usize,
    pub max_depth: usize,
    pub max_time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_memo: 20_000_000, max_depth: 100_000, max_time: None }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolverStats {
    pub calls: u64,
    pub hits: u64,
    pub max_depth: usize,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MemoKey {
    pub loops: Vec<Loop>,
    pub k: usize,
}

pub struct Solver {
    pub policy: EdgePolicy,
    pub budget: Budget,
    pub identify_reversal: bool,
    memo: FxHashMap<MemoKey, Rational>,
    stats: SolverStats,
    deadline: Option<Instant>,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(EdgePolicy::LexMin)
    }
}

impl Solver {
    pub fn new(policy: EdgePolicy) -> Solver {
        Solver {
            policy,
            budget: Budget::default(),
            identify_reversal: false,
            memo: FxHashMap::default(),
            stats: SolverStats::default(),
            deadline: None,
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Solver {
        self.budget = budget;
        self
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    pub fn clear(&mut self) {
        self.memo.clear();
    }

    /// a_k of a loop sequence.
    pub fn coefficient(&mut self, s: &LoopSequence, k: usize) -> Result<Rational> {
        self.deadline = self.budget.max_time.map(|t| Instant::now() + t);
        let seq = normalize(s.loops.clone(), self.identify_reversal);
        let out = self.eval(seq, k, 0);
        self.deadline = None;
        out
    }

    pub fn loop_coefficient(&mut self, l: &Loop, k: usize) -> Result<Rational> {
        self.coefficient(&LoopSequence::single(l.clone()), k)
    }

    /// Coefficients 0..=k_max, computed in increasing k under one deadline.
    pub fn polynomial(&mut self, s: &LoopSequence, k_max: usize) -> Result<BetaPolynomial> {
        self.deadline = self.budget.max_time.map(|t| Instant::now() + t);
        let seq = normalize(s.loops.clone(), self.identify_reversal);
        let mut coeffs = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            match self.eval(seq.clone(), k, 0) {
                Ok(v) => coeffs.push(v),
                Err(e) => {
                    self.deadline = None;
                    return Err(e);
                }
            }
        }
        self.deadline = None;
        Ok(BetaPolynomial::from_coeffs(coeffs))
    }

    fn eval(&mut self, seq: Vec<Loop>, k: usize, depth: usize) -> Result<Rational> {
        if seq.is_empty() {
            return Ok(if k == 0 { Rational::one() } else { Rational::zero() });
        }
        let key = MemoKey { loops: seq, k };
        self.stats.calls += 1;
        if let Some(v) = self.memo.get(&key) {
            self.stats.hits += 1;
            return Ok(v.clone());
        }
        if depth > self.budget.max_depth {
            return Err(Error::Budget(format!("recursion depth above {}", self.budget.max_depth)));
        }
        if self.memo.len() >= self.budget.max_memo {
            return Err(Error::Budget(format!("memo table above {} entries", self.budget.max_memo)));
        }
        if self.stats.calls % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(Error::Budget("wall-clock limit reached".into()));
                }
            }
        }
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let ex = expand(&key.loops, k, self.policy, self.identify_reversal)?;
        let mut acc = Rational::zero();
        for t in ex.terms {
            let v = stacker::maybe_grow(256 * 1024, 8 * 1024 * 1024, || self.eval(t.seq, t.k, depth + 1))?;
            if !v.is_zero() {
                acc += v * Rational::from_integer(BigInt::from(t.weight));
            }
        }
        acc /= Rational::from_integer(BigInt::from(ex.m as i64));
        self.memo.insert(key, acc.clone());
        Ok(acc)
    }
}

/// A polynomial together with its completeness status.
#[derive(Clone, Debug)]
pub struct PolynomialReport {
    pub poly: BetaPolynomial,
    pub k_max: usize,
    pub degree_bound: Option<usize>,
}

impl PolynomialReport {
    /// Complete when a planar degree bound is known and within range.
    pub fn certified(&self) -> bool {
        self.degree_bound.is_some_and(|b| b <= self.k_max)
    }
}

pub fn polynomial_report(solver: &mut Solver, s: &LoopSequence, k_max: usize) -> Result<PolynomialReport> {
    let poly = solver.polynomial(s, k_max)?;
    let degree_bound = match s.loops.as_slice() {
        [l] if l.dim() == 2 => Some(gauge::degree_bound(l)?),
        [] => Some(0),
        _ => None,
    };
    Ok(PolynomialReport { poly, k_max, degree_bound })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveKind {
    DeformPos,
    DeformNeg,
    SplitPos,
    SplitNeg,
}

impl MoveKind {
    pub fn is_deformation(self) -> bool {
        matches!(self, MoveKind::DeformPos | MoveKind::DeformNeg)
    }
}

/// One step of a string trajectory. Locations and the plaquette refer to the
/// canonical frame of the target loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    pub loop_index: usize,
    pub x: usize,
    pub y: usize,
    pub plaquette: Option<Plaquette>,
}

impl Move {
    pub fn deform(kind: MoveKind, loop_index: usize, x: usize, p: Plaquette) -> Move {
        Move { kind, loop_index, x, y: 0, plaquette: Some(p) }
    }

    pub fn split(kind: MoveKind, loop_index: usize, x: usize, y: usize) -> Move {
        Move { kind, loop_index, x, y, plaquette: None }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MoveKind::DeformPos | MoveKind::DeformNeg => {
                let tag = if self.kind == MoveKind::DeformPos { "DEF+" } else { "DEF-" };
                let p = self.plaquette.as_ref().expect("deformation carries a plaquette");
                write!(f, "{tag} loop={} loc={} plq={p}", self.loop_index, self.x)
            }
            MoveKind::SplitPos | MoveKind::SplitNeg => {
                let tag = if self.kind == MoveKind::SplitPos { "SPLIT+" } else { "SPLIT-" };
                write!(f, "{tag} loop={} x={} y={}", self.loop_index, self.x, self.y)
            }
        }
    }
}

/// Result loops of a move on one loop, in sequence order (nulls included).
pub fn move_results(l: &Loop, mv: &Move) -> Result<Vec<Loop>> {
    let plaq = || mv.plaquette.as_ref().ok_or_else(|| Error::InapplicableMove("deformation without plaquette".into()));
    Ok(match mv.kind {
        MoveKind::DeformPos => vec![deform_pos(l, mv.x, plaq()?)?],
        MoveKind::DeformNeg => vec![deform_neg(l, mv.x, plaq()?)?],
        MoveKind::SplitPos => {
            let (a, b) = split_pos(l, mv.x, mv.y)?;
            vec![a, b]
        }
        MoveKind::SplitNeg => {
            let (a, b) = split_neg(l, mv.x, mv.y)?;
            vec![a, b]
        }
    })
}

/// Successor sequence: the target loop is replaced in place by the move's
/// results, null loops dropped.
pub fn apply_move(s: &LoopSequence, mv: &Move) -> Result<LoopSequence> {
    let l = s.loops.get(mv.loop_index).ok_or_else(|| {
        Error::InapplicableMove(format!("loop index {} outside sequence of {}", mv.loop_index, s.len()))
    })?;
    let mut out: Vec<Loop> = s.loops[..mv.loop_index].to_vec();
    out.extend(move_results(l, mv)?);
    out.extend_from_slice(&s.loops[mv.loop_index + 1..]);
    Ok(LoopSequence::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ClosedWalk, Site, Step};
    use crate::poly::int;

    fn lp(s: &str) -> Loop {
        let steps: Vec<Step> = s
            .split_whitespace()
            .map(|t| Step::new("xyzw".find(&t[..1]).unwrap(), t.ends_with('+')))
            .collect();
        crate::lattice::erase_backtracks(&ClosedWalk::new(Site::origin(2), steps).unwrap())
    }

    #[test]
    fn plaquette_is_beta() {
        let mut s = Solver::default();
        let p = LoopSequence::single(lp("y+ x+ y- x-"));
        assert_eq!(s.polynomial(&p, 4).unwrap(), BetaPolynomial::beta());
    }

    #[test]
    fn null_sequence() {
        let mut s = Solver::default();
        assert_eq!(s.coefficient(&LoopSequence::default(), 0).unwrap(), int(1));
        assert_eq!(s.coefficient(&LoopSequence::default(), 3).unwrap(), int(0));
    }

    #[test]
    fn two_plaquettes_factorize() {
        let mut s = Solver::default();
        let p = lp("y+ x+ y- x-");
        let seq = LoopSequence::new([p.clone(), p]);
        assert_eq!(s.polynomial(&seq, 3).unwrap(), BetaPolynomial::monomial(2, int(1)));
    }

    #[test]
    fn apply_moves() {
        let p = lp("y+ x+ y- x-");
        let e = p.edge_at(0);
        let q = plaquettes_containing(&e).into_iter().find(|q| q.orientation_of(&e).is_some() && q.corner == Site::new(&[0, 0])).unwrap();
        let s = apply_move(&LoopSequence::single(p.clone()), &Move::deform(MoveKind::DeformNeg, 0, 0, q)).unwrap();
        assert!(s.is_null());
        assert!(apply_move(&LoopSequence::single(p), &Move::split(MoveKind::SplitPos, 0, 0, 1)).is_err());
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("lex".parse::<EdgePolicy>().unwrap(), EdgePolicy::LexMin);
        assert_eq!("top".parse::<EdgePolicy>().unwrap(), EdgePolicy::TopmostHorizontal);
        assert_eq!("random:7".parse::<EdgePolicy>().unwrap(), EdgePolicy::Seeded(7));
        assert!("nope".parse::<EdgePolicy>().is_err());
    }
}
