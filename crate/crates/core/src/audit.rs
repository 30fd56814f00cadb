//! Unreduced walks built from a vanishing trajectory, with the partner pairing
//! induced by backtrack erasure and the embedding of the starting walk.
//!
//! Letters of the starting walk are blue; every other letter is red and was
//! created by exactly one deformation.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{erase_backtracks, reduce_steps, ClosedWalk, DirectedEdge, Loop, Plaquette, Site, Step};
use crate::ops::shift_plaquette;
use crate::solver::{move_results, Move, MoveKind};

struct Node {
    lp: Loop,
    mv: Option<usize>,
    children: Vec<usize>,
}

/// A presented walk: steps from a basepoint, with the creating move of each
/// letter.
struct Presented {
    basepoint: Site,
    steps: Vec<Step>,
    origin: Vec<Option<usize>>,
}

struct Fragment {
    steps: Vec<Step>,
    partner: Vec<usize>,
    origin: Vec<Option<usize>>,
    emb: Vec<usize>,
}

impl Fragment {
    fn len(&self) -> usize {
        self.steps.len()
    }

    /// Insert `other` at `at`; returns the offset applied to `other`.
    fn splice(&mut self, at: usize, other: Fragment) -> usize {
        let k = other.len();
        for p in self.partner.iter_mut() {
            if *p >= at {
                *p += k;
            }
        }
        for p in self.emb.iter_mut() {
            if *p >= at {
                *p += k;
            }
        }
        self.steps.splice(at..at, other.steps);
        self.origin.splice(at..at, other.origin);
        self.partner.splice(at..at, other.partner.into_iter().map(|p| p + at));
        at
    }
}

fn positions(base: &Site, steps: &[Step]) -> Vec<Site> {
    let mut out = Vec::with_capacity(steps.len() + 1);
    let mut v = base.clone();
    out.push(v.clone());
    for &s in steps {
        v = v.step(s);
        out.push(v.clone());
    }
    out
}

fn internal(msg: impl Into<String>) -> Error {
    Error::Invalid(format!("audit construction: {}", msg.into()))
}

struct Builder<'a> {
    nodes: Vec<Node>,
    moves: &'a [Move],
    deformations: Vec<(usize, Plaquette)>,
}

impl Builder<'_> {
    fn build(&mut self, id: usize, w: Presented) -> Result<Fragment> {
        let red = reduce_steps(&w.steps);
        let node = &self.nodes[id];
        let lp = node.lp.clone();
        if erase_backtracks(&ClosedWalk::new(w.basepoint.clone(), w.steps.clone())?) != lp {
            return Err(internal("presented walk does not reduce to its loop"));
        }
        let n_w = w.steps.len();
        let mut partner = vec![usize::MAX; n_w];
        for &(a, b) in &red.pairs {
            partner[a] = b;
            partner[b] = a;
        }
        let Some(t) = node.mv else {
            if !red.survivors.is_empty() {
                return Err(Error::NonVanishing);
            }
            return Ok(Fragment { steps: w.steps, partner, origin: w.origin, emb: (0..n_w).collect() });
        };
        let children = node.children.clone();
        let s = &red.survivors;
        let wpos = positions(&w.basepoint, &w.steps);
        let l = Presented {
            basepoint: wpos[s[0]].clone(),
            steps: s.iter().map(|&i| w.steps[i]).collect(),
            origin: s.iter().map(|&i| w.origin[i]).collect(),
        };
        let fl = self.apply(t, &lp, l, &children)?;

        // Put the cancelled letters of the presented walk back around the
        // images of its survivors.
        let mut out = Fragment { steps: Vec::new(), partner: Vec::new(), origin: Vec::new(), emb: vec![0; n_w] };
        let mut fl_map = vec![0usize; fl.len()];
        let mut w_map = vec![0usize; n_w];
        let mut next_fl = 0usize;
        let push_w = |i: usize, out: &mut Fragment, w_map: &mut Vec<usize>| {
            w_map[i] = out.steps.len();
            out.steps.push(w.steps[i]);
            out.origin.push(w.origin[i]);
        };
        let mut k = 0usize;
        for i in 0..n_w {
            if k < s.len() && s[k] == i {
                while next_fl <= fl.emb[k] {
                    fl_map[next_fl] = out.steps.len();
                    out.steps.push(fl.steps[next_fl]);
                    out.origin.push(fl.origin[next_fl]);
                    next_fl += 1;
                }
                w_map[i] = fl_map[fl.emb[k]];
                k += 1;
                if k == s.len() {
                    while next_fl < fl.len() {
                        fl_map[next_fl] = out.steps.len();
                        out.steps.push(fl.steps[next_fl]);
                        out.origin.push(fl.origin[next_fl]);
                        next_fl += 1;
                    }
                }
            } else {
                push_w(i, &mut out, &mut w_map);
            }
        }
        out.partner = vec![usize::MAX; out.steps.len()];
        for (a, &b) in fl.partner.iter().enumerate() {
            out.partner[fl_map[a]] = fl_map[b];
        }
        for &(a, b) in &red.pairs {
            out.partner[w_map[a]] = w_map[b];
            out.partner[w_map[b]] = w_map[a];
        }
        out.emb = w_map;
        Ok(out)
    }

    /// Apply move `t` to the reduced presented loop `l` and build its
    /// fragment from the children.
    fn apply(&mut self, t: usize, lp: &Loop, l: Presented, children: &[usize]) -> Result<Fragment> {
        let mv = self.moves[t].clone();
        let n = l.steps.len();
        let o = lp.rotation_in(&l.steps).ok_or_else(|| internal("loop is not a rotation of its canonical word"))?;
        let at = |x: usize| (x + o) % n;
        let lpos = positions(&l.basepoint, &l.steps);
        let shift = lpos[o].offset(&lp.basepoint(), -1);
        let new = Some(t);
        match mv.kind {
            MoveKind::DeformNeg | MoveKind::DeformPos => {
                let p = shift_plaquette(mv.plaquette.as_ref().ok_or_else(|| internal("deformation without plaquette"))?, &shift);
                self.deformations.push((t, p.clone()));
                let r = at(mv.x);
                let e = DirectedEdge::new(lpos[r].clone(), l.steps[r]);
                let [tt, s0, tr] = p.detour(&e)?;
                let mut steps = l.steps[..r].to_vec();
                let mut origin = l.origin[..r].to_vec();
                if mv.kind == MoveKind::DeformNeg {
                    steps.extend([tt, s0, tr]);
                    origin.extend([new; 3]);
                } else {
                    steps.extend([l.steps[r], tt, s0.reverse(), tr, s0]);
                    origin.extend([new, new, new, new, l.origin[r]]);
                }
                steps.extend_from_slice(&l.steps[r + 1..]);
                origin.extend_from_slice(&l.origin[r + 1..]);
                let mut fc = self.build(children[0], Presented { basepoint: l.basepoint.clone(), steps, origin })?;
                if mv.kind == MoveKind::DeformPos {
                    let emb = (0..n).map(|k| if k < r { fc.emb[k] } else { fc.emb[k + 4] }).collect();
                    fc.emb = emb;
                    return Ok(fc);
                }
                let ins = if r == 0 { 0 } else { fc.emb[r - 1] + 1 };
                let pair = Fragment {
                    steps: vec![l.steps[r], l.steps[r].reverse()],
                    partner: vec![1, 0],
                    origin: vec![l.origin[r], new],
                    emb: Vec::new(),
                };
                let old = fc.emb.clone();
                fc.splice(ins, pair);
                fc.emb = (0..n)
                    .map(|k| match k.cmp(&r) {
                        std::cmp::Ordering::Less => old[k],
                        std::cmp::Ordering::Equal => ins,
                        std::cmp::Ordering::Greater => old[k + 2] + 2,
                    })
                    .collect();
                Ok(fc)
            }
            MoveKind::SplitPos | MoveKind::SplitNeg => {
                let (r1, r2) = (at(mv.x), at(mv.y));
                let (i, j) = (r1.min(r2), r1.max(r2));
                // index of the child holding the piece strictly inside (i, j]
                let inner_child = if r1 < r2 { children[1] } else { children[0] };
                let outer_child = if r1 < r2 { children[0] } else { children[1] };
                let pos = mv.kind == MoveKind::SplitPos;
                let (outer_steps, outer_origin) = if pos {
                    let mut s = l.steps[..i].to_vec();
                    s.push(l.steps[j]);
                    s.extend_from_slice(&l.steps[j + 1..]);
                    let mut o = l.origin[..i].to_vec();
                    o.push(l.origin[j]);
                    o.extend_from_slice(&l.origin[j + 1..]);
                    (s, o)
                } else {
                    let mut s = l.steps[..i].to_vec();
                    s.extend_from_slice(&l.steps[j + 1..]);
                    let mut o = l.origin[..i].to_vec();
                    o.extend_from_slice(&l.origin[j + 1..]);
                    (s, o)
                };
                let inner = if pos {
                    Presented { basepoint: lpos[i].clone(), steps: l.steps[i..j].to_vec(), origin: l.origin[i..j].to_vec() }
                } else {
                    Presented {
                        basepoint: lpos[i + 1].clone(),
                        steps: l.steps[i + 1..j].to_vec(),
                        origin: l.origin[i + 1..j].to_vec(),
                    }
                };
                let mut f1 = self.build(
                    outer_child,
                    Presented { basepoint: l.basepoint.clone(), steps: outer_steps, origin: outer_origin },
                )?;
                let f2 = self.build(inner_child, inner)?;
                let ins = if i == 0 { 0 } else { f1.emb[i - 1] + 1 };
                let old = f1.emb.clone();
                if pos {
                    let e2 = f2.emb.clone();
                    let k2 = f2.len();
                    f1.splice(ins, f2);
                    f1.emb = (0..n)
                        .map(|k| {
                            if k < i {
                                old[k]
                            } else if k < j {
                                ins + e2[k - i]
                            } else {
                                old[k - j + i] + k2
                            }
                        })
                        .collect();
                } else {
                    let e2 = f2.emb.clone();
                    let k2 = f2.len();
                    let mut wrapped = Fragment {
                        steps: vec![l.steps[i], l.steps[j]],
                        partner: vec![1, 0],
                        origin: vec![l.origin[i], l.origin[j]],
                        emb: Vec::new(),
                    };
                    wrapped.splice(1, f2);
                    f1.splice(ins, wrapped);
                    f1.emb = (0..n)
                        .map(|k| {
                            if k < i {
                                old[k]
                            } else if k == i {
                                ins
                            } else if k < j {
                                ins + 1 + e2[k - i - 1]
                            } else if k == j {
                                ins + 1 + k2
                            } else {
                                old[k - j + i - 1] + k2 + 2
                            }
                        })
                        .collect();
                }
                Ok(f1)
            }
        }
    }
}

/// The walk f built from a starting walk and a vanishing trajectory.
#[derive(Clone, Debug)]
pub struct AuditedWalk {
    pub walk: ClosedWalk,
    /// Partner of each position under backtrack erasure.
    pub partner: Vec<usize>,
    /// Move that created each letter; `None` for blue letters.
    pub origin: Vec<Option<usize>>,
    /// Positions of the starting walk inside `walk`, increasing.
    pub blue: Vec<usize>,
    pub moves: Vec<Move>,
    /// Deformation moves with their plaquettes in the frame of the start walk.
    pub deformations: Vec<(usize, Plaquette)>,
}

/// Replay `moves` from `start` (moves address loops of the current sequence
/// and use canonical coordinates) and build the audited walk.
pub fn build_audited_walk(start: &ClosedWalk, moves: &[Move]) -> Result<AuditedWalk> {
    let root = erase_backtracks(start);
    let mut nodes = vec![Node { lp: root.clone(), mv: None, children: Vec::new() }];
    let mut seq: Vec<usize> = if root.is_null() { Vec::new() } else { vec![0] };
    for (t, mv) in moves.iter().enumerate() {
        let id = *seq.get(mv.loop_index).ok_or_else(|| {
            Error::InapplicableMove(format!("move {t}: loop index {} outside sequence of {}", mv.loop_index, seq.len()))
        })?;
        let results = move_results(&nodes[id].lp, mv)
            .map_err(|e| Error::InapplicableMove(format!("move {t} ({mv}): {e}")))?;
        let mut live = Vec::new();
        let mut kids = Vec::new();
        for r in results {
            let k = nodes.len();
            if !r.is_null() {
                live.push(k);
            }
            kids.push(k);
            nodes.push(Node { lp: r, mv: None, children: Vec::new() });
        }
        nodes[id].mv = Some(t);
        nodes[id].children = kids;
        seq.splice(mv.loop_index..=mv.loop_index, live);
    }
    if !seq.is_empty() {
        return Err(Error::NonVanishing);
    }
    let mut b = Builder { nodes, moves, deformations: Vec::new() };
    let f = b.build(
        0,
        Presented { basepoint: start.basepoint.clone(), steps: start.steps.clone(), origin: vec![None; start.len()] },
    )?;
    let mut deformations = b.deformations;
    deformations.sort_by_key(|d| d.0);
    let out = AuditedWalk {
        walk: ClosedWalk::new(start.basepoint.clone(), f.steps)?,
        partner: f.partner,
        origin: f.origin,
        blue: f.emb,
        moves: moves.to_vec(),
        deformations,
    };
    out.check()?;
    Ok(out)
}

/// Whether a perfect matching on positions 0..n has no crossing pairs.
pub fn pairing_is_noncrossing(partner: &[usize]) -> bool {
    let mut stack = Vec::new();
    for (i, &p) in partner.iter().enumerate() {
        if p == i || p >= partner.len() || partner[p] != i {
            return false;
        }
        if p > i {
            stack.push(i);
        } else if stack.pop() != Some(p) {
            return false;
        }
    }
    stack.is_empty()
}

impl AuditedWalk {
    pub fn len(&self) -> usize {
        self.walk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walk.is_empty()
    }

    pub fn red_count(&self) -> usize {
        self.len() - self.blue.len()
    }

    pub fn deformation_count(&self) -> usize {
        self.deformations.len()
    }

    pub fn is_blue(&self, i: usize) -> bool {
        self.origin[i].is_none()
    }

    /// Checks the structural properties of the construction.
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(internal(m.to_string()));
        if !erase_backtracks(&self.walk).is_null() {
            return bad("walk does not erase to the null loop");
        }
        if !pairing_is_noncrossing(&self.partner) {
            return bad("partner pairing crosses");
        }
        let steps = &self.walk.steps;
        if self.partner.iter().enumerate().any(|(i, &p)| steps[p] != steps[i].reverse()) {
            return bad("partners are not mutually reverse letters");
        }
        if self.red_count() != 4 * self.deformation_count() {
            return bad("red letters are not four per deformation");
        }
        if self.blue.windows(2).any(|w| w[0] >= w[1]) || self.blue.iter().any(|&b| !self.is_blue(b)) {
            return bad("embedding is not increasing over blue letters");
        }
        if self.origin.iter().filter(|o| o.is_none()).count() != self.blue.len() {
            return bad("blue letters outside the embedding");
        }
        Ok(())
    }

    /// Edges at each position, in the frame of the starting walk.
    pub fn edges(&self) -> Vec<DirectedEdge> {
        self.walk.edges()
    }

    /// Blue letters whose edge (either orientation) lies in `filter` and
    /// whose partner is red.
    pub fn singletons(&self, filter: &[DirectedEdge]) -> SingletonReport {
        let keys: BTreeSet<DirectedEdge> = filter.iter().map(DirectedEdge::positive).collect();
        let edges = self.edges();
        let selected: Vec<usize> = self.blue.iter().copied().filter(|&i| keys.contains(&edges[i].positive())).collect();
        let singles: Vec<usize> = selected.iter().copied().filter(|&i| !self.is_blue(self.partner[i])).collect();
        let partner_moves: Vec<usize> = singles.iter().filter_map(|&i| self.origin[self.partner[i]]).collect();
        let distinct: BTreeSet<usize> = partner_moves.iter().copied().collect();
        let weighted_bound = self
            .deformations
            .iter()
            .map(|(_, p)| p.edges().iter().filter(|e| keys.contains(&e.positive())).count())
            .sum();
        SingletonReport {
            selected: selected.len(),
            singletons: singles,
            deformations: self.deformation_count(),
            weighted_bound,
            distinct_partner_moves: distinct.len() == partner_moves.len(),
        }
    }
}

/// Singleton count of the blue partition restricted to a set of edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingletonReport {
    pub selected: usize,
    /// Positions of the singleton blue letters.
    pub singletons: Vec<usize>,
    pub deformations: usize,
    /// Σ over deformations of the number of plaquette edges in the filter.
    pub weighted_bound: usize,
    /// Each singleton's red partner was created by a different deformation.
    pub distinct_partner_moves: bool,
}

impl SingletonReport {
    pub fn count(&self) -> usize {
        self.singletons.len()
    }

    pub fn within_deformations(&self) -> bool {
        self.count() <= self.deformations
    }

    pub fn within_weighted_bound(&self) -> bool {
        self.count() <= self.weighted_bound
    }
}

pub fn audit_singletons(w: &AuditedWalk, filter: &[DirectedEdge]) -> SingletonReport {
    w.singletons(filter)
}

impl fmt::Display for AuditedWalk {
    /// One line per letter: position (1-based), colour, step, partner.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.edges();
        for (i, e) in edges.iter().enumerate() {
            let colour = if self.is_blue(i) { "blue" } else { "red" };
            write!(f, "{:>4} {colour:<4} {} {}", i + 1, e.tail, e.step)?;
            write!(f, " partner={}", self.partner[i] + 1)?;
            if let Some(t) = self.origin[i] {
                write!(f, " move={t}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_trajectory, parse_walk};

    #[test]
    fn single_deformation() {
        let w = parse_walk("y+ x+ y- x-", 2).unwrap();
        let m = parse_trajectory("DEF- loop=0 loc=0 plq=(0,1)@(0,0)").unwrap();
        let a = build_audited_walk(&w, &m).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(a.red_count(), 4);
        let all: Vec<DirectedEdge> = w.edges();
        let rep = a.singletons(&all);
        assert_eq!(rep.count(), 4);
        assert_eq!(rep.weighted_bound, 4);
    }

    #[test]
    fn null_start() {
        let w = parse_walk("x+ x-", 2).unwrap();
        let a = build_audited_walk(&w, &[]).unwrap();
        assert_eq!(a.partner, vec![1, 0]);
        assert_eq!(a.deformation_count(), 0);
    }

    #[test]
    fn rejects_non_vanishing() {
        let w = parse_walk("y+ x+ y- x-", 2).unwrap();
        assert_eq!(build_audited_walk(&w, &[]).unwrap_err(), Error::NonVanishing);
    }

    #[test]
    fn splits_through_wrap_two() {
        let w = parse_walk("wrap 2", 2).unwrap();
        let l = erase_backtracks(&w);
        let e = l.edge_at(0);
        let (a, _) = crate::ops::locations_of(&l, &e);
        let text = format!(
            "SPLIT+ loop=0 x={} y={}\nDEF- loop=0 loc=0 plq=(0,1)@(0,0)\nDEF- loop=0 loc=0 plq=(0,1)@(0,0)\n",
            a[0], a[1]
        );
        let m = parse_trajectory(&text).unwrap();
        let audited = build_audited_walk(&w, &m).unwrap();
        assert_eq!(audited.len(), 16);
        assert_eq!(audited.blue.len(), 8);
    }

    #[test]
    fn noncrossing_pairings() {
        assert!(pairing_is_noncrossing(&[1, 0, 3, 2]));
        assert!(pairing_is_noncrossing(&[3, 2, 1, 0]));
        assert!(!pairing_is_noncrossing(&[2, 3, 0, 1]));
    }
}
