//! String operations on loops: deformations by a plaquette and splittings at
//! a repeated edge. Locations index the canonical step word of the loop.

use crate::error::{Error, Result};
use crate::lattice::{plaquettes_containing, DirectedEdge, Loop, Plaquette, Site, Step};

/// Locations of `e` (first) and of its reverse (second).
pub fn locations_of(l: &Loop, e: &DirectedEdge) -> (Vec<usize>, Vec<usize>) {
    let r = e.reverse();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (x, f) in l.edges().into_iter().enumerate() {
        if f == *e {
            a.push(x);
        } else if f == r {
            b.push(x);
        }
    }
    (a, b)
}

pub fn edge_neighborhood(e: &DirectedEdge) -> Vec<Plaquette> {
    plaquettes_containing(e)
}

fn check_loc(l: &Loop, x: usize) -> Result<()> {
    if x >= l.len() {
        return Err(Error::InapplicableMove(format!("location {x} outside loop of length {}", l.len())));
    }
    Ok(())
}

fn check_plaquette(l: &Loop, p: &Plaquette) -> Result<()> {
    if p.dim() != l.dim() {
        return Err(Error::Dimension { expected: l.dim(), found: p.dim() });
    }
    Ok(())
}

/// Walk of the negative deformation before erasure: the rooted edge is
/// replaced by the long way around `p`.
pub fn deform_neg_word(l: &Loop, x: usize, p: &Plaquette) -> Result<Vec<Step>> {
    check_loc(l, x)?;
    check_plaquette(l, p)?;
    let detour = p.detour(&l.edge_at(x))?;
    let s = l.steps();
    let mut w = Vec::with_capacity(s.len() + 2);
    w.extend_from_slice(&s[..x]);
    w.extend_from_slice(&detour);
    w.extend_from_slice(&s[x + 1..]);
    Ok(w)
}

/// Walk of the positive deformation before erasure: after the rooted edge the
/// loop runs once around `p` and crosses the edge again.
pub fn deform_pos_word(l: &Loop, x: usize, p: &Plaquette) -> Result<Vec<Step>> {
    check_loc(l, x)?;
    check_plaquette(l, p)?;
    let e = l.edge_at(x);
    let [t, s0, _] = p.detour(&e)?;
    let s = l.steps();
    let mut w = Vec::with_capacity(s.len() + 4);
    w.extend_from_slice(&s[..=x]);
    w.extend_from_slice(&[t, s0.reverse(), t.reverse(), s0]);
    w.extend_from_slice(&s[x + 1..]);
    Ok(w)
}

pub fn deform_neg(l: &Loop, x: usize, p: &Plaquette) -> Result<Loop> {
    Ok(Loop::from_steps(l.dim(), &deform_neg_word(l, x, p)?))
}

pub fn deform_pos(l: &Loop, x: usize, p: &Plaquette) -> Result<Loop> {
    Ok(Loop::from_steps(l.dim(), &deform_pos_word(l, x, p)?))
}

fn cyclic_segment(s: &[Step], from: usize, to_exclusive: usize) -> Vec<Step> {
    let n = s.len();
    let len = (to_exclusive + n - from) % n;
    (0..len).map(|i| s[(from + i) % n]).collect()
}

/// Positive splitting at two occurrences of the same directed edge. Returns
/// `(first, second)` where `second` runs from just after `x` through `y`.
pub fn split_pos(l: &Loop, x: usize, y: usize) -> Result<(Loop, Loop)> {
    check_loc(l, x)?;
    check_loc(l, y)?;
    if x == y {
        return Err(Error::InapplicableMove("positive splitting needs two distinct locations".into()));
    }
    if l.edge_at(x) != l.edge_at(y) {
        return Err(Error::InapplicableMove(format!("locations {x} and {y} carry different edges")));
    }
    let s = l.steps();
    let n = s.len();
    let second = cyclic_segment(s, (x + 1) % n, (y + 1) % n);
    let first = cyclic_segment(s, (y + 1) % n, (x + 1) % n);
    Ok((Loop::from_steps(l.dim(), &first), Loop::from_steps(l.dim(), &second)))
}

/// Negative splitting at an edge (location `x`) and its reverse (location
/// `y`). Returns `(outer, inner)` where `inner` lies strictly between `x` and
/// `y`.
pub fn split_neg(l: &Loop, x: usize, y: usize) -> Result<(Loop, Loop)> {
    check_loc(l, x)?;
    check_loc(l, y)?;
    if x == y || l.edge_at(x).reverse() != l.edge_at(y) {
        return Err(Error::InapplicableMove(format!("locations {x} and {y} are not an edge and its reverse")));
    }
    let s = l.steps();
    let n = s.len();
    let inner = cyclic_segment(s, (x + 1) % n, y);
    let outer = cyclic_segment(s, (y + 1) % n, x);
    Ok((Loop::from_steps(l.dim(), &outer), Loop::from_steps(l.dim(), &inner)))
}

/// Translate a plaquette given in one frame into a frame shifted by `shift`.
pub fn shift_plaquette(p: &Plaquette, shift: &Site) -> Plaquette {
    Plaquette { corner: p.corner.offset(shift, 1), ..p.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{erase_backtracks, ClosedWalk};

    fn lp(s: &str) -> Loop {
        let steps: Vec<Step> = s
            .split_whitespace()
            .map(|t| Step::new("xyzw".find(&t[..1]).unwrap(), t.ends_with('+')))
            .collect();
        erase_backtracks(&ClosedWalk::new(Site::origin(2), steps).unwrap())
    }

    fn plaq(x: i32, y: i32) -> Plaquette {
        Plaquette::new(Site::new(&[x, y]), 0, 1, true).unwrap()
    }

    #[test]
    fn plaquette_self_cancels() {
        let p = lp("y+ x+ y- x-");
        for x in 0..4 {
            let e = p.edge_at(x);
            for q in edge_neighborhood(&e) {
                if q.corner == Site::new(&[0, 0]) {
                    assert!(deform_neg(&p, x, &q).unwrap().is_null());
                    assert!(deform_neg(&p, x, &q.reversed()).unwrap().is_null());
                }
            }
        }
    }

    #[test]
    fn deform_by_neighbour_gives_rectangle() {
        let p = lp("y+ x+ y- x-");
        let top = p.edges().iter().position(|e| e.step == Step::new(0, true)).unwrap();
        let r = deform_neg(&p, top, &plaq(0, 1)).unwrap();
        assert_eq!(r, lp("y+ y+ x+ y- y- x-"));
        let w = deform_pos(&p, top, &plaq(0, 1)).unwrap();
        assert_eq!(w.len(), 8);
        assert_eq!(locations_of(&w, &p.edge_at(top)).0.len(), 2);
    }

    #[test]
    fn positive_deformation_by_itself_wraps() {
        let p = lp("y+ x+ y- x-");
        let w = deform_pos(&p, 1, &plaq(0, 0)).unwrap();
        assert_eq!(w, lp("y+ x+ y- x- y+ x+ y- x-"));
        let e = p.edge_at(1);
        let (a, b) = locations_of(&w, &e);
        assert_eq!((a.len(), b.len()), (2, 0));
    }

    #[test]
    fn splitting_wrap_two() {
        let w = lp("y+ x+ y- x- y+ x+ y- x-");
        let (a, _) = locations_of(&w, &w.edge_at(0));
        let (l1, l2) = split_pos(&w, a[0], a[1]).unwrap();
        let p = lp("y+ x+ y- x-");
        assert_eq!((l1, l2), (p.clone(), p.clone()));
        assert!(split_pos(&w, 0, 0).is_err());
        assert!(split_pos(&p, 0, 1).is_err());
    }
}
