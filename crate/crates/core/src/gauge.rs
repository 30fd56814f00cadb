//! Planar axial gauge: each horizontal edge becomes a word in the positive
//! plaquettes of its column, vertical edges become trivial.

use crate::error::{Error, Result};
use crate::freeprob::{FreeOracle, FreeWord};
use crate::lattice::{ClosedWalk, DirectedEdge, Loop, Plaquette, Site};
use crate::poly::BetaPolynomial;

pub type PlaquetteWord = FreeWord<Plaquette>;

fn column_plaquette(x: i32, y: i32) -> Plaquette {
    Plaquette { corner: Site::new(&[x, y]), axes: (0, 1), positive: true }
}

fn require_planar(dim: usize) -> Result<()> {
    if dim != 2 {
        return Err(Error::Unsupported(format!("the axial gauge map is planar only, got d={dim}")));
    }
    Ok(())
}

pub fn edge_word(e: &DirectedEdge) -> Result<PlaquetteWord> {
    require_planar(e.tail.dim())?;
    if e.step.axis() == 1 {
        return Ok(FreeWord::new());
    }
    let p = e.positive();
    let (x, j) = (p.tail.get(0), p.tail.get(1));
    let w = if j > 0 {
        FreeWord::from_letters((0..j).map(|y| (column_plaquette(x, y), 1)))
    } else {
        FreeWord::from_letters((j..0).rev().map(|y| (column_plaquette(x, y), -1)))
    };
    Ok(if e.is_positive() { w } else { w.inverse() })
}

pub fn walk_to_word(w: &ClosedWalk) -> Result<PlaquetteWord> {
    require_planar(w.dim())?;
    let mut out = FreeWord::new();
    for e in w.edges() {
        for (g, k) in edge_word(&e)?.letters() {
            out.push(g.clone(), *k);
        }
    }
    Ok(out)
}

pub fn loop_to_word(l: &Loop) -> Result<PlaquetteWord> {
    walk_to_word(&l.walk())
}

/// Σ|exponent| of the cyclically reduced word; the loop polynomial has no
/// terms above this degree.
pub fn degree_bound(l: &Loop) -> Result<usize> {
    Ok(loop_to_word(l)?.cyclically_reduced().degree())
}

/// The planar large-N Wilson loop as an exact polynomial.
pub fn gauge_polynomial(l: &Loop, oracle: &mut FreeOracle) -> Result<BetaPolynomial> {
    oracle.word_moment(&loop_to_word(l)?)
}

pub fn walk_polynomial(w: &ClosedWalk, oracle: &mut FreeOracle) -> Result<BetaPolynomial> {
    oracle.word_moment(&walk_to_word(w)?)
}
