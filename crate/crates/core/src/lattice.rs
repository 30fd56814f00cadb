//! Geometry of the hypercubic lattice Z^d: sites, edges, plaquettes, closed
//! walks and loops, backtrack erasure, canonical forms, chains and area.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

pub type Coords = SmallVec<[i32; 4]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Site {
    coords: Coords,
}

impl Site {
    pub fn new(coords: &[i32]) -> Site {
        Site { coords: coords.iter().copied().collect() }
    }

    pub fn origin(dim: usize) -> Site {
        Site { coords: std::iter::repeat(0).take(dim).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[i32] {
        &self.coords
    }

    pub fn get(&self, axis: usize) -> i32 {
        self.coords[axis]
    }

    pub fn step(&self, s: Step) -> Site {
        let mut c = self.coords.clone();
        c[s.axis()] += s.sign();
        Site { coords: c }
    }

    pub fn offset(&self, other: &Site, sign: i32) -> Site {
        Site {
            coords: self.coords.iter().zip(other.coords.iter()).map(|(a, b)| a + sign * b).collect(),
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A unit step along one axis. The code is `2*axis + (negative as u8)`, which
/// is also the ordering used for canonical rotations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Step(u8);

impl Step {
    pub fn new(axis: usize, positive: bool) -> Step {
        debug_assert!(axis < MAX_DIM);
        Step((axis as u8) << 1 | (!positive) as u8)
    }

    pub fn axis(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn sign(self) -> i32 {
        if self.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn reverse(self) -> Step {
        Step(self.0 ^ 1)
    }

    pub fn code(self) -> u8 {
        self.0
    }
}

pub(crate) fn axis_name(axis: usize) -> String {
    match axis {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        3 => "w".into(),
        a => format!("a{}", a + 1),
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", axis_name(self.axis()), if self.is_positive() { '+' } else { '-' })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DirectedEdge {
    pub tail: Site,
    pub step: Step,
}

impl DirectedEdge {
    pub fn new(tail: Site, step: Step) -> DirectedEdge {
        DirectedEdge { tail, step }
    }

    pub fn head(&self) -> Site {
        self.tail.step(self.step)
    }

    pub fn reverse(&self) -> DirectedEdge {
        DirectedEdge { tail: self.head(), step: self.step.reverse() }
    }

    /// Positive iff the head is lexicographically larger than the tail.
    pub fn is_positive(&self) -> bool {
        self.step.is_positive()
    }

    /// The positively oriented representative.
    pub fn positive(&self) -> DirectedEdge {
        if self.is_positive() {
            self.clone()
        } else {
            self.reverse()
        }
    }
}

impl fmt::Display for DirectedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.tail, self.step)
    }
}

/// An oriented unit square identified by its minimal corner and the two axes
/// it spans.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Plaquette {
    pub corner: Site,
    pub axes: (usize, usize),
    pub positive: bool,
}

impl Plaquette {
    pub fn new(corner: Site, i: usize, j: usize, positive: bool) -> Result<Plaquette> {
        if i >= j || j >= corner.dim() {
            return invalid(format!("plaquette axes ({i},{j}) must satisfy i<j<{}", corner.dim()));
        }
        Ok(Plaquette { corner, axes: (i, j), positive })
    }

    pub fn dim(&self) -> usize {
        self.corner.dim()
    }

    pub fn reversed(&self) -> Plaquette {
        Plaquette { positive: !self.positive, ..self.clone() }
    }

    /// Steps of the stored representative, starting at the corner. The
    /// positive one visits the smallest vertex and then the second smallest.
    pub fn steps(&self) -> [Step; 4] {
        let (i, j) = self.axes;
        if self.positive {
            [Step::new(j, true), Step::new(i, true), Step::new(j, false), Step::new(i, false)]
        } else {
            [Step::new(i, true), Step::new(j, true), Step::new(i, false), Step::new(j, false)]
        }
    }

    pub fn walk(&self) -> ClosedWalk {
        ClosedWalk { basepoint: self.corner.clone(), steps: self.steps().to_vec() }
    }

    pub fn edges(&self) -> Vec<DirectedEdge> {
        self.walk().edges()
    }

    /// `Some(true)` if `e` is traversed by this plaquette, `Some(false)` if
    /// its reverse is, `None` if the plaquette does not touch the edge.
    pub fn orientation_of(&self, e: &DirectedEdge) -> Option<bool> {
        self.edges().iter().find_map(|f| {
            if f == e {
                Some(true)
            } else if f.reverse() == *e {
                Some(false)
            } else {
                None
            }
        })
    }

    /// The three sides of the square other than `e`, walked from the tail of
    /// `e` to its head.
    pub fn detour(&self, e: &DirectedEdge) -> Result<[Step; 3]> {
        if self.orientation_of(e).is_none() {
            return Err(Error::InapplicableMove(format!("edge {e} is not on plaquette {self}")));
        }
        let (i, j) = self.axes;
        let other = if e.step.axis() == i { j } else { i };
        let t = Step::new(other, e.tail.get(other) == self.corner.get(other));
        Ok([t, e.step, t.reverse()])
    }
}

impl fmt::Display for Plaquette {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{})@{}{}",
            self.axes.0,
            self.axes.1,
            self.corner,
            if self.positive { '+' } else { '-' }
        )
    }
}

/// The positively oriented plaquettes containing `e`, two per orthogonal
/// axis.
pub fn plaquettes_containing(e: &DirectedEdge) -> Vec<Plaquette> {
    let d = e.tail.dim();
    let low = e.positive().tail;
    let a = e.step.axis();
    let mut out = Vec::with_capacity(2 * (d - 1));
    for o in (0..d).filter(|&o| o != a) {
        let (i, j) = if a < o { (a, o) } else { (o, a) };
        let below = low.step(Step::new(o, false));
        out.push(Plaquette { corner: below, axes: (i, j), positive: true });
        out.push(Plaquette { corner: low.clone(), axes: (i, j), positive: true });
    }
    out
}

/// A closed lattice walk; it may backtrack.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ClosedWalk {
    pub basepoint: Site,
    pub steps: Vec<Step>,
}

impl ClosedWalk {
    pub fn new(basepoint: Site, steps: Vec<Step>) -> Result<ClosedWalk> {
        let d = basepoint.dim();
        if !(2..=MAX_DIM).contains(&d) {
            return invalid(format!("dimension {d} outside 2..={MAX_DIM}"));
        }
        if let Some(s) = steps.iter().find(|s| s.axis() >= d) {
            return Err(Error::Dimension { expected: d, found: s.axis() + 1 });
        }
        let mut net = vec![0i64; d];
        for s in &steps {
            net[s.axis()] += s.sign() as i64;
        }
        if net.iter().any(|&v| v != 0) {
            return Err(Error::NotClosed);
        }
        Ok(ClosedWalk { basepoint, steps })
    }

    pub fn dim(&self) -> usize {
        self.basepoint.dim()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Vertex before each step.
    pub fn vertices(&self) -> Vec<Site> {
        let mut v = Vec::with_capacity(self.steps.len());
        let mut cur = self.basepoint.clone();
        for &s in &self.steps {
            let next = cur.step(s);
            v.push(cur);
            cur = next;
        }
        v
    }

    pub fn edges(&self) -> Vec<DirectedEdge> {
        self.vertices().into_iter().zip(self.steps.iter()).map(|(t, &s)| DirectedEdge::new(t, s)).collect()
    }

    pub fn reverse(&self) -> ClosedWalk {
        ClosedWalk {
            basepoint: self.basepoint.clone(),
            steps: self.steps.iter().rev().map(|s| s.reverse()).collect(),
        }
    }

    pub fn translate(&self, by: &Site) -> ClosedWalk {
        ClosedWalk { basepoint: self.basepoint.offset(by, 1), steps: self.steps.clone() }
    }

    /// Rotation starting at step `k`.
    pub fn rotate(&self, k: usize) -> ClosedWalk {
        if self.steps.is_empty() {
            return self.clone();
        }
        let k = k % self.steps.len();
        let base = self.vertices().swap_remove(k);
        let mut steps = self.steps[k..].to_vec();
        steps.extend_from_slice(&self.steps[..k]);
        ClosedWalk { basepoint: base, steps }
    }

    pub fn concat(&self, other: &ClosedWalk) -> Result<ClosedWalk> {
        if other.basepoint != self.basepoint {
            return invalid("concatenated walks must share a basepoint");
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Ok(ClosedWalk { basepoint: self.basepoint.clone(), steps })
    }

    pub fn power(&self, k: usize) -> ClosedWalk {
        ClosedWalk { basepoint: self.basepoint.clone(), steps: self.steps.repeat(k) }
    }

    pub fn is_non_backtracking(&self) -> bool {
        let n = self.steps.len();
        (0..n).all(|i| self.steps[(i + 1) % n] != self.steps[i].reverse()) || n == 0
    }
}

impl fmt::Display for ClosedWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.basepoint)?;
        for s in &self.steps {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// Outcome of backtrack erasure on a step word: the surviving positions and
/// the cancelled pairs, with cyclic cancellation applied last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub survivors: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
}

pub fn reduce_steps(steps: &[Step]) -> Reduction {
    let mut stack: Vec<usize> = Vec::with_capacity(steps.len());
    let mut pairs = Vec::new();
    for (i, &s) in steps.iter().enumerate() {
        match stack.last() {
            Some(&top) if steps[top] == s.reverse() => {
                stack.pop();
                pairs.push((top, i));
            }
            _ => stack.push(i),
        }
    }
    let (mut lo, mut hi) = (0usize, stack.len());
    while hi - lo >= 2 && steps[stack[lo]] == steps[stack[hi - 1]].reverse() {
        pairs.push((stack[lo], stack[hi - 1]));
        lo += 1;
        hi -= 1;
    }
    Reduction { survivors: stack[lo..hi].to_vec(), pairs }
}

fn reduced_word(steps: &[Step]) -> Vec<Step> {
    reduce_steps(steps).survivors.into_iter().map(|i| steps[i]).collect()
}

fn least_rotation(s: &[Step]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// A non-backtracking loop up to rotation and translation, stored in canonical
/// form: the least rotation of the step word, placed so that the
/// coordinate-wise minimum of its visited sites is the origin. The null loop
/// has no steps.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loop {
    dim: u8,
    steps: Arc<[Step]>,
}

impl Loop {
    pub fn null(dim: usize) -> Loop {
        Loop { dim: dim as u8, steps: Arc::from(Vec::new()) }
    }

    /// Build from a cyclically reduced word (no checks beyond debug).
    pub(crate) fn from_reduced(dim: usize, word: &[Step]) -> Loop {
        debug_assert!(reduced_word(word).len() == word.len());
        if word.is_empty() {
            return Loop::null(dim);
        }
        let r = least_rotation(word);
        let mut steps = Vec::with_capacity(word.len());
        steps.extend_from_slice(&word[r..]);
        steps.extend_from_slice(&word[..r]);
        Loop { dim: dim as u8, steps: Arc::from(steps) }
    }

    /// Erase backtracks from an arbitrary closed step word and canonicalize.
    pub fn from_steps(dim: usize, steps: &[Step]) -> Loop {
        debug_assert!(
            (0..dim).all(|a| steps.iter().filter(|s| s.axis() == a).map(|s| s.sign()).sum::<i32>() == 0),
            "step word does not close"
        );
        Loop::from_reduced(dim, &reduced_word(steps))
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_null(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Canonical basepoint: minus the minimum prefix sum on each axis.
    pub fn basepoint(&self) -> Site {
        let d = self.dim();
        let mut cur = vec![0i32; d];
        let mut min = vec![0i32; d];
        for s in self.steps.iter() {
            cur[s.axis()] += s.sign();
            min[s.axis()] = min[s.axis()].min(cur[s.axis()]);
        }
        Site::new(&min.iter().map(|m| -m).collect::<Vec<_>>())
    }

    pub fn walk(&self) -> ClosedWalk {
        ClosedWalk { basepoint: self.basepoint(), steps: self.steps.to_vec() }
    }

    pub fn vertices(&self) -> Vec<Site> {
        self.walk().vertices()
    }

    pub fn edges(&self) -> Vec<DirectedEdge> {
        self.walk().edges()
    }

    pub fn edge_at(&self, x: usize) -> DirectedEdge {
        self.edges().swap_remove(x)
    }

    pub fn inverse(&self) -> Loop {
        let rev: Vec<Step> = self.steps.iter().rev().map(|s| s.reverse()).collect();
        Loop::from_reduced(self.dim(), &rev)
    }

    /// Rotation offset `o` with `canonical[i] == word[(i + o) % n]`, if the
    /// cyclic word `word` represents this loop.
    pub fn rotation_in(&self, word: &[Step]) -> Option<usize> {
        let n = word.len();
        if n != self.len() {
            return None;
        }
        if n == 0 {
            return Some(0);
        }
        (0..n).find(|&o| (0..n).all(|i| self.steps[i] == word[(i + o) % n]))
    }
}

impl fmt::Debug for Loop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Loop[{self}]")
    }
}

impl fmt::Display for Loop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_null() {
            return write!(f, "null");
        }
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Backtrack erasure followed by canonicalization.
pub fn erase_backtracks(w: &ClosedWalk) -> Loop {
    Loop::from_steps(w.dim(), &w.steps)
}

pub fn canonicalize(w: &ClosedWalk) -> Loop {
    erase_backtracks(w)
}

/// An ordered list of non-null loops. The empty list is the null sequence.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LoopSequence {
    pub loops: Vec<Loop>,
}

impl LoopSequence {
    pub fn new(loops: impl IntoIterator<Item = Loop>) -> LoopSequence {
        LoopSequence { loops: loops.into_iter().filter(|l| !l.is_null()).collect() }
    }

    pub fn single(l: Loop) -> LoopSequence {
        LoopSequence::new([l])
    }

    pub fn is_null(&self) -> bool {
        self.loops.is_empty()
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }
}

impl fmt::Display for LoopSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.loops.is_empty() {
            return write!(f, "null");
        }
        for (i, l) in self.loops.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Integer 1-chain keyed by positive edges, written as (lower endpoint, axis).
pub type OneChain = BTreeMap<(Site, usize), i64>;

pub fn boundary_chain(w: &ClosedWalk) -> OneChain {
    let mut chain = OneChain::new();
    for e in w.edges() {
        let sign = if e.is_positive() { 1 } else { -1 };
        let p = e.positive();
        *chain.entry((p.tail, p.step.axis())).or_insert(0) += sign;
    }
    chain.retain(|_, v| *v != 0);
    chain
}

/// Winding number of every unit face, keyed by the face's minimal corner.
/// Positive plaquettes (clockwise in the plane) wind +1.
pub type WindingMap = BTreeMap<(i32, i32), i64>;

pub fn winding_numbers(w: &ClosedWalk) -> Result<WindingMap> {
    if w.dim() != 2 {
        return Err(Error::Unsupported("winding numbers need d=2".into()));
    }
    let chain = boundary_chain(w);
    let mut columns: BTreeMap<i32, Vec<(i32, i64)>> = BTreeMap::new();
    for ((site, axis), c) in chain {
        if axis == 0 {
            columns.entry(site.get(0)).or_default().push((site.get(1), c));
        }
    }
    let mut out = WindingMap::new();
    for (x, mut col) in columns {
        col.sort_unstable();
        // η(x, j) = Σ_{y > j} c(x, y); walk down from the top.
        let mut acc = 0i64;
        for idx in (0..col.len()).rev() {
            let (y, c) = col[idx];
            acc += c;
            let next_y = if idx > 0 { col[idx - 1].0 } else { y };
            if acc != 0 {
                for j in next_y..y {
                    out.insert((x, j), acc);
                }
            }
        }
    }
    Ok(out)
}

/// Boundary of a 2-chain of planar faces.
pub fn face_boundary(faces: &WindingMap) -> OneChain {
    let mut chain = OneChain::new();
    for (&(x, y), &eta) in faces {
        let p = Plaquette { corner: Site::new(&[x, y]), axes: (0, 1), positive: true };
        for e in p.edges() {
            let sign = if e.is_positive() { 1 } else { -1 };
            let q = e.positive();
            *chain.entry((q.tail, q.step.axis())).or_insert(0) += sign * eta;
        }
    }
    chain.retain(|_, v| *v != 0);
    chain
}

/// Minimal L1 mass of a 2-chain bounding the loop: summed absolute winding in
/// the plane, zero for loops with zero boundary in any dimension.
pub fn area(w: &ClosedWalk) -> Result<u64> {
    if w.dim() == 2 {
        return Ok(winding_numbers(w)?.values().map(|v| v.unsigned_abs()).sum());
    }
    if boundary_chain(w).is_empty() {
        Ok(0)
    } else {
        Err(Error::Unsupported("area of loops with nonzero boundary in d>2".into()))
    }
}

pub fn loop_area(l: &Loop) -> Result<u64> {
    area(&l.walk())
}

fn planar(steps: &str) -> Vec<Step> {
    steps
        .bytes()
        .map(|c| match c {
            b'R' => Step::new(0, true),
            b'L' => Step::new(0, false),
            b'U' => Step::new(1, true),
            _ => Step::new(1, false),
        })
        .collect()
}

/// Boundary of the `w`×`h` rectangle at the origin, positively oriented.
pub fn rectangle_walk(w: usize, h: usize) -> ClosedWalk {
    let mut steps = planar(&"U".repeat(h));
    steps.extend(planar(&"R".repeat(w)));
    steps.extend(planar(&"D".repeat(h)));
    steps.extend(planar(&"L".repeat(w)));
    ClosedWalk { basepoint: Site::origin(2), steps }
}

/// The origin plaquette traversed `k` times.
pub fn wrapped_plaquette_walk(k: usize) -> ClosedWalk {
    ClosedWalk { basepoint: Site::origin(2), steps: planar(&"URDL".repeat(k)) }
}

/// (a b a⁻¹ b⁻¹)^k where a is the positive plaquette below the edge from the
/// origin to (1,0) and b the plaquette above it, both starting with that edge.
pub fn commutator_walk(k: usize) -> ClosedWalk {
    ClosedWalk { basepoint: Site::origin(2), steps: planar(&"RDLURULDDRULURDL".repeat(k)) }
}

/// Place a walk in a higher dimension, padding coordinates with zeros.
pub fn embed(w: &ClosedWalk, dim: usize) -> Result<ClosedWalk> {
    if dim < w.dim() || dim > MAX_DIM {
        return Err(Error::Dimension { expected: w.dim(), found: dim });
    }
    let mut c = w.basepoint.coords().to_vec();
    c.resize(dim, 0);
    Ok(ClosedWalk { basepoint: Site::new(&c), steps: w.steps.clone() })
}

/// Nested wrapped-plaquette encoding: level i holds (wraps, insertion index,
/// orientation).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DecoratedTree {
    pub levels: Vec<(u32, u32, i8)>,
}

impl DecoratedTree {
    pub fn new(levels: Vec<(u32, u32, i8)>) -> Result<DecoratedTree> {
        let h = levels.len();
        for (i, &(g, k, s)) in levels.iter().enumerate() {
            if g == 0 {
                return invalid(format!("level {}: wrap count must be positive", i + 1));
            }
            if s != 1 && s != -1 {
                return invalid(format!("level {}: orientation must be +1 or -1", i + 1));
            }
            let top = i + 1 == h;
            if top && k != 0 {
                return invalid("top level must have index 0");
            }
            if !top && (k == 0 || k > g) {
                return invalid(format!("level {}: index must lie in 1..={g}", i + 1));
            }
        }
        Ok(DecoratedTree { levels })
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn tree_area(&self) -> u64 {
        self.levels.iter().map(|l| l.0 as u64).sum()
    }

    /// Every level is a single unwrapped plaquette.
    pub fn is_path(&self) -> bool {
        self.levels.iter().all(|l| l.0 == 1)
    }

    fn steps_of(levels: &[(u32, u32, i8)]) -> Vec<Step> {
        let up = Step::new(1, true);
        let pos = [up, Step::new(0, true), Step::new(1, false), Step::new(0, false)];
        let neg = [Step::new(0, true), up, Step::new(0, false), Step::new(1, false)];
        let Some(&(g, k, s)) = levels.first() else {
            return Vec::new();
        };
        let p: &[Step] = if s > 0 { &pos } else { &neg };
        if levels.len() == 1 {
            return p.repeat(g as usize);
        }
        let (before, after) = if s > 0 { (k - 1, g - k + 1) } else { (k, g - k) };
        let mut out = p.repeat(before as usize);
        out.push(up);
        out.extend(DecoratedTree::steps_of(&levels[1..]));
        out.push(up.reverse());
        out.extend(p.repeat(after as usize));
        out
    }

    /// The encoded walk, based at the origin of the plane.
    pub fn walk(&self) -> ClosedWalk {
        ClosedWalk { basepoint: Site::origin(2), steps: DecoratedTree::steps_of(&self.levels) }
    }

    pub fn to_loop(&self) -> Loop {
        erase_backtracks(&self.walk())
    }
}

pub fn tree_to_loop(t: &DecoratedTree) -> Loop {
    t.to_loop()
}

/// Every decorated tree with total wrap count at most `max_area`, at least
/// one level.
pub fn enumerate_trees(max_area: u32) -> Vec<DecoratedTree> {
    fn rec(prefix: &mut Vec<(u32, u32, i8)>, left: u32, out: &mut Vec<DecoratedTree>) {
        for g in 1..=left {
            for s in [1i8, -1] {
                prefix.push((g, 0, s));
                out.push(DecoratedTree { levels: prefix.clone() });
                prefix.pop();
                for k in 1..=g {
                    prefix.push((g, k, s));
                    rec(prefix, left - g, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), max_area, &mut out);
    out
}
