#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use wilson_loops::lattice::{erase_backtracks, ClosedWalk, Loop, Site, Step};
use wilson_loops::mc::rng_from_seed;

/// Distinct non-null planar loops of reduced length at most `max_len`, from
/// shuffled balanced step multisets.
pub fn random_planar_loops(seed: u64, count: usize, max_len: usize) -> Vec<Loop> {
    let mut rng = rng_from_seed(seed);
    let mut out: Vec<Loop> = Vec::new();
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        assert!(tries < 100_000, "could not draw {count} loops");
        let half = rng.gen_range(2..=max_len / 2);
        let nx = rng.gen_range(0..=half);
        let mut steps = Vec::with_capacity(2 * half);
        for _ in 0..nx {
            steps.extend([Step::new(0, true), Step::new(0, false)]);
        }
        for _ in nx..half {
            steps.extend([Step::new(1, true), Step::new(1, false)]);
        }
        steps.shuffle(&mut rng);
        let l = erase_backtracks(&ClosedWalk::new(Site::origin(2), steps).unwrap());
        if !l.is_null() && l.len() <= max_len && !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

pub fn steps(s: &str) -> Vec<Step> {
    s.split_whitespace()
        .map(|t| Step::new("xyzw".find(&t[..1]).unwrap(), t.ends_with('+')))
        .collect()
}

pub fn walk(at: &[i32], s: &str) -> ClosedWalk {
    ClosedWalk::new(Site::new(at), steps(s)).unwrap()
}

/// Every cyclically non-backtracking closed word of length at most `max_len`
/// in the plane, one loop per class.
pub fn all_planar_loops(max_len: usize) -> Vec<Loop> {
    fn rec(pos: (i32, i32), word: &mut Vec<Step>, max_len: usize, out: &mut std::collections::BTreeSet<Loop>) {
        if !word.is_empty() && pos == (0, 0) && word[0] != word[word.len() - 1].reverse() {
            out.insert(Loop::from_steps(2, word));
        }
        if word.len() == max_len {
            return;
        }
        let left = (max_len - word.len()) as i32;
        if pos.0.abs() + pos.1.abs() > left {
            return;
        }
        for code in 0..4u8 {
            let s = Step::new((code / 2) as usize, code % 2 == 0);
            if word.last().is_some_and(|&l| l == s.reverse()) {
                continue;
            }
            let next = if s.axis() == 0 { (pos.0 + s.sign(), pos.1) } else { (pos.0, pos.1 + s.sign()) };
            word.push(s);
            rec(next, word, max_len, out);
            word.pop();
        }
    }
    let mut out = std::collections::BTreeSet::new();
    rec((0, 0), &mut Vec::new(), max_len, &mut out);
    out.into_iter().collect()
}

/// All cyclic rotations of a step word, as codes.
pub fn rotation_class(steps: &[Step]) -> std::collections::BTreeSet<Vec<u8>> {
    (0..steps.len().max(1))
        .map(|r| (0..steps.len()).map(|i| steps[(i + r) % steps.len()].code()).collect())
        .collect()
}
