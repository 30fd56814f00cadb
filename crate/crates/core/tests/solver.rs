mod common;

use std::collections::BTreeSet;
use std::time::Duration;

use proptest::prelude::*;

use common::{all_planar_loops, random_planar_loops};
use wilson_loops::freeprob::FreeOracle;
use wilson_loops::gauge::{degree_bound, gauge_polynomial};
use wilson_loops::lattice::{
    embed, enumerate_trees, erase_backtracks, loop_area, rectangle_walk, wrapped_plaquette_walk, Loop, LoopSequence,
    Site,
};
use wilson_loops::parse::{parse_loop, parse_sequence};
use wilson_loops::poly::{int, BetaPolynomial};
use wilson_loops::solver::{expand, multiset_less, polynomial_report, Budget, EdgePolicy, Solver};
use wilson_loops::Error;

fn poly(s: &mut Solver, l: &Loop, k: usize) -> BetaPolynomial {
    s.polynomial(&LoopSequence::single(l.clone()), k).unwrap()
}

fn is_simple(l: &Loop) -> bool {
    l.vertices().iter().collect::<BTreeSet<_>>().len() == l.len()
}

#[test]
fn plaquette_and_small_loops() {
    let mut s = Solver::default();
    let p = erase_backtracks(&rectangle_walk(1, 1));
    assert_eq!(s.loop_coefficient(&p, 1).unwrap(), int(1));
    for k in [0, 2, 3, 4] {
        assert_eq!(s.loop_coefficient(&p, k).unwrap(), int(0));
    }
    let r = erase_backtracks(&rectangle_walk(2, 1));
    assert_eq!(poly(&mut s, &r, 4), BetaPolynomial::monomial(2, int(1)));
    for k in 2..5 {
        assert!(poly(&mut s, &erase_backtracks(&wrapped_plaquette_walk(k)), 5).is_zero());
    }
    let pp = LoopSequence::new([p.clone(), p.clone()]);
    assert_eq!(s.polynomial(&pp, 3).unwrap(), BetaPolynomial::monomial(2, int(1)));
    assert_eq!(s.coefficient(&LoopSequence::default(), 0).unwrap(), int(1));
    assert_eq!(s.coefficient(&LoopSequence::default(), 2).unwrap(), int(0));
}

#[test]
fn report_certification() {
    let mut s = Solver::default();
    let seq = parse_sequence("rect 2 2", 2).unwrap();
    let rep = polynomial_report(&mut s, &seq, 6).unwrap();
    assert_eq!(rep.degree_bound, Some(4));
    assert!(rep.certified());
    let short = polynomial_report(&mut s, &seq, 3).unwrap();
    assert!(!short.certified());
    let d3 = polynomial_report(&mut s, &parse_sequence("rect 1 1", 3).unwrap(), 2).unwrap();
    assert_eq!(d3.degree_bound, None);
}

#[test]
fn commutator_coefficients() {
    let l = parse_loop("commutator 1", 2).unwrap();
    let got = poly(&mut Solver::default(), &l, 6);
    assert_eq!(got, BetaPolynomial::from_ints(&[0, 0, 2, 0, -1]));
    assert_eq!(got, gauge_polynomial(&l, &mut FreeOracle::default()).unwrap());
}

#[test]
fn simple_loops_follow_the_area_law() {
    let mut s = Solver::default();
    let mut seen = 0;
    for l in all_planar_loops(10).iter().filter(|l| is_simple(l)) {
        let a = loop_area(l).unwrap() as usize;
        if a > 4 {
            continue;
        }
        assert_eq!(poly(&mut s, l, a + 1), BetaPolynomial::monomial(a, int(1)), "{l}");
        seen += 1;
    }
    // Both orientations of every polyomino with at most four cells.
    assert_eq!(seen, 2 * (1 + 2 + 6 + 19));
}

#[test]
fn tree_loops_vanish_above_area() {
    let mut s = Solver::default();
    for t in enumerate_trees(3) {
        let a = t.tree_area() as usize;
        let p = poly(&mut s, &t.to_loop(), a + 2);
        assert!(p.degree().is_none_or(|d| d <= a), "{:?}: {p}", t.levels);
        assert!(p.valuation().is_none_or(|v| v >= a), "{:?}: {p}", t.levels);
    }
}

#[test]
fn every_short_loop_matches_the_gauge_oracle() {
    let mut lex = Solver::new(EdgePolicy::LexMin);
    let mut top = Solver::new(EdgePolicy::TopmostHorizontal);
    let mut oracle = FreeOracle::default();
    let loops = all_planar_loops(8);
    for l in &loops {
        let want = gauge_polynomial(l, &mut oracle).unwrap();
        let k = degree_bound(l).unwrap().max(4);
        assert_eq!(poly(&mut lex, l, k), want, "{l}");
        assert_eq!(poly(&mut top, l, k), want, "{l}");
    }
}

#[test]
fn random_loops_match_the_gauge_oracle_under_a_seeded_policy() {
    let mut s = Solver::new(EdgePolicy::Seeded(99));
    let mut oracle = FreeOracle::default();
    for l in random_planar_loops(77, 15, 10) {
        let want = gauge_polynomial(&l, &mut oracle).unwrap().truncate(4);
        assert_eq!(poly(&mut s, &l, 4), want, "{l}");
    }
}

#[test]
fn loop_pairs_factor() {
    let mut s = Solver::default();
    let loops = random_planar_loops(5, 6, 8);
    for a in &loops {
        for b in &loops {
            let joint = s.polynomial(&LoopSequence::new([a.clone(), b.clone()]), 4).unwrap();
            let prod = (&poly(&mut s, a, 4) * &poly(&mut s, b, 4)).truncate(4);
            assert_eq!(joint, prod, "({a}) ({b})");
        }
    }
}

#[test]
fn recursion_measure_decreases() {
    for l in random_planar_loops(3, 12, 12) {
        let seq = vec![l.clone()];
        for k in 0..3 {
            for policy in [EdgePolicy::LexMin, EdgePolicy::TopmostHorizontal] {
                let ex = expand(&seq, k, policy, false).unwrap();
                for t in &ex.terms {
                    let lens: Vec<usize> = t.seq.iter().map(Loop::len).collect();
                    assert!(t.k < k || (t.k == k && multiset_less(&lens, &[l.len()])), "{l}: {lens:?} at {}", t.k);
                }
            }
        }
    }
}

#[test]
fn budgets_abort() {
    let l = parse_loop("rect 2 2", 2).unwrap();
    let mut tiny = Solver::default().with_budget(Budget { max_memo: 5, ..Budget::default() });
    assert!(matches!(tiny.loop_coefficient(&l, 4), Err(Error::Budget(_))));
    let mut shallow = Solver::default().with_budget(Budget { max_depth: 2, ..Budget::default() });
    assert!(matches!(shallow.loop_coefficient(&l, 4), Err(Error::Budget(_))));
    let big = parse_loop("commutator 2", 2).unwrap();
    let mut quick = Solver::default().with_budget(Budget { max_time: Some(Duration::from_millis(1)), ..Budget::default() });
    assert!(matches!(quick.loop_coefficient(&big, 8), Err(Error::Budget(_))));
}

#[test]
fn plaquette_in_three_dimensions() {
    let l = erase_backtracks(&embed(&rectangle_walk(1, 1), 3).unwrap());
    let p = poly(&mut Solver::default(), &l, 5);
    // Beyond β, each of the two unit cubes containing the plaquette closes
    // with its five other faces.
    assert_eq!(p, BetaPolynomial::from_ints(&[0, 1, 0, 0, 0, 2]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reversal_and_translation_leave_coefficients_alone(seed in 0u64..10_000, t in prop::collection::vec(-4i32..=4, 2)) {
        let mut s = Solver::default();
        for l in random_planar_loops(seed, 2, 10) {
            let base = poly(&mut s, &l, 3);
            prop_assert_eq!(poly(&mut s, &l.inverse(), 3), base.clone());
            let moved = erase_backtracks(&l.walk().translate(&Site::new(&t)));
            prop_assert_eq!(poly(&mut s, &moved, 3), base);
        }
    }
}
