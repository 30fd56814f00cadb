use wilson_loops::audit::{build_audited_walk, pairing_is_noncrossing};
use wilson_loops::error::Error;
use wilson_loops::lattice::{DirectedEdge, Site, Step};
use wilson_loops::parse::{parse_trajectory, parse_walk};

const FIXTURE: &str = include_str!("fixtures/example_trajectory.txt");

fn edge(x: i32, y: i32, axis: usize, positive: bool) -> DirectedEdge {
    DirectedEdge::new(Site::new(&[x, y]), Step::new(axis, positive))
}

/// Edges of the two plaquettes around the edge (0,0)→(1,0), labelled
/// e1..e4 below it and e1, e0, e-1, e-2 above it.
fn label(name: &str) -> DirectedEdge {
    let (base, inv) = match name.strip_suffix('\'') {
        Some(b) => (b, true),
        None => (name, false),
    };
    let e = match base {
        "e1" => edge(0, 0, 0, true),
        "e2" => edge(1, 0, 1, false),
        "e3" => edge(1, -1, 0, false),
        "e4" => edge(0, -1, 1, true),
        "e0" => edge(1, 0, 1, true),
        "e-1" => edge(1, 1, 0, false),
        "e-2" => edge(0, 1, 1, false),
        _ => unreachable!(),
    };
    if inv {
        e.reverse()
    } else {
        e
    }
}

#[test]
fn worked_example_walk() {
    let start = parse_walk("x+ y- x- y+", 2).unwrap();
    let audited = build_audited_walk(&start, &parse_trajectory(FIXTURE).unwrap()).unwrap();
    let expected: Vec<DirectedEdge> = "e1 e1' e-2' e-1' e0' e0 e-1 e-2 e1 e1' e4' e3' e2' e2 e3 e4"
        .split(' ')
        .map(label)
        .collect();
    assert_eq!(audited.edges(), expected);
    let blue: Vec<usize> = audited.blue.iter().map(|b| b + 1).collect();
    assert_eq!(blue, vec![9, 14, 15, 16]);
    assert!(pairing_is_noncrossing(&audited.partner));
    assert_eq!(audited.red_count(), 12);
    assert_eq!(audited.deformation_count(), 3);
}

#[test]
fn worked_example_singletons() {
    let start = parse_walk("x+ y- x- y+", 2).unwrap();
    let audited = build_audited_walk(&start, &parse_trajectory(FIXTURE).unwrap()).unwrap();

    let all = audited.singletons(&start.edges());
    assert_eq!(all.count(), 4);
    assert!(!all.within_deformations());
    assert!(all.within_weighted_bound());
    assert_eq!(all.weighted_bound, 6);

    let sparse = audited.singletons(&[label("e3"), label("e-1")]);
    assert_eq!(sparse.count(), 1);
    assert!(sparse.within_deformations());
    assert!(sparse.distinct_partner_moves);
    assert_eq!(sparse.weighted_bound, 3);
}

#[test]
fn trajectory_errors() {
    let start = parse_walk("x+ y- x- y+", 2).unwrap();
    let short = parse_trajectory("DEF+ loop=0 loc=0 plq=(0,1)@(0,1)").unwrap();
    assert_eq!(build_audited_walk(&start, &short).unwrap_err(), Error::NonVanishing);
    let off = parse_trajectory("DEF- loop=0 loc=0 plq=(0,1)@(5,5)").unwrap();
    assert!(matches!(build_audited_walk(&start, &off), Err(Error::InapplicableMove(_))));
    let far = parse_trajectory("DEF- loop=1 loc=0 plq=(0,1)@(0,0)").unwrap();
    assert!(matches!(build_audited_walk(&start, &far), Err(Error::InapplicableMove(_))));
    let null = parse_walk("null", 2).unwrap();
    let empty = build_audited_walk(&null, &[]).unwrap();
    assert!(empty.is_empty());
}
