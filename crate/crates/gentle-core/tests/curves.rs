mod common;

use common::*;
use gentle_core::curves::{close, concatenate, parse_curve, smooth_compose, turn_sign, CurveError};
use gentle_core::ribbon::twin;
use gentle_core::surface::RegionKind;
use gentle_core::{boundary_curves, build_dissected_surface, compute_shape, winding, CurveKind, CurvePath};
use proptest::prelude::*;

fn surface(name: &str) -> gentle_core::DissectedSurface {
    build_dissected_surface(&load_alg(name)).unwrap()
}

fn closed(d: &gentle_core::DissectedSurface, text: &str) -> CurvePath {
    parse_curve(d, text, CurveKind::Closed).unwrap()
}

#[test]
fn torus_boundary_windings() {
    for name in ["torus1", "torus2"] {
        let cs = boundary_curves(&surface(name)).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!((cs[0].marks, cs[0].winding), (2, -2), "{name}");
    }
    let k = boundary_curves(&surface("k")).unwrap();
    assert_eq!((k[0].marks, k[0].winding), (2, 2));
}

#[test]
fn second_pair_windings() {
    for name in ["second1", "second2"] {
        let cs = boundary_curves(&surface(name)).unwrap();
        let mut b: Vec<(usize, i64)> = cs
            .iter()
            .filter(|c| c.kind == RegionKind::Boundary)
            .map(|c| (c.marks, c.winding))
            .collect();
        b.sort();
        assert_eq!(b, [(1, 0), (2, -3)], "{name}");
        let p: Vec<i64> = cs
            .iter()
            .filter(|c| c.kind == RegionKind::Puncture)
            .map(|c| c.winding)
            .collect();
        assert_eq!(p, [-3], "{name}");
    }
}

#[test]
fn torus_symplectic_curves() {
    // in the first torus every closed curve of two steps has winding 0
    let d = surface("torus1");
    let (a, b) = (closed(&d, "1.+ 3.+"), closed(&d, "2.+ 3.+"));
    assert_eq!((winding(&d, &a).unwrap(), winding(&d, &b).unwrap()), (0, 0));
    assert_eq!(d.ribbon().intersection(&a.walk, &b.walk).unwrap(), 1);
    // in the second there is a simple pair with windings 0 and 2
    let d = surface("torus2");
    let (a, b) = (closed(&d, "1.+ 3.-"), closed(&d, "1.- 2.-"));
    assert!(a.is_simple(&d) && b.is_simple(&d));
    assert_eq!((winding(&d, &a).unwrap(), winding(&d, &b).unwrap()), (0, 2));
    assert_eq!(d.ribbon().intersection(&a.walk, &b.walk).unwrap().abs(), 1);
    let (s, n) = chord_crossings(d.ribbon(), &a.walk, &b.walk, &mut rng(1));
    assert_eq!((s.abs(), n), (1, 1));
}

#[test]
fn winding_sum_identity_on_random_algebras() {
    let mut g = rng(21);
    for _ in 0..200 {
        let p = random_gentle(&mut g, 12);
        let d = build_dissected_surface(&p).unwrap();
        let s = compute_shape(&d);
        let total: i64 = boundary_curves(&d).unwrap().iter().map(|c| c.winding).sum();
        let (b, pu, ge) = (s.boundary as i64, s.punctures as i64, s.genus as i64);
        assert_eq!(total, 4 - 2 * (b + pu) - 4 * ge, "{}", p.to_text());
    }
}

#[test]
fn reversal_negates_winding() {
    let mut g = rng(99);
    let mut checked = 0;
    while checked < 1000 {
        let d = build_dissected_surface(&random_gentle(&mut g, 12)).unwrap();
        let r = d.ribbon();
        for _ in 0..10 {
            if let Some(w) = random_cycle(r, &mut g, 10) {
                let c = CurvePath::closed(&d, w).unwrap();
                assert_eq!(winding(&d, &c.reverse()).unwrap(), -winding(&d, &c).unwrap());
                checked += 1;
            }
            if let Some(w) = random_open_walk(r, &mut g, 10) {
                let c = CurvePath::open(&d, w).unwrap();
                assert_eq!(winding(&d, &c.reverse()).unwrap(), -winding(&d, &c).unwrap());
                checked += 1;
            }
        }
    }
}

#[test]
fn concatenation_adds_the_junction_turn() {
    let mut g = rng(5);
    let mut checked = 0;
    while checked < 300 {
        let d = build_dissected_surface(&random_gentle(&mut g, 12)).unwrap();
        let r = d.ribbon();
        let (Some(a), Some(b)) = (random_open_walk(r, &mut g, 6), random_open_walk(r, &mut g, 6)) else {
            continue;
        };
        let a = CurvePath::open(&d, a).unwrap();
        let b = CurvePath::open(&d, b).unwrap();
        let Ok(ab) = concatenate(&d, &a, &b) else {
            assert!(
                a.end_vertex(&d) != b.start_vertex(&d) || b.walk[0] == twin(*a.walk.last().unwrap()),
                "concatenation refused a valid junction"
            );
            continue;
        };
        let junction = turn_sign(&d, twin(*a.walk.last().unwrap()), b.walk[0]).unwrap();
        assert_eq!(
            winding(&d, &ab).unwrap(),
            winding(&d, &a).unwrap() + winding(&d, &b).unwrap() + junction
        );
        if let Ok(c) = close(&d, &ab) {
            let closing = turn_sign(&d, twin(*ab.walk.last().unwrap()), ab.walk[0]).unwrap();
            assert_eq!(winding(&d, &c).unwrap(), winding(&d, &ab).unwrap() + closing);
        }
        checked += 1;
    }
}

#[test]
fn smoothing_is_additive() {
    let mut g = rng(8);
    let mut checked = 0;
    while checked < 300 {
        let d = build_dissected_surface(&random_gentle(&mut g, 12)).unwrap();
        let r = d.ribbon();
        let (Some(a), Some(b)) = (random_cycle(r, &mut g, 8), random_cycle(r, &mut g, 8)) else {
            continue;
        };
        let a = CurvePath::closed(&d, a).unwrap();
        let b = CurvePath::closed(&d, b).unwrap();
        match smooth_compose(&d, &a, &b, None) {
            Ok(c) => {
                assert_eq!(
                    winding(&d, &c).unwrap(),
                    winding(&d, &a).unwrap() + winding(&d, &b).unwrap()
                );
                let mut ca = vec![0i64; d.arcs.len()];
                for (arc, fwd) in a.steps().into_iter().chain(b.steps()) {
                    ca[arc] += if fwd { 1 } else { -1 };
                }
                let mut cc = vec![0i64; d.arcs.len()];
                for (arc, fwd) in c.steps() {
                    cc[arc] += if fwd { 1 } else { -1 };
                }
                assert_eq!(ca, cc);
                checked += 1;
            }
            Err(CurveError::NoCrossing(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn smoothing_at_a_named_point() {
    let mut g = rng(12);
    let mut checked = 0;
    while checked < 50 {
        let d = build_dissected_surface(&random_gentle(&mut g, 12)).unwrap();
        let r = d.ribbon();
        let (Some(a), Some(b)) = (random_cycle(r, &mut g, 8), random_cycle(r, &mut g, 8)) else {
            continue;
        };
        let a = CurvePath::closed(&d, a).unwrap();
        let b = CurvePath::closed(&d, b).unwrap();
        for v in 0..d.fans.len() {
            let crossing_here = a
                .passages()
                .iter()
                .any(|&p| b.passages().iter().any(|&q| r.interleave(p, q) && r.vertex(p.0) == v));
            match smooth_compose(&d, &a, &b, Some(v)) {
                Ok(c) => {
                    assert!(crossing_here);
                    assert_eq!(
                        winding(&d, &c).unwrap(),
                        winding(&d, &a).unwrap() + winding(&d, &b).unwrap()
                    );
                    checked += 1;
                }
                Err(e) => {
                    assert!(!crossing_here);
                    assert_eq!(e, CurveError::NoCrossing(d.fan_name(v)));
                }
            }
        }
    }
}

#[test]
fn curve_literals() {
    let d = surface("torus2");
    let c = closed(&d, "1.+ 3.-");
    assert_eq!(c.format(&d), "1.+ 3.-");
    assert_eq!(parse_curve(&d, &c.format(&d), CurveKind::Closed).unwrap(), c);
    // directions can be inferred when only one orientation fits
    let open = parse_curve(&d, "1.+ 2", CurveKind::Open).unwrap();
    assert_eq!(open.format(&d), "1.+ 2.+");
    // `via` fixes the departure end of the previous step
    assert_eq!(parse_curve(&d, "1 via 1.0 2.+", CurveKind::Open).unwrap(), open);
    assert!(matches!(
        parse_curve(&d, "1 2", CurveKind::Closed),
        Err(CurveError::Ambiguous(_))
    ));
    assert_eq!(
        parse_curve(&d, "1.+ 9", CurveKind::Open),
        Err(CurveError::UnknownArc("9".into()))
    );
    assert_eq!(
        parse_curve(&d, "1.+ 1.+", CurveKind::Closed),
        Err(CurveError::NoConsistentOrientation)
    );
    assert_eq!(parse_curve(&d, "", CurveKind::Open), Err(CurveError::Empty));
}

#[test]
fn invalid_walks() {
    let d = surface("torus1");
    let a = d.arc_index("1").unwrap();
    let h = gentle_core::ribbon::half(a, 0);
    assert!(matches!(
        CurvePath::open(&d, vec![h, twin(h)]),
        Err(CurveError::Backtrack(_))
    ));
    assert!(matches!(
        CurvePath::closed(&d, vec![h]),
        Err(CurveError::Disconnected(0, 0))
    ));
    assert_eq!(CurvePath::open(&d, vec![]), Err(CurveError::Empty));
}

#[test]
fn interior_points_have_no_winding() {
    let d = load_surf("punctured-disc");
    let c = parse_curve(&d, "1.- 5.+", CurveKind::Open).unwrap();
    assert!(matches!(winding(&d, &c), Err(CurveError::InteriorVertex(_))));
    assert!(matches!(boundary_curves(&d), Err(CurveError::InteriorVertex(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reversing_twice_is_identity(seed in any::<u64>()) {
        let mut g = rng(seed);
        let d = build_dissected_surface(&random_gentle(&mut g, 12)).unwrap();
        if let Some(w) = random_cycle(d.ribbon(), &mut g, 10) {
            let c = CurvePath::closed(&d, w).unwrap();
            prop_assert_eq!(c.reverse().reverse(), c);
        }
    }

    #[test]
    fn closed_windings_are_rotation_invariant(seed in any::<u64>(), shift in 0usize..20) {
        let mut g = rng(seed);
        let d = build_dissected_surface(&random_gentle(&mut g, 12)).unwrap();
        if let Some(mut w) = random_cycle(d.ribbon(), &mut g, 10) {
            let c = CurvePath::closed(&d, w.clone()).unwrap();
            let k = shift % w.len();
            w.rotate_left(k);
            let c2 = CurvePath::closed(&d, w).unwrap();
            prop_assert_eq!(winding(&d, &c).unwrap(), winding(&d, &c2).unwrap());
        }
    }
}
