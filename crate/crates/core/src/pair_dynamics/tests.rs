use super::*;
use crate::algebra::perron_data;

fn setup(rules: &[(&str, &str)]) -> (Substitution, Geometry) {
    let s = Substitution::from_rules("t", rules).unwrap();
    let p = perron_data(&s.abelianization()).unwrap();
    let g = Geometry::new(&s, &p).unwrap();
    (s, g)
}

fn st(g: &Geometry, i: usize, j: usize, v: Coords) -> OverlapState {
    let _ = g;
    OverlapState::new(Symbol(i), Symbol(j), v)
}

#[test]
fn thue_morse_aligned_refinement() {
    let (_, g) = setup(&[("a", "ab"), ("b", "ba")]);
    let out = substitute_overlap(&g, &st(&g, 0, 1, vec![0]));
    assert_eq!(out, vec![st(&g, 0, 1, vec![0]), st(&g, 1, 0, vec![0])]);
    let graph = overlap_closure(&g, &[st(&g, 0, 1, vec![0]), st(&g, 1, 0, vec![0])], &Caps::default()).unwrap();
    assert_eq!(graph.len(), 2);
    assert!(graph.coincidences().is_empty());
    assert!(!stably_equivalent(&g, &st(&g, 0, 1, vec![0]), &Caps::default()).unwrap());
    assert!(!densely_stably_equivalent(&g, &st(&g, 0, 1, vec![0]), &Caps::default()).unwrap());
}

#[test]
fn coincidences_are_absorbing() {
    let (_, g) = setup(&[("a", "ab"), ("b", "a")]);
    for i in 0..2 {
        let c = st(&g, i, i, g.zero());
        assert!(substitute_overlap(&g, &c).iter().all(|x| x.is_coincidence()));
        assert!(stably_equivalent(&g, &c, &Caps::default()).unwrap());
        assert!(densely_stably_equivalent(&g, &c, &Caps::default()).unwrap());
    }
}

#[test]
fn fibonacci_aligned_pairs_reach_coincidence() {
    let (_, g) = setup(&[("a", "ab"), ("b", "a")]);
    let graph = overlap_closure(&g, &aligned_seeds(&g, 2), &Caps::default()).unwrap();
    assert!(graph.reaches_coincidence().iter().all(|&r| r));
    assert!(graph.densely_reaches_coincidence().iter().all(|&r| r));
}

#[test]
fn fibonacci_shifted_overlap() {
    // a over a with offset ω(a) - ω(b) = 2 - λ
    let (_, g) = setup(&[("a", "ab"), ("b", "a")]);
    let v = geometry::sub(g.length(Symbol(0)), g.length(Symbol(1)));
    let s0 = st(&g, 0, 0, v.clone());
    assert!(s0.is_valid(&g));
    let out = substitute_overlap(&g, &s0);
    // inflated: ab at 0 and ab at λ(2-λ) = 2λ - λ^2 = λ - 1 = ω(b)
    let wb = g.length(Symbol(1)).clone();
    let expected = vec![
        st(&g, 0, 0, wb.clone()),
        st(&g, 1, 0, geometry::sub(&wb, g.length(Symbol(0)))),
    ];
    // the upper b starts exactly where the inflated lower tile ends
    assert_eq!(out, expected);
    for x in &out {
        assert!(x.is_valid(&g));
    }
}

#[test]
fn state_cap_is_reported() {
    let (_, g) = setup(&[("a", "ab"), ("b", "a")]);
    let caps = Caps { states: 1, ..Caps::default() };
    match overlap_closure(&g, &aligned_seeds(&g, 2), &caps) {
        Err(Error::CapExceeded { limit, .. }) => assert_eq!(limit, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn scc_of_two_cycles() {
    let edges = vec![vec![1], vec![0, 2], vec![2], vec![]];
    let mut comps = strongly_connected_components(&edges);
    comps.sort();
    assert_eq!(comps, vec![vec![0, 1], vec![2], vec![3]]);
}
