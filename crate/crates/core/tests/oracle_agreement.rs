#[path = "support/oracles.rs"]
mod oracles;

use std::collections::BTreeSet;

use proptest::prelude::*;
use ssg_core::analysis::{are_equivalent, check_condition2, check_pcf, equivalence_class};
use ssg_core::corpus;
use ssg_core::limitspace::{critical_sets, gluing_classes, shift_class, tile_graph, Shifted};
use ssg_core::{is_contracting, Contraction, EventuallyPeriodicWord, Group, GroupSpec, Nucleus, Settings};

const GROUPS: &[&str] = &[
    "adding_machine.json",
    "double_loop.json",
    "grigorchuk.json",
    "hanoi.json",
    "hexakun_group.json",
    "interval_group.json",
    "nonstrict.json",
    "pentakun_group.json",
    "trivial.json",
];

fn load(name: &str) -> (Group, Nucleus) {
    let g = GroupSpec::from_json(corpus::file(name).unwrap()).unwrap().build(10_000).unwrap();
    match is_contracting(g.alphabet, &g.generators, &Settings::default()).unwrap() {
        Contraction::Contracting(n) => (g, n),
        Contraction::Unknown { .. } => panic!("{name} should be contracting"),
    }
}

#[test]
fn pcf_matches_path_counting() {
    for name in GROUPS {
        let (_, n) = load(name);
        assert_eq!(check_pcf(&n), oracles::pcf_oracle(&n), "{name}");
    }
}

#[test]
fn condition2_matches_enumeration() {
    for name in GROUPS {
        let (_, n) = load(name);
        assert_eq!(check_condition2(&n).unwrap(), oracles::condition2_oracle(&n), "{name}");
    }
}

#[test]
fn tile_graphs_match_boundary_equivalence() {
    for (name, levels) in [("hanoi.json", 2), ("adding_machine.json", 3), ("interval_group.json", 3), ("nonstrict.json", 2)] {
        let (_, n) = load(name);
        for level in 0..=levels {
            let t = tile_graph(&n, level, &Settings::default()).unwrap();
            let ours: BTreeSet<_> = t
                .edges
                .iter()
                .map(|&(a, b)| (t.vertices[a].letters().to_vec(), t.vertices[b].letters().to_vec()))
                .collect();
            assert_eq!(ours, oracles::tile_edges_oracle(&n, level), "{name} level {level}");
        }
    }
}

#[test]
fn tile_graphs_are_symmetric_and_deterministic() {
    for name in GROUPS {
        let (_, n) = load(name);
        let level = if n.alphabet().size() > 3 { 2 } else { 3 };
        let par = tile_graph(&n, level, &Settings::default()).unwrap();
        let seq = tile_graph(&n, level, &Settings::default().sequential()).unwrap();
        assert_eq!(par, seq);
        // Each non-trivial element's inverse is in the nucleus, so g(u)=v
        // for some g iff g'(v)=u for some g'.
        for &(a, b) in &par.edges {
            assert!(a < b);
        }
    }
}

#[test]
fn gluing_classes_are_equivalence_classes() {
    for name in ["hanoi.json", "grigorchuk.json", "interval_group.json", "nonstrict.json", "pentakun_group.json", "hexakun_group.json"] {
        let (_, n) = load(name);
        let classes = gluing_classes(&n).unwrap();
        for c in &classes {
            let members = c.members();
            for u in &members {
                assert_eq!(equivalence_class(u, &n).unwrap(), members, "{name} {c}");
            }
        }
        let (critical, post) = critical_sets(&classes);
        for w in &critical {
            assert!(post.contains(&w.shift()));
        }
    }
}

fn shift_members(s: &Shifted) -> BTreeSet<EventuallyPeriodicWord> {
    match s {
        Shifted::Word(w) => [w.clone()].into(),
        Shifted::Class(c) => c.members().into_iter().collect(),
    }
}

proptest! {
    #[test]
    fn shift_class_matches_member_shifts(
        tail in proptest::collection::vec(0u8..3, 1..3),
        sets in proptest::collection::vec(proptest::collection::btree_set(0u8..3, 1..3), 1..4),
    ) {
        let c = ssg_core::GluingClass::new(tail, sets.into_iter().map(|s| s.into_iter().collect()).collect());
        let shifted: BTreeSet<_> = c.members().iter().map(|w| w.shift()).collect();
        prop_assert_eq!(shift_members(&shift_class(&c)), shifted);
    }

    #[test]
    fn hanoi_equivalence_is_symmetric(
        t1 in 0u8..3, h1 in proptest::collection::vec(0u8..3, 0..3),
        t2 in 0u8..3, h2 in proptest::collection::vec(0u8..3, 0..3),
    ) {
        let (_, n) = load("hanoi.json");
        let u = EventuallyPeriodicWord::new(vec![t1], h1).unwrap();
        let v = EventuallyPeriodicWord::new(vec![t2], h2).unwrap();
        prop_assert_eq!(are_equivalent(&u, &v, &n), are_equivalent(&v, &u, &n));
        prop_assert_eq!(are_equivalent(&u, &v, &n), equivalence_class(&u, &n).unwrap().contains(&v));
    }
}
