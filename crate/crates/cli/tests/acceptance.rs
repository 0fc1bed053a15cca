//! One PASS/FAIL line per acceptance criterion.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use ssg_core::analysis::{
    are_equivalent, check_condition2, check_pcf, check_strictly_pcf, equivalence_class, is_bounded_element,
};
use ssg_core::construction::{roundtrip_verify, synthesize, StructureSpec};
use ssg_core::corpus;
use ssg_core::limitspace::{critical_sets, gluing_classes, tile_graph};
use ssg_core::{
    decide_equal, is_contracting, Contraction, Element, EventuallyPeriodicWord, Group, GroupSpec, Letter, Nucleus,
    Settings,
};

const CASES: u32 = 256;

fn config() -> Config {
    Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    }
}

fn group(name: &str) -> Group {
    GroupSpec::from_json(corpus::file(name).unwrap()).unwrap().build(10_000).unwrap()
}

fn nucleus(g: &Group) -> Nucleus {
    g.nucleus(&Settings::default()).unwrap()
}

fn structure(name: &str) -> StructureSpec {
    StructureSpec::from_json(corpus::file(name).unwrap()).unwrap()
}

fn names(n: &Nucleus, g: &Group) -> BTreeSet<String> {
    let naming = n.naming(g);
    n.elements().iter().map(|e| naming.name(e)).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Diagram edges as `(from, input, output, to)` with element names.
fn edges(n: &Nucleus, g: &Group) -> BTreeSet<(String, Letter, Letter, String)> {
    let naming = n.naming(g);
    let d = n.diagram();
    d.edges
        .iter()
        .map(|e| (naming.name(&d.states[e.from]), e.input, e.output, naming.name(&d.states[e.to])))
        .collect()
}

fn edge_set(items: &[(&str, Letter, Letter, &str)]) -> BTreeSet<(String, Letter, Letter, String)> {
    items.iter().map(|&(a, x, y, b)| (a.to_string(), x, y, b.to_string())).collect()
}

fn identity_loops(k: Letter) -> Vec<(&'static str, Letter, Letter, &'static str)> {
    (0..k).map(|x| ("1", x, x, "1")).collect()
}

fn ssg(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ssg")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn corpus_path(name: &str) -> String {
    format!("{}/../core/corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn adding_machine() {
    let g = group("adding_machine.json");
    let n = nucleus(&g);
    assert_eq!(names(&n, &g), set(&["1", "a", "a^-1"]));
    let mut expected = identity_loops(2);
    expected.extend([("a", 0, 1, "1"), ("a", 1, 0, "a"), ("a^-1", 0, 1, "a^-1"), ("a^-1", 1, 0, "1")]);
    assert_eq!(edges(&n, &g), edge_set(&expected));
    assert!(!check_condition2(&n).unwrap());
    assert!(check_pcf(&n));
}

fn hanoi() {
    let g = group("hanoi.json");
    let n = nucleus(&g);
    assert_eq!(names(&n, &g), set(&["1", "a01", "a02", "a12"]));
    let mut expected = identity_loops(3);
    for (name, i, j, k) in [("a01", 0, 1, 2), ("a02", 0, 2, 1), ("a12", 1, 2, 0)] {
        expected.extend([(name, i, j, "1"), (name, j, i, "1"), (name, k, k, name)]);
    }
    assert_eq!(edges(&n, &g), edge_set(&expected));
    assert!(check_condition2(&n).unwrap());
    let classes = gluing_classes(&n).unwrap();
    assert_eq!(StructureSpec::new(g.alphabet, classes), structure("hanoi_structure.json"));
    let s = Settings::default();
    assert_eq!(tile_graph(&n, 1, &s).unwrap().edges, vec![(0, 1), (0, 2), (1, 2)]);
    let level2 = tile_graph(&n, 2, &s).unwrap();
    let oracle = oracles::tile_edges_oracle(&n, 2);
    assert_eq!(level2.edges.len(), oracle.len());
    assert_eq!(oracle.len(), 12);
}

fn nonstrict_group() {
    let g = group("nonstrict.json");
    let n = nucleus(&g);
    assert_eq!(names(&n, &g), set(&["1", "a", "g", "h", "g*h"]));
    assert!(check_condition2(&n).unwrap());
    assert!(check_pcf(&n));
    assert!(!check_strictly_pcf(&g.generators, &n));
    assert!(g.generators.iter().all(is_bounded_element));
}

fn interval() {
    let s = structure("interval.json");
    let r = synthesize(&s, &Settings::default()).unwrap();
    let spec = &r.group;
    assert_eq!(spec.generators.len(), 2);
    let (g1, g2) = (&spec.generators[0], &spec.generators[1]);
    assert_eq!((g1.perm.as_slice(), g1.rest.iter().all(Vec::is_empty)), (&[1, 0][..], true));
    assert_eq!(g2.perm, vec![0, 1]);
    let rest: Vec<Vec<String>> = g2.rest.iter().map(|w| w.iter().map(|t| t.to_string()).collect()).collect();
    assert_eq!(rest, vec![vec![g1.name.clone()], vec![g2.name.clone()]]);
    let built = spec.build(1000).unwrap();
    for e in &built.generators {
        assert!(e.multiply(e).unwrap().is_identity());
    }
    let n = nucleus(&built);
    let (a, b) = (g1.name.as_str(), g2.name.as_str());
    assert_eq!(names(&n, &built), set(&["1", a, b]));
    let mut expected = identity_loops(2);
    expected.extend([(a, 0, 1, "1"), (a, 1, 0, "1"), (b, 0, 0, a), (b, 1, 1, b)]);
    assert_eq!(edges(&n, &built), edge_set(&expected));
    assert!(roundtrip_verify(&s, &Settings::default()).unwrap().0.ok());
    assert!(check_strictly_pcf(&built.generators, &n));
}

fn grigorchuk() {
    let g = group("grigorchuk.json");
    let n = nucleus(&g);
    let classes = gluing_classes(&n).unwrap();
    assert_eq!(classes, structure("interval.json").classes);
    let built = synthesize(&structure("interval.json"), &Settings::default()).unwrap().group.build(1000).unwrap();
    let m = nucleus(&built);
    let missing = |from: &Nucleus, to: &Nucleus| {
        from.elements().iter().filter(|x| !to.elements().iter().any(|y| decide_equal(x, y))).count()
    };
    assert!(missing(&n, &m) > 0 && missing(&m, &n) > 0);
}

fn pentakun() {
    let s = structure("pentakun.json");
    let r = synthesize(&s, &Settings::default()).unwrap();
    assert_eq!(r.generators.len(), 5);
    let ours = r.group.build(1000).unwrap();
    let published = group("pentakun_group.json");
    for (k, e) in ours.generators.iter().enumerate() {
        assert!(decide_equal(e, published.get(&format!("a{k}")).unwrap()));
    }
    let n = nucleus(&ours);
    assert_eq!(n.len(), 6);
    let mut expected: BTreeSet<Element> = published.generators.iter().cloned().collect();
    expected.insert(Element::identity(5));
    assert_eq!(n.elements().iter().cloned().collect::<BTreeSet<_>>(), expected);
    assert!(roundtrip_verify(&s, &Settings::default()).unwrap().0.ok());
}

fn hexakun() {
    let s = structure("hexakun.json");
    let r = synthesize(&s, &Settings::default()).unwrap();
    assert_eq!(r.generators.len(), 12);
    assert_eq!(r.survivors().len(), 9);
    assert_eq!(r.dedup.iter().filter(|(k, v)| k != v).count(), 3);
    let ours: BTreeSet<Element> = r.group.build(1000).unwrap().generators.into_iter().collect();
    let published: BTreeSet<Element> = group("hexakun_group.json").generators.into_iter().collect();
    assert_eq!(ours, published);
    let (rt, _) = roundtrip_verify(&s, &Settings::default()).unwrap();
    assert!(rt.ok());
    let post: Vec<String> = critical_sets(&rt.extracted).1.iter().map(|w| w.to_string()).collect();
    assert_eq!(post, vec!["0*", "0*2", "0*4"]);
}

fn rejections() {
    for file in ["sierpinski_usual_equations.json", "pentakun_usual_equations.json"] {
        let (code, _, err) = ssg(&["construct", "-i", &corpus_path(file)]);
        assert_eq!(code, 2, "{file}");
        assert!(err.contains("shift map undefined") && err.contains("unequal tails"), "{err}");
    }
}

/// Contracting corpus groups for the random suites.
const CONTRACTING: &[&str] = &[
    "adding_machine.json",
    "grigorchuk.json",
    "hanoi.json",
    "interval_group.json",
    "nonstrict.json",
    "pentakun_group.json",
];

fn random_word(k: usize) -> impl Strategy<Value = EventuallyPeriodicWord> {
    let letter = 0..k as Letter;
    (
        proptest::collection::vec(letter.clone(), 1..3),
        proptest::collection::vec(letter, 0..4),
    )
        .prop_map(|(t, h)| EventuallyPeriodicWord::new(t, h).unwrap())
}

fn run(name: &str, strategy: impl Strategy<Value = (usize, u64)>, test: impl Fn(&Group, &Nucleus, u64) -> Result<(), TestCaseError>) {
    let loaded: Vec<(Group, Nucleus)> = CONTRACTING
        .iter()
        .map(|f| {
            let g = group(f);
            let n = nucleus(&g);
            (g, n)
        })
        .collect();
    let mut runner = TestRunner::new(config());
    runner
        .run(&strategy, |(i, seed)| {
            let (g, n) = &loaded[i % loaded.len()];
            test(g, n, seed)
        })
        .unwrap_or_else(|e| panic!("{name}: {e}"));
}

/// Picks deterministic pseudo-random values from a seed.
struct Picker(u64);

impl Picker {
    fn next(&mut self, m: usize) -> usize {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 33) % m as u64) as usize
    }

    fn word(&mut self, k: usize, max_len: usize) -> EventuallyPeriodicWord {
        let tail: Vec<Letter> = (0..1 + self.next(2)).map(|_| self.next(k) as Letter).collect();
        let head: Vec<Letter> = (0..self.next(max_len + 1)).map(|_| self.next(k) as Letter).collect();
        EventuallyPeriodicWord::new(tail, head).unwrap()
    }
}

fn property_suites() {
    let cases = (0..CONTRACTING.len() * 50, any::<u64>());
    run("restriction and inverse closure", cases.clone(), |_, n, seed| {
        let mut p = Picker(seed);
        let e = &n.elements()[p.next(n.len())];
        let x = p.next(n.alphabet().size()) as Letter;
        prop_assert!(n.contains(&e.restrict_letter(x)));
        prop_assert!(n.contains(&e.inverse()));
        Ok(())
    });
    run("pair-product eventual containment", cases.clone(), |_, n, seed| {
        let mut p = Picker(seed);
        let a = &n.elements()[p.next(n.len())];
        let b = &n.elements()[p.next(n.len())];
        let prod = a.multiply_bounded(b, 10_000).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for s in prod.eventual_states() {
            prop_assert!(n.contains(&s));
        }
        Ok(())
    });
    run("class size at most |N|", cases.clone(), |_, n, seed| {
        let w = Picker(seed).word(n.alphabet().size(), 3);
        let class = equivalence_class(&w, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(class.len() <= n.len());
        prop_assert!(class.contains(&w));
        Ok(())
    });
    run("equivalence shift-compatibility", cases.clone(), |_, n, seed| {
        let mut p = Picker(seed);
        let u = p.word(n.alphabet().size(), 3);
        let class = equivalence_class(&u, n).unwrap();
        let v = &class[p.next(class.len())];
        prop_assert!(are_equivalent(&u.shift(), &v.shift(), n));
        Ok(())
    });
    run("condition-2 append-compatibility", cases.clone(), |_, n, seed| {
        if !check_condition2(n).unwrap() {
            return Ok(());
        }
        let mut p = Picker(seed);
        let k = n.alphabet().size();
        let u = p.word(k, 3);
        let class = equivalence_class(&u, n).unwrap();
        let v = &class[p.next(class.len())];
        let w: Vec<Letter> = (0..p.next(4)).map(|_| p.next(k) as Letter).collect();
        prop_assert!(are_equivalent(&u.append(&w), &v.append(&w), n));
        Ok(())
    });
    // Independent strategy over explicit words on the Hanoi group.
    let hanoi = group("hanoi.json");
    let hn = nucleus(&hanoi);
    let mut runner = TestRunner::new(config());
    runner
        .run(&(random_word(3), random_word(3)), |(u, v)| {
            prop_assert_eq!(are_equivalent(&u, &v, &hn), are_equivalent(&v, &u, &hn));
            Ok(())
        })
        .unwrap();
    for file in ["double_loop.json", "hexakun_group.json", "trivial.json"].iter().chain(CONTRACTING) {
        let g = group(file);
        let n = nucleus(&g);
        assert_eq!(check_pcf(&n), oracles::pcf_oracle(&n), "pcf oracle on {file}");
        assert_eq!(check_condition2(&n).unwrap(), oracles::condition2_oracle(&n), "condition2 oracle on {file}");
    }
}

fn lamplighter() {
    let g = group("lamplighter.json");
    let r = is_contracting(g.alphabet, &g.generators, &Settings::with_bound(256)).unwrap();
    assert!(matches!(r, Contraction::Unknown { bound: 256 }));
    let (code, out, err) = ssg(&["nucleus", "-i", &corpus_path("lamplighter.json"), "--bound", "256"]);
    assert_eq!(code, 3, "{err}");
    assert!(!out.contains("nucleus:"));
}

fn main() {
    let criteria: [(&str, fn()); 10] = [
        ("adding machine nucleus, Moore diagram, condition 2 false, pcf true", adding_machine),
        ("Hanoi nucleus, condition 2, gluing classes, tile graphs", hanoi),
        ("non-strict p.c.f. group nucleus and properties", nonstrict_group),
        ("interval structure synthesis and round trip", interval),
        ("Grigorchuk gluing classes equal interval spec, nuclei differ", grigorchuk),
        ("pentakun synthesis, 6-state nucleus, round trip", pentakun),
        ("hexakun 12 to 9 generators, postcritical set, round trip", hexakun),
        ("usual-structure equations rejected with exit 2", rejections),
        ("property suites and oracle agreement", property_suites),
        ("lamplighter unknown at bound 256", lamplighter),
    ];
    let mut failed = Vec::new();
    for (i, (desc, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let secs = start.elapsed().as_secs_f64();
        let status = if result.is_ok() { "PASS" } else { "FAIL" };
        println!("{status} criterion {}: {desc} ({secs:.2}s)", i + 1);
        if result.is_err() {
            failed.push(i + 1);
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
