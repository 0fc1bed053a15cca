//! Brute-force oracles that share no code with the decision procedures they
//! cross-check.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use ssg_core::analysis::are_equivalent;
use ssg_core::{EventuallyPeriodicWord, Letter, Nucleus};

type Label = (Letter, Letter);

fn movers(n: &Nucleus) -> Vec<usize> {
    (0..n.len()).filter(|&i| i != n.identity()).collect()
}

/// States with a backward path of length `|N|` inside the non-trivial part,
/// hence with an infinite one.
fn backward_infinite(n: &Nucleus) -> Vec<bool> {
    let id = n.identity();
    let mut has = vec![true; n.len()];
    has[id] = false;
    for _ in 0..n.len() {
        let mut next = vec![false; n.len()];
        for s in movers(n) {
            if !has[s] {
                continue;
            }
            for x in n.alphabet().letters() {
                let t = n.next(s, x);
                if t != id {
                    next[t] = true;
                }
            }
        }
        has = next;
    }
    has
}

/// Number of non-trivial paths of length `len` that extend infinitely to
/// the left, as a float so that exponential growth saturates to infinity.
pub fn backward_path_count(n: &Nucleus, len: usize) -> f64 {
    let id = n.identity();
    let mut count: Vec<f64> = backward_infinite(n).iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    for _ in 0..len {
        let mut next = vec![0.0; n.len()];
        for s in movers(n) {
            for x in n.alphabet().letters() {
                let t = n.next(s, x);
                if t != id {
                    next[t] += count[s];
                }
            }
        }
        count = next;
    }
    count.iter().sum()
}

/// Post-critical finiteness by path counting: the count is non-decreasing in
/// the length and bounded exactly when finitely many left-infinite paths exist.
pub fn pcf_oracle(n: &Nucleus) -> bool {
    let m = n.len().max(1);
    let a = backward_path_count(n, 2 * m);
    let b = backward_path_count(n, 2 * m * m);
    a.is_finite() && a == b
}

fn post(n: &Nucleus, set: &BTreeSet<usize>, label: Label) -> BTreeSet<usize> {
    set.iter()
        .filter(|&&s| n.image(s, label.0) == label.1)
        .map(|&s| n.next(s, label.0))
        .collect()
}

fn post_word(n: &Nucleus, set: &BTreeSet<usize>, word: &[Label]) -> BTreeSet<usize> {
    word.iter().fold(set.clone(), |s, &l| post(n, &s, l))
}

/// States ending some left-infinite path labeled by the periodic word `cycle`.
fn periodic_ends(n: &Nucleus, cycle: &[Label]) -> BTreeSet<usize> {
    let mut set: BTreeSet<usize> = (0..n.len()).collect();
    loop {
        let next = post_word(n, &set, cycle);
        if next == set {
            return set;
        }
        set = next;
    }
}

/// Label words of length `len` carried by some path of the diagram.
fn realized(n: &Nucleus, len: usize) -> BTreeSet<Vec<Label>> {
    let mut layer: HashSet<(usize, Vec<Label>)> = (0..n.len()).map(|s| (s, Vec::new())).collect();
    for _ in 0..len {
        let mut next = HashSet::new();
        for (s, w) in &layer {
            for x in n.alphabet().letters() {
                let mut w = w.clone();
                w.push((x, n.image(*s, x)));
                next.insert((n.next(*s, x), w));
            }
        }
        layer = next;
    }
    layer.into_iter().map(|(_, w)| w).collect()
}

fn fixes(n: &Nucleus, g: usize, w: &[Letter]) -> bool {
    let mut s = g;
    for &x in w {
        if n.image(s, x) != x {
            return false;
        }
        s = n.next(s, x);
    }
    true
}

/// Condition 2 on eventually periodic label sequences `cycle^∞ tail` with
/// short cycles and tails, each end set required to fix every word of
/// length at most 4 with one of its members.
pub fn condition2_oracle(n: &Nucleus) -> bool {
    const CANDIDATES: usize = 4000;
    let max_len = n.len().min(4);
    let mut words: Vec<Vec<Label>> = vec![Vec::new()];
    for len in 1..=max_len {
        let r = realized(n, len);
        if words.len() + r.len() > CANDIDATES && len > 1 {
            break;
        }
        words.extend(r);
    }
    let test_words: Vec<Vec<Letter>> = (0..=4usize)
        .flat_map(|l| n.alphabet().words(l))
        .map(|w| w.letters().to_vec())
        .collect();
    let id = n.identity();
    let bases: BTreeSet<BTreeSet<usize>> = words
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| periodic_ends(n, c))
        .filter(|b| !b.is_empty())
        .collect();
    let mut ends_seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for base in &bases {
        for tail in &words {
            ends_seen.insert(post_word(n, base, tail));
        }
    }
    for ends in ends_seen.iter().filter(|e| e.iter().any(|&s| s != id)) {
        if !test_words.iter().all(|w| ends.iter().any(|&g| fixes(n, g, w))) {
            return false;
        }
    }
    true
}

/// Level-`level` tile adjacencies found by testing asymptotic equivalence of
/// boundary words `t* s u` and `t'* s' v` with short tails `t`, `t'` and
/// heads `s`, `s'`.
pub fn tile_edges_oracle(n: &Nucleus, level: usize) -> BTreeSet<(Vec<Letter>, Vec<Letter>)> {
    let a = n.alphabet();
    let mut prefixes: Vec<(Vec<Letter>, Vec<Letter>)> = Vec::new();
    for t in (1..=2).flat_map(|l| a.words(l)) {
        for s in (0..=1).flat_map(|l| a.words(l)) {
            prefixes.push((t.letters().to_vec(), s.letters().to_vec()));
        }
    }
    let vertices: Vec<Vec<Letter>> = a.words(level).into_iter().map(|w| w.letters().to_vec()).collect();
    let boundary = |(t, s): &(Vec<Letter>, Vec<Letter>), u: &[Letter]| {
        let mut head = s.clone();
        head.extend_from_slice(u);
        EventuallyPeriodicWord::new(t.clone(), head).expect("nonempty tail")
    };
    let mut edges = BTreeSet::new();
    for (i, u) in vertices.iter().enumerate() {
        for v in &vertices[i + 1..] {
            let touching = prefixes.iter().any(|p| {
                let x = boundary(p, u);
                prefixes.iter().any(|q| are_equivalent(&x, &boundary(q, v), n))
            });
            if touching {
                edges.insert((u.clone(), v.clone()));
            }
        }
    }
    edges
}
