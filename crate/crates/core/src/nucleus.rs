//! Nucleus of a contracting self-similar group.
//!
//! The nucleus is grown from the eventual states of the generators and their
//! inverses by adding the eventual states of all pair products until nothing
//! new appears. Every result is re-checked by [`Nucleus::verify`] before it
//! is returned.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::automata::{export_moore, Element, Group, MooreDiagram, Naming};
use crate::error::{Error, Result};
use crate::par::Settings;
use crate::words::{Alphabet, Letter};

/// Pair products evaluated between two bound checks.
const CHUNK: usize = 512;

/// A finite restriction-closed and inverse-closed set of elements, sorted,
/// with the identity first.
#[derive(Clone, Debug)]
pub struct Nucleus {
    alphabet: Alphabet,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
    perms: Vec<Letter>,
    next: Vec<usize>,
    identity: usize,
}

/// Outcome of the contraction semi-decision.
#[derive(Clone, Debug)]
pub enum Contraction {
    Contracting(Nucleus),
    Unknown { bound: usize },
}

impl Nucleus {
    /// Wraps a restriction-closed set of elements that contains the identity.
    pub fn from_elements(alphabet: Alphabet, elements: &[Element]) -> Result<Nucleus> {
        let k = alphabet.size();
        let mut elements = elements.to_vec();
        elements.push(Element::identity(k));
        if let Some(g) = elements.iter().find(|g| g.degree() != k) {
            return Err(Error::AlphabetMismatch(k, g.degree()));
        }
        let diagram = export_moore(&elements)?;
        let elements = diagram.states;
        let index: HashMap<Element, usize> =
            elements.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        let mut perms = Vec::with_capacity(elements.len() * k);
        let mut next = vec![0; elements.len() * k];
        for g in &elements {
            perms.extend_from_slice(g.perm());
        }
        for e in &diagram.edges {
            next[e.from * k + e.input as usize] = e.to;
        }
        let identity = index[&Element::identity(k)];
        Ok(Nucleus {
            alphabet,
            elements,
            index,
            perms,
            next,
            identity,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of the identity element.
    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.index.contains_key(g)
    }

    /// Image of letter `x` under element `i`.
    pub fn image(&self, i: usize, x: Letter) -> Letter {
        self.perms[i * self.alphabet.size() + x as usize]
    }

    /// Index of the restriction of element `i` at letter `x`.
    pub fn next(&self, i: usize, x: Letter) -> usize {
        self.next[i * self.alphabet.size() + x as usize]
    }

    pub fn diagram(&self) -> MooreDiagram {
        export_moore(&self.elements).expect("nucleus is restriction-closed")
    }

    /// Checks restriction closure, inverse closure and that every pair
    /// product eventually restricts into the set.
    pub fn verify(&self, settings: &Settings) -> std::result::Result<(), String> {
        if self.elements[self.identity] != Element::identity(self.alphabet.size()) {
            return Err("identity missing".into());
        }
        for (i, g) in self.elements.iter().enumerate() {
            for x in self.alphabet.letters() {
                if !self.contains(&g.restrict_letter(x)) {
                    return Err(format!("element {i} restricted at {x} leaves the set"));
                }
            }
            if !self.contains(&g.inverse()) {
                return Err(format!("inverse of element {i} is missing"));
            }
        }
        let pairs: Vec<(usize, usize)> = (0..self.len())
            .flat_map(|i| (0..self.len()).map(move |j| (i, j)))
            .collect();
        let results = settings.exec.map(&pairs, |&(i, j)| {
            let p = self.elements[i]
                .multiply_bounded(&self.elements[j], settings.bound)
                .map_err(|e| e.to_string())?;
            self.eventually_inside(&p, settings.bound)
                .map_err(|e| format!("product of elements {i} and {j}: {e}"))
        });
        results.into_iter().collect()
    }

    /// Follows the sets of states of `p` reached by words of each length until
    /// they repeat, then requires every recurring state to be in the set.
    fn eventually_inside(&self, p: &Element, bound: usize) -> std::result::Result<(), String> {
        let states = p.state_closure();
        let table = p.transitions();
        let mut level: Vec<usize> = vec![0];
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut levels = Vec::new();
        for depth in 0..=bound {
            if let Some(&first) = seen.get(&level) {
                return match levels[first..]
                    .iter()
                    .flatten()
                    .find(|&&s| !self.contains(&states[s]))
                {
                    Some(s) => Err(format!("state {s} recurs at arbitrary depth outside the set")),
                    None => Ok(()),
                };
            }
            seen.insert(level.clone(), depth);
            let mut succ: Vec<usize> = level
                .iter()
                .flat_map(|&s| table[s].1.iter().copied())
                .collect();
            succ.sort_unstable();
            succ.dedup();
            levels.push(std::mem::replace(&mut level, succ));
        }
        Err(format!("no recurrence within depth {bound}"))
    }

    /// Names for nucleus elements: the identity, generators, inverses, then
    /// short products such as `g*h`, then `n<index>`.
    pub fn naming(&self, group: &Group) -> Naming {
        let mut naming = group.naming();
        let mut symbols: BTreeMap<String, Element> = BTreeMap::new();
        for (name, g) in group.names.iter().zip(&group.generators) {
            symbols.insert(name.clone(), g.clone());
            symbols.insert(format!("{name}^-1"), g.inverse());
        }
        let symbols: Vec<(String, Element)> = symbols.into_iter().collect();
        let unnamed = |n: &Naming| self.elements.iter().filter(|g| n.get(g).is_none()).count();
        let mut frontier = symbols.clone();
        let mut budget = 20_000usize;
        for _ in 2..=3 {
            if unnamed(&naming) == 0 || frontier.is_empty() {
                break;
            }
            let mut next = Vec::new();
            'outer: for (w, g) in &frontier {
                for (s, h) in &symbols {
                    if budget == 0 {
                        break 'outer;
                    }
                    budget -= 1;
                    if let Ok(p) = g.multiply(h) {
                        if self.contains(&p) {
                            naming.insert(p.clone(), format!("{w}*{s}"));
                        }
                        next.push((format!("{w}*{s}"), p));
                    }
                }
            }
            frontier = next;
        }
        for (i, g) in self.elements.iter().enumerate() {
            naming.insert(g.clone(), format!("n{i}"));
        }
        naming
    }
}

/// Semi-decides contraction: either the verified nucleus or `Unknown` once
/// the candidate set or a product closure exceeds `settings.bound`.
pub fn is_contracting(
    alphabet: Alphabet,
    generators: &[Element],
    settings: &Settings,
) -> Result<Contraction> {
    match compute_nucleus(alphabet, generators, settings) {
        Ok(n) => Ok(Contraction::Contracting(n)),
        Err(e) if e.is_unknown() => Ok(Contraction::Unknown {
            bound: settings.bound,
        }),
        Err(e) => Err(e),
    }
}

/// The nucleus of the group generated by `generators`.
pub fn compute_nucleus(alphabet: Alphabet, generators: &[Element], settings: &Settings) -> Result<Nucleus> {
    let k = alphabet.size();
    if let Some(g) = generators.iter().find(|g| g.degree() != k) {
        return Err(Error::AlphabetMismatch(k, g.degree()));
    }
    let bound = settings.bound;
    let overflow = |e: Error| if e.is_unknown() { Error::NucleusBound(bound) } else { e };

    let mut cand = vec![Element::identity(k)];
    let mut seen: HashSet<Element> = cand.iter().cloned().collect();
    for g in generators {
        for s in [g.clone(), g.inverse()] {
            for e in s.eventual_states() {
                if seen.insert(e.clone()) {
                    cand.push(e);
                }
            }
        }
    }
    if cand.len() > bound {
        return Err(Error::NucleusBound(bound));
    }

    let mut witnessed: HashSet<Element> = HashSet::new();
    let mut done = 0;
    while done < cand.len() {
        let n = cand.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| i >= done || j >= done).map(move |j| (i, j)))
            .collect();
        for chunk in pairs.chunks(CHUNK) {
            let results = settings.exec.map(chunk, |&(i, j)| {
                cand[i]
                    .multiply_bounded(&cand[j], bound)
                    .map(|p| p.eventual_states())
            });
            for r in results {
                for e in r.map_err(overflow)? {
                    if seen.insert(e.clone()) {
                        cand.push(e.clone());
                    }
                    witnessed.insert(e);
                }
            }
            if cand.len() > bound {
                return Err(Error::NucleusBound(bound));
            }
        }
        done = n;
    }
    cand.retain(|g| witnessed.contains(g));

    let nucleus = Nucleus::from_elements(alphabet, &cand)?;
    nucleus
        .verify(settings)
        .map_err(|e| Error::Contradiction(format!("nucleus failed verification: {e}")))?;
    Ok(nucleus)
}

impl Group {
    pub fn nucleus(&self, settings: &Settings) -> Result<Nucleus> {
        compute_nucleus(self.alphabet, &self.generators, settings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{DEFAULT_CLOSURE_BOUND, GroupSpec};
    use crate::par::Exec;

    fn group(json: &str) -> Group {
        GroupSpec::from_json(json).unwrap().build(DEFAULT_CLOSURE_BOUND).unwrap()
    }

    fn names(n: &Nucleus, g: &Group) -> Vec<String> {
        let naming = n.naming(g);
        let mut v: Vec<String> = n.elements().iter().map(|e| naming.name(e)).collect();
        v.sort();
        v
    }

    #[test]
    fn adding_machine() {
        let g = group(include_str!("../corpus/adding_machine.json"));
        let n = g.nucleus(&Settings::default()).unwrap();
        assert_eq!(names(&n, &g), ["1", "a", "a^-1"]);
    }

    #[test]
    fn hanoi() {
        let g = group(include_str!("../corpus/hanoi.json"));
        let n = g.nucleus(&Settings::default()).unwrap();
        assert_eq!(names(&n, &g), ["1", "a01", "a02", "a12"]);
    }

    #[test]
    fn nonstrict() {
        let g = group(include_str!("../corpus/nonstrict.json"));
        let n = g.nucleus(&Settings::default()).unwrap();
        assert_eq!(names(&n, &g), ["1", "a", "g", "g*h", "h"]);
        let gh = g.get("g").unwrap().multiply(g.get("h").unwrap()).unwrap();
        let a = g.get("a").unwrap();
        assert_eq!(gh.perm(), &[0, 1, 2]);
        assert_eq!(gh.restrict_letter(0), *a);
        assert_eq!(gh.restrict_letter(2), gh);
    }

    #[test]
    fn interval_and_grigorchuk() {
        let g = group(include_str!("../corpus/interval_group.json"));
        assert_eq!(names(&g.nucleus(&Settings::default()).unwrap(), &g), ["1", "g1", "g2"]);
        let g = group(include_str!("../corpus/grigorchuk.json"));
        assert_eq!(
            names(&g.nucleus(&Settings::default()).unwrap(), &g),
            ["1", "a", "b", "c", "d"]
        );
    }

    #[test]
    fn trivial_group() {
        let g = group(include_str!("../corpus/trivial.json"));
        let n = g.nucleus(&Settings::default()).unwrap();
        assert_eq!(n.len(), 1);
        assert_eq!(n.identity(), 0);
    }

    #[test]
    fn lamplighter_is_unknown() {
        let g = group(include_str!("../corpus/lamplighter.json"));
        let r = is_contracting(g.alphabet, &g.generators, &Settings::with_bound(256)).unwrap();
        assert!(matches!(r, Contraction::Unknown { bound: 256 }));
    }

    #[test]
    fn strategies_agree() {
        let g = group(include_str!("../corpus/hexakun_group.json"));
        let s = Settings::default();
        let a = g.nucleus(&Settings { exec: Exec::Sequential, ..s }).unwrap();
        let b = g.nucleus(&Settings { exec: Exec::Parallel, ..s }).unwrap();
        assert_eq!(a.elements(), b.elements());
    }

    #[test]
    fn minimality() {
        for json in [
            include_str!("../corpus/hanoi.json"),
            include_str!("../corpus/nonstrict.json"),
            include_str!("../corpus/grigorchuk.json"),
        ] {
            let g = group(json);
            let n = g.nucleus(&Settings::default()).unwrap();
            for i in 0..n.len() {
                if i == n.identity() {
                    continue;
                }
                // The element must recur in some pair product of the others,
                // so no smaller set absorbs every product.
                let e = &n.elements()[i];
                let needed = n.elements().iter().any(|g| {
                    n.elements()
                        .iter()
                        .any(|h| g.multiply(h).unwrap().eventual_states().contains(e))
                });
                assert!(needed, "element {i} is redundant");
            }
        }
    }
}
