//! Tree automorphisms given by finite automata.
//!
//! Every [`Element`] is a minimized automaton with its root at state 0 and
//! states numbered in breadth-first order. Minimized automata are unique up
//! to that numbering, so two elements act identically on the tree exactly
//! when their automata are identical. A process-wide interner keeps one
//! copy of each automaton, which makes equality a pointer comparison.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{normalize, Alphabet, EventuallyPeriodicWord, Letter};

/// Default limit on the number of automaton states explored by one operation.
pub const DEFAULT_CLOSURE_BOUND: usize = 10_000;

#[derive(Debug, PartialEq, Eq, Hash)]
struct Machine {
    degree: usize,
    perms: Box<[Letter]>,
    next: Box<[u32]>,
}

impl Machine {
    fn len(&self) -> usize {
        self.perms.len() / self.degree
    }

    fn perm(&self, s: usize) -> &[Letter] {
        &self.perms[s * self.degree..(s + 1) * self.degree]
    }

    fn next(&self, s: usize, x: Letter) -> usize {
        self.next[s * self.degree + x as usize] as usize
    }
}

fn pool() -> &'static Mutex<HashSet<Arc<Machine>>> {
    static POOL: OnceLock<Mutex<HashSet<Arc<Machine>>>> = OnceLock::new();
    POOL.get_or_init(Default::default)
}

fn intern(m: Machine) -> Element {
    let mut set = pool().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(a) = set.get(&m) {
        return Element(a.clone());
    }
    let a = Arc::new(m);
    set.insert(a.clone());
    Element(a)
}

/// Unminimized automaton used while building elements.
struct Raw {
    degree: usize,
    perms: Vec<Letter>,
    next: Vec<u32>,
}

impl Raw {
    fn new(degree: usize) -> Self {
        Raw {
            degree,
            perms: Vec::new(),
            next: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.perms.len() / self.degree
    }

    fn add_state(&mut self, perm: &[Letter]) -> u32 {
        let id = self.len() as u32;
        self.perms.extend_from_slice(perm);
        self.next.extend(std::iter::repeat_n(u32::MAX, self.degree));
        id
    }

    fn set_next(&mut self, s: u32, x: usize, t: u32) {
        self.next[s as usize * self.degree + x] = t;
    }

    fn perm(&self, s: usize) -> &[Letter] {
        &self.perms[s * self.degree..(s + 1) * self.degree]
    }

    fn next(&self, s: usize, x: usize) -> usize {
        self.next[s * self.degree + x] as usize
    }

    fn from_machine(m: &Machine) -> Self {
        Raw {
            degree: m.degree,
            perms: m.perms.to_vec(),
            next: m.next.to_vec(),
        }
    }

    /// Minimizes the part reachable from `roots` and interns one element per root.
    fn canonical(&self, roots: &[u32]) -> Vec<Element> {
        let k = self.degree;
        // Reachable states.
        let mut local = vec![u32::MAX; self.len()];
        let mut order = Vec::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &r in roots {
            if local[r as usize] == u32::MAX {
                local[r as usize] = order.len() as u32;
                order.push(r as usize);
                queue.push_back(r as usize);
            }
        }
        while let Some(s) = queue.pop_front() {
            for x in 0..k {
                let t = self.next(s, x);
                if local[t] == u32::MAX {
                    local[t] = order.len() as u32;
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }

        // Moore partition refinement.
        let n = order.len();
        let mut class = vec![0u32; n];
        let mut count = {
            let mut ids: HashMap<&[Letter], u32> = HashMap::new();
            for (i, &s) in order.iter().enumerate() {
                let next_id = ids.len() as u32;
                class[i] = *ids.entry(self.perm(s)).or_insert(next_id);
            }
            ids.len()
        };
        loop {
            let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut refined = vec![0u32; n];
            for (i, &s) in order.iter().enumerate() {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[i]);
                sig.extend((0..k).map(|x| class[local[self.next(s, x)] as usize]));
                let next_id = ids.len() as u32;
                refined[i] = *ids.entry(sig).or_insert(next_id);
            }
            class = refined;
            if ids.len() == count {
                break;
            }
            count = ids.len();
        }

        // Quotient automaton.
        let mut rep = vec![usize::MAX; count];
        for (i, &s) in order.iter().enumerate() {
            let c = class[i] as usize;
            if rep[c] == usize::MAX {
                rep[c] = s;
            }
        }
        let class_of = |s: usize| class[local[s] as usize] as usize;

        roots
            .iter()
            .map(|&r| {
                let mut id = vec![u32::MAX; count];
                let mut bfs = vec![class_of(r as usize)];
                id[bfs[0]] = 0;
                let mut i = 0;
                while i < bfs.len() {
                    let c = bfs[i];
                    for x in 0..k {
                        let d = class_of(self.next(rep[c], x));
                        if id[d] == u32::MAX {
                            id[d] = bfs.len() as u32;
                            bfs.push(d);
                        }
                    }
                    i += 1;
                }
                let mut perms = Vec::with_capacity(bfs.len() * k);
                let mut next = Vec::with_capacity(bfs.len() * k);
                for &c in &bfs {
                    perms.extend_from_slice(self.perm(rep[c]));
                    next.extend((0..k).map(|x| id[class_of(self.next(rep[c], x))]));
                }
                intern(Machine {
                    degree: k,
                    perms: perms.into(),
                    next: next.into(),
                })
            })
            .collect()
    }
}

fn invert_perm(p: &[Letter]) -> Vec<Letter> {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y as usize] = x as Letter;
    }
    inv
}

fn is_permutation(p: &[Letter]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&y| {
        let y = y as usize;
        y < p.len() && !std::mem::replace(&mut seen[y], true)
    })
}

/// A finite-state automorphism of the tree of words over an alphabet.
#[derive(Clone)]
pub struct Element(Arc<Machine>);

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (Arc::as_ptr(&self.0) as usize).hash(state)
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let (a, b) = (&*self.0, &*other.0);
        (a.degree, a.len(), &a.perms, &a.next).cmp(&(b.degree, b.len(), &b.perms, &b.next))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element(states={}, perm={:?})", self.num_states(), self.perm())
    }
}

impl Element {
    pub fn identity(degree: usize) -> Element {
        assert!(degree >= 1);
        intern(Machine {
            degree,
            perms: (0..degree).map(|x| x as Letter).collect(),
            next: vec![0; degree].into(),
        })
    }

    /// The element `perm (rest[0], ..., rest[k-1])`.
    pub fn from_wreath(perm: &[Letter], rest: &[Element]) -> Result<Element> {
        let k = perm.len();
        if !is_permutation(perm) {
            return Err(Error::InvalidGroup(format!("{perm:?} is not a permutation")));
        }
        if rest.len() != k {
            return Err(Error::InvalidGroup(format!(
                "expected {k} restrictions, got {}",
                rest.len()
            )));
        }
        if let Some(r) = rest.iter().find(|r| r.degree() != k) {
            return Err(Error::AlphabetMismatch(k, r.degree()));
        }
        let mut raw = Raw::new(k);
        let root = raw.add_state(perm);
        let mut offsets: HashMap<&Element, u32> = HashMap::new();
        for r in rest {
            if offsets.contains_key(r) {
                continue;
            }
            let base = raw.len() as u32;
            offsets.insert(r, base);
            let m = &r.0;
            for s in 0..m.len() {
                let id = raw.add_state(m.perm(s));
                for x in 0..k {
                    raw.set_next(id, x, base + m.next(s, x as Letter) as u32);
                }
            }
        }
        for (x, r) in rest.iter().enumerate() {
            raw.set_next(root, x, offsets[r]);
        }
        Ok(raw.canonical(&[root]).pop().expect("one root"))
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.degree()).expect("degree is valid")
    }

    /// Number of states of the minimized automaton, i.e. the size of the state closure.
    pub fn num_states(&self) -> usize {
        self.0.len()
    }

    /// Root permutation as a list of images.
    pub fn perm(&self) -> &[Letter] {
        self.0.perm(0)
    }

    pub fn image(&self, x: Letter) -> Letter {
        self.perm()[x as usize]
    }

    pub fn is_identity(&self) -> bool {
        let m = &self.0;
        m.len() == 1 && m.perm(0).iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    fn state(&self, s: usize) -> Element {
        if s == 0 {
            return self.clone();
        }
        Raw::from_machine(&self.0)
            .canonical(&[s as u32])
            .pop()
            .expect("one root")
    }

    pub fn restrict_letter(&self, x: Letter) -> Element {
        self.state(self.0.next(0, x))
    }

    /// The restriction `g|_v`; letters of `v` are read left to right.
    pub fn restrict(&self, v: &[Letter]) -> Element {
        let m = &self.0;
        let s = v.iter().fold(0, |s, &x| m.next(s, x));
        self.state(s)
    }

    /// Image of a finite word; the leftmost letter is processed first.
    pub fn act(&self, w: &[Letter]) -> Vec<Letter> {
        let m = &self.0;
        let mut s = 0;
        w.iter()
            .map(|&x| {
                let y = m.perm(s)[x as usize];
                s = m.next(s, x);
                y
            })
            .collect()
    }

    /// Image of a left-infinite word under the boundary action, in which the
    /// rightmost letter is the one adjacent to the root.
    pub fn act_periodic(&self, w: &EventuallyPeriodicWord) -> EventuallyPeriodicWord {
        let m = &self.0;
        let mut s = 0;
        let run = |s: &mut usize, letters: &[Letter]| -> Vec<Letter> {
            let mut out: Vec<Letter> = letters
                .iter()
                .rev()
                .map(|&x| {
                    let y = m.perm(*s)[x as usize];
                    *s = m.next(*s, x);
                    y
                })
                .collect();
            out.reverse();
            out
        };
        let head_out = run(&mut s, w.head());
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut blocks = Vec::new();
        let start = loop {
            if let Some(&i) = seen.get(&s) {
                break i;
            }
            seen.insert(s, blocks.len());
            blocks.push(run(&mut s, w.tail()));
        };
        let tail: Vec<Letter> = blocks[start..].iter().rev().flatten().copied().collect();
        let mut head: Vec<Letter> = blocks[..start].iter().rev().flatten().copied().collect();
        head.extend(head_out);
        normalize(tail, head).expect("tail is nonempty")
    }

    /// `self ∘ other`: `other` is applied first.
    pub fn multiply(&self, other: &Element) -> Result<Element> {
        self.multiply_bounded(other, DEFAULT_CLOSURE_BOUND)
    }

    pub fn multiply_bounded(&self, other: &Element, bound: usize) -> Result<Element> {
        if self.degree() != other.degree() {
            return Err(Error::AlphabetMismatch(self.degree(), other.degree()));
        }
        if self.is_identity() {
            return Ok(other.clone());
        }
        if other.is_identity() {
            return Ok(self.clone());
        }
        let (g, h) = (&*self.0, &*other.0);
        let k = g.degree;
        let mut ids: HashMap<(usize, usize), u32> = HashMap::from([((0, 0), 0)]);
        let mut pairs = vec![(0usize, 0usize)];
        let mut next: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            for x in 0..k {
                let pair = (g.next(p, h.perm(q)[x]), h.next(q, x as Letter));
                let id = match ids.get(&pair) {
                    Some(&t) => t,
                    None => {
                        if pairs.len() >= bound {
                            return Err(Error::ClosureBound(bound));
                        }
                        let t = pairs.len() as u32;
                        ids.insert(pair, t);
                        pairs.push(pair);
                        t
                    }
                };
                next.push(id);
            }
            i += 1;
        }
        let perms = pairs
            .iter()
            .flat_map(|&(p, q)| (0..k).map(move |x| g.perm(p)[h.perm(q)[x] as usize]))
            .collect();
        let raw = Raw {
            degree: k,
            perms,
            next,
        };
        Ok(raw.canonical(&[0]).pop().expect("one root"))
    }

    pub fn inverse(&self) -> Element {
        let m = &self.0;
        let k = m.degree;
        let mut raw = Raw::new(k);
        for s in 0..m.len() {
            raw.add_state(&invert_perm(m.perm(s)));
        }
        for s in 0..m.len() {
            let p = m.perm(s);
            for (x, &y) in p.iter().enumerate().take(k) {
                raw.set_next(s as u32, y as usize, m.next(s, x as Letter) as u32);
            }
        }
        raw.canonical(&[0]).pop().expect("one root")
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, e: i64) -> Result<Element> {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Element::identity(self.degree());
        for _ in 0..e.unsigned_abs() {
            acc = acc.multiply(&base)?;
        }
        Ok(acc)
    }

    /// All distinct restrictions `g|_w`, starting with `g` itself.
    pub fn state_closure(&self) -> Vec<Element> {
        let raw = Raw::from_machine(&self.0);
        let roots: Vec<u32> = (0..self.num_states() as u32).collect();
        raw.canonical(&roots)
    }

    /// Indices of states lying on a directed cycle or reachable from one.
    fn eventual_indices(&self) -> Vec<usize> {
        let m = &self.0;
        let n = m.len();
        let mut indeg = vec![0usize; n];
        for &t in m.next.iter() {
            indeg[t as usize] += 1;
        }
        let mut alive = vec![true; n];
        let mut stack: Vec<usize> = (0..n).filter(|&s| indeg[s] == 0).collect();
        while let Some(s) = stack.pop() {
            alive[s] = false;
            for x in 0..m.degree {
                let t = m.next(s, x as Letter);
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    stack.push(t);
                }
            }
        }
        (0..n).filter(|&s| alive[s]).collect()
    }

    /// Restrictions `g|_w` that occur for arbitrarily long `w`.
    pub fn eventual_states(&self) -> Vec<Element> {
        let idx: Vec<u32> = self.eventual_indices().into_iter().map(|s| s as u32).collect();
        Raw::from_machine(&self.0).canonical(&idx)
    }

    /// Transition table of the state closure: `(perm, next)` per state, state 0 first.
    pub fn transitions(&self) -> Vec<(Vec<Letter>, Vec<usize>)> {
        let m = &self.0;
        (0..m.len())
            .map(|s| {
                (
                    m.perm(s).to_vec(),
                    (0..m.degree).map(|x| m.next(s, x as Letter)).collect(),
                )
            })
            .collect()
    }
}

/// Equality of the actions on the whole tree.
pub fn decide_equal(g: &Element, h: &Element) -> bool {
    g == h
}

/// Coinductive bisimulation check that walks both automata in lockstep.
/// Independent of the interner; `decide_equal` must always agree with it.
pub fn bisimilar(g: &Element, h: &Element) -> bool {
    if g.degree() != h.degree() {
        return false;
    }
    let (a, b) = (&*g.0, &*h.0);
    let mut seen = HashSet::from([(0usize, 0usize)]);
    let mut stack = vec![(0usize, 0usize)];
    while let Some((p, q)) = stack.pop() {
        if a.perm(p) != b.perm(q) {
            return false;
        }
        for x in 0..a.degree as Letter {
            let pair = (a.next(p, x), b.next(q, x));
            if seen.insert(pair) {
                stack.push(pair);
            }
        }
    }
    true
}

/// One token of a restriction word: a generator or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub generator: String,
    pub inverse: bool,
}

impl Token {
    pub fn new(generator: impl Into<String>, inverse: bool) -> Self {
        Token {
            generator: generator.into(),
            inverse,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.generator)
        } else {
            f.write_str(&self.generator)
        }
    }
}

impl FromStr for Token {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, inverse) = match s.strip_suffix("^-1") {
            Some(n) => (n, true),
            None => (s, false),
        };
        if !valid_name(name) {
            return Err(Error::InvalidGroup(format!("bad token {s:?}")));
        }
        Ok(Token::new(name, inverse))
    }
}

impl Serialize for Token {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != "1"
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Wreath recursion of one generator: `perm (rest[0], ..., rest[k-1])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    pub perm: Vec<Letter>,
    pub rest: Vec<Vec<Token>>,
}

/// A self-similar group given by wreath recursions of its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub alphabet: Alphabet,
    pub generators: Vec<GeneratorSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    alphabet_size: usize,
    generators: BTreeMap<String, GeneratorBody>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorBody {
    perm: Vec<Letter>,
    rest: Vec<Vec<Token>>,
}

type Word = Vec<(u32, bool)>;

fn push_reduced(w: &mut Word, t: (u32, bool)) {
    if w.last() == Some(&(t.0, !t.1)) {
        w.pop();
    } else {
        w.push(t);
    }
}

impl GroupSpec {
    pub fn from_json(text: &str) -> Result<GroupSpec> {
        let file: GroupFile = serde_json::from_str(text)?;
        let alphabet = Alphabet::new(file.alphabet_size)?;
        let generators = file
            .generators
            .into_iter()
            .map(|(name, b)| GeneratorSpec {
                name,
                perm: b.perm,
                rest: b.rest,
            })
            .collect();
        let spec = GroupSpec {
            alphabet,
            generators,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let file = GroupFile {
            alphabet_size: self.alphabet.size(),
            generators: self
                .generators
                .iter()
                .map(|g| {
                    (
                        g.name.clone(),
                        GeneratorBody {
                            perm: g.perm.clone(),
                            rest: g.rest.clone(),
                        },
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable") + "\n"
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.alphabet.size();
        if k < 2 {
            return Err(Error::InvalidGroup("alphabet must have at least 2 letters".into()));
        }
        let names: HashSet<&str> = self.generators.iter().map(|g| g.name.as_str()).collect();
        if names.len() != self.generators.len() {
            return Err(Error::InvalidGroup("duplicate generator name".into()));
        }
        for g in &self.generators {
            if !valid_name(&g.name) {
                return Err(Error::InvalidGroup(format!("bad generator name {:?}", g.name)));
            }
            if g.perm.len() != k || !is_permutation(&g.perm) {
                return Err(Error::InvalidGroup(format!(
                    "{}: perm {:?} is not a permutation of {k} letters",
                    g.name, g.perm
                )));
            }
            if g.rest.len() != k {
                return Err(Error::InvalidGroup(format!(
                    "{}: expected {k} restriction words, got {}",
                    g.name,
                    g.rest.len()
                )));
            }
            for t in g.rest.iter().flatten() {
                if !names.contains(t.generator.as_str()) {
                    return Err(Error::InvalidGroup(format!(
                        "{}: unknown generator {:?}",
                        g.name, t.generator
                    )));
                }
            }
        }
        Ok(())
    }

    /// Builds the generator elements. Fails once more than `bound` distinct
    /// reduced generator words are needed to close the recursion.
    pub fn build(&self, bound: usize) -> Result<Group> {
        self.validate()?;
        let k = self.alphabet.size();
        let index: HashMap<&str, u32> = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.as_str(), i as u32))
            .collect();
        let perms: Vec<[Vec<Letter>; 2]> = self
            .generators
            .iter()
            .map(|g| [g.perm.clone(), invert_perm(&g.perm)])
            .collect();
        // Restriction word of each signed generator at each letter.
        let rests: Vec<[Vec<Word>; 2]> = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let fwd: Vec<Word> = g
                    .rest
                    .iter()
                    .map(|r| {
                        let mut w = Word::new();
                        for t in r {
                            push_reduced(&mut w, (index[t.generator.as_str()], t.inverse));
                        }
                        w
                    })
                    .collect();
                let bwd: Vec<Word> = (0..k)
                    .map(|y| {
                        let x = perms[i][1][y] as usize;
                        let mut w = Word::new();
                        for &(j, inv) in fwd[x].iter().rev() {
                            push_reduced(&mut w, (j, !inv));
                        }
                        w
                    })
                    .collect();
                [fwd, bwd]
            })
            .collect();

        let mut b = WordAutomaton {
            raw: Raw::new(k),
            ids: HashMap::new(),
            queue: VecDeque::new(),
            perms: &perms,
            bound,
        };
        let roots = (0..self.generators.len() as u32)
            .map(|i| b.state(vec![(i, false)]))
            .collect::<Result<Vec<u32>>>()?;
        while let Some(w) = b.queue.pop_front() {
            let from = b.ids[&w];
            for x in 0..k {
                // (t_1...t_m)|_x = t_1|_{..} ... t_m|_x, computed from the right.
                let mut cur = x;
                let mut parts: Vec<&Word> = Vec::with_capacity(w.len());
                for &(g, inv) in w.iter().rev() {
                    parts.push(&rests[g as usize][inv as usize][cur]);
                    cur = perms[g as usize][inv as usize][cur] as usize;
                }
                let mut r = Word::new();
                for &t in parts.iter().rev().flat_map(|p| p.iter()) {
                    push_reduced(&mut r, t);
                }
                let to = b.state(r)?;
                b.raw.set_next(from, x, to);
            }
        }
        Ok(Group {
            alphabet: self.alphabet,
            names: self.generators.iter().map(|g| g.name.clone()).collect(),
            generators: b.raw.canonical(&roots),
        })
    }
}

struct WordAutomaton<'a> {
    raw: Raw,
    ids: HashMap<Word, u32>,
    queue: VecDeque<Word>,
    perms: &'a [[Vec<Letter>; 2]],
    bound: usize,
}

impl WordAutomaton<'_> {
    fn state(&mut self, w: Word) -> Result<u32> {
        if let Some(&id) = self.ids.get(&w) {
            return Ok(id);
        }
        if self.raw.len() >= self.bound {
            return Err(Error::ClosureBound(self.bound));
        }
        let k = self.raw.degree;
        let perm: Vec<Letter> = (0..k)
            .map(|x| {
                w.iter().rev().fold(x as Letter, |y, &(g, inv)| {
                    self.perms[g as usize][inv as usize][y as usize]
                })
            })
            .collect();
        let id = self.raw.add_state(&perm);
        self.ids.insert(w.clone(), id);
        self.queue.push_back(w);
        Ok(id)
    }
}

/// Named generators of a self-similar group.
#[derive(Clone, Debug)]
pub struct Group {
    pub alphabet: Alphabet,
    pub names: Vec<String>,
    pub generators: Vec<Element>,
}

impl Group {
    pub fn get(&self, name: &str) -> Option<&Element> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.generators[i])
    }

    /// Generators together with their inverses, deduplicated, in sorted order.
    pub fn symmetric_generators(&self) -> Vec<Element> {
        let mut v: Vec<Element> = self
            .generators
            .iter()
            .flat_map(|g| [g.clone(), g.inverse()])
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Names for the identity, the generators and their inverses.
    pub fn naming(&self) -> Naming {
        let mut n = Naming::default();
        n.insert(Element::identity(self.alphabet.size()), "1");
        for (name, g) in self.names.iter().zip(&self.generators) {
            n.insert(g.clone(), name.clone());
        }
        for (name, g) in self.names.iter().zip(&self.generators) {
            n.insert(g.inverse(), format!("{name}^-1"));
        }
        n
    }
}

/// Display names for elements. The first name given to an element wins.
#[derive(Clone, Debug, Default)]
pub struct Naming {
    names: HashMap<Element, String>,
}

impl Naming {
    pub fn insert(&mut self, e: Element, name: impl Into<String>) {
        self.names.entry(e).or_insert_with(|| name.into());
    }

    pub fn get(&self, e: &Element) -> Option<&str> {
        self.names.get(e).map(String::as_str)
    }

    pub fn name(&self, e: &Element) -> String {
        self.get(e).map_or_else(|| "?".to_string(), str::to_string)
    }

    /// Wreath recursion such as `(01)(1, a)`.
    pub fn wreath(&self, e: &Element) -> String {
        let rest: Vec<String> = (0..e.degree())
            .map(|x| self.name(&e.restrict_letter(x as Letter)))
            .collect();
        format!("{}({})", cycle_notation(e.perm()), rest.join(", "))
    }
}

/// Disjoint cycle notation, each cycle starting at its least letter; empty for the identity.
pub fn cycle_notation(perm: &[Letter]) -> String {
    let digits = perm.len() <= 10;
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] as usize == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x.to_string());
            x = perm[x] as usize;
        }
        out.push('(');
        out.push_str(&cycle.join(if digits { "" } else { " " }));
        out.push(')');
    }
    out
}

/// Labeled restriction graph on a restriction-closed set of elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreDiagram {
    pub states: Vec<Element>,
    pub edges: Vec<MooreEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MooreEdge {
    pub from: usize,
    pub input: Letter,
    pub output: Letter,
    pub to: usize,
}

/// Moore diagram of a restriction-closed set; states are sorted, edges follow
/// state order and then input letter.
pub fn export_moore(states: &[Element]) -> Result<MooreDiagram> {
    let mut states = states.to_vec();
    states.sort();
    states.dedup();
    if let Some(g) = states.iter().find(|g| g.degree() != states[0].degree()) {
        return Err(Error::AlphabetMismatch(states[0].degree(), g.degree()));
    }
    let index: HashMap<&Element, usize> = states.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut edges = Vec::new();
    for (i, g) in states.iter().enumerate() {
        for x in 0..g.degree() as Letter {
            let r = g.restrict_letter(x);
            let to = *index.get(&r).ok_or_else(|| {
                Error::NotRestrictionClosed(format!("state {i} has a restriction at letter {x} outside the set"))
            })?;
            edges.push(MooreEdge {
                from: i,
                input: x,
                output: g.image(x),
                to,
            });
        }
    }
    Ok(MooreDiagram { states, edges })
}

impl MooreDiagram {
    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.states.iter().position(|s| s == g)
    }

    /// DOT rendering with one edge per label.
    pub fn to_dot(&self, name: &str, naming: &Naming) -> String {
        let mut out = format!("digraph {name} {{\n  rankdir=LR;\n");
        let label = |i: usize| naming.get(&self.states[i]).map_or_else(|| format!("s{i}"), str::to_string);
        for i in 0..self.states.len() {
            out.push_str(&format!("  \"{}\";\n", label(i)));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"({},{})\"];\n",
                label(e.from),
                label(e.to),
                e.input,
                e.output
            ));
        }
        out.push_str("}\n");
        out
    }
}
