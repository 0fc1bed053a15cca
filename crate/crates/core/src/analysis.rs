//! Decision procedures on a nucleus: Condition 2, post-critical finiteness,
//! boundedness, strict post-critical finiteness and asymptotic equivalence.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::automata::{Element, MooreEdge};
use crate::error::{Error, Result};
use crate::nucleus::Nucleus;
use crate::words::{normalize, EventuallyPeriodicWord, Letter};

/// Limit on the number of label transformations explored by [`check_condition2`].
pub const MONOID_BOUND: usize = 200_000;

const NONE: u32 = u32::MAX;

/// Non-trivial states that are the end of some left-infinite path of
/// non-trivial states, with the edges between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardCore {
    pub states: Vec<usize>,
    pub edges: Vec<MooreEdge>,
}

/// Edges of the Moore diagram between non-trivial states.
pub fn nontrivial_edges(n: &Nucleus) -> Vec<MooreEdge> {
    let id = n.identity();
    let mut edges = Vec::new();
    for i in (0..n.len()).filter(|&i| i != id) {
        for x in n.alphabet().letters() {
            let to = n.next(i, x);
            if to != id {
                edges.push(MooreEdge {
                    from: i,
                    input: x,
                    output: n.image(i, x),
                    to,
                });
            }
        }
    }
    edges
}

pub fn backward_core(n: &Nucleus) -> BackwardCore {
    let edges = nontrivial_edges(n);
    let adj = adjacency(n.len(), &edges);
    let sccs = Sccs::new(&adj);
    let mut alive = vec![false; n.len()];
    let mut stack: Vec<usize> = (0..n.len()).filter(|&s| sccs.cyclic(s)).collect();
    for &s in &stack {
        alive[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &t in &adj[s] {
            if !alive[t] {
                alive[t] = true;
                stack.push(t);
            }
        }
    }
    BackwardCore {
        states: (0..n.len()).filter(|&s| alive[s]).collect(),
        edges: edges.into_iter().filter(|e| alive[e.from]).collect(),
    }
}

fn adjacency(n: usize, edges: &[MooreEdge]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.from].push(e.to);
    }
    adj
}

/// Strongly connected components of a multigraph given by adjacency lists.
pub(crate) struct Sccs {
    pub comp: Vec<usize>,
    pub count: usize,
    self_loop: Vec<bool>,
    size: Vec<usize>,
}

impl Sccs {
    pub fn new(adj: &[Vec<usize>]) -> Sccs {
        let n = adj.len();
        // Iterative Tarjan.
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut next_index = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut i)) = call.last_mut() {
                if *i < adj[v].len() {
                    let w = adj[v][*i];
                    *i += 1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(u, _)) = call.last() {
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("stack holds the component");
                            on_stack[w] = false;
                            comp[w] = count;
                            if w == v {
                                break;
                            }
                        }
                        count += 1;
                    }
                }
            }
        }
        let mut size = vec![0; count];
        for &c in &comp {
            size[c] += 1;
        }
        let self_loop = (0..n).map(|v| adj[v].contains(&v)).collect();
        Sccs {
            comp,
            count,
            self_loop,
            size,
        }
    }

    /// True when `v` lies on a directed cycle.
    pub fn cyclic(&self, v: usize) -> bool {
        self.size[self.comp[v]] > 1 || self.self_loop[v]
    }
}

/// Cycles among the given vertices are disjoint simple cycles and no
/// directed path joins two of them.
fn cycles_simple_and_isolated(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let sccs = Sccs::new(adj);
    let mut indeg = vec![0usize; n];
    for (v, out) in adj.iter().enumerate() {
        if !sccs.cyclic(v) {
            continue;
        }
        let inner = out.iter().filter(|&&w| sccs.comp[w] == sccs.comp[v]).count();
        if inner != 1 {
            return false;
        }
        for &w in &adj[v] {
            if sccs.comp[w] == sccs.comp[v] {
                indeg[w] += 1;
            }
        }
    }
    if (0..n).any(|v| sccs.cyclic(v) && indeg[v] != 1) {
        return false;
    }
    for c in 0..sccs.count {
        let members: Vec<usize> = (0..n).filter(|&v| sccs.comp[v] == c).collect();
        if !sccs.cyclic(members[0]) {
            continue;
        }
        let mut seen = vec![false; n];
        let mut stack = members.clone();
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                if sccs.comp[w] != c && sccs.cyclic(w) {
                    return false;
                }
                stack.push(w);
            }
        }
    }
    true
}

/// Finitely many left-infinite paths of the Moore diagram end at a non-trivial state.
pub fn check_pcf(n: &Nucleus) -> bool {
    cycles_simple_and_isolated(&adjacency(n.len(), &nontrivial_edges(n)))
}

/// Non-trivial cycles in the state closure of `g` are disjoint and not connected.
pub fn is_bounded_element(g: &Element) -> bool {
    let table = g.transitions();
    let trivial: Vec<bool> = table
        .iter()
        .enumerate()
        .map(|(s, (perm, next))| {
            perm.iter().enumerate().all(|(x, &y)| x == y as usize) && next.iter().all(|&t| t == s)
        })
        .collect();
    let adj: Vec<Vec<usize>> = table
        .iter()
        .enumerate()
        .map(|(s, (_, next))| {
            if trivial[s] {
                Vec::new()
            } else {
                next.iter().copied().filter(|&t| !trivial[t]).collect()
            }
        })
        .collect();
    cycles_simple_and_isolated(&adj)
}

/// Every element of the nucleus moves at most one letter of any word.
fn one_letter(n: &Nucleus) -> bool {
    // Greatest fixpoint: drop states that violate the local rule until stable.
    let id = n.identity();
    let mut good = vec![true; n.len()];
    loop {
        let mut changed = false;
        for i in 0..n.len() {
            if !good[i] {
                continue;
            }
            let ok = n.alphabet().letters().all(|x| {
                let r = n.next(i, x);
                if n.image(i, x) != x {
                    r == id
                } else {
                    good[r]
                }
            });
            if !ok {
                good[i] = false;
                changed = true;
            }
        }
        if !changed {
            return good.iter().all(|&b| b);
        }
    }
}

pub fn check_strictly_pcf(generators: &[Element], n: &Nucleus) -> bool {
    generators.iter().all(is_bounded_element) && one_letter(n)
}

/// Condition 2: for every left-infinite path ending at a non-trivial state
/// and every finite word `w`, some path with the same labels ends at an
/// element fixing `w`.
///
/// Each label `(x, y)` acts on nucleus states as the partial map
/// `g -> g|_x` defined where `g(x) = y`. The set of ends of all paths with
/// label sequence `...uuu v` is the image under `v` of the periodic points
/// of `u`; these sets cover every label sequence, and each is tested for a
/// fixed element along every word.
pub fn check_condition2(n: &Nucleus) -> Result<bool> {
    let size = n.len();
    let maps = label_maps(n);

    // Transformation monoid generated by the label maps (nonempty words).
    let mut monoid: HashSet<Vec<u32>> = HashSet::new();
    let mut queue: VecDeque<Vec<u32>> = VecDeque::new();
    for f in &maps {
        if monoid.insert(f.clone()) {
            queue.push_back(f.clone());
        }
    }
    while let Some(f) = queue.pop_front() {
        for a in &maps {
            let g: Vec<u32> = f
                .iter()
                .map(|&s| if s == NONE { NONE } else { a[s as usize] })
                .collect();
            if !monoid.contains(&g) {
                if monoid.len() >= MONOID_BOUND {
                    return Err(Error::Budget(format!(
                        "label monoid exceeds {MONOID_BOUND} transformations"
                    )));
                }
                monoid.insert(g.clone());
                queue.push_back(g);
            }
        }
    }

    // End sets: images of periodic-point sets under label words.
    let mut ends: HashSet<Vec<u32>> = HashSet::new();
    let mut queue: VecDeque<Vec<u32>> = VecDeque::new();
    for f in &monoid {
        let p = periodic_points(f, size);
        if ends.insert(p.clone()) {
            queue.push_back(p);
        }
    }
    while let Some(s) = queue.pop_front() {
        for a in &maps {
            let t = apply_set(a, &s);
            if !ends.contains(&t) {
                ends.insert(t.clone());
                queue.push_back(t);
            }
        }
    }

    let id = n.identity() as u32;
    let mut memo: HashMap<Vec<u32>, bool> = HashMap::new();
    let mut ends: Vec<Vec<u32>> = ends.into_iter().collect();
    ends.sort();
    for s in ends {
        if s.iter().any(|&g| g != id) && !fixes_every_word(n, s, &mut memo) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One partial map per realized label, in label order.
fn label_maps(n: &Nucleus) -> Vec<Vec<u32>> {
    let labels: BTreeSet<(Letter, Letter)> = (0..n.len())
        .flat_map(|i| n.alphabet().letters().map(move |x| (x, n.image(i, x))))
        .collect();
    labels
        .into_iter()
        .map(|(x, y)| {
            (0..n.len())
                .map(|i| if n.image(i, x) == y { n.next(i, x) as u32 } else { NONE })
                .collect()
        })
        .collect()
}

fn apply_set(f: &[u32], s: &[u32]) -> Vec<u32> {
    let mut t: Vec<u32> = s.iter().map(|&g| f[g as usize]).filter(|&h| h != NONE).collect();
    t.sort_unstable();
    t.dedup();
    t
}

fn periodic_points(f: &[u32], size: usize) -> Vec<u32> {
    let mut s: Vec<u32> = (0..size as u32).collect();
    loop {
        let t = apply_set(f, &s);
        if t == s {
            return s;
        }
        s = t;
    }
}

/// For every finite word some element of `s` fixes it.
fn fixes_every_word(n: &Nucleus, s: Vec<u32>, memo: &mut HashMap<Vec<u32>, bool>) -> bool {
    // Failure means the empty set is reachable through the fixing restrictions.
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut stack = vec![s.clone()];
    seen.insert(s.clone());
    let mut result = true;
    while let Some(t) = stack.pop() {
        if let Some(&known) = memo.get(&t) {
            if !known {
                result = false;
                break;
            }
            continue;
        }
        if t.is_empty() {
            result = false;
            break;
        }
        for x in n.alphabet().letters() {
            let mut u: Vec<u32> = t
                .iter()
                .filter(|&&g| n.image(g as usize, x) == x)
                .map(|&g| n.next(g as usize, x) as u32)
                .collect();
            u.sort_unstable();
            u.dedup();
            if seen.insert(u.clone()) {
                stack.push(u);
            }
        }
    }
    if result {
        // Everything reachable from a good set is good.
        for t in seen {
            memo.insert(t, true);
        }
    } else {
        memo.insert(s, false);
    }
    result
}

/// Positions of a pair of eventually periodic words folded onto a finite cycle:
/// positions `1..=pre + period`, after which position `pre + 1` follows.
struct Folding {
    pre: usize,
    len: usize,
}

impl Folding {
    fn new(words: &[&EventuallyPeriodicWord]) -> Folding {
        let pre = words.iter().map(|w| w.head().len()).max().unwrap_or(0);
        let period = words.iter().fold(1, |p, w| lcm(p, w.tail().len()));
        Folding {
            pre,
            len: pre + period,
        }
    }

    /// The position to the left of `p`.
    fn succ(&self, p: usize) -> usize {
        if p < self.len {
            p + 1
        } else {
            self.pre + 1
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Nodes `(state, position)` of a folded path graph that start an infinite
/// leftward path; `ok(state, position)` filters allowed nodes and
/// `letter(position)` gives the input letter.
fn alive_nodes(
    n: &Nucleus,
    fold: &Folding,
    letter: impl Fn(usize) -> Letter,
    ok: impl Fn(usize, usize) -> bool,
) -> Vec<bool> {
    let size = n.len();
    let node = |g: usize, p: usize| (p - 1) * size + g;
    let total = size * fold.len;
    // Reverse edges: node (g', succ(p)) feeds node (g'|_x, p).
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); total];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); total];
    let mut valid = vec![false; total];
    for p in 1..=fold.len {
        for g in 0..size {
            valid[node(g, p)] = ok(g, p);
        }
    }
    for p in 1..=fold.len {
        let q = fold.succ(p);
        let x = letter(q);
        for h in 0..size {
            if !valid[node(h, q)] {
                continue;
            }
            let g = n.next(h, x);
            if valid[node(g, p)] {
                succs[node(g, p)].push(node(h, q));
                preds[node(h, q)].push(node(g, p));
            }
        }
    }
    let mut outdeg: Vec<usize> = succs.iter().map(Vec::len).collect();
    let mut alive = valid.clone();
    let mut stack: Vec<usize> = (0..total).filter(|&v| alive[v] && outdeg[v] == 0).collect();
    for &v in &stack {
        alive[v] = false;
    }
    while let Some(v) = stack.pop() {
        for &u in &preds[v] {
            if alive[u] {
                outdeg[u] -= 1;
                if outdeg[u] == 0 {
                    alive[u] = false;
                    stack.push(u);
                }
            }
        }
    }
    alive
}

/// Asymptotic equivalence: some left-infinite path of the Moore diagram
/// carries the labels `(u_i, v_i)`.
pub fn are_equivalent(u: &EventuallyPeriodicWord, v: &EventuallyPeriodicWord, n: &Nucleus) -> bool {
    let fold = Folding::new(&[u, v]);
    let size = n.len();
    let alive = alive_nodes(n, &fold, |p| u.letter_at(p), |g, p| {
        n.image(g, u.letter_at(p)) == v.letter_at(p)
    });
    (0..size).any(|g| alive[g])
}

/// All words asymptotically equivalent to `w`, sorted.
pub fn equivalence_class(w: &EventuallyPeriodicWord, n: &Nucleus) -> Result<Vec<EventuallyPeriodicWord>> {
    let fold = Folding::new(&[w]);
    let size = n.len();
    let alive = alive_nodes(n, &fold, |p| w.letter_at(p), |_, _| true);
    let node = |g: usize, p: usize| (p - 1) * size + g;
    let succ = |g: usize, p: usize| -> Vec<(usize, usize)> {
        let q = fold.succ(p);
        let x = w.letter_at(q);
        (0..size)
            .filter(|&h| n.next(h, x) == g && alive[node(h, q)])
            .map(|h| (h, q))
            .collect()
    };

    let mut out: BTreeSet<EventuallyPeriodicWord> = BTreeSet::new();
    let limit = size.max(1);
    // Depth-first enumeration of lassos: a finite prefix followed by a cycle.
    let mut path: Vec<(usize, usize)> = Vec::new();
    let mut on_path: HashMap<(usize, usize), usize> = HashMap::new();
    let mut frames: Vec<(Vec<(usize, usize)>, usize)> = Vec::new();
    for g in (0..size).filter(|&g| alive[node(g, 1)]) {
        path.push((g, 1));
        on_path.insert((g, 1), 0);
        frames.push((succ(g, 1), 0));
        while let Some((options, i)) = frames.last_mut() {
            if *i == options.len() {
                frames.pop();
                let v = path.pop().expect("path matches frames");
                on_path.remove(&v);
                continue;
            }
            let next = options[*i];
            *i += 1;
            let (cur_g, cur_p) = *path.last().expect("nonempty path");
            if let Some(&j) = on_path.get(&next) {
                let cycle = &path[j..];
                if cycle.iter().any(|&(h, p)| succ(h, p).len() != 1) || succ(cur_g, cur_p).len() != 1 {
                    return Err(Error::Contradiction(format!(
                        "infinitely many paths carry {w}; the set is not a nucleus"
                    )));
                }
                let out_letter = |&(h, p): &(usize, usize)| n.image(h, w.letter_at(p));
                let mut head: Vec<Letter> = path[..j].iter().map(out_letter).collect();
                head.reverse();
                let mut tail: Vec<Letter> = cycle.iter().map(out_letter).collect();
                tail.reverse();
                out.insert(normalize(tail, head)?);
                if out.len() > limit {
                    return Err(Error::Contradiction(format!(
                        "more than {limit} words are equivalent to {w}"
                    )));
                }
                continue;
            }
            on_path.insert(next, path.len());
            path.push(next);
            frames.push((succ(next.0, next.1), 0));
        }
    }
    Ok(out.into_iter().collect())
}
