//! Gluing classes, critical and post-critical sets, the induced shift on
//! classes, and finite-level tile adjacency graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::{check_condition2, check_pcf, nontrivial_edges, Sccs};
use crate::automata::MooreEdge;
use crate::error::{Error, Result};
use crate::nucleus::Nucleus;
use crate::par::Settings;
use crate::words::{normalize, EventuallyPeriodicWord, FiniteWord, Letter};

/// Limit on `level * |X|^level` for [`tile_graph`].
pub const TILE_BUDGET: usize = 2_000_000;

/// The equivalence class `...zzz S_n ... S_1`: every choice of one letter
/// from each set gives an equivalent word. `sets[0]` is `S_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GluingClass {
    pub tail: Vec<Letter>,
    pub sets: Vec<Vec<Letter>>,
}

impl GluingClass {
    /// Sorts and deduplicates each set.
    pub fn new(tail: Vec<Letter>, sets: Vec<Vec<Letter>>) -> Self {
        let sets = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        GluingClass { tail, sets }
    }

    /// All words of the class, sorted.
    pub fn members(&self) -> Vec<EventuallyPeriodicWord> {
        let mut heads: Vec<Vec<Letter>> = vec![Vec::new()];
        for s in &self.sets {
            heads = heads
                .into_iter()
                .flat_map(|h| {
                    s.iter().map(move |&x| {
                        let mut h = h.clone();
                        h.push(x);
                        h
                    })
                })
                .collect();
        }
        let mut out: Vec<EventuallyPeriodicWord> = heads
            .into_iter()
            .filter_map(|h| normalize(self.tail.clone(), h).ok())
            .collect();
        out.sort();
        out
    }

    pub fn size(&self) -> usize {
        self.sets.iter().map(Vec::len).product()
    }
}

impl fmt::Display for GluingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.tail.iter().chain(self.sets.iter().flatten()).all(|&x| x < 10);
        let join = |w: &[Letter]| -> String {
            if digits {
                w.iter().map(|x| x.to_string()).collect()
            } else {
                w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            }
        };
        write!(f, "{}*", join(&self.tail))?;
        for s in &self.sets {
            write!(f, "{{{}}}", join(s))?;
        }
        Ok(())
    }
}

/// Result of shifting a class: either one word or a smaller class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shifted {
    Word(EventuallyPeriodicWord),
    Class(GluingClass),
}

/// Drops `S_1`.
pub fn shift_class(c: &GluingClass) -> Shifted {
    let sets = &c.sets[..c.sets.len().saturating_sub(1)];
    if sets.iter().all(|s| s.len() == 1) {
        let head: Vec<Letter> = sets.iter().map(|s| s[0]).collect();
        Shifted::Word(normalize(c.tail.clone(), head).expect("class tail is nonempty"))
    } else {
        Shifted::Class(GluingClass::new(c.tail.clone(), sets.to_vec()))
    }
}

/// Members of all classes, and all their proper shifts.
pub fn critical_sets(
    classes: &[GluingClass],
) -> (BTreeSet<EventuallyPeriodicWord>, BTreeSet<EventuallyPeriodicWord>) {
    let critical: BTreeSet<EventuallyPeriodicWord> =
        classes.iter().flat_map(GluingClass::members).collect();
    let mut post = BTreeSet::new();
    for w in &critical {
        let mut cur = w.shift();
        while post.insert(cur.clone()) {
            cur = cur.shift();
        }
    }
    (critical, post)
}

/// The simple cycles of the non-trivial part, each as its list of edges
/// starting at its least state.
fn simple_cycles(n: &Nucleus, edges: &[MooreEdge]) -> Vec<Vec<MooreEdge>> {
    let mut adj = vec![Vec::new(); n.len()];
    for e in edges {
        adj[e.from].push(e.to);
    }
    let sccs = Sccs::new(&adj);
    let mut done = vec![false; sccs.count];
    let mut cycles = Vec::new();
    for start in 0..n.len() {
        let c = sccs.comp[start];
        if done[c] || !sccs.cyclic(start) || start == n.identity() {
            continue;
        }
        done[c] = true;
        let mut cycle = Vec::new();
        let mut s = start;
        loop {
            let e = *edges
                .iter()
                .find(|e| e.from == s && sccs.comp[e.to] == c)
                .expect("cyclic state has an inner edge");
            cycle.push(e);
            s = e.to;
            if s == start {
                break;
            }
        }
        cycles.push(cycle);
    }
    cycles
}

/// The gluing classes of the limit space, in canonical order. Requires
/// Condition 2 and post-critical finiteness.
pub fn gluing_classes(n: &Nucleus) -> Result<Vec<GluingClass>> {
    if !check_condition2(n)? {
        return Err(Error::Precondition("Condition 2 does not hold".into()));
    }
    if !check_pcf(n) {
        return Err(Error::Precondition("the action is not post-critically finite".into()));
    }
    let edges = nontrivial_edges(n);
    let mut pairs: Vec<(EventuallyPeriodicWord, EventuallyPeriodicWord)> = Vec::new();
    for cycle in simple_cycles(n, &edges) {
        if let Some(e) = cycle.iter().find(|e| e.input != e.output) {
            return Err(Error::Contradiction(format!(
                "cycle edge ({},{}) changes its letter, contradicting Condition 2",
                e.input, e.output
            )));
        }
        let p = cycle.len();
        for i in 0..p {
            // Paths that wind around the cycle and leave it at cycle[i].from.
            let tail: Vec<Letter> = (0..p).map(|j| cycle[(i + j) % p].input).collect();
            let start = cycle[i].from;
            let mut stack: Vec<(usize, Vec<Letter>, Vec<Letter>)> = vec![(start, vec![], vec![])];
            while let Some((s, ins, outs)) = stack.pop() {
                for x in n.alphabet().letters() {
                    let y = n.image(s, x);
                    if x != y {
                        let (mut u, mut v) = (ins.clone(), outs.clone());
                        u.push(x);
                        v.push(y);
                        pairs.push((normalize(tail.clone(), u)?, normalize(tail.clone(), v)?));
                    }
                    let t = n.next(s, x);
                    let stays = s == start && x == cycle[i].input;
                    if t != n.identity() && !stays {
                        let (mut u, mut v) = (ins.clone(), outs.clone());
                        u.push(x);
                        v.push(y);
                        if u.len() > n.len() {
                            return Err(Error::Contradiction("unbounded exit path".into()));
                        }
                        stack.push((t, u, v));
                    }
                }
            }
        }
    }
    classes_from_pairs(&pairs)
}

/// Merges equivalent pairs and splits the result into product classes.
pub(crate) fn classes_from_pairs(
    pairs: &[(EventuallyPeriodicWord, EventuallyPeriodicWord)],
) -> Result<Vec<GluingClass>> {
    let mut ids: BTreeMap<&EventuallyPeriodicWord, usize> = BTreeMap::new();
    for (u, v) in pairs {
        for w in [u, v] {
            let next = ids.len();
            ids.entry(w).or_insert(next);
        }
    }
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = x;
        while parent[x] != r {
            let next = parent[x];
            parent[x] = r;
            x = next;
        }
        r
    }
    for (u, v) in pairs {
        let (a, b) = (find(&mut parent, ids[u]), find(&mut parent, ids[v]));
        parent[a.max(b)] = a.min(b);
    }
    let mut groups: HashMap<usize, Vec<&EventuallyPeriodicWord>> = HashMap::new();
    for (&w, &i) in &ids {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(w);
    }
    let mut classes = groups
        .into_values()
        .map(|members| product_class(&members))
        .collect::<Result<Vec<_>>>()?;
    classes.sort();
    Ok(classes)
}

/// Writes a set of words as `...zzz S_n ... S_1`, failing if it is not a product.
fn product_class(members: &[&EventuallyPeriodicWord]) -> Result<GluingClass> {
    let first = members[0];
    let len = first.head().len();
    if members.iter().any(|w| w.tail() != first.tail() || w.head().len() != len) {
        let list: Vec<String> = members.iter().map(|w| w.to_string()).collect();
        return Err(Error::Contradiction(format!(
            "class {{{}}} mixes tails or head lengths",
            list.join(", ")
        )));
    }
    let sets: Vec<Vec<Letter>> = (0..len)
        .map(|j| {
            let s: BTreeSet<Letter> = members.iter().map(|w| w.head()[j]).collect();
            s.into_iter().collect()
        })
        .collect();
    let class = GluingClass::new(first.tail().to_vec(), sets);
    if class.size() != members.len() {
        return Err(Error::Contradiction(format!("class {class} is not a product of letter sets")));
    }
    Ok(class)
}

/// Level-`n` tiles as vertices; two tiles are adjacent when a non-trivial
/// nucleus element maps one address to the other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TileGraph {
    pub level: usize,
    pub vertices: Vec<FiniteWord>,
    pub edges: Vec<(usize, usize)>,
}

pub fn tile_graph(n: &Nucleus, level: usize, settings: &Settings) -> Result<TileGraph> {
    let k = n.alphabet().size();
    let count = u32::try_from(level)
        .ok()
        .and_then(|l| k.checked_pow(l))
        .filter(|c| c.saturating_mul(level.max(1)) <= TILE_BUDGET)
        .ok_or_else(|| Error::Budget(format!("level {level} over {k} letters exceeds the tile budget")))?;
    let vertices = n.alphabet().words(level);
    debug_assert_eq!(vertices.len(), count);
    let rank = |w: &[Letter]| w.iter().fold(0usize, |r, &x| r * k + x as usize);
    let movers: Vec<usize> = (0..n.len()).filter(|&g| g != n.identity()).collect();
    let per_vertex = settings.exec.map(&vertices, |u| {
        let mut out = Vec::new();
        let i = rank(u.letters());
        for &g in &movers {
            let mut s = g;
            let image: Vec<Letter> = u
                .letters()
                .iter()
                .map(|&x| {
                    let y = n.image(s, x);
                    s = n.next(s, x);
                    y
                })
                .collect();
            let j = rank(&image);
            if i < j {
                out.push((i, j));
            }
        }
        out
    });
    let edges: BTreeSet<(usize, usize)> = per_vertex.into_iter().flatten().collect();
    // Symmetric because the nucleus is closed under inverses; pairs with i > j
    // are found from the other endpoint.
    Ok(TileGraph {
        level,
        vertices,
        edges: edges.into_iter().collect(),
    })
}

impl TileGraph {
    pub fn to_dot(&self) -> String {
        let mut out = format!("graph tiles_{} {{\n", self.level);
        for v in &self.vertices {
            out.push_str(&format!("  \"{v}\";\n"));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  \"{}\" -- \"{}\";\n", self.vertices[a], self.vertices[b]));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::json!({
            "level": self.level,
            "vertices": self.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "edges": self.edges,
        });
        serde_json::to_string_pretty(&value).expect("serializable") + "\n"
    }
}
