//! From gluing equations to a structure, from a structure to a contracting
//! group, and back.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::{check_condition2, check_pcf};
use crate::automata::{cycle_notation, GeneratorSpec, Group, GroupSpec, Token};
use crate::error::{Error, Result};
use crate::limitspace::{classes_from_pairs, gluing_classes, GluingClass};
use crate::par::Settings;
use crate::words::{Alphabet, EventuallyPeriodicWord, Letter};

/// Upper limit on derived pairs while normalizing equations.
const PAIR_BUDGET: usize = 1_000_000;

/// `lhs ~ rhs`, with differing rightmost letters once common suffixes are removed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueEquation {
    pub lhs: EventuallyPeriodicWord,
    pub rhs: EventuallyPeriodicWord,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquationsFile {
    alphabet_size: usize,
    equations: Vec<GlueEquation>,
}

/// Parses `{"alphabet_size": k, "equations": [...]}`.
pub fn equations_from_json(text: &str) -> Result<(Alphabet, Vec<GlueEquation>)> {
    let file: EquationsFile = serde_json::from_str(text)?;
    let alphabet = Alphabet::new(file.alphabet_size)?;
    for eq in &file.equations {
        eq.lhs.check(alphabet)?;
        eq.rhs.check(alphabet)?;
    }
    Ok((alphabet, file.equations))
}

pub fn equations_to_json(alphabet: Alphabet, equations: &[GlueEquation]) -> String {
    let file = EquationsFile {
        alphabet_size: alphabet.size(),
        equations: equations.to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("serializable") + "\n"
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureSpec {
    pub alphabet: Alphabet,
    pub classes: Vec<GluingClass>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    alphabet_size: usize,
    classes: Vec<GluingClass>,
}

impl StructureSpec {
    /// Sorts the classes into canonical order.
    pub fn new(alphabet: Alphabet, classes: Vec<GluingClass>) -> Self {
        let mut classes: Vec<GluingClass> = classes
            .into_iter()
            .map(|c| GluingClass::new(c.tail, c.sets))
            .collect();
        classes.sort();
        StructureSpec { alphabet, classes }
    }

    pub fn from_json(text: &str) -> Result<StructureSpec> {
        let file: StructureFile = serde_json::from_str(text)?;
        Ok(StructureSpec::new(Alphabet::new(file.alphabet_size)?, file.classes))
    }

    pub fn to_json(&self) -> String {
        let file = StructureFile {
            alphabet_size: self.alphabet.size(),
            classes: self.classes.clone(),
        };
        serde_json::to_string_pretty(&file).expect("serializable") + "\n"
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// Letters outside the alphabet, empty tail or empty sets.
    WellFormed,
    /// The tail is a proper power.
    PrimitiveTail,
    /// The leftmost tail letter lies in `S_n`.
    TailNotInHead,
    /// `|S_1| < 2`.
    Critical,
    ShiftClosure,
    DisjointOrEqual,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Property::WellFormed => "well-formed",
            Property::PrimitiveTail => "primitive-tail",
            Property::TailNotInHead => "tail-not-in-head",
            Property::Critical => "critical",
            Property::ShiftClosure => "shift-closure",
            Property::DisjointOrEqual => "disjoint-or-equal",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// Index into the canonical class list.
    pub class: usize,
    pub property: Property,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class {}: {}: {}", self.class, self.property, self.message)
    }
}

fn is_primitive(w: &[Letter]) -> bool {
    let k = w.len();
    (1..k).filter(|d| k.is_multiple_of(*d)).all(|d| (0..k).any(|i| w[i] != w[(i + d) % k]))
}

/// Every violated invariant, empty iff the spec is valid.
pub fn validate_spec(s: &StructureSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |class: usize, property: Property, message: String| {
        out.push(Diagnostic { class, property, message })
    };
    let listed: BTreeSet<&GluingClass> = s.classes.iter().collect();
    for (i, c) in s.classes.iter().enumerate() {
        let letters_ok = c.tail.iter().chain(c.sets.iter().flatten()).all(|&x| s.alphabet.contains(x));
        if c.tail.is_empty() || c.sets.is_empty() || c.sets.iter().any(Vec::is_empty) || !letters_ok {
            diag(i, Property::WellFormed, format!("{c} needs a nonempty tail, nonempty sets and letters below {}", s.alphabet.size()));
            continue;
        }
        if !is_primitive(&c.tail) {
            diag(i, Property::PrimitiveTail, format!("tail of {c} is a proper power"));
        }
        if c.sets[0].contains(&c.tail[0]) {
            diag(i, Property::TailNotInHead, format!("{c}: tail letter {} lies in S_n", c.tail[0]));
        }
        let n = c.sets.len();
        if c.sets[n - 1].len() < 2 {
            diag(i, Property::Critical, format!("{c}: S_1 has a single letter"));
        }
        for m in 1..n {
            if c.sets[n - m - 1].len() >= 2 {
                let shifted = GluingClass::new(c.tail.clone(), c.sets[..n - m].to_vec());
                if !listed.contains(&shifted) {
                    diag(i, Property::ShiftClosure, format!("{c}: shifted class {shifted} is missing"));
                }
            }
        }
    }
    for (i, c) in s.classes.iter().enumerate() {
        for (j, d) in s.classes.iter().enumerate().skip(i + 1) {
            if c.tail != d.tail {
                continue;
            }
            let mut all_equal = true;
            for (a, b) in c.sets.iter().zip(&d.sets) {
                if a == b {
                    continue;
                }
                all_equal = false;
                if a.iter().any(|x| b.contains(x)) {
                    diag(j, Property::DisjointOrEqual, format!("{c} and {d}: aligned sets overlap without being equal"));
                }
                break;
            }
            if all_equal && c.sets.len() == d.sets.len() {
                diag(j, Property::DisjointOrEqual, format!("{d} is listed twice"));
            }
        }
    }
    out.sort_by_key(|d| (d.class, d.property));
    out
}

type WordPair = (EventuallyPeriodicWord, EventuallyPeriodicWord);

/// Merges raw equations into a structure.
pub fn normalize_equations(alphabet: Alphabet, eqs: &[GlueEquation]) -> Result<StructureSpec> {
    // Pairs grouped by tail, then by head length.
    let mut by_tail: BTreeMap<Vec<Letter>, BTreeMap<usize, Vec<WordPair>>> = BTreeMap::new();
    for eq in eqs {
        eq.lhs.check(alphabet)?;
        eq.rhs.check(alphabet)?;
        let (u, v) = strip_common_suffix(&eq.lhs, &eq.rhs);
        if u == v {
            return Err(Error::InconsistentEquations(format!("{} ~ {} is trivial", eq.lhs, eq.rhs)));
        }
        if u.tail() != v.tail() {
            return Err(Error::ShiftMapUndefined(format!("unequal tails in {u} ~ {v}")));
        }
        if u.head().len() != v.head().len() {
            return Err(Error::ShiftMapUndefined(format!("unequal head lengths in {u} ~ {v}")));
        }
        by_tail
            .entry(u.tail().to_vec())
            .or_default()
            .entry(u.head().len())
            .or_default()
            .push((u, v));
    }
    let mut classes = Vec::new();
    for levels in by_tail.values() {
        let mut components: BTreeMap<usize, Vec<GluingClass>> = BTreeMap::new();
        for (&m, own) in levels {
            let mut pairs = own.clone();
            for (&lower, lower_pairs) in levels.range(..m) {
                let suffixes = alphabet.words(m - lower);
                if pairs.len() + lower_pairs.len() * suffixes.len() > PAIR_BUDGET {
                    return Err(Error::Budget("too many derived equations".into()));
                }
                for (u, v) in lower_pairs {
                    for s in &suffixes {
                        pairs.push((u.append(s.letters()), v.append(s.letters())));
                    }
                }
            }
            let found = classes_from_pairs(&pairs).map_err(|e| match e {
                Error::Contradiction(msg) => Error::InconsistentEquations(msg),
                e => e,
            })?;
            components.insert(m, found);
        }
        for (&m, found) in &components {
            for c in found.iter().filter(|c| c.sets[m - 1].len() >= 2) {
                if m >= 2 && c.sets[..m - 1].iter().any(|s| s.len() >= 2) {
                    let shifted = GluingClass::new(c.tail.clone(), c.sets[..m - 1].to_vec());
                    let shifted_members = shifted.members();
                    let covered = components.get(&(m - 1)).is_some_and(|lower| {
                        lower.iter().any(|d| {
                            let dm = d.members();
                            shifted_members.iter().all(|w| dm.contains(w))
                        })
                    });
                    if !covered {
                        return Err(Error::ShiftMapUndefined(format!(
                            "shifts of {c} are not identified with each other"
                        )));
                    }
                }
                classes.push(c.clone());
            }
        }
    }
    let spec = StructureSpec::new(alphabet, classes);
    let diags = validate_spec(&spec);
    if !diags.is_empty() {
        let msgs: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(Error::InconsistentEquations(msgs.join("; ")));
    }
    Ok(spec)
}

fn strip_common_suffix(
    u: &EventuallyPeriodicWord,
    v: &EventuallyPeriodicWord,
) -> (EventuallyPeriodicWord, EventuallyPeriodicWord) {
    let (mut u, mut v) = (u.clone(), v.clone());
    while !u.head().is_empty() && !v.head().is_empty() && u.last_letter() == v.last_letter() {
        u = u.shift();
        v = v.shift();
    }
    (u, v)
}

/// One equation per member pair with differing rightmost letters.
pub fn expand_equations(s: &StructureSpec) -> Vec<GlueEquation> {
    let mut out = Vec::new();
    for c in &s.classes {
        let members = c.members();
        for (i, u) in members.iter().enumerate() {
            for v in &members[i + 1..] {
                if u.last_letter() != v.last_letter() {
                    out.push(GlueEquation { lhs: u.clone(), rhs: v.clone() });
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GeneratorType {
    #[serde(rename = "I")]
    TypeI,
    #[serde(rename = "II")]
    TypeII,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SynthesizedGenerator {
    pub name: String,
    pub class: usize,
    pub index: usize,
    #[serde(rename = "type")]
    pub kind: GeneratorType,
    pub wreath: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionReport {
    /// Every generator before deduplication, in construction order.
    pub generators: Vec<SynthesizedGenerator>,
    /// Each synthesized name mapped to the surviving equal generator.
    pub dedup: BTreeMap<String, String>,
    #[serde(skip)]
    pub group: GroupSpec,
}

impl ConstructionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn survivors(&self) -> Vec<&str> {
        self.group.generators.iter().map(|g| g.name.as_str()).collect()
    }
}

fn gen_name(class: usize, j: usize) -> String {
    format!("g_{class}_{j}")
}

fn cycle_perm(k: usize, set: &[Letter]) -> Vec<Letter> {
    let mut perm: Vec<Letter> = (0..k).map(|x| x as Letter).collect();
    for (i, &x) in set.iter().enumerate() {
        perm[x as usize] = set[(i + 1) % set.len()];
    }
    perm
}

/// The generators of one class: `n + k - 1` wreath recursions.
fn class_generators(k: usize, ci: usize, c: &GluingClass) -> Vec<(GeneratorSpec, GeneratorType)> {
    let n = c.sets.len();
    let z = c.tail.len();
    // sets[0] is S_n, tail[0] is z_k.
    let s = |j: usize| &c.sets[n - j];
    let zl = |i: usize| c.tail[z - i];
    let call = |j: usize| vec![Token::new(gen_name(ci, j), false)];
    let mut out = Vec::new();
    for j in 1..n + z {
        let mut rest = vec![Vec::new(); k];
        let perm;
        if j <= n {
            perm = cycle_perm(k, s(j));
            if j >= 2 {
                for &x in s(j) {
                    rest[x as usize] = call(j - 1);
                }
            }
            if j == n {
                rest[c.tail[0] as usize] = call(n + z - 1);
            }
        } else {
            perm = (0..k).map(|x| x as Letter).collect();
            rest[zl(j - n) as usize] = call(j - 1);
        }
        let kind = if j < n { GeneratorType::TypeI } else { GeneratorType::TypeII };
        out.push((GeneratorSpec { name: gen_name(ci, j), perm, rest }, kind));
    }
    out
}

/// Builds the generators of the group realizing `s`, merging equal ones.
pub fn synthesize(s: &StructureSpec, settings: &Settings) -> Result<ConstructionReport> {
    let diags = validate_spec(s);
    if !diags.is_empty() {
        let msgs: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(Error::InvalidStructure(msgs.join("; ")));
    }
    let k = s.alphabet.size();
    let per_class: Vec<(usize, GluingClass)> = s.classes.iter().cloned().enumerate().collect();
    let built = settings.exec.map(&per_class, |(ci, c)| class_generators(k, *ci, c));
    let mut specs = Vec::new();
    let mut generators = Vec::new();
    for (ci, gens) in built.into_iter().enumerate() {
        for (j, (g, kind)) in gens.into_iter().enumerate() {
            generators.push(SynthesizedGenerator {
                name: g.name.clone(),
                class: ci,
                index: j + 1,
                kind,
                wreath: String::new(),
            });
            specs.push(g);
        }
    }
    let full = GroupSpec { alphabet: s.alphabet, generators: specs };
    let group = full.build(settings.bound)?;
    let naming = group.naming();
    for g in &mut generators {
        g.wreath = naming.wreath(group.get(&g.name).expect("built"));
    }
    let mut sorted: Vec<&str> = group.names.iter().map(String::as_str).collect();
    sorted.sort_unstable();
    let mut dedup: BTreeMap<String, String> = BTreeMap::new();
    let mut kept: Vec<&str> = Vec::new();
    for name in sorted {
        let e = group.get(name).expect("built");
        let survivor = kept.iter().find(|&&m| group.get(m) == Some(e)).copied().unwrap_or_else(|| {
            kept.push(name);
            name
        });
        dedup.insert(name.to_string(), survivor.to_string());
    }
    let rename = |t: &Token| Token::new(dedup[&t.generator].clone(), t.inverse);
    let survivors = full
        .generators
        .iter()
        .filter(|g| dedup[&g.name] == g.name)
        .map(|g| GeneratorSpec {
            name: g.name.clone(),
            perm: g.perm.clone(),
            rest: g.rest.iter().map(|w| w.iter().map(rename).collect()).collect(),
        })
        .collect();
    Ok(ConstructionReport {
        generators,
        dedup,
        group: GroupSpec { alphabet: s.alphabet, generators: survivors },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundtripReport {
    pub matched: bool,
    pub condition2: bool,
    pub pcf: bool,
    pub nucleus_size: usize,
    pub expected: Vec<GluingClass>,
    pub extracted: Vec<GluingClass>,
}

impl RoundtripReport {
    pub fn ok(&self) -> bool {
        self.matched && self.condition2 && self.pcf
    }
}

/// Synthesizes, computes the nucleus and re-extracts the gluing classes.
pub fn roundtrip_verify(s: &StructureSpec, settings: &Settings) -> Result<(RoundtripReport, Group)> {
    let report = synthesize(s, settings)?;
    let group = report.group.build(settings.bound)?;
    let n = group.nucleus(settings)?;
    let condition2 = check_condition2(&n)?;
    let pcf = check_pcf(&n);
    let extracted = if condition2 && pcf { gluing_classes(&n)? } else { Vec::new() };
    Ok((
        RoundtripReport {
            matched: condition2 && pcf && extracted == s.classes,
            condition2,
            pcf,
            nucleus_size: n.len(),
            expected: s.classes.clone(),
            extracted,
        },
        group,
    ))
}

/// `perm(rest...)` of a synthesized generator, for diagnostics.
pub fn describe(g: &GeneratorSpec) -> String {
    let rest: Vec<String> = g
        .rest
        .iter()
        .map(|w| {
            if w.is_empty() {
                "1".to_string()
            } else {
                w.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("*")
            }
        })
        .collect();
    format!("{}({})", cycle_notation(&g.perm), rest.join(", "))
}
