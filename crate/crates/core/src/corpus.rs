//! The bundled example corpus and its manifest of expected values.

use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{check_condition2, check_pcf, check_strictly_pcf, is_bounded_element};
use crate::automata::{Group, GroupSpec};
use crate::construction::{equations_from_json, normalize_equations, roundtrip_verify, synthesize, validate_spec, StructureSpec};
use crate::error::{Error, Result};
use crate::limitspace::{critical_sets, gluing_classes, tile_graph};
use crate::nucleus::{is_contracting, Contraction, Nucleus};
use crate::par::Settings;

macro_rules! corpus_files {
    ($($name:literal),* $(,)?) => {
        /// Every corpus file as `(file name, contents)`.
        pub const FILES: &[(&str, &str)] = &[$(($name, include_str!(concat!("../corpus/", $name)))),*];
    };
}

corpus_files!(
    "adding_machine.json",
    "double_loop.json",
    "grigorchuk.json",
    "hanoi.json",
    "hanoi_equations.json",
    "hanoi_structure.json",
    "hexakun.json",
    "hexakun_equations.json",
    "hexakun_group.json",
    "interval.json",
    "interval_equations.json",
    "interval_group.json",
    "lamplighter.json",
    "nonstrict.json",
    "nonstrict_structure.json",
    "pentakun.json",
    "pentakun_group.json",
    "pentakun_usual_equations.json",
    "sierpinski_usual_equations.json",
    "trivial.json",
);

pub const MANIFEST: &str = include_str!("../corpus/manifest.json");

pub fn file(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Group,
    Structure,
    Equations,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub key: String,
    pub value: Value,
    /// Where the value comes from: `published`, `hand-derived`,
    /// `definitional` or `regression`.
    pub source: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub name: String,
    pub file: String,
    pub kind: Kind,
    #[serde(default)]
    pub bound: Option<usize>,
    pub expect: Vec<Expectation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    entries: Vec<Entry>,
}

pub fn entries() -> Result<Vec<Entry>> {
    let m: Manifest = serde_json::from_str(MANIFEST)?;
    Ok(m.entries)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub entry: String,
    pub key: String,
    pub source: String,
    pub expected: Value,
    pub actual: Value,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.expected == self.actual
    }

    pub fn line(&self) -> String {
        if self.ok() {
            format!("ok   {} {} = {} [{}]", self.entry, self.key, self.actual, self.source)
        } else {
            format!(
                "FAIL {} {}: expected {}, got {} [{}]",
                self.entry, self.key, self.expected, self.actual, self.source
            )
        }
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// DOT text of the nucleus Moore diagram, as printed by `ssg moore`.
pub fn nucleus_dot(n: &Nucleus, group: &Group) -> String {
    n.diagram().to_dot("nucleus", &n.naming(group))
}

fn error_value(e: &Error) -> Value {
    Value::String(error_kind(e).to_string())
}

/// Short, stable name of an error variant.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ShiftMapUndefined(_) => "shift-map-undefined",
        Error::InconsistentEquations(_) => "inconsistent-equations",
        Error::ClosureBound(_) | Error::NucleusBound(_) | Error::Budget(_) => "unknown",
        Error::Precondition(_) => "precondition",
        Error::Contradiction(_) => "contradiction",
        _ => "invalid-input",
    }
}

fn words(set: impl IntoIterator<Item = crate::words::EventuallyPeriodicWord>) -> Value {
    Value::from(set.into_iter().map(|w| w.to_string()).collect::<Vec<_>>())
}

struct GroupFacts {
    group: Group,
    nucleus: Option<Nucleus>,
}

fn group_value(key: &str, f: &GroupFacts, settings: &Settings) -> Result<Value> {
    if key == "contracting" {
        return Ok(Value::Bool(f.nucleus.is_some()));
    }
    let n = f.nucleus.as_ref().ok_or(Error::NucleusBound(settings.bound))?;
    Ok(match key {
        "nucleus_size" => json!(n.len()),
        "nucleus" => {
            let naming = n.naming(&f.group);
            let mut names: Vec<String> = n.elements().iter().map(|g| naming.name(g)).collect();
            names.sort();
            json!(names)
        }
        "condition2" => json!(check_condition2(n)?),
        "pcf" => json!(check_pcf(n)),
        "strictly_pcf" => json!(check_strictly_pcf(&f.group.generators, n)),
        "bounded" => json!(f.group.generators.iter().all(is_bounded_element)),
        "classes" => serde_json::to_value(gluing_classes(n)?)?,
        "postcritical" => words(critical_sets(&gluing_classes(n)?).1),
        "moore_sha256" => json!(sha256_hex(&nucleus_dot(n, &f.group))),
        _ => match key.strip_prefix("tile_edges_level_").and_then(|l| l.parse().ok()) {
            Some(level) => json!(tile_graph(n, level, settings)?.edges.len()),
            None => return Err(Error::InvalidStructure(format!("unknown manifest key {key}"))),
        },
    })
}

fn structure_value(key: &str, s: &StructureSpec, settings: &Settings) -> Result<Value> {
    Ok(match key {
        "valid" => json!(validate_spec(s).is_empty()),
        "generators" => json!(synthesize(s, settings)?.generators.len()),
        "survivors" => json!(synthesize(s, settings)?.survivors().len()),
        "group_sha256" => json!(sha256_hex(&synthesize(s, settings)?.group.to_json())),
        "roundtrip" => json!(roundtrip_verify(s, settings)?.0.ok()),
        "nucleus_size" => json!(roundtrip_verify(s, settings)?.0.nucleus_size),
        "postcritical" => words(critical_sets(&roundtrip_verify(s, settings)?.0.extracted).1),
        _ => return Err(Error::InvalidStructure(format!("unknown manifest key {key}"))),
    })
}

fn equations_value(key: &str, text: &str) -> Result<Value> {
    let (alphabet, eqs) = equations_from_json(text)?;
    Ok(match key {
        "normalize" => match normalize_equations(alphabet, &eqs) {
            Ok(s) => serde_json::to_value(s.classes)?,
            Err(e) => error_value(&e),
        },
        _ => return Err(Error::InvalidStructure(format!("unknown manifest key {key}"))),
    })
}

type Lookup<'a> = Box<dyn Fn(&str) -> Result<Value> + 'a>;

/// Recomputes every expected value of `entry`.
pub fn verify_entry(entry: &Entry, settings: &Settings) -> Vec<Check> {
    let settings = match entry.bound {
        Some(b) => Settings { bound: b, ..*settings },
        None => *settings,
    };
    let text = file(&entry.file).unwrap_or("");
    let actual: Lookup = match entry.kind {
        Kind::Group => match GroupSpec::from_json(text).and_then(|g| g.build(settings.bound)) {
            Ok(group) => {
                let nucleus = match is_contracting(group.alphabet, &group.generators, &settings) {
                    Ok(Contraction::Contracting(n)) => Some(n),
                    _ => None,
                };
                let facts = GroupFacts { group, nucleus };
                Box::new(move |k| group_value(k, &facts, &settings))
            }
            Err(e) => {
                let v = error_value(&e);
                Box::new(move |_| Ok(v.clone()))
            }
        },
        Kind::Structure => match StructureSpec::from_json(text) {
            Ok(s) => Box::new(move |k| structure_value(k, &s, &settings)),
            Err(e) => {
                let v = error_value(&e);
                Box::new(move |_| Ok(v.clone()))
            }
        },
        Kind::Equations => Box::new(move |k| equations_value(k, text)),
    };
    entry
        .expect
        .iter()
        .map(|x| Check {
            entry: entry.name.clone(),
            key: x.key.clone(),
            source: x.source.clone(),
            expected: x.value.clone(),
            actual: actual(&x.key).unwrap_or_else(|e| error_value(&e)),
        })
        .collect()
}

pub fn verify(settings: &Settings) -> Result<Vec<Check>> {
    Ok(entries()?.iter().flat_map(|e| verify_entry(e, settings)).collect())
}
