//! `ssg`: command-line front end.
//!
//! Exit codes: 0 success or true, 1 false or mismatch, 2 invalid input,
//! 3 unknown within the bound.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ssg_core::analysis::{are_equivalent, check_condition2, check_pcf, check_strictly_pcf, equivalence_class, is_bounded_element};
use ssg_core::construction::{equations_from_json, normalize_equations, roundtrip_verify, synthesize, validate_spec, StructureSpec};
use ssg_core::corpus;
use ssg_core::limitspace::tile_graph;
use ssg_core::{export_moore, is_contracting, Contraction, Element, Error, EventuallyPeriodicWord, Group, GroupSpec, Nucleus, Settings};

#[derive(Parser)]
#[command(name = "ssg", version, about = "Self-similar groups, nuclei and limit-space gluing structures")]
struct Cli {
    /// Bound for semi-decision procedures.
    #[arg(long, global = true, env = "SSG_BOUND", default_value_t = 10_000)]
    bound: usize,
    /// Run without data parallelism.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Input JSON file.
    #[arg(short, long)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the nucleus and print its elements as wreath recursions.
    Nucleus {
        #[command(flatten)]
        input: Input,
        /// Also write the Moore diagram of the nucleus as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide structural properties; exit 0 iff all requested hold.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        condition2: bool,
        #[arg(long)]
        pcf: bool,
        /// Every generator is a bounded automorphism.
        #[arg(long)]
        bounded: bool,
        #[arg(long)]
        strict_pcf: bool,
        #[arg(long)]
        all: bool,
    },
    /// Decide asymptotic equivalence, or list a class when --rhs is omitted.
    Equiv {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: Option<String>,
    },
    /// Extract the gluing classes as a structure file.
    Glue {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Moore diagram as DOT.
    Moore {
        #[command(flatten)]
        input: Input,
        /// Use the state closure of the generators instead of the nucleus.
        #[arg(long)]
        generators: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Adjacency graph of level-n tiles.
    Tiles {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Synthesize a group from a structure or equations file.
    Construct {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Synthesize, re-extract the gluing classes and compare.
    Roundtrip {
        #[command(flatten)]
        input: Input,
    },
    /// The bundled example corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Recompute every expected value in the manifest.
    Verify,
    /// List bundled files.
    List,
    /// Print a bundled file.
    Show { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

/// Failure carrying its exit code.
struct Exit(u8, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = if e.is_unknown() {
            3
        } else if matches!(e, Error::Precondition(_)) {
            1
        } else {
            2
        };
        let prefix = if code == 3 { "unknown" } else { "error" };
        Exit(code, format!("{prefix}: {e}"))
    }
}

type Outcome = Result<u8, Exit>;

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit(2, format!("error: cannot read {}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Exit> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Exit(2, format!("error: cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_group(input: &Input, settings: &Settings) -> Result<Group, Exit> {
    let text = read(&input.input)?;
    GroupSpec::from_json(&text)
        .and_then(|s| s.build(settings.bound))
        .map_err(|e| Exit::from(e).with_file(&input.input))
}

impl Exit {
    fn with_file(self, path: &Path) -> Self {
        Exit(self.0, format!("{}: {}", path.display(), self.1))
    }
}

fn load_nucleus(group: &Group, settings: &Settings) -> Result<Nucleus, Exit> {
    match is_contracting(group.alphabet, &group.generators, settings)? {
        Contraction::Contracting(n) => Ok(n),
        Contraction::Unknown { bound } => Err(Exit(3, format!("unknown: no nucleus found within bound {bound}"))),
    }
}

/// A structure file, or an equations file normalized into one.
fn load_structure(input: &Input) -> Result<StructureSpec, Exit> {
    let text = read(&input.input)?;
    let is_equations = serde_json::from_str::<serde_json::Value>(&text)
        .map(|v| v.get("equations").is_some())
        .unwrap_or(false);
    let spec = if is_equations {
        equations_from_json(&text).and_then(|(a, eqs)| normalize_equations(a, &eqs))
    } else {
        StructureSpec::from_json(&text)
    };
    spec.map_err(|e| Exit::from(e).with_file(&input.input))
}

fn parse_word(text: &str, group: &Group) -> Result<EventuallyPeriodicWord, Exit> {
    let w: EventuallyPeriodicWord = text.parse()?;
    w.check(group.alphabet)?;
    Ok(w)
}

fn run(cli: Cli) -> Outcome {
    let mut settings = Settings::with_bound(cli.bound);
    if cli.sequential {
        settings = settings.sequential();
    }
    match cli.command {
        Command::Nucleus { input, dot } => {
            let group = load_group(&input, &settings)?;
            let n = load_nucleus(&group, &settings)?;
            let naming = n.naming(&group);
            println!("nucleus: {} elements", n.len());
            for g in n.elements() {
                println!("{} = {}", naming.name(g), naming.wreath(g));
            }
            if let Some(path) = dot {
                emit(Some(&path), &corpus::nucleus_dot(&n, &group))?;
            }
            Ok(0)
        }
        Command::Check { input, mut condition2, mut pcf, mut bounded, mut strict_pcf, all } => {
            if all || !(condition2 || pcf || bounded || strict_pcf) {
                (condition2, pcf, bounded, strict_pcf) = (true, true, true, true);
            }
            let group = load_group(&input, &settings)?;
            let mut results = Vec::new();
            if bounded {
                results.push(("bounded", group.generators.iter().all(is_bounded_element)));
            }
            if condition2 || pcf || strict_pcf {
                let n = load_nucleus(&group, &settings)?;
                if condition2 {
                    results.push(("condition2", check_condition2(&n)?));
                }
                if pcf {
                    results.push(("pcf", check_pcf(&n)));
                }
                if strict_pcf {
                    results.push(("strict-pcf", check_strictly_pcf(&group.generators, &n)));
                }
            }
            for (name, value) in &results {
                println!("{name}: {value}");
            }
            Ok(if results.iter().all(|r| r.1) { 0 } else { 1 })
        }
        Command::Equiv { input, lhs, rhs } => {
            let group = load_group(&input, &settings)?;
            let n = load_nucleus(&group, &settings)?;
            let u = parse_word(&lhs, &group)?;
            match rhs {
                Some(rhs) => {
                    let v = parse_word(&rhs, &group)?;
                    let eq = are_equivalent(&u, &v, &n);
                    println!("{}", if eq { "equivalent" } else { "not equivalent" });
                    Ok(if eq { 0 } else { 1 })
                }
                None => {
                    for w in equivalence_class(&u, &n)? {
                        println!("{w}");
                    }
                    Ok(0)
                }
            }
        }
        Command::Glue { input, output } => {
            let group = load_group(&input, &settings)?;
            let n = load_nucleus(&group, &settings)?;
            let classes = ssg_core::gluing_classes(&n)?;
            emit(output.as_deref(), &StructureSpec::new(group.alphabet, classes).to_json())?;
            Ok(0)
        }
        Command::Moore { input, generators, output } => {
            let group = load_group(&input, &settings)?;
            let dot = if generators {
                let mut states: Vec<Element> = Vec::new();
                for g in &group.generators {
                    states.extend(g.state_closure());
                }
                export_moore(&states)?.to_dot("generators", &group.naming())
            } else {
                corpus::nucleus_dot(&load_nucleus(&group, &settings)?, &group)
            };
            emit(output.as_deref(), &dot)?;
            Ok(0)
        }
        Command::Tiles { input, level, format, output } => {
            let group = load_group(&input, &settings)?;
            let n = load_nucleus(&group, &settings)?;
            let t = tile_graph(&n, level, &settings)?;
            let text = match format {
                Format::Dot => t.to_dot(),
                Format::Json => t.to_json(),
            };
            emit(output.as_deref(), &text)?;
            Ok(0)
        }
        Command::Construct { input, output, report } => {
            let spec = load_structure(&input)?;
            let diags = validate_spec(&spec);
            if !diags.is_empty() {
                let lines: Vec<String> = diags.iter().map(|d| format!("invalid: {d}")).collect();
                return Err(Exit(2, lines.join("\n")));
            }
            let r = synthesize(&spec, &settings)?;
            emit(output.as_deref(), &r.group.to_json())?;
            if let Some(path) = report {
                emit(Some(&path), &r.to_json())?;
            }
            Ok(0)
        }
        Command::Roundtrip { input } => {
            let spec = load_structure(&input)?;
            let diags = validate_spec(&spec);
            if !diags.is_empty() {
                let lines: Vec<String> = diags.iter().map(|d| format!("invalid: {d}")).collect();
                return Err(Exit(2, lines.join("\n")));
            }
            let (r, _) = roundtrip_verify(&spec, &settings)?;
            println!("nucleus: {} elements", r.nucleus_size);
            println!("condition2: {}", r.condition2);
            println!("pcf: {}", r.pcf);
            for c in &r.extracted {
                println!("class: {c}");
            }
            println!("roundtrip: {}", if r.matched { "match" } else { "mismatch" });
            Ok(if r.ok() { 0 } else { 1 })
        }
        Command::Corpus { action } => match action {
            CorpusAction::Verify => {
                let checks = corpus::verify(&settings)?;
                for c in &checks {
                    println!("{}", c.line());
                }
                let failed = checks.iter().filter(|c| !c.ok()).count();
                println!("{} checks, {} failed", checks.len(), failed);
                Ok(if failed == 0 { 0 } else { 1 })
            }
            CorpusAction::List => {
                for (name, _) in corpus::FILES {
                    println!("{name}");
                }
                Ok(0)
            }
            CorpusAction::Show { name } => {
                let text = corpus::file(&name).ok_or_else(|| Exit(2, format!("error: no corpus file {name}")))?;
                print!("{text}");
                Ok(0)
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, message)) => {
            eprintln!("{message}");
            ExitCode::from(code)
        }
    }
}
