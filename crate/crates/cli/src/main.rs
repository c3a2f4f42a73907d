use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use nmpl_core::classical::{classical_lex_entails, classical_logical_entails, classical_z_entails, gamma, Default};
use nmpl_core::coherence::{GOptions, PartitionOutcome};
use nmpl_core::engine::{Answer, Engine, Semantics};
use nmpl_core::harness::{run_harness, GenParams, HarnessConfig, SuiteOptions, DEFAULT_BUDGET};
use nmpl_core::kb::{validate_kb, KnowledgeBase};
use nmpl_core::logic::World;
use nmpl_core::semantics::{encode, DistributionVector};
use nmpl_core::text::{parse_conditional_constraint, parse_conditional_event, parse_default, parse_kb};
use nmpl_core::{Error, Rational};

const EXIT_HARNESS: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_RESOURCE: u8 = 4;
const EXIT_PRECONDITION: u8 = 5;

#[derive(Parser)]
#[command(name = "nmpl", version, about = "Nonmonotonic probabilistic reasoning over conditional constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassicalSemantics {
    Logical,
    Z,
    Lex,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a knowledge base and report satisfiability, g-coherence and its z-partition.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Tight interval for a conditional event such as "(fly | penguin)".
    Tight {
        file: PathBuf,
        #[arg(long, value_parser = parse_semantics)]
        semantics: Semantics,
        #[arg(long)]
        query: String,
        /// Absolute tolerance for approximate g endpoints, e.g. 1/1000000.
        #[arg(long)]
        tolerance: Option<String>,
        /// Include distributions attaining the bounds.
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Decide a conditional constraint such as "(fly | penguin) [0, 1/10]".
    Entail {
        file: PathBuf,
        #[arg(long, value_parser = parse_semantics)]
        semantics: Semantics,
        #[arg(long)]
        query: String,
        #[arg(long)]
        tolerance: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Classical default entailment, "psi <= phi", over the translated knowledge base.
    Classical {
        file: PathBuf,
        #[arg(long, value_enum)]
        semantics: ClassicalSemantics,
        #[arg(long)]
        query: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Generate a seeded corpus and run the property suites on it.
    Harness {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        kbs: usize,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=5))]
        max_atoms: u8,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=3))]
        max_logical: u8,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=5))]
        max_conditional: u8,
        #[arg(long)]
        only_unit_intervals: bool,
        /// Additional knowledge base files to include in the corpus.
        #[arg(long = "fixture")]
        fixtures: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Report wall-clock time; output is then no longer byte-reproducible.
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Print the linear system of the knowledge base in the plain-text LP listing.
    DumpLp { file: PathBuf },
}

fn parse_semantics(s: &str) -> Result<Semantics, String> {
    s.parse()
}

/// An error carrying the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } | Error::InvalidAtomName(_) | Error::DuplicateAtom(_) | Error::UnknownAtom(_) | Error::AtomIndex { .. } => EXIT_PARSE,
            Error::InvalidKb(_) | Error::Translation(_) => EXIT_INVALID,
            Error::ResourceLimit { .. } | Error::GenerationBudget(_) | Error::Lp(_) => EXIT_RESOURCE,
            Error::Precondition(_) | Error::Inconsistency(_) => EXIT_PRECONDITION,
        };
        Failure { code, message: e.to_string() }
    }
}

fn read_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    let src = std::fs::read_to_string(path).map_err(|e| Failure { code: EXIT_PARSE, message: format!("cannot read {}: {e}", path.display()) })?;
    Ok(parse_kb(&src)?)
}

/// Parses and validates; violations map to exit 3, or 4 for the atom cap.
fn load_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    let kb = read_kb(path)?;
    let violations = validate_kb(&kb);
    if violations.is_empty() {
        return Ok(kb);
    }
    let code = if violations.iter().any(|v| v.is_resource_limit()) { EXIT_RESOURCE } else { EXIT_INVALID };
    let lines: Vec<String> = violations.iter().map(|v| v.describe(&kb)).collect();
    Err(Failure { code, message: format!("invalid knowledge base:\n  {}", lines.join("\n  ")) })
}

fn fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn decimal(r: &Rational) -> String {
    r.to_decimal_string(6)
}

fn options(tolerance: &Option<String>, sem: Semantics) -> Result<GOptions, Failure> {
    let mut opts = GOptions::default();
    if let Some(t) = tolerance {
        let tol: Rational = t.parse().map_err(|e| Failure { code: EXIT_PARSE, message: format!("bad tolerance `{t}`: {e}") })?;
        if !tol.is_positive() {
            return Err(Failure { code: EXIT_PARSE, message: "tolerance must be positive".into() });
        }
        if sem == Semantics::G {
            opts.tolerance = tol;
        } else {
            eprintln!("warning: --tolerance only affects g semantics and is ignored for {sem}");
        }
    }
    Ok(opts)
}

fn witness_json(d: &DistributionVector, kb: &KnowledgeBase) -> Value {
    let mut m = Map::new();
    for (w, mass) in d.support() {
        m.insert(World::new(w, d.num_atoms()).describe(&kb.atoms), json!(fraction(mass)));
    }
    Value::Object(m)
}

fn answer_json(a: &Answer, kb: &KnowledgeBase, witness: bool) -> Map<String, Value> {
    let i = &a.interval;
    let mut m = Map::new();
    m.insert("lower".into(), json!(fraction(&i.lower)));
    m.insert("upper".into(), json!(fraction(&i.upper)));
    m.insert("lower_decimal".into(), json!(decimal(&i.lower)));
    m.insert("upper_decimal".into(), json!(decimal(&i.upper)));
    m.insert("empty".into(), json!(i.is_empty()));
    m.insert("exact".into(), json!(a.is_exact()));
    m.insert("lower_exact".into(), json!(a.lower_exact));
    m.insert("upper_exact".into(), json!(a.upper_exact));
    if witness {
        let w = match &a.witnesses {
            Some((lo, hi)) => json!({"lower": witness_json(lo, kb), "upper": witness_json(hi, kb)}),
            None => Value::Null,
        };
        m.insert("witnesses".into(), w);
    }
    m
}

fn answer_text(a: &Answer, kb: &KnowledgeBase, witness: bool) -> String {
    let i = &a.interval;
    let mark = |exact: bool| if exact { "" } else { " (approximate)" };
    let mut out = format!(
        "lower: {} ({}){}\nupper: {} ({}){}\nempty: {}\nexact: {}\n",
        i.lower,
        decimal(&i.lower),
        mark(a.lower_exact),
        i.upper,
        decimal(&i.upper),
        mark(a.upper_exact),
        i.is_empty(),
        a.is_exact()
    );
    if witness {
        match &a.witnesses {
            Some((lo, hi)) => {
                out.push_str(&format!("witness lower: {}\nwitness upper: {}\n", lo.display(&kb.atoms), hi.display(&kb.atoms)));
            }
            None => out.push_str("witness: none\n"),
        }
    }
    out
}

fn print_json(v: Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("json values serialize"));
}

fn cmd_check(file: &Path, format: Format) -> Result<u8, Failure> {
    let kb = read_kb(file)?;
    let violations = validate_kb(&kb);
    if !violations.is_empty() {
        let code = if violations.iter().any(|v| v.is_resource_limit()) { EXIT_RESOURCE } else { EXIT_INVALID };
        let lines: Vec<String> = violations.iter().map(|v| v.describe(&kb)).collect();
        match format {
            Format::Json => print_json(json!({"valid": false, "violations": lines})),
            Format::Text => {
                println!("valid: no");
                for l in &lines {
                    println!("violation: {l}");
                }
            }
        }
        return Ok(code);
    }
    let engine = Engine::new(kb.clone())?;
    let show = |i: &usize| kb.conditional[*i].display(&kb.atoms).to_string();
    let show_levels = |levels: &[Vec<usize>]| -> Vec<Vec<String>> { levels.iter().map(|l| l.iter().map(show).collect()).collect() };
    let (levels, residue) = match engine.partition_outcome() {
        PartitionOutcome::Partition(z) => (show_levels(&z.levels), None),
        PartitionOutcome::Stuck { levels, residue } => (show_levels(levels), Some(residue.iter().map(show).collect::<Vec<_>>())),
    };
    match format {
        Format::Json => {
            let mut m = Map::new();
            m.insert("valid".into(), json!(true));
            m.insert("satisfiable".into(), json!(engine.satisfiable()));
            m.insert("g_coherent".into(), json!(engine.is_gcoherent()));
            m.insert("partition".into(), json!(levels));
            if let Some(r) = &residue {
                m.insert("residue".into(), json!(r));
            }
            print_json(Value::Object(m));
        }
        Format::Text => {
            let yes = |b: bool| if b { "yes" } else { "no" };
            println!("valid: yes");
            println!("satisfiable: {}", yes(engine.satisfiable()));
            println!("g-coherent: {}", yes(engine.is_gcoherent()));
            println!("partition:");
            for (i, l) in levels.iter().enumerate() {
                println!("  P{i}: {}", l.join("; "));
            }
            if let Some(r) = &residue {
                println!("residue: {}", r.join("; "));
            }
        }
    }
    Ok(0)
}

fn cmd_tight(file: &Path, sem: Semantics, query: &str, tolerance: &Option<String>, witness: bool, format: Format) -> Result<u8, Failure> {
    let kb = load_kb(file)?;
    let q = parse_conditional_event(&kb.atoms, query)?;
    let engine = Engine::with_options(kb.clone(), options(tolerance, sem)?)?;
    let a = engine.tight(sem, &q)?;
    let shown = q.display(&kb.atoms).to_string();
    match format {
        Format::Json => {
            let mut m = answer_json(&a, &kb, witness);
            m.insert("semantics".into(), json!(sem.name()));
            m.insert("query".into(), json!(shown));
            print_json(Value::Object(m));
        }
        Format::Text => print!("semantics: {sem}\nquery: {shown}\n{}", answer_text(&a, &kb, witness)),
    }
    Ok(0)
}

fn cmd_entail(file: &Path, sem: Semantics, query: &str, tolerance: &Option<String>, format: Format) -> Result<u8, Failure> {
    let kb = load_kb(file)?;
    let c = parse_conditional_constraint(&kb.atoms, query)?;
    let engine = Engine::with_options(kb.clone(), options(tolerance, sem)?)?;
    let a = engine.tight(sem, &c.cond)?;
    let yes = engine.entails(sem, &c)?;
    let shown = c.display(&kb.atoms).to_string();
    match format {
        Format::Json => {
            let mut m = Map::new();
            m.insert("semantics".into(), json!(sem.name()));
            m.insert("query".into(), json!(shown));
            m.insert("entailed".into(), json!(yes));
            m.insert("tight".into(), Value::Object(answer_json(&a, &kb, false)));
            print_json(Value::Object(m));
        }
        Format::Text => print!("{}\nsemantics: {sem}\nquery: {shown}\ntight: {}\n", if yes { "yes" } else { "no" }, a.interval),
    }
    Ok(0)
}

fn cmd_classical(file: &Path, sem: ClassicalSemantics, query: &str, format: Format) -> Result<u8, Failure> {
    let kb = load_kb(file)?;
    let (psi, phi) = parse_default(&kb.atoms, query)?;
    let ckb = gamma(&kb)?;
    let d = Default::new(psi, phi);
    let (name, yes) = match sem {
        ClassicalSemantics::Logical => ("logical", classical_logical_entails(&ckb, &d)?),
        ClassicalSemantics::Z => ("z", classical_z_entails(&ckb, &d)?),
        ClassicalSemantics::Lex => ("lex", classical_lex_entails(&ckb, &d)?),
    };
    let shown = format!("{} <= {}", d.consequent.display(&kb.atoms), d.antecedent.display(&kb.atoms));
    match format {
        Format::Json => print_json(json!({"semantics": name, "query": shown, "entailed": yes})),
        Format::Text => print!("{}\nsemantics: {name}\nquery: {shown}\n", if yes { "yes" } else { "no" }),
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_harness(
    seed: u64,
    kbs: usize,
    params: GenParams,
    fixtures: &[PathBuf],
    timings: bool,
    threads: Option<usize>,
    format: ReportFormat,
) -> Result<u8, Failure> {
    let mut fx = Vec::new();
    for f in fixtures {
        fx.push((f.display().to_string(), load_kb(f)?));
    }
    let mut cfg = HarnessConfig { seed, kbs, params, fixtures: fx, suite: SuiteOptions::default(), timings, ..HarnessConfig::default() };
    if let Some(t) = threads {
        cfg.threads = t;
    }
    let report = run_harness(&cfg)?;
    match format {
        ReportFormat::Text => print!("{}", report.to_text()),
        ReportFormat::Jsonl => print!("{}", report.to_jsonl()),
    }
    Ok(if report.failed() { EXIT_HARNESS } else { 0 })
}

fn cmd_dump_lp(file: &Path) -> Result<u8, Failure> {
    let kb = load_kb(file)?;
    print!("{}", encode(&kb.atoms, &kb.logical, &kb.conditional)?.to_text());
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { file, format } => cmd_check(&file, format),
        Command::Tight { file, semantics, query, tolerance, witness, format } => cmd_tight(&file, semantics, &query, &tolerance, witness, format),
        Command::Entail { file, semantics, query, tolerance, format } => cmd_entail(&file, semantics, &query, &tolerance, format),
        Command::Classical { file, semantics, query, format } => cmd_classical(&file, semantics, &query, format),
        Command::Harness { seed, kbs, max_atoms, max_logical, max_conditional, only_unit_intervals, fixtures, budget, timings, threads, format } => {
            let params = GenParams {
                num_atoms: max_atoms as usize,
                num_logical: max_logical as usize,
                num_conditional: max_conditional as usize,
                only_unit_intervals,
                budget,
                ..GenParams::default()
            };
            cmd_harness(seed, kbs, params, &fixtures, timings, threads, format)
        }
        Command::DumpLp { file } => cmd_dump_lp(&file),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
