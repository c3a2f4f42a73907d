//! Seeded knowledge-base generation and batch property checking.
//!
//! All randomness comes from [`RNG_ALGORITHM`], seeded with `seed_from_u64`,
//! so a seed names the same corpus on every platform.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::classical::{classical_lex_entails, classical_logical_entails, classical_z_entails, classical_z_partition, gamma, Default};
use crate::coherence::{gcoherence_oracle, ORACLE_CAP};
use crate::engine::{Answer, Engine, Semantics};
use crate::error::{Error, Result};
use crate::kb::{validate_kb, ConditionalConstraint, KnowledgeBase, LogicalConstraint};
use crate::logic::{AtomTable, ConditionalEvent, Event, WorldSpace, DEFAULT_ATOM_CAP};
use crate::rational::Rational;
use crate::semantics::{models, DistributionVector, ModelSpace};
use crate::lp::Sense;
use crate::text::write_kb;

pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";
pub const DEFAULT_BUDGET: usize = 10_000;
pub const MAX_ATOMS: usize = 5;
pub const MAX_LOGICAL: usize = 3;
pub const MAX_CONDITIONAL: usize = 5;
const ATOM_NAMES: [&str; MAX_ATOMS] = ["a", "b", "c", "d", "e"];
const MAX_COUNTEREXAMPLES: usize = 3;

/// Generation parameters. Counts are upper bounds; each draw picks actual
/// sizes below them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub seed: u64,
    pub num_atoms: usize,
    pub num_logical: usize,
    pub num_conditional: usize,
    pub bound_grid: Vec<Rational>,
    pub only_unit_intervals: bool,
    pub budget: usize,
}

pub fn default_bound_grid() -> Vec<Rational> {
    [(0, 1), (1, 10), (1, 4), (1, 2), (3, 4), (9, 10), (1, 1)].iter().map(|&(n, d)| Rational::new(n, d)).collect()
}

impl std::default::Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            num_atoms: 4,
            num_logical: 1,
            num_conditional: 4,
            bound_grid: default_bound_grid(),
            only_unit_intervals: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl GenParams {
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        if self.num_atoms == 0 || self.num_atoms > MAX_ATOMS {
            return bad(format!("num_atoms must be in 1..={MAX_ATOMS}, got {}", self.num_atoms));
        }
        if self.num_logical > MAX_LOGICAL {
            return bad(format!("num_logical must be at most {MAX_LOGICAL}, got {}", self.num_logical));
        }
        if self.num_conditional == 0 || self.num_conditional > MAX_CONDITIONAL {
            return bad(format!("num_conditional must be in 1..={MAX_CONDITIONAL}, got {}", self.num_conditional));
        }
        if !self.only_unit_intervals
            && (self.bound_grid.is_empty() || self.bound_grid.iter().any(|r| r.is_negative() || r > &Rational::one()))
        {
            return bad("bound grid must be a nonempty subset of [0, 1]".into());
        }
        if self.budget == 0 {
            return bad("rejection budget must be positive".into());
        }
        Ok(())
    }
}

/// Event of depth at most `depth`; each connective adds one level.
fn random_event(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Event {
    if depth == 0 || rng.gen_bool(0.4) {
        return Event::atom(rng.gen_range(0..n));
    }
    match rng.gen_range(0..3) {
        0 => Event::not(random_event(rng, n, depth - 1)),
        1 => Event::and(random_event(rng, n, depth - 1), random_event(rng, n, depth - 1)),
        _ => Event::or(random_event(rng, n, depth - 1), random_event(rng, n, depth - 1)),
    }
}

fn random_antecedent(rng: &mut ChaCha8Rng, n: usize) -> Event {
    if rng.gen_bool(0.15) {
        Event::Top
    } else {
        let d = rng.gen_range(0..=2);
        random_event(rng, n, d)
    }
}

fn draw_structural(p: &GenParams, rng: &mut ChaCha8Rng) -> KnowledgeBase {
    let n = rng.gen_range(p.num_atoms.min(2)..=p.num_atoms);
    let atoms = AtomTable::new(ATOM_NAMES[..n].iter().copied()).expect("fixed atom names are valid");
    let nl = rng.gen_range(0..=p.num_logical);
    let nc = rng.gen_range(1..=p.num_conditional);
    let logical = (0..nl)
        .map(|_| {
            let d = rng.gen_range(0..=1);
            let c = random_event(rng, n, d);
            LogicalConstraint::new(c, random_antecedent(rng, n))
        })
        .collect();
    let conditional = (0..nc)
        .map(|_| {
            let d = rng.gen_range(0..=2);
            let c = random_event(rng, n, d);
            let a = random_antecedent(rng, n);
            let (l, u) = if p.only_unit_intervals || rng.gen_bool(0.3) {
                (Rational::one(), Rational::one())
            } else {
                let x = p.bound_grid[rng.gen_range(0..p.bound_grid.len())].clone();
                let y = p.bound_grid[rng.gen_range(0..p.bound_grid.len())].clone();
                (x.clone().min(y.clone()), x.max(y))
            };
            ConditionalConstraint::new(c, a, l, u)
        })
        .collect();
    KnowledgeBase::with_constraints(atoms, logical, conditional)
}

/// A structurally valid knowledge base, not necessarily g-coherent.
pub fn random_structural_kb(p: &GenParams) -> Result<KnowledgeBase> {
    p.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for _ in 0..p.budget {
        let kb = draw_structural(p, &mut rng);
        if validate_kb(&kb).is_empty() {
            return Ok(kb);
        }
    }
    Err(Error::GenerationBudget(p.budget))
}

/// A structurally valid, g-coherent knowledge base.
pub fn random_kb(p: &GenParams) -> Result<KnowledgeBase> {
    p.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for _ in 0..p.budget {
        let kb = draw_structural(p, &mut rng);
        if validate_kb(&kb).is_empty() && crate::coherence::is_gcoherent(&kb)? {
            return Ok(kb);
        }
    }
    Err(Error::GenerationBudget(p.budget))
}

/// Vertices of the model polytope of `kb`, found by maximising seeded random
/// objectives. Each is rechecked against the constraints by direct evaluation.
pub fn sample_extreme_models(kb: &KnowledgeBase, n: usize, seed: u64) -> Result<Vec<DistributionVector>> {
    let ms = ModelSpace::for_kb(kb)?;
    let p = ms.compile_all(&kb.conditional)?;
    if !ms.satisfiable(&p)? {
        return Err(Error::Precondition("knowledge base is unsatisfiable".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let weights: Vec<Rational> = (0..ms.space().len()).map(|_| Rational::new(rng.gen_range(-8..=8), rng.gen_range(1..=4))).collect();
        let d = ms
            .optimize(&p, &weights, Sense::Maximize)?
            .ok_or_else(|| Error::Inconsistency("feasible system reported infeasible".into()))?;
        if !models(&d, &kb.logical, &kb.conditional)? {
            return Err(Error::Inconsistency("sampled vertex is not a model".into()));
        }
        out.push(d);
    }
    Ok(out)
}

/// Queries `(ψ|φ)` with `ψ` drawn from `consequents` and `φ` from `antecedents`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryFamily {
    pub consequents: Vec<Event>,
    pub antecedents: Vec<Event>,
}

impl QueryFamily {
    /// Literal consequents; antecedents are `⊤`, literals, and conjunctions of
    /// two literals over distinct atoms.
    pub fn standard(num_atoms: usize) -> Self {
        let lits: Vec<Event> = (0..num_atoms).flat_map(|a| [Event::literal(a, true), Event::literal(a, false)]).collect();
        let mut antecedents = vec![Event::Top];
        antecedents.extend(lits.iter().cloned());
        for i in 0..num_atoms {
            for j in i + 1..num_atoms {
                for (si, sj) in [(true, true), (true, false), (false, true), (false, false)] {
                    antecedents.push(Event::and(Event::literal(i, si), Event::literal(j, sj)));
                }
            }
        }
        QueryFamily { consequents: lits, antecedents }
    }

    pub fn queries(&self) -> impl Iterator<Item = ConditionalEvent> + '_ {
        self.antecedents
            .iter()
            .flat_map(move |a| self.consequents.iter().map(move |c| ConditionalEvent::new(c.clone(), a.clone())))
    }
}

/// One representative per truth function among events of depth at most 2
/// over `num_atoms` atoms, in generation order.
pub fn depth2_events(num_atoms: usize) -> Result<Vec<Event>> {
    let space = WorldSpace::with_cap(num_atoms, DEFAULT_ATOM_CAP)?;
    let mut seen = std::collections::HashSet::new();
    let mut layer: Vec<Event> = Vec::new();
    let mut push = |e: Event, out: &mut Vec<Event>| -> Result<()> {
        if seen.insert(space.mask(&e)?) {
            out.push(e);
        }
        Ok(())
    };
    push(Event::Top, &mut layer)?;
    for a in 0..num_atoms {
        push(Event::atom(a), &mut layer)?;
    }
    for _ in 0..2 {
        let prev = layer.clone();
        for x in &prev {
            push(Event::not(x.clone()), &mut layer)?;
        }
        for (i, x) in prev.iter().enumerate() {
            for y in &prev[i + 1..] {
                push(Event::and(x.clone(), y.clone()), &mut layer)?;
                push(Event::or(x.clone(), y.clone()), &mut layer)?;
            }
        }
    }
    Ok(layer)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, std::default::Default)]
pub struct PropertyStats {
    pub pass: u64,
    pub fail: u64,
    /// Failures are documented behaviour and do not fail the run.
    pub expected_negative: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub property: String,
    /// Where the knowledge base came from, e.g. `seed 7` or a fixture path.
    pub source: String,
    pub kb: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, std::default::Default)]
pub struct PropertyReport {
    pub kbs: usize,
    pub properties: BTreeMap<String, PropertyStats>,
    pub counterexamples: Vec<Counterexample>,
    pub elapsed_ms: Option<u128>,
}

fn is_expected_negative(name: &str) -> bool {
    matches!(name, "RM[g]" | "Irr[g]")
}

impl PropertyReport {
    pub fn record(&mut self, property: &str, ok: bool, kb: &str, detail: impl FnOnce() -> String) {
        let stats = self.properties.entry(property.to_string()).or_insert_with(|| PropertyStats {
            expected_negative: is_expected_negative(property),
            ..PropertyStats::default()
        });
        if ok {
            stats.pass += 1;
            return;
        }
        stats.fail += 1;
        if self.counterexamples.iter().filter(|c| c.property == property).count() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(Counterexample {
                property: property.to_string(),
                source: String::new(),
                kb: kb.to_string(),
                detail: detail(),
            });
        }
    }

    pub fn merge(&mut self, other: PropertyReport, source: &str) {
        self.kbs += other.kbs;
        for (k, v) in other.properties {
            let s = self.properties.entry(k).or_insert(PropertyStats { expected_negative: v.expected_negative, ..PropertyStats::default() });
            s.pass += v.pass;
            s.fail += v.fail;
        }
        for mut c in other.counterexamples {
            if self.counterexamples.iter().filter(|x| x.property == c.property).count() < MAX_COUNTEREXAMPLES {
                if c.source.is_empty() {
                    c.source = source.to_string();
                }
                self.counterexamples.push(c);
            }
        }
    }

    pub fn property(&self, name: &str) -> Option<&PropertyStats> {
        self.properties.get(name)
    }

    /// Some property that is expected to hold has a failure.
    pub fn failed(&self) -> bool {
        self.properties.values().any(|s| !s.expected_negative && s.fail > 0)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "rng: {RNG_ALGORITHM}");
        let _ = writeln!(out, "knowledge bases: {}", self.kbs);
        for (name, s) in &self.properties {
            let tag = if s.expected_negative { " (expected-negative)" } else { "" };
            let _ = writeln!(out, "{name:<16} pass {:>8}  fail {:>6}{tag}", s.pass, s.fail);
        }
        for c in &self.counterexamples {
            let _ = writeln!(out, "counterexample {} from {}: {}", c.property, c.source, c.detail);
            for line in c.kb.lines() {
                let _ = writeln!(out, "    {line}");
            }
        }
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(out, "elapsed: {ms} ms");
        }
        let _ = writeln!(out, "result: {}", if self.failed() { "FAIL" } else { "PASS" });
        out
    }

    /// One JSON object per line; keys are sorted.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut line = |v: serde_json::Value| {
            out.push_str(&v.to_string());
            out.push('\n');
        };
        line(json!({"record": "header", "rng": RNG_ALGORITHM, "kbs": self.kbs}));
        for (name, s) in &self.properties {
            line(json!({"record": "property", "name": name, "pass": s.pass, "fail": s.fail, "expected_negative": s.expected_negative}));
        }
        for c in &self.counterexamples {
            line(json!({"record": "counterexample", "property": c.property, "source": c.source, "kb": c.kb, "detail": c.detail}));
        }
        let mut summary = json!({"record": "summary", "result": if self.failed() { "fail" } else { "pass" }});
        if let Some(ms) = self.elapsed_ms {
            summary["elapsed_ms"] = json!(ms as u64);
        }
        line(summary);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Extreme models drawn for soundness sampling.
    pub samples: usize,
    pub sample_seed: u64,
}

impl std::default::Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { samples: 4, sample_seed: 0 }
    }
}

fn negate_literal(e: &Event) -> Event {
    match e {
        Event::Not(inner) => (**inner).clone(),
        other => Event::not(other.clone()),
    }
}

fn atoms_of(e: &Event) -> Vec<usize> {
    let mut v = Vec::new();
    e.collect_atoms(&mut v);
    v
}

struct Suite<'a> {
    engine: &'a Engine,
    kb_text: String,
    report: std::cell::RefCell<PropertyReport>,
    tol: Rational,
}

impl Suite<'_> {
    fn tight(&self, s: Semantics, q: &ConditionalEvent) -> Result<Answer> {
        self.engine.tight(s, q)
    }

    fn show(&self, q: &ConditionalEvent) -> String {
        q.display(&self.engine.kb().atoms).to_string()
    }

    fn entails_unit(&self, s: Semantics, q: &ConditionalEvent) -> Result<bool> {
        self.engine.entails_unit(s, q)
    }

    /// `conclusion ⊆ [l, u]`, widened by the tolerance when `exact` is false.
    fn holds(&self, conclusion: &Answer, l: &Rational, u: &Rational, exact: bool) -> bool {
        if exact {
            conclusion.within(l, u, &self.tol)
        } else {
            conclusion.within(&(l - &self.tol), &(u + &self.tol), &self.tol)
        }
    }

    fn record(&self, property: &str, s: Semantics, ok: bool, detail: impl FnOnce() -> String) {
        self.record_plain(&format!("{property}[{s}]"), ok, detail);
    }

    fn record_plain(&self, name: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.report.borrow_mut().record(name, ok, &self.kb_text, detail);
    }

    fn rw(&self, s: Semantics, family: &QueryFamily) -> Result<()> {
        let n = self.engine.kb().atoms.len();
        for q in family.queries() {
            let t = self.tight(s, &q)?;
            let (l, u) = if t.interval.is_empty() { (Rational::one(), Rational::one()) } else { (t.interval.lower.clone(), t.interval.upper.clone()) };
            let chi_atom = atoms_of(&q.consequent).first().map(|a| (a + 1) % n).unwrap_or(0);
            let weaker = [
                (Event::not(Event::not(q.consequent.clone())), u.clone()),
                (Event::or(q.consequent.clone(), Event::literal(chi_atom, true)), Rational::one()),
            ];
            for (psi, up) in weaker {
                let q2 = ConditionalEvent::new(psi, q.antecedent.clone());
                let c = self.tight(s, &q2)?;
                let ok = self.holds(&c, &l, &up, t.is_exact());
                self.record("RW", s, ok, || format!("{} in [{l}, {u}] but {} = {}", self.show(&q), self.show(&q2), c.interval));
            }
        }
        Ok(())
    }

    fn reflexivity(&self, s: Semantics, family: &QueryFamily) -> Result<()> {
        for e in &family.antecedents {
            let q = ConditionalEvent::new(e.clone(), e.clone());
            let ok = self.entails_unit(s, &q)?;
            self.record("Ref", s, ok, || format!("{} not entailed at [1, 1]", self.show(&q)));
        }
        Ok(())
    }

    fn lle(&self, s: Semantics, family: &QueryFamily) -> Result<()> {
        for q in family.queries() {
            let alt = match &q.antecedent {
                Event::And(x, y) => Event::and((**y).clone(), (**x).clone()),
                Event::Top => Event::not(Event::Bottom),
                other => Event::not(Event::not(other.clone())),
            };
            let q2 = ConditionalEvent::new(q.consequent.clone(), alt);
            let (a, b) = (self.tight(s, &q)?, self.tight(s, &q2)?);
            let ok = a.same_as(&b, &self.tol);
            self.record("LLE", s, ok, || format!("{} = {} but {} = {}", self.show(&q), a.interval, self.show(&q2), b.interval));
        }
        Ok(())
    }

    /// Cut and CM share their premise `(ε|ε')[1,1]`.
    fn cut_cm(&self, s: Semantics, family: &QueryFamily) -> Result<()> {
        for ctx in &family.antecedents {
            let ctx_atoms = atoms_of(ctx);
            for eps in &family.consequents {
                // A conjunct of the context makes both properties a restatement of LLE.
                if atoms_of(eps).iter().all(|a| ctx_atoms.contains(a)) {
                    continue;
                }
                let premise = ConditionalEvent::new(eps.clone(), ctx.clone());
                if !self.entails_unit(s, &premise)? {
                    continue;
                }
                let p_exact = self.tight(s, &premise)?.is_exact();
                let both = Event::and(eps.clone(), ctx.clone());
                for phi in &family.consequents {
                    let q_both = ConditionalEvent::new(phi.clone(), both.clone());
                    let q_ctx = ConditionalEvent::new(phi.clone(), ctx.clone());
                    let (a, b) = (self.tight(s, &q_both)?, self.tight(s, &q_ctx)?);
                    // An empty tight answer entails every interval, so the other side must be empty too.
                    let cut_ok = if a.interval.is_empty() {
                        b.interval.is_empty()
                    } else {
                        self.holds(&b, &a.interval.lower, &a.interval.upper, p_exact && a.is_exact())
                    };
                    self.record("Cut", s, cut_ok, || {
                        format!("{} holds, {} = {} but {} = {}", self.show(&premise), self.show(&q_both), a.interval, self.show(&q_ctx), b.interval)
                    });
                    let cm_ok = if b.interval.is_empty() {
                        a.interval.is_empty()
                    } else {
                        self.holds(&a, &b.interval.lower, &b.interval.upper, p_exact && b.is_exact())
                    };
                    self.record("CM", s, cm_ok, || {
                        format!("{} holds, {} = {} but {} = {}", self.show(&premise), self.show(&q_ctx), b.interval, self.show(&q_both), a.interval)
                    });
                }
            }
        }
        Ok(())
    }

    fn or(&self, s: Semantics, family: &QueryFamily) -> Result<()> {
        for e1 in &family.antecedents {
            for e2 in &family.consequents {
                for phi in &family.consequents {
                    let q1 = ConditionalEvent::new(phi.clone(), e1.clone());
                    let q2 = ConditionalEvent::new(phi.clone(), e2.clone());
                    if !(self.entails_unit(s, &q1)? && self.entails_unit(s, &q2)?) {
                        continue;
                    }
                    let exact = self.tight(s, &q1)?.is_exact() && self.tight(s, &q2)?.is_exact();
                    let q = ConditionalEvent::new(phi.clone(), Event::or(e1.clone(), e2.clone()));
                    let c = self.tight(s, &q)?;
                    let ok = self.holds(&c, &Rational::one(), &Rational::one(), exact);
                    self.record("Or", s, ok, || format!("{} and {} hold but {} = {}", self.show(&q1), self.show(&q2), self.show(&q), c.interval));
                }
            }
        }
        Ok(())
    }

    fn rm(&self, s: Semantics, family: &QueryFamily) -> Result<()> {
        for q in family.queries() {
            if !self.entails_unit(s, &q)? {
                continue;
            }
            let exact = self.tight(s, &q)?.is_exact();
            for e2 in &family.consequents {
                let neg = ConditionalEvent::new(negate_literal(e2), q.antecedent.clone());
                if self.entails_unit(s, &neg)? {
                    continue;
                }
                let q2 = ConditionalEvent::new(q.consequent.clone(), Event::and(q.antecedent.clone(), e2.clone()));
                let c = self.tight(s, &q2)?;
                let ok = self.holds(&c, &Rational::one(), &Rational::one(), exact);
                self.record("RM", s, ok, || format!("{} holds, {} fails, but {} = {}", self.show(&q), self.show(&neg), self.show(&q2), c.interval));
            }
        }
        Ok(())
    }

    fn irr(&self, s: Semantics, family: &QueryFamily, extended: &Engine, fresh: usize) -> Result<()> {
        let kb = self.engine.kb();
        let mut used = Vec::new();
        for l in &kb.logical {
            l.consequent.collect_atoms(&mut used);
            l.antecedent.collect_atoms(&mut used);
        }
        for c in &kb.conditional {
            c.consequent().collect_atoms(&mut used);
            c.antecedent().collect_atoms(&mut used);
        }
        for q in family.queries() {
            if !self.entails_unit(s, &q)? {
                continue;
            }
            let exact = self.tight(s, &q)?.is_exact();
            let mut blocked = used.clone();
            q.consequent.collect_atoms(&mut blocked);
            q.antecedent.collect_atoms(&mut blocked);
            // Declared but unused atoms are irrelevant too.
            let spare: Vec<usize> = (0..kb.atoms.len()).filter(|a| !blocked.contains(a)).collect();
            for a in spare {
                for sign in [true, false] {
                    let q2 = ConditionalEvent::new(q.consequent.clone(), Event::and(q.antecedent.clone(), Event::literal(a, sign)));
                    let c = self.tight(s, &q2)?;
                    let ok = self.holds(&c, &Rational::one(), &Rational::one(), exact);
                    self.record("Irr", s, ok, || format!("{} holds but {} = {}", self.show(&q), self.show(&q2), c.interval));
                }
            }
            for sign in [true, false] {
                let q2 = ConditionalEvent::new(q.consequent.clone(), Event::and(q.antecedent.clone(), Event::literal(fresh, sign)));
                let c = extended.tight(s, &q2)?;
                let ok = self.holds(&c, &Rational::one(), &Rational::one(), exact);
                self.record("Irr", s, ok, || {
                    format!("{} holds but {} = {} with a fresh atom", self.show(&q), q2.display(&extended.kb().atoms), c.interval)
                });
            }
        }
        Ok(())
    }

    fn di(&self, s: Semantics) -> Result<()> {
        let p = self.engine.kb().conditional.clone();
        for c in &p {
            let phi = c.antecedent().clone();
            for eps in [phi.clone(), Event::not(Event::not(phi.clone())), Event::and(phi.clone(), Event::Top)] {
                let q = ConditionalEvent::new(c.consequent().clone(), eps);
                let t = self.tight(s, &q)?;
                let ok = t.within(&c.lower, &c.upper, &self.tol);
                self.record("DI", s, ok, || format!("{} = {} but the constraint says [{}, {}]", self.show(&q), t.interval, c.lower, c.upper));
            }
        }
        Ok(())
    }

    fn chain_and_coincidence(&self, family: &QueryFamily) -> Result<()> {
        for q in family.queries() {
            let [lo, g, z, lex] = Semantics::ALL.map(|s| self.tight(s, &q));
            let (lo, g, z, lex) = (lo?, g?, z?, lex?);
            let ok = lo.subset_of(&lex, &self.tol) && lex.subset_of(&z, &self.tol) && z.subset_of(&g, &self.tol);
            self.record_plain("chain", ok, || {
                format!("{}: logical {} lex {} z {} g {}", self.show(&q), lo.interval, lex.interval, z.interval, g.interval)
            });
            let positive = self.engine.max_prob(&q.antecedent)?.is_some_and(|m| m.value.is_positive());
            if positive {
                let ok = lo.interval == z.interval && z.interval == lex.interval;
                self.record_plain("coincidence", ok, || {
                    format!("{}: logical {} z {} lex {}", self.show(&q), lo.interval, z.interval, lex.interval)
                });
            }
        }
        Ok(())
    }

    /// Witnesses attain the endpoints and model the constraints they were drawn from.
    fn witnesses(&self, family: &QueryFamily) -> Result<()> {
        let kb = self.engine.kb().clone();
        for q in family.queries() {
            for s in [Semantics::Logical, Semantics::Z, Semantics::Lex] {
                let a = self.tight(s, &q)?;
                let Some((wlo, whi)) = &a.witnesses else {
                    continue;
                };
                let sources: Vec<KnowledgeBase> = match s {
                    Semantics::Logical => vec![kb.clone()],
                    Semantics::Z => {
                        let j = self.engine.min_rank(&q.antecedent)?.expect("witness implies finite rank");
                        let z = self.engine.partition_outcome().partition().expect("coherent");
                        vec![kb.restricted(&z.suffix(j))]
                    }
                    _ => self.engine.lex_optimal(&q.antecedent)?.unwrap_or_default().iter().map(|d| kb.restricted(d)).collect(),
                };
                let mut ok = true;
                for (w, target) in [(wlo, &a.interval.lower), (whi, &a.interval.upper)] {
                    ok &= w.cond_prob(&q)?.as_ref() == Some(target);
                    let mut modelled = false;
                    for k in &sources {
                        modelled |= models(w, &k.logical, &k.conditional)?;
                    }
                    ok &= modelled;
                }
                self.record("witness", s, ok, || format!("{}: witness does not attain {} or is not a model", self.show(&q), a.interval));
            }
        }
        Ok(())
    }

    fn soundness(&self, family: &QueryFamily, opts: &SuiteOptions) -> Result<()> {
        if opts.samples == 0 {
            return Ok(());
        }
        let samples = sample_extreme_models(self.engine.kb(), opts.samples, opts.sample_seed)?;
        for q in family.queries() {
            let t = self.tight(Semantics::Logical, &q)?;
            for d in &samples {
                if let Some(v) = d.cond_prob(&q)? {
                    let ok = !t.interval.is_empty() && t.interval.lower <= v && v <= t.interval.upper;
                    self.record_plain("soundness", ok, || {
                        format!("{} = {v} in a model, outside {}", self.show(&q), t.interval)
                    });
                }
            }
        }
        Ok(())
    }
}

pub fn check_property_suite(kb: &KnowledgeBase, family: &QueryFamily) -> Result<PropertyReport> {
    check_property_suite_with(kb, family, &SuiteOptions::default())
}

/// Postulates, the containment chain, coincidence, witness and soundness checks
/// for one knowledge base. Failures are report content, not errors.
pub fn check_property_suite_with(kb: &KnowledgeBase, family: &QueryFamily, opts: &SuiteOptions) -> Result<PropertyReport> {
    let engine = Engine::new(kb.clone())?;
    if !engine.is_gcoherent() {
        return Err(Error::Precondition("property suite needs a g-coherent knowledge base".into()));
    }
    let mut ext_kb = kb.clone();
    let fresh = ext_kb.atoms.push(kb.atoms.fresh_name("x"))?;
    let extended = Engine::new(ext_kb)?;
    let suite = Suite { engine: &engine, kb_text: write_kb(kb), report: std::cell::RefCell::new(PropertyReport { kbs: 1, ..PropertyReport::default() }), tol: engine.options().tolerance.clone() };
    suite.chain_and_coincidence(family)?;
    for s in Semantics::ALL {
        suite.rw(s, family)?;
        suite.reflexivity(s, family)?;
        suite.lle(s, family)?;
        suite.cut_cm(s, family)?;
        suite.or(s, family)?;
        suite.rm(s, family)?;
        suite.irr(s, family, &extended, fresh)?;
        suite.di(s)?;
    }
    suite.witnesses(family)?;
    suite.soundness(family, opts)?;
    Ok(suite.report.into_inner())
}

/// Chain and coincidence only; the cheap part of the suite.
pub fn check_chain(kb: &KnowledgeBase, family: &QueryFamily) -> Result<PropertyReport> {
    let engine = Engine::new(kb.clone())?;
    if !engine.is_gcoherent() {
        return Err(Error::Precondition("chain check needs a g-coherent knowledge base".into()));
    }
    let suite = Suite { engine: &engine, kb_text: write_kb(kb), report: std::cell::RefCell::new(PropertyReport { kbs: 1, ..PropertyReport::default() }), tol: engine.options().tolerance.clone() };
    suite.chain_and_coincidence(family)?;
    Ok(suite.report.into_inner())
}

/// Probabilistic entailment against the classical oracles on the translated
/// knowledge base, over all pairs of `events`. Needs an all-`[1,1]` input.
pub fn check_classical_agreement(kb: &KnowledgeBase, events: &[Event]) -> Result<PropertyReport> {
    let ckb = gamma(kb)?;
    let engine = Engine::new(kb.clone())?;
    let kb_text = write_kb(kb);
    let mut report = PropertyReport { kbs: 1, ..PropertyReport::default() };
    let consistent = classical_z_partition(&ckb)?.is_some();
    report.record("classical-consistency", consistent == engine.is_gcoherent(), &kb_text, || {
        format!("toleration partition succeeds: {consistent}, g-coherent: {}", engine.is_gcoherent())
    });
    let show = |q: &ConditionalEvent| q.display(&kb.atoms).to_string();
    for phi in events {
        for psi in events {
            let q = ConditionalEvent::new(psi.clone(), phi.clone());
            let d = Default::new(psi.clone(), phi.clone());
            if engine.satisfiable() {
                let (a, b) = (engine.entails_unit(Semantics::Logical, &q)?, classical_logical_entails(&ckb, &d)?);
                report.record("classical[logical]", a == b, &kb_text, || format!("{}: probabilistic {a}, classical {b}", show(&q)));
            }
            if consistent && engine.is_gcoherent() {
                let (a, b) = (engine.entails_unit(Semantics::Z, &q)?, classical_z_entails(&ckb, &d)?);
                report.record("classical[z]", a == b, &kb_text, || format!("{}: probabilistic {a}, classical {b}", show(&q)));
                let (a, b) = (engine.entails_unit(Semantics::Lex, &q)?, classical_lex_entails(&ckb, &d)?);
                report.record("classical[lex]", a == b, &kb_text, || format!("{}: probabilistic {a}, classical {b}", show(&q)));
            }
        }
    }
    Ok(report)
}

/// The toleration partition against brute-force enumeration, for small `P`.
pub fn check_oracle_agreement(kb: &KnowledgeBase) -> Result<PropertyReport> {
    let mut report = PropertyReport { kbs: 1, ..PropertyReport::default() };
    if kb.conditional.len() <= ORACLE_CAP {
        let fast = crate::coherence::is_gcoherent(kb)?;
        let slow = gcoherence_oracle(kb)?;
        report.record("oracle", fast == slow, &write_kb(kb), || format!("partition says {fast}, enumeration says {slow}"));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarnessConfig {
    pub seed: u64,
    pub kbs: usize,
    /// Template for each draw; its seed is replaced per knowledge base.
    pub params: GenParams,
    /// Extra knowledge bases, named by where they came from.
    pub fixtures: Vec<(String, KnowledgeBase)>,
    pub suite: SuiteOptions,
    pub timings: bool,
    pub threads: usize,
}

impl std::default::Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            seed: 0,
            kbs: 10,
            params: GenParams::default(),
            fixtures: Vec::new(),
            suite: SuiteOptions::default(),
            timings: false,
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

/// Seeds of the generated corpus, in order.
pub fn corpus_seeds(seed: u64, kbs: usize) -> Vec<u64> {
    (0..kbs as u64).map(|i| seed.wrapping_add(i)).collect()
}

/// Runs `work` over `items` on up to `threads` workers; results keep input order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], threads: usize, work: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.max(1).min(items.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = work(&items[i]);
                results.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every item processed")).collect()
}

/// Generates the corpus and runs the full suite on every member and fixture.
pub fn run_harness(cfg: &HarnessConfig) -> Result<PropertyReport> {
    let start = Instant::now();
    let seeds = corpus_seeds(cfg.seed, cfg.kbs);
    let mut sources: Vec<(String, Option<KnowledgeBase>)> = seeds.iter().map(|s| (format!("seed {s}"), None)).collect();
    sources.extend(cfg.fixtures.iter().map(|(n, k)| (n.clone(), Some(k.clone()))));
    let work: Vec<(usize, &(String, Option<KnowledgeBase>))> = sources.iter().enumerate().collect();
    let results = parallel_map(&work, cfg.threads, |(i, (_, fixture))| -> Result<PropertyReport> {
        let kb = match fixture {
            Some(k) => k.clone(),
            None => random_kb(&GenParams { seed: seeds[*i], ..cfg.params.clone() })?,
        };
        let family = QueryFamily::standard(kb.atoms.len());
        let mut r = check_property_suite_with(&kb, &family, &cfg.suite)?;
        let mut extra = check_oracle_agreement(&kb)?;
        if kb.is_unit() {
            let events = depth2_events(kb.atoms.len().min(3))?;
            extra.merge(check_classical_agreement(&kb, &events)?, "");
        }
        extra.kbs = 0;
        r.merge(extra, "");
        Ok(r)
    });
    let mut report = PropertyReport::default();
    for ((name, _), r) in sources.iter().zip(results) {
        report.merge(r?, name);
    }
    if cfg.timings {
        report.elapsed_ms = Some(start.elapsed().as_millis());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{eval_formula, ProbabilisticFormula};
    use crate::text::{parse_event, parse_kb};

    const KB_A: &str = "atoms: bird penguin fly have_legs\nL: penguin => bird\nP: (have_legs | bird) [1, 1]\nP: (fly | bird) [1, 1]\n";
    const KB_B: &str = "atoms: bird penguin fly have_legs\nL: penguin => bird\nP: (have_legs | bird) [1, 1]\nP: (fly | bird) [1, 1]\nP: (fly | penguin) [0, 1/20]\n";
    const KB_C: &str = "atoms: bird eagle fly\nL: eagle => bird\nP: (fly | bird) [1, 1]\n";
    const KB_D: &str = "atoms: bird fly red\nP: (fly | bird) [1, 1]\n";

    fn suite(src: &str) -> PropertyReport {
        let kb = parse_kb(src).unwrap();
        check_property_suite(&kb, &QueryFamily::standard(kb.atoms.len())).unwrap()
    }

    fn fails(r: &PropertyReport, name: &str) -> u64 {
        r.property(name).map_or(0, |s| s.fail)
    }

    #[test]
    fn generation_is_deterministic_and_coherent() {
        for seed in 0..20 {
            let p = GenParams { seed, ..GenParams::default() };
            let a = random_kb(&p).unwrap();
            assert_eq!(write_kb(&a), write_kb(&random_kb(&p).unwrap()));
            assert!(crate::coherence::is_gcoherent(&a).unwrap());
            assert!(validate_kb(&a).is_empty());
            assert!(a.atoms.len() <= p.num_atoms && a.conditional.len() <= p.num_conditional && a.logical.len() <= p.num_logical);
            let u = random_kb(&GenParams { seed, only_unit_intervals: true, ..GenParams::default() }).unwrap();
            assert!(u.is_unit());
        }
    }

    #[test]
    fn bad_params_and_budget() {
        assert!(matches!(random_kb(&GenParams { num_atoms: 6, ..GenParams::default() }), Err(Error::Precondition(_))));
        assert!(matches!(random_kb(&GenParams { num_logical: 4, ..GenParams::default() }), Err(Error::Precondition(_))));
        let bad_grid = GenParams { bound_grid: vec![Rational::new(3, 2)], ..GenParams::default() };
        assert!(matches!(random_kb(&bad_grid), Err(Error::Precondition(_))));
        let exhausted = (0..50).any(|seed| {
            matches!(
                random_kb(&GenParams { seed, budget: 1, num_conditional: 5, num_logical: 3, ..GenParams::default() }),
                Err(Error::GenerationBudget(1))
            )
        });
        assert!(exhausted);
    }

    #[test]
    fn penguin_suite_passes() {
        let r = suite(KB_A);
        assert!(!r.failed(), "{}", r.to_text());
        for p in ["chain", "coincidence", "RW[g]", "Cut[z]", "CM[lex]", "Or[logical]", "DI[g]", "Irr[z]", "witness[z]", "soundness"] {
            assert!(r.property(p).is_some_and(|s| s.pass > 0), "{p} never exercised");
        }
        assert!(!suite(KB_B).failed());
    }

    #[test]
    fn documented_g_failures() {
        let c = suite(KB_C);
        assert!(fails(&c, "RM[g]") > 0);
        for s in ["RM[logical]", "RM[z]", "RM[lex]"] {
            assert_eq!(fails(&c, s), 0, "{s}");
        }
        assert!(c.counterexamples.iter().any(|x| x.detail.contains("(fly | bird & eagle)")));
        assert!(!c.failed());
        let d = suite(KB_D);
        assert!(fails(&d, "Irr[g]") > 0);
        for s in ["Irr[logical]", "Irr[z]", "Irr[lex]"] {
            assert_eq!(fails(&d, s), 0, "{s}");
        }
        assert!(d.counterexamples.iter().any(|x| x.detail.contains("(fly | bird & red)")));
    }

    #[test]
    fn counterexamples_replay() {
        let r = suite(KB_C);
        for c in &r.counterexamples {
            let kb = parse_kb(&c.kb).unwrap();
            let again = check_property_suite(&kb, &QueryFamily::standard(kb.atoms.len())).unwrap();
            assert!(again.counterexamples.iter().any(|x| x.property == c.property && x.detail == c.detail));
        }
    }

    #[test]
    fn extreme_models() {
        let a = parse_kb(KB_A).unwrap();
        let ms = sample_extreme_models(&a, 5, 1).unwrap();
        assert_eq!(ms.len(), 5);
        for d in &ms {
            for c in &a.conditional {
                assert!(eval_formula(d, &ProbabilisticFormula::Constraint(c.clone())).unwrap());
            }
        }
        let contra = parse_kb("atoms: a\nP: (a | true) [1, 1]\nP: (!a | true) [1, 1]\n").unwrap();
        assert!(matches!(sample_extreme_models(&contra, 3, 0), Err(Error::Precondition(_))));
        let b = parse_kb(KB_B).unwrap();
        let penguin = parse_event(&b.atoms, "penguin").unwrap();
        for d in sample_extreme_models(&b, 10, 2).unwrap() {
            assert!(d.prob(&penguin).unwrap().is_zero());
        }
    }

    #[test]
    fn depth_two_event_counts() {
        // Distinct truth functions, counted independently by bitmask closure.
        assert_eq!(depth2_events(2).unwrap().len(), 14);
        assert_eq!(depth2_events(3).unwrap().len(), 52);
        assert_eq!(depth2_events(4).unwrap().len(), 158);
    }

    #[test]
    fn query_family_shape() {
        let f = QueryFamily::standard(4);
        assert_eq!(f.consequents.len(), 8);
        assert_eq!(f.antecedents.len(), 1 + 8 + 24);
        assert_eq!(f.queries().count(), 8 * 33);
    }

    #[test]
    fn harness_reports_are_deterministic() {
        let cfg = HarnessConfig { seed: 7, kbs: 4, params: GenParams { num_atoms: 3, num_conditional: 3, ..GenParams::default() }, ..HarnessConfig::default() };
        let a = run_harness(&cfg).unwrap();
        let b = run_harness(&HarnessConfig { threads: 1, ..cfg.clone() }).unwrap();
        let c = run_harness(&HarnessConfig { threads: 3, ..cfg.clone() }).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert_eq!(b.to_text(), c.to_text());
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        assert_eq!(a.kbs, 4);
        for line in a.to_jsonl().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.get("record").is_some());
        }
        let timed = run_harness(&HarnessConfig { timings: true, ..cfg }).unwrap();
        assert!(timed.elapsed_ms.is_some() && timed.to_text().contains("elapsed"));
    }

    #[test]
    fn unit_corpus_agrees_with_classical_oracles() {
        for seed in 0..10 {
            let kb = random_kb(&GenParams { seed, num_atoms: 3, only_unit_intervals: true, ..GenParams::default() }).unwrap();
            let r = check_classical_agreement(&kb, &depth2_events(kb.atoms.len()).unwrap()).unwrap();
            assert!(!r.failed(), "{}", r.to_text());
            assert!(r.property("classical[z]").is_some_and(|s| s.pass > 0));
        }
    }
}
