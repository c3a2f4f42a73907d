//! One knowledge base, all four consequence relations, with memoised answers.
//!
//! The free functions in the semantic modules recompile the knowledge base on
//! every call. Batch work (the harness, the CLI with several queries) goes
//! through [`Engine`] instead, which compiles once and caches tight answers
//! keyed by the query as written. Caching by syntax rather than by world mask
//! keeps equivalence checks between differently written queries honest.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::coherence::{gtight_compiled, partition_compiled, GOptions, PartitionOutcome, ZPartition};
use crate::error::{Error, Result};
use crate::kb::{ConditionalConstraint, KnowledgeBase, TightInterval};
use crate::logic::{ConditionalEvent, Event};
use crate::preferential::{lex_optimal_compiled, lex_tight_compiled, min_rank_compiled, z_tight_compiled, DEFAULT_LEX_CAP};
use crate::rational::Rational;
use crate::semantics::{CompiledConstraint, DistributionVector, MaxProb, ModelSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semantics {
    Logical,
    G,
    Z,
    Lex,
}

impl Semantics {
    pub const ALL: [Semantics; 4] = [Semantics::Logical, Semantics::G, Semantics::Z, Semantics::Lex];

    pub fn name(self) -> &'static str {
        match self {
            Semantics::Logical => "logical",
            Semantics::G => "g",
            Semantics::Z => "z",
            Semantics::Lex => "lex",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Semantics::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown semantics `{s}` (expected logical, g, z or lex)"))
    }
}

/// A tight answer under any semantics. Only g answers can be inexact or lack witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub interval: TightInterval,
    pub lower_exact: bool,
    pub upper_exact: bool,
    pub witnesses: Option<(DistributionVector, DistributionVector)>,
}

impl Answer {
    fn exact(interval: TightInterval, witnesses: Option<(DistributionVector, DistributionVector)>) -> Self {
        Answer { interval, lower_exact: true, upper_exact: true, witnesses }
    }

    pub fn is_exact(&self) -> bool {
        self.lower_exact && self.upper_exact
    }

    /// Containment in `[l, u]`, with `tol` slack on inexact endpoints.
    pub fn within(&self, l: &Rational, u: &Rational, tol: &Rational) -> bool {
        if self.interval.is_empty() {
            return true;
        }
        let lo = if self.lower_exact { l.clone() } else { l - tol };
        let hi = if self.upper_exact { u.clone() } else { u + tol };
        lo <= self.interval.lower && self.interval.upper <= hi
    }

    /// `self ⊆ other`, widening `other` by `tol` where either side is inexact.
    pub fn subset_of(&self, other: &Answer, tol: &Rational) -> bool {
        if self.interval.is_empty() {
            return true;
        }
        if other.interval.is_empty() {
            return false;
        }
        let lo_slack = !(self.lower_exact && other.lower_exact);
        let hi_slack = !(self.upper_exact && other.upper_exact);
        let lo = if lo_slack { &other.interval.lower - tol } else { other.interval.lower.clone() };
        let hi = if hi_slack { &other.interval.upper + tol } else { other.interval.upper.clone() };
        lo <= self.interval.lower && self.interval.upper <= hi
    }

    /// Equal endpoints, up to `tol` where either side is inexact.
    pub fn same_as(&self, other: &Answer, tol: &Rational) -> bool {
        match (self.interval.is_empty(), other.interval.is_empty()) {
            (true, true) => true,
            (false, false) => self.subset_of(other, tol) && other.subset_of(self, tol),
            _ => false,
        }
    }
}

pub struct Engine {
    kb: KnowledgeBase,
    ms: ModelSpace,
    p: Vec<CompiledConstraint>,
    satisfiable: bool,
    partition: PartitionOutcome,
    options: GOptions,
    lex_cap: usize,
    answers: RefCell<HashMap<(Semantics, ConditionalEvent), Answer>>,
    ranks: RefCell<HashMap<Event, Option<usize>>>,
    lex_subsets: RefCell<HashMap<Event, Option<Vec<Vec<usize>>>>>,
}

impl Engine {
    pub fn new(kb: KnowledgeBase) -> Result<Self> {
        Self::with_options(kb, GOptions::default())
    }

    pub fn with_options(kb: KnowledgeBase, options: GOptions) -> Result<Self> {
        kb.check_events()?;
        let ms = ModelSpace::for_kb(&kb)?;
        let p = ms.compile_all(&kb.conditional)?;
        let satisfiable = ms.satisfiable(&p)?;
        let partition = partition_compiled(&ms, &p)?;
        Ok(Engine {
            kb,
            ms,
            p,
            satisfiable,
            partition,
            options,
            lex_cap: DEFAULT_LEX_CAP,
            answers: RefCell::default(),
            ranks: RefCell::default(),
            lex_subsets: RefCell::default(),
        })
    }

    pub fn with_lex_cap(mut self, cap: usize) -> Self {
        self.lex_cap = cap;
        self
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn model_space(&self) -> &ModelSpace {
        &self.ms
    }

    pub fn options(&self) -> &GOptions {
        &self.options
    }

    pub fn satisfiable(&self) -> bool {
        self.satisfiable
    }

    pub fn partition_outcome(&self) -> &PartitionOutcome {
        &self.partition
    }

    pub fn is_gcoherent(&self) -> bool {
        self.partition.is_coherent()
    }

    fn zpartition(&self) -> Result<&ZPartition> {
        self.partition
            .partition()
            .ok_or_else(|| Error::Precondition("knowledge base is not g-coherent".into()))
    }

    /// Maximum of `Pr(φ)` over the models of the knowledge base.
    pub fn max_prob(&self, phi: &Event) -> Result<Option<MaxProb>> {
        self.ms.max_prob(&self.p, &self.ms.mask(phi)?)
    }

    /// Smallest level `j` with a model of `L ∪ P_{≥j}` giving `φ` positive probability.
    pub fn min_rank(&self, phi: &Event) -> Result<Option<usize>> {
        if let Some(r) = self.ranks.borrow().get(phi) {
            return Ok(*r);
        }
        let z = self.zpartition()?;
        let r = min_rank_compiled(&self.ms, &self.p, z, &self.ms.mask(phi)?)?;
        self.ranks.borrow_mut().insert(phi.clone(), r);
        Ok(r)
    }

    /// Lex-optimal subsets of `P` for antecedent `φ`; `None` if no model gives `φ` positive probability.
    pub fn lex_optimal(&self, phi: &Event) -> Result<Option<Vec<Vec<usize>>>> {
        if let Some(r) = self.lex_subsets.borrow().get(phi) {
            return Ok(r.clone());
        }
        let z = self.zpartition()?;
        let r = lex_optimal_compiled(&self.ms, &self.p, z, &self.ms.mask(phi)?, self.lex_cap)?;
        self.lex_subsets.borrow_mut().insert(phi.clone(), r.clone());
        Ok(r)
    }

    pub fn tight(&self, sem: Semantics, q: &ConditionalEvent) -> Result<Answer> {
        let key = (sem, q.clone());
        if let Some(a) = self.answers.borrow().get(&key) {
            return Ok(a.clone());
        }
        let qm = self.ms.query(q)?;
        let answer = match sem {
            Semantics::Logical => {
                if !self.satisfiable {
                    return Err(Error::Precondition("knowledge base is unsatisfiable".into()));
                }
                let t = self.ms.tight(&self.p, &qm)?;
                Answer::exact(t.interval, t.witnesses)
            }
            Semantics::G => {
                let g = gtight_compiled(&self.ms, &self.p, self.zpartition()?, &qm, &self.options)?;
                Answer { interval: g.interval, lower_exact: g.lower_exact, upper_exact: g.upper_exact, witnesses: None }
            }
            Semantics::Z => {
                let z = self.zpartition()?;
                let j = self.min_rank(&q.antecedent)?;
                let t = z_tight_compiled(&self.ms, &self.p, z, j, &qm)?;
                Answer::exact(t.interval, t.witnesses)
            }
            Semantics::Lex => {
                let optimal = self.lex_optimal(&q.antecedent)?;
                let (t, _) = lex_tight_compiled(&self.ms, &self.p, optimal.as_deref(), &qm)?;
                Answer::exact(t.interval, t.witnesses)
            }
        };
        self.answers.borrow_mut().insert(key, answer.clone());
        Ok(answer)
    }

    pub fn entails(&self, sem: Semantics, c: &ConditionalConstraint) -> Result<bool> {
        Ok(self.tight(sem, &c.cond)?.within(&c.lower, &c.upper, &self.options.tolerance))
    }

    /// Shorthand for entailment of `(ψ|φ)[1,1]`.
    pub fn entails_unit(&self, sem: Semantics, q: &ConditionalEvent) -> Result<bool> {
        self.entails(sem, &ConditionalConstraint::from_event(q.clone(), Rational::one(), Rational::one()))
    }
}
