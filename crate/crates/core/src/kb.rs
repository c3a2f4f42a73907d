//! Knowledge bases of logical and interval conditional constraints.

use std::fmt;

use crate::error::Result;
use crate::logic::{equivalent_in, AtomTable, ConditionalEvent, Event, WorldSet, WorldSpace, DEFAULT_ATOM_CAP};
use crate::rational::Rational;

/// The logical constraint `consequent ⇐ antecedent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalConstraint {
    pub consequent: Event,
    pub antecedent: Event,
}

impl LogicalConstraint {
    pub fn new(consequent: Event, antecedent: Event) -> Self {
        LogicalConstraint { consequent, antecedent }
    }

    /// The event that every model gives probability zero.
    pub fn violation(&self) -> Event {
        Event::and(self.antecedent.clone(), Event::not(self.consequent.clone()))
    }
}

/// `(consequent | antecedent)[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConditionalConstraint {
    pub cond: ConditionalEvent,
    pub lower: Rational,
    pub upper: Rational,
}

impl ConditionalConstraint {
    pub fn new(consequent: Event, antecedent: Event, lower: Rational, upper: Rational) -> Self {
        ConditionalConstraint { cond: ConditionalEvent::new(consequent, antecedent), lower, upper }
    }

    pub fn from_event(cond: ConditionalEvent, lower: Rational, upper: Rational) -> Self {
        ConditionalConstraint { cond, lower, upper }
    }

    pub fn unit(consequent: Event, antecedent: Event) -> Self {
        Self::new(consequent, antecedent, Rational::one(), Rational::one())
    }

    pub fn consequent(&self) -> &Event {
        &self.cond.consequent
    }

    pub fn antecedent(&self) -> &Event {
        &self.cond.antecedent
    }

    pub fn is_unit(&self) -> bool {
        self.lower.is_one() && self.upper.is_one()
    }

    pub fn display<'a>(&'a self, atoms: &'a AtomTable) -> impl fmt::Display + 'a {
        crate::logic::DisplayWith(move |f: &mut fmt::Formatter<'_>| {
            write!(f, "{} [{}, {}]", self.cond.display(atoms), self.lower, self.upper)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub atoms: AtomTable,
    pub logical: Vec<LogicalConstraint>,
    pub conditional: Vec<ConditionalConstraint>,
    /// Whether two members of `conditional` on equivalent conditional events
    /// are a well-formedness violation. Augmented internal KBs turn this off;
    /// repeated conditional events then mean the conjunction of their bounds.
    pub strict_distinctness: bool,
}

impl KnowledgeBase {
    pub fn new(atoms: AtomTable) -> Self {
        KnowledgeBase { atoms, logical: Vec::new(), conditional: Vec::new(), strict_distinctness: true }
    }

    pub fn with_constraints(atoms: AtomTable, logical: Vec<LogicalConstraint>, conditional: Vec<ConditionalConstraint>) -> Self {
        KnowledgeBase { atoms, logical, conditional, strict_distinctness: true }
    }

    /// `P ∪ {c}` with relaxed distinctness.
    pub fn augmented(&self, c: ConditionalConstraint) -> KnowledgeBase {
        let mut kb = self.clone();
        kb.conditional.push(c);
        kb.strict_distinctness = false;
        kb
    }

    /// The same L with only the listed members of P.
    pub fn restricted(&self, indices: &[usize]) -> KnowledgeBase {
        KnowledgeBase {
            atoms: self.atoms.clone(),
            logical: self.logical.clone(),
            conditional: indices.iter().map(|i| self.conditional[*i].clone()).collect(),
            strict_distinctness: self.strict_distinctness,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.conditional.iter().all(ConditionalConstraint::is_unit)
    }

    pub fn check_events(&self) -> Result<()> {
        let n = self.atoms.len();
        for l in &self.logical {
            l.consequent.check(n)?;
            l.antecedent.check(n)?;
        }
        for c in &self.conditional {
            c.consequent().check(n)?;
            c.antecedent().check(n)?;
        }
        Ok(())
    }
}

/// A closed rational interval, or the empty interval encoded as `(1, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TightInterval {
    pub lower: Rational,
    pub upper: Rational,
}

impl TightInterval {
    pub fn new(lower: Rational, upper: Rational) -> Self {
        debug_assert!(lower <= upper || (lower.is_one() && upper.is_zero()));
        TightInterval { lower, upper }
    }

    pub fn empty() -> Self {
        TightInterval { lower: Rational::one(), upper: Rational::zero() }
    }

    pub fn unit() -> Self {
        TightInterval { lower: Rational::zero(), upper: Rational::one() }
    }

    pub fn is_empty(&self) -> bool {
        self.lower > self.upper
    }

    /// Containment in `[l, u]`; the empty interval is contained in everything.
    pub fn within(&self, l: &Rational, u: &Rational) -> bool {
        self.is_empty() || (l <= &self.lower && &self.upper <= u)
    }

    pub fn subset_of(&self, other: &TightInterval) -> bool {
        self.is_empty() || (!other.is_empty() && self.within(&other.lower, &other.upper))
    }

    /// Containment after widening `other` by `slack` on both sides.
    pub fn subset_of_with_slack(&self, other: &TightInterval, slack: &Rational) -> bool {
        self.is_empty()
            || (!other.is_empty() && self.within(&(&other.lower - slack), &(&other.upper + slack)))
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &TightInterval) -> TightInterval {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        TightInterval {
            lower: self.lower.clone().min(other.lower.clone()),
            upper: self.upper.clone().max(other.upper.clone()),
        }
    }
}

impl fmt::Display for TightInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "empty [{}, {}]", self.lower, self.upper)
        } else {
            write!(f, "[{}, {}]", self.lower, self.upper)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Condition (i): `lower > upper`.
    IntervalOrder { index: usize },
    /// A bound outside `[0, 1]`.
    BoundRange { index: usize },
    /// Condition (ii): two constraints on equivalent conditional events.
    NotDistinct { first: usize, second: usize },
    AtomCap { cap: usize, actual: usize },
    AtomIndex { message: String },
}

impl Violation {
    pub fn describe(&self, kb: &KnowledgeBase) -> String {
        let show = |i: usize| kb.conditional[i].display(&kb.atoms).to_string();
        match self {
            Violation::IntervalOrder { index } => format!("lower bound exceeds upper bound in {}", show(*index)),
            Violation::BoundRange { index } => format!("bound outside [0, 1] in {}", show(*index)),
            Violation::NotDistinct { first, second } => {
                format!("{} and {} constrain equivalent conditional events", show(*first), show(*second))
            }
            Violation::AtomCap { cap, actual } => format!("{actual} atoms declared, cap is {cap}"),
            Violation::AtomIndex { message } => message.clone(),
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Violation::AtomCap { .. })
    }
}

pub fn validate_kb(kb: &KnowledgeBase) -> Vec<Violation> {
    validate_kb_with_cap(kb, DEFAULT_ATOM_CAP)
}

/// Collects every well-formedness violation instead of stopping at the first.
pub fn validate_kb_with_cap(kb: &KnowledgeBase, cap: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    if kb.atoms.len() > cap {
        out.push(Violation::AtomCap { cap, actual: kb.atoms.len() });
    }
    let events_ok = match kb.check_events() {
        Ok(()) => true,
        Err(e) => {
            out.push(Violation::AtomIndex { message: e.to_string() });
            false
        }
    };
    let zero = Rational::zero();
    let one = Rational::one();
    for (i, c) in kb.conditional.iter().enumerate() {
        if c.lower > c.upper {
            out.push(Violation::IntervalOrder { index: i });
        }
        if c.lower < zero || c.upper > one {
            out.push(Violation::BoundRange { index: i });
        }
    }
    if kb.strict_distinctness && events_ok && kb.atoms.len() <= cap {
        if let Ok(space) = WorldSpace::with_cap(kb.atoms.len(), cap) {
            for i in 0..kb.conditional.len() {
                for j in i + 1..kb.conditional.len() {
                    let (a, b) = (&kb.conditional[i].cond, &kb.conditional[j].cond);
                    let same_ante = equivalent_in(&space, &a.antecedent, &b.antecedent).unwrap_or(false);
                    let same_both = same_ante
                        && equivalent_in(
                            &space,
                            &Event::and(a.consequent.clone(), a.antecedent.clone()),
                            &Event::and(b.consequent.clone(), b.antecedent.clone()),
                        )
                        .unwrap_or(false);
                    if same_both {
                        out.push(Violation::NotDistinct { first: i, second: j });
                    }
                }
            }
        }
    }
    out
}

/// Worlds that every model of `logical` assigns probability zero.
pub fn zero_worlds(logical: &[LogicalConstraint], space: &WorldSpace) -> Result<WorldSet> {
    let mut out = WorldSet::empty(space.len());
    for l in logical {
        out = out.or(&space.mask(&l.violation())?);
    }
    Ok(out)
}
