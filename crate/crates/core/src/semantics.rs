//! Models of knowledge bases as linear programs over worlds.
//!
//! A model of `(L, P)` is a distribution vanishing on the zero worlds of `L`
//! and satisfying, for each `(ψ|φ)[l,u]`, the homogeneous pair
//! `l·Pr(φ) ≤ Pr(ψ∧φ) ≤ u·Pr(φ)`. Queries that condition on `φ` use the
//! Charnes–Cooper form: drop `Σ x = 1`, add `Σ_{w⊨φ} y_w = 1`.
//!
//! Internally worlds that no constraint or query can tell apart are merged
//! into cells, which keeps the programs small; witnesses put a cell's mass
//! on its first world.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::kb::{zero_worlds, ConditionalConstraint, KnowledgeBase, LogicalConstraint, TightInterval};
use crate::logic::{eval_event, AtomTable, ConditionalEvent, Event, World, WorldSet, WorldSpace, DEFAULT_ATOM_CAP};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Relation, Sense};
use crate::rational::Rational;

/// An explicit probability function, indexed by world.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DistributionVector {
    num_atoms: usize,
    masses: Vec<Rational>,
}

impl DistributionVector {
    pub fn new(num_atoms: usize, masses: Vec<Rational>) -> Result<Self> {
        if masses.len() != 1usize << num_atoms {
            return Err(Error::Precondition(format!(
                "{} masses given for {} worlds",
                masses.len(),
                1usize << num_atoms
            )));
        }
        if masses.iter().any(Rational::is_negative) {
            return Err(Error::Precondition("negative probability mass".into()));
        }
        if masses.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::Precondition("masses do not sum to 1".into()));
        }
        Ok(DistributionVector { num_atoms, masses })
    }

    pub fn point(num_atoms: usize, world: usize) -> Self {
        let mut masses = vec![Rational::zero(); 1usize << num_atoms];
        masses[world] = Rational::one();
        DistributionVector { num_atoms, masses }
    }

    pub fn num_atoms(&self) -> usize {
        self.num_atoms
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn mass(&self, world: usize) -> &Rational {
        &self.masses[world]
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.masses.iter().enumerate().filter(|(_, m)| !m.is_zero())
    }

    pub fn prob_of(&self, set: &WorldSet) -> Rational {
        set.iter().map(|w| &self.masses[w]).sum()
    }

    /// `Pr(e)`, by evaluating `e` in every world of the support.
    pub fn prob(&self, e: &Event) -> Result<Rational> {
        let mut total = Rational::zero();
        for (w, m) in self.support() {
            if eval_event(&World::new(w, self.num_atoms), e)? {
                total += m;
            }
        }
        Ok(total)
    }

    /// `Pr(ψ|φ)`, or `None` when `Pr(φ) = 0`.
    pub fn cond_prob(&self, q: &ConditionalEvent) -> Result<Option<Rational>> {
        let phi = self.prob(&q.antecedent)?;
        if phi.is_zero() {
            return Ok(None);
        }
        let both = self.prob(&Event::and(q.consequent.clone(), q.antecedent.clone()))?;
        Ok(Some(&both / &phi))
    }

    pub fn display<'a>(&'a self, atoms: &'a AtomTable) -> impl fmt::Display + 'a {
        crate::logic::DisplayWith(move |f: &mut fmt::Formatter<'_>| {
            let mut first = true;
            for (w, m) in self.support() {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "{}: {m}", World::new(w, self.num_atoms).describe(atoms))?;
            }
            Ok(())
        })
    }
}

/// Boolean combinations of conditional constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbabilisticFormula {
    Constraint(ConditionalConstraint),
    Not(Box<ProbabilisticFormula>),
    And(Box<ProbabilisticFormula>, Box<ProbabilisticFormula>),
}

impl ProbabilisticFormula {
    /// `φ > 0`, i.e. `¬(φ|⊤)[0,0]`.
    pub fn positivity(phi: Event) -> Self {
        ProbabilisticFormula::negate(ProbabilisticFormula::Constraint(ConditionalConstraint::new(
            phi,
            Event::Top,
            Rational::zero(),
            Rational::zero(),
        )))
    }

    pub fn negate(f: ProbabilisticFormula) -> Self {
        ProbabilisticFormula::Not(Box::new(f))
    }

    pub fn and(a: ProbabilisticFormula, b: ProbabilisticFormula) -> Self {
        ProbabilisticFormula::And(Box::new(a), Box::new(b))
    }
}

/// `Pr(φ) = 0` or `Pr(ψ|φ) ∈ [l, u]`.
pub fn satisfies(d: &DistributionVector, c: &ConditionalConstraint) -> Result<bool> {
    Ok(match d.cond_prob(&c.cond)? {
        None => true,
        Some(p) => c.lower <= p && p <= c.upper,
    })
}

/// `Pr(ψ ∧ φ) = Pr(φ)`.
pub fn satisfies_logical(d: &DistributionVector, l: &LogicalConstraint) -> Result<bool> {
    Ok(d.prob(&Event::and(l.consequent.clone(), l.antecedent.clone()))? == d.prob(&l.antecedent)?)
}

pub fn models(d: &DistributionVector, logical: &[LogicalConstraint], conditional: &[ConditionalConstraint]) -> Result<bool> {
    for l in logical {
        if !satisfies_logical(d, l)? {
            return Ok(false);
        }
    }
    for c in conditional {
        if !satisfies(d, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn eval_formula(d: &DistributionVector, f: &ProbabilisticFormula) -> Result<bool> {
    match f {
        ProbabilisticFormula::Constraint(c) => satisfies(d, c),
        ProbabilisticFormula::Not(inner) => Ok(!eval_formula(d, inner)?),
        ProbabilisticFormula::And(a, b) => Ok(eval_formula(d, a)? && eval_formula(d, b)?),
    }
}

pub fn verifies(d: &DistributionVector, c: &ConditionalConstraint) -> Result<bool> {
    Ok(d.prob(c.antecedent())?.is_positive() && satisfies(d, c)?)
}

pub fn falsifies(d: &DistributionVector, c: &ConditionalConstraint) -> Result<bool> {
    Ok(d.prob(c.antecedent())?.is_positive() && !satisfies(d, c)?)
}

/// A conditional constraint as world masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledConstraint {
    /// Worlds satisfying `ψ ∧ φ`.
    pub both: WorldSet,
    /// Worlds satisfying `φ`.
    pub ante: WorldSet,
    pub lower: Rational,
    pub upper: Rational,
}

impl CompiledConstraint {
    /// 0 outside `φ`, 1 on `ψ∧φ`, 2 on `¬ψ∧φ`.
    fn category(&self, w: usize) -> u8 {
        if !self.ante.contains(w) {
            0
        } else if self.both.contains(w) {
            1
        } else {
            2
        }
    }

    /// A world the constraint forces to probability zero.
    fn forbids(&self, w: usize) -> bool {
        match self.category(w) {
            1 => self.upper.is_zero(),
            2 => self.lower.is_one(),
            _ => false,
        }
    }

    /// Whether the point mass on `w` satisfies the constraint.
    fn point_ok(&self, w: usize) -> bool {
        match self.category(w) {
            1 => self.upper.is_one(),
            2 => self.lower.is_zero(),
            _ => true,
        }
    }

    pub fn with_bounds(&self, lower: Rational, upper: Rational) -> CompiledConstraint {
        CompiledConstraint { both: self.both.clone(), ante: self.ante.clone(), lower, upper }
    }
}

/// Masks of a conditional event `ψ|φ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryMasks {
    pub both: WorldSet,
    pub ante: WorldSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightResult {
    pub interval: TightInterval,
    /// Models attaining the lower and upper bound, when the interval is nonempty.
    pub witnesses: Option<(DistributionVector, DistributionVector)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxProb {
    pub value: Rational,
    pub witness: DistributionVector,
}

struct Cells {
    /// Representative (first) world of each cell.
    reps: Vec<usize>,
    /// Per cell: category under each constraint, then membership in each extra mask.
    sigs: Vec<Vec<u8>>,
}

/// The world space of an atom table together with the zero worlds of `L`.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    space: WorldSpace,
    allowed: WorldSet,
}

impl ModelSpace {
    pub fn new(atoms: &AtomTable, logical: &[LogicalConstraint]) -> Result<Self> {
        Self::with_cap(atoms, logical, DEFAULT_ATOM_CAP)
    }

    pub fn with_cap(atoms: &AtomTable, logical: &[LogicalConstraint], cap: usize) -> Result<Self> {
        let space = WorldSpace::with_cap(atoms.len(), cap)?;
        let allowed = zero_worlds(logical, &space)?.complement();
        Ok(ModelSpace { space, allowed })
    }

    pub fn for_kb(kb: &KnowledgeBase) -> Result<Self> {
        Self::new(&kb.atoms, &kb.logical)
    }

    pub fn space(&self) -> &WorldSpace {
        &self.space
    }

    pub fn num_atoms(&self) -> usize {
        self.space.num_atoms()
    }

    /// Worlds not pinned to zero by `L`.
    pub fn allowed(&self) -> &WorldSet {
        &self.allowed
    }

    pub fn mask(&self, e: &Event) -> Result<WorldSet> {
        self.space.mask(e)
    }

    pub fn compile(&self, c: &ConditionalConstraint) -> Result<CompiledConstraint> {
        let q = self.query(&c.cond)?;
        Ok(CompiledConstraint { both: q.both, ante: q.ante, lower: c.lower.clone(), upper: c.upper.clone() })
    }

    pub fn compile_all(&self, cs: &[ConditionalConstraint]) -> Result<Vec<CompiledConstraint>> {
        cs.iter().map(|c| self.compile(c)).collect()
    }

    pub fn query(&self, q: &ConditionalEvent) -> Result<QueryMasks> {
        let ante = self.mask(&q.antecedent)?;
        let both = self.mask(&q.consequent)?.and(&ante);
        Ok(QueryMasks { both, ante })
    }

    fn usable(&self, p: &[CompiledConstraint], w: usize) -> bool {
        self.allowed.contains(w) && !p.iter().any(|c| c.forbids(w))
    }

    fn cells(&self, p: &[CompiledConstraint], extra: &[&WorldSet]) -> Cells {
        let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
        let mut cells = Cells { reps: Vec::new(), sigs: Vec::new() };
        for w in self.allowed.iter() {
            if p.iter().any(|c| c.forbids(w)) {
                continue;
            }
            let sig: Vec<u8> = p
                .iter()
                .map(|c| c.category(w))
                .chain(extra.iter().map(|m| m.contains(w) as u8))
                .collect();
            if !index.contains_key(&sig) {
                index.insert(sig.clone(), cells.reps.len());
                cells.reps.push(w);
                cells.sigs.push(sig);
            }
        }
        cells
    }

    /// Constraint rows over cells.
    fn cell_lp(p: &[CompiledConstraint], cells: &Cells) -> LinearProgram {
        let mut lp = LinearProgram::new(cells.reps.len());
        let one = Rational::one();
        for (i, c) in p.iter().enumerate() {
            if c.lower.is_positive() && c.lower < one {
                let lo_in = &one - &c.lower;
                let lo_out = -&c.lower;
                let row: Vec<(usize, Rational)> = cells
                    .sigs
                    .iter()
                    .enumerate()
                    .filter_map(|(k, s)| match s[i] {
                        1 => Some((k, lo_in.clone())),
                        2 => Some((k, lo_out.clone())),
                        _ => None,
                    })
                    .collect();
                if row.iter().any(|(_, a)| a.is_negative()) {
                    lp.push(row, Relation::Ge, Rational::zero());
                }
            }
            if c.upper.is_positive() && c.upper < one {
                let up_in = &one - &c.upper;
                let up_out = -&c.upper;
                let row: Vec<(usize, Rational)> = cells
                    .sigs
                    .iter()
                    .enumerate()
                    .filter_map(|(k, s)| match s[i] {
                        1 => Some((k, up_in.clone())),
                        2 => Some((k, up_out.clone())),
                        _ => None,
                    })
                    .collect();
                if row.iter().any(|(_, a)| a.is_positive()) {
                    lp.push(row, Relation::Le, Rational::zero());
                }
            }
        }
        lp
    }

    fn distribution(&self, cells: &Cells, y: &[Rational]) -> DistributionVector {
        let total: Rational = y.iter().sum();
        let mut masses = vec![Rational::zero(); self.space.len()];
        for (k, v) in y.iter().enumerate() {
            if !v.is_zero() {
                masses[cells.reps[k]] = v / &total;
            }
        }
        DistributionVector { num_atoms: self.num_atoms(), masses }
    }

    fn selector(cells: &Cells, pos: usize) -> Vec<(usize, Rational)> {
        cells
            .sigs
            .iter()
            .enumerate()
            .filter(|(_, s)| s[pos] == 1)
            .map(|(k, _)| (k, Rational::one()))
            .collect()
    }

    pub fn satisfiable(&self, p: &[CompiledConstraint]) -> Result<bool> {
        if self.allowed.iter().any(|w| self.usable(p, w) && p.iter().all(|c| c.point_ok(w))) {
            return Ok(true);
        }
        let cells = self.cells(p, &[]);
        let mut lp = Self::cell_lp(p, &cells);
        lp.push((0..cells.reps.len()).map(|k| (k, Rational::one())).collect(), Relation::Eq, Rational::one());
        Ok(matches!(solve_lp(&lp, &[], Sense::Minimize)?, LpOutcome::Optimal(_)))
    }

    /// Whether some model of `L ∪ p` gives `phi` positive probability.
    pub fn positive_possible(&self, p: &[CompiledConstraint], phi: &WorldSet) -> Result<bool> {
        if phi
            .iter()
            .any(|w| self.usable(p, w) && p.iter().all(|c| c.point_ok(w)))
        {
            return Ok(true);
        }
        let cells = self.cells(p, &[phi]);
        let mut lp = Self::cell_lp(p, &cells);
        let norm = Self::selector(&cells, p.len());
        if norm.is_empty() {
            return Ok(false);
        }
        lp.push(norm, Relation::Eq, Rational::one());
        Ok(matches!(solve_lp(&lp, &[], Sense::Minimize)?, LpOutcome::Optimal(_)))
    }

    /// Some model of `L ∪ p ∪ {c}` verifies `c`.
    pub fn tolerates(&self, p: &[CompiledConstraint], c: &CompiledConstraint) -> Result<bool> {
        let mut all = p.to_vec();
        all.push(c.clone());
        self.positive_possible(&all, &c.ante)
    }

    /// Maximum of `Pr(phi)` over models of `L ∪ p`; `None` if there are none.
    pub fn max_prob(&self, p: &[CompiledConstraint], phi: &WorldSet) -> Result<Option<MaxProb>> {
        let cells = self.cells(p, &[phi]);
        let mut lp = Self::cell_lp(p, &cells);
        lp.push((0..cells.reps.len()).map(|k| (k, Rational::one())).collect(), Relation::Eq, Rational::one());
        let objective = Self::selector(&cells, p.len());
        match solve_lp(&lp, &objective, Sense::Maximize)? {
            LpOutcome::Optimal(sol) => Ok(Some(MaxProb {
                witness: self.distribution(&cells, &sol.witness),
                value: sol.value,
            })),
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(Error::Inconsistency("probability mass unbounded".into())),
        }
    }

    /// Tight bounds of `Pr(ψ|φ)` over models of `L ∪ p` with `Pr(φ) > 0`.
    /// Assumes `L ∪ p` is satisfiable; otherwise the result reads as empty.
    pub fn tight(&self, p: &[CompiledConstraint], q: &QueryMasks) -> Result<TightResult> {
        let cells = self.cells(p, &[&q.ante, &q.both]);
        let mut lp = Self::cell_lp(p, &cells);
        let norm = Self::selector(&cells, p.len());
        if norm.is_empty() {
            return Ok(TightResult { interval: TightInterval::empty(), witnesses: None });
        }
        lp.push(norm, Relation::Eq, Rational::one());
        let objective = Self::selector(&cells, p.len() + 1);
        let lo = match solve_lp(&lp, &objective, Sense::Minimize)? {
            LpOutcome::Optimal(sol) => sol,
            LpOutcome::Infeasible => return Ok(TightResult { interval: TightInterval::empty(), witnesses: None }),
            LpOutcome::Unbounded => return Err(Error::Inconsistency("conditional probability unbounded".into())),
        };
        let hi = match solve_lp(&lp, &objective, Sense::Maximize)? {
            LpOutcome::Optimal(sol) => sol,
            _ => return Err(Error::Inconsistency("maximisation failed on a feasible system".into())),
        };
        Ok(TightResult {
            interval: TightInterval::new(lo.value, hi.value),
            witnesses: Some((self.distribution(&cells, &lo.witness), self.distribution(&cells, &hi.witness))),
        })
    }

    /// Optimises a per-world linear objective over the models of `L ∪ p`.
    pub fn optimize(&self, p: &[CompiledConstraint], weights: &[Rational], sense: Sense) -> Result<Option<DistributionVector>> {
        let lp = self.encode_compiled(p);
        let objective: Vec<(usize, Rational)> =
            weights.iter().cloned().enumerate().filter(|(_, a)| !a.is_zero()).collect();
        match solve_lp(&lp, &objective, sense)? {
            LpOutcome::Optimal(sol) => Ok(Some(DistributionVector { num_atoms: self.num_atoms(), masses: sol.witness })),
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(Error::Inconsistency("probability mass unbounded".into())),
        }
    }

    /// The world-level program: one variable per world.
    pub fn encode_compiled(&self, p: &[CompiledConstraint]) -> LinearProgram {
        let n = self.space.len();
        let mut lp = LinearProgram::new(n);
        for w in 0..n {
            if !self.allowed.contains(w) {
                lp.push(vec![(w, Rational::one())], Relation::Eq, Rational::zero());
            }
        }
        lp.push((0..n).map(|w| (w, Rational::one())).collect(), Relation::Eq, Rational::one());
        let one = Rational::one();
        for c in p {
            for (bound, relation) in [(&c.lower, Relation::Ge), (&c.upper, Relation::Le)] {
                let inside = &one - bound;
                let outside = -bound;
                let row: Vec<(usize, Rational)> = c
                    .ante
                    .iter()
                    .map(|w| (w, if c.both.contains(w) { inside.clone() } else { outside.clone() }))
                    .filter(|(_, a)| !a.is_zero())
                    .collect();
                lp.push(row, relation, Rational::zero());
            }
        }
        lp
    }
}

/// The world-level program whose feasible points are the models of `L ∪ P`.
pub fn encode(atoms: &AtomTable, logical: &[LogicalConstraint], conditional: &[ConditionalConstraint]) -> Result<LinearProgram> {
    let ms = ModelSpace::new(atoms, logical)?;
    let p = ms.compile_all(conditional)?;
    Ok(ms.encode_compiled(&p))
}

fn setup(kb: &KnowledgeBase) -> Result<(ModelSpace, Vec<CompiledConstraint>)> {
    let ms = ModelSpace::for_kb(kb)?;
    let p = ms.compile_all(&kb.conditional)?;
    Ok((ms, p))
}

pub fn satisfiable(kb: &KnowledgeBase) -> Result<bool> {
    let (ms, p) = setup(kb)?;
    ms.satisfiable(&p)
}

pub fn max_prob(kb: &KnowledgeBase, phi: &Event) -> Result<Rational> {
    let (ms, p) = setup(kb)?;
    match ms.max_prob(&p, &ms.mask(phi)?)? {
        Some(m) => Ok(m.value),
        None => Err(Error::Precondition("knowledge base is unsatisfiable".into())),
    }
}

/// Whether the conditional constraints of `kb` tolerate `c` under its logical constraints.
pub fn tolerates(kb: &KnowledgeBase, c: &ConditionalConstraint) -> Result<bool> {
    let (ms, p) = setup(kb)?;
    ms.tolerates(&p, &ms.compile(c)?)
}

pub fn tight_logical(kb: &KnowledgeBase, q: &ConditionalEvent) -> Result<TightResult> {
    let (ms, p) = setup(kb)?;
    if !ms.satisfiable(&p)? {
        return Err(Error::Precondition("knowledge base is unsatisfiable".into()));
    }
    ms.tight(&p, &ms.query(q)?)
}

pub fn entails_logical(kb: &KnowledgeBase, c: &ConditionalConstraint) -> Result<bool> {
    Ok(tight_logical(kb, &c.cond)?.interval.within(&c.lower, &c.upper))
}
