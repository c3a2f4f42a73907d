//! Toleration partitions, g-coherence and g-coherent consequence.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::kb::{ConditionalConstraint, KnowledgeBase, TightInterval};
use crate::logic::ConditionalEvent;
use crate::rational::Rational;
use crate::semantics::{CompiledConstraint, ModelSpace, QueryMasks};

/// Ordered levels of constraint indices; `levels[i]` is `P_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPartition {
    pub levels: Vec<Vec<usize>>,
}

impl ZPartition {
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// `z(C)` for every constraint index.
    pub fn ranks(&self, num_constraints: usize) -> Vec<usize> {
        let mut z = vec![0; num_constraints];
        for (i, level) in self.levels.iter().enumerate() {
            for c in level {
                z[*c] = i;
            }
        }
        z
    }

    /// Indices of `P_j ∪ … ∪ P_k`, ascending.
    pub fn suffix(&self, j: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.levels.iter().skip(j).flatten().copied().collect();
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionOutcome {
    Partition(ZPartition),
    /// The levels found before no remaining constraint was tolerated.
    Stuck { levels: Vec<Vec<usize>>, residue: Vec<usize> },
}

impl PartitionOutcome {
    pub fn partition(&self) -> Option<&ZPartition> {
        match self {
            PartitionOutcome::Partition(z) => Some(z),
            PartitionOutcome::Stuck { .. } => None,
        }
    }

    pub fn is_coherent(&self) -> bool {
        matches!(self, PartitionOutcome::Partition(_))
    }
}

pub(crate) fn partition_compiled(ms: &ModelSpace, p: &[CompiledConstraint]) -> Result<PartitionOutcome> {
    let mut residue: Vec<usize> = (0..p.len()).collect();
    let mut levels = Vec::new();
    while !residue.is_empty() {
        let rest: Vec<CompiledConstraint> = residue.iter().map(|i| p[*i].clone()).collect();
        let mut level = Vec::new();
        for &i in &residue {
            if ms.positive_possible(&rest, &p[i].ante)? {
                level.push(i);
            }
        }
        if level.is_empty() {
            return Ok(PartitionOutcome::Stuck { levels, residue });
        }
        residue.retain(|i| !level.contains(i));
        levels.push(level);
    }
    Ok(PartitionOutcome::Partition(ZPartition { levels }))
}

pub fn z_partition(kb: &KnowledgeBase) -> Result<PartitionOutcome> {
    let ms = ModelSpace::for_kb(kb)?;
    partition_compiled(&ms, &ms.compile_all(&kb.conditional)?)
}

pub fn is_gcoherent(kb: &KnowledgeBase) -> Result<bool> {
    Ok(z_partition(kb)?.is_coherent())
}

/// No model of `L ∪ P′` verifies `c`, with `L` and `P′` taken from `kb`.
pub fn in_conflict(kb: &KnowledgeBase, c: &ConditionalConstraint) -> Result<bool> {
    Ok(!crate::semantics::tolerates(kb, c)?)
}

pub const ORACLE_CAP: usize = 5;

/// Exhaustive search for a conditional constraint ranking admissible with `kb`.
pub fn gcoherence_oracle(kb: &KnowledgeBase) -> Result<bool> {
    let n = kb.conditional.len();
    if n > ORACLE_CAP {
        return Err(Error::ResourceLimit { what: "constraint count for the ranking oracle", cap: ORACLE_CAP, actual: n });
    }
    let ms = ModelSpace::for_kb(kb)?;
    let p = ms.compile_all(&kb.conditional)?;
    // conflicts[s] = constraints C such that the subset with bitmask s is in conflict with C.
    let mut conflicts = vec![Vec::new(); 1 << n];
    for (s, out) in conflicts.iter_mut().enumerate() {
        let sub: Vec<CompiledConstraint> = (0..n).filter(|i| s >> i & 1 == 1).map(|i| p[i].clone()).collect();
        for (c, pc) in p.iter().enumerate() {
            if !ms.tolerates(&sub, pc)? {
                out.push(c);
            }
        }
    }
    let base = n + 1;
    let total = base.pow(n as u32);
    'rankings: for code in 0..total {
        let sigma: Vec<usize> = (0..n).map(|i| code / base.pow(i as u32) % base).collect();
        for (s, cs) in conflicts.iter().enumerate() {
            for &c in cs {
                let has_lower = (0..n).any(|i| s >> i & 1 == 1 && sigma[i] < sigma[c]);
                if !has_lower {
                    continue 'rankings;
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GOptions {
    pub tolerance: Rational,
    /// Deepest dyadic level tried when looking for a first coherent point.
    pub grid_depth: u32,
    /// Also scan `k/64` and report whether the coherent points look disconnected.
    pub sweep: bool,
}

impl Default for GOptions {
    fn default() -> Self {
        GOptions { tolerance: Rational::new(1, 1_000_000), grid_depth: 10, sweep: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GTight {
    pub interval: TightInterval,
    pub lower_exact: bool,
    pub upper_exact: bool,
    /// Set only by the sweep: some grid point between two coherent points is not coherent.
    pub disconnected: bool,
}

impl GTight {
    pub fn exact(&self) -> bool {
        self.lower_exact && self.upper_exact
    }

    /// Closed containment in `[l, u]`; approximate endpoints get `tol` slack.
    pub fn within(&self, l: &Rational, u: &Rational, tol: &Rational) -> bool {
        if self.interval.is_empty() {
            return true;
        }
        let lo_ok = if self.lower_exact { l <= &self.interval.lower } else { &(l - tol) <= &self.interval.lower };
        let hi_ok = if self.upper_exact { &self.interval.upper <= u } else { &self.interval.upper <= &(u + tol) };
        lo_ok && hi_ok
    }
}

/// Decides coherence of `P ∪ {(q)[p,p]}` for the g-tight search.
pub(crate) struct CoherenceProbe<'a> {
    ms: &'a ModelSpace,
    base: &'a [CompiledConstraint],
    query: CompiledConstraint,
}

impl<'a> CoherenceProbe<'a> {
    pub(crate) fn new(ms: &'a ModelSpace, base: &'a [CompiledConstraint], q: &QueryMasks) -> Self {
        let query = CompiledConstraint { both: q.both.clone(), ante: q.ante.clone(), lower: Rational::zero(), upper: Rational::zero() };
        CoherenceProbe { ms, base, query }
    }

    pub(crate) fn coherent_at(&self, p: &Rational) -> Result<bool> {
        let mut all = self.base.to_vec();
        all.push(self.query.with_bounds(p.clone(), p.clone()));
        Ok(partition_compiled(self.ms, &all)?.is_coherent())
    }
}

/// Tight g-coherent bounds given a partition of the base constraints.
pub(crate) fn gtight_compiled(
    ms: &ModelSpace,
    p: &[CompiledConstraint],
    partition: &ZPartition,
    q: &QueryMasks,
    opts: &GOptions,
) -> Result<GTight> {
    if !ms.positive_possible(&[], &q.ante)? {
        return Ok(GTight { interval: TightInterval::empty(), lower_exact: true, upper_exact: true, disconnected: false });
    }
    let probe = CoherenceProbe::new(ms, p, q);

    let mut candidates: BTreeSet<Rational> = BTreeSet::new();
    candidates.insert(Rational::zero());
    candidates.insert(Rational::one());
    for c in p {
        candidates.insert(c.lower.clone());
        candidates.insert(c.upper.clone());
    }
    for j in 0..=partition.num_levels() {
        let suffix: Vec<CompiledConstraint> = partition.suffix(j).into_iter().map(|i| p[i].clone()).collect();
        let t = ms.tight(&suffix, q)?.interval;
        if !t.is_empty() {
            candidates.insert(t.lower);
            candidates.insert(t.upper);
        }
    }
    let candidates: Vec<Rational> = candidates
        .into_iter()
        .filter(|c| !c.is_negative() && c <= &Rational::one())
        .collect();

    let mut known: Vec<(Rational, bool)> = Vec::new();
    let mut decide = |x: &Rational| -> Result<bool> {
        if let Some((_, v)) = known.iter().find(|(k, _)| k == x) {
            return Ok(*v);
        }
        let v = probe.coherent_at(x)?;
        known.push((x.clone(), v));
        Ok(v)
    };

    let mut seed: Option<Rational> = None;
    for c in &candidates {
        if decide(c)? {
            seed = Some(c.clone());
            break;
        }
    }
    if seed.is_none() {
        'grid: for depth in 1..=opts.grid_depth {
            let den = 1i64 << depth;
            for num in (1..den).step_by(2) {
                let x = Rational::new(num, den);
                if decide(&x)? {
                    seed = Some(x);
                    break 'grid;
                }
            }
        }
    }
    let Some(seed) = seed else {
        return Err(Error::Inconsistency(format!(
            "no coherent probability found for the query down to grid depth {}",
            opts.grid_depth
        )));
    };

    let tol = &opts.tolerance;
    let below: Vec<Rational> = candidates.iter().filter(|c| *c < &seed).cloned().collect();
    let above: Vec<Rational> = candidates.iter().filter(|c| *c > &seed).cloned().collect();
    let (lower, lower_exact) = endpoint(&mut decide, &seed, &below, tol, Side::Lower)?;
    let (upper, upper_exact) = endpoint(&mut decide, &seed, &above, tol, Side::Upper)?;

    let mut disconnected = false;
    if opts.sweep {
        let mut flags = Vec::with_capacity(65);
        for k in 0..=64 {
            flags.push(decide(&Rational::new(k, 64))?);
        }
        let first = flags.iter().position(|f| *f);
        let last = flags.iter().rposition(|f| *f);
        if let (Some(a), Some(b)) = (first, last) {
            disconnected = flags[a..=b].iter().any(|f| !f);
        }
    }

    Ok(GTight { interval: TightInterval::new(lower, upper), lower_exact, upper_exact, disconnected })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Lower,
    Upper,
}

/// Locates one end of the coherent set starting from the coherent `seed`.
/// `outward` holds the candidates beyond the seed on that side.
fn endpoint(
    decide: &mut impl FnMut(&Rational) -> Result<bool>,
    seed: &Rational,
    outward: &[Rational],
    tol: &Rational,
    side: Side,
) -> Result<(Rational, bool)> {
    // Order candidates from the seed outward.
    let mut order: Vec<Rational> = outward.to_vec();
    if side == Side::Lower {
        order.reverse();
    }
    // Largest prefix of `order` that is coherent, by binary search.
    let (mut lo, mut hi) = (0usize, order.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if decide(&order[mid])? {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let inner = if lo == 0 { seed.clone() } else { order[lo - 1].clone() };
    let Some(outer) = order.get(lo).cloned() else {
        // Coherent all the way to the boundary candidate (0 or 1).
        return Ok((inner, true));
    };
    let toward_outer = |x: &Rational, d: &Rational| match side {
        Side::Lower => x - d,
        Side::Upper => x + d,
    };
    let strictly_between = |x: &Rational| match side {
        Side::Lower => &outer < x && x < &inner,
        Side::Upper => &inner < x && x < &outer,
    };

    let just_past_inner = toward_outer(&inner, tol);
    if strictly_between(&just_past_inner) {
        if !decide(&just_past_inner)? {
            return Ok((inner, true));
        }
        let just_inside_outer = toward_outer(&outer, &-tol);
        if strictly_between(&just_inside_outer) && decide(&just_inside_outer)? {
            // Coherent arbitrarily close to a non-coherent candidate: open end.
            return Ok((outer, true));
        }
    }

    // Bisection between a coherent point `good` and a non-coherent point `bad`.
    let (mut good, mut bad) = (inner, outer);
    let two = Rational::from_integer(2);
    while (&good - &bad).abs() > *tol {
        let mid = &(&good + &bad) / &two;
        if decide(&mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok((good, false))
}

pub fn gcoherent_tight(kb: &KnowledgeBase, q: &ConditionalEvent, opts: &GOptions) -> Result<GTight> {
    let ms = ModelSpace::for_kb(kb)?;
    let p = ms.compile_all(&kb.conditional)?;
    let partition = match partition_compiled(&ms, &p)? {
        PartitionOutcome::Partition(z) => z,
        PartitionOutcome::Stuck { .. } => return Err(Error::Precondition("knowledge base is not g-coherent".into())),
    };
    gtight_compiled(&ms, &p, &partition, &ms.query(q)?, opts)
}

/// Entailment answer and whether it rests on exact endpoints.
pub fn gcoherent_entails(kb: &KnowledgeBase, c: &ConditionalConstraint, opts: &GOptions) -> Result<(bool, bool)> {
    let t = gcoherent_tight(kb, &c.cond, opts)?;
    Ok((t.within(&c.lower, &c.upper, &opts.tolerance), t.exact()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{AtomTable, Event};
    use crate::text::{parse_conditional_constraint, parse_conditional_event, parse_kb};
    use proptest::prelude::*;

    const KB_A: &str = "atoms: bird penguin fly have_legs\nL: penguin => bird\nP: (have_legs | bird) [1, 1]\nP: (fly | bird) [1, 1]\n";
    const KB_B: &str = "atoms: bird penguin fly have_legs\nL: penguin => bird\nP: (have_legs | bird) [1, 1]\nP: (fly | bird) [1, 1]\nP: (fly | penguin) [0, 1/20]\n";
    const KB_C: &str = "atoms: bird eagle fly\nL: eagle => bird\nP: (fly | bird) [1, 1]\n";
    const KB_D: &str = "atoms: bird fly red\nP: (fly | bird) [1, 1]\n";
    const KB_E: &str = "atoms: bird penguin fly have_legs\nL: penguin => bird\nP: (fly | bird) [1, 1]\nP: (have_legs | bird) [1, 1]\nP: (!fly | penguin) [1, 1]\n";
    const CONTRA: &str = "atoms: a\nP: (a | true) [1, 1]\nP: (!a | true) [1, 1]\n";

    fn kb(src: &str) -> KnowledgeBase {
        parse_kb(src).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn gt(k: &KnowledgeBase, q: &str) -> GTight {
        gcoherent_tight(k, &parse_conditional_event(&k.atoms, q).unwrap(), &GOptions { sweep: true, ..GOptions::default() })
            .unwrap()
    }

    #[test]
    fn partitions() {
        match z_partition(&kb(KB_A)).unwrap() {
            PartitionOutcome::Partition(z) => assert_eq!(z.levels, vec![vec![0, 1]]),
            other => panic!("{other:?}"),
        }
        match z_partition(&kb(KB_B)).unwrap() {
            PartitionOutcome::Partition(z) => assert_eq!(z.levels, vec![vec![0, 1], vec![2]]),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            z_partition(&kb(CONTRA)).unwrap(),
            PartitionOutcome::Stuck { levels: vec![], residue: vec![0, 1] }
        );
        match z_partition(&kb(KB_E)).unwrap() {
            PartitionOutcome::Partition(z) => assert_eq!(z.levels, vec![vec![0, 1], vec![2]]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coherence_decisions_match_oracle_on_fixtures() {
        for (src, expected) in [(KB_A, true), (KB_B, true), (KB_C, true), (KB_D, true), (KB_E, true), (CONTRA, false)] {
            let k = kb(src);
            assert_eq!(is_gcoherent(&k).unwrap(), expected, "{src}");
            assert_eq!(gcoherence_oracle(&k).unwrap(), expected, "{src}");
        }
    }

    #[test]
    fn conflict_examples() {
        let b = kb(KB_B);
        let fly_bird = b.conditional[1].clone();
        let fly_penguin = b.conditional[2].clone();
        let only = |c: &ConditionalConstraint| KnowledgeBase::with_constraints(b.atoms.clone(), b.logical.clone(), vec![c.clone()]);
        assert!(in_conflict(&only(&fly_bird), &fly_penguin).unwrap());
        assert!(!in_conflict(&KnowledgeBase::new(b.atoms.clone()), &fly_bird).unwrap());
        assert!(!in_conflict(&only(&fly_penguin), &fly_bird).unwrap());
    }

    #[test]
    fn oracle_cap() {
        let mut src = String::from("atoms: a\n");
        for _ in 0..6 {
            src.push_str("P: (a | true) [0, 1]\n");
        }
        let mut k = kb(&src);
        k.strict_distinctness = false;
        assert!(matches!(gcoherence_oracle(&k), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn gtight_examples() {
        let a = kb(KB_A);
        let t = gt(&a, "(fly | penguin)");
        assert_eq!(t.interval, TightInterval::unit());
        assert!(t.exact() && !t.disconnected);
        let b = kb(KB_B);
        let t = gt(&b, "(fly | penguin)");
        assert_eq!(t.interval, TightInterval::new(Rational::zero(), r(1, 20)));
        assert!(t.exact());
        let t = gt(&b, "(have_legs | penguin)");
        assert_eq!(t.interval, TightInterval::unit());
        assert!(t.exact());
        assert_eq!(gt(&b, "(fly | bird)").interval, TightInterval::new(Rational::one(), Rational::one()));
        assert_eq!(gt(&a, "(have_legs | bird)").interval, TightInterval::new(Rational::one(), Rational::one()));
    }

    #[test]
    fn gtight_liberal_examples() {
        assert_eq!(gt(&kb(KB_C), "(fly | bird & eagle)").interval, TightInterval::unit());
        assert_eq!(gt(&kb(KB_C), "(fly | eagle)").interval, TightInterval::unit());
        assert_eq!(gt(&kb(KB_D), "(fly | red & bird)").interval, TightInterval::unit());
    }

    #[test]
    fn gtight_of_impossible_antecedent_is_empty() {
        let a = kb(KB_A);
        let t = gt(&a, "(fly | penguin & !bird)");
        assert!(t.interval.is_empty() && t.exact());
    }

    #[test]
    fn gtight_interior_bounds() {
        // P(a) in [1/4, 1/2], query (a | true): g coincides with the stated bounds.
        let k = kb("atoms: a b\nP: (a | true) [1/4, 1/2]\n");
        let t = gt(&k, "(a | true)");
        assert_eq!(t.interval, TightInterval::new(r(1, 4), r(1, 2)));
        assert!(t.exact());
        let t = gt(&k, "(a & b | true)");
        assert_eq!(t.interval, TightInterval::new(Rational::zero(), r(1, 2)));
    }

    #[test]
    fn gentailment_examples() {
        let opts = GOptions::default();
        let c = kb(KB_C);
        let q = parse_conditional_constraint(&c.atoms, "(fly | bird & eagle) [1, 1]").unwrap();
        assert_eq!(gcoherent_entails(&c, &q, &opts).unwrap(), (false, true));
        let d = kb(KB_D);
        let q = parse_conditional_constraint(&d.atoms, "(fly | red & bird) [1, 1]").unwrap();
        assert_eq!(gcoherent_entails(&d, &q, &opts).unwrap(), (false, true));
        let b = kb(KB_B);
        let q = parse_conditional_constraint(&b.atoms, "(fly | penguin) [0, 0.05]").unwrap();
        assert_eq!(gcoherent_entails(&b, &q, &opts).unwrap(), (true, true));
    }

    #[test]
    fn not_coherent_is_a_precondition_error() {
        let k = kb(CONTRA);
        let q = ConditionalEvent::new(Event::atom(0), Event::Top);
        assert!(matches!(gcoherent_tight(&k, &q, &GOptions::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn endpoint_search_modes() {
        let tol = r(1, 1000);
        // Closed end at a candidate.
        let mut closed = |x: &Rational| -> Result<bool> { Ok(*x >= r(1, 4)) };
        assert_eq!(endpoint(&mut closed, &Rational::one(), &[Rational::zero(), r(1, 4)], &tol, Side::Lower).unwrap(), (r(1, 4), true));
        // Open end at a candidate that is itself not coherent.
        let mut open = |x: &Rational| -> Result<bool> { Ok(*x > r(1, 4)) };
        assert_eq!(endpoint(&mut open, &Rational::one(), &[Rational::zero(), r(1, 4)], &tol, Side::Lower).unwrap(), (r(1, 4), true));
        // End away from every candidate: bisection, flagged approximate.
        let mut off = |x: &Rational| -> Result<bool> { Ok(*x <= r(1, 7)) };
        let (u, exact) = endpoint(&mut off, &Rational::zero(), &[r(1, 2), Rational::one()], &tol, Side::Upper).unwrap();
        assert!(!exact);
        assert!(u <= r(1, 7) && r(1, 7) - u.clone() <= tol);
        // Coherent up to the last candidate.
        let mut all = |_: &Rational| -> Result<bool> { Ok(true) };
        assert_eq!(endpoint(&mut all, &r(1, 2), &[Rational::one()], &tol, Side::Upper).unwrap(), (Rational::one(), true));
    }

    fn arb_kb() -> impl Strategy<Value = KnowledgeBase> {
        let names = ["a", "b", "c"];
        let lit = (0usize..3, any::<bool>()).prop_map(|(a, s)| Event::literal(a, s));
        let ante = prop_oneof![Just(Event::Top), lit.clone(), (lit.clone(), lit.clone()).prop_map(|(x, y)| Event::and(x, y))];
        let grid = prop_oneof![Just((0i64, 1i64)), Just((1, 1)), Just((1, 10)), Just((1, 4)), Just((1, 2)), Just((3, 4))];
        let cc = (lit.clone(), ante, grid.clone(), grid).prop_map(|(c, a, (x, xd), (y, yd))| {
            let (x, y) = (Rational::new(x, xd), Rational::new(y, yd));
            let (l, u) = if x <= y { (x, y) } else { (y, x) };
            ConditionalConstraint::new(c, a, l, u)
        });
        let lc = (lit.clone(), lit).prop_map(|(c, a)| crate::kb::LogicalConstraint::new(c, a));
        (prop::collection::vec(lc, 0..2), prop::collection::vec(cc, 1..5)).prop_map(move |(l, p)| {
            let mut k = KnowledgeBase::with_constraints(AtomTable::new(names).unwrap(), l, p);
            k.strict_distinctness = false;
            k
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn greedy_partition_agrees_with_ranking_oracle(k in arb_kb()) {
            prop_assert_eq!(is_gcoherent(&k).unwrap(), gcoherence_oracle(&k).unwrap());
        }

        #[test]
        fn partition_is_permutation_invariant(k in arb_kb(), shift in 0usize..4) {
            let n = k.conditional.len();
            let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
            let mut shuffled = k.clone();
            shuffled.conditional = perm.iter().map(|i| k.conditional[*i].clone()).collect();
            let a = z_partition(&k).unwrap();
            let b = z_partition(&shuffled).unwrap();
            match (a, b) {
                (PartitionOutcome::Partition(za), PartitionOutcome::Partition(zb)) => {
                    let as_sets = |z: &ZPartition, map: &dyn Fn(usize) -> usize| -> Vec<BTreeSet<usize>> {
                        z.levels.iter().map(|l| l.iter().map(|i| map(*i)).collect()).collect()
                    };
                    prop_assert_eq!(as_sets(&za, &|i| i), as_sets(&zb, &|i| perm[i]));
                }
                (PartitionOutcome::Stuck { .. }, PartitionOutcome::Stuck { .. }) => {}
                _ => prop_assert!(false),
            }
        }

        #[test]
        fn partition_levels_are_tolerated_and_maximal(k in arb_kb()) {
            if let PartitionOutcome::Partition(z) = z_partition(&k).unwrap() {
                prop_assert!(crate::semantics::satisfiable(&k).unwrap());
                for i in 0..z.num_levels() {
                    let suffix = k.restricted(&z.suffix(i));
                    for &c in &z.levels[i] {
                        prop_assert!(crate::semantics::tolerates(&suffix, &k.conditional[c]).unwrap());
                    }
                    if i + 1 < z.num_levels() {
                        for &c in &z.levels[i + 1] {
                            prop_assert!(!crate::semantics::tolerates(&suffix, &k.conditional[c]).unwrap());
                        }
                    }
                }
            }
        }
    }
}
