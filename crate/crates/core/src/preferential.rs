//! z-entailment and lexicographic entailment over the toleration partition.
//!
//! Minimality is taken among the models of `L` that give the antecedent
//! positive probability.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::coherence::{partition_compiled, PartitionOutcome, ZPartition};
use crate::error::{Error, Result};
use crate::kb::{ConditionalConstraint, KnowledgeBase, TightInterval};
use crate::logic::{ConditionalEvent, Event, WorldSet};
use crate::semantics::{CompiledConstraint, ModelSpace, QueryMasks, TightResult};

pub const DEFAULT_LEX_CAP: usize = 12;

/// Per-level counts of satisfied constraints; `counts[i]` belongs to `P_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SatisfactionProfile {
    pub counts: Vec<usize>,
}

impl SatisfactionProfile {
    pub fn of_subset(partition: &ZPartition, subset: &[usize]) -> Self {
        SatisfactionProfile {
            counts: partition.levels.iter().map(|l| l.iter().filter(|c| subset.contains(c)).count()).collect(),
        }
    }
}

/// Compares from the highest level down; `Greater` means lex-preferable.
pub fn lex_compare(a: &SatisfactionProfile, b: &SatisfactionProfile) -> Result<Ordering> {
    if a.counts.len() != b.counts.len() {
        return Err(Error::Precondition(format!(
            "profiles over {} and {} levels",
            a.counts.len(),
            b.counts.len()
        )));
    }
    Ok(a.counts.iter().rev().cmp(b.counts.iter().rev()))
}

fn subset_of(p: &[CompiledConstraint], indices: &[usize]) -> Vec<CompiledConstraint> {
    indices.iter().map(|i| p[*i].clone()).collect()
}

/// Smallest `j` such that `L ∪ P_{≥j}` has a model with `Pr(φ) > 0`.
pub(crate) fn min_rank_compiled(ms: &ModelSpace, p: &[CompiledConstraint], z: &ZPartition, phi: &WorldSet) -> Result<Option<usize>> {
    for j in 0..=z.num_levels() {
        if ms.positive_possible(&subset_of(p, &z.suffix(j)), phi)? {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

pub(crate) fn z_tight_compiled(
    ms: &ModelSpace,
    p: &[CompiledConstraint],
    z: &ZPartition,
    j_star: Option<usize>,
    q: &QueryMasks,
) -> Result<TightResult> {
    match j_star {
        None => Ok(TightResult { interval: TightInterval::empty(), witnesses: None }),
        Some(j) => ms.tight(&subset_of(p, &z.suffix(j)), q),
    }
}

/// All `D` whose profile is lex-maximal among the `D` with `L ∪ D ∪ {φ > 0}` feasible.
/// `None` when no model of `L` gives `φ` positive probability.
pub(crate) fn lex_optimal_compiled(
    ms: &ModelSpace,
    p: &[CompiledConstraint],
    z: &ZPartition,
    phi: &WorldSet,
    cap: usize,
) -> Result<Option<Vec<Vec<usize>>>> {
    if p.len() > cap {
        return Err(Error::ResourceLimit { what: "constraint count for lexicographic search", cap, actual: p.len() });
    }
    if !ms.positive_possible(&[], phi)? {
        return Ok(None);
    }
    let mut cache: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut feasible = |d: &[usize]| -> Result<bool> {
        let mut key = d.to_vec();
        key.sort_unstable();
        if let Some(v) = cache.get(&key) {
            return Ok(*v);
        }
        let v = ms.positive_possible(&subset_of(p, &key), phi)?;
        cache.insert(key, v);
        Ok(v)
    };

    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for level in z.levels.iter().rev() {
        let mut next: Vec<Vec<usize>> = Vec::new();
        for count in (0..=level.len()).rev() {
            let combos = combinations(level, count);
            for d in &frontier {
                for s in &combos {
                    let mut cand = d.clone();
                    cand.extend_from_slice(s);
                    if feasible(&cand)? {
                        next.push(cand);
                    }
                }
            }
            if !next.is_empty() {
                break;
            }
        }
        // The empty choice at this level is always feasible given a feasible prefix.
        debug_assert!(!next.is_empty());
        frontier = next;
    }
    for d in frontier.iter_mut() {
        d.sort_unstable();
    }
    frontier.sort();
    frontier.dedup();
    Ok(Some(frontier))
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Hull of the tight logical intervals over the optimal subsets, with the
/// witnesses of the subsets attaining each end.
pub(crate) fn lex_tight_compiled(
    ms: &ModelSpace,
    p: &[CompiledConstraint],
    optimal: Option<&[Vec<usize>]>,
    q: &QueryMasks,
) -> Result<(TightResult, Vec<TightInterval>)> {
    let Some(optimal) = optimal else {
        return Ok((TightResult { interval: TightInterval::empty(), witnesses: None }, Vec::new()));
    };
    let mut per_d = Vec::with_capacity(optimal.len());
    let mut best: Option<TightResult> = None;
    for d in optimal {
        let t = ms.tight(&subset_of(p, d), q)?;
        per_d.push(t.interval.clone());
        best = Some(match best {
            None => t,
            Some(b) => {
                if t.interval.is_empty() {
                    b
                } else if b.interval.is_empty() {
                    t
                } else {
                    let (bw, tw) = (b.witnesses.unwrap(), t.witnesses.unwrap());
                    let (lower, lw) = if t.interval.lower < b.interval.lower { (t.interval.lower, tw.0) } else { (b.interval.lower, bw.0) };
                    let (upper, uw) = if t.interval.upper > b.interval.upper { (t.interval.upper, tw.1) } else { (b.interval.upper, bw.1) };
                    TightResult { interval: TightInterval::new(lower, upper), witnesses: Some((lw, uw)) }
                }
            }
        });
    }
    Ok((best.expect("at least one optimal subset"), per_d))
}

struct Prepared {
    ms: ModelSpace,
    p: Vec<CompiledConstraint>,
    z: ZPartition,
}

fn prepare(kb: &KnowledgeBase) -> Result<Prepared> {
    let ms = ModelSpace::for_kb(kb)?;
    let p = ms.compile_all(&kb.conditional)?;
    match partition_compiled(&ms, &p)? {
        PartitionOutcome::Partition(z) => Ok(Prepared { ms, p, z }),
        PartitionOutcome::Stuck { .. } => Err(Error::Precondition("knowledge base is not g-coherent".into())),
    }
}

/// `Some(j*)`, or `None` for an infinite rank.
pub fn min_rank_with_positive(kb: &KnowledgeBase, phi: &Event) -> Result<Option<usize>> {
    let pr = prepare(kb)?;
    min_rank_compiled(&pr.ms, &pr.p, &pr.z, &pr.ms.mask(phi)?)
}

pub fn z_tight(kb: &KnowledgeBase, q: &ConditionalEvent) -> Result<TightResult> {
    let pr = prepare(kb)?;
    let qm = pr.ms.query(q)?;
    let j = min_rank_compiled(&pr.ms, &pr.p, &pr.z, &qm.ante)?;
    z_tight_compiled(&pr.ms, &pr.p, &pr.z, j, &qm)
}

pub fn z_entails(kb: &KnowledgeBase, c: &ConditionalConstraint) -> Result<bool> {
    Ok(z_tight(kb, &c.cond)?.interval.within(&c.lower, &c.upper))
}

pub fn lex_optimal_subsets(kb: &KnowledgeBase, phi: &Event) -> Result<Vec<Vec<usize>>> {
    lex_optimal_subsets_with_cap(kb, phi, DEFAULT_LEX_CAP)
}

pub fn lex_optimal_subsets_with_cap(kb: &KnowledgeBase, phi: &Event, cap: usize) -> Result<Vec<Vec<usize>>> {
    let pr = prepare(kb)?;
    match lex_optimal_compiled(&pr.ms, &pr.p, &pr.z, &pr.ms.mask(phi)?, cap)? {
        Some(ds) => Ok(ds),
        None => Err(Error::Precondition("no model of the logical constraints gives the antecedent positive probability".into())),
    }
}

pub fn lex_tight(kb: &KnowledgeBase, q: &ConditionalEvent) -> Result<TightResult> {
    let pr = prepare(kb)?;
    let qm = pr.ms.query(q)?;
    let optimal = lex_optimal_compiled(&pr.ms, &pr.p, &pr.z, &qm.ante, DEFAULT_LEX_CAP)?;
    Ok(lex_tight_compiled(&pr.ms, &pr.p, optimal.as_deref(), &qm)?.0)
}

/// Every optimal subset on its own must entail `c`.
pub fn lex_entails(kb: &KnowledgeBase, c: &ConditionalConstraint) -> Result<bool> {
    let pr = prepare(kb)?;
    let qm = pr.ms.query(&c.cond)?;
    let optimal = lex_optimal_compiled(&pr.ms, &pr.p, &pr.z, &qm.ante, DEFAULT_LEX_CAP)?;
    let (_, per_d) = lex_tight_compiled(&pr.ms, &pr.p, optimal.as_deref(), &qm)?;
    Ok(per_d.iter().all(|t| t.within(&c.lower, &c.upper)))
}
