//! Classical defaults, the translation from unit-interval knowledge bases, and
//! world-ranking versions of System Z and lexicographic entailment.
//!
//! Nothing here goes through linear programming; every answer comes from
//! evaluating events world by world, so these serve as oracles for the
//! probabilistic engines.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::kb::{KnowledgeBase, LogicalConstraint};
use crate::logic::{eval_event, AtomTable, Event, World, WorldSpace, DEFAULT_ATOM_CAP};

/// The default `consequent ⇐ antecedent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Default {
    pub consequent: Event,
    pub antecedent: Event,
}

impl Default {
    pub fn new(consequent: Event, antecedent: Event) -> Self {
        Default { consequent, antecedent }
    }

    fn verified(&self, w: &World) -> Result<bool> {
        Ok(eval_event(w, &self.antecedent)? && eval_event(w, &self.consequent)?)
    }

    fn material(&self, w: &World) -> Result<bool> {
        Ok(!eval_event(w, &self.antecedent)? || eval_event(w, &self.consequent)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalKB {
    pub atoms: AtomTable,
    pub logical: Vec<LogicalConstraint>,
    pub defaults: Vec<Default>,
}

/// `None` marks a world that violates a logical constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldRanking {
    pub ranks: Vec<Option<usize>>,
}

impl WorldRanking {
    /// Rank of a set of worlds given by an event: the minimum over its members.
    pub fn rank_of(&self, space: &WorldSpace, e: &Event) -> Result<Option<usize>> {
        let mut best = None;
        for (i, w) in space.worlds().iter().enumerate() {
            if let Some(r) = self.ranks[i] {
                if eval_event(w, e)? && best.is_none_or(|b| r < b) {
                    best = Some(r);
                }
            }
        }
        Ok(best)
    }
}

pub fn gamma(kb: &KnowledgeBase) -> Result<ClassicalKB> {
    let mut defaults = Vec::with_capacity(kb.conditional.len());
    for (i, c) in kb.conditional.iter().enumerate() {
        if !c.is_unit() {
            return Err(Error::Translation(format!(
                "constraint {} `{}` does not have interval [1, 1]",
                i,
                c.display(&kb.atoms)
            )));
        }
        defaults.push(Default::new(c.consequent().clone(), c.antecedent().clone()));
    }
    Ok(ClassicalKB { atoms: kb.atoms.clone(), logical: kb.logical.clone(), defaults })
}

fn space(ckb: &ClassicalKB) -> Result<WorldSpace> {
    WorldSpace::with_cap(ckb.atoms.len(), DEFAULT_ATOM_CAP)
}

fn models_logical(ckb: &ClassicalKB, w: &World) -> Result<bool> {
    for l in &ckb.logical {
        if eval_event(w, &l.violation())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy toleration partition; `None` when some residue tolerates nothing.
pub fn classical_z_partition(ckb: &ClassicalKB) -> Result<Option<Vec<Vec<usize>>>> {
    let sp = space(ckb)?;
    let mut admissible = Vec::new();
    for w in sp.worlds() {
        if models_logical(ckb, w)? {
            admissible.push(w.clone());
        }
    }
    let mut residue: Vec<usize> = (0..ckb.defaults.len()).collect();
    let mut levels = Vec::new();
    while !residue.is_empty() {
        // Worlds satisfying every materialization of the residue.
        let mut sat = Vec::new();
        for w in &admissible {
            let mut ok = true;
            for &d in &residue {
                if !ckb.defaults[d].material(w)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                sat.push(w);
            }
        }
        let mut level = Vec::new();
        for &d in &residue {
            let mut tolerated = false;
            for w in &sat {
                if ckb.defaults[d].verified(w)? {
                    tolerated = true;
                    break;
                }
            }
            if tolerated {
                level.push(d);
            }
        }
        if level.is_empty() {
            return Ok(None);
        }
        residue.retain(|d| !level.contains(d));
        levels.push(level);
    }
    Ok(Some(levels))
}

fn consistent_partition(ckb: &ClassicalKB) -> Result<Vec<Vec<usize>>> {
    classical_z_partition(ckb)?.ok_or_else(|| Error::Precondition("classical knowledge base is not consistent".into()))
}

fn level_of(levels: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for (j, l) in levels.iter().enumerate() {
        for &d in l {
            out[d] = j;
        }
    }
    out
}

pub fn z_ranking(ckb: &ClassicalKB) -> Result<WorldRanking> {
    let levels = consistent_partition(ckb)?;
    let lvl = level_of(&levels, ckb.defaults.len());
    let sp = space(ckb)?;
    let mut ranks = Vec::with_capacity(sp.len());
    for w in sp.worlds() {
        if !models_logical(ckb, w)? {
            ranks.push(None);
            continue;
        }
        let mut r = 0;
        for (i, d) in ckb.defaults.iter().enumerate() {
            if !d.material(w)? {
                r = r.max(lvl[i] + 1);
            }
        }
        ranks.push(Some(r));
    }
    Ok(WorldRanking { ranks })
}

pub fn classical_z_entails(ckb: &ClassicalKB, d: &Default) -> Result<bool> {
    let ranking = z_ranking(ckb)?;
    let sp = space(ckb)?;
    let alpha = &d.antecedent;
    let yes = ranking.rank_of(&sp, &Event::and(alpha.clone(), d.consequent.clone()))?;
    let no = ranking.rank_of(&sp, &Event::and(alpha.clone(), Event::not(d.consequent.clone())))?;
    Ok(match (yes, no) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => a < b,
    })
}

/// Satisfied materializations per level, highest level first.
fn lex_profile(ckb: &ClassicalKB, levels: &[Vec<usize>], w: &World) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(levels.len());
    for l in levels.iter().rev() {
        let mut n = 0;
        for &d in l {
            if ckb.defaults[d].material(w)? {
                n += 1;
            }
        }
        out.push(n);
    }
    Ok(out)
}

pub fn classical_lex_entails(ckb: &ClassicalKB, d: &Default) -> Result<bool> {
    let levels = consistent_partition(ckb)?;
    let sp = space(ckb)?;
    let mut best: Option<Vec<usize>> = None;
    let mut minimal: Vec<&World> = Vec::new();
    for w in sp.worlds() {
        if !models_logical(ckb, w)? || !eval_event(w, &d.antecedent)? {
            continue;
        }
        let prof = lex_profile(ckb, &levels, w)?;
        match best.as_ref().map(|b| prof.cmp(b)) {
            None | Some(Ordering::Greater) => {
                best = Some(prof);
                minimal = vec![w];
            }
            Some(Ordering::Equal) => minimal.push(w),
            Some(Ordering::Less) => {}
        }
    }
    for w in minimal {
        if !eval_event(w, &d.consequent)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Truth-table check of `α → β` over the models of `L` and all materializations.
pub fn classical_logical_entails(ckb: &ClassicalKB, d: &Default) -> Result<bool> {
    let sp = space(ckb)?;
    'worlds: for w in sp.worlds() {
        if !models_logical(ckb, w)? {
            continue;
        }
        for def in &ckb.defaults {
            if !def.material(w)? {
                continue 'worlds;
            }
        }
        if !d.material(w)? {
            return Ok(false);
        }
    }
    Ok(true)
}
