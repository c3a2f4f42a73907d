//! Exact rational linear programming.
//!
//! Two-phase primal simplex on a dense tableau with Bland's rule. Every
//! variable is implicitly nonnegative. Optimal outcomes carry a primal
//! witness and dual values; [`verify_optimal`] checks both without touching
//! the pivoting code.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::rational::Rational;

pub const DEFAULT_PIVOT_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// `sum coefficients[k].1 * x[coefficients[k].0]  relation  rhs`.
/// Repeated variable ids are summed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coefficients: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> Self {
        LinearConstraint { coefficients, relation, rhs }
    }

    pub fn lhs_at(&self, x: &[Rational]) -> Rational {
        self.coefficients.iter().map(|(j, a)| a * &x[*j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub constraints: Vec<LinearConstraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// An optimal vertex together with its optimality certificate.
///
/// `duals[i]` belongs to constraint `i`. For minimisation the certificate
/// satisfies `c - A^T y >= 0`, `y_i <= 0` on `<=` rows and `y_i >= 0` on
/// `>=` rows; for maximisation all of these inequalities are reversed.
/// In both cases `b . y == value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub value: Rational,
    pub witness: Vec<Rational>,
    pub duals: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal(Solution),
}

impl LpOutcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn into_solution(self) -> Option<Solution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("variable x{var} referenced but the program has {num_vars} variables")]
    UnknownVariable { var: usize, num_vars: usize },
    #[error("pivot limit of {0} reached")]
    PivotLimit(usize),
    #[error("malformed LP listing at line {line}: {message}")]
    Malformed { line: usize, message: String },
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, constraints: Vec::new() }
    }

    pub fn push(&mut self, coefficients: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(LinearConstraint::new(coefficients, relation, rhs));
    }

    pub fn check(&self) -> Result<(), LpError> {
        for c in &self.constraints {
            for (var, _) in &c.coefficients {
                if *var >= self.num_vars {
                    return Err(LpError::UnknownVariable { var: *var, num_vars: self.num_vars });
                }
            }
        }
        Ok(())
    }

    /// Line-oriented listing: a `vars N` header, then one constraint per line
    /// as `cI: COEF*xJ ... REL RHS`. `#` starts a comment.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "vars {}", self.num_vars).unwrap();
        for (i, c) in self.constraints.iter().enumerate() {
            write!(out, "c{i}:").unwrap();
            for (j, a) in &c.coefficients {
                write!(out, " {a}*x{j}").unwrap();
            }
            writeln!(out, " {} {}", c.relation.symbol(), c.rhs).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<LinearProgram, LpError> {
        let malformed = |line: usize, message: &str| LpError::Malformed { line, message: message.to_string() };
        let mut lp: Option<LinearProgram> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(n) = line.strip_prefix("vars") {
                let n = n.trim().parse::<usize>().map_err(|_| malformed(line_no, "bad variable count"))?;
                lp = Some(LinearProgram::new(n));
                continue;
            }
            let prog = lp.as_mut().ok_or_else(|| malformed(line_no, "constraint before `vars` header"))?;
            let (_, body) = line.split_once(':').ok_or_else(|| malformed(line_no, "missing `cI:` label"))?;
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens.len() < 2 {
                return Err(malformed(line_no, "missing relation or right-hand side"));
            }
            let rhs = tokens[tokens.len() - 1]
                .parse::<Rational>()
                .map_err(|_| malformed(line_no, "bad right-hand side"))?;
            let relation = match tokens[tokens.len() - 2] {
                "<=" => Relation::Le,
                "=" => Relation::Eq,
                ">=" => Relation::Ge,
                _ => return Err(malformed(line_no, "unknown relation")),
            };
            let mut coefficients = Vec::new();
            for term in &tokens[..tokens.len() - 2] {
                let (coef, var) = term.split_once("*x").ok_or_else(|| malformed(line_no, "term is not COEF*xJ"))?;
                let coef = coef.parse::<Rational>().map_err(|_| malformed(line_no, "bad coefficient"))?;
                let var = var.parse::<usize>().map_err(|_| malformed(line_no, "bad variable id"))?;
                coefficients.push((var, coef));
            }
            prog.push(coefficients, relation, rhs);
        }
        let lp = lp.ok_or_else(|| malformed(0, "missing `vars` header"))?;
        lp.check()?;
        Ok(lp)
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn merged(coefficients: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
    let mut v: Vec<(usize, Rational)> = coefficients.to_vec();
    v.sort_by_key(|(j, _)| *j);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(v.len());
    for (j, a) in v {
        match out.last_mut() {
            Some((k, b)) if *k == j => *b += &a,
            _ => out.push((j, a)),
        }
    }
    out.retain(|(_, a)| !a.is_zero());
    out
}

pub fn feasible(lp: &LinearProgram) -> Result<bool, LpError> {
    Ok(matches!(solve_lp(lp, &[], Sense::Minimize)?, LpOutcome::Optimal(_)))
}

pub fn solve_lp(lp: &LinearProgram, objective: &[(usize, Rational)], sense: Sense) -> Result<LpOutcome, LpError> {
    solve_lp_with_limit(lp, objective, sense, DEFAULT_PIVOT_LIMIT)
}

pub fn solve_lp_with_limit(
    lp: &LinearProgram,
    objective: &[(usize, Rational)],
    sense: Sense,
    pivot_limit: usize,
) -> Result<LpOutcome, LpError> {
    lp.check()?;
    for (var, _) in objective {
        if *var >= lp.num_vars {
            return Err(LpError::UnknownVariable { var: *var, num_vars: lp.num_vars });
        }
    }
    let outcome = Simplex::run(lp, objective, sense, pivot_limit)?;
    #[cfg(debug_assertions)]
    if let LpOutcome::Optimal(sol) = &outcome {
        if let Err(msg) = verify_optimal(lp, objective, sense, sol) {
            panic!("LP certificate rejected: {msg}\n{}", lp.to_text());
        }
    }
    Ok(outcome)
}

struct Simplex {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs; the final entry holds minus the objective value.
    cost_row: Vec<Rational>,
    num_cols: usize,
    first_artificial: usize,
    pivots: usize,
    pivot_limit: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Simplex {
    fn run(lp: &LinearProgram, objective: &[(usize, Rational)], sense: Sense, pivot_limit: usize) -> Result<LpOutcome, LpError> {
        let n = lp.num_vars;
        let mut rows: Vec<Vec<(usize, Rational)>> = lp.constraints.iter().map(|c| merged(&c.coefficients)).collect();

        // Presolve: singleton `a*x = 0` rows pin x to zero.
        let mut fixed = vec![false; n];
        let mut fixing_row: Vec<Option<usize>> = vec![None; n];
        let mut dropped = vec![false; rows.len()];
        loop {
            let mut changed = false;
            for (i, row) in rows.iter_mut().enumerate() {
                if dropped[i] {
                    continue;
                }
                row.retain(|(j, _)| !fixed[*j]);
                let c = &lp.constraints[i];
                if row.is_empty() {
                    if !c.relation.holds(&Rational::zero(), &c.rhs) {
                        return Ok(LpOutcome::Infeasible);
                    }
                    dropped[i] = true;
                    changed = true;
                } else if row.len() == 1 && c.relation == Relation::Eq && c.rhs.is_zero() {
                    let j = row[0].0;
                    fixed[j] = true;
                    fixing_row[j] = Some(i);
                    dropped[i] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let active: Vec<usize> = (0..n).filter(|j| !fixed[*j]).collect();
        let mut col_of = vec![usize::MAX; n];
        for (c, j) in active.iter().enumerate() {
            col_of[*j] = c;
        }
        let live_rows: Vec<usize> = (0..rows.len()).filter(|i| !dropped[*i]).collect();

        // Orient rows so rhs >= 0; homogeneous `>=` rows become `<=` so a slack can start basic.
        let mut signs = Vec::with_capacity(live_rows.len());
        let mut relations = Vec::with_capacity(live_rows.len());
        for &i in &live_rows {
            let c = &lp.constraints[i];
            let flip = c.rhs.is_negative() || (c.rhs.is_zero() && c.relation == Relation::Ge);
            signs.push(if flip { -1 } else { 1 });
            relations.push(if flip { c.relation.flipped() } else { c.relation });
        }

        let m = live_rows.len();
        let num_struct = active.len();
        let num_slack = relations.iter().filter(|r| **r != Relation::Eq).count();
        let num_art = relations.iter().filter(|r| **r != Relation::Le).count();
        let first_slack = num_struct;
        let first_artificial = num_struct + num_slack;
        let num_cols = first_artificial + num_art;

        let mut tableau = vec![vec![Rational::zero(); num_cols + 1]; m];
        let mut basis = vec![0; m];
        let mut identity_col = vec![0; m];
        let (mut next_slack, mut next_art) = (first_slack, first_artificial);
        for (t, &i) in live_rows.iter().enumerate() {
            let row = &mut tableau[t];
            let negate = signs[t] < 0;
            for (j, a) in &rows[i] {
                row[col_of[*j]] = if negate { -a } else { a.clone() };
            }
            let rhs = &lp.constraints[i].rhs;
            row[num_cols] = if negate { -rhs } else { rhs.clone() };
            match relations[t] {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis[t] = next_slack;
                    identity_col[t] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    basis[t] = next_art;
                    identity_col[t] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::one();
                    basis[t] = next_art;
                    identity_col[t] = next_art;
                    next_art += 1;
                }
            }
        }
        rows.clear();

        let mut sx = Simplex {
            rows: tableau,
            basis,
            cost_row: Vec::new(),
            num_cols,
            first_artificial,
            pivots: 0,
            pivot_limit,
        };

        if num_art > 0 {
            let costs: Vec<Rational> = (0..num_cols)
                .map(|j| if j >= first_artificial { Rational::one() } else { Rational::zero() })
                .collect();
            sx.price(&costs);
            sx.iterate(true)?;
            if !sx.cost_row[num_cols].is_zero() {
                return Ok(LpOutcome::Infeasible);
            }
            sx.drive_out_artificials();
        }

        let min_costs: Vec<Rational> = {
            let mut c = vec![Rational::zero(); num_cols];
            for (j, a) in merged(objective) {
                if !fixed[j] {
                    c[col_of[j]] = if sense == Sense::Maximize { -a } else { a };
                }
            }
            c
        };
        sx.price(&min_costs);
        if let Phase::Unbounded = sx.iterate(false)? {
            return Ok(LpOutcome::Unbounded);
        }

        let mut witness = vec![Rational::zero(); n];
        for (t, &b) in sx.basis.iter().enumerate() {
            if b < num_struct {
                witness[active[b]] = sx.rows[t][num_cols].clone();
            }
        }

        // Duals of the min-form problem.
        let mut y_min = vec![Rational::zero(); lp.constraints.len()];
        for (t, &i) in live_rows.iter().enumerate() {
            let y = -&sx.cost_row[identity_col[t]];
            y_min[i] = if signs[t] < 0 { -y } else { y };
        }
        let objective_min: Vec<(usize, Rational)> = merged(objective)
            .into_iter()
            .map(|(j, a)| (j, if sense == Sense::Maximize { -a } else { a }))
            .collect();
        for j in 0..n {
            if let Some(i) = fixing_row[j] {
                let c_j = objective_min
                    .iter()
                    .find(|(k, _)| *k == j)
                    .map(|(_, a)| a.clone())
                    .unwrap_or_else(Rational::zero);
                let mut acc = c_j;
                let mut own = Rational::zero();
                for (k, c) in lp.constraints.iter().enumerate() {
                    let a_kj: Rational = c.coefficients.iter().filter(|(v, _)| *v == j).map(|(_, a)| a.clone()).sum();
                    if a_kj.is_zero() {
                        continue;
                    }
                    if k == i {
                        own = a_kj;
                    } else {
                        acc -= &(&a_kj * &y_min[k]);
                    }
                }
                y_min[i] = &acc / &own;
            }
        }

        let duals = match sense {
            Sense::Minimize => y_min,
            Sense::Maximize => y_min.into_iter().map(|y| -y).collect(),
        };
        let value: Rational = merged(objective).iter().map(|(j, a)| a * &witness[*j]).sum();
        Ok(LpOutcome::Optimal(Solution { value, witness, duals }))
    }

    fn price(&mut self, costs: &[Rational]) {
        let mut row: Vec<Rational> = costs.to_vec();
        row.push(Rational::zero());
        for (t, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[t].iter().enumerate() {
                if !v.is_zero() {
                    row[j] -= &(cb * v);
                }
            }
        }
        self.cost_row = row;
    }

    fn iterate(&mut self, allow_artificial: bool) -> Result<Phase, LpError> {
        let limit = if allow_artificial { self.num_cols } else { self.first_artificial };
        loop {
            // Bland: lowest-index improving column.
            let Some(enter) = (0..limit).find(|&j| self.cost_row[j].is_negative()) else {
                return Ok(Phase::Optimal);
            };
            let rhs = self.num_cols;
            let mut leave: Option<(usize, Rational)> = None;
            for t in 0..self.rows.len() {
                let a = &self.rows[t][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[t][rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((best_t, best)) => ratio < *best || (ratio == *best && self.basis[t] < self.basis[*best_t]),
                };
                if better {
                    leave = Some((t, ratio));
                }
            }
            let Some((t, _)) = leave else {
                return Ok(Phase::Unbounded);
            };
            self.pivot(t, enter)?;
        }
    }

    fn pivot(&mut self, t: usize, col: usize) -> Result<(), LpError> {
        self.pivots += 1;
        if self.pivots > self.pivot_limit {
            return Err(LpError::PivotLimit(self.pivot_limit));
        }
        let mut prow = std::mem::take(&mut self.rows[t]);
        let inv = prow[col].recip();
        if !inv.is_one() {
            for v in prow.iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
        }
        let nz: Vec<usize> = (0..prow.len()).filter(|j| !prow[*j].is_zero()).collect();
        let eliminate = |target: &mut Vec<Rational>| {
            let f = target[col].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                let delta = &f * &prow[j];
                target[j] -= &delta;
            }
        };
        for (s, row) in self.rows.iter_mut().enumerate() {
            if s != t {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost_row);
        self.rows[t] = prow;
        self.basis[t] = col;
        Ok(())
    }

    fn drive_out_artificials(&mut self) {
        for t in 0..self.rows.len() {
            if self.basis[t] < self.first_artificial {
                continue;
            }
            if let Some(j) = (0..self.first_artificial).find(|&j| !self.rows[t][j].is_zero()) {
                // Degenerate pivot: the artificial sits at zero.
                self.pivot(t, j).expect("degenerate pivot within limit");
            }
        }
    }
}

/// Independent optimality check: primal feasibility, dual feasibility,
/// complementary slackness and equal objective values, all in exact arithmetic.
pub fn verify_optimal(lp: &LinearProgram, objective: &[(usize, Rational)], sense: Sense, sol: &Solution) -> Result<(), String> {
    let n = lp.num_vars;
    if sol.witness.len() != n {
        return Err(format!("witness has {} entries, expected {n}", sol.witness.len()));
    }
    if sol.duals.len() != lp.constraints.len() {
        return Err("dual vector length mismatch".into());
    }
    if let Some(j) = sol.witness.iter().position(Rational::is_negative) {
        return Err(format!("x{j} is negative"));
    }
    let mut slack = Vec::with_capacity(lp.constraints.len());
    for (i, c) in lp.constraints.iter().enumerate() {
        let lhs = c.lhs_at(&sol.witness);
        if !c.relation.holds(&lhs, &c.rhs) {
            return Err(format!("constraint c{i} violated: {lhs} {} {}", c.relation.symbol(), c.rhs));
        }
        slack.push(&lhs - &c.rhs);
    }
    let value: Rational = objective.iter().map(|(j, a)| a * &sol.witness[*j]).sum();
    if value != sol.value {
        return Err(format!("reported value {} but objective at witness is {value}", sol.value));
    }
    let flip = sense == Sense::Maximize;
    for (i, c) in lp.constraints.iter().enumerate() {
        let y = &sol.duals[i];
        let ok = match (c.relation, flip) {
            (Relation::Eq, _) => true,
            (Relation::Le, false) | (Relation::Ge, true) => !y.is_positive(),
            (Relation::Ge, false) | (Relation::Le, true) => !y.is_negative(),
        };
        if !ok {
            return Err(format!("dual y{i} = {y} has the wrong sign"));
        }
        if !(y * &slack[i]).is_zero() {
            return Err(format!("complementary slackness fails on c{i}"));
        }
    }
    let mut reduced: Vec<Rational> = vec![Rational::zero(); n];
    for (j, a) in objective {
        reduced[*j] += a;
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        let y = &sol.duals[i];
        if y.is_zero() {
            continue;
        }
        for (j, a) in &c.coefficients {
            reduced[*j] -= &(a * y);
        }
    }
    for (j, r) in reduced.iter().enumerate() {
        let ok = if flip { !r.is_positive() } else { !r.is_negative() };
        if !ok {
            return Err(format!("reduced cost of x{j} is {r}"));
        }
        if !(r * &sol.witness[j]).is_zero() {
            return Err(format!("complementary slackness fails on x{j}"));
        }
    }
    let dual_value: Rational = lp.constraints.iter().zip(&sol.duals).map(|(c, y)| &c.rhs * y).sum();
    if dual_value != sol.value {
        return Err(format!("dual value {dual_value} differs from primal value {}", sol.value));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    /// Brute-force vertex enumeration: every basic solution of the system
    /// (constraints plus x >= 0) obtained by making `num_vars` of them tight.
    fn vertex_oracle(lp: &LinearProgram, objective: &[(usize, Rational)], sense: Sense) -> Option<Rational> {
        let n = lp.num_vars;
        let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
        for c in &lp.constraints {
            let mut a = vec![Rational::zero(); n];
            for (j, v) in &c.coefficients {
                a[*j] += v;
            }
            rows.push((a, c.rhs.clone()));
        }
        for j in 0..n {
            let mut a = vec![Rational::zero(); n];
            a[j] = Rational::one();
            rows.push((a, Rational::zero()));
        }
        let mut best: Option<Rational> = None;
        let total = rows.len();
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let chosen: Vec<&(Vec<Rational>, Rational)> =
                (0..total).filter(|i| mask >> i & 1 == 1).map(|i| &rows[i]).collect();
            let Some(x) = solve_square(&chosen, n) else { continue };
            let feasible = x.iter().all(|v| !v.is_negative())
                && lp.constraints.iter().all(|c| c.relation.holds(&c.lhs_at(&x), &c.rhs));
            if !feasible {
                continue;
            }
            let v: Rational = objective.iter().map(|(j, a)| a * &x[*j]).sum();
            best = Some(match (best, sense) {
                (None, _) => v,
                (Some(b), Sense::Minimize) => b.min(v),
                (Some(b), Sense::Maximize) => b.max(v),
            });
        }
        best
    }

    fn solve_square(rows: &[&(Vec<Rational>, Rational)], n: usize) -> Option<Vec<Rational>> {
        let mut m: Vec<Vec<Rational>> = rows
            .iter()
            .map(|(a, b)| {
                let mut v = a.clone();
                v.push(b.clone());
                v
            })
            .collect();
        for col in 0..n {
            let p = (col..n).find(|&r| !m[r][col].is_zero())?;
            m.swap(col, p);
            let inv = m[col][col].recip();
            for v in m[col].iter_mut() {
                *v = &*v * &inv;
            }
            for r in 0..n {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for k in 0..=n {
                        let d = &f * &m[col][k];
                        m[r][k] -= &d;
                    }
                }
            }
        }
        Some(m.iter().map(|row| row[n].clone()).collect())
    }

    #[test]
    fn maximize_on_simplex_edge() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        let sol = solve_lp(&lp, &[(0, int(1))], Sense::Maximize).unwrap().into_solution().unwrap();
        assert_eq!(sol.value, int(1));
        assert_eq!(sol.witness, vec![int(1), int(0)]);
        verify_optimal(&lp, &[(0, int(1))], Sense::Maximize, &sol).unwrap();
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(1);
        lp.push(vec![(0, int(1))], Relation::Ge, int(1));
        lp.push(vec![(0, int(1))], Relation::Le, r(1, 2));
        assert_eq!(solve_lp(&lp, &[], Sense::Minimize).unwrap(), LpOutcome::Infeasible);
        assert!(!feasible(&lp).unwrap());
    }

    #[test]
    fn two_variable_minimum_matches_vertex_enumeration() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![(0, int(1)), (1, int(1))], Relation::Ge, int(1));
        lp.push(vec![(0, int(1))], Relation::Le, r(2, 7));
        let obj = vec![(0, int(3)), (1, int(5))];
        let oracle = vertex_oracle(&lp, &obj, Sense::Minimize).unwrap();
        assert_eq!(oracle, r(31, 7));
        let sol = solve_lp(&lp, &obj, Sense::Minimize).unwrap().into_solution().unwrap();
        assert_eq!(sol.value, r(31, 7));
        assert_eq!(sol.witness, vec![r(2, 7), r(5, 7)]);
    }

    #[test]
    fn feasibility_examples() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        assert!(feasible(&lp).unwrap());
        let mut lp = LinearProgram::new(1);
        lp.push(vec![(0, int(1))], Relation::Eq, int(-1));
        assert!(!feasible(&lp).unwrap());
    }

    #[test]
    fn unbounded_is_reported() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![(0, int(1)), (1, int(-1))], Relation::Le, int(1));
        assert_eq!(solve_lp(&lp, &[(1, int(1))], Sense::Maximize).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn presolved_rows_still_get_valid_duals() {
        let mut lp = LinearProgram::new(3);
        lp.push(vec![(0, int(1)), (1, int(1)), (2, int(1))], Relation::Eq, int(1));
        lp.push(vec![(2, int(1))], Relation::Eq, int(0));
        lp.push(vec![(1, int(2)), (2, int(-1))], Relation::Le, int(0));
        for sense in [Sense::Minimize, Sense::Maximize] {
            let obj = vec![(2, int(4)), (0, int(-1))];
            let sol = solve_lp(&lp, &obj, sense).unwrap().into_solution().unwrap();
            assert_eq!(sol.witness[2], int(0));
            verify_optimal(&lp, &obj, sense, &sol).unwrap();
        }
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        lp.push(vec![(0, int(2)), (1, int(2))], Relation::Eq, int(2));
        let sol = solve_lp(&lp, &[(1, int(1))], Sense::Maximize).unwrap().into_solution().unwrap();
        assert_eq!(sol.value, int(1));
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let mut lp = LinearProgram::new(1);
        lp.push(vec![(3, int(1))], Relation::Eq, int(1));
        assert!(matches!(solve_lp(&lp, &[], Sense::Minimize), Err(LpError::UnknownVariable { var: 3, .. })));
    }

    #[test]
    fn pivot_limit_is_a_resource_error() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        assert_eq!(
            solve_lp_with_limit(&lp, &[(1, int(1))], Sense::Maximize, 0),
            Err(LpError::PivotLimit(0))
        );
    }

    #[test]
    fn listing_round_trips() {
        let mut lp = LinearProgram::new(3);
        lp.push(vec![(0, r(1, 20)), (2, int(-1))], Relation::Le, int(0));
        lp.push(vec![(1, int(1))], Relation::Ge, r(-3, 4));
        lp.push(vec![], Relation::Eq, int(0));
        let text = lp.to_text();
        assert_eq!(LinearProgram::from_text(&text).unwrap(), lp);
        assert!(LinearProgram::from_text("c0: 1*x0 = 1").is_err());
        assert!(LinearProgram::from_text("vars 1\nc0: 1*x4 = 1").is_err());
    }

    fn arb_lp() -> impl Strategy<Value = (LinearProgram, Vec<(usize, Rational)>)> {
        (1usize..=4, 0usize..=2).prop_flat_map(|(n, extra)| {
            let coef = (-3i64..=3, 1i64..=3).prop_map(|(a, b)| Rational::new(a, b));
            let row = (
                prop::collection::vec(coef.clone(), n),
                prop_oneof![Just(Relation::Le), Just(Relation::Eq), Just(Relation::Ge)],
                (-4i64..=4).prop_map(Rational::from_integer),
            );
            (
                prop::collection::vec(row, extra..=extra + 2),
                prop::collection::vec(coef, n),
                Just(n),
            )
                .prop_map(|(rows, obj, n)| {
                    let mut lp = LinearProgram::new(n);
                    for (coefs, rel, rhs) in rows {
                        lp.push(coefs.into_iter().enumerate().collect(), rel, rhs);
                    }
                    // Box every variable so vertex enumeration sees a bounded polytope.
                    let all: Vec<(usize, Rational)> = (0..n).map(|j| (j, Rational::one())).collect();
                    lp.push(all, Relation::Le, Rational::from_integer(5));
                    (lp, obj.into_iter().enumerate().collect())
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn agrees_with_vertex_enumeration((lp, obj) in arb_lp()) {
            for sense in [Sense::Minimize, Sense::Maximize] {
                let oracle = vertex_oracle(&lp, &obj, sense);
                let outcome = solve_lp(&lp, &obj, sense).unwrap();
                match (&outcome, oracle) {
                    (LpOutcome::Optimal(sol), Some(v)) => {
                        prop_assert_eq!(&sol.value, &v);
                        prop_assert!(verify_optimal(&lp, &obj, sense, sol).is_ok());
                    }
                    (LpOutcome::Infeasible, None) => {}
                    (o, v) => prop_assert!(false, "solver {:?} vs oracle {:?}", o, v),
                }
            }
            if let (Some(lo), Some(hi)) = (
                solve_lp(&lp, &obj, Sense::Minimize).unwrap().into_solution(),
                solve_lp(&lp, &obj, Sense::Maximize).unwrap().into_solution(),
            ) {
                prop_assert!(lo.value <= hi.value);
            }
        }
    }
}
