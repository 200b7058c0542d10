//! Brute-force model search used as a ground truth for the decision
//! procedure.
//!
//! Teams are enumerated over a fixed schema with at most `max_rows` rows
//! and values drawn from `{1, …, domain}`. With `canonical` set, only
//! teams whose row-major value string is a restricted growth string
//! (each cell at most one above the largest earlier value) are produced,
//! rows in strictly increasing order. Every team is then isomorphic, by a
//! renaming of values, to at least one enumerated team, and renaming never
//! changes whether an atom holds.

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use crate::counterexample::{domain_bound, rows_for};
use crate::decision::{check_degree, min_gap_degree, DecisionError};
use crate::model::{variables_in_order, Atom, Team, Variable};
use crate::semantics::satisfies_approx;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search space of up to {bound} teams exceeds the budget of {budget}")]
    Capacity { bound: u128, budget: u64 },
    #[error(transparent)]
    Decision(#[from] DecisionError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeamSpace {
    pub schema: Vec<Variable>,
    pub max_rows: usize,
    pub domain: usize,
    pub canonical: bool,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Strings of length `len` over at most `blocks` values in restricted
/// growth form: `Σ_{j ≤ blocks} S(len, j)`.
fn rgs_count(len: usize, blocks: usize) -> u128 {
    // row[j] = number of strings so far using exactly j distinct values.
    let mut row = vec![0u128; blocks + 1];
    row[0] = 1;
    for _ in 0..len {
        let mut next = vec![0u128; blocks + 1];
        for j in 0..=blocks {
            if row[j] == 0 {
                continue;
            }
            next[j] = next[j].saturating_add(row[j].saturating_mul(j as u128));
            if j < blocks {
                next[j + 1] = next[j + 1].saturating_add(row[j]);
            }
        }
        row = next;
    }
    row.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

impl TeamSpace {
    pub fn new(schema: Vec<Variable>, max_rows: usize, domain: usize, canonical: bool) -> Self {
        TeamSpace {
            schema,
            max_rows,
            domain,
            canonical,
        }
    }

    /// Upper bound on the number of teams [`TeamSpace::for_each`] visits.
    pub fn count_bound(&self) -> u128 {
        let v = self.schema.len() as u32;
        let distinct_rows = (self.domain as u128).checked_pow(v).unwrap_or(u128::MAX);
        let mut total: u128 = 0;
        for r in 0..=self.max_rows {
            let mut n = binomial(distinct_rows, r as u128);
            if self.canonical && n > 0 {
                n = n.min(rgs_count(r * self.schema.len(), self.domain));
            }
            if n == 0 && r > 0 {
                break;
            }
            total = total.saturating_add(n);
        }
        total
    }

    fn ensure_budget(&self, budget: u64) -> Result<(), OracleError> {
        let bound = self.count_bound();
        if bound > budget as u128 {
            return Err(OracleError::Capacity { bound, budget });
        }
        Ok(())
    }

    /// Calls `f` on the coded rows of every team (the empty team first).
    /// Values are codes `0..domain`.
    pub fn for_each<F>(&self, budget: u64, mut f: F) -> Result<u64, OracleError>
    where
        F: FnMut(&[Vec<u32>]) -> ControlFlow<()>,
    {
        self.ensure_budget(budget)?;
        let mut walk = Walk {
            space: self,
            rows: Vec::new(),
            visited: 0,
        };
        let _ = walk.team(-1, &mut f);
        Ok(walk.visited)
    }

    /// All teams of the space, materialised.
    pub fn teams(&self, budget: u64) -> Result<Vec<Team>, OracleError> {
        let symbols = self.symbols();
        let schema: Arc<[Variable]> = self.schema.clone().into();
        let mut out = Vec::new();
        self.for_each(budget, |rows| {
            out.push(coded_team(&schema, &symbols, rows));
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    fn symbols(&self) -> Arc<[String]> {
        (1..=self.domain)
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .into()
    }
}

fn coded_team(schema: &Arc<[Variable]>, symbols: &Arc<[String]>, rows: &[Vec<u32>]) -> Team {
    let rows = rows.iter().map(|r| r.clone().into_boxed_slice()).collect();
    Team::from_codes(schema.clone(), symbols.clone(), rows).expect("rows fit the schema")
}

struct Walk<'a> {
    space: &'a TeamSpace,
    rows: Vec<Vec<u32>>,
    visited: u64,
}

impl Walk<'_> {
    /// Emits the current team, then extends it by every admissible next row.
    fn team<F>(&mut self, max_used: i64, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Vec<u32>]) -> ControlFlow<()>,
    {
        self.visited += 1;
        f(&self.rows)?;
        if self.rows.len() == self.space.max_rows || self.space.schema.is_empty() {
            return ControlFlow::Continue(());
        }
        let width = self.space.schema.len();
        let mut row = vec![0u32; width];
        self.cell(0, true, max_used, &mut row, f)
    }

    fn cell<F>(
        &mut self,
        c: usize,
        tight: bool,
        max_used: i64,
        row: &mut Vec<u32>,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[Vec<u32>]) -> ControlFlow<()>,
    {
        let width = row.len();
        if c == width {
            if tight && !self.rows.is_empty() {
                // Equal to the previous row.
                return ControlFlow::Continue(());
            }
            self.rows.push(row.clone());
            let r = self.team(max_used, f);
            self.rows.pop();
            return r;
        }
        let prev = self.rows.last().map(|p| p[c]);
        let lo = match (tight, prev) {
            (true, Some(p)) => p,
            _ => 0,
        };
        let mut hi = self.space.domain as i64 - 1;
        if self.space.canonical {
            hi = hi.min(max_used + 1);
        }
        let mut v = lo as i64;
        while v <= hi {
            row[c] = v as u32;
            let still_tight = tight && prev == Some(v as u32);
            self.cell(c + 1, still_tight, max_used.max(v), row, f)?;
            v += 1;
        }
        ControlFlow::Continue(())
    }
}

/// Teams over `vars` with at most `max_rows` rows and values from
/// `{1, …, domain}`, under the default budget.
pub fn enumerate_teams(
    vars: &[Variable],
    max_rows: usize,
    domain: usize,
    canonical: bool,
) -> Result<Vec<Team>, OracleError> {
    TeamSpace::new(vars.to_vec(), max_rows, domain, canonical).teams(DEFAULT_BUDGET)
}

/// Search bounds matching the countermodel construction: `k` rows and the
/// domain bound for the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBounds {
    pub max_rows: usize,
    pub domain: usize,
}

pub fn default_bounds(sigma: &[Atom], goal: &Atom) -> Result<OracleBounds, OracleError> {
    check_degree(goal)?;
    let p = goal.degree();
    let (l, k) = if p.is_one() {
        (1, 2)
    } else {
        rows_for(p, min_gap_degree(sigma, p))
    };
    let goal_vars = goal.variables();
    let m = variables_in_order(sigma)
        .iter()
        .filter(|v| !goal_vars.contains(v))
        .count();
    let d = domain_bound(goal.arity() as u128, m as u128, l as u128, k as u128);
    Ok(OracleBounds {
        max_rows: k as usize,
        domain: d.min(usize::MAX as u128) as usize,
    })
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    /// A team satisfying every assumption and falsifying the goal, if one
    /// exists within the bounds.
    pub counterexample: Option<Team>,
    pub teams_checked: u64,
}

impl OracleOutcome {
    /// No countermodel within the bounds.
    pub fn implied(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Searches canonical teams over the instance's variables for a
/// countermodel.
pub fn oracle_implies(
    sigma: &[Atom],
    goal: &Atom,
    bounds: OracleBounds,
    budget: u64,
) -> Result<OracleOutcome, OracleError> {
    let schema = variables_in_order(sigma.iter().chain(std::iter::once(goal)));
    let space = TeamSpace::new(schema, bounds.max_rows, bounds.domain, true);
    let symbols = space.symbols();
    let arc_schema: Arc<[Variable]> = space.schema.clone().into();
    let mut found = None;
    let teams_checked = space.for_each(budget, |rows| {
        let team = coded_team(&arc_schema, &symbols, rows);
        let sat = |a: &Atom| satisfies_approx(&team, a) == Ok(true);
        if sigma.iter().all(sat) && !sat(goal) {
            found = Some(team);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(OracleOutcome {
        counterexample: found,
        teams_checked,
    })
}

/// Fixed-width bit set over atom indices.
pub type Bits = Box<[u64]>;

fn bits(n: usize) -> Bits {
    vec![0u64; n.div_ceil(64)].into_boxed_slice()
}

pub fn bit(b: &[u64], i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(b: &mut [u64], i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

/// For a fixed list of atoms, the distinct satisfaction profiles (the set
/// of atoms a team satisfies) over all teams of a space. Intended for small
/// teams: evaluation tries every subset of rows.
pub struct ProfileSet {
    pub atoms: Vec<Atom>,
    pub profiles: Vec<Bits>,
    pub teams_visited: u64,
}

/// Largest team [`ProfileSet::build`] accepts.
pub const PROFILE_MAX_ROWS: usize = 12;

impl ProfileSet {
    pub fn build(atoms: &[Atom], space: &TeamSpace, budget: u64) -> Result<Self, OracleError> {
        assert!(
            space.max_rows <= PROFILE_MAX_ROWS,
            "profile search is for small teams"
        );
        let col = |v: &Variable| {
            space
                .schema
                .iter()
                .position(|s| s == v)
                .expect("atom variable in schema")
        };
        // Distinct tuple pairs, each evaluated once per team.
        let mut shapes: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut shape_of = Vec::with_capacity(atoms.len());
        for a in atoms {
            let s = (
                a.left().iter().map(col).collect(),
                a.right().iter().map(col).collect(),
            );
            let idx = shapes.iter().position(|t| *t == s).unwrap_or_else(|| {
                shapes.push(s);
                shapes.len() - 1
            });
            shape_of.push(idx);
        }
        let mut seen: HashSet<Bits> = HashSet::new();
        let mut profiles = Vec::new();
        let mut removal = vec![0usize; shapes.len()];
        let teams_visited = space.for_each(budget, |rows| {
            let r = rows.len();
            for (s, (lc, rc)) in shapes.iter().enumerate() {
                removal[s] = min_removal_small(rows, lc, rc);
            }
            let mut p = bits(atoms.len());
            for (i, a) in atoms.iter().enumerate() {
                if r == 0 || a.degree().allows(removal[shape_of[i]], r) {
                    set_bit(&mut p, i);
                }
            }
            if !seen.contains(&p) {
                seen.insert(p.clone());
                profiles.push(p);
            }
            ControlFlow::Continue(())
        })?;
        Ok(ProfileSet {
            atoms: atoms.to_vec(),
            profiles,
            teams_visited,
        })
    }

    /// Per pair of atoms, the goals falsified by some profile satisfying
    /// both; see [`PairFalsifiers`].
    pub fn pair_falsifiers(&self) -> PairFalsifiers {
        let n = self.atoms.len();
        let words = n.div_ceil(64);
        let mut none = bits(n);
        let mut table = vec![0u64; n * n * words];
        for p in &self.profiles {
            let neg: Vec<u64> = (0..words)
                .map(|w| {
                    let valid = if (w + 1) * 64 <= n {
                        u64::MAX
                    } else {
                        (1u64 << (n % 64)) - 1
                    };
                    !p[w] & valid
                })
                .collect();
            if neg.iter().all(|&w| w == 0) {
                continue;
            }
            for (w, x) in none.iter_mut().zip(&neg) {
                *w |= x;
            }
            let members: Vec<usize> = (0..n).filter(|&i| bit(p, i)).collect();
            for (ai, &a) in members.iter().enumerate() {
                for &b in &members[ai..] {
                    let base = (a * n + b) * words;
                    for (w, x) in table[base..base + words].iter_mut().zip(&neg) {
                        *w |= x;
                    }
                }
            }
        }
        PairFalsifiers {
            n,
            words,
            none,
            table,
        }
    }
}

/// `query(Σ)` for `|Σ| ≤ 2` is the set of atoms `g` such that some profile
/// satisfies all of `Σ` but not `g`; `Σ` implies `g` within the searched
/// space iff `g` is not in it.
pub struct PairFalsifiers {
    n: usize,
    words: usize,
    none: Bits,
    table: Vec<u64>,
}

impl PairFalsifiers {
    pub fn query(&self, sigma: &[usize]) -> &[u64] {
        match *sigma {
            [] => &self.none,
            [a] => self.cell(a, a),
            [a, b] => self.cell(a.min(b), a.max(b)),
            _ => panic!("pair table answers at most two assumptions"),
        }
    }

    fn cell(&self, a: usize, b: usize) -> &[u64] {
        let base = (a * self.n + b) * self.words;
        &self.table[base..base + self.words]
    }
}

/// Minimum rows to delete so that no remaining pair (a row with itself
/// included) has `s1(left) = s2(right)`; brute force over row subsets.
fn min_removal_small(rows: &[Vec<u32>], lc: &[usize], rc: &[usize]) -> usize {
    let r = rows.len();
    let eq = |i: usize, j: usize| lc.iter().zip(rc).all(|(&a, &b)| rows[i][a] == rows[j][b]);
    let mut adj = [0u16; PROFILE_MAX_ROWS];
    let mut self_loop = 0u16;
    for i in 0..r {
        for j in 0..r {
            if eq(i, j) {
                if i == j {
                    self_loop |= 1 << i;
                } else {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
    }
    let mut best = 0;
    for keep in 0u16..(1 << r) {
        if keep & self_loop != 0 || (keep.count_ones() as usize) <= best {
            continue;
        }
        if (0..r).all(|i| keep >> i & 1 == 0 || adj[i] & keep == 0) {
            best = keep.count_ones() as usize;
        }
    }
    r - best
}
