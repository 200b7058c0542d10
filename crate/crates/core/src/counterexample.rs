//! Countermodels for failed implications.
//!
//! For a goal `x|_p y` with `x ≠ y` the team has `k` rows. Rows `1..=l`
//! carry patterned values on the `x` columns and rows `l+1..=2l` repeat
//! them on the `y` columns (`s_e(x) = s_{l+e}(y)`), so satisfying `x|y`
//! needs at least `l` removals while `p < l/k`. Every other cell gets a
//! value used nowhere else. For a contradictory goal a single row of fresh
//! values suffices.
//!
//! The construction fails exactly when an assumption of degree `≤ p`
//! already conflicts inside one block. Equalities forced across three or
//! more goal positions can do that without the rules deriving the goal
//! (`v0|v3` against `v1 v3 v1 | v4 v4 v0`); [`underivable_consequence`]
//! reports those instances.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::decision::{self, min_gap_degree, DecisionError};
use crate::model::{variables_in_order, Atom, Rational, Team, Variable};
use crate::semantics::{min_removal, satisfies_approx};

/// Largest team [`build_team`] will materialise.
pub const MAX_TEAM_ROWS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CounterexampleError {
    #[error("the implication holds; there is no counterexample")]
    ImplicationHolds,
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error("assumption {0} is contradictory, so only the empty team satisfies the assumptions")]
    ContradictoryAssumption(Atom),
    #[error("a counterexample needs {rows} rows, above the limit of {limit}")]
    TooLarge { rows: u64, limit: u64 },
    #[error(
        "the goal is not derivable, but every team satisfying assumption {0} satisfies it; no counterexample exists"
    )]
    UnderivableConsequence(Atom),
    #[error(
        "the goal is not derivable, but no team of repeated blocks separates it from the assumptions; \
         they may imply it jointly"
    )]
    Unseparated,
    #[error("internal error: constructed team does not separate the assumptions from the goal")]
    VerificationFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanShape {
    /// Shared blocks between rows `e` and `l+e`.
    Blocks,
    /// One row of fresh values (the goal is contradictory).
    SingleRow,
    /// Rows `1..=l` each satisfy `s(x) = s(y)` on their own; the rest are fresh.
    Collapsed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexamplePlan {
    pub goal: Atom,
    pub sigma: Vec<Atom>,
    pub shape: PlanShape,
    /// Rows that must be removed to satisfy the goal's exact atom.
    pub l: u64,
    /// Team size.
    pub k: u64,
    /// Partition of goal positions (0-based) into classes sharing a value
    /// within a block: the equivalence closure of `(x)_i = (x)_j or (y)_i = (y)_j`.
    pub value_classes: Vec<Vec<usize>>,
    /// Position pairs `(i, j)` (0-based) with `(x)_i = (y)_j`, which share one column.
    pub column_merges: Vec<(usize, usize)>,
    /// Team columns: `Var(x)`, then `Var(y) \ Var(x)`, then the other variables of `Σ`.
    pub columns: Vec<Variable>,
}

impl CounterexamplePlan {
    pub fn goal_arity(&self) -> usize {
        self.goal.arity()
    }

    /// Variables of `Σ` outside `Var(x) ∪ Var(y)`.
    pub fn extra_variables(&self) -> usize {
        let goal_vars = self.goal.variables();
        self.columns
            .iter()
            .filter(|v| !goal_vars.contains(v))
            .count()
    }
}

/// Finds `(l, k)`: the smallest `k` (and then `l`) with `p < l/k ≤ min(r, 1/2)`.
/// This is the smallest denominator in that interval, found by walking the
/// continued-fraction expansion instead of trying `k = 2, 3, …` one by one.
pub fn rows_for(p: Rational, r: Option<Rational>) -> (u64, u64) {
    let upper = match r {
        Some(r) if r < Rational::HALF => r,
        _ => Rational::HALF,
    };
    let (l, k) = simplest_between(
        (p.numer() as u128, p.denom() as u128),
        false,
        Some((upper.numer() as u128, upper.denom() as u128)),
        true,
    );
    (l as u64, k as u64)
}

/// Simplest fraction in an interval between `lo` and `hi` (`None` = ∞); it
/// has the least denominator of all fractions in the interval.
fn simplest_between(
    lo: (u128, u128),
    lo_closed: bool,
    hi: Option<(u128, u128)>,
    hi_closed: bool,
) -> (u128, u128) {
    let (a, b) = lo;
    let floor = a / b;
    let first = if lo_closed && a % b == 0 {
        floor
    } else {
        floor + 1
    };
    let inside = match hi {
        None => true,
        Some((hn, hd)) => first * hd < hn || (first * hd == hn && hi_closed),
    };
    if inside {
        return (first, 1);
    }
    let (hn, hd) = hi.expect("bounded above when no integer fits");
    // x = floor + 1/t  with  t between 1/(hi - floor) and 1/(lo - floor).
    let new_lo = (hd, hn - floor * hd);
    let rem = a - floor * b;
    let new_hi = if rem == 0 { None } else { Some((b, rem)) };
    let (tn, td) = simplest_between(new_lo, hi_closed, new_hi, lo_closed);
    (floor * tn + td, tn)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = i;
        while self.0[cur] != root {
            cur = std::mem::replace(&mut self.0[cur], root);
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn value_classes(goal: &Atom) -> Vec<Vec<usize>> {
    let (x, y) = (goal.left().items(), goal.right().items());
    let n = x.len();
    let mut uf = UnionFind((0..n).collect());
    for i in 0..n {
        for j in i + 1..n {
            if x[i] == x[j] || y[i] == y[j] {
                uf.union(i, j);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let root = uf.find(i);
        let s = *slot.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[s].push(i);
    }
    classes
}

/// Builds the plan for an instance already known to fail.
pub(crate) fn plan_for_failure(sigma: &[Atom], goal: &Atom) -> CounterexamplePlan {
    let p = goal.degree();
    let (l, k) = rows_for(p, min_gap_degree(sigma, p));
    let (x, y) = (goal.left().items(), goal.right().items());
    let mut column_merges = Vec::new();
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            if xi == yj {
                column_merges.push((i, j));
            }
        }
    }
    let columns = variables_in_order(std::iter::once(goal).chain(sigma));
    let columns = order_columns(goal, columns);
    CounterexamplePlan {
        goal: goal.clone(),
        sigma: sigma.to_vec(),
        shape: if goal.is_contradictory() {
            PlanShape::SingleRow
        } else {
            PlanShape::Blocks
        },
        l,
        k,
        value_classes: value_classes(goal),
        column_merges,
        columns,
    }
}

fn order_columns(goal: &Atom, all: Vec<Variable>) -> Vec<Variable> {
    let mut out: Vec<Variable> = Vec::new();
    let push = |v: &Variable, out: &mut Vec<Variable>| {
        if !out.contains(v) {
            out.push(v.clone());
        }
    };
    for v in goal.left() {
        push(v, &mut out);
    }
    for v in goal.right() {
        push(v, &mut out);
    }
    for v in &all {
        push(v, &mut out);
    }
    out
}

/// Plan for `Σ ⊭ goal`; errors if the implication holds.
pub fn plan(sigma: &[Atom], goal: &Atom) -> Result<CounterexamplePlan, CounterexampleError> {
    match decision::decide_witness(sigma, goal)? {
        Some(_) => Err(CounterexampleError::ImplicationHolds),
        None => Ok(plan_for_failure(sigma, goal)),
    }
}

/// Materialises the plan. Values are `"1"`, `"2"`, … in order of first use.
pub fn build_team(plan: &CounterexamplePlan) -> Result<Team, CounterexampleError> {
    let columns = plan.columns.clone();
    if plan.shape == PlanShape::SingleRow {
        let row: Vec<String> = (1..=columns.len()).map(|v| v.to_string()).collect();
        return Ok(Team::from_rows(columns, [row]).expect("distinct columns"));
    }
    if plan.k > MAX_TEAM_ROWS {
        return Err(CounterexampleError::TooLarge {
            rows: plan.k,
            limit: MAX_TEAM_ROWS,
        });
    }
    if plan.shape == PlanShape::Collapsed {
        return Ok(build_collapsed(plan));
    }
    let (x, y) = (plan.goal.left().items(), plan.goal.right().items());
    let mut class_of = vec![0; x.len()];
    for (c, members) in plan.value_classes.iter().enumerate() {
        for &i in members {
            class_of[i] = c;
        }
    }
    // Column -> class of the first goal position naming it, per side.
    let side_class =
        |tuple: &[Variable], v: &Variable| tuple.iter().position(|t| t == v).map(|i| class_of[i]);

    let mut next = 0u64;
    let mut fresh = || {
        next += 1;
        next
    };
    let mut blocks: HashMap<(u64, usize), u64> = HashMap::new();
    let l = plan.l;
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(plan.k as usize);
    for r in 0..plan.k {
        let mut row = Vec::with_capacity(columns.len());
        for v in &columns {
            let class = if r < l {
                side_class(x, v).map(|c| (r, c))
            } else if r < 2 * l {
                side_class(y, v).map(|c| (r - l, c))
            } else {
                None
            };
            let value = match class {
                Some(key) => *blocks.entry(key).or_insert_with(&mut fresh),
                None => fresh(),
            };
            row.push(value);
        }
        // Both rows of a block coincide when the goal forces s = t; the
        // block is then one self-conflicting row and a fresh row keeps k.
        if r >= l && r < 2 * l && row == rows[(r - l) as usize] {
            row = columns.iter().map(|_| fresh()).collect();
        }
        rows.push(row);
    }
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(|v| v.to_string()).collect::<Vec<_>>());
    Ok(Team::from_rows(columns, rows).expect("rows match the schema"))
}

fn build_collapsed(plan: &CounterexamplePlan) -> Team {
    let (x, y) = (plan.goal.left().items(), plan.goal.right().items());
    let index: HashMap<&Variable, usize> = plan
        .columns
        .iter()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let mut uf = UnionFind((0..plan.columns.len()).collect());
    for (a, b) in x.iter().zip(y) {
        uf.union(index[a], index[b]);
    }
    let goal_vars = plan.goal.variables();
    let mut next = 0u64;
    let mut rows = Vec::with_capacity(plan.k as usize);
    for r in 0..plan.k {
        let mut shared: HashMap<usize, u64> = HashMap::new();
        let row: Vec<String> = plan
            .columns
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let value = if r < plan.l && goal_vars.contains(v) {
                    *shared.entry(uf.find(i)).or_insert_with(|| {
                        next += 1;
                        next
                    })
                } else {
                    next += 1;
                    next
                };
                value.to_string()
            })
            .collect();
        rows.push(row);
    }
    Team::from_rows(plan.columns.clone(), rows).expect("rows match the schema")
}

/// The team satisfies every assumption and falsifies the goal. Evaluation
/// errors (unknown columns, enumeration caps) count as failure.
pub fn verify(team: &Team, sigma: &[Atom], goal: &Atom) -> bool {
    sigma.iter().all(|a| satisfies_approx(team, a) == Ok(true))
        && satisfies_approx(team, goal) == Ok(false)
}

/// Upper bound on the distinct values [`build_team`] uses:
/// `3ln + 2lm + (k − 2l)(2n + m)`, which is `3n + 2m` for `l = 1, k = 2`.
pub fn domain_size_bound(plan: &CounterexamplePlan) -> u128 {
    if plan.shape == PlanShape::Collapsed {
        return plan.k as u128 * (2 * plan.goal_arity() + plan.extra_variables()) as u128;
    }
    domain_bound(
        plan.goal_arity() as u128,
        plan.extra_variables() as u128,
        plan.l as u128,
        plan.k as u128,
    )
}

pub fn domain_bound(n: u128, m: u128, l: u128, k: u128) -> u128 {
    if l == 1 && k == 2 {
        3 * n + 2 * m
    } else {
        3 * l * n + 2 * l * m + (k - 2 * l) * (2 * n + m)
    }
}

/// A verified countermodel together with its plan.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub plan: CounterexamplePlan,
    pub team: Team,
    pub domain_bound: u128,
}

/// Plans, builds and verifies a countermodel for `Σ ⊭ goal`.
pub fn counterexample(sigma: &[Atom], goal: &Atom) -> Result<Counterexample, CounterexampleError> {
    let plan = plan(sigma, goal)?;
    realize(plan)
}

/// Builds and verifies the team of a plan. A verification failure is an
/// internal error; no unverified team is ever returned.
pub fn realize(plan: CounterexamplePlan) -> Result<Counterexample, CounterexampleError> {
    if let Some(i) = underivable_consequence(&plan) {
        return Err(CounterexampleError::UnderivableConsequence(
            plan.sigma[i].clone(),
        ));
    }
    let team = build_team(&plan)?;
    if verify(&team, &plan.sigma, &plan.goal) {
        let domain_bound = domain_size_bound(&plan);
        return Ok(Counterexample {
            plan,
            team,
            domain_bound,
        });
    }
    if plan.shape == PlanShape::SingleRow {
        return Err(CounterexampleError::VerificationFailed);
    }
    // The row count above assumes each block costs every assumption at most
    // one removal. When a block costs more, size the team from the measured
    // costs instead, for both block shapes.
    // The smaller team wins; ties go to the block shape.
    let mut best: Option<Counterexample> = None;
    let mut too_large = None;
    let mut attempted = false;
    for shape in [PlanShape::Blocks, PlanShape::Collapsed] {
        let Some((l, k)) = refit_rows(&plan, shape) else {
            continue;
        };
        attempted = true;
        if k > MAX_TEAM_ROWS {
            too_large = Some(k);
            continue;
        }
        if best.as_ref().is_some_and(|b| b.plan.k <= k) {
            continue;
        }
        let refit = CounterexamplePlan {
            shape,
            l,
            k,
            ..plan.clone()
        };
        let team = build_team(&refit)?;
        if verify(&team, &refit.sigma, &refit.goal) {
            let domain_bound = domain_size_bound(&refit);
            best = Some(Counterexample {
                plan: refit,
                team,
                domain_bound,
            });
        }
    }
    match (best, too_large) {
        (Some(cx), _) => Ok(cx),
        (None, Some(rows)) => Err(CounterexampleError::TooLarge {
            rows,
            limit: MAX_TEAM_ROWS,
        }),
        (None, None) if !attempted => Err(CounterexampleError::Unseparated),
        (None, None) => Err(CounterexampleError::VerificationFailed),
    }
}

/// Smallest `(l, k)` for `l` copies of one block of `shape` plus fresh rows:
/// with block size `b`, goal cost `g` and assumption costs `m_a` per block,
/// `l/k` must lie in `(p/g, min(1/b, q_a/m_a)]`.
fn refit_rows(plan: &CounterexamplePlan, shape: PlanShape) -> Option<(u64, u64)> {
    let b = if shape == PlanShape::Blocks { 2 } else { 1 };
    let block = build_team(&CounterexamplePlan {
        shape,
        l: 1,
        k: b,
        ..plan.clone()
    })
    .ok()?;
    let g = min_removal(&block, &plan.goal).ok()? as u128;
    if g == 0 {
        return None;
    }
    let p = plan.goal.degree();
    let lo = (p.numer() as u128, p.denom() as u128 * g);
    let mut hi = (1u128, b as u128);
    for a in &plan.sigma {
        let m = min_removal(&block, a).ok()? as u128;
        if m > 0 {
            let bound = (a.degree().numer() as u128, a.degree().denom() as u128 * m);
            if bound.0 * hi.1 < hi.0 * bound.1 {
                hi = bound;
            }
        }
    }
    if lo.0 * hi.1 >= hi.0 * lo.1 {
        return None;
    }
    let (l, k) = simplest_between(lo, false, Some(hi), true);
    Some((l as u64, k as u64))
}

/// Index of the first assumption of degree `≤ p` that conflicts inside a
/// single block of the plan's team. Such an assumption semantically implies
/// the goal even though the decision procedure found no derivation.
pub fn underivable_consequence(plan: &CounterexamplePlan) -> Option<usize> {
    if plan.shape == PlanShape::SingleRow {
        return None;
    }
    let block = CounterexamplePlan {
        l: 1,
        k: 2,
        ..plan.clone()
    };
    let team = build_team(&block).ok()?;
    let p = plan.goal.degree();
    plan.sigma
        .iter()
        .position(|a| a.degree() <= p && matches!(min_removal(&team, a), Ok(n) if n > 0))
}

/// One row giving every variable of `sigma` its own value; it satisfies
/// every non-contradictory atom.
pub fn canonical_satisfying_team(sigma: &[Atom]) -> Result<Team, CounterexampleError> {
    if let Some(a) = sigma.iter().find(|a| a.is_contradictory()) {
        return Err(CounterexampleError::ContradictoryAssumption(a.clone()));
    }
    let columns = variables_in_order(sigma);
    let row: Vec<String> = (1..=columns.len()).map(|v| v.to_string()).collect();
    Ok(Team::from_rows(columns, [row]).expect("distinct columns"))
}

/// Variables of the assumptions outside the goal's tuples.
pub fn extra_variables(sigma: &[Atom], goal: &Atom) -> BTreeSet<Variable> {
    let goal_vars = goal.variables();
    sigma
        .iter()
        .flat_map(|a| a.variables())
        .filter(|v| !goal_vars.contains(v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarTuple;
    use crate::semantics::min_removal;

    fn atom(l: &str, r: &str, d: &str) -> Atom {
        Atom::new(
            VarTuple::parse(l).unwrap(),
            VarTuple::parse(r).unwrap(),
            d.parse().unwrap(),
        )
        .unwrap()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    /// Linear search: k = 2, 3, … with l = floor(p·k) + 1.
    fn rows_linear(p: Rational, r: Option<Rational>) -> (u64, u64) {
        for k in 2u64.. {
            let l = p.floor_times(k) as u64 + 1;
            let ok_r = r.is_none_or(|r| {
                (l as u128) * (r.denom() as u128) <= (r.numer() as u128) * (k as u128)
            });
            if k >= 2 * l && ok_r {
                return (l, k);
            }
        }
        unreachable!()
    }

    #[test]
    fn rows_examples() {
        assert_eq!(rows_for(Rational::ZERO, None), (1, 2));
        assert_eq!(rows_for(r("3/8"), Some(r("2/5"))), (2, 5));
        assert_eq!(rows_for(Rational::ZERO, Some(r("1/3"))), (1, 3));
        assert_eq!(rows_for(Rational::ZERO, Some(r("1/4"))), (1, 4));
        assert_eq!(rows_for(r("1/4"), Some(r("1/3"))), (1, 3));
        assert_eq!(rows_for(r("1/3"), Some(r("2/5"))), (2, 5));
        assert_eq!(rows_for(r("1/4"), Some(Rational::ONE)), (1, 2));
    }

    #[test]
    fn rows_match_linear_search() {
        for pd in 1..=24u64 {
            for pn in 0..pd {
                let p = Rational::new(pn, pd).unwrap();
                if p >= Rational::HALF {
                    continue;
                }
                assert_eq!(rows_for(p, None), rows_linear(p, None));
                for rd in 1..=24u64 {
                    for rn in 1..=rd {
                        let q = Rational::new(rn, rd).unwrap();
                        if q > p {
                            assert_eq!(
                                rows_for(p, Some(q)),
                                rows_linear(p, Some(q)),
                                "p={p} r={q}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rows_for_huge_denominators() {
        let p = Rational::new(333_333_333_333, 1_000_000_000_000).unwrap();
        let (l, k) = rows_for(p, Some(r("1/3")));
        assert_eq!((l, k), (1, 3));
        let p = Rational::new(1, 1_000_000_000_000).unwrap();
        let q = Rational::new(2, 1_000_000_000_000).unwrap();
        let (l, k) = rows_for(p, Some(q));
        assert!(Rational::new(l, k).unwrap() > p && Rational::new(l, k).unwrap() <= q);
        assert_eq!(k, 500_000_000_000);
    }

    #[test]
    fn two_row_team_shape() {
        let goal = atom("x1", "y1", "0");
        let plan = plan(&[], &goal).unwrap();
        assert_eq!((plan.l, plan.k), (1, 2));
        let team = build_team(&plan).unwrap();
        assert_eq!(team.len(), 2);
        assert_eq!(team.distinct_values(), 3);
        assert!(verify(&team, &[], &goal));
        assert!(!verify(&team, &[], &atom("x1", "y1", "1/2")));
        assert_eq!(domain_size_bound(&plan), 3);
    }

    #[test]
    fn repeated_goal_variable_merges_classes() {
        let plan = plan(&[], &atom("x1 x1", "y1 y2", "0")).unwrap();
        assert_eq!(plan.value_classes, vec![vec![0, 1]]);
        let plan = plan_for_failure(&[], &atom("x1 x1 x3", "y1 y2 y2", "0"));
        assert_eq!(plan.value_classes, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn three_row_team() {
        let sigma = [atom("x1", "y1", "1/3")];
        let goal = atom("x1", "y1", "0");
        let cx = counterexample(&sigma, &goal).unwrap();
        assert_eq!((cx.plan.l, cx.plan.k), (1, 3));
        assert_eq!(cx.team.len(), 3);
        assert_eq!(min_removal(&cx.team, &goal).unwrap(), 1);
        assert_eq!(cx.domain_bound, 5);
        assert!(cx.team.distinct_values() as u128 <= cx.domain_bound);
    }

    #[test]
    fn verify_rejects_empty_team() {
        let empty = Team::empty(vec![
            Variable::new("x1").unwrap(),
            Variable::new("y1").unwrap(),
        ])
        .unwrap();
        assert!(!verify(&empty, &[], &atom("x1", "y1", "0")));
    }

    #[test]
    fn holds_is_an_error() {
        let sigma = [atom("x1", "y1", "0")];
        assert_eq!(
            plan(&sigma, &atom("x1", "y1", "0")),
            Err(CounterexampleError::ImplicationHolds)
        );
    }

    #[test]
    fn canonical_team() {
        let sigma = [atom("z1 z2", "z3 z4", "0")];
        let t = canonical_satisfying_team(&sigma).unwrap();
        assert_eq!(t.string_rows(), vec![vec!["1", "2", "3", "4"]]);
        let t = canonical_satisfying_team(&[atom("x1", "y1", "0"), atom("y1", "z1", "0")]).unwrap();
        assert_eq!(t.distinct_values(), 3);
        assert!(verify(
            &t,
            &[atom("x1", "y1", "0"), atom("y1", "z1", "0")],
            &atom("x1", "x1", "0")
        ));
        assert!(canonical_satisfying_team(&[atom("a", "a", "1/4")]).is_err());
    }

    #[test]
    fn domain_bounds() {
        assert_eq!(domain_bound(1, 0, 1, 2), 3);
        assert_eq!(domain_bound(1, 2, 1, 2), 7);
        assert_eq!(domain_bound(1, 0, 1, 3), 5);
    }

    #[test]
    fn contradictory_goal_uses_single_row() {
        let sigma = [atom("a", "b", "0")];
        let cx = counterexample(&sigma, &atom("c c", "c c", "1/4")).unwrap();
        assert_eq!(cx.plan.shape, PlanShape::SingleRow);
        assert_eq!(cx.team.len(), 1);
    }

    #[test]
    fn chained_classes_are_underivable_consequences() {
        let sigma = [atom("v0", "v3", "1/4")];
        let goal = atom("v1 v3 v1", "v4 v4 v0", "1/4");
        assert_eq!(
            counterexample(&sigma, &goal).unwrap_err(),
            CounterexampleError::UnderivableConsequence(sigma[0].clone())
        );
        // Above the goal's degree the same assumption no longer implies it.
        let sigma = [atom("v0", "v3", "1/3")];
        let cx = counterexample(&sigma, &atom("v1 v3 v1", "v4 v4 v0", "1/4")).unwrap();
        assert_eq!((cx.plan.l, cx.plan.k), (1, 3));
    }

    #[test]
    fn doubly_conflicting_block_falls_back() {
        // Both block rows conflict with the assumption, so one block costs it
        // two removals and the planned four rows are too few.
        let sigma = [atom("v0", "v3", "1/4")];
        let goal = atom("v1 v0 v0 v3", "v2 v0 v3 v3", "0");
        let p = plan(&sigma, &goal).unwrap();
        assert_eq!((p.l, p.k), (1, 4));
        let cx = realize(p).unwrap();
        assert_eq!(cx.plan.shape, PlanShape::Collapsed);
        assert_eq!((cx.plan.l, cx.plan.k), (1, 4));
        assert!(verify(&cx.team, &sigma, &goal));
        assert!(cx.team.distinct_values() as u128 <= cx.domain_bound);
    }

    #[test]
    fn jointly_implied_goal_is_unseparated() {
        // Each assumption alone has a countermodel; together they leave no
        // room for one (the exact atom keeps goal conflicts bipartite, the
        // other charges every conflicting row).
        let sigma = [atom("v2", "v3", "0"), atom("v5", "v0", "1/3")];
        let goal = atom("v0 v5 v2 v2", "v3 v3 v5 v0", "1/5");
        assert_eq!(
            counterexample(&sigma, &goal).unwrap_err(),
            CounterexampleError::Unseparated
        );
        for a in &sigma {
            assert!(counterexample(std::slice::from_ref(a), &goal).is_ok());
        }
    }

    #[test]
    fn coinciding_block_rows_are_padded() {
        let sigma = [atom("a", "b", "1/3")];
        let cx = counterexample(&sigma, &atom("v2 v1 v1", "v1 v2 v1", "0")).unwrap();
        assert_eq!(cx.team.len(), 3);
    }
}
