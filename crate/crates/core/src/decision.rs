//! Polynomial-time decision procedure for `Σ ⊢ x|_p y`.
//!
//! Checks run in a fixed order and the first one that applies decides:
//!
//! 0. `p = 1`: holds outright (A8).
//! 1. `x|_q y` or `y|_q x` is in `Σ` with `q ≤ p`.
//! 2. `Σ` contains a contradictory atom `u|_q u` with `q < 1`.
//! 3. The goal is contradictory (`x = y`): fails.
//! 4. For each `u|_q v ∈ Σ` with `q ≤ p`, in input order: holds if
//!    `S(u|v) ⊆ S(x|y)`, or `S(v|u) ⊆ S(x|y)`, or the E6 condition holds for
//!    one side of the goal.
//! 5. Otherwise fails.
//!
//! Queries with `1/2 ≤ p < 1` are refused: the procedure is only complete
//! below one half.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::counterexample::{self, CounterexamplePlan};
use crate::model::{Atom, Rational, Variable};
use crate::pairs::{E6Witness, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("degree {0} is in [1/2, 1); implication is only decided for degrees below 1/2 or equal to 1")]
    UnsupportedDegree(Rational),
}

/// Why the goal follows. Indices point into the assumption list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HoldsWitness {
    /// Goal degree is 1.
    TrivialDegreeOne,
    /// The goal's tuples (swapped or not) occur in `Σ` with a degree at most the goal's.
    Membership { index: usize, swapped: bool },
    /// `Σ` contains a contradictory atom.
    Contradictory { index: usize },
    /// `S(u|v) ⊆ S(x|y)` (or `S(v|u)` when `swapped`).
    Subset { index: usize, swapped: bool },
    /// The E6 condition for the given side of the goal.
    E6 { index: usize, witness: E6Witness },
}

impl HoldsWitness {
    pub fn kind(&self) -> &'static str {
        match self {
            HoldsWitness::TrivialDegreeOne => "trivial-degree-1",
            HoldsWitness::Membership { .. } => "membership",
            HoldsWitness::Contradictory { .. } => "contradictory",
            HoldsWitness::Subset { .. } => "subset",
            HoldsWitness::E6 { .. } => "e6",
        }
    }

    /// The assumption the verdict rests on, if any.
    pub fn assumption(&self) -> Option<usize> {
        match self {
            HoldsWitness::TrivialDegreeOne => None,
            HoldsWitness::Membership { index, .. }
            | HoldsWitness::Contradictory { index }
            | HoldsWitness::Subset { index, .. }
            | HoldsWitness::E6 { index, .. } => Some(*index),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds(HoldsWitness),
    Fails(CounterexamplePlan),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Holds(w) => w.kind(),
            Verdict::Fails(plan) if plan.goal.is_contradictory() => "contradictory-goal",
            Verdict::Fails(_) => "no-rule-applies",
        }
    }
}

pub fn check_degree(goal: &Atom) -> Result<(), DecisionError> {
    let p = goal.degree();
    if p >= Rational::HALF && !p.is_one() {
        return Err(DecisionError::UnsupportedDegree(p));
    }
    Ok(())
}

pub fn decide(sigma: &[Atom], goal: &Atom) -> Result<Verdict, DecisionError> {
    match decide_witness(sigma, goal)? {
        Some(w) => Ok(Verdict::Holds(w)),
        None => Ok(Verdict::Fails(counterexample::plan_for_failure(
            sigma, goal,
        ))),
    }
}

/// The decision alone, without building a counterexample plan on failure.
pub fn decide_witness(sigma: &[Atom], goal: &Atom) -> Result<Option<HoldsWitness>, DecisionError> {
    check_degree(goal)?;
    let p = goal.degree();
    if p.is_one() {
        return Ok(Some(HoldsWitness::TrivialDegreeOne));
    }
    let (x, y) = (goal.left(), goal.right());

    for (index, a) in sigma.iter().enumerate() {
        if a.degree() <= p {
            if a.left() == x && a.right() == y {
                return Ok(Some(HoldsWitness::Membership {
                    index,
                    swapped: false,
                }));
            }
            if a.left() == y && a.right() == x {
                return Ok(Some(HoldsWitness::Membership {
                    index,
                    swapped: true,
                }));
            }
        }
    }
    if let Some(index) = sigma.iter().position(Atom::is_contradictory) {
        return Ok(Some(HoldsWitness::Contradictory { index }));
    }
    if x == y {
        return Ok(None);
    }

    let all_vars: HashSet<&Variable> = sigma
        .iter()
        .chain(std::iter::once(goal))
        .flat_map(atom_vars)
        .collect();
    let goal_pairs: HashSet<(&Variable, &Variable)> = goal.pairs().collect();
    // For each goal variable and side, the positions where it occurs; the
    // correspondence set of position i is then the set of opposite-side
    // variables at those positions.
    let corr_left = correspondence(goal.left().items(), goal.right().items());
    let corr_right = correspondence(goal.right().items(), goal.left().items());

    for (index, a) in sigma.iter().enumerate() {
        if a.degree() > p {
            continue;
        }
        if a.pairs().all(|(u, v)| goal_pairs.contains(&(u, v))) {
            return Ok(Some(HoldsWitness::Subset {
                index,
                swapped: false,
            }));
        }
        if a.pairs().all(|(u, v)| goal_pairs.contains(&(v, u))) {
            return Ok(Some(HoldsWitness::Subset {
                index,
                swapped: true,
            }));
        }
        for (side, tuple, corr) in [(Side::Left, x, &corr_left), (Side::Right, y, &corr_right)] {
            if let Some(witness) = e6_cover(a, side, tuple.items(), corr, &all_vars) {
                return Ok(Some(HoldsWitness::E6 { index, witness }));
            }
        }
    }
    Ok(None)
}

fn atom_vars(a: &Atom) -> impl Iterator<Item = &Variable> {
    a.left().iter().chain(a.right().iter())
}

/// Correspondence set of every variable of `side`, paired against `other`.
fn correspondence<'a>(
    side: &'a [Variable],
    other: &'a [Variable],
) -> HashMap<&'a Variable, HashSet<&'a Variable>> {
    let mut map: HashMap<&Variable, HashSet<&Variable>> = HashMap::new();
    for (d, o) in side.iter().zip(other) {
        map.entry(d).or_default().insert(o);
    }
    map
}

fn e6_cover(
    src: &Atom,
    side: Side,
    tuple: &[Variable],
    corr: &HashMap<&Variable, HashSet<&Variable>>,
    all_vars: &HashSet<&Variable>,
) -> Option<E6Witness> {
    let mut positions = std::collections::BTreeMap::new();
    let mut done: HashSet<(&Variable, &Variable)> = HashSet::new();
    for (u, v) in src.pairs() {
        if (u == v && all_vars.contains(u)) || !done.insert((u, v)) {
            continue;
        }
        let i = tuple.iter().position(|d| {
            let c = &corr[d];
            c.contains(u) && c.contains(v)
        })?;
        positions.insert((u.clone(), v.clone()), i);
    }
    Some(E6Witness { side, positions })
}

/// Least degree in `sigma` strictly above `p`.
pub fn min_gap_degree(sigma: &[Atom], p: Rational) -> Option<Rational> {
    sigma.iter().map(Atom::degree).filter(|&q| q > p).min()
}

/// All variables of `sigma` and `goal`.
pub fn problem_variables(sigma: &[Atom], goal: &Atom) -> BTreeSet<Variable> {
    sigma
        .iter()
        .chain(std::iter::once(goal))
        .flat_map(|a| a.variables())
        .collect()
}
