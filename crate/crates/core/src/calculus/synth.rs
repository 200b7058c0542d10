use std::collections::HashMap;

use thiserror::Error;

use super::{
    check_derivation, permute, CheckFailure, Derivation, DerivationStep, RuleName, Witness,
};
use crate::decision::HoldsWitness;
use crate::model::{Atom, Rational, VarTuple, Variable};
use crate::pairs::Side;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("witness refers to assumption {index}, but there are only {len}")]
    NoSuchAssumption { index: usize, len: usize },
    #[error("witness does not fit the instance: {0}")]
    WitnessMismatch(String),
    #[error("internal error: synthesized derivation is rejected: {0}")]
    Rejected(CheckFailure),
}

struct Builder<'a> {
    assumptions: &'a [Atom],
    goal: &'a Atom,
    steps: Vec<DerivationStep>,
}

impl Builder<'_> {
    fn push(
        &mut self,
        conclusion: Atom,
        rule: RuleName,
        premises: Vec<usize>,
        witness: Witness,
    ) -> usize {
        let index = self.steps.len() + 1;
        self.steps.push(DerivationStep {
            index,
            conclusion,
            rule,
            premises,
            witness,
        });
        index
    }

    fn last(&self) -> (usize, &Atom) {
        let s = self.steps.last().expect("at least one step");
        (s.index, &s.conclusion)
    }

    fn done(&self) -> bool {
        self.steps
            .last()
            .is_some_and(|s| s.conclusion == *self.goal)
    }

    fn swap(&mut self) {
        let (i, cur) = self.last();
        let next = cur.swapped();
        self.push(next, RuleName::A2, vec![i], Witness::None);
    }

    fn raise(&mut self) {
        let (i, cur) = self.last();
        let p = self.goal.degree();
        if cur.degree() < p {
            let next = cur.with_degree(p).expect("degree at most 1");
            self.push(next, RuleName::A7, vec![i], Witness::Degree(p));
        }
    }

    fn permute_to(&mut self, perm: Vec<usize>) {
        if perm.iter().enumerate().all(|(i, &j)| i == j) {
            return;
        }
        let (i, cur) = self.last();
        let next = permute(cur, &perm);
        self.push(next, RuleName::Perm, vec![i], Witness::Perm(perm));
    }

    /// From the last conclusion `c` with `S(c) ⊆ S(goal)` to the goal's
    /// tuples at `c`'s degree.
    fn reshape(&mut self) -> Result<(), SynthesisError> {
        let (_, cur) = self.last();
        let target = self
            .goal
            .with_degree(cur.degree())
            .expect("degree unchanged");
        if *cur == target {
            return Ok(());
        }
        let want = counts(&target);
        let have = counts(cur);
        if have.keys().any(|p| !want.contains_key(p)) {
            return Err(SynthesisError::WitnessMismatch(format!(
                "{cur} has a pair outside {target}"
            )));
        }

        // Append what is missing, in goal order.
        let mut missing = want.clone();
        for (p, n) in &have {
            if let Some(m) = missing.get_mut(p) {
                *m = m.saturating_sub(*n);
            }
        }
        let mut extra: Vec<(Variable, Variable)> = Vec::new();
        for (a, b) in target.pairs() {
            let key = (a.clone(), b.clone());
            if let Some(m) = missing.get_mut(&key) {
                if *m > 0 {
                    *m -= 1;
                    extra.push(key);
                }
            }
        }
        if !extra.is_empty() {
            let (i, cur) = self.last();
            let (l, r): (Vec<_>, Vec<_>) = extra.iter().cloned().unzip();
            let k = extra.len();
            let next = Atom::new(
                cur.left().concat(&VarTuple::new(l).unwrap()),
                cur.right().concat(&VarTuple::new(r).unwrap()),
                cur.degree(),
            )
            .unwrap();
            self.push(next, RuleName::A3, vec![i], Witness::Appended(k));
        }

        // Drop surplus copies one at a time.
        loop {
            let (i, cur) = self.last();
            let have = counts(cur);
            let pairs: Vec<(Variable, Variable)> =
                cur.pairs().map(|(a, b)| (a.clone(), b.clone())).collect();
            let Some(surplus) = pairs.iter().find(|p| have[*p] > want[*p]).cloned() else {
                break;
            };
            let occ: Vec<usize> = (0..pairs.len()).filter(|&j| pairs[j] == surplus).collect();
            let tail = [occ[occ.len() - 2], occ[occ.len() - 1]];
            let mut perm: Vec<usize> = (0..pairs.len()).filter(|j| !tail.contains(j)).collect();
            perm.extend(tail);
            let moved = permute(cur, &perm);
            let n = moved.arity() - 1;
            let next = Atom::new(
                VarTuple::new(moved.left().items()[..n].to_vec()).unwrap(),
                VarTuple::new(moved.right().items()[..n].to_vec()).unwrap(),
                moved.degree(),
            )
            .unwrap();
            self.push(next, RuleName::Contract, vec![i], Witness::Perm(perm));
        }

        // Same multiset of pairs now; reorder.
        let (_, cur) = self.last();
        let pairs: Vec<(&Variable, &Variable)> = cur.pairs().collect();
        let mut used = vec![false; pairs.len()];
        let perm: Vec<usize> = target
            .pairs()
            .map(|tp| {
                let j = (0..pairs.len())
                    .find(|&j| !used[j] && pairs[j] == tp)
                    .expect("equal pair counts");
                used[j] = true;
                j
            })
            .collect();
        self.permute_to(perm);
        Ok(())
    }
}

fn counts(atom: &Atom) -> HashMap<(Variable, Variable), usize> {
    let mut m = HashMap::new();
    for (a, b) in atom.pairs() {
        *m.entry((a.clone(), b.clone())).or_insert(0) += 1;
    }
    m
}

/// Builds a derivation of `goal` from `assumptions` following `witness`,
/// and checks it before returning.
pub fn synthesize(
    assumptions: &[Atom],
    goal: &Atom,
    witness: &HoldsWitness,
) -> Result<Derivation, SynthesisError> {
    let mut b = Builder {
        assumptions,
        goal,
        steps: Vec::new(),
    };
    let hyp = |b: &mut Builder, index: usize| -> Result<Atom, SynthesisError> {
        let a = b
            .assumptions
            .get(index)
            .ok_or(SynthesisError::NoSuchAssumption {
                index,
                len: b.assumptions.len(),
            })?
            .clone();
        if a.degree() > goal.degree() {
            return Err(SynthesisError::WitnessMismatch(format!(
                "{a} has a degree above the goal's"
            )));
        }
        b.push(a.clone(), RuleName::Hyp, vec![], Witness::None);
        Ok(a)
    };

    match witness {
        HoldsWitness::TrivialDegreeOne => {
            if !goal.degree().is_one() {
                return Err(SynthesisError::WitnessMismatch(
                    "goal degree is not 1".into(),
                ));
            }
            b.push(goal.clone(), RuleName::A8, vec![], Witness::None);
        }
        &HoldsWitness::Membership { index, swapped } => {
            hyp(&mut b, index)?;
            if swapped {
                b.swap();
            }
            b.raise();
        }
        &HoldsWitness::Contradictory { index } => {
            let a = b
                .assumptions
                .get(index)
                .ok_or(SynthesisError::NoSuchAssumption {
                    index,
                    len: assumptions.len(),
                })?
                .clone();
            if !a.is_contradictory() {
                return Err(SynthesisError::WitnessMismatch(format!(
                    "{a} is not contradictory"
                )));
            }
            b.push(a, RuleName::Hyp, vec![], Witness::None);
            if !b.done() {
                let exact = goal.with_degree(Rational::ZERO).unwrap();
                b.push(exact, RuleName::A1, vec![1], Witness::None);
                b.raise();
            }
        }
        &HoldsWitness::Subset { index, swapped } => {
            hyp(&mut b, index)?;
            if swapped {
                b.swap();
            }
            b.reshape()?;
            b.raise();
        }
        HoldsWitness::E6 { index, witness } => {
            let a = hyp(&mut b, *index)?;
            let pairs: Vec<(&Variable, &Variable)> = a.pairs().collect();
            let (front, back): (Vec<usize>, Vec<usize>) =
                (0..pairs.len()).partition(|&j| pairs[j].0 != pairs[j].1);
            let suffix = back.len();
            b.permute_to(front.iter().chain(&back).copied().collect());
            let side_tuple = match witness.side {
                Side::Left => goal.left(),
                Side::Right => goal.right(),
            };
            let z = front
                .iter()
                .map(|&j| {
                    let key = (pairs[j].0.clone(), pairs[j].1.clone());
                    let pos = *witness.positions.get(&key).ok_or_else(|| {
                        SynthesisError::WitnessMismatch(format!(
                            "no E6 position for pair ({}, {})",
                            key.0, key.1
                        ))
                    })?;
                    side_tuple.items().get(pos).cloned().ok_or_else(|| {
                        SynthesisError::WitnessMismatch(format!("position {pos} out of range"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if z.is_empty() {
                return Err(SynthesisError::WitnessMismatch(format!(
                    "{a} has only diagonal pairs"
                )));
            }
            let z = VarTuple::new(z).unwrap();
            let (i, cur) = b.last();
            let m = front.len();
            let next = Atom::new(
                z.concat(&z),
                VarTuple::new(cur.left().items()[..m].to_vec())
                    .unwrap()
                    .concat(&VarTuple::new(cur.right().items()[..m].to_vec()).unwrap()),
                cur.degree(),
            )
            .unwrap();
            b.push(next, RuleName::A6, vec![i], Witness::Shared { suffix, z });
            if witness.side == Side::Right {
                b.swap();
            }
            b.reshape()?;
            b.raise();
        }
    }

    let d = Derivation {
        assumptions: assumptions.to_vec(),
        steps: b.steps,
        goal: goal.clone(),
    };
    check_derivation(&d).map_err(SynthesisError::Rejected)?;
    Ok(d)
}
