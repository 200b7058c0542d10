use super::{permute, Derivation, DerivationStep, RuleName, Witness};
use crate::model::Atom;

/// Rewrites PERM and CONTRACT steps into A5 (and A4) steps, renumbering
/// premises. The result uses primitive rules only.
pub fn expand_macros(d: &Derivation) -> Derivation {
    let mut out: Vec<DerivationStep> = Vec::with_capacity(d.steps.len());
    // Old step index -> new step index.
    let mut map: Vec<usize> = vec![0; d.steps.len() + 1];
    let last = d.steps.len();

    for step in &d.steps {
        let premises: Vec<usize> = step
            .premises
            .iter()
            .map(|&p| map.get(p).copied().unwrap_or(p))
            .collect();
        match (step.rule, &step.witness) {
            (RuleName::Perm, Witness::Perm(perm)) | (RuleName::Contract, Witness::Perm(perm)) => {
                let Some(premise) = premises
                    .first()
                    .copied()
                    .filter(|&p| p >= 1 && p <= out.len())
                else {
                    push(
                        &mut out,
                        step.conclusion.clone(),
                        step.rule,
                        premises,
                        step.witness.clone(),
                    );
                    map[step.index.min(last)] = out.len();
                    continue;
                };
                let start = out[premise - 1].conclusion.clone();
                let mut at = rotate_chain(&mut out, premise, &start, perm);
                if step.rule == RuleName::Contract {
                    push(
                        &mut out,
                        step.conclusion.clone(),
                        RuleName::A4,
                        vec![at],
                        Witness::Block(1),
                    );
                    at = out.len();
                } else if at == premise && step.index == last {
                    // An identity permutation ending the derivation still needs a step.
                    let n = start.arity();
                    push(
                        &mut out,
                        start,
                        RuleName::A5,
                        vec![premise],
                        Witness::Blocks([0, 0, n]),
                    );
                    at = out.len();
                }
                map[step.index.min(last)] = at;
            }
            _ => {
                push(
                    &mut out,
                    step.conclusion.clone(),
                    step.rule,
                    premises,
                    step.witness.clone(),
                );
                map[step.index.min(last)] = out.len();
            }
        }
    }
    Derivation {
        assumptions: d.assumptions.clone(),
        steps: out,
        goal: d.goal.clone(),
    }
}

fn push(
    out: &mut Vec<DerivationStep>,
    conclusion: Atom,
    rule: RuleName,
    premises: Vec<usize>,
    witness: Witness,
) {
    let index = out.len() + 1;
    out.push(DerivationStep {
        index,
        conclusion,
        rule,
        premises,
        witness,
    });
}

/// A5 steps taking `start` (the conclusion of step `premise`) to
/// `permute(start, perm)`: position `i` receives `perm[i]` by rotating it
/// to the front of the suffix starting at `i`. Returns the final step index.
fn rotate_chain(
    out: &mut Vec<DerivationStep>,
    premise: usize,
    start: &Atom,
    perm: &[usize],
) -> usize {
    let n = start.arity();
    let mut order: Vec<usize> = (0..n).collect();
    let mut cur = start.clone();
    let mut at = premise;
    for (i, &want) in perm.iter().enumerate() {
        let Some(j) = order.iter().position(|&o| o == want).filter(|&j| j > i) else {
            continue;
        };
        let rot: Vec<usize> = (0..i).chain(j..n).chain(i..j).collect();
        order = rot.iter().map(|&k| order[k]).collect();
        cur = permute(&cur, &rot);
        push(
            out,
            cur.clone(),
            RuleName::A5,
            vec![at],
            Witness::Blocks([i, j - i, n - j]),
        );
        at = out.len();
    }
    at
}
