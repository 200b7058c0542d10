use thiserror::Error;

use super::{permute, Derivation, DerivationStep, RuleName, Witness};
use crate::model::{Atom, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("{rule} takes {expected} premise(s), got {found}")]
    PremiseCount {
        rule: RuleName,
        expected: usize,
        found: usize,
    },
    #[error("premise {premise} does not refer to an earlier step")]
    PremiseOutOfRange { premise: usize },
    #[error("witness {witness:?} does not fit rule {rule}")]
    MalformedWitness { rule: RuleName, witness: Witness },
    #[error("{0}")]
    Invalid(String),
}

/// First failing step of a derivation (`step` is 1-based; 0 means the
/// derivation as a whole, e.g. a goal mismatch).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {error}")]
pub struct CheckFailure {
    pub step: usize,
    pub error: StepError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub steps: usize,
    /// Every atom has degree 0 and only HYP/A1–A6/macro steps occur, i.e.
    /// this is a derivation in the exact-atom fragment.
    pub exact_fragment: bool,
}

fn invalid(msg: impl Into<String>) -> StepError {
    StepError::Invalid(msg.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), StepError> {
    if cond {
        Ok(())
    } else {
        Err(StepError::Invalid(msg()))
    }
}

fn is_permutation(perm: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    perm.len() == n
        && perm
            .iter()
            .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

/// Checks one step against the conclusions of earlier steps (`earlier[k]` is
/// the conclusion of step `k + 1`) and the assumption set.
pub fn check_step(
    step: &DerivationStep,
    earlier: &[Atom],
    assumptions: &[Atom],
) -> Result<(), StepError> {
    let rule = step.rule;
    if step.premises.len() != rule.arity() {
        return Err(StepError::PremiseCount {
            rule,
            expected: rule.arity(),
            found: step.premises.len(),
        });
    }
    let premises: Vec<&Atom> = step
        .premises
        .iter()
        .map(|&p| {
            if p >= 1 && p < step.index && p <= earlier.len() {
                Ok(&earlier[p - 1])
            } else {
                Err(StepError::PremiseOutOfRange { premise: p })
            }
        })
        .collect::<Result<_, _>>()?;
    let malformed = || StepError::MalformedWitness {
        rule,
        witness: step.witness.clone(),
    };
    let c = &step.conclusion;

    match (rule, &step.witness) {
        (RuleName::Hyp, Witness::None) => ensure(assumptions.contains(c), || {
            format!("{c} is not an assumption")
        }),
        (RuleName::A8, Witness::None) => {
            ensure(c.degree().is_one(), || "A8 concludes degree 1".into())
        }
        (RuleName::A1, Witness::None) => {
            let p = premises[0];
            ensure(p.is_contradictory(), || {
                format!("A1 premise {p} is not contradictory")
            })?;
            ensure(c.degree().is_zero(), || "A1 concludes degree 0".into())
        }
        (RuleName::A2, Witness::None) => {
            let p = premises[0];
            ensure(*c == p.swapped(), || {
                format!("{c} is not {p} with sides swapped")
            })
        }
        (RuleName::A3, &Witness::Appended(k)) => {
            let p = premises[0];
            let n = p.arity();
            ensure(k >= 1, || "A3 appends at least one pair".into())?;
            ensure(c.arity() == n + k, || {
                format!("A3 conclusion has arity {}, expected {}", c.arity(), n + k)
            })?;
            ensure(
                c.left().items()[..n] == *p.left().items()
                    && c.right().items()[..n] == *p.right().items(),
                || format!("{c} does not extend {p}"),
            )?;
            same_degree(p, c)
        }
        (RuleName::A4, &Witness::Block(b)) => {
            let p = premises[0];
            let n = c.arity();
            ensure(b >= 1 && b <= n, || {
                format!("A4 block length {b} out of range")
            })?;
            ensure(p.arity() == n + b, || {
                format!("A4 premise has arity {}, expected {}", p.arity(), n + b)
            })?;
            let doubled = |prem: &[_], con: &[_]| prem[..n] == *con && prem[n..] == con[n - b..];
            ensure(
                doubled(p.left().items(), c.left().items())
                    && doubled(p.right().items(), c.right().items()),
                || format!("{p} is not {c} with its last {b} pair(s) repeated"),
            )?;
            same_degree(p, c)
        }
        (RuleName::A5, &Witness::Blocks([a, b, z])) => {
            let p = premises[0];
            ensure(a + b + z == p.arity(), || {
                "A5 blocks do not cover the premise".into()
            })?;
            let perm: Vec<usize> = (0..a).chain(a + b..a + b + z).chain(a..a + b).collect();
            ensure(*c == permute(p, &perm), || {
                format!("{c} is not {p} with blocks [{a},{b},{z}] rotated")
            })
        }
        (RuleName::A6, Witness::Shared { suffix, z }) => {
            let p = premises[0];
            let n = p.arity();
            ensure(*suffix < n, || {
                "A6 needs a non-empty prefix before the shared suffix".into()
            })?;
            let m = n - suffix;
            ensure(p.left().items()[m..] == p.right().items()[m..], || {
                format!("last {suffix} position(s) of {p} are not shared")
            })?;
            ensure(z.len() == m, || {
                format!("A6 tuple z has length {}, expected {m}", z.len())
            })?;
            let zz = z.concat(z);
            let xy: Vec<_> = p.left().items()[..m]
                .iter()
                .chain(&p.right().items()[..m])
                .cloned()
                .collect();
            ensure(
                *c.left() == zz && c.right().items() == xy.as_slice(),
                || format!("{c} is not zz | xy for z = {z}"),
            )?;
            same_degree(p, c)
        }
        (RuleName::A7, &Witness::Degree(d)) => {
            let p = premises[0];
            ensure(d == c.degree(), || {
                "A7 witness degree differs from the conclusion".into()
            })?;
            ensure(p.same_tuples(c), || {
                format!("A7 changes tuples: {p} to {c}")
            })?;
            ensure(p.degree() <= d && d <= Rational::ONE, || {
                format!("A7 cannot move degree {} to {d}", p.degree())
            })
        }
        (RuleName::Perm, Witness::Perm(perm)) => {
            let p = premises[0];
            if !is_permutation(perm, p.arity()) {
                return Err(malformed());
            }
            ensure(*c == permute(p, perm), || {
                format!("{c} is not the recorded permutation of {p}")
            })
        }
        (RuleName::Contract, Witness::Perm(perm)) => {
            let p = premises[0];
            if !is_permutation(perm, p.arity()) || p.arity() < 2 {
                return Err(malformed());
            }
            let q = permute(p, perm);
            let n = c.arity();
            ensure(q.arity() == n + 1, || {
                "CONTRACT removes exactly one pair".into()
            })?;
            let (ql, qr) = (q.left().items(), q.right().items());
            ensure(ql[n] == ql[n - 1] && qr[n] == qr[n - 1], || {
                format!("{q} does not end in a repeated pair")
            })?;
            ensure(
                ql[..n] == *c.left().items() && qr[..n] == *c.right().items(),
                || format!("{c} is not {q} without its last pair"),
            )?;
            same_degree(p, c)
        }
        _ => Err(malformed()),
    }
}

fn same_degree(p: &Atom, c: &Atom) -> Result<(), StepError> {
    ensure(p.degree() == c.degree(), || {
        format!("degree changed from {} to {}", p.degree(), c.degree())
    })
}

/// Checks every step in order, then that the last conclusion is the goal.
pub fn check_derivation(d: &Derivation) -> Result<CheckReport, CheckFailure> {
    let mut earlier: Vec<Atom> = Vec::with_capacity(d.steps.len());
    let mut exact_fragment = true;
    for (k, step) in d.steps.iter().enumerate() {
        if step.index != k + 1 {
            return Err(CheckFailure {
                step: k + 1,
                error: invalid(format!(
                    "step numbered {} at position {}",
                    step.index,
                    k + 1
                )),
            });
        }
        check_step(step, &earlier, &d.assumptions).map_err(|error| CheckFailure {
            step: step.index,
            error,
        })?;
        exact_fragment &=
            step.conclusion.degree().is_zero() && !matches!(step.rule, RuleName::A7 | RuleName::A8);
        earlier.push(step.conclusion.clone());
    }
    match earlier.last() {
        None => Err(CheckFailure {
            step: 0,
            error: invalid("empty derivation"),
        }),
        Some(last) if *last != d.goal => Err(CheckFailure {
            step: 0,
            error: invalid(format!("last conclusion {last} is not the goal {}", d.goal)),
        }),
        Some(_) => Ok(CheckReport {
            steps: d.steps.len(),
            exact_fragment,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarTuple;

    fn atom(l: &str, r: &str, d: &str) -> Atom {
        Atom::new(
            VarTuple::parse(l).unwrap(),
            VarTuple::parse(r).unwrap(),
            d.parse().unwrap(),
        )
        .unwrap()
    }

    fn step(
        index: usize,
        c: Atom,
        rule: RuleName,
        premises: Vec<usize>,
        witness: Witness,
    ) -> DerivationStep {
        DerivationStep {
            index,
            conclusion: c,
            rule,
            premises,
            witness,
        }
    }

    #[test]
    fn a6_example() {
        let p = atom("x1 w1", "y1 w1", "0");
        let z = VarTuple::parse("z1").unwrap();
        let s = step(
            2,
            atom("z1 z1", "x1 y1", "0"),
            RuleName::A6,
            vec![1],
            Witness::Shared { suffix: 1, z },
        );
        assert!(check_step(&s, std::slice::from_ref(&p), std::slice::from_ref(&p)).is_ok());
    }

    #[test]
    fn a7_examples() {
        let p = atom("x1", "y1", "1/4");
        let up = step(
            2,
            atom("x1", "y1", "1/3"),
            RuleName::A7,
            vec![1],
            Witness::Degree("1/3".parse().unwrap()),
        );
        assert!(check_step(&up, std::slice::from_ref(&p), &[]).is_ok());
        let p = atom("x1", "y1", "1/3");
        let down = step(
            2,
            atom("x1", "y1", "1/4"),
            RuleName::A7,
            vec![1],
            Witness::Degree("1/4".parse().unwrap()),
        );
        assert!(check_step(&down, &[p], &[]).is_err());
    }

    #[test]
    fn derivation_examples() {
        let hyp = atom("x1 w1", "y1 w1", "0");
        let goal = atom("z1 z1", "x1 y1", "0");
        let d = Derivation {
            assumptions: vec![hyp.clone()],
            steps: vec![
                step(1, hyp, RuleName::Hyp, vec![], Witness::None),
                step(
                    2,
                    goal.clone(),
                    RuleName::A6,
                    vec![1],
                    Witness::Shared {
                        suffix: 1,
                        z: VarTuple::parse("z1").unwrap(),
                    },
                ),
            ],
            goal,
        };
        let report = check_derivation(&d).unwrap();
        assert!(report.exact_fragment);

        let contra = atom("x1", "x1", "0");
        let goal = atom("y1", "z1", "1/4");
        let d = Derivation {
            assumptions: vec![contra.clone()],
            steps: vec![
                step(1, contra, RuleName::Hyp, vec![], Witness::None),
                step(
                    2,
                    atom("y1", "z1", "0"),
                    RuleName::A1,
                    vec![1],
                    Witness::None,
                ),
                step(
                    3,
                    goal.clone(),
                    RuleName::A7,
                    vec![2],
                    Witness::Degree(goal.degree()),
                ),
            ],
            goal,
        };
        let report = check_derivation(&d).unwrap();
        assert!(!report.exact_fragment);

        let goal = atom("x1", "y1", "1");
        let d = Derivation {
            assumptions: vec![],
            steps: vec![step(1, goal.clone(), RuleName::A8, vec![], Witness::None)],
            goal,
        };
        assert!(check_derivation(&d).is_ok());
    }

    #[test]
    fn primitive_rules() {
        let p = atom("a b c d", "e f g h", "1/4");
        let a5 = step(
            2,
            atom("a d b c", "e h f g", "1/4"),
            RuleName::A5,
            vec![1],
            Witness::Blocks([1, 2, 1]),
        );
        assert!(check_step(&a5, std::slice::from_ref(&p), &[]).is_ok());
        let a5_empty_middle = step(
            2,
            p.clone(),
            RuleName::A5,
            vec![1],
            Witness::Blocks([1, 0, 3]),
        );
        assert!(check_step(&a5_empty_middle, std::slice::from_ref(&p), &[]).is_ok());
        let a3 = step(
            2,
            atom("a b c d q", "e f g h r", "1/4"),
            RuleName::A3,
            vec![1],
            Witness::Appended(1),
        );
        assert!(check_step(&a3, std::slice::from_ref(&p), &[]).is_ok());
        let dup = atom("a b c b c", "e f g f g", "1/4");
        let a4 = step(
            2,
            atom("a b c", "e f g", "1/4"),
            RuleName::A4,
            vec![1],
            Witness::Block(2),
        );
        assert!(check_step(&a4, std::slice::from_ref(&dup), &[]).is_ok());
        let a4_bad = step(
            2,
            atom("a b c", "e f g", "1/4"),
            RuleName::A4,
            vec![1],
            Witness::Block(1),
        );
        assert!(check_step(&a4_bad, &[dup], &[]).is_err());
        let a2 = step(2, p.swapped(), RuleName::A2, vec![1], Witness::None);
        assert!(check_step(&a2, std::slice::from_ref(&p), &[]).is_ok());
        let a1 = step(2, atom("q", "r", "0"), RuleName::A1, vec![1], Witness::None);
        assert!(check_step(&a1, std::slice::from_ref(&p), &[]).is_err());
        assert!(check_step(&a1, &[atom("a b", "a b", "1/3")], &[]).is_ok());
        assert!(check_step(&a1, &[atom("a b", "a b", "1")], &[]).is_err());
    }

    #[test]
    fn macros() {
        let p = atom("a b c", "d e f", "0");
        let perm = step(
            2,
            atom("c a b", "f d e", "0"),
            RuleName::Perm,
            vec![1],
            Witness::Perm(vec![2, 0, 1]),
        );
        assert!(check_step(&perm, std::slice::from_ref(&p), &[]).is_ok());
        let bad = step(
            2,
            atom("c a b", "f d e", "0"),
            RuleName::Perm,
            vec![1],
            Witness::Perm(vec![2, 2, 1]),
        );
        assert!(matches!(
            check_step(&bad, &[p], &[]),
            Err(StepError::MalformedWitness { .. })
        ));
        let dup = atom("a b a", "d e d", "0");
        let c = step(
            2,
            atom("b a", "e d", "0"),
            RuleName::Contract,
            vec![1],
            Witness::Perm(vec![1, 0, 2]),
        );
        assert!(check_step(&c, std::slice::from_ref(&dup), &[]).is_ok());
        let c_bad = step(
            2,
            atom("a b", "d e", "0"),
            RuleName::Contract,
            vec![1],
            Witness::Perm(vec![0, 1, 2]),
        );
        assert!(check_step(&c_bad, &[dup], &[]).is_err());
    }

    #[test]
    fn structural_errors() {
        let p = atom("a", "b", "0");
        let s = step(1, p.swapped(), RuleName::A2, vec![1], Witness::None);
        assert!(matches!(
            check_step(&s, &[], &[]),
            Err(StepError::PremiseOutOfRange { premise: 1 })
        ));
        let s = step(2, p.swapped(), RuleName::A2, vec![], Witness::None);
        assert!(matches!(
            check_step(&s, std::slice::from_ref(&p), &[]),
            Err(StepError::PremiseCount { .. })
        ));
        let s = step(2, p.swapped(), RuleName::A2, vec![1], Witness::Block(1));
        assert!(matches!(
            check_step(&s, std::slice::from_ref(&p), &[]),
            Err(StepError::MalformedWitness { .. })
        ));
        let hyp = step(1, p.clone(), RuleName::Hyp, vec![], Witness::None);
        assert!(check_step(&hyp, &[], &[]).is_err());
        let d = Derivation {
            assumptions: vec![p.clone()],
            steps: vec![hyp],
            goal: p.swapped(),
        };
        assert_eq!(check_derivation(&d).unwrap_err().step, 0);
    }
}
