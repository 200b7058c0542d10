//! Evaluation of exact and approximate exclusion atoms on teams.
//!
//! Functions that talk about the exact atom (`satisfies_exact`,
//! `conflict_report`, `min_removal`, `min_degree`) look only at the atom's
//! tuples and ignore its degree.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{Atom, Rational, Team, VarTuple, Variable};

/// Default cap on the number of independent conflicting values that
/// [`min_removal`] will enumerate side choices for.
pub const DEFAULT_CONFLICT_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("variable `{0}` is not a column of the team")]
    UnknownVariable(Variable),
    #[error("{conflicts} conflicting values exceed the enumeration cap of {cap}")]
    TooManyConflicts { conflicts: usize, cap: usize },
    #[error("the degree of an atom on the empty team is undefined")]
    EmptyTeam,
}

/// A value tuple occurring both as some `s1(left)` and some `s2(right)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub value: Vec<String>,
    /// Rows (team order, 0-based) with `s(left) = value`.
    pub left_rows: Vec<usize>,
    /// Rows with `s(right) = value`.
    pub right_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConflictReport {
    pub conflicts: Vec<Conflict>,
}

impl ConflictReport {
    pub fn is_empty(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn values(&self) -> Vec<Vec<String>> {
        self.conflicts.iter().map(|c| c.value.clone()).collect()
    }
}

fn columns(team: &Team, tuple: &VarTuple) -> Result<Vec<usize>, SemanticsError> {
    tuple
        .iter()
        .map(|v| {
            team.column(v)
                .ok_or_else(|| SemanticsError::UnknownVariable(v.clone()))
        })
        .collect()
}

type SideColumns = (Vec<usize>, Vec<usize>);

/// Column indices of both sides, or `None` for the empty team (where any
/// atom is accepted regardless of its variables).
fn resolve(team: &Team, atom: &Atom) -> Result<Option<SideColumns>, SemanticsError> {
    if team.is_empty() {
        return Ok(None);
    }
    Ok(Some((
        columns(team, atom.left())?,
        columns(team, atom.right())?,
    )))
}

fn key(row: &[u32], cols: &[usize]) -> Vec<u32> {
    cols.iter().map(|&c| row[c]).collect()
}

/// Groups rows by value: for every value tuple `v` that occurs on both
/// sides, the rows with `s(left) = v` and the rows with `s(right) = v`.
fn conflict_groups(
    team: &Team,
    lcols: &[usize],
    rcols: &[usize],
) -> Vec<(Vec<u32>, Vec<usize>, Vec<usize>)> {
    let mut groups: HashMap<Vec<u32>, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for (i, row) in team.coded_rows().iter().enumerate() {
        groups.entry(key(row, lcols)).or_default().0.push(i);
        groups.entry(key(row, rcols)).or_default().1.push(i);
    }
    let mut out: Vec<_> = groups
        .into_iter()
        .filter(|(_, (a, b))| !a.is_empty() && !b.is_empty())
        .map(|(k, (a, b))| (k, a, b))
        .collect();
    out.sort();
    out
}

/// `T ⊨ x|y`: no two rows (a row with itself included) have `s1(x) = s2(y)`.
pub fn satisfies_exact(team: &Team, atom: &Atom) -> Result<bool, SemanticsError> {
    let Some((lcols, rcols)) = resolve(team, atom)? else {
        return Ok(true);
    };
    let rows = team.coded_rows();
    if rows.len() <= 8 {
        for a in rows {
            for b in rows {
                if lcols.iter().zip(&rcols).all(|(&l, &r)| a[l] == b[r]) {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    let lefts: std::collections::HashSet<Vec<u32>> = rows.iter().map(|r| key(r, &lcols)).collect();
    Ok(!rows.iter().any(|r| lefts.contains(&key(r, &rcols))))
}

pub fn conflict_report(team: &Team, atom: &Atom) -> Result<ConflictReport, SemanticsError> {
    let Some((lcols, rcols)) = resolve(team, atom)? else {
        return Ok(ConflictReport::default());
    };
    let conflicts = conflict_groups(team, &lcols, &rcols)
        .into_iter()
        .map(|(k, a, b)| Conflict {
            value: k.iter().map(|&c| team.symbol(c).to_string()).collect(),
            left_rows: a,
            right_rows: b,
        })
        .collect();
    Ok(ConflictReport { conflicts })
}

pub fn min_removal(team: &Team, atom: &Atom) -> Result<usize, SemanticsError> {
    min_removal_with_cap(team, atom, DEFAULT_CONFLICT_CAP)
}

/// Least number of rows whose removal makes the team satisfy the exact atom.
///
/// A row whose left and right values coincide conflicts with itself and is
/// always removed. Every other conflicting value `v` needs all its
/// remaining left rows or all its remaining right rows gone; the side
/// choices interact through shared rows, so the size of the union is
/// minimised over all `2^c` choices (depth first, pruned by the best
/// union found so far).
pub fn min_removal_with_cap(team: &Team, atom: &Atom, cap: usize) -> Result<usize, SemanticsError> {
    let Some((lcols, rcols)) = resolve(team, atom)? else {
        return Ok(0);
    };
    let rows = team.coded_rows();
    let forced: Vec<bool> = rows
        .iter()
        .map(|r| lcols.iter().zip(&rcols).all(|(&l, &c)| r[l] == r[c]))
        .collect();
    let forced_count = forced.iter().filter(|&&f| f).count();

    let mut sides: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for (_, a, b) in conflict_groups(team, &lcols, &rcols) {
        let a: Vec<usize> = a.into_iter().filter(|&i| !forced[i]).collect();
        let b: Vec<usize> = b.into_iter().filter(|&i| !forced[i]).collect();
        if !a.is_empty() && !b.is_empty() {
            sides.push((a, b));
        }
    }
    if sides.is_empty() {
        return Ok(forced_count);
    }
    if sides.len() > cap {
        return Err(SemanticsError::TooManyConflicts {
            conflicts: sides.len(),
            cap,
        });
    }

    // Compress the rows that occur in some side to a dense bit universe.
    let mut dense: HashMap<usize, usize> = HashMap::new();
    for (a, b) in &sides {
        for &i in a.iter().chain(b) {
            let next = dense.len();
            dense.entry(i).or_insert(next);
        }
    }
    let words = dense.len().div_ceil(64);
    let to_bits = |rows: &[usize]| {
        let mut bits = vec![0u64; words];
        for i in rows {
            let d = dense[i];
            bits[d / 64] |= 1 << (d % 64);
        }
        bits
    };
    let options: Vec<[Vec<u64>; 2]> = sides
        .iter()
        .map(|(a, b)| [to_bits(a), to_bits(b)])
        .collect();

    let mut best = usize::MAX;
    let mut acc = vec![0u64; words];
    search(&options, 0, &mut acc, &mut best);
    Ok(forced_count + best)
}

fn search(options: &[[Vec<u64>; 2]], depth: usize, acc: &mut Vec<u64>, best: &mut usize) {
    let size: usize = acc.iter().map(|w| w.count_ones() as usize).sum();
    if size >= *best {
        return;
    }
    if depth == options.len() {
        *best = size;
        return;
    }
    for side in &options[depth] {
        let saved = acc.clone();
        for (w, s) in acc.iter_mut().zip(side) {
            *w |= s;
        }
        search(options, depth + 1, acc, best);
        acc.copy_from_slice(&saved);
    }
}

/// `T ⊨ x|_p y`: some subteam of at most `p·|T|` rows can be removed so
/// that the rest satisfies `x|y`.
pub fn satisfies_approx(team: &Team, atom: &Atom) -> Result<bool, SemanticsError> {
    satisfies_approx_with_cap(team, atom, DEFAULT_CONFLICT_CAP)
}

pub fn satisfies_approx_with_cap(
    team: &Team,
    atom: &Atom,
    cap: usize,
) -> Result<bool, SemanticsError> {
    if resolve(team, atom)?.is_none() || atom.degree().is_one() {
        return Ok(true);
    }
    if satisfies_exact(team, atom)? {
        return Ok(true);
    }
    if atom.degree().is_zero() {
        return Ok(false);
    }
    let removal = min_removal_with_cap(team, atom, cap)?;
    Ok(atom.degree().allows(removal, team.len()))
}

/// `min_removal / |T|` in lowest terms: the least degree at which the team
/// satisfies the atom.
pub fn min_degree(team: &Team, atom: &Atom) -> Result<Rational, SemanticsError> {
    if team.is_empty() {
        return Err(SemanticsError::EmptyTeam);
    }
    let removal = min_removal(team, atom)?;
    Ok(Rational::new(removal as u64, team.len() as u64).expect("non-empty team"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variable;

    fn vars(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::new(n).unwrap()).collect()
    }

    fn atom(l: &str, r: &str, d: &str) -> Atom {
        Atom::new(
            VarTuple::parse(l).unwrap(),
            VarTuple::parse(r).unwrap(),
            d.parse().unwrap(),
        )
        .unwrap()
    }

    fn table2() -> Team {
        Team::from_rows(vars(&["x", "y"]), [["0", "0"], ["1", "2"]]).unwrap()
    }

    fn table3() -> Team {
        Team::from_rows(
            vars(&["x", "u", "y", "v"]),
            [
                ["0", "1", "0", "1"],
                ["0", "2", "0", "2"],
                ["1", "2", "2", "1"],
            ],
        )
        .unwrap()
    }

    /// Removal minimum by trying every subteam.
    fn brute_min_removal(team: &Team, a: &Atom) -> usize {
        let n = team.len();
        (0u32..1 << n)
            .filter(|mask| {
                let kept = team.subteam(|i| mask & (1 << i) == 0);
                satisfies_exact(&kept, a).unwrap()
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn exact_examples() {
        assert!(!satisfies_exact(&table2(), &atom("x", "y", "0")).unwrap());
        let empty = Team::empty(vars(&["x"])).unwrap();
        assert!(satisfies_exact(&empty, &atom("q", "r", "0")).unwrap());
        let one = Team::from_rows(vars(&["x", "y"]), [["1", "2"]]).unwrap();
        assert!(!satisfies_exact(&one, &atom("x", "x", "0")).unwrap());
        assert!(satisfies_exact(&one, &atom("x", "y", "0")).unwrap());
    }

    #[test]
    fn conflict_report_examples() {
        let r = conflict_report(&table2(), &atom("x", "y", "0")).unwrap();
        assert_eq!(r.values(), vec![vec!["0".to_string()]]);
        assert_eq!(r.conflicts[0].left_rows, r.conflicts[0].right_rows);
        assert_eq!(r.conflicts[0].left_rows.len(), 1);

        let t3 = table3();
        let r = conflict_report(&t3, &atom("x u", "y v", "0")).unwrap();
        let s = |a: &str, b: &str| vec![a.to_string(), b.to_string()];
        assert_eq!(r.values(), vec![s("0", "1"), s("0", "2")]);
        for c in &r.conflicts {
            assert_eq!(
                c.left_rows, c.right_rows,
                "each conflict is one self-conflicting row"
            );
            assert_eq!(c.left_rows.len(), 1);
        }
        let empty = Team::empty(vars(&["x", "y"])).unwrap();
        assert!(conflict_report(&empty, &atom("x", "y", "0"))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn removal_and_degree_examples() {
        assert_eq!(min_removal(&table2(), &atom("x", "y", "0")).unwrap(), 1);
        assert_eq!(min_removal(&table3(), &atom("x u", "y v", "0")).unwrap(), 2);
        assert_eq!(min_removal(&table3(), &atom("x", "x", "0")).unwrap(), 3);
        assert_eq!(
            min_degree(&table2(), &atom("x", "y", "0"))
                .unwrap()
                .to_string(),
            "1/2"
        );
        assert_eq!(
            min_degree(&table3(), &atom("x u", "y v", "0"))
                .unwrap()
                .to_string(),
            "2/3"
        );
        let empty = Team::empty(vars(&["x", "y"])).unwrap();
        assert_eq!(
            min_degree(&empty, &atom("x", "y", "0")),
            Err(SemanticsError::EmptyTeam)
        );
    }

    #[test]
    fn approx_examples() {
        assert!(satisfies_approx(&table2(), &atom("x", "y", "1/2")).unwrap());
        assert!(!satisfies_approx(&table3(), &atom("x u", "y v", "1/2")).unwrap());
        assert!(satisfies_approx(&table3(), &atom("x u", "y v", "2/3")).unwrap());
        assert!(satisfies_approx(&table3(), &atom("x", "x", "1")).unwrap());
    }

    #[test]
    fn ranking_team_three_fiftieths() {
        // Last year's top 50 against this year's; three names return.
        let rows: Vec<[String; 2]> = (0..50)
            .map(|i| {
                let this_year = if i < 3 {
                    format!("p{}", 10 + i)
                } else {
                    format!("q{i}")
                };
                [format!("p{i}"), this_year]
            })
            .collect();
        let team = Team::from_rows(vars(&["x1", "x2"]), rows).unwrap();
        let a = atom("x1", "x2", "0");
        assert_eq!(min_removal(&team, &a).unwrap(), 3);
        assert_eq!(min_degree(&team, &a).unwrap().to_string(), "3/50");
        assert!(satisfies_approx(&team, &atom("x1", "x2", "3/50")).unwrap());
        assert!(!satisfies_approx(&team, &atom("x1", "x2", "2/50")).unwrap());
    }

    #[test]
    fn unknown_variable() {
        assert_eq!(
            satisfies_exact(&table2(), &atom("x", "z", "0")),
            Err(SemanticsError::UnknownVariable(Variable::new("z").unwrap()))
        );
        assert!(min_removal(&table2(), &atom("z", "x", "0")).is_err());
    }

    #[test]
    fn capacity_error() {
        // Each row i: x = i, y = i + 1 gives a chain of independent conflicts.
        let rows: Vec<[String; 2]> = (0..20)
            .map(|i| [format!("{}", 2 * i), format!("{}", 2 * i + 2)])
            .collect();
        let team = Team::from_rows(vars(&["x", "y"]), rows).unwrap();
        let a = atom("x", "y", "0");
        assert!(matches!(
            min_removal_with_cap(&team, &a, 5),
            Err(SemanticsError::TooManyConflicts { cap: 5, .. })
        ));
        assert_eq!(min_removal_with_cap(&team, &a, 40).unwrap(), 10);
    }

    #[test]
    fn removal_matches_brute_force_on_shared_rows() {
        // Shared rows between different conflicting values.
        let team = Team::from_rows(
            vars(&["x", "y"]),
            [
                ["a", "b"],
                ["b", "c"],
                ["c", "a"],
                ["a", "c"],
                ["d", "a"],
                ["b", "e"],
            ],
        )
        .unwrap();
        let a = atom("x", "y", "0");
        assert_eq!(
            min_removal(&team, &a).unwrap(),
            brute_min_removal(&team, &a)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn team_strategy() -> impl Strategy<Value = Team> {
            prop::collection::vec(prop::collection::vec(0u8..4, 3), 0..=6).prop_map(|rows| {
                Team::from_rows(
                    vars(&["a", "b", "c"]),
                    rows.into_iter()
                        .map(|r| r.into_iter().map(|v| v.to_string()).collect::<Vec<_>>()),
                )
                .unwrap()
            })
        }

        fn atom_strategy() -> impl Strategy<Value = Atom> {
            let var = prop::sample::select(vec!["a", "b", "c"]);
            (1usize..=3)
                .prop_flat_map(move |n| {
                    (
                        prop::collection::vec(var.clone(), n),
                        prop::collection::vec(var.clone(), n),
                        prop::sample::select(vec!["0", "1/4", "1/3", "1/2", "2/3", "1"]),
                    )
                })
                .prop_map(|(l, r, d)| atom(&l.join(" "), &r.join(" "), d))
        }

        proptest! {
            #[test]
            fn min_removal_is_minimal(team in team_strategy(), a in atom_strategy()) {
                prop_assert_eq!(min_removal(&team, &a).unwrap(), brute_min_removal(&team, &a));
            }

            #[test]
            fn downward_closed(team in team_strategy(), a in atom_strategy(), mask in 0u32..64) {
                if satisfies_exact(&team, &a).unwrap() {
                    let sub = team.subteam(|i| mask & (1 << i) != 0);
                    prop_assert!(satisfies_exact(&sub, &a).unwrap());
                }
            }

            #[test]
            fn degree_monotone_and_symmetric(team in team_strategy(), a in atom_strategy(), b in atom_strategy()) {
                let p = a.degree().max(b.degree());
                let q = a.degree().min(b.degree());
                let low = a.with_degree(q).unwrap();
                let high = a.with_degree(p).unwrap();
                if satisfies_approx(&team, &low).unwrap() {
                    prop_assert!(satisfies_approx(&team, &high).unwrap());
                }
                prop_assert_eq!(
                    satisfies_approx(&team, &a).unwrap(),
                    satisfies_approx(&team, &a.swapped()).unwrap()
                );
            }

            #[test]
            fn degree_zero_is_exact(team in team_strategy(), a in atom_strategy()) {
                let exact = a.with_degree(Rational::ZERO).unwrap();
                prop_assert_eq!(satisfies_approx(&team, &exact).unwrap(), satisfies_exact(&team, &a).unwrap());
            }

            #[test]
            fn min_degree_is_threshold(team in team_strategy(), a in atom_strategy()) {
                prop_assume!(!team.is_empty());
                let d = min_degree(&team, &a).unwrap();
                prop_assert!(satisfies_approx(&team, &a.with_degree(d).unwrap()).unwrap());
                prop_assert_eq!(satisfies_approx(&team, &a).unwrap(), a.degree() >= d);
            }

            #[test]
            fn empty_team_satisfies_everything(a in atom_strategy()) {
                let empty = Team::empty(vars(&["a", "b", "c"])).unwrap();
                prop_assert!(satisfies_approx(&empty, &a).unwrap());
            }
        }
    }
}
