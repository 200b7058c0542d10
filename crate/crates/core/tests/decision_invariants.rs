use exclusion::counterexample::{counterexample, rows_for, CounterexampleError};
use exclusion::decision::{decide, decide_witness, Verdict};
use exclusion::model::{Atom, Rational, VarTuple, Variable};
use exclusion::oracle::{default_bounds, oracle_implies, OracleBounds, DEFAULT_BUDGET};
use exclusion::semantics::{min_removal, satisfies_approx};
use proptest::prelude::*;

fn var(i: usize) -> Variable {
    Variable::new(&format!("v{i}")).unwrap()
}

fn degrees() -> Vec<(u64, u64)> {
    vec![(0, 1), (1, 5), (1, 4), (1, 3), (2, 5), (3, 7)]
}

fn atom_strategy(vars: usize, max_arity: usize) -> impl Strategy<Value = Atom> {
    (1..=max_arity)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec(0..vars, n),
                prop::collection::vec(0..vars, n),
                prop::sample::select(degrees()),
            )
        })
        .prop_map(|(l, r, (n, d))| {
            Atom::new(
                VarTuple::new(l.into_iter().map(var).collect()).unwrap(),
                VarTuple::new(r.into_iter().map(var).collect()).unwrap(),
                Rational::new(n, d).unwrap(),
            )
            .unwrap()
        })
}

fn holds(sigma: &[Atom], goal: &Atom) -> bool {
    decide_witness(sigma, goal).unwrap().is_some()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// Adding assumptions never loses a consequence.
    #[test]
    fn monotone_in_sigma(
        sigma in prop::collection::vec(atom_strategy(4, 3), 0..=3),
        more in prop::collection::vec(atom_strategy(4, 3), 0..=3),
        goal in atom_strategy(4, 3),
    ) {
        if holds(&sigma, &goal) {
            let mut bigger = more.clone();
            bigger.extend(sigma.iter().cloned());
            prop_assert!(holds(&bigger, &goal));
        }
    }

    /// A consequence of Σ follows from one assumption (or none): the
    /// verdict never needs two atoms together.
    #[test]
    fn single_assumption_suffices(sigma in prop::collection::vec(atom_strategy(4, 3), 1..=4), goal in atom_strategy(4, 3)) {
        if holds(&sigma, &goal) {
            let alone = holds(&[], &goal) || sigma.iter().any(|a| holds(std::slice::from_ref(a), &goal));
            prop_assert!(alone);
        }
    }

    /// Raising the goal's degree keeps it implied.
    #[test]
    fn monotone_in_degree(sigma in prop::collection::vec(atom_strategy(4, 3), 0..=3), goal in atom_strategy(4, 3)) {
        if holds(&sigma, &goal) {
            for (n, d) in degrees() {
                let p = Rational::new(n, d).unwrap();
                if p >= goal.degree() {
                    prop_assert!(holds(&sigma, &goal.with_degree(p).unwrap()));
                }
            }
        }
    }

    /// Order of assumptions and duplicates do not change the verdict.
    #[test]
    fn order_invariant(sigma in prop::collection::vec(atom_strategy(4, 3), 0..=4), goal in atom_strategy(4, 3)) {
        let mut rev = sigma.clone();
        rev.reverse();
        rev.extend(sigma.iter().cloned());
        prop_assert_eq!(holds(&sigma, &goal), holds(&rev, &goal));
    }

    /// Every failure comes with a countermodel of at most k rows. Rows can
    /// coincide when the value classes force them equal, so the count may be
    /// smaller.
    #[test]
    fn failures_have_countermodels(sigma in prop::collection::vec(atom_strategy(5, 4), 0..=4), goal in atom_strategy(5, 4)) {
        match counterexample(&sigma, &goal) {
            Ok(cx) => {
                prop_assert!(!satisfies_approx(&cx.team, &goal).unwrap());
                for a in &sigma {
                    prop_assert!(satisfies_approx(&cx.team, a).unwrap());
                }
                if !goal.is_contradictory() {
                    prop_assert!(cx.team.len() as u64 <= cx.plan.k);
                    let removal = min_removal(&cx.team, &goal).unwrap() as u64;
                    prop_assert!(removal * cx.plan.k >= cx.plan.l * cx.team.len() as u64);
                }
                prop_assert!(cx.team.distinct_values() as u128 <= cx.domain_bound);
            }
            Err(CounterexampleError::ImplicationHolds) => prop_assert!(holds(&sigma, &goal)),
            // Semantically implied without a derivation; the bounded search
            // must find no countermodel either.
            Err(CounterexampleError::UnderivableConsequence(a)) => {
                prop_assert!(!holds(&sigma, &goal));
                prop_assert!(a.degree() <= goal.degree());
                let single = [a];
                let bounds = OracleBounds { max_rows: 2, domain: 2 * goal.arity() + 2 };
                if let Ok(o) = oracle_implies(&single, &goal.with_degree(Rational::ZERO).unwrap(), bounds, 2_000_000) {
                    prop_assert!(o.implied());
                }
            }
            // No repeated-block team fits between the degrees; the rules do
            // not derive the goal either.
            Err(CounterexampleError::Unseparated) => prop_assert!(!holds(&sigma, &goal)),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    /// (l, k) is the smallest team size with p < l/k ≤ min(r, 1/2).
    #[test]
    fn rows_are_minimal((pn, pd) in (0u64..40).prop_flat_map(|n| (Just(n), 2 * n + 1..2 * n + 60)), rn in 1u64..60, rd in 1u64..60) {
        let p = Rational::new(pn, pd).unwrap();
        let r = Rational::new(rn.min(rd), rd).unwrap();
        prop_assume!(r > p);
        let (l, k) = rows_for(p, Some(r));
        let frac = Rational::new(l, k).unwrap();
        prop_assert!(p < frac && frac <= r && frac <= Rational::HALF);
        for k2 in 2..k {
            let l2 = p.floor_times(k2) as u64 + 1;
            let f2 = Rational::new(l2, k2).unwrap();
            prop_assert!(!(2 * l2 <= k2 && f2 <= r), "k = {k2} already works");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Cross-check against bounded search on tiny instances.
    #[test]
    fn agrees_with_oracle(sigma in prop::collection::vec(atom_strategy(3, 2), 0..=2), goal in atom_strategy(3, 2)) {
        let bounds = default_bounds(&sigma, &goal).unwrap();
        if let Ok(o) = oracle_implies(&sigma, &goal, bounds, 200_000) {
            prop_assert_eq!(o.implied(), holds(&sigma, &goal));
        }
    }
}

#[test]
fn verdict_kinds() {
    let a = |l: &str, r: &str, d: &str| {
        Atom::new(
            VarTuple::parse(l).unwrap(),
            VarTuple::parse(r).unwrap(),
            d.parse().unwrap(),
        )
        .unwrap()
    };
    let cases = [
        (vec![], a("x", "y", "1"), "trivial-degree-1"),
        (vec![a("y", "x", "0")], a("x", "y", "1/4"), "membership"),
        (vec![a("u", "u", "1/3")], a("x", "y", "0"), "contradictory"),
        (vec![a("x", "y", "0")], a("x z", "y w", "0"), "subset"),
        (vec![a("x w", "y w", "0")], a("z z", "x y", "0"), "e6"),
        (
            vec![a("a", "b", "0")],
            a("c", "c", "0"),
            "contradictory-goal",
        ),
        (vec![], a("x", "y", "0"), "no-rule-applies"),
    ];
    for (sigma, goal, kind) in cases {
        assert_eq!(decide(&sigma, &goal).unwrap().kind(), kind, "{goal}");
    }
    assert!(
        matches!(decide(&[], &a("x", "y", "2/5")).unwrap(), Verdict::Fails(p) if (p.l, p.k) == (1, 2))
    );
}

/// Equalities chained through three goal positions: the assumption implies
/// the goal although no single rule application connects them. The
/// procedure answers for derivability, so the verdict is FALSE while the
/// exhaustive search finds no countermodel.
#[test]
fn chained_positions_escape_the_rules() {
    let a = |l: &str, r: &str| {
        Atom::exact(VarTuple::parse(l).unwrap(), VarTuple::parse(r).unwrap()).unwrap()
    };
    let sigma = [a("v0", "v3")];
    let goal = a("v1 v3 v1", "v4 v4 v0");
    assert!(!holds(&sigma, &goal));
    let o = oracle_implies(
        &sigma,
        &goal,
        default_bounds(&sigma, &goal).unwrap(),
        DEFAULT_BUDGET,
    )
    .unwrap();
    assert!(o.implied());
    assert!(matches!(
        counterexample(&sigma, &goal),
        Err(CounterexampleError::UnderivableConsequence(_))
    ));
}
