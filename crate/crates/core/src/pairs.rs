//! Set representations of atoms: positionwise variable pairs, correspondence
//! sets, end-constant form, and the two syntactic implication tests the
//! decision procedure is built from.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::model::{Atom, Variable};

/// An ordered pair `⟨left, right⟩` taken from one position of an atom.
pub type Pair = (Variable, Variable);

/// `S(x|y)`: the set of positionwise pairs of an atom. Degrees are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairSet {
    pairs: BTreeSet<Pair>,
}

impl PairSet {
    pub fn of(atom: &Atom) -> Self {
        PairSet {
            pairs: atom.pairs().map(|(a, b)| (a.clone(), b.clone())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, left: &Variable, right: &Variable) -> bool {
        // BTreeSet<(A, B)> cannot be queried with borrowed halves.
        self.pairs.iter().any(|(a, b)| a == left && b == right)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pair> {
        self.pairs.iter()
    }

    pub fn is_subset(&self, other: &PairSet) -> bool {
        self.pairs.is_subset(&other.pairs)
    }
}

impl FromIterator<Pair> for PairSet {
    fn from_iter<I: IntoIterator<Item = Pair>>(iter: I) -> Self {
        PairSet {
            pairs: iter.into_iter().collect(),
        }
    }
}

pub fn pair_set(atom: &Atom) -> PairSet {
    PairSet::of(atom)
}

/// Which tuple of an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Correspondence sets of an atom: for a variable occurring in the left
/// tuple, the right-tuple variables it is paired with, and vice versa.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorrespondenceMap {
    left: BTreeMap<Variable, BTreeSet<Variable>>,
    right: BTreeMap<Variable, BTreeSet<Variable>>,
}

impl CorrespondenceMap {
    /// `C_d` for a variable `d` occurring on `side`; empty if it does not occur there.
    pub fn of(&self, side: Side, var: &Variable) -> BTreeSet<Variable> {
        let map = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        map.get(var).cloned().unwrap_or_default()
    }

    fn get(&self, side: Side, var: &Variable) -> Option<&BTreeSet<Variable>> {
        match side {
            Side::Left => self.left.get(var),
            Side::Right => self.right.get(var),
        }
    }
}

pub fn correspondence_sets(atom: &Atom) -> CorrespondenceMap {
    let mut map = CorrespondenceMap::default();
    for (a, b) in atom.pairs() {
        map.left.entry(a.clone()).or_default().insert(b.clone());
        map.right.entry(b.clone()).or_default().insert(a.clone());
    }
    map
}

/// PairSet-equal atom with duplicates removed, non-diagonal pairs first and
/// diagonal pairs `⟨w,w⟩` last, each group in first-occurrence order.
pub fn end_constant_form(atom: &Atom) -> Atom {
    let mut seen = HashSet::new();
    let mut front = Vec::new();
    let mut back = Vec::new();
    for (a, b) in atom.pairs() {
        if seen.insert((a, b)) {
            let pair = (a.clone(), b.clone());
            if a == b {
                back.push(pair);
            } else {
                front.push(pair);
            }
        }
    }
    front.extend(back);
    Atom::from_pairs(front, atom.degree()).expect("an atom has at least one pair")
}

/// `S(src) ⊆ S(dst)` and `src.degree ≤ dst.degree`: `dst` follows from `src`
/// by appending, contracting, permuting and raising the degree.
pub fn subset_derivable(src: &Atom, dst: &Atom) -> bool {
    src.degree() <= dst.degree() && pair_set(src).is_subset(&pair_set(dst))
}

/// Where an E6-style step can take `src` to `dst`: the side of `dst` whose
/// variables become the duplicated tuple, and, for every non-diagonal pair
/// of `src`, the first 0-based position `i` of that side with both pair
/// members in the correspondence set of `(d)_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E6Witness {
    pub side: Side,
    pub positions: BTreeMap<Pair, usize>,
}

/// Tests whether every pair of `src` is diagonal over `all_vars`, or lies in
/// `C_{(d)_i} × C_{(d)_i}` for some position `i` of one side `d` of `dst`.
/// The left side is tried first. Degrees are not consulted.
pub fn e6_condition(src: &Atom, dst: &Atom, all_vars: &BTreeSet<Variable>) -> Option<E6Witness> {
    let corr = correspondence_sets(dst);
    let src_pairs = pair_set(src);
    [Side::Left, Side::Right].into_iter().find_map(|side| {
        let tuple = match side {
            Side::Left => dst.left(),
            Side::Right => dst.right(),
        };
        let mut positions = BTreeMap::new();
        for (a, b) in src_pairs.iter() {
            if a == b && all_vars.contains(a) {
                continue;
            }
            let found = tuple.iter().position(|d| {
                corr.get(side, d)
                    .is_some_and(|c| c.contains(a) && c.contains(b))
            })?;
            positions.insert((a.clone(), b.clone()), found);
        }
        Some(E6Witness { side, positions })
    })
}
