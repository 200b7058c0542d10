//! Value types shared by every other module: variables, tuples, degrees,
//! atoms and teams.

mod rational;
mod team;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use rational::Rational;
pub use team::{Assignment, Team};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid variable name `{0}`")]
    BadIdentifier(String),
    #[error("variable tuples must be non-empty")]
    EmptyTuple,
    #[error("tuple lengths differ: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("position {position} out of range for tuple of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("rational with zero denominator")]
    ZeroDenominator,
    #[error("invalid rational `{0}`")]
    BadRational(String),
    #[error("degree {0} is larger than 1")]
    DegreeAboveOne(Rational),
    #[error("duplicate column `{0}` in team schema")]
    DuplicateColumn(String),
    #[error("row {row} has {found} values, schema has {expected} columns")]
    RowWidth {
        row: usize,
        found: usize,
        expected: usize,
    },
}

/// A named variable. Two variables are equal iff their names are.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: &str) -> Result<Self, ModelError> {
        let mut bytes = name.bytes();
        let ok = match bytes.next() {
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
            }
            _ => false,
        };
        if !ok {
            return Err(ModelError::BadIdentifier(name.to_string()));
        }
        Ok(Variable(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Non-empty ordered list of variables; repeats are allowed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarTuple(Vec<Variable>);

impl VarTuple {
    pub fn new(items: Vec<Variable>) -> Result<Self, ModelError> {
        if items.is_empty() {
            return Err(ModelError::EmptyTuple);
        }
        Ok(VarTuple(items))
    }

    /// Parses a whitespace separated list of names.
    pub fn parse(names: &str) -> Result<Self, ModelError> {
        let items = names
            .split_whitespace()
            .map(Variable::new)
            .collect::<Result<Vec<_>, _>>()?;
        VarTuple::new(items)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn items(&self) -> &[Variable] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Variable> {
        self.0.iter()
    }

    /// 1-based projection `(t)_i`.
    pub fn project(&self, position: usize) -> Result<&Variable, ModelError> {
        if position == 0 || position > self.0.len() {
            return Err(ModelError::PositionOutOfRange {
                position,
                len: self.0.len(),
            });
        }
        Ok(&self.0[position - 1])
    }

    pub fn var_set(&self) -> BTreeSet<Variable> {
        self.0.iter().cloned().collect()
    }

    pub fn concat(&self, other: &VarTuple) -> VarTuple {
        let mut items = self.0.clone();
        items.extend(other.0.iter().cloned());
        VarTuple(items)
    }
}

impl fmt::Display for VarTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VarTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{self}>")
    }
}

impl std::ops::Index<usize> for VarTuple {
    type Output = Variable;

    fn index(&self, index: usize) -> &Variable {
        &self.0[index]
    }
}

impl<'a> IntoIterator for &'a VarTuple {
    type Item = &'a Variable;
    type IntoIter = std::slice::Iter<'a, Variable>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// An approximate exclusion atom `left |_degree right`. Degree 0 is the exact atom.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    left: VarTuple,
    right: VarTuple,
    degree: Rational,
}

impl Atom {
    pub fn new(left: VarTuple, right: VarTuple, degree: Rational) -> Result<Self, ModelError> {
        if left.len() != right.len() {
            return Err(ModelError::ArityMismatch {
                left: left.len(),
                right: right.len(),
            });
        }
        if degree > Rational::ONE {
            return Err(ModelError::DegreeAboveOne(degree));
        }
        Ok(Atom {
            left,
            right,
            degree,
        })
    }

    pub fn exact(left: VarTuple, right: VarTuple) -> Result<Self, ModelError> {
        Atom::new(left, right, Rational::ZERO)
    }

    /// Builds an atom from pairs of variables, one pair per position.
    pub fn from_pairs<I>(pairs: I, degree: Rational) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (Variable, Variable)>,
    {
        let (left, right): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Atom::new(VarTuple::new(left)?, VarTuple::new(right)?, degree)
    }

    pub fn left(&self) -> &VarTuple {
        &self.left
    }

    pub fn right(&self) -> &VarTuple {
        &self.right
    }

    pub fn degree(&self) -> Rational {
        self.degree
    }

    pub fn arity(&self) -> usize {
        self.left.len()
    }

    pub fn is_contradictory(&self) -> bool {
        self.left == self.right && self.degree < Rational::ONE
    }

    pub fn swapped(&self) -> Atom {
        Atom {
            left: self.right.clone(),
            right: self.left.clone(),
            degree: self.degree,
        }
    }

    pub fn with_degree(&self, degree: Rational) -> Result<Atom, ModelError> {
        Atom::new(self.left.clone(), self.right.clone(), degree)
    }

    /// Positionwise pairs, duplicates kept, in order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Variable, &Variable)> + '_ {
        self.left.iter().zip(self.right.iter())
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.left.iter().chain(self.right.iter()).cloned().collect()
    }

    /// Same tuples, possibly different degree.
    pub fn same_tuples(&self, other: &Atom) -> bool {
        self.left == other.left && self.right == other.right
    }
}

impl fmt::Display for Atom {
    /// Human-readable notation: `x1 x2 | y1 y2` or `x1 |[1/4]| y1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree.is_zero() {
            write!(f, "{} | {}", self.left, self.right)
        } else {
            write!(f, "{} |[{}]| {}", self.left, self.degree, self.right)
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Variables of `atoms`, in order of first occurrence.
pub fn variables_in_order<'a, I>(atoms: I) -> Vec<Variable>
where
    I: IntoIterator<Item = &'a Atom>,
{
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for atom in atoms {
        for v in atom.left.iter().chain(atom.right.iter()) {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        }
    }
    out
}
