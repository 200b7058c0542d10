//! The proof system for approximate exclusion atoms, derivation objects,
//! a step-by-step checker, and a certificate synthesizer.
//!
//! Rules (degree-0 instances are the exact-atom rules):
//!
//! | rule | schema |
//! |------|--------|
//! | A1 | `x \|_p x ⊢ y \|_0 z` for `p < 1` |
//! | A2 | `x \|_p y ⊢ y \|_p x` |
//! | A3 | `x \|_p y ⊢ xu \|_p yv` |
//! | A4 | `xuu \|_p yvv ⊢ xu \|_p yv` |
//! | A5 | `xyz \|_p uvw ⊢ xzy \|_p uwv` with `\|x\|=\|u\|`, `\|y\|=\|v\|` |
//! | A6 | `xw \|_p yw ⊢ zz \|_p xy` |
//! | A7 | `x \|_q y ⊢ x \|_p y` for `q ≤ p ≤ 1` |
//! | A8 | `⊢ x \|_1 y` |
//!
//! `PERM` and `CONTRACT` are macros over A5 (and A4) that [`expand_macros`]
//! rewrites into primitive steps.

mod cert;
mod check;
mod expand;
mod synth;

use std::fmt;
use std::str::FromStr;

use crate::model::{Atom, Rational, VarTuple};

pub use cert::{certificate_from_json, certificate_to_json, CertificateError};
pub use check::{check_derivation, check_step, CheckFailure, CheckReport, StepError};
pub use expand::expand_macros;
pub use synth::{synthesize, SynthesisError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleName {
    Hyp,
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    Perm,
    Contract,
}

impl RuleName {
    pub const ALL: [RuleName; 11] = [
        RuleName::Hyp,
        RuleName::A1,
        RuleName::A2,
        RuleName::A3,
        RuleName::A4,
        RuleName::A5,
        RuleName::A6,
        RuleName::A7,
        RuleName::A8,
        RuleName::Perm,
        RuleName::Contract,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleName::Hyp => "HYP",
            RuleName::A1 => "A1",
            RuleName::A2 => "A2",
            RuleName::A3 => "A3",
            RuleName::A4 => "A4",
            RuleName::A5 => "A5",
            RuleName::A6 => "A6",
            RuleName::A7 => "A7",
            RuleName::A8 => "A8",
            RuleName::Perm => "PERM",
            RuleName::Contract => "CONTRACT",
        }
    }

    /// Number of premises the rule consumes.
    pub fn arity(self) -> usize {
        match self {
            RuleName::Hyp | RuleName::A8 => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleName::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// Rule-specific data recorded with a step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Witness {
    /// HYP, A1, A2, A8.
    None,
    /// A3: number of pairs appended.
    Appended(usize),
    /// A4: length of the duplicated trailing block.
    Block(usize),
    /// A5: lengths of the three blocks `x`, `y`, `z` of `xyz | uvw`.
    Blocks([usize; 3]),
    /// A6: length of the shared suffix `w` and the tuple `z`.
    Shared { suffix: usize, z: VarTuple },
    /// A7: the raised degree.
    Degree(Rational),
    /// PERM and CONTRACT: conclusion position `i` takes premise position `perm[i]`
    /// (0-based; for CONTRACT this is applied before dropping the last pair).
    Perm(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DerivationStep {
    /// 1-based step number.
    pub index: usize,
    pub conclusion: Atom,
    pub rule: RuleName,
    /// Indices of earlier steps.
    pub premises: Vec<usize>,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub assumptions: Vec<Atom>,
    pub steps: Vec<DerivationStep>,
    pub goal: Atom,
}

impl Derivation {
    pub fn rules(&self) -> Vec<RuleName> {
        self.steps.iter().map(|s| s.rule).collect()
    }
}

/// Applies a position map to both tuples of an atom.
pub(crate) fn permute(atom: &Atom, perm: &[usize]) -> Atom {
    let l = perm.iter().map(|&i| atom.left()[i].clone()).collect();
    let r = perm.iter().map(|&i| atom.right()[i].clone()).collect();
    Atom::new(
        VarTuple::new(l).unwrap(),
        VarTuple::new(r).unwrap(),
        atom.degree(),
    )
    .unwrap()
}
