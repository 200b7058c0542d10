//! Implication of approximate exclusion atoms over teams.
//!
//! An exclusion atom `x |_p y` holds in a team (a set of rows) when at most
//! `p·|T|` rows can be removed so that no row's `x` value equals any row's
//! `y` value. [`decision::decide`] settles `Σ ⊢ x |_p y` for `p < 1/2` and
//! `p = 1`; a positive answer comes with a derivation
//! ([`calculus::synthesize`]) and a negative one with a countermodel
//! ([`counterexample::counterexample`]). [`oracle`] is a brute-force
//! cross-check over bounded teams.
//!
//! ```
//! use exclusion::syntax::parse_atom;
//! use exclusion::decision::{decide, Verdict};
//!
//! let sigma = [parse_atom("excl(x1 w1 ; y1 w1)").unwrap()];
//! let goal = parse_atom("excl(z1 z1 ; x1 y1)").unwrap();
//! assert!(decide(&sigma, &goal).unwrap().holds());
//! ```

pub mod calculus;
pub mod cli;
pub mod counterexample;
pub mod decision;
pub mod model;
pub mod oracle;
pub mod pairs;
pub mod semantics;
pub mod syntax;

pub use decision::{decide, Verdict};
pub use model::{Atom, Rational, Team, VarTuple, Variable};
