//! JSON form of a derivation.
//!
//! ```json
//! {
//!   "format": 1,
//!   "assumptions": ["excl(x1 w1 ; y1 w1)"],
//!   "steps": [
//!     {"i": 1, "rule": "HYP", "premises": [], "conclusion": "excl(x1 w1 ; y1 w1)", "witness": null},
//!     {"i": 2, "rule": "A6", "premises": [1], "conclusion": "excl(z1 z1 ; x1 y1)",
//!      "witness": {"suffix": 1, "z": ["z1"]}}
//!   ],
//!   "goal": "excl(z1 z1 ; x1 y1)"
//! }
//! ```
//!
//! Other witnesses: `{"appended": k}` (A3), `{"block": b}` (A4),
//! `{"blocks": [a, b, c]}` (A5), `{"degree": "1/4"}` (A7),
//! `{"perm": [..]}` (PERM, CONTRACT; 0-based).

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::{Derivation, DerivationStep, RuleName, Witness};
use crate::model::{Atom, Rational, VarTuple, Variable};
use crate::syntax::{parse_atom, render_atom};

pub const CERTIFICATE_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("invalid certificate JSON: {0}")]
    Json(String),
    #[error("unsupported certificate format {0}")]
    Format(u32),
    #[error("step {step}: {message}")]
    Step { step: usize, message: String },
    #[error("{0}")]
    Atom(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertJson {
    format: u32,
    assumptions: Vec<String>,
    steps: Vec<StepJson>,
    goal: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepJson {
    i: usize,
    rule: String,
    premises: Vec<usize>,
    conclusion: String,
    witness: Value,
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::None => Value::Null,
        Witness::Appended(k) => json!({ "appended": k }),
        Witness::Block(b) => json!({ "block": b }),
        Witness::Blocks(bs) => json!({ "blocks": bs }),
        Witness::Shared { suffix, z } => {
            json!({ "suffix": suffix, "z": z.iter().map(Variable::name).collect::<Vec<_>>() })
        }
        Witness::Degree(d) => json!({ "degree": d.to_string() }),
        Witness::Perm(p) => json!({ "perm": p }),
    }
}

pub fn certificate_to_json(d: &Derivation) -> String {
    let cert = CertJson {
        format: CERTIFICATE_FORMAT,
        assumptions: d.assumptions.iter().map(render_atom).collect(),
        steps: d
            .steps
            .iter()
            .map(|s| StepJson {
                i: s.index,
                rule: s.rule.to_string(),
                premises: s.premises.clone(),
                conclusion: render_atom(&s.conclusion),
                witness: witness_json(&s.witness),
            })
            .collect(),
        goal: render_atom(&d.goal),
    };
    serde_json::to_string_pretty(&cert).expect("plain data serializes")
}

fn atom(text: &str) -> Result<Atom, CertificateError> {
    parse_atom(text).map_err(|e| CertificateError::Atom(format!("`{text}`: {e}")))
}

fn witness_from(step: usize, rule: RuleName, v: &Value) -> Result<Witness, CertificateError> {
    let err = |message: String| CertificateError::Step { step, message };
    let obj = |key: &str| -> Result<&Value, CertificateError> {
        match v.as_object() {
            Some(m) if m.len() == 1 && m.contains_key(key) => Ok(&m[key]),
            _ => Err(err(format!(
                "{rule} expects a witness of the form {{\"{key}\": ..}}, found {v}"
            ))),
        }
    };
    let count = |x: &Value| -> Result<usize, CertificateError> {
        x.as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| err(format!("expected a non-negative integer, found {x}")))
    };
    let counts = |x: &Value| -> Result<Vec<usize>, CertificateError> {
        x.as_array()
            .ok_or_else(|| err(format!("expected an array, found {x}")))?
            .iter()
            .map(count)
            .collect()
    };
    match rule {
        RuleName::Hyp | RuleName::A1 | RuleName::A2 | RuleName::A8 => {
            if v.is_null() {
                Ok(Witness::None)
            } else {
                Err(err(format!("{rule} takes no witness, found {v}")))
            }
        }
        RuleName::A3 => Ok(Witness::Appended(count(obj("appended")?)?)),
        RuleName::A4 => Ok(Witness::Block(count(obj("block")?)?)),
        RuleName::A5 => {
            let bs = counts(obj("blocks")?)?;
            let arr: [usize; 3] = bs
                .try_into()
                .map_err(|_| err("A5 needs exactly three block lengths".into()))?;
            Ok(Witness::Blocks(arr))
        }
        RuleName::A6 => {
            let m = v.as_object().filter(|m| m.len() == 2).ok_or_else(|| {
                err(format!(
                    "A6 expects {{\"suffix\": .., \"z\": [..]}}, found {v}"
                ))
            })?;
            let suffix = count(
                m.get("suffix")
                    .ok_or_else(|| err("A6 witness lacks `suffix`".into()))?,
            )?;
            let z = m
                .get("z")
                .and_then(Value::as_array)
                .ok_or_else(|| err("A6 witness lacks the array `z`".into()))?
                .iter()
                .map(|x| {
                    x.as_str()
                        .ok_or_else(|| err(format!("expected a variable name, found {x}")))
                        .and_then(|s| Variable::new(s).map_err(|e| err(e.to_string())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let z = VarTuple::new(z).map_err(|e| err(e.to_string()))?;
            Ok(Witness::Shared { suffix, z })
        }
        RuleName::A7 => {
            let d = obj("degree")?;
            let text = d
                .as_str()
                .ok_or_else(|| err(format!("degree must be a string, found {d}")))?;
            let r: Rational = text
                .parse()
                .map_err(|e: crate::model::ModelError| err(e.to_string()))?;
            Ok(Witness::Degree(r))
        }
        RuleName::Perm | RuleName::Contract => Ok(Witness::Perm(counts(obj("perm")?)?)),
    }
}

/// Parses a certificate. Only the shape is validated here; soundness is
/// the job of [`super::check_derivation`].
pub fn certificate_from_json(text: &str) -> Result<Derivation, CertificateError> {
    let cert: CertJson =
        serde_json::from_str(text).map_err(|e| CertificateError::Json(e.to_string()))?;
    if cert.format != CERTIFICATE_FORMAT {
        return Err(CertificateError::Format(cert.format));
    }
    let assumptions = cert
        .assumptions
        .iter()
        .map(|a| atom(a))
        .collect::<Result<Vec<_>, _>>()?;
    let steps = cert
        .steps
        .iter()
        .map(|s| {
            let rule: RuleName = s
                .rule
                .parse()
                .map_err(|message| CertificateError::Step { step: s.i, message })?;
            Ok(DerivationStep {
                index: s.i,
                conclusion: atom(&s.conclusion)?,
                rule,
                premises: s.premises.clone(),
                witness: witness_from(s.i, rule, &s.witness)?,
            })
        })
        .collect::<Result<Vec<_>, CertificateError>>()?;
    Ok(Derivation {
        assumptions,
        steps,
        goal: atom(&cert.goal)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::synthesize;
    use crate::decision::decide_witness;

    fn a(l: &str, r: &str, d: &str) -> Atom {
        Atom::new(
            VarTuple::parse(l).unwrap(),
            VarTuple::parse(r).unwrap(),
            d.parse().unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let cases = [
            (
                vec![a("x1 w1 w2", "y1 w1 w2", "0")],
                a("z1 z1", "x1 y1", "0"),
            ),
            (vec![a("a a c", "b b d", "0")], a("e c a", "f d b", "1/4")),
            (vec![a("u", "u", "1/4")], a("p", "q", "1/3")),
            (vec![], a("p", "q", "1")),
        ];
        for (sigma, goal) in cases {
            let w = decide_witness(&sigma, &goal).unwrap().unwrap();
            let d = synthesize(&sigma, &goal, &w).unwrap();
            let text = certificate_to_json(&d);
            let back = certificate_from_json(&text).unwrap();
            assert_eq!(back, d);
            assert_eq!(certificate_to_json(&back), text);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let bad = [
            r#"{"format":2,"assumptions":[],"steps":[],"goal":"excl(a ; b)"}"#,
            r#"{"format":1,"assumptions":[],"steps":[{"i":1,"rule":"A9","premises":[],"conclusion":"excl(a ; b)","witness":null}],"goal":"excl(a ; b)"}"#,
            r#"{"format":1,"assumptions":[],"steps":[{"i":1,"rule":"A8","premises":[],"conclusion":"excl(a ; b)","witness":{"block":1}}],"goal":"excl(a ; b)"}"#,
            r#"{"format":1,"assumptions":[],"steps":[{"i":1,"rule":"A5","premises":[],"conclusion":"excl(a ; b)","witness":{"blocks":[1,2]}}],"goal":"excl(a ; b)"}"#,
            r#"{"format":1,"assumptions":["excl(a ;)"],"steps":[],"goal":"excl(a ; b)"}"#,
            r#"{"format":1,"assumptions":[],"steps":[],"goal":"excl(a ; b)","extra":0}"#,
            "not json",
        ];
        for text in bad {
            assert!(certificate_from_json(text).is_err(), "{text}");
        }
    }
}
