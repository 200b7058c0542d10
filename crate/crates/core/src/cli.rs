//! The `excl` command-line front end.
//!
//! Every command is a function from parsed arguments to an exit code, with
//! output written to caller-supplied streams so tests can run it in
//! process. Exit codes: 0 decided, 1 internal error (or a rejected
//! certificate), 2 parse or I/O error, 3 unsupported degree, 4 command does
//! not match the verdict, 5 capacity exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::calculus::{
    certificate_from_json, certificate_to_json, check_derivation, expand_macros, synthesize,
    Derivation,
};
use crate::counterexample::{self, Counterexample, CounterexampleError};
use crate::decision::{self, DecisionError, HoldsWitness, Verdict};
use crate::model::{Atom, ModelError, Rational, Team, Variable};
use crate::oracle::{self, OracleBounds, OracleError};
use crate::semantics::{min_removal_with_cap, SemanticsError, DEFAULT_CONFLICT_CAP};
use crate::syntax::{parse_assumptions, parse_atom, render_atom};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_WRONG_DIRECTION: i32 = 4;
pub const EXIT_CAPACITY: i32 = 5;

const FORMAT: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "excl",
    version,
    about = "Decide, certify and refute implications of exclusion atoms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the assumptions imply the goal.
    Check {
        /// Assumption file, one atom per line (`-` for standard input).
        sigma: PathBuf,
        /// Goal atom, e.g. `excl[1/4](x1 ; y1)`.
        goal: String,
        #[arg(long)]
        json: bool,
        /// Write the derivation (holds) or the counterexample (fails) here.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Report elapsed time; output is no longer reproducible.
        #[arg(long)]
        timing: bool,
    },
    /// Evaluate an atom on a CSV team.
    Eval {
        team: PathBuf,
        atom: String,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = DEFAULT_CONFLICT_CAP)]
        conflict_cap: usize,
    },
    /// Write a verified counterexample team for a failing implication.
    Counterexample {
        sigma: PathBuf,
        goal: String,
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write a checked derivation for a valid implication.
    Derive {
        sigma: PathBuf,
        goal: String,
        out: PathBuf,
        /// Replace PERM and CONTRACT steps by primitive rules.
        #[arg(long)]
        expand: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compare the decision with brute-force search over bounded teams.
    OracleCheck {
        sigma: PathBuf,
        goal: String,
        /// Defaults to the counterexample construction's row count.
        #[arg(long)]
        max_rows: Option<usize>,
        /// Defaults to the counterexample construction's domain bound.
        #[arg(long)]
        domain: Option<usize>,
        #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check a derivation certificate.
    VerifyCertificate {
        certificate: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

/// A failure mapped to an exit code and a message for standard error.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<DecisionError> for Failure {
    fn from(e: DecisionError) -> Self {
        Failure::new(EXIT_UNSUPPORTED, e.to_string())
    }
}

impl From<CounterexampleError> for Failure {
    fn from(e: CounterexampleError) -> Self {
        let code = match &e {
            CounterexampleError::Decision(_) => EXIT_UNSUPPORTED,
            CounterexampleError::ImplicationHolds
            | CounterexampleError::UnderivableConsequence(_)
            | CounterexampleError::Unseparated => EXIT_WRONG_DIRECTION,
            CounterexampleError::TooLarge { .. } => EXIT_CAPACITY,
            CounterexampleError::ContradictoryAssumption(_)
            | CounterexampleError::VerificationFailed => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::Capacity { .. } => EXIT_CAPACITY,
            OracleError::Decision(_) => EXIT_UNSUPPORTED,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Self {
        let code = match e {
            SemanticsError::TooManyConflicts { .. } => EXIT_CAPACITY,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Check {
            sigma,
            goal,
            json,
            certificate,
            timing,
        } => cmd_check(
            &sigma,
            &goal,
            json,
            certificate.as_deref(),
            timing,
            out,
            err,
        ),
        Command::Eval {
            team,
            atom,
            json,
            conflict_cap,
        } => cmd_eval(&team, &atom, json, conflict_cap, out, err),
        Command::Counterexample {
            sigma,
            goal,
            out: path,
            json,
        } => cmd_counterexample(&sigma, &goal, &path, json, out),
        Command::Derive {
            sigma,
            goal,
            out: path,
            expand,
            json,
        } => cmd_derive(&sigma, &goal, &path, expand, json, out),
        Command::OracleCheck {
            sigma,
            goal,
            max_rows,
            domain,
            budget,
            json,
        } => cmd_oracle_check(&sigma, &goal, max_rows, domain, budget, json, out),
        Command::VerifyCertificate { certificate, json } => {
            cmd_verify_certificate(&certificate, json, out)
        }
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load_instance(sigma: &Path, goal: &str) -> Result<(Vec<Atom>, Atom), Failure> {
    let text = read_text(sigma)?;
    let sigma = parse_assumptions(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", sigma.display())))?;
    let goal = parse_atom(goal).map_err(|e| Failure::new(EXIT_PARSE, format!("goal: {e}")))?;
    Ok((sigma, goal))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::new(EXIT_INTERNAL, format!("output: {e}")))
}

fn emit_json(out: &mut dyn Write, v: &Value) -> Result<(), Failure> {
    emit(
        out,
        &format!(
            "{}\n",
            serde_json::to_string_pretty(v).expect("plain data serializes")
        ),
    )
}

/// Reads a team. The header names the variables; cells are raw strings
/// (no quoting). A header with no data rows is the empty team.
pub fn read_team_csv(text: &str) -> Result<Team, String> {
    let mut reader = csv::ReaderBuilder::new()
        .quoting(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    let schema = header
        .iter()
        .map(|h| Variable::new(h.trim()).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        rows.push(record.iter().map(str::to_string).collect::<Vec<_>>());
    }
    Team::from_rows(schema, rows).map_err(|e: ModelError| e.to_string())
}

pub fn write_team_csv(team: &Team) -> String {
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Never)
        .from_writer(Vec::new());
    w.write_record(team.schema().iter().map(Variable::name))
        .expect("in-memory write");
    for row in team.string_rows() {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 cells")
}

fn witness_detail(w: &HoldsWitness) -> Value {
    match w {
        HoldsWitness::TrivialDegreeOne => json!({}),
        HoldsWitness::Membership { index, swapped } | HoldsWitness::Subset { index, swapped } => {
            json!({ "assumption": index + 1, "swapped": swapped })
        }
        HoldsWitness::Contradictory { index } => json!({ "assumption": index + 1 }),
        HoldsWitness::E6 { index, witness } => json!({
            "assumption": index + 1,
            "side": witness.side.name(),
            "positions": witness
                .positions
                .iter()
                .map(|((a, b), i)| json!({ "pair": [a.name(), b.name()], "position": i + 1 }))
                .collect::<Vec<_>>(),
        }),
    }
}

fn certified_derivation(
    sigma: &[Atom],
    goal: &Atom,
    w: &HoldsWitness,
) -> Result<Derivation, Failure> {
    synthesize(sigma, goal, w).map_err(|e| Failure::new(EXIT_INTERNAL, e.to_string()))
}

fn certified_counterexample(
    plan: crate::counterexample::CounterexamplePlan,
) -> Result<Counterexample, Failure> {
    counterexample::realize(plan).map_err(Failure::from)
}

fn counterexample_json(cx: &Counterexample) -> Value {
    json!({
        "l": cx.plan.l,
        "k": cx.plan.k,
        "domain_bound": cx.domain_bound.to_string(),
        "distinct_values": cx.team.distinct_values(),
        "rows": cx.team.len(),
    })
}

fn cmd_check(
    sigma_path: &Path,
    goal: &str,
    json_out: bool,
    certificate: Option<&Path>,
    timing: bool,
    out: &mut dyn Write,
    _err: &mut dyn Write,
) -> Outcome {
    let (sigma, goal) = load_instance(sigma_path, goal)?;
    let start = Instant::now();
    let verdict = decision::decide(&sigma, &goal)?;
    let elapsed = start.elapsed();
    let mut report = json!({
        "format": FORMAT,
        "goal": render_atom(&goal),
        "holds": verdict.holds(),
        "witness_kind": verdict.kind(),
    });
    let mut text = format!(
        "goal: {goal}\nholds: {}\nwitness: {}\n",
        verdict.holds(),
        verdict.kind()
    );
    match verdict {
        Verdict::Holds(w) => {
            let d = certified_derivation(&sigma, &goal, &w)?;
            report["witness"] = witness_detail(&w);
            report["derivation_steps"] = json!(d.steps.len());
            if let Some(a) = w.assumption() {
                text.push_str(&format!("assumption: {} ({})\n", a + 1, sigma[a]));
            }
            text.push_str(&format!(
                "derivation: {} steps ({})\n",
                d.steps.len(),
                rule_list(&d)
            ));
            if let Some(path) = certificate {
                write_file(path, &format!("{}\n", certificate_to_json(&d)))?;
                report["certificate"] = json!(path.display().to_string());
            }
        }
        Verdict::Fails(plan) => {
            if let Some(i) = counterexample::underivable_consequence(&plan) {
                report["semantically_implied_by"] = json!(i + 1);
                text.push_str(&format!(
                    "note: not derivable, yet implied by assumption {} ({}); no counterexample exists\n",
                    i + 1,
                    sigma[i]
                ));
                if certificate.is_some() {
                    return Err(
                        CounterexampleError::UnderivableConsequence(sigma[i].clone()).into(),
                    );
                }
            } else {
                match counterexample::realize(plan) {
                    Err(CounterexampleError::Unseparated) if certificate.is_none() => {
                        report["counterexample"] = Value::Null;
                        text.push_str(
                            "note: not derivable, and no countermodel could be constructed\n",
                        );
                    }
                    other => {
                        check_counterexample(&goal, other?, certificate, &mut report, &mut text)?
                    }
                }
            }
        }
    }
    if timing {
        report["elapsed_us"] = json!(elapsed.as_micros() as u64);
        text.push_str(&format!("elapsed: {} us\n", elapsed.as_micros()));
    }
    if json_out {
        emit_json(out, &report)?;
    } else {
        emit(out, &text)?;
    }
    Ok(EXIT_OK)
}

fn check_counterexample(
    goal: &Atom,
    cx: Counterexample,
    certificate: Option<&Path>,
    report: &mut Value,
    text: &mut String,
) -> Result<(), Failure> {
    let csv = write_team_csv(&cx.team);
    report["counterexample"] = counterexample_json(&cx);
    report["counterexample"]["csv"] = json!(csv);
    text.push_str(&format!(
        "counterexample: l={} k={} values={} (bound {})\n{csv}",
        cx.plan.l,
        cx.plan.k,
        cx.team.distinct_values(),
        cx.domain_bound
    ));
    if let Some(path) = certificate {
        let csv_path = path.with_extension("csv");
        write_file(&csv_path, &csv)?;
        let mut doc = counterexample_json(&cx);
        doc["format"] = json!(FORMAT);
        doc["goal"] = json!(render_atom(goal));
        doc["holds"] = json!(false);
        doc["counterexample_csv"] = json!(csv_path.display().to_string());
        write_file(
            path,
            &format!(
                "{}\n",
                serde_json::to_string_pretty(&doc).expect("plain data")
            ),
        )?;
        report["certificate"] = json!(path.display().to_string());
        report["counterexample_csv"] = json!(csv_path.display().to_string());
    }
    Ok(())
}

fn rule_list(d: &Derivation) -> String {
    d.rules()
        .iter()
        .map(|r| r.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_eval(
    team_path: &Path,
    atom: &str,
    json_out: bool,
    cap: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let text = read_text(team_path)?;
    let team = read_team_csv(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", team_path.display())))?;
    if team.duplicates_dropped() > 0 {
        let _ = writeln!(
            err,
            "warning: {} duplicate row(s) ignored",
            team.duplicates_dropped()
        );
    }
    let atom = parse_atom(atom).map_err(|e| Failure::new(EXIT_PARSE, format!("atom: {e}")))?;
    let removal = min_removal_with_cap(&team, &atom, cap)?;
    let satisfied = team.is_empty() || atom.degree().allows(removal, team.len());
    let min_degree = (!team.is_empty())
        .then(|| Rational::new(removal as u64, team.len() as u64).expect("non-empty team"));
    if json_out {
        let mut v = json!({
            "format": FORMAT,
            "atom": render_atom(&atom),
            "rows": team.len(),
            "satisfied": satisfied,
            "min_removal": removal,
        });
        if let Some(d) = min_degree {
            v["min_degree"] = json!(d.to_string());
        }
        emit_json(out, &v)?;
    } else {
        let mut s = format!(
            "atom: {atom}\nrows: {}\nsatisfied: {satisfied}\nmin_removal: {removal}\n",
            team.len()
        );
        if let Some(d) = min_degree {
            s.push_str(&format!("min_degree: {d}\n"));
        }
        emit(out, &s)?;
    }
    Ok(EXIT_OK)
}

fn cmd_counterexample(
    sigma: &Path,
    goal: &str,
    path: &Path,
    json_out: bool,
    out: &mut dyn Write,
) -> Outcome {
    let (sigma, goal) = load_instance(sigma, goal)?;
    let plan = match counterexample::plan(&sigma, &goal) {
        Err(CounterexampleError::ImplicationHolds) => {
            return Err(Failure::new(
                EXIT_WRONG_DIRECTION,
                "the implication holds; use `excl derive` for a derivation",
            ))
        }
        other => other?,
    };
    let cx = certified_counterexample(plan)?;
    write_file(path, &write_team_csv(&cx.team))?;
    if json_out {
        let mut v = counterexample_json(&cx);
        v["format"] = json!(FORMAT);
        v["goal"] = json!(render_atom(&goal));
        v["csv"] = json!(path.display().to_string());
        emit_json(out, &v)?;
    } else {
        emit(
            out,
            &format!(
                "l: {}\nk: {}\ndomain_bound: {}\ndistinct_values: {}\nwritten: {}\n",
                cx.plan.l,
                cx.plan.k,
                cx.domain_bound,
                cx.team.distinct_values(),
                path.display()
            ),
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_derive(
    sigma: &Path,
    goal: &str,
    path: &Path,
    expand: bool,
    json_out: bool,
    out: &mut dyn Write,
) -> Outcome {
    let (sigma, goal) = load_instance(sigma, goal)?;
    let Some(w) = decision::decide_witness(&sigma, &goal)? else {
        return Err(Failure::new(
            EXIT_WRONG_DIRECTION,
            "the implication fails; use `excl counterexample` for a countermodel",
        ));
    };
    let mut d = certified_derivation(&sigma, &goal, &w)?;
    if expand {
        d = expand_macros(&d);
        check_derivation(&d).map_err(|e| {
            Failure::new(EXIT_INTERNAL, format!("expanded derivation rejected: {e}"))
        })?;
    }
    write_file(path, &format!("{}\n", certificate_to_json(&d)))?;
    if json_out {
        emit_json(
            out,
            &json!({
                "format": FORMAT,
                "goal": render_atom(&goal),
                "witness_kind": w.kind(),
                "steps": d.steps.len(),
                "rules": d.rules().iter().map(|r| r.as_str()).collect::<Vec<_>>(),
                "certificate": path.display().to_string(),
            }),
        )?;
    } else {
        let mut s = String::new();
        for step in &d.steps {
            let premises = step
                .premises
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",");
            s.push_str(&format!(
                "{:>3}. {}  [{}{}]\n",
                step.index,
                step.conclusion,
                step.rule,
                if premises.is_empty() {
                    String::new()
                } else {
                    format!(" {premises}")
                }
            ));
        }
        s.push_str(&format!("written: {}\n", path.display()));
        emit(out, &s)?;
    }
    Ok(EXIT_OK)
}

fn cmd_oracle_check(
    sigma: &Path,
    goal: &str,
    max_rows: Option<usize>,
    domain: Option<usize>,
    budget: u64,
    json_out: bool,
    out: &mut dyn Write,
) -> Outcome {
    let (sigma, goal) = load_instance(sigma, goal)?;
    let decided = decision::decide_witness(&sigma, &goal)?.is_some();
    let defaults = oracle::default_bounds(&sigma, &goal)?;
    let bounds = OracleBounds {
        max_rows: max_rows.unwrap_or(defaults.max_rows),
        domain: domain.unwrap_or(defaults.domain),
    };
    let outcome = oracle::oracle_implies(&sigma, &goal, bounds, budget)?;
    let agree = outcome.implied() == decided;
    let mut v = json!({
        "format": FORMAT,
        "goal": render_atom(&goal),
        "max_rows": bounds.max_rows,
        "domain": bounds.domain,
        "decide": decided,
        "oracle": outcome.implied(),
        "agree": agree,
        "teams_checked": outcome.teams_checked,
    });
    let mut s = format!(
        "bounds: max_rows={} domain={}\ndecide: {decided}\noracle: {}\nagree: {agree}\nteams_checked: {}\n",
        bounds.max_rows,
        bounds.domain,
        outcome.implied(),
        outcome.teams_checked
    );
    if let Some(team) = &outcome.counterexample {
        let csv = write_team_csv(team);
        v["separating_team"] = json!(csv);
        if !agree {
            s.push_str(&format!("separating team:\n{csv}"));
        }
    }
    if json_out {
        emit_json(out, &v)?;
    } else {
        emit(out, &s)?;
    }
    Ok(if agree { EXIT_OK } else { EXIT_INTERNAL })
}

fn cmd_verify_certificate(path: &Path, json_out: bool, out: &mut dyn Write) -> Outcome {
    let text = read_text(path)?;
    let d = certificate_from_json(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let result = check_derivation(&d);
    if json_out {
        let mut v = json!({ "format": FORMAT, "valid": result.is_ok(), "steps": d.steps.len() });
        match &result {
            Ok(report) => v["exact_fragment"] = json!(report.exact_fragment),
            Err(f) => {
                v["failed_step"] = json!(f.step);
                v["error"] = json!(f.error.to_string());
            }
        }
        emit_json(out, &v)?;
    } else {
        match &result {
            Ok(report) => emit(out, &format!("valid: true\nsteps: {}\n", report.steps))?,
            Err(f) => emit(out, &format!("valid: false\n{f}\n"))?,
        }
    }
    Ok(if result.is_ok() {
        EXIT_OK
    } else {
        EXIT_INTERNAL
    })
}
