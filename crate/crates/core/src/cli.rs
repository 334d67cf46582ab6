//! Command-line front end. [`run`] is the whole program minus process
//! exit, so it can be driven from tests.
//!
//! Exit codes: 0 positive verdict or success, 1 negative verdict,
//! 2 usage or input error.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::automata::{
    build_eps_nfa, collapse, equivalent_with_budget, merge_epsilon_components, Equivalence,
    DEFAULT_SUBSET_BUDGET,
};
use crate::bisim::{bisimilar_naive_with_budget, bisimilar_with_budget, BisimVerdict};
use crate::ccs::{build_lts, parse_action, parse_process, Action, Process, DEFAULT_STATE_BUDGET};
use crate::correspondence::{
    check_prop1, check_prop2_intension, check_prop3, check_prop4, summary_table,
    CorrespondenceReport, SamplingConfig, Verdict,
};
use crate::generate::{equivalent_program_pairs, random_process_pairs};
use crate::hml::{parse_hml, satisfies};
use crate::ka::{
    check_proof, check_soundness_against_language, LanguageCheck, ProofScript, ProofVerdict,
};
use crate::pdl::{counter_state, parse_pdl, pdl_satisfies, KripkeStructure};
use crate::regprog::{eval_relation, parse_program_with, Interpretation, ProgramSyntax};

/// Environment variable overriding the default LTS state budget.
pub const BUDGET_ENV: &str = "LOGEQ_STATE_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Parser)]
#[command(
    name = "logeq",
    version,
    about = "CCS, HML, bisimulation, regular programs, PDL and Kleene algebra"
)]
struct Cli {
    /// Output format; not every command supports every format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// State budget for LTS exploration (default from LOGEQ_STATE_BUDGET or 100000).
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print executions of a process: maximal runs, or runs with given labels.
    CcsTrace {
        process: String,
        /// Comma-separated action labels, e.g. `tau,tau`.
        #[arg(long)]
        labels: Option<String>,
        #[arg(long, default_value_t = 100)]
        limit: usize,
    },
    /// Export the reachable LTS.
    CcsLts { process: String },
    /// Decide whether a process satisfies an HML formula.
    HmlCheck { process: String, formula: String },
    /// Decide strong bisimilarity.
    Bisim {
        left: String,
        right: String,
        /// Use the greatest-fixpoint procedure instead of partition refinement.
        #[arg(long)]
        naive: bool,
    },
    /// Print a formula true of the left process and false of the right one.
    Distinguish { left: String, right: String },
    /// Build the automaton of a program.
    ProgNfa {
        program: String,
        /// Show the ε-NFA before collapsing.
        #[arg(long)]
        epsilon: bool,
        /// Collapse by merging all ε-connected states (may change the language).
        #[arg(long, conflicts_with = "epsilon")]
        merge_components: bool,
    },
    /// Decide language equality of two programs.
    ProgEquiv {
        left: String,
        right: String,
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
        subset_budget: usize,
    },
    /// Evaluate a program's relation under an interpretation file.
    ProgEval {
        interpretation: String,
        program: String,
    },
    /// Decide `(M, s) |= phi`.
    PdlCheck {
        kripke: String,
        state: String,
        formula: String,
    },
    /// Decide `M |= phi` (truth at every state).
    PdlValid { kripke: String, formula: String },
    /// Check a Kleene-algebra proof script.
    KaCheck {
        script: String,
        /// Also compare the goal's two sides on words up to this length.
        #[arg(long)]
        words: Option<usize>,
    },
    /// Run the correspondence checks over seeded corpora.
    Correspond {
        #[arg(long, value_parser = ["1", "2", "3", "4", "all"], default_value = "all")]
        prop: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random instances per proposition.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Modal depth for the PDL sweep; HML sweeps use the combined state count.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

/// Exit code and captured output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(positive: bool, stdout: String) -> Self {
        Outcome {
            code: if positive { 0 } else { 1 },
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Parses `argv` (including the program name) and runs one command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome::usage(rendered)
            } else {
                Outcome::ok(true, rendered)
            };
        }
    };
    let budget = match cli.budget {
        Some(b) => b,
        None => match std::env::var(BUDGET_ENV) {
            Ok(v) => match v.trim().parse() {
                Ok(b) => b,
                Err(_) => {
                    return Outcome::usage(format!("{BUDGET_ENV} must be a number, got `{v}`"))
                }
            },
            Err(_) => DEFAULT_STATE_BUDGET,
        },
    };
    match dispatch(cli.command, cli.format, budget) {
        Ok(outcome) => outcome,
        Err(message) => Outcome::usage(format!("error: {message}")),
    }
}

type CmdResult = Result<Outcome, String>;

/// Reads `@path` arguments from disk; anything else is taken literally.
fn literal(arg: &str) -> Result<String, String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}")),
        None => Ok(arg.to_string()),
    }
}

fn process_arg(arg: &str) -> Result<Process, String> {
    let text = literal(arg)?;
    parse_process(text.trim()).map_err(|e| format!("process: {e}"))
}

fn format_or(
    format: Option<Format>,
    default: Format,
    allowed: &[Format],
) -> Result<Format, String> {
    let f = format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(format!("format {f:?} is not supported by this command").to_lowercase())
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn dispatch(command: Command, format: Option<Format>, budget: usize) -> CmdResult {
    use Format::*;
    match command {
        Command::CcsTrace {
            process,
            labels,
            limit,
        } => {
            let f = format_or(format, Text, &[Text, Json])?;
            let p = process_arg(&process)?;
            let lts = build_lts(&p, budget).map_err(|e| e.to_string())?;
            let runs = match labels {
                Some(l) => {
                    let actions: Vec<Action> = l
                        .split(',')
                        .map(|a| parse_action(a.trim()).map_err(|e| format!("labels: {e}")))
                        .collect::<Result<_, _>>()?;
                    lts.runs_labelled(&actions, limit)
                }
                None => lts.maximal_runs(limit),
            };
            let out = match f {
                Json => pretty(&json!({
                    "runs": runs.iter().map(|r| json!({
                        "start": r.start.to_string(),
                        "steps": r.steps.iter().map(|(a, q)| json!([a.to_string(), q.to_string()])).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>()
                })),
                _ => runs.iter().map(|r| format!("{r}\n")).collect(),
            };
            Ok(Outcome::ok(!runs.is_empty(), out))
        }
        Command::CcsLts { process } => {
            let f = format_or(format, Json, &[Text, Json, Dot])?;
            let lts = build_lts(&process_arg(&process)?, budget).map_err(|e| e.to_string())?;
            let out = match f {
                Dot => lts.to_dot(),
                Json => pretty(&serde_json::to_value(lts.to_json()).expect("lts serializes")),
                Text => {
                    let mut s = String::new();
                    for (i, p) in lts.states().iter().enumerate() {
                        let _ = writeln!(s, "s{i}: {p}");
                    }
                    for (a, act, b) in lts.edges() {
                        let _ = writeln!(s, "s{a} --{act}--> s{b}");
                    }
                    s
                }
            };
            Ok(Outcome::ok(true, out))
        }
        Command::HmlCheck { process, formula } => {
            let f = format_or(format, Json, &[Text, Json])?;
            let p = process_arg(&process)?;
            let phi = parse_hml(literal(&formula)?.trim()).map_err(|e| format!("formula: {e}"))?;
            let holds = satisfies(&p, &phi);
            let out = match f {
                Json => pretty(&json!({ "satisfies": holds })),
                _ => format!("{holds}\n"),
            };
            Ok(Outcome::ok(holds, out))
        }
        Command::Bisim { left, right, naive } => {
            let f = format_or(format, Json, &[Text, Json])?;
            let (p, q) = (process_arg(&left)?, process_arg(&right)?);
            let run = if naive {
                bisimilar_naive_with_budget(&p, &q, budget)
            } else {
                bisimilar_with_budget(&p, &q, budget)
            }
            .map_err(|e| e.to_string())?;
            let positive = run.verdict.is_bisimilar();
            let out = match (&run.verdict, f) {
                (BisimVerdict::Bisimilar { relation }, Json) => pretty(&json!({
                    "bisimilar": true,
                    "witness": relation.iter().map(|(s, t)| json!([s.to_string(), t.to_string()])).collect::<Vec<_>>(),
                })),
                (BisimVerdict::Distinguished { formula }, Json) => {
                    pretty(&json!({ "bisimilar": false, "formula": formula.to_string() }))
                }
                (BisimVerdict::Bisimilar { relation }, _) => {
                    let mut s = String::from("bisimilar\n");
                    for (a, b) in relation {
                        let _ = writeln!(s, "  ({a}, {b})");
                    }
                    s
                }
                (BisimVerdict::Distinguished { formula }, _) => {
                    format!("not bisimilar: {formula}\n")
                }
            };
            Ok(Outcome::ok(positive, out))
        }
        Command::Distinguish { left, right } => {
            let f = format_or(format, Text, &[Text, Json])?;
            let (p, q) = (process_arg(&left)?, process_arg(&right)?);
            let run = bisimilar_with_budget(&p, &q, budget).map_err(|e| e.to_string())?;
            let formula = run.verdict.formula().map(ToString::to_string);
            let out = match f {
                Json => pretty(&json!({ "formula": formula })),
                _ => format!("{}\n", formula.as_deref().unwrap_or("none")),
            };
            Ok(Outcome::ok(formula.is_some(), out))
        }
        Command::ProgNfa {
            program,
            epsilon,
            merge_components,
        } => {
            let f = format_or(format, Json, &[Text, Json, Dot])?;
            let alpha = parse_program_with(literal(&program)?.trim(), ProgramSyntax::KLEENE)
                .map_err(|e| format!("program: {e}"))?;
            let eps = build_eps_nfa(&alpha).map_err(|e| e.to_string())?;
            let out = if epsilon {
                match f {
                    Dot => eps.to_dot(),
                    _ => pretty(&serde_json::to_value(eps.to_json()).expect("serializes")),
                }
            } else {
                let nfa = if merge_components {
                    merge_epsilon_components(&eps)
                } else {
                    collapse(&eps)
                };
                match f {
                    Dot => nfa.to_dot(),
                    Json => {
                        let mut v = serde_json::to_value(nfa.to_json()).expect("serializes");
                        v["classes"] = json!(nfa.classes);
                        pretty(&v)
                    }
                    Text => {
                        let mut s = format!("initial: {}\nfinals: {:?}\n", nfa.initial, nfa.finals);
                        for (p, a, q) in &nfa.transitions {
                            let _ = writeln!(s, "{p} --{a}--> {q}");
                        }
                        s
                    }
                }
            };
            Ok(Outcome::ok(true, out))
        }
        Command::ProgEquiv {
            left,
            right,
            subset_budget,
        } => {
            let f = format_or(format, Json, &[Text, Json])?;
            let parse = |a: &str| -> Result<_, String> {
                parse_program_with(literal(a)?.trim(), ProgramSyntax::KLEENE)
                    .map_err(|e| format!("program: {e}"))
            };
            let (a, b) = (parse(&left)?, parse(&right)?);
            let verdict =
                equivalent_with_budget(&a, &b, subset_budget).map_err(|e| e.to_string())?;
            let out = match (&verdict, f) {
                (Equivalence::Equal, Json) => pretty(&json!({ "equal": true })),
                (Equivalence::Counterexample(w), Json) => {
                    pretty(&json!({ "equal": false, "counterexample": w }))
                }
                (Equivalence::Equal, _) => "equal\n".to_string(),
                (Equivalence::Counterexample(w), _) => format!("different: [{}]\n", w.join(",")),
            };
            Ok(Outcome::ok(verdict.is_equal(), out))
        }
        Command::ProgEval {
            interpretation,
            program,
        } => {
            let f = format_or(format, Json, &[Text, Json])?;
            let sigma =
                Interpretation::from_json(&literal(&interpretation)?).map_err(|e| e.to_string())?;
            let alpha = parse_program_with(literal(&program)?.trim(), ProgramSyntax::KLEENE)
                .map_err(|e| format!("program: {e}"))?;
            let rel = eval_relation(&sigma, &alpha).map_err(|e| e.to_string())?;
            let pairs = sigma.named_pairs(&rel);
            let out = match f {
                Json => pretty(&json!({ "relation": pairs })),
                _ => pairs.iter().map(|[u, v]| format!("{u} {v}\n")).collect(),
            };
            Ok(Outcome::ok(true, out))
        }
        Command::PdlCheck {
            kripke,
            state,
            formula,
        } => {
            let f = format_or(format, Json, &[Text, Json])?;
            let m = KripkeStructure::from_json(&literal(&kripke)?).map_err(|e| e.to_string())?;
            let phi = parse_pdl(literal(&formula)?.trim()).map_err(|e| format!("formula: {e}"))?;
            let s = m.state_index(&state).map_err(|e| e.to_string())?;
            let holds = pdl_satisfies(&m, s, &phi).map_err(|e| e.to_string())?;
            let out = match f {
                Json => pretty(&json!({ "satisfies": holds })),
                _ => format!("{holds}\n"),
            };
            Ok(Outcome::ok(holds, out))
        }
        Command::PdlValid { kripke, formula } => {
            let f = format_or(format, Json, &[Text, Json])?;
            let m = KripkeStructure::from_json(&literal(&kripke)?).map_err(|e| e.to_string())?;
            let phi = parse_pdl(literal(&formula)?.trim()).map_err(|e| format!("formula: {e}"))?;
            let counter = counter_state(&m, &phi).map_err(|e| e.to_string())?;
            let name = counter.map(|s| m.interpretation().state_name(s).to_string());
            let out = match (f, &name) {
                (Json, None) => pretty(&json!({ "valid": true })),
                (Json, Some(s)) => pretty(&json!({ "valid": false, "counter_state": s })),
                (_, None) => "valid\n".to_string(),
                (_, Some(s)) => format!("not valid: fails at {s}\n"),
            };
            Ok(Outcome::ok(counter.is_none(), out))
        }
        Command::KaCheck { script, words } => {
            let f = format_or(format, Json, &[Text, Json])?;
            let script = ProofScript::parse_any(&literal(&script)?).map_err(|e| e.to_string())?;
            let verdict = check_proof(&script);
            let language = words.map(|n| check_soundness_against_language(&script.goal, n));
            let positive =
                verdict.is_accepted() && !matches!(language, Some(LanguageCheck::Refuted(_)));
            let out = match f {
                Json => {
                    let mut v = serde_json::to_value(&verdict).expect("serializes");
                    if let Some(l) = &language {
                        v["language"] = serde_json::to_value(l).expect("serializes");
                    }
                    pretty(&v)
                }
                _ => {
                    let mut s = match &verdict {
                        ProofVerdict::Accepted { hypotheses } if hypotheses.is_empty() => {
                            "accepted\n".to_string()
                        }
                        ProofVerdict::Accepted { hypotheses } => {
                            format!("accepted under hypotheses {}\n", hypotheses.join(", "))
                        }
                        ProofVerdict::Rejected { step, reason } => {
                            format!("rejected at step {step}: {reason}\n")
                        }
                    };
                    match &language {
                        Some(LanguageCheck::Consistent) => s.push_str("language: consistent\n"),
                        Some(LanguageCheck::Refuted(w)) => {
                            let _ = writeln!(s, "language: refuted by [{}]", w.join(","));
                        }
                        None => {}
                    }
                    s
                }
            };
            Ok(Outcome::ok(positive, out))
        }
        Command::Correspond {
            prop,
            seed,
            count,
            depth,
        } => {
            let f = format_or(format, Json, &[Text, Json])?;
            let reports = correspond(&prop, seed, count, depth).map_err(|e| e.to_string())?;
            let bad = reports
                .iter()
                .any(|r| matches!(r.verdict, Verdict::Violation { .. }));
            let mut out = String::new();
            if f == Json {
                for r in &reports {
                    out.push_str(&r.to_json_line());
                    out.push('\n');
                }
            }
            out.push_str(&summary_table(&reports));
            Ok(Outcome::ok(!bad, out))
        }
    }
}

fn correspond(
    prop: &str,
    seed: u64,
    count: usize,
    depth: usize,
) -> Result<Vec<CorrespondenceReport>, crate::correspondence::CorrespondenceError> {
    let wants = |n: &str| prop == "all" || prop == n;
    let mut reports = Vec::new();
    if wants("1") || wants("2") {
        for (p, q) in random_process_pairs(seed, count, &["a", "b"], 4) {
            let bound = build_lts(&p, DEFAULT_STATE_BUDGET)?.len()
                + build_lts(&q, DEFAULT_STATE_BUDGET)?.len();
            if wants("1") {
                reports.push(check_prop1(&p, &q, bound)?);
            }
            if wants("2") {
                reports.push(check_prop2_intension(&p, &q, bound)?);
            }
        }
    }
    if wants("3") || wants("4") {
        let mut pairs = equivalent_program_pairs(seed, count, &["a", "b"], 6);
        // a few unequal pairs so both verdicts appear
        let mut rng = crate::generate::rng(seed ^ 0x5eed);
        for _ in 0..count / 5 {
            pairs.push((
                crate::generate::random_program(&mut rng, &["a", "b"], 6),
                crate::generate::random_program(&mut rng, &["a", "b"], 6),
            ));
        }
        let config = SamplingConfig {
            seed,
            ..SamplingConfig::default()
        };
        for (a, b) in &pairs {
            if wants("3") {
                reports.push(check_prop3(a, b, &config)?);
            }
            if wants("4") {
                reports.push(check_prop4(a, b, depth)?);
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        let mut argv = vec!["logeq"];
        argv.extend_from_slice(args);
        run(argv)
    }

    #[test]
    fn spec_style_examples() {
        let o = go(&["bisim", "tau.tau.0", "tau.0"]);
        assert_eq!(o.code, 1);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["bisimilar"], false);
        assert!(v["formula"].is_string());

        let o = go(&["prog-equiv", "a", "a+a"]);
        assert_eq!(o.code, 0);
        assert_eq!(
            serde_json::from_str::<Value>(&o.stdout).unwrap(),
            json!({"equal": true})
        );

        assert_eq!(go(&["hml-check", "0", "true"]).code, 0);
    }

    #[test]
    fn usage_errors_exit_two() {
        let o = go(&["bisim", "tau.tau.0"]);
        assert_eq!(o.code, 2);
        assert!(!o.stderr.is_empty());
        assert_eq!(go(&["hml-check", "x?.0 + (a!.0 | b!.0)", "true"]).code, 2);
        assert_eq!(go(&["--format", "dot", "hml-check", "0", "true"]).code, 2);
        assert_eq!(go(&["nonsense"]).code, 2);
    }

    #[test]
    fn help_exits_zero() {
        let o = go(&["--help"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("bisim"));
    }

    #[test]
    fn trace_of_the_three_component_example() {
        let o = go(&[
            "ccs-trace",
            "(x?.y?.0 + x!.z?.0) | x!.0 | y!.0",
            "--labels",
            "tau,tau",
        ]);
        assert_eq!(o.code, 0);
        assert_eq!(
            o.stdout,
            "(x?.y?.0 + x!.z?.0) | x!.0 | y!.0 --tau--> y?.0 | 0 | y!.0 --tau--> 0 | 0 | 0\n"
        );
    }
}
