//! `digitime`: batch front end for the digitization toolkit.
//!
//! Exit codes: 0 pass, holds or no counterexample found; 1 counterexample;
//! 2 input error; 3 inconclusive or failed gate; 4 resource cap exceeded.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use digitime_core::lab::{self, FuzzConfig, Outcome, Verdict, VerifyOptions};
use digitime_core::mtl::{self, Formula};
use digitime_core::ta::{Classification, TimedAutomaton};
use digitime_core::tick::{build_tick_automaton_with_cap, DEFAULT_STATE_CAP};
use digitime_core::trace::{self, TimedStateSequence};
use digitime_core::{Error, Rational};

#[derive(Parser, Debug)]
#[command(name = "digitime", version, about = "Digitization of dense-time real-time verification")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every randomized procedure.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Trials per sampling procedure.
    #[arg(long, global = true, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Longest tick word enumerated by `verify`.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    bound: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest number of automaton states any construction may create.
    #[arg(long, global = true, default_value_t = DEFAULT_STATE_CAP, value_parser = positive_usize)]
    state_cap: usize,
    /// Worker threads for fuzz trials; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = positive_usize)]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Digitize a timed state sequence.
    Digitize {
        trace: PathBuf,
        /// A single eps in (0,1].
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        eps: Option<Rational>,
        /// Every distinct digitization with its eps range.
        #[arg(long)]
        all: bool,
    },
    /// Classify a timed automaton as Closed, Open or Mixed.
    Classify {
        automaton: PathBuf,
        /// Classify the closure (strict constraints made non-strict).
        #[arg(long, conflicts_with = "apply_interior")]
        apply_closure: bool,
        /// Classify the interior (non-strict constraints made strict).
        #[arg(long)]
        apply_interior: bool,
        /// Write the tick automaton in DOT format to this path.
        #[arg(long)]
        export_tick: Option<PathBuf>,
    },
    /// Decide whether an automaton is closed under digitization.
    CheckCud { automaton: PathBuf },
    /// Metric temporal logic utilities.
    Mtl {
        #[command(subcommand)]
        command: MtlCommand,
    },
    /// Bounded integer-time verification of an automaton against a formula.
    Verify {
        automaton: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        /// Atoms observed for an action, as ACTION=ATOM[,ATOM...]. Repeatable.
        #[arg(long = "atom", value_parser = parse_atom_entry)]
        atoms: Vec<(String, BTreeSet<String>)>,
    },
    /// Randomized closure tests.
    Fuzz {
        #[command(subcommand)]
        command: FuzzCommand,
        #[command(flatten)]
        knobs: FuzzKnobs,
    },
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct FormulaArg {
    /// Formula text, e.g. "G(p -> F[0,2] q)".
    formula: Option<String>,
    /// JSON document with a `formula` string field.
    #[arg(long)]
    formula_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum MtlCommand {
    /// Is the formula weakly constrained?
    Check {
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Bounded invariance, bounded response, qualitative or other.
    Classify {
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Evaluate at position 0 of a trace.
    Eval {
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long)]
        trace: PathBuf,
        /// Evaluate on the eps-digitization of the trace instead.
        #[arg(long, conflicts_with = "all")]
        eps: Option<Rational>,
        /// Evaluate on every distinct digitization of the trace as well.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Subcommand, Debug)]
enum FuzzCommand {
    /// Search for a satisfying trace with a violating digitization.
    FormulaCud {
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Search for a violating trace whose digitizations all satisfy.
    FormulaCuid {
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Search for an accepted word with an integrally rejected digitization.
    TaCud { automaton: PathBuf },
    /// Search for a rejected word whose digitizations are all accepted.
    TaCuid {
        automaton: PathBuf,
        /// Test the interior of the automaton.
        #[arg(long)]
        interior: bool,
    },
    /// Compare dense and tick reachable locations.
    Reach { automaton: PathBuf },
}

#[derive(Args, Debug, Clone, Copy)]
struct FuzzKnobs {
    /// Longest sampled trace or word.
    #[arg(long, global = true, default_value_t = 6, value_parser = positive_usize)]
    max_len: usize,
    /// Largest sampled timestamp.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    max_time: u32,
    /// Largest timestamp denominator.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    max_den: u32,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_atom_entry(s: &str) -> Result<(String, BTreeSet<String>), String> {
    let (action, atoms) = s.split_once('=').ok_or("expected ACTION=ATOM[,ATOM...]")?;
    let action = action.trim();
    if action.is_empty() {
        return Err("empty action name".into());
    }
    let atoms = atoms.split(',').map(str::trim).filter(|a| !a.is_empty()).map(String::from).collect();
    Ok((action.to_string(), atoms))
}

/// What a command produced, before rendering.
struct Report {
    text: String,
    structured: Value,
    code: u8,
}

impl Report {
    fn ok(text: String, structured: Value) -> Self {
        Report { text, structured, code: 0 }
    }

    fn verdict(v: &Verdict, preamble: &[String]) -> Self {
        let mut text = preamble.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&v.render_text());
        Report { text, structured: v.to_report(), code: verdict_code(v) }
    }
}

fn verdict_code(v: &Verdict) -> u8 {
    match v.outcome() {
        Outcome::Holds | Outcome::NoCounterexampleFound { .. } => 0,
        Outcome::Counterexample { .. } => 1,
        Outcome::Inconclusive { .. } => 3,
    }
}

fn error_code(e: &Error) -> u8 {
    if e.is_resource() {
        4
    } else {
        2
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))
}

fn load_automaton(path: &Path) -> Result<TimedAutomaton, Error> {
    TimedAutomaton::from_json(&read(path)?)
}

fn load_trace(path: &Path) -> Result<TimedStateSequence, Error> {
    TimedStateSequence::from_json(&read(path)?)
}

fn load_formula(arg: &FormulaArg) -> Result<Formula, Error> {
    let text = match (&arg.formula, &arg.formula_file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => {
            let doc: Value = serde_json::from_str(&read(path)?)?;
            doc.get("formula")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Domain(format!("{}: missing string field `formula`", path.display())))?
                .to_string()
        }
        (None, None) => unreachable!("clap requires one of them"),
    };
    mtl::parse_formula(&text)
}

fn fuzz_config(g: &Global, k: &FuzzKnobs) -> FuzzConfig {
    FuzzConfig {
        seed: g.seed,
        trials: g.trials,
        max_len: k.max_len,
        max_time: k.max_time,
        max_denominator: k.max_den,
        jobs: g.jobs,
    }
}

fn trace_value(t: &TimedStateSequence) -> Value {
    serde_json::to_value(t).expect("traces serialize")
}

fn cmd_digitize(path: &Path, eps: Option<Rational>) -> Result<Report, Error> {
    let eta = load_trace(path)?;
    if let Some(eps) = eps {
        let d = trace::digitize_trace(&eta, eps)?;
        return Ok(Report::ok(
            d.as_dense().to_string(),
            json!({ "eps": eps.to_string(), "trace": trace_value(d.as_dense()) }),
        ));
    }
    let crit: Vec<String> = trace::critical_epsilons(&eta).iter().map(Rational::to_string).collect();
    let classes = trace::digitization_classes(&eta);
    let mut text = format!("critical eps: {}\n", crit.join(", "));
    text.push_str(&format!("{} digitizations:", classes.len()));
    for (range, d) in &classes {
        text.push_str(&format!("\n  eps in {range}: {}", d.as_dense()));
    }
    let structured = json!({
        "critical_epsilons": crit,
        "classes": classes
            .iter()
            .map(|(range, d)| json!({ "range": range.to_string(), "trace": trace_value(d.as_dense()) }))
            .collect::<Vec<_>>(),
    });
    Ok(Report::ok(text, structured))
}

fn cmd_classify(
    path: &Path,
    apply_closure: bool,
    apply_interior: bool,
    export_tick: Option<&Path>,
    state_cap: usize,
) -> Result<Report, Error> {
    let mut a = load_automaton(path)?;
    if apply_closure {
        a = a.closure_transform();
    } else if apply_interior {
        a = a.interior_transform();
    }
    let class = a.classify();
    let mut text = class.to_string();
    let mut rows = Vec::new();
    for (site, cc) in a.constraints() {
        let kind = if cc.op.is_strict() { "strict" } else { "non-strict" };
        let offending = class == Classification::Mixed && cc.op.is_strict();
        text.push_str(&format!(
            "\n  {}{}: {} ({kind})",
            if offending { "* " } else { "" },
            a.describe_site(site),
            a.describe_constraint(cc)
        ));
        rows.push(json!({
            "site": a.describe_site(site),
            "constraint": a.describe_constraint(cc),
            "strict": cc.op.is_strict(),
        }));
    }
    if class == Classification::Mixed {
        text.push_str("\n  (* strict constraints preventing Closed)");
    }
    if let Some(out) = export_tick {
        let tick = build_tick_automaton_with_cap(&a, state_cap)?;
        fs::write(out, tick.to_dot()).map_err(|e| Error::Domain(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(Report::ok(text, json!({ "classification": class, "constraints": rows })))
}

fn cmd_mtl(cmd: &MtlCommand) -> Result<Report, Error> {
    match cmd {
        MtlCommand::Check { formula } => {
            let phi = load_formula(formula)?;
            let check = mtl::is_weakly_constrained(&mtl::propositional_nnf(&phi));
            let violations: Vec<(String, String)> = match &check {
                mtl::WeakCheck::Yes => Vec::new(),
                mtl::WeakCheck::No(v) => {
                    v.iter().map(|v| (v.condition.to_string(), v.subformula.to_string())).collect()
                }
            };
            let mut text = if check.holds() { "Yes".to_string() } else { "No".to_string() };
            for (c, s) in &violations {
                text.push_str(&format!("\n  {c}: {s}"));
            }
            let structured = json!({
                "weakly_constrained": check.holds(),
                "violations": violations
                    .iter()
                    .map(|(c, s)| json!({ "condition": c, "subformula": s }))
                    .collect::<Vec<_>>(),
            });
            Ok(Report::ok(text, structured))
        }
        MtlCommand::Classify { formula } => {
            let pattern = mtl::classify_pattern(&load_formula(formula)?).to_string();
            Ok(Report::ok(pattern.clone(), json!({ "pattern": pattern })))
        }
        MtlCommand::Eval { formula, trace, eps, all } => {
            let phi = load_formula(formula)?;
            let eta = load_trace(trace)?;
            if let Some(eps) = eps {
                let d = trace::digitize_trace(&eta, *eps)?;
                let value = mtl::satisfies(&phi, d.as_dense())?;
                return Ok(Report::ok(value.to_string(), json!({ "eps": eps.to_string(), "value": value })));
            }
            let value = mtl::satisfies(&phi, &eta)?;
            if !all {
                return Ok(Report::ok(value.to_string(), json!({ "value": value })));
            }
            let mut text = format!("dense: {value}");
            let mut rows = Vec::new();
            for (range, d) in trace::digitization_classes(&eta) {
                let v = mtl::satisfies(&phi, d.as_dense())?;
                text.push_str(&format!("\n  eps in {range}: {v}   {}", d.as_dense()));
                rows.push(json!({ "range": range.to_string(), "trace": trace_value(d.as_dense()), "value": v }));
            }
            Ok(Report::ok(text, json!({ "value": value, "digitizations": rows })))
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let g = &cli.global;
    match &cli.command {
        Command::Digitize { trace, eps, .. } => cmd_digitize(trace, *eps),
        Command::Classify { automaton, apply_closure, apply_interior, export_tick } => {
            cmd_classify(automaton, *apply_closure, *apply_interior, export_tick.as_deref(), g.state_cap)
        }
        Command::CheckCud { automaton } => {
            let a = load_automaton(automaton)?;
            let v = lab::check_ta_cud(&a, g.state_cap, g.seed)?;
            Ok(Report::verdict(&v, &[format!("automaton is {}", a.classify())]))
        }
        Command::Mtl { command } => cmd_mtl(command),
        Command::Verify { automaton, formula, atoms } => {
            let a = load_automaton(automaton)?;
            let phi = load_formula(formula)?;
            let opts =
                VerifyOptions { atom_map: atoms.iter().cloned().collect::<BTreeMap<_, _>>(), state_cap: g.state_cap };
            let v = lab::verify(&a, &phi, g.bound as usize, &opts)?;
            Ok(Report::verdict(&v, &[format!("formula: {phi}"), format!("bound: {}", g.bound)]))
        }
        Command::Fuzz { command, knobs } => {
            let cfg = fuzz_config(g, knobs);
            let v = match command {
                FuzzCommand::FormulaCud { formula } => lab::test_formula_cud(&load_formula(formula)?, &cfg)?,
                FuzzCommand::FormulaCuid { formula } => lab::test_formula_cuid(&load_formula(formula)?, &cfg)?,
                FuzzCommand::TaCud { automaton } => {
                    lab::test_ta_cud_fuzz(&load_automaton(automaton)?, &cfg, g.state_cap)?
                }
                FuzzCommand::TaCuid { automaton, interior } => {
                    let mut a = load_automaton(automaton)?;
                    if *interior {
                        a = a.interior_transform();
                    }
                    lab::test_ta_cuid_fuzz(&a, &cfg, g.state_cap)?
                }
                FuzzCommand::Reach { automaton } => {
                    lab::check_reach_equivalence(&load_automaton(automaton)?, &cfg, g.state_cap)?
                }
            };
            Ok(Report::verdict(&v, &[format!("seed: {}", g.seed)]))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let body = match cli.global.format {
                Format::Text => report.text,
                Format::Structured => serde_json::to_string_pretty(&report.structured).expect("values serialize"),
            };
            // a closed pipe on stdout is not an error of the command
            let _ = writeln!(std::io::stdout(), "{body}");
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
