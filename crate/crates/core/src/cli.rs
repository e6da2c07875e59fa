//! Command-line front end.
//!
//! Exit codes: 0 when the command ran (whatever the verdict), 1 when the
//! self-test or an internal cross-check finds a violation, 2 on usage and
//! input errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    check_associativity, check_atomicity, check_causality, check_classicality, discriminability_degree,
    entanglement_present, is_separable, separable_by_lp, AssociativityMismatch, AssociativityResult,
    SeparabilityCertificate,
};
use crate::arith::{format_rational, parse_rational, RVector};
use crate::error::{Error, Result};
use crate::generate::{generate_ct, generate_random, generate_toy, DEFAULT_MAX_DEN};
use crate::io::{read_theory, serialize_theory, write_text};
use crate::principles::{
    check_purification, check_purification_any, check_superposition, maximal_discriminable_set,
    SuperpositionMode,
};
use crate::report::{PurificationQuery, ReportDocument, SuperpositionQuery};
use crate::selftest::run_selftest;
use crate::theory::Theory;

#[derive(Parser, Debug)]
#[command(name = "simplicial", version, about = "Exact analysis of simplicial probabilistic theories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to a file instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a theory file.
    Validate { file: PathBuf },
    /// Full structural report of every system and composite.
    Report {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Parallel composition of two states on a declared composite.
    Compose {
        file: PathBuf,
        #[arg(long)]
        composite: String,
        /// Left factor state, e.g. 1/2,1/2.
        #[arg(long)]
        rho: String,
        /// Right factor state.
        #[arg(long)]
        sigma: String,
        #[command(flatten)]
        out: Output,
    },
    /// Decide a single structural property.
    Check {
        #[arg(value_enum)]
        property: Property,
        file: PathBuf,
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        composite: Option<String>,
        /// Comma-separated factor names (associativity, degree of 3 factors).
        #[arg(long)]
        factors: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Closed-form separability of a composite state, cross-checked by LP.
    Separable {
        file: PathBuf,
        #[arg(long)]
        composite: String,
        #[arg(long)]
        state: String,
        #[command(flatten)]
        out: Output,
    },
    /// Superposition principle for one distribution.
    Superposition {
        file: PathBuf,
        #[arg(long)]
        system: String,
        #[arg(long)]
        dist: String,
        #[arg(long, value_enum, default_value_t = Mode::Weak)]
        mode: Mode,
        /// Maximal discriminable set; defaults to the greedy one.
        #[arg(long)]
        set: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Purification of a deterministic state.
    Purify {
        file: PathBuf,
        #[arg(long)]
        system: String,
        #[arg(long)]
        state: String,
        /// Ancilla system; defaults to every declared one.
        #[arg(long)]
        ancilla: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Write a generated theory file.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Property battery on seeded random theories.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_DEN)]
        max_den: u32,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand, Debug)]
enum GenerateKind {
    /// Classical theory with product composites.
    Ct {
        /// Comma-separated system dimensions.
        #[arg(long)]
        dims: String,
        #[command(flatten)]
        out: Output,
    },
    /// Two systems with an entangled composite.
    Toy {
        #[arg(long)]
        da: usize,
        #[arg(long)]
        db: usize,
        #[arg(long, default_value_t = 1)]
        delta: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_DEN)]
        max_den: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Random simplicial theory.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_DEN)]
        max_den: u32,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Property {
    Causality,
    Classicality,
    Atomicity,
    Entanglement,
    LocalDiscriminability,
    Associativity,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Ultraweak,
    Weak,
    Strong,
}

impl From<Mode> for SuperpositionMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Ultraweak => SuperpositionMode::Ultraweak,
            Mode::Weak => SuperpositionMode::Weak,
            Mode::Strong => SuperpositionMode::Strong,
        }
    }
}

/// What a command produced: text, its JSON twin, and whether it found a
/// violation.
struct Rendered {
    text: String,
    json: Value,
    violation: bool,
}

impl Rendered {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Rendered { text: text.into(), json, violation: false }
    }
}

fn list_arg(text: &str) -> Result<RVector> {
    text.split(',')
        .map(|x| parse_rational(x.trim()).map_err(Error::from))
        .collect()
}

fn index_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{x:?} is not a positive integer")))
        })
        .collect()
}

fn names(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).collect()
}

fn require<'a>(value: &'a Option<String>, flag: &str) -> Result<&'a str> {
    value.as_deref().ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required")))
}

fn tuple(v: &RVector) -> String {
    v.to_string()
}

fn emit(out: &mut dyn Write, opts: &Output, rendered: &Rendered) -> Result<()> {
    let body = if opts.json {
        let mut s = serde_json::to_string_pretty(&rendered.json).expect("values always serialize");
        s.push('\n');
        s
    } else {
        rendered.text.clone()
    };
    match &opts.output {
        Some(path) => write_text(path, &body),
        None => out
            .write_all(body.as_bytes())
            .map_err(|e| Error::Io { path: "<stdout>".into(), message: e.to_string() }),
    }
}

fn emit_theory(out: &mut dyn Write, opts: &Output, theory: &Theory) -> Result<()> {
    // Generated theories are always written as canonical JSON.
    let text = serialize_theory(theory);
    match &opts.output {
        Some(path) => write_text(path, &text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io { path: "<stdout>".into(), message: e.to_string() }),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(violation) => i32::from(violation),
        Err(Error::InconsistentReport(msg)) => {
            let _ = writeln!(err, "error: internal inconsistency: {msg}");
            1
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<bool> {
    let (rendered, opts) = match command {
        Command::Validate { file } => {
            let t = read_theory(&file)?;
            let text = format!(
                "{}: ok ({} systems, {} composites)\n",
                file.display(),
                t.systems().len(),
                t.composites().len()
            );
            let _ = out.write_all(text.as_bytes());
            return Ok(false);
        }
        Command::Report { file, out: opts } => {
            let doc = ReportDocument::build(&read_theory(&file)?)?;
            let rendered = Rendered::new(doc.to_text(), serde_json::to_value(&doc).expect("serializable"));
            (rendered, opts)
        }
        Command::Compose { file, composite, rho, sigma, out: opts } => {
            (compose(&read_theory(&file)?, &composite, &rho, &sigma)?, opts)
        }
        Command::Check { property, file, system, composite, factors, out: opts } => {
            let t = read_theory(&file)?;
            (check(&t, property, &system, &composite, &factors)?, opts)
        }
        Command::Separable { file, composite, state, out: opts } => {
            (separable(&read_theory(&file)?, &composite, &state)?, opts)
        }
        Command::Superposition { file, system, dist, mode, set, out: opts } => {
            (superposition(&read_theory(&file)?, &system, &dist, mode.into(), set.as_deref())?, opts)
        }
        Command::Purify { file, system, state, ancilla, out: opts } => {
            (purify(&read_theory(&file)?, &system, &state, ancilla.as_deref())?, opts)
        }
        Command::Generate { kind } => {
            let (theory, opts) = match kind {
                GenerateKind::Ct { dims, out } => (generate_ct(&index_list(&dims)?)?, out),
                GenerateKind::Toy { da, db, delta, seed, max_den, out } => {
                    (generate_toy(da, db, delta, seed, max_den)?, out)
                }
                GenerateKind::Random { seed, max_den, out } => (generate_random(seed, max_den)?, out),
            };
            emit_theory(out, &opts, &theory)?;
            return Ok(false);
        }
        Command::Selftest { seed, count, max_den, out: opts } => (selftest(seed, count, max_den)?, opts),
    };
    emit(out, &opts, &rendered)?;
    Ok(rendered.violation)
}

fn compose(t: &Theory, composite: &str, rho: &str, sigma: &str) -> Result<Rendered> {
    let comp = t.composite(composite)?;
    let rule = comp.rule();
    let rho = rule.left().state(list_arg(rho)?)?;
    let sigma = rule.right().state(list_arg(sigma)?)?;
    let omega = rule.compose_states(&rho, &sigma)?;
    Ok(Rendered::new(
        format!("{} = {}\n", composite, tuple(omega.coords())),
        json!({ "composite": composite, "state": omega.coords().to_strings() }),
    ))
}

fn check(
    t: &Theory,
    property: Property,
    system: &Option<String>,
    composite: &Option<String>,
    factors: &Option<String>,
) -> Result<Rendered> {
    Ok(match property {
        Property::Causality => {
            let s = t.system(require(system, "system")?)?;
            match check_causality(s) {
                Ok(c) => {
                    let e = c.deterministic_effect.coords();
                    Rendered::new(
                        format!("{}: causal, deterministic effect {}\n", s.name(), tuple(e)),
                        json!({ "system": s.name(), "causal": true, "deterministic_effect": e.to_strings() }),
                    )
                }
                Err(e @ (Error::NoDeterministicEffect(_) | Error::NonUniqueDeterministicEffect(_))) => {
                    let mut r = Rendered::new(
                        format!("{}: NOT causal: {e}\n", s.name()),
                        json!({ "system": s.name(), "causal": false, "reason": e.to_string() }),
                    );
                    r.violation = true;
                    r
                }
                Err(e) => return Err(e),
            }
        }
        Property::Classicality => {
            let s = t.system(require(system, "system")?)?;
            let classical = check_classicality(s)?.is_discriminable();
            let set = maximal_discriminable_set(s)?;
            Rendered::new(
                format!(
                    "{}: {}, maximal discriminable set {:?}\n",
                    s.name(),
                    if classical { "classical" } else { "not classical" },
                    set
                ),
                json!({ "system": s.name(), "classical": classical, "maximal_discriminable_set": set }),
            )
        }
        Property::Atomicity => {
            let c = t.composite(require(composite, "composite")?)?;
            let a = check_atomicity(c.rule());
            let text = match a.violating {
                None => format!("{}: atomic composition\n", c.name()),
                Some((i, j)) => format!("{}: NOT atomic, product |{i}> x |{j}> is refined\n", c.name()),
            };
            Rendered::new(text, json!({ "composite": c.name(), "atomic": a.atomic, "violating": a.violating }))
        }
        Property::Entanglement => {
            let c = t.composite(require(composite, "composite")?)?;
            let rule = c.rule();
            let ent = entanglement_present(rule)?;
            match ent.witness {
                None => Rendered::new(
                    format!("{}: no entangled states (excess 0)\n", c.name()),
                    json!({ "composite": c.name(), "entanglement_present": false, "witness": null }),
                ),
                Some(v) => {
                    let omega = c.space().vertex(v)?;
                    let SeparabilityCertificate::Entangled { block, indices, ratios } = is_separable(rule, &omega)?
                    else {
                        return Err(Error::InconsistentReport(format!("witness vertex {v} is separable")));
                    };
                    let (r0, r1) = (format_rational(&ratios.0), format_rational(&ratios.1));
                    Rendered::new(
                        format!(
                            "{}: entangled, witness vertex {v}\n  Entangled certificate: block ({}, {}), ratio {r0} at vertex {} vs {r1} at vertex {}\n",
                            c.name(), block.0, block.1, indices.0, indices.1
                        ),
                        json!({
                            "composite": c.name(),
                            "entanglement_present": true,
                            "witness": v,
                            "certificate": { "block": [block.0, block.1], "vertices": [indices.0, indices.1], "ratios": [r0, r1] },
                        }),
                    )
                }
            }
        }
        Property::LocalDiscriminability => {
            let list: Vec<String> = match (factors, composite) {
                (Some(f), _) => names(f).into_iter().map(String::from).collect(),
                (None, Some(c)) => {
                    let rule = t.composite(c)?.rule();
                    vec![rule.left().name().to_string(), rule.right().name().to_string()]
                }
                (None, None) => return Err(Error::InvalidParameter("--composite or --factors is required".into())),
            };
            let refs: Vec<&str> = list.iter().map(String::as_str).collect();
            let degree = discriminability_degree(t, &refs)?;
            Rendered::new(
                format!(
                    "{}: discriminability degree {degree}{}\n",
                    refs.join(","),
                    if degree == 1 { " (local discriminability holds)" } else { "" }
                ),
                json!({ "factors": refs, "degree": degree, "local_discriminability": degree == 1 }),
            )
        }
        Property::Associativity => {
            let f = names(require(factors, "factors")?);
            let [a, b, c] = f[..] else {
                return Err(Error::InvalidParameter("--factors takes exactly three names".into()));
            };
            match check_associativity(t, a, b, c)? {
                AssociativityResult::Associative { bijection } => Rendered::new(
                    format!("({a}{b}){c} ~ {a}({b}{c}): associative, bijection {bijection:?}\n"),
                    json!({ "associative": true, "bijection": bijection }),
                ),
                AssociativityResult::Mismatch(m) => {
                    let reason = describe_mismatch(&m);
                    Rendered::new(
                        format!("({a}{b}){c} vs {a}({b}{c}): NOT associative: {reason}\n"),
                        json!({ "associative": false, "reason": reason }),
                    )
                }
            }
        }
    })
}

fn describe_mismatch(m: &AssociativityMismatch) -> String {
    match m {
        AssociativityMismatch::Dimension { left_bracket, right_bracket } => {
            format!("dimensions differ ({left_bracket} vs {right_bracket})")
        }
        AssociativityMismatch::Signature { triple, left_count, right_count } => format!(
            "triple {triple:?} is refined by {left_count} vs {right_count} vertices"
        ),
        AssociativityMismatch::Weights { triple, left, right } => {
            let fmt = |w: &Vec<crate::arith::Rational>| w.iter().map(format_rational).collect::<Vec<_>>().join(", ");
            format!("triple {triple:?} has weights ({}) vs ({})", fmt(left), fmt(right))
        }
    }
}

fn separable(t: &Theory, composite: &str, state: &str) -> Result<Rendered> {
    let comp = t.composite(composite)?;
    let rule = comp.rule();
    let omega = comp.space().state(list_arg(state)?)?;
    let cert = is_separable(rule, &omega)?;
    if cert.is_separable() != separable_by_lp(rule, &omega)?.is_feasible() {
        return Err(Error::InconsistentReport("closed-form and LP separability disagree".into()));
    }
    Ok(match cert {
        SeparabilityCertificate::Separable { lambda } => {
            let terms: Vec<String> = lambda
                .iter()
                .filter(|(_, l)| !num_traits::Zero::is_zero(*l))
                .map(|((i, j), l)| format!("{} |{i}>|{j}>", format_rational(l)))
                .collect();
            let json_lambda: Vec<Value> = lambda
                .iter()
                .map(|((i, j), l)| json!({ "i": i, "j": j, "lambda": format_rational(l) }))
                .collect();
            Rendered::new(
                format!("separable: {}\n", if terms.is_empty() { "0".into() } else { terms.join(" + ") }),
                json!({ "separable": true, "lambda": json_lambda }),
            )
        }
        SeparabilityCertificate::Entangled { block, indices, ratios } => {
            let (r0, r1) = (format_rational(&ratios.0), format_rational(&ratios.1));
            Rendered::new(
                format!(
                    "entangled: block ({}, {}) has ratio {r0} at vertex {} and {r1} at vertex {}\n",
                    block.0, block.1, indices.0, indices.1
                ),
                json!({ "separable": false, "block": [block.0, block.1], "vertices": [indices.0, indices.1], "ratios": [r0, r1] }),
            )
        }
    })
}

fn superposition(t: &Theory, system: &str, dist: &str, mode: SuperpositionMode, set: Option<&str>) -> Result<Rendered> {
    let s = t.system(system)?;
    let set = match set {
        Some(text) => index_list(text)?,
        None => maximal_discriminable_set(s)?,
    };
    let p = list_arg(dist)?.into_inner();
    let verdict = check_superposition(s, &set, &p, mode)?;
    let q = SuperpositionQuery::from_verdict(system, &set, &p, &verdict);
    let mut text = format!("{mode} superposition on {system} for p = ({}): {}", q.distribution.join(", "), q.outcome.to_uppercase());
    if let Some(v) = q.vertex {
        text.push_str(&format!(" with pure state |{v}>"));
    }
    text.push('\n');
    if let Some(obs) = &q.observation {
        let label = if verdict.holds() { "observation" } else { "counterexample observation" };
        for (k, col) in &obs.free_weights {
            text.push_str(&format!("  {label}: q_{k} = ({})\n", col.join(", ")));
        }
    }
    Ok(Rendered::new(text, serde_json::to_value(&q).expect("serializable")))
}

fn purify(t: &Theory, system: &str, state: &str, ancilla: Option<&str>) -> Result<Rendered> {
    let rho = t.system(system)?.state(list_arg(state)?)?;
    let (result, ancilla) = match ancilla {
        Some(a) => (check_purification(t, &rho, a)?, a.to_string()),
        None => (check_purification_any(t, &rho)?, "*".to_string()),
    };
    let q = PurificationQuery::from_result(&rho, &ancilla, &result);
    let text = match (&q.composite, q.vertex) {
        (Some(c), Some(v)) => format!("PURIFIABLE: vertex {v} of {c} marginalizes to {}\n", tuple(rho.coords())),
        _ => format!("NOT PURIFIABLE: {} pure states scanned\n", q.scanned.unwrap_or(0)),
    };
    Ok(Rendered::new(text, serde_json::to_value(&q).expect("serializable")))
}

fn selftest(seed: u64, count: u64, max_den: u32) -> Result<Rendered> {
    let lines = run_selftest(seed, count, max_den)?;
    let mut text = String::new();
    let mut json_lines = Vec::new();
    for l in &lines {
        text.push_str(&format!(
            "[{}] {} ({} checks)\n",
            if l.passed() { "pass" } else { "FAIL" },
            l.name,
            l.checked
        ));
        for f in &l.failures {
            text.push_str(&format!("    {f}\n"));
        }
        json_lines.push(json!({ "check": l.name, "checked": l.checked, "passed": l.passed(), "failures": l.failures }));
    }
    let mut r = Rendered::new(text, Value::Array(json_lines));
    r.violation = lines.iter().any(|l| !l.passed());
    Ok(r)
}

/// Convenience for the binary.
pub fn main_with_std() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
