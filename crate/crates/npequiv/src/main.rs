//! npequiv command-line interface.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use npequiv::dsl::{parse_dsl, serialize};
use npequiv::events::parse_query;
use npequiv::model::{Nplts, StateId};
use npequiv::rat::fmt_approx;
use npequiv::resolution::{alpha_restrict, enumerate_resolutions, ResKind, Resolution};
use npequiv::spectrum::{
    random_model, run_check, run_corpus, run_spectrum, shrink_model, EquivalenceId, Expect,
};
use npequiv::testing::{check_pte, search_distinguishing_test, validate_test, PteVariant};

#[derive(Parser)]
#[command(
    name = "npequiv",
    version,
    about = "Behavioral equivalences for nondeterministic-and-probabilistic transition systems",
    after_help = "Exit codes: 0 = success / equivalent, 1 = distinguished / expectation failure, 2 = usage or input error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Max,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    /// Compare success-probability envelopes (sup and inf).
    Supinf,
    /// Forall-exists matching of success probabilities per resolution.
    Fe,
    /// Trace-by-trace matching of successful-trace probabilities.
    Tbt,
}

impl From<VariantArg> for PteVariant {
    fn from(v: VariantArg) -> PteVariant {
        match v {
            VariantArg::Supinf => PteVariant::SupInf,
            VariantArg::Fe => PteVariant::ForallExists,
            VariantArg::Tbt => PteVariant::Tbt,
        }
    }
}

/// A `file:state` pair of process selectors.
#[derive(Args)]
struct PairArg {
    /// First process as file:state.
    left: String,
    /// Second process as file:state.
    right: String,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate model files.
    Validate {
        /// Model files to check.
        files: Vec<PathBuf>,
    },
    /// Enumerate deterministic-scheduler resolutions of a process.
    Resolutions {
        /// Process as file:state.
        selector: String,
        #[arg(long, value_enum, default_value = "max")]
        kind: KindArg,
        /// Keep only resolutions not stopping along this trace, e.g. "a b".
        #[arg(long)]
        alpha: Option<String>,
        /// Depth bound (required for cyclic models).
        #[arg(long)]
        depth: Option<usize>,
        /// Emit each resolution in DOT format.
        #[arg(long)]
        dot: bool,
    },
    /// Probability of one event in one resolution.
    Prob {
        /// Process as file:state.
        selector: String,
        /// Resolution index as listed by `resolutions --kind all`.
        #[arg(long)]
        resolution: usize,
        /// Event, e.g. "trace a b", "ctrace a", "fpair a {b,c}", "rpair a {}".
        #[arg(long)]
        query: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Decide one behavioral equivalence for a pair of processes.
    Check {
        #[command(flatten)]
        pair: PairArg,
        /// Relation id, e.g. ptr-dis, pctr, pf-supinf, prs-sup, pb.
        #[arg(long)]
        equiv: String,
        /// Use the randomized-scheduler (combined-transition) variant.
        #[arg(long)]
        ct: bool,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Testing equivalences: run a test suite or search for a distinguishing test.
    TestCheck {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Directory of test files (each an acyclic model with success states).
        #[arg(long, conflicts_with = "search")]
        suite: Option<PathBuf>,
        /// Search for a distinguishing test instead of running a suite.
        #[arg(long)]
        search: bool,
        /// Test depth bound for --search.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Branching bound for --search (>= 2 enables probabilistic fans).
        #[arg(long, default_value_t = 2)]
        branch: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run every relation on a pair and cross-check the implication lattice.
    Spectrum {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the bundled corpus expectations.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Random-model spectrum consistency harness.
    Fuzz {
        #[arg(long, default_value_t = 500)]
        seeds: u64,
        #[arg(long, default_value_t = 6)]
        states: usize,
        #[arg(long, default_value_t = 3)]
        branch: usize,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Check all bundled expectations against the fixture directory.
    Run {
        /// Only entries whose id contains this substring.
        #[arg(long)]
        filter: Option<String>,
        /// Fixture directory.
        #[arg(long, default_value = "corpus")]
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

struct CliError(String);

impl<T: std::fmt::Display> From<T> for CliError {
    fn from(e: T) -> Self {
        CliError(e.to_string())
    }
}

fn load_model(path: &Path) -> Result<Nplts, CliError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    parse_dsl(&src).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn split_selector(sel: &str) -> Result<(PathBuf, String), CliError> {
    let (file, state) = sel
        .rsplit_once(':')
        .ok_or_else(|| CliError(format!("selector '{sel}' is not of the form file:state")))?;
    Ok((PathBuf::from(file), state.to_string()))
}

fn resolve_single(sel: &str) -> Result<(Nplts, StateId), CliError> {
    let (path, state) = split_selector(sel)?;
    let model = load_model(&path)?;
    let s = model
        .state_by_name(&state)
        .ok_or_else(|| CliError(format!("{}: no state '{state}'", path.display())))?;
    Ok((model, s))
}

/// Loads a pair of selectors into one model (disjoint union when the files
/// differ).
fn resolve_pair(pair: &PairArg) -> Result<(Nplts, StateId, StateId), CliError> {
    let (p1, n1) = split_selector(&pair.left)?;
    let (p2, n2) = split_selector(&pair.right)?;
    if p1 == p2 {
        let model = load_model(&p1)?;
        let s1 = model
            .state_by_name(&n1)
            .ok_or_else(|| CliError(format!("{}: no state '{n1}'", p1.display())))?;
        let s2 = model
            .state_by_name(&n2)
            .ok_or_else(|| CliError(format!("{}: no state '{n2}'", p1.display())))?;
        Ok((model, s1, s2))
    } else {
        let m1 = load_model(&p1)?;
        let m2 = load_model(&p2)?;
        let s1 = m1
            .state_by_name(&n1)
            .ok_or_else(|| CliError(format!("{}: no state '{n1}'", p1.display())))?;
        let s2 = m2
            .state_by_name(&n2)
            .ok_or_else(|| CliError(format!("{}: no state '{n2}'", p2.display())))?;
        let (union, map1, map2) = Nplts::disjoint_union(&m1, &m2);
        Ok((union, map1[s1], map2[s2]))
    }
}

fn parse_trace(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

fn resolution_dot(z: &Resolution, model: &Nplts, index: usize) -> String {
    let mut out = format!("digraph \"resolution_{index}\" {{\n");
    for (i, node) in z.nodes.iter().enumerate() {
        out.push_str(&format!(
            "  n{i} [label=\"{}\"];\n",
            model.state_names[node.corr]
        ));
    }
    for (i, node) in z.nodes.iter().enumerate() {
        if let Some(step) = &node.step {
            for (child, p) in &step.children {
                out.push_str(&format!(
                    "  n{i} -> n{child} [label=\"{} {}\"];\n",
                    step.label,
                    npequiv::rat::fmt_exact(p)
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}

fn load_suite(dir: &Path) -> Result<Vec<(String, Nplts, StateId)>, CliError> {
    let mut suite = Vec::new();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("nplts"))
        .collect();
    paths.sort();
    for path in paths {
        let test = load_model(&path)?;
        let o = *test
            .designated
            .first()
            .ok_or_else(|| CliError(format!("{}: no designated start state", path.display())))?;
        validate_test(&test, o).map_err(CliError)?;
        suite.push((path.display().to_string(), test, o));
    }
    if suite.is_empty() {
        return Err(CliError(format!("{}: no .nplts test files", dir.display())));
    }
    Ok(suite)
}

fn emit(format: Format, json: serde_json::Value, text: String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&json).expect("serializable")),
        Format::Text => println!("{text}"),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Validate { files } => {
            if files.is_empty() {
                return Err(CliError("validate needs at least one file".into()));
            }
            for path in &files {
                let model = load_model(path)?;
                println!(
                    "{}: ok ({} states, {} transitions)",
                    path.display(),
                    model.num_states(),
                    model.transitions.len()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Resolutions { selector, kind, alpha, depth, dot } => {
            let (model, s) = resolve_single(&selector)?;
            let kind = match kind {
                KindArg::Max => ResKind::Maximal,
                KindArg::All => ResKind::All,
            };
            let mut set = enumerate_resolutions(&model, s, kind, depth)?;
            if let Some(alpha) = &alpha {
                set = alpha_restrict(&set, &model, &parse_trace(alpha));
            }
            println!(
                "{} resolution(s){}",
                set.items.len(),
                if set.bounded { " (depth-bounded)" } else { "" }
            );
            for (i, z) in set.items.iter().enumerate() {
                if dot {
                    print!("{}", resolution_dot(z, &model, i));
                } else {
                    let comps: Vec<String> = z
                        .maximal_computations()
                        .into_iter()
                        .map(|(_, trace, p)| {
                            let t = if trace.is_empty() { "ε".into() } else { trace.join(" ") };
                            format!("{t} [{}]", fmt_approx(&p))
                        })
                        .collect();
                    println!("#{i}: {}", comps.join("; "));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Prob { selector, resolution, query, depth } => {
            let (model, s) = resolve_single(&selector)?;
            let q = parse_query(&query)?;
            let set = enumerate_resolutions(&model, s, ResKind::All, depth)?;
            let z = set.items.get(resolution).ok_or_else(|| {
                CliError(format!(
                    "resolution index {resolution} out of range (0..{})",
                    set.items.len()
                ))
            })?;
            let p = npequiv::events::event_prob(&model, z, &q);
            println!("{q} in resolution #{resolution}: {}", fmt_approx(&p));
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { pair, equiv, ct, depth, format } => {
            let id = EquivalenceId::parse(&equiv)
                .ok_or_else(|| CliError(format!("unknown relation id '{equiv}'")))?;
            let (model, s1, s2) = resolve_pair(&pair)?;
            let verdict = run_check(id, ct, &model, s1, s2, depth)?;
            let witness = verdict.witness.as_ref().map(|w| w.to_string());
            emit(
                format,
                json!({
                    "schema_version": 1,
                    "command": "check",
                    "equiv": equiv,
                    "ct": ct,
                    "equal": verdict.equivalent,
                    "bounded": verdict.bounded,
                    "witness": witness,
                }),
                {
                    let mut t = format!(
                        "{equiv}{}: {}{}",
                        if ct { " (ct)" } else { "" },
                        if verdict.equivalent { "equal" } else { "distinguished" },
                        if verdict.bounded { " (depth-bounded)" } else { "" }
                    );
                    if let Some(w) = &witness {
                        t.push_str(&format!("\nwitness: {w}"));
                    }
                    t
                },
            );
            Ok(if verdict.equivalent { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::TestCheck { pair, variant, suite, search, depth, branch, format } => {
            let (model, s1, s2) = resolve_pair(&pair)?;
            let variant: PteVariant = variant.into();
            if search {
                match search_distinguishing_test(&model, s1, s2, variant, depth, branch) {
                    Some((test, o)) => {
                        emit(
                            format,
                            json!({
                                "schema_version": 1,
                                "command": "test-check",
                                "mode": "search",
                                "found": true,
                                "test": serialize(&test),
                                "start": test.state_names[o],
                            }),
                            format!("distinguishing test found:\n{}", serialize(&test)),
                        );
                        Ok(ExitCode::from(1))
                    }
                    None => {
                        emit(
                            format,
                            json!({
                                "schema_version": 1,
                                "command": "test-check",
                                "mode": "search",
                                "found": false,
                            }),
                            format!(
                                "no distinguishing test within depth {depth}, branching {branch} (inconclusive)"
                            ),
                        );
                        Ok(ExitCode::SUCCESS)
                    }
                }
            } else {
                let dir = suite
                    .ok_or_else(|| CliError("test-check needs --suite <dir> or --search".into()))?;
                let named = load_suite(&dir)?;
                let suite: Vec<(Nplts, StateId)> =
                    named.iter().map(|(_, t, o)| (t.clone(), *o)).collect();
                let verdict = check_pte(variant, &model, s1, s2, &suite);
                let witness = verdict.witness.as_ref().map(|w| w.to_string());
                emit(
                    format,
                    json!({
                        "schema_version": 1,
                        "command": "test-check",
                        "mode": "suite",
                        "tests": named.iter().map(|(n, _, _)| n.clone()).collect::<Vec<_>>(),
                        "equal": verdict.equivalent,
                        "witness": witness,
                    }),
                    {
                        let mut t = format!(
                            "suite of {} test(s): {}",
                            named.len(),
                            if verdict.equivalent {
                                "not distinguished (inconclusive)"
                            } else {
                                "distinguished"
                            }
                        );
                        if let Some(w) = &witness {
                            t.push_str(&format!("\nwitness: {w}"));
                        }
                        t
                    },
                );
                Ok(if verdict.equivalent { ExitCode::SUCCESS } else { ExitCode::from(1) })
            }
        }
        Command::Spectrum { pair, depth, format } => {
            let (model, s1, s2) = resolve_pair(&pair)?;
            let report = run_spectrum(&model, s1, s2, depth)?;
            let all_equal = report.rows.iter().all(|(_, v)| v.equivalent);
            emit(
                format,
                json!({
                    "schema_version": 1,
                    "command": "spectrum",
                    "results": report
                        .rows
                        .iter()
                        .map(|(name, v)| {
                            json!({
                                "equiv": name,
                                "verdict": if v.equivalent { "equal" } else { "distinct" },
                                "bounded": v.bounded,
                                "witness": v.witness.as_ref().map(|w| w.to_string()),
                            })
                        })
                        .collect::<Vec<_>>(),
                }),
                report
                    .rows
                    .iter()
                    .map(|(name, v)| {
                        format!(
                            "{name:<12} {}",
                            if v.equivalent { "equal" } else { "distinct" }
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
            );
            Ok(if all_equal { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Corpus { action: CorpusAction::Run { filter, dir, format } } => {
            let rows = run_corpus(&dir, filter.as_deref())?;
            if rows.is_empty() {
                return Err(CliError(format!(
                    "{}: no matching corpus entries",
                    dir.display()
                )));
            }
            let failures = rows.iter().filter(|r| !r.pass).count();
            emit(
                format,
                json!({
                    "schema_version": 1,
                    "command": "corpus",
                    "checked": rows.len(),
                    "failures": failures,
                    "rows": rows
                        .iter()
                        .map(|r| {
                            json!({
                                "entry": r.entry,
                                "check": r.check,
                                "expected": if r.expected == Expect::Equal { "equal" } else { "distinct" },
                                "got": if r.got == Expect::Equal { "equal" } else { "distinct" },
                                "pass": r.pass,
                            })
                        })
                        .collect::<Vec<_>>(),
                }),
                {
                    let mut lines: Vec<String> = rows
                        .iter()
                        .map(|r| {
                            format!(
                                "{} {:<28} {:<40} expected {:<8} got {:<8}",
                                if r.pass { "ok  " } else { "FAIL" },
                                r.entry,
                                r.check,
                                format!("{:?}", r.expected).to_lowercase(),
                                format!("{:?}", r.got).to_lowercase()
                            )
                        })
                        .collect();
                    lines.push(format!("{} check(s), {failures} failure(s)", rows.len()));
                    lines.join("\n")
                },
            );
            Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Fuzz { seeds, states, branch } => {
            let mut violations = 0u64;
            for seed in 0..seeds {
                let model = random_model(seed, states, branch, true);
                let s1 = 0;
                let s2 = if model.num_states() > 1 { 1 } else { 0 };
                if let Err(diag) = run_spectrum(&model, s1, s2, None) {
                    violations += 1;
                    let shrunk = shrink_model(&model, |m| {
                        m.num_states() > s2
                            && run_spectrum(m, s1, s2.min(m.num_states() - 1), None).is_err()
                    });
                    eprintln!("seed {seed}: {diag}");
                    println!("# shrunk counterexample for seed {seed}\n{}", serialize(&shrunk));
                }
                if (seed + 1) % 100 == 0 {
                    eprintln!("... {}/{} seeds", seed + 1, seeds);
                }
            }
            println!("{seeds} seed(s), {violations} violation(s)");
            Ok(if violations == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
