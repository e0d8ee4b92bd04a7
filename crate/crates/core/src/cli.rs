//! The `protoalg` command-line tool.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::equivalence::{
    check_equivalence, check_isomorphism, greatest_simulation, verify_equivalence, verify_isomorphism,
    verify_simulation, verify_theorem1, CoverageFailure, EquivalenceError, EquivalenceReport, Side,
};
use crate::gen;
use crate::io::{model_to_dot, parse_model, serialize_model, serialize_raw, state_graph_to_dot, AnalysisReport, ModelDigest};
use crate::model::{validate_proto_algorithm, BottomPolicy, ProtoAlgorithm, RawModel, State, ValidationLevel, Value};
use crate::semantics::{
    build_state_graph, computed_function, enumerate_runs, Entry, Run, SemanticsError, Terminal,
    UndefinedReason, Variant, DEFAULT_STATE_CAP,
};
use crate::transform::{build_sequential, sequentialize, TransformError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILS: i32 = 1;
pub const EXIT_INVALID_MODEL: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

/// Environment variable overriding the state-space bound.
pub const STATE_CAP_VAR: &str = "PROTOALG_STATE_CAP";

#[derive(Parser, Debug)]
#[command(name = "protoalg", version, about = "Workbench for concurrent proto-algorithms")]
struct Cli {
    /// Also write a machine-readable report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LevelArg {
    Strict,
    Lenient,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    Strict,
    Lifted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Algorithmic,
    Computational,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Algorithmic => Variant::Algorithmic,
            VariantArg::Computational => Variant::Computational,
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct Loading {
    /// Validation level for input models.
    #[arg(long, value_enum, default_value = "strict")]
    level: LevelArg,
}

#[derive(Args, Debug, Clone, Copy)]
struct PolicyOverride {
    /// Override the dummy-value policy declared in the model.
    #[arg(long, value_enum)]
    bottom_policy: Option<PolicyArg>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a model and classify it.
    Validate {
        model: PathBuf,
        #[command(flatten)]
        load: Loading,
        #[command(flatten)]
        policy: PolicyOverride,
    },
    /// Enumerate the runs from one input.
    Run {
        model: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value = "algorithmic")]
        variant: VariantArg,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        #[arg(long, default_value_t = 10_000)]
        max_runs: usize,
        #[command(flatten)]
        load: Loading,
        #[command(flatten)]
        policy: PolicyOverride,
    },
    /// Compute the input/output function.
    Compute {
        model: PathBuf,
        #[arg(long)]
        input: Option<String>,
        #[command(flatten)]
        load: Loading,
        #[command(flatten)]
        policy: PolicyOverride,
    },
    /// Decide isomorphism.
    CheckIso {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        load: Loading,
    },
    /// Decide whether A is simulated by B.
    CheckSim {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "algorithmic")]
        variant: VariantArg,
        #[command(flatten)]
        load: Loading,
    },
    /// Decide equivalence.
    CheckEquiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "algorithmic")]
        variant: VariantArg,
        #[command(flatten)]
        load: Loading,
    },
    /// Compile into an equivalent non-deterministic sequential model.
    Sequentialize {
        model: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Check equivalence with the source and report the certificate.
        #[arg(long)]
        certify: bool,
        #[command(flatten)]
        load: Loading,
    },
    /// Write a Graphviz rendering of the component graphs or a state graph.
    ExportDot {
        model: PathBuf,
        #[arg(long)]
        state_graph: bool,
        #[arg(long)]
        input: Option<String>,
        #[arg(long, value_enum, default_value = "algorithmic")]
        variant: VariantArg,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        load: Loading,
    },
    /// Emit a parameterized reference model.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand, Debug)]
enum Family {
    /// Sequential countdown over 0..=N.
    Countdown {
        n: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Two-component handoff bumping the shared datum up to N.
    Handoff {
        n: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A command outcome that ends with a non-zero exit code.
struct Fail {
    code: i32,
    lines: Vec<String>,
}

impl Fail {
    fn new(code: i32, line: impl Into<String>) -> Fail {
        Fail {
            code,
            lines: vec![line.into()],
        }
    }
}

impl From<SemanticsError> for Fail {
    fn from(e: SemanticsError) -> Fail {
        let code = match e {
            SemanticsError::NotAnInput { .. } => EXIT_USAGE,
            _ => EXIT_RESOURCE,
        };
        Fail::new(code, e.to_string())
    }
}

impl From<EquivalenceError> for Fail {
    fn from(e: EquivalenceError) -> Fail {
        match e {
            EquivalenceError::Semantics(s) => s.into(),
            EquivalenceError::NotASimulation { .. } => Fail::new(EXIT_PROPERTY_FAILS, e.to_string()),
            _ => Fail::new(EXIT_RESOURCE, e.to_string()),
        }
    }
}

impl From<TransformError> for Fail {
    fn from(e: TransformError) -> Fail {
        match e {
            TransformError::Semantics(s) => s.into(),
            TransformError::Equivalence(s) => s.into(),
            TransformError::StuckSource { .. } | TransformError::NameCollision { .. } => {
                Fail::new(EXIT_INVALID_MODEL, e.to_string())
            }
            _ => Fail::new(EXIT_PROPERTY_FAILS, e.to_string()),
        }
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

fn state_cap() -> Result<usize, Fail> {
    match std::env::var(STATE_CAP_VAR) {
        Err(_) => Ok(DEFAULT_STATE_CAP),
        Ok(s) => s
            .parse()
            .map_err(|_| Fail::new(EXIT_USAGE, format!("{STATE_CAP_VAR} must be a positive integer, got `{s}`"))),
    }
}

struct Session {
    report: AnalysisReport,
    cap: usize,
}

impl Session {
    fn say(&mut self, line: impl Into<String>) {
        self.report.summary.push(line.into());
    }

    fn load(&mut self, path: &Path, load: Loading, policy: Option<PolicyArg>) -> Result<ProtoAlgorithm, Fail> {
        let shown = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|e| Fail::new(EXIT_USAGE, format!("cannot read {shown}: {e}")))?;
        self.report.models.push(ModelDigest::of(&shown, &bytes));
        let text = String::from_utf8(bytes).map_err(|_| Fail::new(EXIT_INVALID_MODEL, format!("{shown}: not UTF-8 text")))?;
        let mut raw = parse_model(&text).map_err(|errs| Fail {
            code: EXIT_INVALID_MODEL,
            lines: errs.iter().map(|e| format!("{shown}: {e}")).collect(),
        })?;
        if let Some(p) = policy {
            raw.interpretation.bottom_policy = match p {
                PolicyArg::Strict => BottomPolicy::Strict,
                PolicyArg::Lifted => BottomPolicy::Lifted,
            };
        }
        let level = match load.level {
            LevelArg::Strict => ValidationLevel::Strict,
            LevelArg::Lenient => ValidationLevel::Lenient,
        };
        let a = validate_proto_algorithm(&raw, level).map_err(|errs| Fail {
            code: EXIT_INVALID_MODEL,
            lines: errs.iter().map(|e| format!("{shown}: {e}")).collect(),
        })?;
        for w in a.warnings() {
            self.report.diagnostics.push(format!("warning: {shown}: {w}"));
        }
        Ok(a)
    }
}

fn input_value(a: &ProtoAlgorithm, name: &str) -> Result<Value, Fail> {
    let i = a.interpretation();
    i.value(name)
        .filter(|v| i.in_input(*v))
        .ok_or_else(|| Fail::new(EXIT_USAGE, format!("`{name}` is not in the input domain")))
}

fn names(a: &ProtoAlgorithm, vs: impl IntoIterator<Item = Value>) -> Vec<String> {
    vs.into_iter().map(|v| a.interpretation().name(v).to_string()).collect()
}

fn run_json(a: &ProtoAlgorithm, r: &Run) -> Json {
    let terminal = match r.terminal {
        Terminal::Final => json!({"kind": "final"}),
        Terminal::Stuck => json!({"kind": "stuck"}),
        Terminal::Cutoff => json!({"kind": "cutoff"}),
        Terminal::Lasso { cycle_start } => json!({"kind": "lasso", "cycle_start": cycle_start}),
    };
    json!({
        "terminal": terminal,
        "length": r.len(),
        "output": r.output().map(|v| a.interpretation().name(v).to_string()),
        "states": r.states.iter().map(|s| s.render(a)).collect::<Vec<_>>(),
    })
}

fn terminal_name(t: Terminal) -> String {
    match t {
        Terminal::Final => "FINAL".into(),
        Terminal::Stuck => "STUCK".into(),
        Terminal::Cutoff => "CUTOFF".into(),
        Terminal::Lasso { cycle_start } => format!("LASSO@{cycle_start}"),
    }
}

const MAX_LISTED_PAIRS: usize = 5000;

fn relation_json(a: &ProtoAlgorithm, b: &ProtoAlgorithm, r: &EquivalenceReport) -> Json {
    let failures: Vec<String> = r.failures.iter().map(|f| failure_text(a, b, f)).collect();
    let pairs = if r.relation.len() <= MAX_LISTED_PAIRS {
        json!(r
            .relation
            .pairs
            .iter()
            .map(|(s, t)| [s.render(a), t.render(b)])
            .collect::<Vec<_>>())
    } else {
        Json::Null
    };
    json!({
        "check": r.check,
        "variant": r.variant,
        "verdict": r.verdict,
        "states": [r.states.0, r.states.1],
        "relation_size": r.relation.len(),
        "relation": pairs,
        "gamma_i": r.gamma_i.iter().map(|(x, y)| [a.interpretation().name(*x), b.interpretation().name(*y)]).collect::<Vec<_>>(),
        "gamma_o": r.gamma_o.iter().map(|(x, y)| [b.interpretation().name(*x), a.interpretation().name(*y)]).collect::<Vec<_>>(),
        "failures": failures,
    })
}

fn failure_text(a: &ProtoAlgorithm, b: &ProtoAlgorithm, f: &CoverageFailure) -> String {
    let render = |side: Side, s: &State| match side {
        Side::Left => format!("left {}", s.render(a)),
        Side::Right => format!("right {}", s.render(b)),
    };
    match f {
        CoverageFailure::Initial { side, state } => format!("initial state {} has no related initial state", render(*side, state)),
        CoverageFailure::Final { side, state } => format!("final state {} has no related final state", render(*side, state)),
    }
}

fn execute(cmd: &Command, s: &mut Session) -> Result<i32, Fail> {
    match cmd {
        Command::Validate { model, load, policy } => {
            let a = s.load(model, *load, policy.bottom_policy)?;
            let classes = json!({
                "components": a.components().len(),
                "sequential": a.is_sequential(),
                "classical_alphabet": a.alphabet().is_classical(),
                "nondeterministic_components": a.has_nondeterministic_components(),
                "bottom_policy": a.interpretation().policy(),
            });
            s.say(format!("{}: valid", model.display()));
            s.say(format!(
                "components: {}, sequential: {}, classical alphabet: {}, nondeterministic components: {}",
                a.components().len(),
                a.is_sequential(),
                a.alphabet().is_classical(),
                a.has_nondeterministic_components()
            ));
            s.report.verdict = Some(true);
            s.report.result = json!({"valid": true, "classification": classes});
            Ok(EXIT_OK)
        }
        Command::Run {
            model,
            input,
            variant,
            max_steps,
            max_runs,
            load,
            policy,
        } => {
            let a = s.load(model, *load, policy.bottom_policy)?;
            let d = input_value(&a, input)?;
            let runs = enumerate_runs(&a, d, (*variant).into(), *max_steps, *max_runs)?;
            s.say(format!("{} run(s) from input {input} ({})", runs.len(), Variant::from(*variant)));
            for (k, r) in runs.iter().enumerate() {
                let out = r.output().map_or("_bot".to_string(), |v| a.interpretation().name(v).to_string());
                s.say(format!("run {}: {} after {} states, output {out}", k + 1, terminal_name(r.terminal), r.len()));
                for st in &r.states {
                    s.say(format!("    {}", st.render(&a)));
                }
            }
            s.report.result = json!({"runs": runs.iter().map(|r| run_json(&a, r)).collect::<Vec<_>>()});
            Ok(EXIT_OK)
        }
        Command::Compute { model, input, load, policy } => {
            let a = s.load(model, *load, policy.bottom_policy)?;
            let only = input.as_deref().map(|i| input_value(&a, i)).transpose()?;
            let f = computed_function(&a, s.cap)?;
            let mut rows = Vec::new();
            for (d, e) in &f.entries {
                if only.is_some_and(|o| o != *d) {
                    continue;
                }
                let dn = a.interpretation().name(*d).to_string();
                match e {
                    Entry::Defined(outs) => {
                        let o = names(&a, outs.iter().copied());
                        s.say(format!("{dn} -> {{{}}}", o.join(", ")));
                        rows.push(json!({"input": dn, "defined": true, "outputs": o}));
                    }
                    Entry::Undefined { reason, partial_outputs } => {
                        let o = names(&a, partial_outputs.iter().copied());
                        let (why, witness) = match reason {
                            UndefinedReason::Divergent(run) => ("divergent", run_json(&a, run)),
                            UndefinedReason::Stuck(st) => ("stuck", json!(st.render(&a))),
                        };
                        s.say(format!("{dn} -> undefined ({why}); partial outputs {{{}}}", o.join(", ")));
                        rows.push(json!({
                            "input": dn,
                            "defined": false,
                            "reason": why,
                            "witness": witness,
                            "partial_outputs": o,
                        }));
                    }
                }
            }
            s.report.result = json!({"function": rows});
            Ok(EXIT_OK)
        }
        Command::CheckIso { a, b, load } => {
            let x = s.load(a, *load, None)?;
            let y = s.load(b, *load, None)?;
            match check_isomorphism(&x, &y)? {
                None => {
                    s.say("not isomorphic");
                    s.report.verdict = Some(false);
                    s.report.result = json!({"isomorphic": false});
                    Ok(EXIT_PROPERTY_FAILS)
                }
                Some(w) => {
                    let verified = verify_isomorphism(&x, &y, &w);
                    let (ix, iy) = (x.interpretation(), y.interpretation());
                    let vertices: Vec<Json> = w
                        .vertices
                        .iter()
                        .enumerate()
                        .map(|(k, m)| {
                            let (g, h) = (&x.components()[k], &y.components()[w.components[k]]);
                            json!(m.iter().enumerate().map(|(v, t)| [g.id(v as u32), h.id(*t)]).collect::<Vec<_>>())
                        })
                        .collect();
                    let data = |pairs: &[(Value, Value)]| {
                        json!(pairs.iter().map(|(p, q)| [ix.name(*p), iy.name(*q)]).collect::<Vec<_>>())
                    };
                    s.say("isomorphic");
                    if let Err(e) = &verified {
                        s.report.diagnostics.push(format!("witness check failed: {e}"));
                    }
                    s.report.verdict = Some(verified.is_ok());
                    s.report.result = json!({
                        "isomorphic": true,
                        "witness_verified": verified.is_ok(),
                        "swap_edge_labels": w.swap_bits,
                        "components": w.components.iter().map(|c| c + 1).collect::<Vec<_>>(),
                        "vertices": vertices,
                        "symbols": x.alphabet().symbols().map(|f| [x.alphabet().name(f), y.alphabet().name(w.symbols[f.0 as usize])]).collect::<Vec<_>>(),
                        "main_domain": data(&w.main),
                        "input_domain": data(&w.input),
                        "output_domain": data(&w.output),
                    });
                    Ok(if verified.is_ok() { EXIT_OK } else { EXIT_PROPERTY_FAILS })
                }
            }
        }
        Command::CheckSim { a, b, variant, load } => {
            let x = s.load(a, *load, None)?;
            let y = s.load(b, *load, None)?;
            let r = greatest_simulation(&x, &y, (*variant).into(), s.cap)?;
            let mut result = relation_json(&x, &y, &r);
            let mut ok = r.verdict;
            if r.verdict {
                if let Err(e) = verify_simulation(&x, &y, &r.relation) {
                    s.report.diagnostics.push(format!("relation check failed: {e}"));
                    ok = false;
                }
                let t = verify_theorem1(&x, &y, &r.relation, s.cap, 10_000, 10_000)?;
                result["consequences"] = json!({
                    "gamma_i": t.gamma_i.iter().map(|(p, q)| [x.interpretation().name(*p), y.interpretation().name(*q)]).collect::<Vec<_>>(),
                    "gamma_o": t.gamma_o.iter().map(|(p, q)| [y.interpretation().name(*p), x.interpretation().name(*q)]).collect::<Vec<_>>(),
                    "definedness": t.definedness,
                    "outputs": t.outputs,
                    "run_lengths": t.run_lengths,
                });
            }
            for f in &r.failures {
                s.report.diagnostics.push(failure_text(&x, &y, f));
            }
            s.say(format!(
                "{} {} simulated by {} ({})",
                a.display(),
                if ok { "is" } else { "is not" },
                b.display(),
                r.variant
            ));
            s.report.verdict = Some(ok);
            s.report.result = result;
            Ok(if ok { EXIT_OK } else { EXIT_PROPERTY_FAILS })
        }
        Command::CheckEquiv { a, b, variant, load } => {
            let x = s.load(a, *load, None)?;
            let y = s.load(b, *load, None)?;
            let r = check_equivalence(&x, &y, (*variant).into(), s.cap)?;
            let mut ok = r.verdict;
            if r.verdict {
                if let Err(e) = verify_equivalence(&x, &y, &r.relation) {
                    s.report.diagnostics.push(format!("relation check failed: {e}"));
                    ok = false;
                }
            }
            for f in &r.failures {
                s.report.diagnostics.push(failure_text(&x, &y, f));
            }
            s.say(format!(
                "{} and {} are {}equivalent ({})",
                a.display(),
                b.display(),
                if ok { "" } else { "not " },
                r.variant
            ));
            s.report.verdict = Some(ok);
            s.report.result = relation_json(&x, &y, &r);
            Ok(if ok { EXIT_OK } else { EXIT_PROPERTY_FAILS })
        }
        Command::Sequentialize {
            model,
            output,
            certify,
            load,
        } => {
            let a = s.load(model, *load, None)?;
            let r = if *certify {
                sequentialize(&a, s.cap)?
            } else {
                build_sequential(&a, s.cap)?
            };
            let mut raw: RawModel = r.raw.clone();
            let source = &s.report.models[0];
            raw.provenance
                .get_or_insert_with(Default::default)
                .insert("source_sha256".into(), source.sha256.clone());
            write_atomic(output, serialize_raw(&raw).as_bytes())
                .map_err(|e| Fail::new(EXIT_USAGE, format!("cannot write {}: {e}", output.display())))?;
            let g = &r.output.components()[0];
            s.say(format!(
                "wrote {}: {} vertices, {} edges, {} data tuples",
                output.display(),
                g.len(),
                g.edge_count(),
                r.output.interpretation().main_domain().len()
            ));
            for w in r.output.warnings() {
                s.report.diagnostics.push(format!("warning: output: {w}"));
            }
            let mut result = json!({
                "output": output.display().to_string(),
                "vertices": g.len(),
                "edges": g.edge_count(),
                "data_tuples": r.output.interpretation().main_domain().len(),
                "symbol_map": r.symbol_map.iter().map(|(f, i, g)| json!([f, i, g])).collect::<Vec<_>>(),
            });
            if let Some(c) = &r.certificate {
                s.say(format!(
                    "certificate: algorithmic equivalence {}, state correspondence {}",
                    if c.report.verdict { "holds" } else { "fails" },
                    if c.correspondence_checked.is_ok() { "verified" } else { "rejected" }
                ));
                result["certificate"] = json!({
                    "equivalence": relation_json(&a, &r.output, &c.report),
                    "correspondence_size": c.correspondence.len(),
                    "correspondence_verified": c.correspondence_checked.is_ok(),
                });
                s.report.verdict = Some(c.holds());
            }
            s.report.result = result;
            Ok(EXIT_OK)
        }
        Command::ExportDot {
            model,
            state_graph,
            input,
            variant,
            output,
            load,
        } => {
            let a = s.load(model, *load, None)?;
            let dot = if *state_graph {
                let Some(input) = input else {
                    return Err(Fail::new(EXIT_USAGE, "--state-graph needs --input"));
                };
                let d = input_value(&a, input)?;
                let g = build_state_graph(&a, (*variant).into(), Some(&[d]), s.cap)?;
                let start = g.index_of(&State::initial(d)).expect("initial state present");
                let keep = g.reachable_from(&[start]);
                s.say(format!(
                    "{} states reachable from input {input}",
                    keep.iter().filter(|k| **k).count()
                ));
                state_graph_to_dot(&a, &g, &keep)
            } else {
                if input.is_some() {
                    return Err(Fail::new(EXIT_USAGE, "--input only applies with --state-graph"));
                }
                model_to_dot(&a)
            };
            write_atomic(output, dot.as_bytes())
                .map_err(|e| Fail::new(EXIT_USAGE, format!("cannot write {}: {e}", output.display())))?;
            s.say(format!("wrote {}", output.display()));
            s.report.result = json!({"output": output.display().to_string()});
            Ok(EXIT_OK)
        }
        Command::Gen { family } => {
            let (raw, out) = match family {
                Family::Countdown { n, output } => (gen::countdown(*n), output),
                Family::Handoff { n, output } => {
                    if *n < 1 {
                        return Err(Fail::new(EXIT_USAGE, "handoff needs N >= 1"));
                    }
                    (gen::handoff(*n), output)
                }
            };
            let a = validate_proto_algorithm(&raw, ValidationLevel::Strict).map_err(|errs| Fail {
                code: EXIT_INVALID_MODEL,
                lines: errs.iter().map(|e| e.to_string()).collect(),
            })?;
            let text = serialize_model(&a);
            match out {
                Some(p) => {
                    write_atomic(p, text.as_bytes())
                        .map_err(|e| Fail::new(EXIT_USAGE, format!("cannot write {}: {e}", p.display())))?;
                    s.say(format!("wrote {}", p.display()));
                }
                None => s.say(text.trim_end().to_string()),
            }
            Ok(EXIT_OK)
        }
    }
}

/// Runs the tool on `args` (including the program name), writing the
/// human-readable report to `out` and errors to `err`. Returns the exit code.
pub fn run_cli(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let target: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut session = Session {
        report: AnalysisReport::new(args.iter().skip(1).cloned().collect()),
        cap: DEFAULT_STATE_CAP,
    };
    let outcome = state_cap().and_then(|cap| {
        session.cap = cap;
        execute(&cli.command, &mut session)
    });
    let _ = write!(out, "{}", session.report.to_text());
    let code = match outcome {
        Ok(code) => code,
        Err(f) => {
            for l in &f.lines {
                let _ = writeln!(err, "error: {l}");
            }
            session.report.diagnostics.extend(f.lines.iter().map(|l| format!("error: {l}")));
            f.code
        }
    };
    session.report.exit_code = code;
    session.report.resources = json!({"state_cap": session.cap});
    if let Some(path) = &cli.json {
        if let Err(e) = write_atomic(path, session.report.to_json().as_bytes()) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    code
}
