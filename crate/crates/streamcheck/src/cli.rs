//! The `streamcheck` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use streamcheck_core::abstraction::{
    check_correspondence, concretize, eval_relation, verify_galois, ConcretizeError, GaloisError, GaloisOptions, GaloisOutcome,
    Orientation, ParamBinding,
};
use streamcheck_core::component::{check_causality, CausalityOptions, CausalityOutcome, DomainChoice, SimError};
use streamcheck_core::testing::{suite_run, Status};
use streamcheck_core::{Causality, ComponentSpec, SimOptions, TestCase, TestInput};

use crate::model::{parse_model, ModelDocument, Refinement};
use crate::report::{
    exit, CausalityCex, CausalityOut, CheckCase, ConcCase, Detail, DivergenceOut, GaloisCex, HistoryTable, Level, Message, Outcome, Report,
    SimCase, TestCaseOut,
};
use crate::vectors::{bind_params, parse_vector_file, serialize_testcases, VectorCase};

#[derive(Debug, Parser)]
#[command(
    name = "streamcheck",
    version,
    about = "Simulate, test and relate stream-processing component models"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model file(s); several files are read as one model.
    #[arg(long, required = true)]
    pub model: Vec<PathBuf>,
    /// Resolve overlapping guards by declaration order instead of failing.
    #[arg(long)]
    pub permissive: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a component on test inputs and print its outputs.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        component: String,
        /// Input vectors; expected sections are ignored.
        #[arg(long)]
        vectors: Option<PathBuf>,
        /// Number of ticks; defaults to the length of each input.
        #[arg(long)]
        ticks: Option<usize>,
    },
    /// Run test-cases and compare against expected results.
    Test {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        component: String,
        #[arg(long, required = true)]
        vectors: Vec<PathBuf>,
        /// Tolerance for real-valued channels.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Turn abstract test inputs into concrete ones.
    Concretize {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        refinement: String,
        /// Abstract vectors, with a `#params` section per case.
        #[arg(long)]
        vectors: PathBuf,
        /// Where to write the concrete vectors; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that abstract and concrete inputs correspond.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        refinement: String,
        /// Abstract vectors.
        #[arg(long)]
        vectors: PathBuf,
        /// Concrete vectors, paired with the abstract cases by name or
        /// position. Without this the refinement's concretizer is used.
        #[arg(long)]
        concrete: Option<PathBuf>,
    },
    /// Check a Galois connection over its bounded universe.
    VerifyGalois {
        #[command(flatten)]
        model: ModelArgs,
        /// Refinement whose connection to check.
        #[arg(long, required_unless_present = "galois")]
        refinement: Option<String>,
        /// Connection to check, by name.
        #[arg(long, conflicts_with = "refinement")]
        galois: Option<String>,
        /// Element cap per side, optionally followed by a horizon cap: `N` or `N,L`.
        #[arg(long, value_parser = parse_caps)]
        caps: Option<(usize, Option<usize>)>,
        /// Compare against `Ta ⊆ g(Tc)` instead of `Tc ⊆ g(Ta)`.
        #[arg(long)]
        literal: bool,
    },
    /// Search for causality violations.
    Causality {
        #[command(flatten)]
        model: ModelArgs,
        /// Component to check; all of them if omitted.
        #[arg(long)]
        component: Option<String>,
        /// Mode to check against; defaults to each component's own.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Horizon of the input histories.
        #[arg(long, default_value_t = 3)]
        ticks: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw inputs from two values per channel or from full domains.
        #[arg(long, value_enum, default_value_t = DomainArg::TwoPoint)]
        domains: DomainArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    TwoPoint,
    Full,
}

fn parse_caps(s: &str) -> Result<(usize, Option<usize>), String> {
    let bad = || format!("`{s}` is not `N` or `N,L`");
    let mut it = s.split(',');
    let n = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let l = match it.next() {
        Some(l) => Some(l.trim().parse().map_err(|_| bad())?),
        None => None,
    };
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((n, l))
}

/// Parses `args` (program name first), runs the command and writes its
/// output. Returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                exit::USAGE
            } else {
                let _ = write!(out, "{text}");
                exit::OK
            };
        }
    };
    let (report, extra) = execute(&cli.command);
    match cli.format {
        Format::Json => {
            let _ = writeln!(out, "{}", report.to_json());
        }
        Format::Human => {
            let color = std::env::var("STREAMCHECK_COLOR").is_ok_and(|v| matches!(v.as_str(), "1" | "always" | "true" | "yes"));
            let (body, msgs) = report.to_human(color);
            let _ = write!(out, "{}", extra.unwrap_or(body));
            let _ = write!(err, "{msgs}");
        }
    }
    report.exit_code
}

/// Runs a command. The second value, when present, replaces the human
/// rendering on stdout.
pub fn execute(cmd: &Command) -> (Report, Option<String>) {
    let name = match cmd {
        Command::Simulate { .. } => "simulate",
        Command::Test { .. } => "test",
        Command::Concretize { .. } => "concretize",
        Command::Check { .. } => "check",
        Command::VerifyGalois { .. } => "verify-galois",
        Command::Causality { .. } => "causality",
    };
    let mut r = Report::new(name);
    let extra = run_command(cmd, &mut r).unwrap_or_default();
    (r, extra)
}

/// The report already holds the reason.
struct Stop;

type Step<T> = Result<T, Stop>;

fn sim_opts(m: &ModelArgs) -> SimOptions {
    if m.permissive {
        SimOptions::permissive()
    } else {
        SimOptions::default()
    }
}

fn usage(r: &mut Report, text: impl Into<String>) -> Stop {
    r.fail_with(exit::USAGE, Message::new(Level::Error, text));
    Stop
}

fn read(r: &mut Report, path: &Path) -> Step<Vec<u8>> {
    fs::read(path).map_err(|e| usage(r, format!("cannot read {}: {e}", path.display())))
}

fn load_model(r: &mut Report, m: &ModelArgs) -> Step<ModelDocument> {
    let mut text = String::new();
    let mut starts: Vec<(usize, String)> = Vec::new();
    let mut line = 1;
    for p in &m.model {
        let bytes = read(r, p)?;
        let s = String::from_utf8(bytes).map_err(|e| usage(r, format!("{}: not valid UTF-8 ({e})", p.display())))?;
        starts.push((line, p.display().to_string()));
        line += s.lines().count();
        text.push_str(&s);
        if !s.ends_with('\n') {
            text.push('\n');
        }
    }
    parse_model(&text).map_err(|diags| {
        for d in diags {
            let (start, file) = starts
                .iter()
                .rev()
                .find(|(s, _)| *s <= d.pos.line)
                .cloned()
                .unwrap_or((1, String::new()));
            r.fail_with(
                exit::USAGE,
                Message::new(Level::Error, d.message).at(&file, d.pos.line - start + 1, Some(d.pos.col)),
            );
        }
        Stop
    })
}

fn component<'a>(r: &mut Report, doc: &'a ModelDocument, name: &str) -> Step<&'a ComponentSpec> {
    doc.component(name)
        .ok_or_else(|| usage(r, format!("no component `{name}` in the model")))
}

fn refinement<'a>(r: &mut Report, doc: &'a ModelDocument, name: &str) -> Step<&'a Refinement> {
    doc.refinement(name)
        .ok_or_else(|| usage(r, format!("no refinement `{name}` in the model")))
}

fn load_vectors(r: &mut Report, path: &Path, spec: &ComponentSpec) -> Step<Vec<VectorCase>> {
    let bytes = read(r, path)?;
    let file = path.display().to_string();
    let text = String::from_utf8(bytes).map_err(|e| usage(r, format!("{file}: not valid UTF-8 ({e})")))?;
    parse_vector_file(&text, spec.interface()).map_err(|errs| {
        for e in errs {
            r.fail_with(exit::USAGE, Message::new(Level::Error, e.message).at(&file, e.line, e.col));
        }
        Stop
    })
}

fn sim_error(r: &mut Report, context: &str, e: &SimError) -> Stop {
    r.fail_with(exit::SIM, Message::new(Level::Error, format!("{context}: {e}")));
    Stop
}

fn run_command(cmd: &Command, r: &mut Report) -> Step<Option<String>> {
    match cmd {
        Command::Simulate {
            model,
            component: cname,
            vectors,
            ticks,
        } => {
            let doc = load_model(r, model)?;
            let spec = component(r, &doc, cname)?;
            let cases = match vectors {
                Some(p) => load_vectors(r, p, spec)?.into_iter().map(|c| c.case).collect(),
                None if spec.interface().inputs.is_empty() || *ticks == Some(0) => vec![TestCase {
                    name: "run".into(),
                    input: TestInput::new(streamcheck_core::ChannelHistory::new(ticks.unwrap_or(0))),
                    expected: Default::default(),
                }],
                None => return Err(usage(r, format!("`{cname}` has inputs; pass them with --vectors"))),
            };
            let mut out = Vec::new();
            for c in &cases {
                let n = ticks.unwrap_or(c.input.horizon());
                if n > c.input.horizon() && !spec.interface().inputs.is_empty() {
                    return Err(usage(
                        r,
                        format!("case `{}` has inputs for {} ticks, {n} requested", c.name, c.input.horizon()),
                    ));
                }
                let input = if spec.interface().inputs.is_empty() {
                    streamcheck_core::ChannelHistory::new(n)
                } else {
                    c.input.bindings.prefix(n).expect("checked above")
                };
                let output = streamcheck_core::component::run(spec, &input, n, sim_opts(model))
                    .map_err(|e| sim_error(r, &format!("case `{}`", c.name), &e))?;
                out.push(SimCase {
                    name: c.name.clone(),
                    ticks: n,
                    inputs: (&input).into(),
                    outputs: (&output).into(),
                });
            }
            r.detail = Detail::Simulate {
                component: cname.clone(),
                cases: out,
            };
            Ok(None)
        }
        Command::Test {
            model,
            component: cname,
            vectors,
            eps,
        } => {
            let doc = load_model(r, model)?;
            let spec = component(r, &doc, cname)?;
            let mut suite = Vec::new();
            for p in vectors {
                suite.extend(load_vectors(r, p, spec)?.into_iter().map(|c| c.case));
            }
            for c in &suite {
                if c.expected.alternatives.is_empty() {
                    return Err(usage(r, format!("case `{}` has no `#expected` section", c.name)));
                }
            }
            let rep = suite_run(spec, &suite, *eps, sim_opts(model));
            let div = |d: &streamcheck_core::testing::Divergence| DivergenceOut {
                tick: d.tick,
                channel: d.channel.clone(),
                expected: crate::report::json_value(&d.expected),
                actual: crate::report::json_value(&d.actual),
            };
            let cases = rep
                .cases
                .iter()
                .map(|c| TestCaseOut {
                    name: c.name.clone(),
                    status: match c.verdict.status {
                        Status::Pass => Outcome::Pass,
                        Status::Fail => Outcome::Fail,
                        Status::Error => Outcome::Error,
                    },
                    group: c.verdict.group,
                    first_divergence: c.verdict.first_divergence.as_ref().map(div),
                    divergences: c.verdict.per_channel.iter().map(div).collect(),
                    error: c.verdict.error.clone(),
                })
                .collect();
            if rep.errors > 0 {
                r.outcome = Outcome::Error;
                r.exit_code = exit::SIM;
            } else if rep.failed > 0 {
                r.outcome = Outcome::Fail;
                r.exit_code = exit::FAIL;
            }
            r.detail = Detail::Test {
                component: cname.clone(),
                eps: *eps,
                passed: rep.passed,
                failed: rep.failed,
                errors: rep.errors,
                cases,
            };
            Ok(None)
        }
        Command::Concretize {
            model,
            refinement: rname,
            vectors,
            out,
        } => {
            let doc = load_model(r, model)?;
            let refn = refinement(r, &doc, rname)?.clone();
            let Some(kname) = &refn.concretizer else {
                return Err(usage(r, format!("refinement `{rname}` has no concretizer")));
            };
            let conc = doc.concretizer(kname).expect("resolved").spec.clone();
            let spec_a = doc.component(&refn.abstract_component).expect("resolved");
            let cases = load_vectors(r, vectors, spec_a)?;
            let mut produced = Vec::new();
            let mut shown = Vec::new();
            for vc in &cases {
                let tc = concretize_case(r, &conc, vc, sim_opts(model))?;
                let ri_holds = match &refn.ri {
                    Some(ri) => {
                        let rel = &doc.relation(ri).expect("resolved").spec;
                        match eval_relation(rel, &vc.case.input.bindings, &tc.bindings, sim_opts(model)) {
                            Ok(ev) => Some(ev.holds),
                            Err(e) => {
                                r.warn(format!("case `{}`: {ri} could not be evaluated: {e}", vc.case.name));
                                None
                            }
                        }
                    }
                    None => None,
                };
                if ri_holds == Some(false) {
                    r.warn(format!(
                        "case `{}`: the concrete input does not satisfy {}",
                        vc.case.name,
                        refn.ri.as_deref().unwrap_or("")
                    ));
                }
                shown.push(ConcCase {
                    name: vc.case.name.clone(),
                    ri_holds,
                    concrete_input: (&tc.bindings).into(),
                });
                produced.push(TestCase {
                    name: vc.case.name.clone(),
                    input: tc,
                    expected: Default::default(),
                });
            }
            let text = serialize_testcases(&produced);
            let extra = match out {
                Some(p) => {
                    fs::write(p, &text).map_err(|e| usage(r, format!("cannot write {}: {e}", p.display())))?;
                    None
                }
                None => Some(text),
            };
            r.detail = Detail::Concretize {
                refinement: rname.clone(),
                concretizer: kname.clone(),
                out: out.as_ref().map(|p| p.display().to_string()),
                cases: shown,
            };
            Ok(extra)
        }
        Command::Check {
            model,
            refinement: rname,
            vectors,
            concrete,
        } => {
            let doc = load_model(r, model)?;
            let refn = refinement(r, &doc, rname)?.clone();
            let (Some(ri), Some(ro)) = (&refn.ri, &refn.ro) else {
                return Err(usage(r, format!("refinement `{rname}` needs both `ri` and `ro`")));
            };
            let ri = doc.relation(ri).expect("resolved").spec.clone();
            let ro = doc.relation(ro).expect("resolved").spec.clone();
            let spec_a = doc.component(&refn.abstract_component).expect("resolved");
            let spec_c = doc.component(&refn.concrete_component).expect("resolved");
            let abs = load_vectors(r, vectors, spec_a)?;
            let pairs: Vec<(String, TestInput, TestInput)> = match concrete {
                Some(p) => {
                    let con = load_vectors(r, p, spec_c)?;
                    if con.len() != abs.len() {
                        return Err(usage(r, format!("{} abstract cases but {} concrete ones", abs.len(), con.len())));
                    }
                    let by_name = abs.iter().all(|a| con.iter().any(|c| c.case.name == a.case.name));
                    abs.iter()
                        .enumerate()
                        .map(|(i, a)| {
                            let c = if by_name {
                                con.iter().find(|c| c.case.name == a.case.name).expect("checked")
                            } else {
                                &con[i]
                            };
                            (a.case.name.clone(), a.case.input.clone(), c.case.input.clone())
                        })
                        .collect()
                }
                None => {
                    let Some(k) = &refn.concretizer else {
                        return Err(usage(r, format!("refinement `{rname}` has no concretizer; pass --concrete")));
                    };
                    let conc = doc.concretizer(k).expect("resolved").spec.clone();
                    let mut v = Vec::new();
                    for a in &abs {
                        let tc = concretize_case(r, &conc, a, sim_opts(model))?;
                        v.push((a.case.name.clone(), a.case.input.clone(), tc));
                    }
                    v
                }
            };
            let mut out = Vec::new();
            let mut worst = exit::OK;
            for (name, ta, tc) in &pairs {
                let res = check_correspondence(spec_a, spec_c, &ri, &ro, ta, tc, sim_opts(model));
                for d in &res.diagnostics {
                    r.warn(format!("case `{name}`: {d}"));
                }
                let vacuous = !res.ri_holds && res.corresponding == Some(true);
                match res.corresponding {
                    Some(true) => {}
                    Some(false) => worst = worst.max(exit::FAIL),
                    None => worst = exit::SIM,
                }
                out.push(CheckCase {
                    name: name.clone(),
                    ri_holds: res.ri_holds,
                    ri_per_tick: res.ri_per_tick.clone(),
                    ro_holds: res.ro_holds,
                    ro_per_tick: res.witness.clone(),
                    corresponding: res.corresponding,
                    vacuous,
                    abstract_output: res.abstract_output.as_ref().map(HistoryTable::from),
                    concrete_output: res.concrete_output.as_ref().map(HistoryTable::from),
                });
            }
            r.exit_code = worst;
            r.outcome = match worst {
                exit::OK => Outcome::Pass,
                exit::FAIL => Outcome::Fail,
                _ => Outcome::Error,
            };
            r.detail = Detail::Check {
                refinement: rname.clone(),
                cases: out,
            };
            Ok(None)
        }
        Command::VerifyGalois {
            model,
            refinement: rname,
            galois,
            caps,
            literal,
        } => {
            let doc = load_model(r, model)?;
            let gname = match (rname, galois) {
                (_, Some(g)) => g.clone(),
                (Some(rn), None) => match &refinement(r, &doc, rn)?.galois {
                    Some(g) => g.clone(),
                    None => return Err(usage(r, format!("refinement `{rn}` has no galois connection"))),
                },
                (None, None) => unreachable!("clap requires one of them"),
            };
            let Some(decl) = doc.galois(&gname) else {
                return Err(usage(r, format!("no galois connection `{gname}` in the model")));
            };
            let mut opts = GaloisOptions::default();
            if let Some((n, l)) = caps {
                opts.max_elements = *n;
                if let Some(l) = l {
                    opts.max_horizon = *l;
                }
            }
            let orientation = if *literal { Orientation::Literal } else { Orientation::Standard };
            opts.orientation = orientation;
            let oname = if *literal { "literal" } else { "standard" }.to_string();
            match verify_galois(&decl.spec, &opts) {
                Ok(GaloisOutcome::Ok {
                    concrete_elements,
                    abstract_elements,
                    pairs_checked,
                }) => {
                    r.detail = Detail::Galois {
                        galois: gname,
                        orientation: oname,
                        ok: true,
                        concrete_elements: Some(concrete_elements),
                        abstract_elements: Some(abstract_elements),
                        pairs_checked: Some(pairs_checked),
                        counterexample: None,
                    };
                }
                Ok(GaloisOutcome::Counterexample(cx)) => {
                    let show = |hs: &[streamcheck_core::ChannelHistory]| hs.iter().map(history_text).collect();
                    r.outcome = Outcome::Fail;
                    r.exit_code = exit::FAIL;
                    r.detail = Detail::Galois {
                        galois: gname,
                        orientation: oname,
                        ok: false,
                        concrete_elements: None,
                        abstract_elements: None,
                        pairs_checked: None,
                        counterexample: Some(GaloisCex {
                            concrete_set: show(&cx.concrete_set),
                            abstract_set: show(&cx.abstract_set),
                            f_side: cx.f_side,
                            g_side: cx.g_side,
                        }),
                    };
                }
                Err(e @ (GaloisError::TooManyElements { .. } | GaloisError::HorizonTooLong { .. } | GaloisError::NoUniverse(_))) => {
                    return Err(usage(r, format!("refusing to enumerate: {e}")));
                }
                Err(e) => {
                    r.fail_with(exit::SIM, Message::new(Level::Error, e.to_string()));
                    return Err(Stop);
                }
            }
            Ok(None)
        }
        Command::Causality {
            model,
            component: cname,
            mode,
            ticks,
            budget,
            seed,
            domains,
        } => {
            let doc = load_model(r, model)?;
            let specs: Vec<&ComponentSpec> = match cname {
                Some(n) => vec![component(r, &doc, n)?],
                None => doc.components.iter().collect(),
            };
            let opts = CausalityOptions {
                horizon: *ticks,
                budget: *budget,
                domains: match domains {
                    DomainArg::TwoPoint => DomainChoice::TwoPoint,
                    DomainArg::Full => DomainChoice::Full { max_per_channel: 16 },
                },
                seed: *seed,
                mode: mode.map(|m| match m {
                    ModeArg::Strict => Causality::Strict,
                    ModeArg::Weak => Causality::Weak,
                }),
                sim: sim_opts(model),
            };
            let mut outs = Vec::new();
            let mut worst = exit::OK;
            for s in specs {
                let m = opts.mode.unwrap_or_else(|| s.effective_causality());
                let mut o = CausalityOut {
                    component: s.name().to_string(),
                    mode: m.to_string(),
                    ok: false,
                    exhaustive: None,
                    checked: None,
                    counterexample: None,
                    error: None,
                };
                match check_causality(s, &opts) {
                    Ok(CausalityOutcome::Ok { exhaustive, checked }) => {
                        o.ok = true;
                        o.exhaustive = Some(exhaustive);
                        o.checked = Some(checked);
                    }
                    Ok(CausalityOutcome::Counterexample(cx)) => {
                        worst = worst.max(exit::FAIL);
                        o.counterexample = Some(CausalityCex {
                            agree_through: cx.agree_through,
                            diverges_at: cx.diverges_at,
                            x1: (&cx.x1).into(),
                            x2: (&cx.x2).into(),
                            y1: (&cx.y1).into(),
                            y2: (&cx.y2).into(),
                        });
                    }
                    Err(e) => {
                        worst = exit::SIM;
                        o.error = Some(e.to_string());
                    }
                }
                outs.push(o);
            }
            r.exit_code = worst;
            r.outcome = match worst {
                exit::OK => Outcome::Pass,
                exit::FAIL => Outcome::Fail,
                _ => Outcome::Error,
            };
            r.detail = Detail::Causality {
                seed: *seed,
                horizon: *ticks,
                components: outs,
            };
            Ok(None)
        }
    }
}

fn concretize_case(
    r: &mut Report,
    conc: &streamcheck_core::abstraction::ConcretizerSpec,
    vc: &VectorCase,
    opts: SimOptions,
) -> Step<TestInput> {
    let params: ParamBinding = match &vc.params {
        Some(t) => bind_params(t, &conc.params).map_err(|errs| {
            for e in errs {
                r.fail_with(exit::USAGE, Message::new(Level::Error, format!("case `{}`: {e}", vc.case.name)));
            }
            Stop
        })?,
        None => ParamBinding::new(),
    };
    concretize(conc, &params, &vc.case.input, opts).map_err(|e| {
        let code = match e {
            ConcretizeError::Sim(_) | ConcretizeError::Galois(_) => exit::SIM,
            _ => exit::USAGE,
        };
        r.fail_with(code, Message::new(Level::Error, format!("case `{}`: {e}", vc.case.name)));
        Stop
    })
}

fn history_text(h: &streamcheck_core::ChannelHistory) -> String {
    let parts: Vec<String> = h
        .iter()
        .map(|(c, s)| {
            let vs: Vec<String> = s.values().iter().map(streamcheck_core::expr::literal_text).collect();
            format!("{c}=[{}]", vs.join(", "))
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}
