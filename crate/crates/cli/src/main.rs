//! `snb`: evaluate super Nambu brackets, check their identities, evolve
//! Nambu-Hamilton systems and run the Lie-algebra construction.

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use snb_core::bracket::{eval_bracket, load_spec, nh_field, BracketSpec, Convention};
use snb_core::bv::{self, DeltaOperator, LogDensity};
use snb_core::dynamics::{self, NHSystem, DEFAULT_DEGREE_CAP, DEFAULT_ORDER};
use snb_core::graded::{parse, GradedSpace, Supernumber};
use snb_core::identities;
use snb_core::lie::{self, InvarianceReading};
use snb_core::report::{CheckParams, CheckReport};
use snb_core::Error;

#[derive(Parser)]
#[command(name = "snb", version, about = "Exact super Nambu bracket engine")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Builtin bracket name (odd_r21, even_r12, antibracket_r11) or spec JSON path.
    #[arg(long, global = true, default_value = "odd_r21")]
    bracket: String,
    /// Coordinate declaration such as `x1:b,x2:b,th:f`; must match the bracket.
    #[arg(long, global = true)]
    space: Option<String>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Samples per argument-parity pattern.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,
    /// Maximum bosonic degree of random inputs.
    #[arg(long, global = true, default_value_t = 2)]
    max_degree: u32,
    /// Even log-density σ (ρ = e^σ), or `random` for a seeded random one.
    #[arg(long, global = true)]
    density: Option<String>,
    /// Composition order for the field-commutator relation; both when omitted.
    #[arg(long, global = true)]
    convention: Option<Convention>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a bracket, an NH field, Δ, or a single expression.
    Eval {
        /// Bracket arguments separated by `;`.
        #[arg(long)]
        args: Option<String>,
        /// Print the NH field of the given n−1 arguments instead.
        #[arg(long, requires = "args")]
        field: bool,
        /// Print Δ of the given n−1 arguments instead.
        #[arg(long, requires = "args", conflicts_with = "field")]
        delta: bool,
        /// Normalize one expression and print its parity.
        #[arg(long, conflicts_with = "args")]
        expr: Option<String>,
    },
    /// Run identity or divergence suites.
    Check {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Frozen trailing arguments for `restricted-fi`, separated by `;`.
        #[arg(long)]
        tail: Option<String>,
    },
    /// Evolve the coordinates under df/dt = {f, h₁, …, h_{n−1}}.
    Dynamics {
        /// Hamiltonians separated by `;`.
        #[arg(long)]
        hamiltonians: String,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        degree_cap: u32,
        /// Extra quantities whose rate is reported, separated by `;`.
        #[arg(long)]
        quantities: Option<String>,
    },
    /// Validate an algebra and τ, then check the built bracket.
    Lie {
        /// Builtin algebra (abelian3, so3, heisenberg3, super21, gl2) or JSON path.
        #[arg(long, default_value = "so3")]
        algebra: String,
        /// `bracket`, `identity`, or a τ JSON path.
        #[arg(long, default_value = "bracket")]
        tau: String,
        /// Koszul reading asserted by the invariance condition.
        #[arg(long, default_value = "after")]
        reading: InvarianceReading,
        /// Evaluate the built bracket on these elements instead of checking.
        #[arg(long)]
        args: Option<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Skew,
    Leibniz,
    Fi,
    Cyclic,
    Genskew,
    Bv,
    DeltaFi,
    DeltaProduct,
    FieldCommutator,
    Nilpotency,
    RestrictedFi,
    DivFormula,
}

/// Exit status: 0 pass, 1 an asserted identity failed, 2 bad input.
enum Failure {
    Identity,
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<String, (Failure, String)>;

struct Ctx {
    global: Global,
    spec: Option<BracketSpec>,
}

impl Ctx {
    fn params(&self) -> CheckParams {
        CheckParams { seed: self.global.seed, samples: self.global.samples, max_degree: self.global.max_degree }
    }

    fn spec(&self) -> Result<&BracketSpec, Failure> {
        self.spec.as_ref().ok_or_else(|| Failure::Input("no bracket loaded".into()))
    }

    fn exprs(&self, text: &str) -> Result<Vec<Supernumber>, Failure> {
        let spec = self.spec()?;
        text.split(';').map(|t| parse(t, &spec.space).map_err(Failure::from)).collect()
    }

    fn density(&self) -> Result<LogDensity, Failure> {
        let spec = self.spec()?;
        Ok(match self.global.density.as_deref() {
            None => LogDensity::flat(&spec.space),
            Some("random") => LogDensity::random(&spec.space, 2, self.global.seed)?,
            Some(e) => LogDensity::new(parse(e, &spec.space)?)?,
        })
    }

    fn emit(&self, value: Value, text: String) -> String {
        if self.global.json {
            serde_json::to_string_pretty(&value).expect("json value serializes")
        } else {
            text
        }
    }
}

fn load(global: Global, needs_spec: bool) -> Result<Ctx, Failure> {
    let spec = if needs_spec { Some(load_spec(&global.bracket)?) } else { None };
    if let (Some(decl), Some(spec)) = (&global.space, &spec) {
        let declared: GradedSpace = decl.parse()?;
        if &declared != spec.space.as_ref() {
            return Err(Failure::Input(format!(
                "--space `{declared}` does not match bracket space `{}`",
                spec.space
            )));
        }
    }
    Ok(Ctx { global, spec })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let needs_spec = !matches!(cli.command, Command::Lie { .. });
    let outcome = load(cli.global, needs_spec).map_err(|f| (f, String::new())).and_then(|ctx| run(&ctx, cli.command));
    match outcome {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err((Failure::Identity, out)) => {
            emit(&out);
            ExitCode::from(1)
        }
        Err((Failure::Input(msg), _)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(out: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{out}");
}

fn run(ctx: &Ctx, cmd: Command) -> CmdResult {
    let input = |f: Failure| (f, String::new());
    match cmd {
        Command::Eval { args, field, delta, expr } => cmd_eval(ctx, args, field, delta, expr).map_err(input),
        Command::Check { suite, tail } => cmd_check(ctx, suite, tail),
        Command::Dynamics { hamiltonians, order, degree_cap, quantities } => {
            cmd_dynamics(ctx, &hamiltonians, order, degree_cap, quantities).map_err(input)
        }
        Command::Lie { algebra, tau, reading, args } => cmd_lie(ctx, &algebra, &tau, reading, args),
    }
}

fn cmd_eval(ctx: &Ctx, args: Option<String>, field: bool, delta: bool, expr: Option<String>) -> Result<String, Failure> {
    let spec = ctx.spec()?;
    if let Some(e) = expr {
        let v = parse(&e, &spec.space)?;
        let parity = v.parity().to_string();
        return Ok(ctx.emit(json!({ "value": v.to_string(), "parity": parity }), format!("{v}\nparity: {parity}")));
    }
    let Some(args) = args else {
        return Err(Failure::Input("eval needs --args or --expr".into()));
    };
    let a = ctx.exprs(&args)?;
    if field {
        let x = nh_field(spec, &a)?;
        let comps: Vec<(String, String)> =
            spec.space.coords().iter().zip(&x.components).map(|(c, v)| (c.name.clone(), v.to_string())).collect();
        let text = comps.iter().map(|(n, v)| format!("X^{n} = {v}")).collect::<Vec<_>>().join("\n");
        let obj: serde_json::Map<String, Value> = comps.into_iter().map(|(n, v)| (n, Value::String(v))).collect();
        return Ok(ctx.emit(Value::Object(obj), text));
    }
    let value = if delta {
        bv::delta(&DeltaOperator::new(spec.clone(), ctx.density()?)?, &a)?
    } else {
        eval_bracket(spec, &a)?
    };
    Ok(ctx.emit(json!({ "value": value.to_string() }), value.to_string()))
}

fn report_line(r: &CheckReport) -> String {
    let status = if r.passed() { "PASS" } else { "FAIL" };
    let mut line = format!("{status} {:<24} {} trials, {} failed comparisons", r.suite, r.trials, r.failure_count);
    for (k, v) in &r.diagnostics {
        let _ = write!(line, "; {k} = {v}");
    }
    if let Some(f) = r.failures.first() {
        let case = f.case.as_deref().map(|c| format!(" [{c}]")).unwrap_or_default();
        let _ = write!(line, "\n     first counterexample{case}: args ({})\n     lhs = {}\n     rhs = {}", f.args.join("; "), f.lhs, f.rhs);
    }
    line
}

fn cmd_check(ctx: &Ctx, suite: Suite, tail: Option<String>) -> CmdResult {
    let input = |f: Failure| (f, String::new());
    let spec = ctx.spec().map_err(input)?;
    let params = ctx.params();
    let mut reports: Vec<CheckReport> = Vec::new();
    let mut extra: Vec<(String, Value, String, bool)> = Vec::new();
    let op = || -> Result<DeltaOperator, Failure> { Ok(DeltaOperator::new(spec.clone(), ctx.density()?)?) };
    let mut run = |suite: Suite| -> Result<(), Failure> {
        match suite {
            Suite::All => reports.extend(identities::check_all(spec, &params)?),
            Suite::Skew => reports.push(identities::check_skew(spec, &params)?),
            Suite::Leibniz => {
                reports.push(identities::check_leibniz_first(spec, &params)?);
                reports.push(identities::check_leibniz_inner(spec, &params)?);
            }
            Suite::Fi => reports.push(identities::check_fi(spec, &params)?),
            Suite::Cyclic => reports.push(identities::check_cyclic(spec, &params)?),
            Suite::Genskew => reports.push(identities::check_generalized_skew(spec, &params)?),
            Suite::Bv => {
                let op = op()?;
                reports.push(bv::check_delta_skew(&op, &params)?);
                if spec.arity == 2 {
                    reports.push(bv::check_bv_n2(&op, &params)?);
                    reports.push(bv::check_delta_leibniz_n2(&op, &params)?);
                }
                reports.push(bv::check_delta_product(&op, &params)?);
                reports.push(bv::check_delta_fi(&op, &params)?);
            }
            Suite::DeltaFi => reports.push(bv::check_delta_fi(&op()?, &params)?),
            Suite::DeltaProduct => reports.push(bv::check_delta_product(&op()?, &params)?),
            Suite::FieldCommutator => {
                let op = op()?;
                match ctx.global.convention {
                    Some(c) => reports.push(bv::check_field_commutator(&op, c, &params)?),
                    None => {
                        let both = [Convention::Ab, Convention::Ba]
                            .map(|c| bv::check_field_commutator(&op, c, &params).map(|r| (c, r)));
                        let mut passing = Vec::new();
                        let mut text = Vec::new();
                        let mut docs = Vec::new();
                        for r in both {
                            let (c, r) = r?;
                            if r.passed() {
                                passing.push(c.to_string());
                            }
                            text.push(report_line(&r));
                            docs.push(serde_json::to_value(&r).expect("report serializes"));
                        }
                        let ok = !passing.is_empty();
                        text.push(format!(
                            "{} field commutator relation validates under: {}",
                            if ok { "PASS" } else { "FAIL" },
                            if ok { passing.join(", ") } else { "neither convention".into() }
                        ));
                        extra.push((
                            "field_commutator".into(),
                            json!({ "passing_conventions": passing, "reports": docs }),
                            text.join("\n"),
                            ok,
                        ));
                    }
                }
            }
            Suite::Nilpotency => {
                let probe = bv::probe_nilpotency(&op()?, &params)?;
                let text = format!(
                    "{} nilpotency {} on {} samples: {} nonzero{}{}",
                    if probe.passed() { "PASS" } else { "FAIL" },
                    probe.composite,
                    probe.trials,
                    probe.nonzero,
                    if probe.asserted { "" } else { " (exploratory, not asserted)" },
                    probe
                        .witness
                        .as_ref()
                        .map(|w| format!("\n     witness args ({}) -> {}", w.args.join("; "), w.value))
                        .unwrap_or_default()
                );
                let ok = probe.passed();
                extra.push(("nilpotency".into(), serde_json::to_value(&probe).expect("serializes"), text, ok));
            }
            Suite::RestrictedFi => {
                let tail_exprs = match &tail {
                    Some(t) => ctx.exprs(t)?,
                    None => {
                        let odd = spec.space.coords().iter().find(|c| c.kind.parity() == 1).ok_or_else(|| {
                            Failure::Input("restricted-fi needs --tail when the space has no odd coordinate".into())
                        })?;
                        vec![Supernumber::coordinate(&spec.space, &odd.name)?]
                    }
                };
                let s = identities::find_restricted_fi_failure(spec, &tail_exprs, &params)?;
                let text = match &s.witness {
                    Some(w) => format!(
                        "FOUND restricted FI violation after {} trials (tail {})\n     g = ({})\n     f = ({})\n     lhs = {}\n     rhs = {}",
                        s.trials,
                        s.tail.join("; "),
                        w.g.join("; "),
                        w.f.join("; "),
                        w.lhs,
                        w.rhs
                    ),
                    None => format!("NONE restricted FI held on all {} trials (tail {})", s.trials, s.tail.join("; ")),
                };
                extra.push(("restricted_fi".into(), serde_json::to_value(&s).expect("serializes"), text, true));
            }
            Suite::DivFormula => reports.push(bv::cross_check_div_formula(&params)?),
        }
        Ok(())
    };
    run(suite).map_err(input)?;
    let passed = reports.iter().all(CheckReport::passed) && extra.iter().all(|e| e.3);
    let mut text = vec![format!("bracket: {}  seed: {}  samples: {}  max-degree: {}", spec.name, params.seed, params.samples, params.max_degree)];
    if ctx.global.density.is_some() {
        text.push(format!("density: {}", ctx.density().map_err(input)?.sigma()));
    }
    text.extend(reports.iter().map(report_line));
    text.extend(extra.iter().map(|e| e.2.clone()));
    let mut doc = json!({
        "bracket": spec.name,
        "seed": params.seed,
        "params": params,
        "passed": passed,
        "reports": reports,
    });
    if ctx.global.density.is_some() {
        doc["density"] = Value::String(ctx.density().map_err(input)?.sigma().to_string());
    }
    for (k, v, _, _) in extra {
        doc[k] = v;
    }
    let out = ctx.emit(doc, text.join("\n"));
    if passed {
        Ok(out)
    } else {
        Err((Failure::Identity, out))
    }
}

fn cmd_dynamics(
    ctx: &Ctx,
    hamiltonians: &str,
    order: usize,
    degree_cap: u32,
    quantities: Option<String>,
) -> Result<String, Failure> {
    let spec = ctx.spec()?;
    let hs = ctx.exprs(hamiltonians)?;
    let sys = NHSystem::new(spec.clone(), hs.clone())?;
    let flow = dynamics::evolve(&sys, order, degree_cap)?;
    let mut watched = hs;
    if let Some(q) = quantities {
        watched.extend(ctx.exprs(&q)?);
    }
    let rates = watched.iter().map(|q| dynamics::conserved_check(&sys, q)).collect::<Result<Vec<_>, _>>()?;
    let mut text = vec![format!("bracket: {}  order: {order}", spec.name)];
    for (n, cs) in flow.names.iter().zip(&flow.coefficients) {
        text.push(format!("{n}(t) = {}", render_series(cs)));
    }
    for r in &rates {
        text.push(format!(
            "d/dt ({}) = {}{}",
            r.quantity,
            r.rate,
            if r.conserved { "  (conserved)" } else { "" }
        ));
    }
    Ok(ctx.emit(json!({ "bracket": spec.name, "order": order, "flow": flow, "rates": rates }), text.join("\n")))
}

fn render_series(cs: &[Supernumber]) -> String {
    let parts: Vec<String> = cs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| {
            let c = if c.terms().len() > 1 { format!("({c})") } else { c.to_string() };
            match k {
                0 => c,
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{k}"),
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn cmd_lie(ctx: &Ctx, algebra: &str, tau: &str, reading: InvarianceReading, args: Option<String>) -> CmdResult {
    let input = |f: Failure| (f, String::new());
    let alg = lie::load_algebra(algebra).map_err(|e| input(e.into()))?;
    let tau = lie::load_tau(&alg, tau).map_err(|e| input(e.into()))?;
    if let Some(a) = args {
        let elems = a.split(';').map(|t| alg.parse(t)).collect::<Result<Vec<_>, _>>().map_err(|e| input(e.into()))?;
        let v = lie::build_bracket(&alg, &tau).eval(&elems).map_err(|e| input(e.into()))?;
        let s = alg.format(&v);
        return Ok(ctx.emit(json!({ "value": s }), s));
    }
    let params = ctx.params();
    let va = lie::validate_algebra(&alg);
    let vt = lie::validate_tau_with(&alg, &tau, reading).map_err(|e| input(e.into()))?;
    let mut reports = vec![va.clone(), vt.clone()];
    let mut text = vec![format!("algebra: {}  tau: {}  seed: {}  samples: {}", alg, tau.name, params.seed, params.samples)];
    let mut doc = json!({ "algebra": alg.name, "tau": tau.name, "seed": params.seed, "params": params });
    if va.passed() && vt.passed() {
        reports.push(lie::check_theorem1_with(&alg, &tau, &params, reading).map_err(|e| input(e.into()))?);
        reports.push(lie::check_span_closure(&alg, &tau).map_err(|e| input(e.into()))?);
    } else {
        text.push("SKIP theorem1: algebra or tau failed validation".into());
    }
    text.extend(reports.iter().map(report_line));
    if alg.has_product() {
        let probe = lie::check_tau_cyclic(&alg, &tau).map_err(|e| input(e.into()))?;
        text.push(format!(
            "INFO tau cyclic condition on {} basis tuples: literal sign held {}, alternating sign held {}",
            probe.tuples, probe.literal_held, probe.alternating_held
        ));
        doc["tau_cyclic"] = serde_json::to_value(&probe).expect("serializes");
    }
    let passed = reports.iter().all(CheckReport::passed);
    doc["passed"] = Value::Bool(passed);
    doc["reports"] = serde_json::to_value(&reports).expect("serializes");
    let out = ctx.emit(doc, text.join("\n"));
    if passed {
        Ok(out)
    } else {
        Err((Failure::Identity, out))
    }
}
