//! Command-line front end. [`run`] does all the work and returns the exit
//! status and output, so tests can drive it without spawning a process.

pub mod json;

use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use expzero::decomposition::{extract_decomposition, normalize_l, refine, Decomposition};
use expzero::error::{Error, Result};
use expzero::exppoly::{ExpPoly, Vars};
use expzero::numeric::{find_root, verify_root, RootResult, SolverConfig};
use expzero::reduction::{free_or_poly_loop_with, freeness_check, FreenessResult, Outcome, ReductionConfig};
use expzero::rotundity::{rotundity_probe, ProbeConfig, RotundityReport};
use expzero::scalar::BranchEnv;
use expzero::variety::{build_variety, variety_of};
use serde::Serialize;
use serde_json::{json, Value};

use crate::json::{ErrorJson, ReductionJson, RootJson, VarietyJson, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_NOT_FOUND: i32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "expzero", version, about = "Zeros of exponential polynomials: normal forms, witness varieties, reduction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Clone, Debug, Args)]
pub struct Options {
    /// Declared variables in order, e.g. `--vars z,w`; other identifiers are rejected.
    #[arg(long, global = true, value_delimiter = ',')]
    pub vars: Option<Vec<String>>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random matrices tried by the rotundity probe.
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    /// Largest absolute matrix entry for the rotundity probe.
    #[arg(long = "max-entry", global = true, default_value_t = 3)]
    pub max_entry: i64,
    /// Sampled points per matrix.
    #[arg(long, global = true, default_value_t = 5)]
    pub samples: usize,
    /// Residual tolerance for roots.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Logarithm branch used by height reduction.
    #[arg(long, global = true, default_value_t = 0, allow_hyphen_values = true)]
    pub branch: i64,
    /// Root used when a coset constant is algebraic.
    #[arg(long = "root-index", global = true, default_value_t = 0)]
    pub root_index: usize,
    /// Output format; `parse` and `height` default to text, the rest to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Args)]
pub struct Input {
    /// Expression text, or `-` to read standard input.
    pub expr: String,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Normal form of an expression.
    Parse(Input),
    /// Height of the normal form.
    Height(Input),
    /// Extracted, refined and rescaled decompositions.
    Decompose(Input),
    /// Witness variety of the refined decomposition.
    Variety(Input),
    /// Factor and height-reduction loop.
    Reduce(Input),
    /// Numeric rotundity probe of the witness variety.
    Rotundity(Input),
    /// Numeric root search.
    Solve(Input),
    /// Every stage in one document.
    Pipeline(Input),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Parse(_) => "parse",
            Command::Height(_) => "height",
            Command::Decompose(_) => "decompose",
            Command::Variety(_) => "variety",
            Command::Reduce(_) => "reduce",
            Command::Rotundity(_) => "rotundity",
            Command::Solve(_) => "solve",
            Command::Pipeline(_) => "pipeline",
        }
    }

    fn input(&self) -> &Input {
        match self {
            Command::Parse(i)
            | Command::Height(i)
            | Command::Decompose(i)
            | Command::Variety(i)
            | Command::Reduce(i)
            | Command::Rotundity(i)
            | Command::Solve(i)
            | Command::Pipeline(i) => i,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Parse(_) | Command::Height(_) => Format::Text,
            _ => Format::Json,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::Budget { .. } => EXIT_BUDGET,
        Error::ProbeInconclusive(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_FAILURE,
    }
}

/// A command's result: a JSON body, its text rendering and an exit status.
struct Report {
    body: Value,
    text: String,
    code: i32,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn read_expr(input: &Input, stdin: &mut dyn Read) -> Result<String> {
    if input.expr != "-" {
        return Ok(input.expr.clone());
    }
    let mut s = String::new();
    stdin.read_to_string(&mut s).map_err(|e| Error::UndefinedInput(format!("reading stdin: {}", e)))?;
    Ok(s)
}

fn parse_input(text: &str, opts: &Options) -> Result<ExpPoly> {
    match &opts.vars {
        Some(names) => ExpPoly::parse_in(text, &Vars::new(names.clone())?),
        None => ExpPoly::parse(text),
    }
}

fn decomposition_json(d: &Decomposition) -> Value {
    json!({
        "l": d.l().to_string(),
        "refined": d.is_refined(),
        "bricks": d.bodies().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
    })
}

fn complex_text(z: &[num_complex::Complex64]) -> String {
    let parts: Vec<String> = z.iter().map(|c| format!("{}", c)).collect();
    format!("({})", parts.join(", "))
}

fn root_text(r: &RootResult) -> String {
    match r {
        RootResult::Root { assignment, residual, iterations } => {
            format!("root {} residual {:e} after {} iterations", complex_text(assignment), residual, iterations)
        }
        RootResult::NoZeros { k, g } => format!("no zeros: p = ({})*exp({})", k, g),
        RootResult::NotFound { best_residual, seeds_tried } => {
            format!("no root found ({} seeds, best residual {:e})", seeds_tried, best_residual)
        }
    }
}

fn solver_config(opts: &Options) -> SolverConfig {
    SolverConfig { tol: opts.tol, rng_seed: opts.seed, ..SolverConfig::default() }
}

fn probe_config(opts: &Options) -> ProbeConfig {
    ProbeConfig { trials: opts.trials, max_entry: opts.max_entry, samples: opts.samples, seed: opts.seed }
}

fn reduction_config(opts: &Options) -> ReductionConfig {
    ReductionConfig { branch: opts.branch, root_index: opts.root_index }
}

fn probe_code(r: &RotundityReport) -> i32 {
    if !r.pass {
        EXIT_FAILURE
    } else if r.identity_rank.is_none() || r.records.iter().any(|m| m.warning.is_some()) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

fn probe_text(r: &RotundityReport) -> String {
    let failed = r.records.iter().filter(|m| !m.pass).count();
    let warned = r.records.iter().filter(|m| m.warning.is_some()).count();
    format!(
        "rotundity probe: {} ({} of {} matrices failed, {} inconclusive; identity rank {} of expected {})",
        if r.pass { "pass" } else { "FAIL" },
        failed,
        r.trials,
        warned,
        r.identity_rank.map_or("none".to_string(), |k| k.to_string()),
        r.expected_dimension
    )
}

fn cmd_decompose(p: &ExpPoly) -> Result<Report> {
    let extracted = extract_decomposition(p)?;
    let refined = refine(&extracted);
    let (normalized, s) = normalize_l(&refined);
    let body = json!({
        "extracted": decomposition_json(&extracted),
        "refined": decomposition_json(&refined),
        "normalized": {
            "scale": s.factor.to_string(),
            "target": normalized.target().to_string(),
            "bricks": normalized.bodies().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        },
    });
    let text = format!(
        "bricks: {}\nL = {}, refined = {}\nrefined: {}\nrescaled by {}: {}",
        extracted.bodies().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "),
        extracted.l(),
        extracted.is_refined(),
        refined.bodies().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "),
        s.factor,
        normalized.target()
    );
    Ok(Report { body, text, code: EXIT_OK })
}

fn cmd_variety(p: &ExpPoly) -> Result<Report> {
    let (v, scale) = variety_of(p)?;
    let vj = VarietyJson::from_system(&v);
    let mut text = format!("coordinates: {}\n", vj.coordinates.join(", "));
    for (i, g) in vj.graph_text.iter().enumerate() {
        text.push_str(&format!("w{} = {}\n", v.n() + i + 1, g));
    }
    text.push_str(&format!("p* = {}", vj.hypersurface_text));
    if v.no_zeros() {
        text.push_str("\n(p* is a monomial: no zeros)");
    }
    Ok(Report { body: json!({ "scale": scale.to_string(), "variety": vj }), text, code: EXIT_OK })
}

fn cmd_reduce(p: &ExpPoly, opts: &Options) -> Result<Report> {
    let out = free_or_poly_loop_with(p, reduction_config(opts))?;
    let rj = ReductionJson::from_outcome(&out);
    let text = match &out.outcome {
        Outcome::FreeSystem(v) => format!("free system: p* = {}", v.hypersurface().render(&v.coordinate_names())),
        Outcome::Polynomial(q) => format!("polynomial: {}", q),
        Outcome::NoZeros { k, g } => format!("no zeros: p = ({})*exp({})", k, g),
    };
    let text = format!("{} ({} height reductions, scale {})", text, out.height_reductions(), out.scale);
    Ok(Report { body: json!({ "reduction": rj }), text, code: EXIT_OK })
}

fn cmd_rotundity(p: &ExpPoly, opts: &Options) -> Result<Report> {
    let (v, _) = variety_of(p)?;
    match freeness_check(&v)? {
        FreenessResult::Free => {}
        w => {
            let witness = witness_json(&w);
            let text = format!("variety is not free; witness {}", witness);
            return Ok(Report { body: json!({ "refused": true, "witness": witness }), text, code: EXIT_FAILURE });
        }
    }
    let report = rotundity_probe(&v, &probe_config(opts))?;
    let text = probe_text(&report);
    let code = probe_code(&report);
    Ok(Report { body: json!({ "report": report }), text, code })
}

fn witness_json(w: &FreenessResult) -> Value {
    match w {
        FreenessResult::Free => json!({ "kind": "free" }),
        FreenessResult::NotFreeMultiplicative { m, b } => {
            json!({ "kind": "multiplicative", "m": m, "b": b.to_string() })
        }
        FreenessResult::NotFreeAdditive { m, b } => json!({ "kind": "additive", "m": m, "b": b.to_string() }),
    }
}

fn cmd_solve(p: &ExpPoly, opts: &Options) -> Result<Report> {
    let r = find_root(p, &solver_config(opts))?;
    let code = if matches!(r, RootResult::NotFound { .. }) { EXIT_NOT_FOUND } else { EXIT_OK };
    Ok(Report { body: json!({ "solve": RootJson::from_result(&r) }), text: root_text(&r), code })
}

fn cmd_pipeline(p: &ExpPoly, opts: &Options) -> Result<Report> {
    let mut lines = vec![format!("normal form: {}", p), format!("height: {}", p.height())];
    let decomposition = cmd_decompose(p)?;
    let extracted = refine(&extract_decomposition(p)?);
    let (normalized, _) = normalize_l(&extracted);
    let variety = VarietyJson::from_system(&build_variety(&normalized)?);
    lines.push(format!("p* = {}", variety.hypersurface_text));
    let out = free_or_poly_loop_with(p, reduction_config(opts))?;
    let mut code = EXIT_OK;
    let rotundity = match &out.outcome {
        Outcome::FreeSystem(v) => {
            let report = rotundity_probe(v, &probe_config(opts))?;
            lines.push(probe_text(&report));
            code = probe_code(&report);
            to_value(&report)
        }
        _ => Value::Null,
    };
    let reduction = ReductionJson::from_outcome(&out);
    lines.push(cmd_reduce(p, opts)?.text);
    let cfg = solver_config(opts);
    let root = find_root(p, &cfg)?;
    lines.push(root_text(&root));
    if matches!(root, RootResult::NotFound { .. }) && code == EXIT_OK {
        code = EXIT_NOT_FOUND;
    }
    // a root of the final polynomial, mapped back and checked on p
    let reduction_root = match &out.outcome {
        Outcome::Polynomial(q) if !q.is_constant() => match find_root(q, &cfg)? {
            RootResult::Root { assignment, .. } => {
                let x = out.map_back(&assignment);
                let (ok, residual) = verify_root(p, &x, &BranchEnv::new(), cfg.tol.max(1e-8))?;
                lines.push(format!("reduced root {} residual on p {:e}", complex_text(&x), residual));
                json!({ "assignment": x, "residual": residual, "verified": ok })
            }
            _ => Value::Null,
        },
        _ => Value::Null,
    };
    let body = json!({
        "input": p.to_string(),
        "variables": p.vars().names(),
        "height": p.height(),
        "decomposition": decomposition.body,
        "variety": variety,
        "reduction": reduction,
        "rotundity": rotundity,
        "solve": RootJson::from_result(&root),
        "reduction_root": reduction_root,
    });
    Ok(Report { body, text: lines.join("\n"), code })
}

fn execute(cmd: &Command, opts: &Options, stdin: &mut dyn Read) -> Result<Report> {
    let text = read_expr(cmd.input(), stdin)?;
    let p = parse_input(&text, opts)?;
    match cmd {
        Command::Parse(_) => Ok(Report {
            body: json!({ "normal_form": p.to_string(), "variables": p.vars().names(), "height": p.height() }),
            text: p.to_string(),
            code: EXIT_OK,
        }),
        Command::Height(_) => Ok(Report { body: json!({ "height": p.height() }), text: p.height().to_string(), code: EXIT_OK }),
        Command::Decompose(_) => cmd_decompose(&p),
        Command::Variety(_) => cmd_variety(&p),
        Command::Reduce(_) => cmd_reduce(&p, opts),
        Command::Rotundity(_) => cmd_rotundity(&p, opts),
        Command::Solve(_) => cmd_solve(&p, opts),
        Command::Pipeline(_) => cmd_pipeline(&p, opts),
    }
}

fn document(command: &str, body: Value) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("schema".into(), SCHEMA.into());
    doc.insert("command".into(), command.into());
    if let Value::Object(fields) = body {
        doc.extend(fields);
    }
    serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable") + "\n"
}

pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Output {
    let format = cli.opts.format.unwrap_or_else(|| cli.command.default_format());
    let name = cli.command.name();
    match execute(&cli.command, &cli.opts, stdin) {
        Ok(r) => {
            let stdout = match format {
                Format::Json => document(name, r.body),
                Format::Text => r.text + "\n",
            };
            Output { code: r.code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let stderr = match &e {
                Error::Parse(p) => format!("error: {} at line {}, column {}\n", p.message, p.line, p.column),
                _ => format!("error: {}\n", e),
            };
            let stdout = match format {
                Format::Json => document(name, json!({ "error": ErrorJson::from_error(&e) })),
                Format::Text => String::new(),
            };
            Output { code: exit_code(&e), stdout, stderr }
        }
    }
}
