//! `dominion` command-line front end.
//!
//! Every subcommand reads one JSON input, writes one JSON report and exits
//! with 0 when the property holds, 1 when a counterexample was found and 2 on
//! bad input or a numerical failure. Errors go to the error stream as
//! `{"code", "message", "path"}`.

pub mod error;
pub mod instance;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dominion_core::domination::{
    check_form_domination, check_resolvent_domination, check_semigroup_domination, kato_check, verify_sweep,
    verify_theorem_equivalence, VerifyConfig,
};
use dominion_core::forms::{check_first_bd, check_positivity_preserving, OperatorForm, DEFAULT_ALPHA_OFFSETS, DEFAULT_T_GRID};
use dominion_core::graph::{formal_laplacian, random_graph, random_instance, MagneticInstance};
use dominion_core::ordered::{dual_project, moreau_decompose, probe_isotone, probe_self_dual, project_cone, ConeSpec};
use dominion_core::vector::{max_abs_diff, sub};
use serde::Serialize;
use serde_json::{json, Value};

pub use error::CliError;
use instance::{instance_to_json, parse_input, validate_instance, ConeProblem, DominationProblem, Input};

/// Environment variable fixing the worker count of instance sweeps.
pub const THREADS_ENV: &str = "DOMINION_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dominion", version, about = "Order-theoretic domination checks for symmetric semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct RunConfig {
    /// Input JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated times; defaults to 0.01,0.1,0.5,1,2,5.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t_grid: Option<Vec<f64>>,
    /// Comma-separated resolvent parameters; defaults to λ + {0.1, 1, 10}.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha_grid: Option<Vec<f64>>,
    /// Report file; standard output when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Property {
    Selfdual,
    Isotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Semigroup,
    Resolvent,
    Form,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    Graph,
    Magnetic,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Projections of `g` onto the cone and its polar.
    Project(RunConfig),
    /// Moreau decomposition `g = h1 - h2`.
    Moreau(RunConfig),
    /// Probe a cone for self-duality or the isotone projection property.
    CheckCone {
        #[arg(long, value_enum)]
        property: Property,
        #[command(flatten)]
        config: RunConfig,
    },
    /// First Beurling-Deny criterion for an operator on a cone.
    CheckBd(RunConfig),
    /// Whether the semigroup leaves the cone invariant.
    CheckPositivity(RunConfig),
    /// Domination along the semigroup, the resolvent or the forms.
    CheckDomination {
        #[arg(long, value_enum, default_value = "all")]
        mode: Mode,
        #[command(flatten)]
        config: RunConfig,
    },
    /// All three domination checks and their agreement.
    VerifyTheorem(RunConfig),
    /// Kato's inequality for a dominated pair.
    Kato(RunConfig),
    /// Generate a random instance.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 5)]
        vertices: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Largest fiber dimension (magnetic only).
        #[arg(long, default_value_t = 2)]
        max_fiber: usize,
        /// Draw `W(x) ⪰ c(x)` so that the instance is dominated (magnetic only).
        #[arg(long)]
        dominated: bool,
        #[command(flatten)]
        config: RunConfig,
    },
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::usage(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.samples == 0 {
            return Err(CliError::usage("--samples must be at least 1"));
        }
        if let Some(t) = &self.t_grid {
            if t.is_empty() || t.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                return Err(CliError::usage("--t-grid needs finite nonnegative times"));
            }
        }
        if let Some(a) = &self.alpha_grid {
            if a.is_empty() || a.iter().any(|a| !a.is_finite()) {
                return Err(CliError::usage("--alpha-grid needs finite values"));
            }
        }
        Ok(())
    }

    fn t_grid(&self) -> Vec<f64> {
        self.t_grid.clone().unwrap_or_else(|| DEFAULT_T_GRID.to_vec())
    }

    fn alpha_grid(&self, lambda: f64) -> Vec<f64> {
        self.alpha_grid
            .clone()
            .unwrap_or_else(|| DEFAULT_ALPHA_OFFSETS.iter().map(|o| lambda + o).collect())
    }

    fn read_input(&self) -> Result<Value, CliError> {
        let path = self.input.as_ref().ok_or_else(|| CliError::usage("--in <FILE> is required"))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new("io", format!("{}: {e}", path.display()), ""))?;
        serde_json::from_str(&text).map_err(|e| CliError::new("malformed_json", e.to_string(), ""))
    }
}

/// A finished report and whether the checked property holds.
struct Outcome {
    report: Value,
    holds: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn cone_problem(input: Input) -> Result<ConeProblem, CliError> {
    match input {
        Input::Cone(p) => Ok(p),
        _ => Err(CliError::schema("", "expected a cone problem with a \"cone\" key")),
    }
}

/// A cone with an operator: either given explicitly or the graph operator on
/// the orthant over the vertices.
fn cone_operator(input: Input) -> Result<(ConeSpec, OperatorForm), CliError> {
    match input {
        Input::Cone(ConeProblem { cone, operator: Some(op), .. }) => Ok((cone, op)),
        Input::Cone(_) => Err(CliError::schema("", "missing key \"operator\"")),
        Input::Instance(inst) => Ok((
            ConeSpec::Orthant(inst.graph().space().clone()),
            formal_laplacian(inst.graph())?,
        )),
        Input::Pair(_) => Err(CliError::schema("", "expected a cone problem or a graph instance")),
    }
}

fn domination_problem(input: Input) -> Result<DominationProblem, CliError> {
    match input {
        Input::Instance(inst) => DominationProblem::from_instance(&inst),
        Input::Pair(p) => Ok(*p),
        Input::Cone(_) => Err(CliError::schema("", "expected a graph instance or an operator pair")),
    }
}

fn run_domination(mode: Mode, cfg: &RunConfig, p: &DominationProblem) -> Result<Outcome, CliError> {
    let mut report = serde_json::Map::new();
    report.insert("pairing".into(), json!(p.pairing.name()));
    let mut holds = true;
    if matches!(mode, Mode::Semigroup | Mode::All) {
        let r = check_semigroup_domination(&p.a, &p.b, &p.pairing, &cfg.t_grid(), cfg.tol)?;
        holds &= r.holds;
        report.insert("semigroup".into(), to_value(&r));
    }
    if matches!(mode, Mode::Resolvent | Mode::All) {
        let lambda = p.a.lambda().max(p.b.lambda());
        let r = check_resolvent_domination(&p.a, &p.b, &p.pairing, &cfg.alpha_grid(lambda), cfg.tol)?;
        holds &= r.holds;
        report.insert("resolvent".into(), to_value(&r));
    }
    if matches!(mode, Mode::Form | Mode::All) {
        let r = check_form_domination(&p.a, &p.b, &p.pairing, cfg.samples, cfg.seed, cfg.tol)?;
        holds &= r.holds;
        report.insert("form".into(), to_value(&r));
    }
    Ok(Outcome { report: Value::Object(report), holds })
}

fn verify_config(cfg: &RunConfig) -> VerifyConfig {
    VerifyConfig {
        t_grid: cfg.t_grid(),
        alpha_grid: cfg.alpha_grid.clone(),
        samples: cfg.samples,
        seed: cfg.seed,
        tol: cfg.tol,
    }
}

/// A single instance, or an array of instances verified as a parallel sweep.
fn run_verify(cfg: &RunConfig, root: &Value) -> Result<Outcome, CliError> {
    let vcfg = verify_config(cfg);
    if let Some(items) = root.as_array() {
        let problems = items
            .iter()
            .enumerate()
            .map(|(i, v)| {
                parse_input(v)
                    .and_then(domination_problem)
                    .map_err(|e| CliError { path: format!("/{i}{}", e.path), ..e })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let entries = verify_sweep(problems.len(), &vcfg, |id| {
            let p = &problems[id];
            Ok((p.a.clone(), p.b.clone(), p.pairing.clone()))
        })?;
        let holds = entries.iter().all(|e| e.report.dominated());
        return Ok(Outcome { report: to_value(&entries), holds });
    }
    let p = domination_problem(parse_input(root)?)?;
    let r = verify_theorem_equivalence(&p.a, &p.b, &p.pairing, &vcfg)?;
    Ok(Outcome { holds: r.dominated(), report: to_value(&r) })
}

fn execute(command: &Command) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let (cfg, outcome) = match command {
        Command::Project(cfg) => {
            cfg.validate()?;
            let p = cone_problem(parse_input(&cfg.read_input()?)?)?;
            let g = p.g.ok_or_else(|| CliError::schema("", "missing key \"g\""))?;
            let report = json!({
                "cone": p.cone.name(),
                "projection": project_cone(&p.cone, &g)?,
                "polar_projection": sub(&project_cone(&p.cone, &g)?, &g),
                "dual_projection": dual_project(&p.cone, &g)?,
            });
            (cfg, Outcome { report, holds: true })
        }
        Command::Moreau(cfg) => {
            cfg.validate()?;
            let p = cone_problem(parse_input(&cfg.read_input()?)?)?;
            let g = p.g.ok_or_else(|| CliError::schema("", "missing key \"g\""))?;
            let pair = moreau_decompose(&p.cone, &g)?;
            let residual = max_abs_diff(&sub(&pair.h1, &pair.h2), &g);
            let orthogonality = pair.orthogonality_defect(&p.cone);
            let holds = orthogonality <= cfg.tol * (1.0 + p.cone.norm(&g).powi(2)) && residual <= cfg.tol * (1.0 + p.cone.norm(&g));
            let report = json!({
                "cone": p.cone.name(),
                "h1": pair.h1,
                "h2": pair.h2,
                "orthogonality": orthogonality,
                "residual": residual,
            });
            (cfg, Outcome { report, holds })
        }
        Command::CheckCone { property, config: cfg } => {
            cfg.validate()?;
            let p = cone_problem(parse_input(&cfg.read_input()?)?)?;
            let (report, holds) = match property {
                Property::Selfdual => {
                    let r = probe_self_dual(&p.cone, cfg.samples, cfg.seed)?;
                    (to_value(&r), r.verdict.holds())
                }
                Property::Isotone => {
                    let r = probe_isotone(&p.cone, cfg.samples, cfg.seed)?;
                    (to_value(&r), r.verdict.holds())
                }
            };
            let report = json!({"cone": p.cone.name(), "property": format!("{property:?}").to_lowercase(), "report": report});
            (cfg, Outcome { report, holds })
        }
        Command::CheckBd(cfg) => {
            cfg.validate()?;
            let (cone, op) = cone_operator(parse_input(&cfg.read_input()?)?)?;
            let r = check_first_bd(&op, &cone, cfg.samples, cfg.seed, cfg.tol)?;
            (cfg, Outcome { holds: r.holds, report: to_value(&r) })
        }
        Command::CheckPositivity(cfg) => {
            cfg.validate()?;
            let (cone, op) = cone_operator(parse_input(&cfg.read_input()?)?)?;
            let r = check_positivity_preserving(&op, &cone, &cfg.t_grid(), cfg.samples, cfg.seed, cfg.tol)?;
            (cfg, Outcome { holds: r.holds, report: to_value(&r) })
        }
        Command::CheckDomination { mode, config: cfg } => {
            cfg.validate()?;
            let p = domination_problem(parse_input(&cfg.read_input()?)?)?;
            (cfg, run_domination(*mode, cfg, &p)?)
        }
        Command::VerifyTheorem(cfg) => {
            cfg.validate()?;
            (cfg, run_verify(cfg, &cfg.read_input()?)?)
        }
        Command::Kato(cfg) => {
            cfg.validate()?;
            let p = domination_problem(parse_input(&cfg.read_input()?)?)?;
            let r = kato_check(&p.a, &p.b, &p.pairing, cfg.samples, cfg.seed, cfg.tol)?;
            (cfg, Outcome { holds: r.holds, report: to_value(&r) })
        }
        Command::Gen { kind, vertices, density, max_fiber, dominated, config: cfg } => {
            cfg.validate()?;
            let inst = match kind {
                GenKind::Graph => MagneticInstance::trivial(random_graph(*vertices, *density, cfg.seed)?),
                GenKind::Magnetic => random_instance(*vertices, *max_fiber, *density, *dominated, cfg.seed)?,
            };
            (cfg, Outcome { report: instance_to_json(&inst), holds: true })
        }
    };
    Ok((outcome, cfg.out.clone()))
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> std::io::Result<()> {
    dominion_core::json::to_writer(&mut *out, value).map_err(std::io::Error::other)?;
    writeln!(out)
}

fn emit(value: &Value, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::new("io", e.to_string(), "");
    match path {
        Some(p) => {
            let mut file = std::fs::File::create(p).map_err(|e| CliError::new("io", format!("{}: {e}", p.display()), ""))?;
            write_json(&mut file, value).map_err(io)
        }
        None => write_json(out, value).map_err(io),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::new("io", e.to_string(), ""))
}

fn report_error(err: &CliError, stderr: &mut dyn Write) -> i32 {
    let _ = write_json(stderr, err);
    2
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            return report_error(&CliError::usage(e.to_string().trim_end()), stderr);
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| execute(&cli.command)));
    match result.and_then(|(o, path)| emit(&o.report, path.as_deref(), stdout).map(|_| o.holds)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => report_error(&e, stderr),
    }
}

/// Parses and validates an instance file, returning its canonical JSON text.
pub fn canonicalize_instance(text: &str) -> Result<String, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::new("malformed_json", e.to_string(), ""))?;
    let inst = validate_instance(&value)?;
    dominion_core::json::to_string(&instance_to_json(&inst)).map_err(|e| CliError::new("io", e.to_string(), ""))
}
