//! Spec-file front end: parses problem specs, runs one of the three
//! methods and emits a common report.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use invphase_core::ahss::{self, AhssError, InjectedDifferential};
use invphase_core::coeffsys::{self, CoeffError, CoefficientSystem};
use invphase_core::dsl::ParseError;
use invphase_core::gcw::{self, EquivariantComplex, GcwError};
use invphase_core::lexseq::{self, LexError};
use invphase_core::thomcoh::{self, ThomError, VirtualBundle};
use thiserror::Error;

pub mod report;
pub mod spec;

use report::{CompareRow, Comparison, GradedEntry, Report};
use spec::{ComplexSpec, Emit, Method, ProblemSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{err}")]
    Parse { path: String, err: ParseError },
    #[error("{0}")]
    Invalid(String),
    #[error("coefficients: {0}")]
    Coefficients(#[from] CoeffError),
    #[error("complex: {0}")]
    Complex(#[from] GcwError),
    #[error("spectral sequence: {0}")]
    Ahss(#[from] AhssError),
    #[error("cohomology: {0}")]
    Thom(#[from] ThomError),
    #[error("exact sequence: {0}")]
    Les(#[from] LexError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn load_spec(path: &Path) -> Result<ProblemSpec, CliError> {
    spec::parse(&read(path)?).map_err(|err| CliError::Parse { path: path.display().to_string(), err })
}

/// A builtin name, or a file path relative to `base`.
pub fn resolve_coefficients(name: &str, base: &Path) -> Result<CoefficientSystem, CliError> {
    if coeffsys::builtin_names().any(|n| n == name) {
        return Ok(coeffsys::builtin(name)?);
    }
    let path = base.join(name);
    let text = read(&path)?;
    coeffsys::parse(&text).map_err(|e| match e {
        CoeffError::Parse(err) => CliError::Parse { path: path.display().to_string(), err },
        other => CliError::Coefficients(other),
    })
}

fn coefficients_for(spec: &ProblemSpec, base: &Path, method: Method) -> Result<CoefficientSystem, CliError> {
    let name = spec.coefficients.as_deref().ok_or_else(|| CliError::Invalid(format!("method {method} needs `coefficients`")))?;
    let c = resolve_coefficients(name, base)?;
    if let Some(sym) = &spec.symmetry {
        if *sym != c.symmetry().name {
            return Err(CliError::Invalid(format!(
                "spec asks for symmetry `{sym}` but `{name}` tabulates `{}`",
                c.symmetry().name
            )));
        }
    }
    Ok(c)
}

fn build_complex(spec: &ComplexSpec, c: &CoefficientSystem) -> Result<EquivariantComplex, CliError> {
    let x = match spec {
        ComplexSpec::Preset { name, params } => gcw::preset(name, params)?,
        ComplexSpec::Inline { cells, boundary } => {
            let mut x = EquivariantComplex::new(c.lattice().clone());
            for cell in cells {
                x.add_cell(&cell.id, cell.dim, &cell.stabilizer, cell.subcomplex)?;
            }
            for (a, b, d) in boundary {
                x.set_degree(a, b, *d)?;
            }
            x
        }
    };
    x.validate()?;
    Ok(x)
}

fn run_ahss(spec: &ProblemSpec, base: &Path) -> Result<Report, CliError> {
    let c = coefficients_for(spec, base, Method::Ahss)?;
    let cx = spec.complex.as_ref().ok_or_else(|| CliError::Invalid("method ahss needs `complex`".into()))?;
    let x = build_complex(cx, &c)?;
    let injected: Vec<InjectedDifferential> =
        spec.injected.iter().map(|i| InjectedDifferential { r: i.r, source: (i.p, i.q), data: i.data.clone() }).collect();
    let rep = ahss::run(&x, &c, &injected)?;
    let graded = rep
        .graded
        .iter()
        .map(|g| GradedEntry { position: format!("E_inf(p={}, q={})", g.p, g.q), text: g.group.to_string(), group: g.group.clone() })
        .collect();
    let question = format!(
        "degree-0 group of {cx} with coefficients {}",
        spec.coefficients.as_deref().unwrap_or_default()
    );
    let mut out = Report::new(&spec.name, Method::Ahss, question, graded, rep.group.clone());
    out.extension_ambiguous = rep.extension_ambiguous;
    out.instances = rep.instances;
    out.rendered = rep.render_text();
    out.details = serde_json::to_value(&rep).expect("serializable");
    Ok(out)
}

fn run_cohomology(spec: &ProblemSpec) -> Result<Report, CliError> {
    let cs = spec.cohomology.ok_or_else(|| CliError::Invalid("method cohomology needs a [cohomology] section".into()))?;
    if let Some(sym) = spec.symmetry.as_deref().filter(|s| *s != "spin") {
        return Err(CliError::Invalid(format!("method cohomology computes spin phases, not `{sym}`")));
    }
    let v = VirtualBundle::new(cs.m, cs.n);
    let rep = thomcoh::compute_window(v, cs.degree)?;
    let graded = rep
        .graded
        .iter()
        .map(|e| GradedEntry { position: format!("E_3(p={}, t={})", e.p, e.t), text: e.group.to_string(), group: e.group.clone() })
        .collect();
    let question = format!("ko<0..4> in total degree {} of Thom(RP^inf; {v}), phase degree {}", cs.degree, rep.phase_degree);
    let mut out = Report::new(&spec.name, Method::Cohomology, question, graded, rep.group.clone());
    out.extension_ambiguous = rep.extension_ambiguous;
    out.rendered = rep.render_text();
    out.details = serde_json::to_value(&rep).expect("serializable");
    Ok(out)
}

fn run_les(spec: &ProblemSpec, base: &Path) -> Result<Report, CliError> {
    let ls = spec.les.as_ref().ok_or_else(|| CliError::Invalid("method les needs a [les] section".into()))?;
    let (problem, question) = if ls.is_builtin() {
        let c = coefficients_for(spec, base, Method::Les)?;
        let (Some(sub), Some(degree)) = (&ls.subgroup, ls.degree) else {
            return Err(CliError::Invalid(format!("builtin problem `{}` needs `subgroup` and `degree`", ls.problem)));
        };
        (lexseq::builtin_problem(&ls.problem, &c, sub, degree)?, format!("{} for {sub} in degree {degree}", ls.problem))
    } else {
        let path = base.join(&ls.problem);
        let problem = lexseq::parse_problem(&read(&path)?).map_err(|e| match e {
            lexseq::LexError::Parse(err) => CliError::Parse { path: path.display().to_string(), err },
            other => other.into(),
        })?;
        let question = format!("unknown slot of {}", problem.name);
        (problem, question)
    };
    let res = lexseq::solve(&problem)?;
    let verdicts = lexseq::check_epi_mono_claims(&problem)?;
    let mut graded = Vec::new();
    for (pos, g) in [("image from the left", &res.subgroup), ("kernel on the right", &res.quotient)] {
        if !g.is_trivial() {
            graded.push(GradedEntry { position: pos.to_string(), text: g.to_string(), group: g.clone() });
        }
    }
    let mut out = Report::new(&spec.name, Method::Les, question, graded, res.group.clone());
    out.extension_ambiguous = res.extension_ambiguous;
    out.instances = res.instances;
    let mut rendered = format!("{problem}\n");
    for v in &verdicts {
        rendered.push_str(&format!("{v}\n"));
    }
    rendered.push_str(&res.render_text());
    out.rendered = rendered;
    out.details = serde_json::json!({
        "sequence": problem.to_string(),
        "resolution": res,
        "verdicts": verdicts,
    });
    Ok(out)
}

/// Runs one method of a parsed spec; `base` resolves relative file names.
pub fn compute(spec: &ProblemSpec, base: &Path, method: Method) -> Result<Report, CliError> {
    match method {
        Method::Ahss => run_ahss(spec, base),
        Method::Cohomology => run_cohomology(spec),
        Method::Les => run_les(spec, base),
    }
}

pub fn compute_file(path: &Path, method: Option<Method>) -> Result<Report, CliError> {
    let spec = load_spec(path)?;
    compute(&spec, path.parent().unwrap_or(Path::new(".")), method.unwrap_or(spec.method))
}

/// Runs every method the spec has data for and compares the groups.
pub fn compare_spec(path: &Path) -> Result<Comparison, CliError> {
    let spec = load_spec(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rows = Vec::new();
    for m in spec.available_methods() {
        let r = compute(&spec, base, m)?;
        rows.push(CompareRow { source: path.display().to_string(), method: m.to_string(), group: r.group.map(|g| g.to_string()) });
    }
    if rows.len() < 2 {
        return Err(CliError::Invalid(format!("{}: fewer than two methods configured", path.display())));
    }
    Ok(Comparison::of(rows))
}

#[derive(Parser, Debug)]
#[command(name = "invphase", version, about = "Exact groups of invertible phases from spec files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a spec file and print its report
    Compute {
        #[arg(long)]
        spec: PathBuf,
        /// Override the method named in the spec
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long, value_enum)]
        emit: Option<Emit>,
        /// Write the report here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Builtin complexes, coefficient systems and exact-sequence problems
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
    /// Coefficient files
    Coeff {
        #[command(subcommand)]
        action: CoeffAction,
    },
    /// Check that several methods give the same group
    Compare {
        /// Run every method configured in this spec
        #[arg(long, conflicts_with = "reports")]
        spec: Option<PathBuf>,
        /// JSON reports to compare
        reports: Vec<PathBuf>,
        #[arg(long, value_enum)]
        emit: Option<Emit>,
    },
}

#[derive(Subcommand, Debug)]
enum PresetsAction {
    List,
}

#[derive(Subcommand, Debug)]
enum CoeffAction {
    /// Parse and check every invariant of a coefficient file (or builtin name)
    Validate { path: String },
    /// Print a coefficient system in canonical form
    Show { path: String },
}

fn presets_text() -> String {
    let mut out = String::from("complexes:\n");
    let w = gcw::PRESETS.iter().map(|p| p.1.len()).max().unwrap_or(0);
    for (_, shape, about) in gcw::PRESETS {
        out.push_str(&format!("  {shape:<w$}  {about}\n"));
    }
    out.push_str("coefficients:\n");
    for name in coeffsys::builtin_names() {
        let c = coeffsys::builtin(name).expect("shipped data is valid");
        let (lo, hi) = c.window();
        out.push_str(&format!("  {name:<8}  {}, q in {lo}..={hi}\n", c.symmetry().description));
    }
    out.push_str("exact sequences:\n");
    for (name, about) in lexseq::PROBLEMS {
        out.push_str(&format!("  {name}  {about}\n"));
    }
    out
}

fn emit_report(r: &Report, emit: Emit) -> String {
    match emit {
        Emit::Text => r.to_text(),
        Emit::Json => r.to_json(),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let io = |e: std::io::Error| CliError::Io { path: "<stdout>".into(), message: e.to_string() };
    match cli.command {
        Command::Compute { spec, method, emit, out: dest } => {
            let parsed = load_spec(&spec)?;
            let base = spec.parent().unwrap_or(Path::new("."));
            let report = compute(&parsed, base, method.unwrap_or(parsed.method))?;
            let text = emit_report(&report, emit.or(parsed.emit).unwrap_or_default());
            match dest {
                Some(p) => std::fs::write(&p, text).map_err(|e| CliError::Io { path: p.display().to_string(), message: e.to_string() })?,
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
            Ok(0)
        }
        Command::Presets { action: PresetsAction::List } => {
            out.write_all(presets_text().as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Coeff { action } => {
            let (CoeffAction::Validate { path } | CoeffAction::Show { path }) = &action;
            let c = resolve_coefficients(path, Path::new("."))?;
            let text = match action {
                CoeffAction::Validate { .. } => {
                    let (lo, hi) = c.window();
                    format!(
                        "ok: {path}: symmetry {}, {} subgroup(s), q in {lo}..={hi}\n",
                        c.symmetry().name,
                        c.lattice().subgroups().len()
                    )
                }
                CoeffAction::Show { .. } => c.serialize(),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Compare { spec, reports, emit } => {
            let cmp = match spec {
                Some(path) => compare_spec(&path)?,
                None => {
                    if reports.len() < 2 {
                        return Err(CliError::Invalid("compare needs --spec or at least two reports".into()));
                    }
                    let mut rows = Vec::new();
                    for p in &reports {
                        rows.push(report::row_from_json(&p.display().to_string(), &read(p)?).map_err(CliError::Invalid)?);
                    }
                    Comparison::of(rows)
                }
            };
            let text = match emit.unwrap_or_default() {
                Emit::Text => cmp.to_text(),
                Emit::Json => serde_json::to_string_pretty(&cmp).expect("serializable") + "\n",
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(if cmp.agree { 0 } else { 1 })
        }
    }
}

/// Exit codes: 0 success, 1 methods disagree, 2 bad input.
pub fn run_cli<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
