//! The `npr` command-line front end.
//!
//! Exit codes: 0 success, 1 inconsistent knowledge base, 2 parse, validation
//! or I/O error, 3 a query is undefined, 4 numeric failure or
//! non-convergence.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Serialize, Serializer};

use crate::entail::{bound, consistent, Bound, Theory};
use crate::kb::{parse_ci, parse_conditional, parse_kb_with_cap, CIGTuple, Conditional, KnowledgeBase};
use crate::maxent::{ci_report, me_query, MaxEntSolver, MeResult, MeStatus, DEFAULT_TOL_ME};
use crate::spmci::{generate_candidates, spmci_bound_with, Extension, ExtensionOptions};
use crate::{Error, Settings, DEFAULT_ATOM_CAP, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNDEFINED: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "npr", version, about = "Probabilistic entailment, default inheritance and maximum entropy over small propositional knowledge bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Maximum number of atoms (default 12, or NPR_ATOM_CAP).
    #[arg(long, global = true, value_name = "N")]
    atom_cap: Option<usize>,
    /// Numeric tolerance. For `maxent` this is the convergence threshold.
    #[arg(long, global = true, value_name = "T")]
    tol: Option<f64>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a knowledge base and check that its hard constraints are consistent.
    Check(FileArg),
    /// Tight bounds on each query over all admissible distributions.
    Entail(QueryArgs),
    /// Bounds after adopting independence defaults in specificity order.
    Spmci(SpmciArgs),
    /// The maximum-entropy distribution and point values of the queries.
    Maxent(MaxentArgs),
    /// The world table, with one mark column per query.
    Worlds(QueryArgs),
}

#[derive(Debug, Args)]
struct FileArg {
    file: PathBuf,
}

#[derive(Debug, Args)]
struct QueryArgs {
    file: PathBuf,
    /// Query such as "P(X | Y)". Defaults to the `query` lines of the file.
    #[arg(long, short)]
    query: Vec<String>,
}

#[derive(Debug, Args)]
struct SpmciArgs {
    #[command(flatten)]
    target: QueryArgs,
    /// Print the adoption trace.
    #[arg(long)]
    explain: bool,
    /// Never adopt this default, e.g. "ci {A, B} given C". Repeatable.
    #[arg(long, value_name = "CI")]
    exclude: Vec<String>,
}

#[derive(Debug, Args)]
struct MaxentArgs {
    #[command(flatten)]
    target: QueryArgs,
    #[arg(long, value_name = "N", default_value_t = crate::maxent::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Report which independence statements the distribution satisfies:
    /// declared defaults and the candidates for each query.
    #[arg(long)]
    ci_report: bool,
    #[arg(long, value_name = "T", default_value_t = 1e-6)]
    ci_tol: f64,
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code. Results go to `out`, diagnostics to `err`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "npr: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InconsistentBase => EXIT_INCONSISTENT,
            Error::NumericFailure(_) => EXIT_NUMERIC,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let atom_cap = match cli.atom_cap {
        Some(cap) => cap,
        None => match std::env::var("NPR_ATOM_CAP") {
            Ok(v) => v.trim().parse().map_err(|_| Failure {
                code: EXIT_INPUT,
                message: format!("NPR_ATOM_CAP is not a count: `{v}`"),
            })?,
            Err(_) => DEFAULT_ATOM_CAP,
        },
    };
    let lp_tol = match &cli.command {
        Command::Maxent(_) => DEFAULT_TOL,
        _ => cli.tol.unwrap_or(DEFAULT_TOL),
    };
    let settings = Settings {
        atom_cap,
        tol: lp_tol,
    };
    match &cli.command {
        Command::Check(a) => check(&a.file, settings, cli.json, out),
        Command::Entail(a) => entail(a, settings, cli.json, out),
        Command::Spmci(a) => spmci(a, settings, cli.json, out),
        Command::Maxent(a) => {
            let solver = MaxEntSolver {
                tol: cli.tol.unwrap_or(DEFAULT_TOL_ME),
                max_iter: a.max_iter,
                init: None,
            };
            maxent(a, settings, &solver, cli.json, out)
        }
        Command::Worlds(a) => worlds(a, settings, cli.json, out),
    }
}

fn load(path: &PathBuf, settings: Settings) -> std::result::Result<Theory, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })?;
    let kb = parse_kb_with_cap(&text, settings.atom_cap).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })?;
    Ok(Theory::new(kb, settings)?)
}

fn queries(kb: &KnowledgeBase, given: &[String]) -> std::result::Result<Vec<Conditional>, Failure> {
    if given.is_empty() {
        return Ok(kb.queries.iter().map(|q| q.conditional.clone()).collect());
    }
    given
        .iter()
        .map(|text| {
            parse_conditional(text, &kb.atoms).map_err(|e| Failure {
                code: EXIT_INPUT,
                message: format!("query `{text}`: {e}"),
            })
        })
        .collect()
}

fn require_queries(qs: &[Conditional]) -> std::result::Result<(), Failure> {
    if qs.is_empty() {
        return Err(Failure {
            code: EXIT_INPUT,
            message: "no query given and the file declares none".into(),
        });
    }
    Ok(())
}

fn require_consistent(th: &Theory) -> std::result::Result<(), Failure> {
    if consistent(&th.hard)? {
        Ok(())
    } else {
        Err(Error::InconsistentBase.into())
    }
}

/// Rounds to 9 significant digits; values within 1e-12 of zero print as 0.
pub fn round_sig(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        return 0.0;
    }
    format!("{v:.8e}").parse().unwrap_or(v)
}

fn ser_real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*v))
}

fn ser_opt_real<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&round_sig(*v)),
        None => s.serialize_none(),
    }
}

fn ser_reals<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| round_sig(*x)))
}

fn text_real(v: f64) -> String {
    let r = round_sig(v);
    if r != 0.0 && r.abs() < 1e-4 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "UPPERCASE")]
enum Mode {
    Entail,
    Spmci,
    Maxent,
}

#[derive(Debug, Serialize)]
struct Blocked {
    tuple: String,
    reason: String,
}

#[derive(Debug, Serialize)]
struct QueryReport {
    #[serde(serialize_with = "ser_opt_real")]
    lower: Option<f64>,
    #[serde(serialize_with = "ser_opt_real")]
    upper: Option<f64>,
    defined: bool,
    query: String,
    mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    adopted: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    blocked: Option<Vec<Blocked>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    audit: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spmci: Option<Probe>,
}

/// Maximum-entropy value of a query set against its default-reasoning bound.
#[derive(Debug, Serialize)]
struct Probe {
    #[serde(serialize_with = "ser_opt_real")]
    lower: Option<f64>,
    #[serde(serialize_with = "ser_opt_real")]
    upper: Option<f64>,
    agree: bool,
    /// Distance from the maximum-entropy value to the interval.
    #[serde(serialize_with = "ser_opt_real")]
    discrepancy: Option<f64>,
}

impl QueryReport {
    fn bound(q: &Conditional, mode: Mode, b: Bound) -> Self {
        Self {
            lower: b.lower(),
            upper: b.upper(),
            defined: b.is_defined(),
            query: q.to_string(),
            mode,
            adopted: None,
            blocked: None,
            audit: None,
            trace: None,
            spmci: None,
        }
    }

    fn with_extension(mut self, ext: &Extension) -> Self {
        self.adopted = Some(ext.adopted.iter().map(|c| c.tuple.to_string()).collect());
        self.blocked = Some(
            ext.blocked
                .iter()
                .map(|(c, r)| Blocked {
                    tuple: c.tuple.to_string(),
                    reason: r.to_string(),
                })
                .collect(),
        );
        self.audit = Some(ext.order_audit.iter().map(|a| a.to_string()).collect());
        self.trace = Some(ext.trace());
        self
    }

    fn text(&self) -> String {
        match (self.lower, self.upper) {
            (Some(l), Some(u)) if matches!(self.mode, Mode::Maxent) || round_sig(l) == round_sig(u) => {
                format!("{} = {}", self.query, text_real(l))
            }
            (Some(l), Some(u)) => format!("{} in [{}, {}]", self.query, text_real(l), text_real(u)),
            _ => format!("{} undefined", self.query),
        }
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string(value).map_err(|e| Failure {
        code: EXIT_NUMERIC,
        message: e.to_string(),
    })?;
    writeln!(out, "{text}")?;
    Ok(())
}

/// A single `--query` prints one object; otherwise an array.
fn emit_reports(
    out: &mut dyn Write,
    json: bool,
    single: bool,
    reports: &[QueryReport],
) -> std::result::Result<(), Failure> {
    if json {
        if single && reports.len() == 1 {
            emit_json(out, &reports[0])
        } else {
            emit_json(out, &reports)
        }
    } else {
        for r in reports {
            writeln!(out, "{}", r.text())?;
        }
        Ok(())
    }
}

fn exit_for(reports: &[QueryReport]) -> i32 {
    if reports.iter().all(|r| r.defined) {
        EXIT_OK
    } else {
        EXIT_UNDEFINED
    }
}

fn check(file: &PathBuf, settings: Settings, json: bool, out: &mut dyn Write) -> Outcome {
    let th = load(file, settings)?;
    let ok = consistent(&th.hard)?;
    if json {
        #[derive(Serialize)]
        struct CheckReport {
            consistent: bool,
            atoms: usize,
            worlds: usize,
            constraints: usize,
        }
        emit_json(
            out,
            &CheckReport {
                consistent: ok,
                atoms: th.table().atom_count(),
                worlds: th.table().world_count(),
                constraints: th.kb.hard.len(),
            },
        )?;
    } else {
        writeln!(out, "{}", if ok { "CONSISTENT" } else { "INCONSISTENT" })?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_INCONSISTENT })
}

fn entail(a: &QueryArgs, settings: Settings, json: bool, out: &mut dyn Write) -> Outcome {
    let th = load(&a.file, settings)?;
    let qs = queries(&th.kb, &a.query)?;
    require_queries(&qs)?;
    require_consistent(&th)?;
    let reports = qs
        .iter()
        .map(|q| Ok(QueryReport::bound(q, Mode::Entail, bound(&th.hard, q)?)))
        .collect::<std::result::Result<Vec<_>, Failure>>()?;
    emit_reports(out, json, a.query.len() == 1, &reports)?;
    Ok(exit_for(&reports))
}

fn spmci(a: &SpmciArgs, settings: Settings, json: bool, out: &mut dyn Write) -> Outcome {
    let th = load(&a.target.file, settings)?;
    let qs = queries(&th.kb, &a.target.query)?;
    require_queries(&qs)?;
    require_consistent(&th)?;
    let excluded = a
        .exclude
        .iter()
        .map(|text| {
            parse_ci(text, &th.kb.atoms).map_err(|e| Failure {
                code: EXIT_INPUT,
                message: format!("exclusion `{text}`: {e}"),
            })
        })
        .collect::<std::result::Result<Vec<CIGTuple>, Failure>>()?;
    let options = ExtensionOptions { excluded };

    let mut reports = Vec::new();
    for q in &qs {
        let (b, ext) = spmci_bound_with(&th, q, &options)?;
        let report = QueryReport::bound(q, Mode::Spmci, b).with_extension(&ext);
        if !json {
            writeln!(out, "{}", report.text())?;
            if a.explain {
                for line in report.trace.iter().flatten() {
                    writeln!(out, "  {line}")?;
                }
                for line in report.audit.iter().flatten() {
                    writeln!(out, "  audit: {line}")?;
                }
            }
        }
        reports.push(report);
    }
    if json {
        emit_reports(out, json, a.target.query.len() == 1, &reports)?;
    }
    Ok(exit_for(&reports))
}

fn me_failure(r: &MeResult) -> Failure {
    match r.status {
        MeStatus::Infeasible => Error::InconsistentBase.into(),
        _ => Failure {
            code: EXIT_NUMERIC,
            message: format!(
                "maximum entropy did not converge: residual {:e} after {} iterations",
                r.residual, r.iterations
            ),
        },
    }
}

fn maxent(
    a: &MaxentArgs,
    settings: Settings,
    solver: &MaxEntSolver,
    json: bool,
    out: &mut dyn Write,
) -> Outcome {
    let th = load(&a.target.file, settings)?;
    let qs = queries(&th.kb, &a.target.query)?;
    let result = solver.solve(&th.hard)?;
    let Some(dist) = result.dist.as_ref() else {
        return Err(me_failure(&result));
    };
    let table = th.table();

    let mut reports = Vec::new();
    for q in &qs {
        let v = me_query(dist, table, q, settings.tol)?;
        let mut report = QueryReport::bound(
            q,
            Mode::Maxent,
            v.map_or(Bound::undefined(), |v| Bound::new(v, v)),
        );
        if a.ci_report {
            let (b, _) = spmci_bound_with(&th, q, &ExtensionOptions::default())?;
            let discrepancy = v.zip(b.interval).map(|(v, (l, u))| (l - v).max(v - u).max(0.0));
            report.spmci = Some(Probe {
                lower: b.lower(),
                upper: b.upper(),
                agree: discrepancy.is_some_and(|d| d <= a.ci_tol),
                discrepancy,
            });
        }
        reports.push(report);
    }

    let mut checks = Vec::new();
    if a.ci_report {
        let mut tuples: Vec<CIGTuple> = th.kb.defaults.iter().map(|d| d.tuple.clone()).collect();
        for q in &qs {
            for c in generate_candidates(&th, q)? {
                if !tuples.contains(&c.tuple) {
                    tuples.push(c.tuple);
                }
            }
        }
        checks = ci_report(dist, table, &tuples, a.ci_tol)?;
    }

    if json {
        #[derive(Serialize)]
        struct World {
            index: usize,
            bits: String,
            #[serde(serialize_with = "ser_real")]
            p: f64,
        }
        #[derive(Serialize)]
        struct Check {
            tuple: String,
            holds: bool,
            #[serde(serialize_with = "ser_opt_real")]
            discrepancy: Option<f64>,
        }
        #[derive(Serialize)]
        struct MaxentReport<'a> {
            status: &'static str,
            #[serde(serialize_with = "ser_real")]
            entropy: f64,
            iterations: usize,
            #[serde(serialize_with = "ser_real")]
            residual: f64,
            atoms: Vec<&'a str>,
            #[serde(serialize_with = "ser_reals")]
            distribution: Vec<f64>,
            worlds: Vec<World>,
            frozen: &'a [usize],
            queries: &'a [QueryReport],
            #[serde(skip_serializing_if = "Option::is_none")]
            ci_report: Option<Vec<Check>>,
        }
        let report = MaxentReport {
            status: "OK",
            entropy: result.entropy,
            iterations: result.iterations,
            residual: result.residual,
            atoms: th.kb.atom_names(),
            distribution: dist.probs().to_vec(),
            worlds: dist
                .probs()
                .iter()
                .enumerate()
                .map(|(w, &p)| World {
                    index: w,
                    bits: table.assignment_bits(w),
                    p,
                })
                .collect(),
            frozen: &result.frozen,
            queries: &reports,
            ci_report: a.ci_report.then(|| {
                checks
                    .iter()
                    .map(|c| Check {
                        tuple: c.tuple.to_string(),
                        holds: c.holds,
                        discrepancy: c.discrepancy,
                    })
                    .collect()
            }),
        };
        emit_json(out, &report)?;
    } else {
        writeln!(
            out,
            "entropy {}  iterations {}  residual {:.1e}",
            text_real(result.entropy),
            result.iterations,
            result.residual
        )?;
        let names: Vec<&str> = th.kb.atom_names().into_iter().rev().collect();
        writeln!(out, "world\t{}\tp", names.join(" "))?;
        for (w, &p) in dist.probs().iter().enumerate() {
            writeln!(out, "{w}\t{}\t{}", table.assignment_bits(w), text_real(p))?;
        }
        for r in &reports {
            writeln!(out, "{}", r.text())?;
            if let Some(probe) = &r.spmci {
                let bound = match (probe.lower, probe.upper) {
                    (Some(l), Some(u)) => format!("[{}, {}]", text_real(l), text_real(u)),
                    _ => "undefined".into(),
                };
                let verdict = if probe.agree { "agree" } else { "disagree" };
                let gap = probe.discrepancy.map_or("-".into(), text_real);
                writeln!(out, "  spmci {bound}  {verdict}  discrepancy {gap}")?;
            }
        }
        for c in &checks {
            let verdict = if c.holds { "holds" } else { "fails" };
            let gap = c.discrepancy.map_or("undefined".into(), text_real);
            writeln!(out, "{}  {verdict}  discrepancy {gap}", c.tuple)?;
        }
    }
    Ok(exit_for(&reports))
}

fn worlds(a: &QueryArgs, settings: Settings, json: bool, out: &mut dyn Write) -> Outcome {
    let th = load(&a.file, settings)?;
    let qs = queries(&th.kb, &a.query)?;
    let table = th.table();
    let sets = qs
        .iter()
        .map(|q| {
            let given = table.satisfying_set(&q.given)?;
            let joint = table.satisfying_set(&q.target)?.intersection(&given);
            Ok((joint, given))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let marks = |w: usize| -> String {
        sets.iter()
            .map(|(joint, given)| {
                if joint.contains(w) {
                    '1'
                } else if given.contains(w) {
                    '0'
                } else {
                    '-'
                }
            })
            .collect()
    };

    if json {
        #[derive(Serialize)]
        struct Row {
            index: usize,
            bits: String,
            marks: String,
        }
        #[derive(Serialize)]
        struct WorldsReport<'a> {
            atoms: Vec<&'a str>,
            queries: Vec<String>,
            worlds: Vec<Row>,
        }
        emit_json(
            out,
            &WorldsReport {
                atoms: th.kb.atom_names(),
                queries: qs.iter().map(|q| q.to_string()).collect(),
                worlds: (0..table.world_count())
                    .map(|w| Row {
                        index: w,
                        bits: table.assignment_bits(w),
                        marks: marks(w),
                    })
                    .collect(),
            },
        )?;
    } else {
        let names: Vec<&str> = th.kb.atom_names().into_iter().rev().collect();
        writeln!(out, "# bits: {}", names.join(" "))?;
        for (i, q) in qs.iter().enumerate() {
            writeln!(out, "# mark {}: {q}", i + 1)?;
        }
        for w in 0..table.world_count() {
            writeln!(out, "{w}\t{}\t{}", table.assignment_bits(w), marks(w))?;
        }
    }
    Ok(EXIT_OK)
}
