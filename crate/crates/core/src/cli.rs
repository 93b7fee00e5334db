//! Command line front end. Every subcommand prints one JSON envelope on
//! stdout (trajectory CSV goes to `--out` or stdout); errors print as JSON on
//! stderr with exit code 1 (usage), 2 (constraint) or 3 (validation).

use crate::error::{Error, Result};
use crate::exactalg::{parse_q, q_to_f64, Params, Q};
use crate::kernels::{chain, kernel, CaseId, KernelQuery, Route, UpdateOrder};
use crate::multipoint::{multipoint, ContourSpec, Direction, MultiPointQuery};
use crate::operators::{Engine, OpParams, OperatorWord, PartitionVector};
use crate::partitions::{Partition, SkewShape};
use crate::simulate::{self, Behavior, Field, Picture, SimConfig, Trajectory};
use crate::tableaux::{self, IndexConvention, DEFAULT_CONVENTION};
use crate::validate::{route_agreement, GridSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Version plus the pinned conventions that change numerical output.
pub fn fingerprint() -> String {
    format!(
        "{} convention={} order=geometric:{},bernoulli:{} rates-beyond-ell=0",
        env!("CARGO_PKG_VERSION"),
        DEFAULT_CONVENTION.name(),
        order_name(UpdateOrder::default_for(CaseId::A)),
        order_name(UpdateOrder::default_for(CaseId::B)),
    )
}

static FINGERPRINT: std::sync::LazyLock<String> = std::sync::LazyLock::new(fingerprint);

fn order_name(o: UpdateOrder) -> &'static str {
    match o {
        UpdateOrder::TrailerFirst => "trailer-first",
        UpdateOrder::LeaderFirst => "leader-first",
    }
}

#[derive(Parser, Debug)]
#[command(name = "tasep", version = FINGERPRINT.as_str(), about = "Exact TASEP kernels and samplers")]
struct Cli {
    /// worker threads (0 = all cores); results do not depend on it
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// n-step transition probabilities
    Kernel(KernelArgs),
    /// multi-point probabilities P(G(n) <= thresholds) or P(G(n) >= thresholds)
    Multipoint(MpArgs),
    /// sample a trajectory as CSV
    Sample(SampleArgs),
    /// route agreement over a parameter grid
    Validate(ValidateArgs),
    /// noncommutative operators
    Op {
        #[command(subcommand)]
        cmd: OpCmd,
    },
    /// tableau counts, listings and generating functions
    Tableaux(TabArgs),
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    case: CaseId,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "[]")]
    mu: Partition,
    /// single target; without it the whole table up to the cap is printed
    #[arg(long)]
    lambda: Option<Partition>,
    #[arg(long)]
    params: PathBuf,
    /// largest first part kept in the table
    #[arg(long)]
    cap: Option<u32>,
    /// particle count; defaults to the length of the rate list
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long, default_value = "chain")]
    route: Route,
}

#[derive(Args, Debug)]
struct MpArgs {
    #[arg(long)]
    case: CaseId,
    #[arg(long)]
    dir: Option<Direction>,
    #[arg(long)]
    thresholds: Partition,
    #[arg(long, default_value = "[]")]
    start: Partition,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    ell: Option<usize>,
    /// "r=3,q=256" for quadrature, or "mode=residue" / "mode=series"
    #[arg(long)]
    contour: Option<ContourSpec>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, default_value = "A")]
    case: CaseId,
    #[arg(long)]
    ell: usize,
    /// time steps
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "[]")]
    start: Partition,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// print λ_j − j instead of λ_j
    #[arg(long)]
    fermionic: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// continuous time from the step initial condition
    #[arg(long)]
    continuous: bool,
    #[arg(long)]
    t: Option<f64>,
    /// pushing instead of blocking (continuous only)
    #[arg(long)]
    push: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Grid {
    Desk,
    Smoke,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "smoke")]
    grid: Grid,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// full report including every mismatch
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum OpCmd {
    /// apply a word such as "U2 U1 U1" (rightmost first) to a partition
    Apply {
        #[arg(long)]
        word: OperatorWord,
        #[arg(long, default_value = "[]")]
        start: Partition,
        /// bind α and β from the file instead of keeping them symbolic
        #[arg(long)]
        params: Option<PathBuf>,
        /// largest partition size kept; needed for pushing operators
        #[arg(long)]
        cap: Option<u32>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Ssyt,
    Rpp,
    SetValued,
    /// dual g in x and β
    G,
    /// dual j in x and α
    J,
    /// canonical G_{λ/μ} in x, α and β
    Canonical,
    /// flagged Schur with flag letters
    Flagged,
}

#[derive(Args, Debug)]
struct TabArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    shape: Partition,
    #[arg(long, default_value = "[]")]
    inner: Partition,
    #[arg(long)]
    n: usize,
    /// distinct β_j (g) or α_k (j) instead of a single variable
    #[arg(long)]
    refined: bool,
    /// print every tableau (at most 12 cells)
    #[arg(long)]
    list: bool,
    /// row flags for the flagged family, weakly increasing
    #[arg(long, value_delimiter = ',')]
    flags: Vec<usize>,
    #[arg(long)]
    no_alpha: bool,
    #[arg(long)]
    no_beta: bool,
    #[arg(long, default_value = "beta-row")]
    convention: ConvArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConvArg {
    BetaRow,
    AlphaRow,
}

impl From<ConvArg> for IndexConvention {
    fn from(c: ConvArg) -> Self {
        match c {
            ConvArg::BetaRow => IndexConvention::BetaRowAlphaCol,
            ConvArg::AlphaRow => IndexConvention::AlphaRowBetaCol,
        }
    }
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Done {
    seed: Option<u64>,
    payload: Value,
    /// raw text printed instead of the envelope
    raw: Option<String>,
}

impl Done {
    fn json(payload: Value) -> Self {
        Done {
            seed: None,
            payload,
            raw: None,
        }
    }
}

/// Runs the command line `args` (program name first) without touching the
/// process streams.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => failure(&Error::Usage(e.kind().to_string()), Some(e.to_string())),
            };
        }
    };
    let echo = command_echo(&args);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => return failure(&Error::Usage(format!("thread pool: {}", e)), None),
    };
    match pool.install(|| dispatch(cli.cmd, cli.threads)) {
        Ok(d) => {
            let stdout = match d.raw {
                Some(s) => s,
                None => envelope(&echo, d.seed, d.payload),
            };
            Outcome {
                code: 0,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => failure(&e, None),
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let out = run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

/// Arguments after the program name, without `--threads`.
fn command_echo(args: &[std::ffi::OsString]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned());
    while let Some(a) = it.next() {
        if a == "--threads" {
            it.next();
        } else if !a.starts_with("--threads=") {
            out.push(a);
        }
    }
    out
}

fn envelope(echo: &[String], seed: Option<u64>, payload: Value) -> String {
    let v = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": echo,
        "seed": seed,
        "convention": fingerprint(),
        "payload": payload,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("json value");
    s.push('\n');
    s
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Usage(_) => "usage",
        Error::Constraint(_) => "constraint",
        Error::Pole(_) => "pole",
        Error::Unbound(_) => "unbound",
        Error::NotSymmetric(..) => "not-symmetric",
        Error::Validation(_) => "validation",
        Error::Io(_) => "io",
    }
}

fn failure(e: &Error, detail: Option<String>) -> Outcome {
    let mut v = json!({
        "error": {
            "kind": error_kind(e),
            "message": e.to_string(),
            "exit_code": e.exit_code(),
        }
    });
    if let Some(d) = detail {
        v["error"]["detail"] = Value::String(d);
    }
    Outcome {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: format!("{}\n", v),
    }
}

fn dispatch(cmd: Cmd, threads: usize) -> Result<Done> {
    match cmd {
        Cmd::Kernel(a) => cmd_kernel(a),
        Cmd::Multipoint(a) => cmd_multipoint(a),
        Cmd::Sample(a) => cmd_sample(a, threads),
        Cmd::Validate(a) => cmd_validate(a),
        Cmd::Op { cmd } => cmd_op(cmd),
        Cmd::Tableaux(a) => cmd_tableaux(a),
    }
}

// Parameter files

/// A position field given by formula rather than a list.
#[derive(Clone, Debug, PartialEq)]
enum NamedField {
    /// amp · sin(k / period)^power
    Sine { amp: f64, period: f64, power: i32 },
    /// 1 − k e^{−k/2}
    Decay,
}

impl NamedField {
    fn field(&self) -> Field {
        match *self {
            NamedField::Sine { amp, period, power } => simulate::sine_field(amp, period, power),
            NamedField::Decay => simulate::decay_field(),
        }
    }
}

/// `{"x": [..], "pi" | "rho": [..], "alpha": [..], "beta": [..]}`. Entries are
/// "p/q" strings or numbers; `alpha[k]` is α_k and `beta[j]` is β_j, both
/// starting at index 0. `alpha` may be `{"form": "sine", "amp", "period",
/// "power"}` or `{"form": "decay"}`.
#[derive(Clone, Debug)]
struct ParamFile {
    params: Params<Q>,
    alpha_form: Option<NamedField>,
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))
}

fn write_file(path: &Path, s: &str) -> Result<()> {
    std::fs::write(path, s).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))
}

fn scalar(v: &Value, what: &str) -> Result<Q> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::Usage(format!("{}: expected a number or \"p/q\", got {}", what, v))),
    };
    parse_q(&s).ok_or_else(|| Error::Usage(format!("{}: cannot read {:?}", what, s)))
}

fn list(obj: &serde_json::Map<String, Value>, key: &str) -> Result<Vec<Q>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(a)) => a
            .iter()
            .enumerate()
            .map(|(i, v)| scalar(v, &format!("{}[{}]", key, i)))
            .collect(),
        Some(v) => Err(Error::Usage(format!("{} must be a list, got {}", key, v))),
    }
}

fn number(obj: &serde_json::Map<String, Value>, key: &str, default: f64) -> Result<f64> {
    match obj.get(key) {
        None => Ok(default),
        Some(v) => Ok(q_to_f64(&scalar(v, key)?)),
    }
}

fn parse_param_file(text: &str) -> Result<ParamFile> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Usage(format!("parameter file: {}", e)))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Usage("parameter file must hold a JSON object".into()))?;
    for k in obj.keys() {
        if !["x", "pi", "rho", "alpha", "beta"].contains(&k.as_str()) {
            return Err(Error::Usage(format!("unknown parameter {:?}", k)));
        }
    }
    if obj.contains_key("pi") && obj.contains_key("rho") {
        return Err(Error::Usage("give either pi or rho, not both".into()));
    }
    let rate = if obj.contains_key("rho") {
        list(obj, "rho")?
    } else {
        list(obj, "pi")?
    };
    let (alpha, alpha_form) = match obj.get("alpha") {
        Some(Value::Object(f)) => {
            let form = match f.get("form").and_then(Value::as_str) {
                Some("sine") => NamedField::Sine {
                    amp: number(f, "amp", 0.5)?,
                    period: number(f, "period", 50.0)?,
                    power: number(f, "power", 6.0)? as i32,
                },
                Some("decay") => NamedField::Decay,
                other => return Err(Error::Usage(format!("unknown alpha form {:?}", other))),
            };
            (Vec::new(), Some(form))
        }
        _ => (list(obj, "alpha")?, None),
    };
    let params = Params::new(list(obj, "x")?, rate)
        .with_alpha(alpha)
        .with_beta(list(obj, "beta")?);
    Ok(ParamFile { params, alpha_form })
}

fn load_params(path: &Path) -> Result<ParamFile> {
    parse_param_file(&read_file(path)?)
}

/// Exact parameters; formula fields only work for sampling.
fn exact_params(path: &Path) -> Result<Params<Q>> {
    let f = load_params(path)?;
    if f.alpha_form.is_some() {
        return Err(Error::Usage("alpha given as a formula; exact commands need a list".into()));
    }
    Ok(f.params)
}

/// The case inequalities, checked through the sampler's admissibility test.
fn check_admissible(case: CaseId, ell: usize, n: usize, p: &Params<Q>) -> Result<()> {
    if p.n() < n {
        return Err(Error::Usage(format!("{} steps need {} x values, got {}", n, n, p.n())));
    }
    if p.rate.len() < ell {
        return Err(Error::Usage(format!("{} particles need {} rates, got {}", ell, ell, p.rate.len())));
    }
    let mut fp = p.map(q_to_f64);
    fp.rate.truncate(ell);
    SimConfig::new(case, ell, n, 0).with_params(&fp).validate()
}

fn q_json(v: &Q) -> Value {
    json!({ "num": v.numer().to_string(), "den": v.denom().to_string() })
}

// Subcommands

fn cmd_kernel(a: KernelArgs) -> Result<Done> {
    let p = exact_params(&a.params)?;
    let ell = a.ell.unwrap_or(p.rate.len());
    check_admissible(a.case, ell, a.n, &p)?;
    if let Some(lam) = a.lambda {
        let q = KernelQuery::new(a.case, a.n, a.mu.clone(), lam.clone(), ell, &p).route(a.route);
        let v = kernel(&q)?;
        return Ok(Done::json(json!({
            "case": a.case.name(),
            "n": a.n,
            "ell": ell,
            "mu": a.mu,
            "lambda": lam,
            "prob": q_json(&v),
            "value": q_to_f64(&v),
        })));
    }
    if a.route != Route::ClosedFormChain {
        return Err(Error::Usage("tables use the chain route; pass --lambda for other routes".into()));
    }
    let cap = match a.cap {
        Some(c) => c,
        None if !a.case.is_geometric() => a.mu.first() + a.n as u32,
        None => return Err(Error::Usage("geometric cases need --cap".into())),
    };
    let mut p = p;
    p.rate.truncate(ell);
    let t = chain(a.case, a.n, &a.mu, &p, ell, cap)?;
    let table: Vec<Value> = t
        .probs
        .iter()
        .map(|(lam, v)| json!({ "lambda": lam, "prob": q_json(v) }))
        .collect();
    Ok(Done::json(json!({
        "case": a.case.name(),
        "n": a.n,
        "ell": ell,
        "mu": a.mu,
        "cap": cap,
        "table": table,
        "tail": q_json(&t.tail),
        "tail_bound": q_to_f64(&t.tail),
    })))
}

fn cmd_multipoint(a: MpArgs) -> Result<Done> {
    let p = exact_params(&a.params)?;
    let mut q = MultiPointQuery::new(a.case, a.thresholds.clone(), a.start.clone(), a.n, &p);
    if let Some(ell) = a.ell {
        q = q.ell(ell);
    }
    if let Some(d) = a.dir {
        q = q.direction(d);
    }
    check_admissible(a.case, q.ell, a.n, &p)?;
    let v = multipoint(&q, a.contour.as_ref())?;
    let mut payload = json!({
        "case": a.case.name(),
        "direction": if q.direction == Direction::Le { "le" } else { "ge" },
        "n": a.n,
        "ell": q.ell,
        "thresholds": a.thresholds,
        "start": a.start,
        "result": v,
    });
    if let Some(e) = &v.exact {
        payload["exact"] = q_json(e);
    }
    Ok(Done::json(payload))
}

fn cmd_sample(a: SampleArgs, threads: usize) -> Result<Done> {
    let _ = threads;
    let traj = if a.continuous {
        let t = a.t.ok_or_else(|| Error::Usage("--continuous needs --t".into()))?;
        if !a.start.is_empty() {
            return Err(Error::Usage("continuous runs start from the empty partition".into()));
        }
        let rate: Field = match &a.params {
            Some(path) => {
                let f = load_params(path)?;
                simulate::from_list(f.params.rate.iter().map(q_to_f64).collect(), 1)
            }
            None => simulate::constant(1.0),
        };
        if (1..=a.ell as i64).any(|j| !(rate(j) > 0.0)) {
            return Err(Error::Constraint("continuous rates must be positive".into()));
        }
        let behavior = if a.push { Behavior::Push } else { Behavior::Block };
        let fin = simulate::run_continuous(a.ell, t, &*rate, &mut simulate::rng_for(a.seed, 0), behavior);
        Trajectory {
            snapshots: vec![(0.0, Partition::empty()), (t, fin)],
        }
    } else {
        if a.push || a.t.is_some() {
            return Err(Error::Usage("--push and --t need --continuous".into()));
        }
        let mut cfg = SimConfig::new(a.case, a.ell, a.n, a.seed)
            .start(a.start.clone())
            .record_every(a.record_every);
        if let Some(path) = &a.params {
            let f = load_params(path)?;
            let fp = f.params.map(q_to_f64);
            let xs = if fp.x.is_empty() { vec![0.5] } else { fp.x.clone() };
            // a short x list repeats its last value
            let last = *xs.last().expect("nonempty");
            let x: Field = std::sync::Arc::new(move |i| {
                if i < 1 {
                    0.0
                } else {
                    xs.get(i as usize - 1).copied().unwrap_or(last)
                }
            });
            cfg = cfg.with_params(&fp).x(x);
            if fp.rate.len() == 1 {
                cfg = cfg.rate(simulate::constant(fp.rate[0]));
            }
            if let Some(form) = &f.alpha_form {
                cfg = cfg.alpha(form.field());
            }
        }
        simulate::run(&cfg)?
    };
    let picture = if a.fermionic { Picture::Fermionic } else { Picture::Bosonic };
    let csv = traj.to_csv(a.ell, picture);
    match &a.out {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(Done {
                seed: Some(a.seed),
                payload: json!({
                    "out": path.display().to_string(),
                    "rows": traj.snapshots.len(),
                    "final": traj.last(),
                }),
                raw: None,
            })
        }
        None => Ok(Done {
            seed: Some(a.seed),
            payload: Value::Null,
            raw: Some(csv),
        }),
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<Done> {
    let spec = match a.grid {
        Grid::Desk => GridSpec::desk(a.seed),
        Grid::Smoke => GridSpec::smoke(a.seed),
    };
    let r = route_agreement(&spec)?;
    if let Some(path) = &a.report {
        let mut s = serde_json::to_string_pretty(&r).expect("report");
        s.push('\n');
        write_file(path, &s)?;
    }
    if !r.passed() {
        return Err(Error::Validation(format!(
            "{} of {} comparisons disagree",
            r.mismatches.len(),
            r.comparisons
        )));
    }
    Ok(Done {
        seed: Some(a.seed),
        payload: json!({
            "grid": a.grid.to_possible_value().map(|v| v.get_name().to_string()),
            "points": r.points,
            "comparisons": r.comparisons,
            "mismatches": r.mismatches.len(),
        }),
        raw: None,
    })
}

fn apply<S: crate::exactalg::Ring + std::fmt::Display + 'static>(
    params: OpParams<S>,
    cap: Option<u32>,
    word: &OperatorWord,
    start: &Partition,
) -> Value {
    let mut e = Engine::new(params, cap);
    let v = e.apply_word(word, &PartitionVector::basis(start.clone()));
    serde_json::to_value(&v).expect("partition vector")
}

fn cmd_op(c: OpCmd) -> Result<Done> {
    let OpCmd::Apply {
        word,
        start,
        params,
        cap,
    } = c;
    if word.has_pushing() && cap.is_none() {
        return Err(Error::Usage("pushing operators need --cap".into()));
    }
    let terms = match params {
        Some(path) => {
            let p = exact_params(&path)?;
            apply(OpParams::bound(p.alpha, p.beta), cap, &word, &start)
        }
        None => apply(OpParams::symbolic(), cap, &word, &start),
    };
    Ok(Done::json(json!({
        "word": word.to_string(),
        "start": start,
        "cap": cap,
        "terms": terms,
    })))
}

#[derive(Serialize)]
struct Cell<T> {
    row: usize,
    col: u32,
    entry: T,
}

fn cells<T: Clone + Serialize>(t: &std::collections::BTreeMap<(usize, u32), T>) -> Vec<Cell<T>> {
    t.iter()
        .map(|(&(row, col), e)| Cell {
            row,
            col,
            entry: e.clone(),
        })
        .collect()
}

fn cmd_tableaux(a: TabArgs) -> Result<Done> {
    let shape = SkewShape::new(a.shape.clone(), a.inner.clone())?;
    if a.list && shape.size() > 12 {
        return Err(Error::Usage("listings are limited to 12 cells".into()));
    }
    let (count, listing, gf) = match a.family {
        Family::Ssyt | Family::Rpp => {
            let all = if matches!(a.family, Family::Ssyt) {
                tableaux::list_ssyt(&shape, a.n)
            } else {
                tableaux::list_rpp(&shape, a.n)
            };
            let l: Vec<Value> = all.iter().map(|t| json!(cells(t))).collect();
            (Some(all.len()), l, None)
        }
        Family::SetValued => {
            let all = tableaux::list_set_valued(&shape, a.n);
            let l: Vec<Value> = all.iter().map(|t| json!(cells(t))).collect();
            (Some(all.len()), l, None)
        }
        Family::G => (None, Vec::new(), Some(json!(tableaux::gen_g(&shape, a.n, a.refined)))),
        Family::J => (None, Vec::new(), Some(json!(tableaux::gen_j(&shape, a.n, a.refined)))),
        Family::Canonical => {
            let g = tableaux::gen_G(&shape, a.n, !a.no_alpha, !a.no_beta, a.convention.into());
            (None, Vec::new(), Some(json!(g)))
        }
        Family::Flagged => {
            if !a.inner.is_empty() {
                return Err(Error::Usage("flagged Schur functions take a straight shape".into()));
            }
            let g = tableaux::gen_flagged_schur(&a.shape, a.n, &a.flags)?;
            (None, Vec::new(), Some(json!(g)))
        }
    };
    let mut payload = json!({
        "family": a.family.to_possible_value().map(|v| v.get_name().to_string()),
        "shape": a.shape,
        "inner": a.inner,
        "n": a.n,
    });
    if let Some(c) = count {
        payload["count"] = json!(c);
        if a.list {
            payload["tableaux"] = Value::Array(listing);
        }
    }
    if let Some(g) = gf {
        payload["polynomial"] = g;
    }
    Ok(Done::json(payload))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::q_to_string;

    fn tmp(name: &str, body: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("tasep-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn call(args: &[&str]) -> Outcome {
        run(std::iter::once("tasep").chain(args.iter().copied()))
    }

    fn payload(o: &Outcome) -> Value {
        assert_eq!(o.code, 0, "{}", o.stderr);
        serde_json::from_str::<Value>(&o.stdout).unwrap()["payload"].clone()
    }

    #[test]
    fn single_particle_kernel() {
        // π₁x₁ ∏_j (1 − π_j x₁) with π = (1/2, 1/3), x = 1/4
        let p = tmp("k.json", r#"{"x": ["1/4"], "pi": ["1/2", "1/3"]}"#);
        let o = call(&["kernel", "--case", "A", "--n", "1", "--mu", "[]", "--lambda", "[1]", "--params", p.to_str().unwrap()]);
        let v = payload(&o);
        let want = q_to_string(&(crate::exactalg::q(1, 8) * crate::exactalg::q(7, 8) * crate::exactalg::q(11, 12)));
        let got = format!("{}/{}", v["prob"]["num"].as_str().unwrap(), v["prob"]["den"].as_str().unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn malformed_partition_is_usage_error() {
        let o = call(&["kernel", "--case", "A", "--n", "1", "--mu", "[1,2]", "--params", "p.json"]);
        assert_eq!(o.code, 1);
        let e: Value = serde_json::from_str(&o.stderr).unwrap();
        assert_eq!(e["error"]["kind"], "usage");
    }

    #[test]
    fn inadmissible_binding_is_constraint_error() {
        let p = tmp("bad.json", r#"{"x": [2], "pi": [1]}"#);
        let o = call(&["kernel", "--case", "C", "--n", "1", "--cap", "3", "--params", p.to_str().unwrap()]);
        assert_eq!(o.code, 2, "{}", o.stderr);
    }

    #[test]
    fn version_carries_convention() {
        let o = call(&["--version"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("beta-row/alpha-col"));
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let a = call(&["--threads", "1", "sample", "--case", "C", "--ell", "5", "--n", "20", "--seed", "3"]);
        let b = call(&["sample", "--threads", "3", "--case", "C", "--ell", "5", "--n", "20", "--seed", "3"]);
        assert_eq!(a.code, 0, "{}", a.stderr);
        assert_eq!(a, b);
        let a = call(&["--threads", "1", "validate", "--grid", "smoke"]);
        let b = call(&["--threads", "2", "validate", "--grid", "smoke"]);
        assert_eq!(a.code, 0, "{}", a.stderr);
        assert_eq!(a, b);
    }

    #[test]
    fn sine_alpha_field() {
        let f = parse_param_file(r#"{"x": [0.2], "pi": [0.5], "alpha": {"form": "sine", "amp": 0.5, "period": 50, "power": 6}}"#)
            .unwrap();
        assert!(f.alpha_form.is_some());
        assert_eq!(f.params.rate, vec![crate::exactalg::q(1, 2)]);
        assert!(parse_param_file(r#"{"x": [1], "gamma": [1]}"#).is_err());
    }

    #[test]
    fn op_apply_symbolic() {
        let o = call(&["op", "apply", "--word", "U1", "--start", "[]"]);
        let v = payload(&o);
        let terms = v["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0]["partition"], json!([1]));
        assert!(call(&["op", "apply", "--word", "u1", "--start", "[]"]).code == 1);
    }

    #[test]
    fn tableau_counts() {
        let v = payload(&call(&["tableaux", "--family", "ssyt", "--shape", "[2,1]", "--n", "3"]));
        assert_eq!(v["count"], 8);
        let v = payload(&call(&["tableaux", "--family", "g", "--shape", "[1]", "--n", "2"]));
        assert!(v["polynomial"].is_array());
    }
}
