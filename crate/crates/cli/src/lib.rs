//! Batch front-end: parses a command and its parameter grid, runs every task
//! on a worker pool and writes one record per task in grid order.

pub mod grid;
pub mod record;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcl_core::arith::format_rational;
use gcl_core::bernoulli::b_pm3_mod_p;
use gcl_core::lemmas::{self, LemmaGrid, LemmaId, LemmaReport, LemmaTask};
use gcl_core::search::{self, SearchBox, SearchHit};
use gcl_core::sequences::{terms_by_recurrence, term_by_formula, SequenceSpec, DEFAULT_MAX_INDEX};
use gcl_core::theorem::{self, consistency_sweep, ConsistencyStatus, CongruenceReport, CongruenceTask, Mode};
use gcl_core::{reduce_mod, Error, PrimePowerModulus};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::grid::{List, NamedRange, Rst};
use crate::record::{big, opt, valuation, write_records, Format, Record, Status, Summary};

#[derive(Debug, Parser)]
#[command(name = "gcl", version, about = "Exact verification of Gauss-type congruences for Apéry-like sequences")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, env = "GCL_WORKERS", global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    /// Largest sequence index a task may evaluate.
    #[arg(long, env = "GCL_MAX_INDEX", global = true, default_value_t = DEFAULT_MAX_INDEX,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub max_index: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Terms of a sequence.
    Seq(SeqArgs),
    /// Instances of the harmonic-sum and binomial lemmas.
    VerifyLemma(LemmaArgs),
    /// A_{np^m} ≡ A_{np^{m-1}} (mod p^{3m}).
    VerifyGauss(CongruenceArgs),
    /// The refinement modulo p^{3m+1} by p^{3m} B_{p-3} 𝒜_n.
    #[command(name = "verify-theorem1")]
    VerifyTheorem1(CongruenceArgs),
    /// 𝒜_n mod p read back from the sequence, for every (p, m).
    Consistency(CongruenceArgs),
    /// Integrality search over a box of recurrence parameters.
    Search(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Closed form when the spec has one, else the recurrence.
    Auto,
    Formula,
    Recurrence,
    /// Both, failing any term where they differ.
    Both,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    /// `named:D`, `oss:2,2,0`, `zagier:A,B,λ`, `az:a,b,c`, `cooper:a,b,c,d`, `apery3`, `apery2`.
    #[arg(long)]
    pub spec: SequenceSpec,
    /// Number of terms, starting at n = 0.
    #[arg(long, default_value_t = 10)]
    pub count: u64,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    /// Comma list of lemma ids (b1, b2, b7..b17, b23) or `all`.
    #[arg(long, default_value = "all")]
    pub id: String,
    #[arg(long)]
    pub p: Option<List<u64>>,
    /// `m` for b2, b7–b13 and b23.
    #[arg(long)]
    pub m: Option<List<u32>>,
    /// `l` for b14–b17.
    #[arg(long)]
    pub l: Option<List<u32>>,
    /// Block index for the block lemmas; `n` for b1.
    #[arg(long)]
    pub n: Option<List<u64>>,
    /// `k` for b1 (defaults to 1..n-1).
    #[arg(long)]
    pub k: Option<List<u64>>,
    /// Random b2 instances per (p, m).
    #[arg(long, default_value_t = lemmas::SHIFT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = lemmas::SHIFT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CongruenceArgs {
    #[arg(long)]
    pub p: Option<List<u64>>,
    #[arg(long)]
    pub n: Option<List<u64>>,
    #[arg(long)]
    pub m: Option<List<u32>>,
    /// `r,s,t`; repeatable.
    #[arg(long)]
    pub rst: Vec<Rst>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Zagier,
    Cooper,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// `name=lo..hi` (Zagier: A, B, lambda; Cooper: a, b, c, d); repeatable.
    /// Unset parameters keep the default box.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Vec<NamedRange>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Largest number of tuples the box may hold.
    #[arg(long, default_value_t = search::DEFAULT_BUDGET)]
    pub budget: u64,
}

/// A configuration that cannot run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

type Usage<T> = std::result::Result<T, UsageError>;

/// Parses `args` (program name first), runs the command, writes records to
/// `out` and the summary or diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                2
            } else {
                let _ = write!(out, "{rendered}");
                0
            };
        }
    };
    let records = match execute(&cli) {
        Ok(records) => records,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    if let Err(e) = write_records(out, &records, cli.format) {
        let _ = writeln!(err, "error: writing report: {e}");
        return 2;
    }
    let summary = Summary::of(&records);
    let _ = writeln!(err, "{summary}");
    if summary.fail > 0 {
        1
    } else {
        0
    }
}

/// Runs the parsed command and returns its records in task order.
pub fn execute(cli: &Cli) -> Usage<Vec<Record>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        builder = builder.num_threads(w as usize);
    }
    let pool = builder.build().map_err(|e| UsageError(format!("worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Seq(args) => seq(args, cli.max_index),
        Command::VerifyLemma(args) => verify_lemma(args),
        Command::VerifyGauss(args) => congruences(args, Mode::Gauss3, cli.max_index),
        Command::VerifyTheorem1(args) => congruences(args, Mode::Theorem1, cli.max_index),
        Command::Consistency(args) => consistency(args, cli.max_index),
        Command::Search(args) => run_search(args),
    })
}

fn check_primes(primes: &[u64]) -> Usage<()> {
    for &p in primes {
        PrimePowerModulus::new(p, 1)?;
    }
    Ok(())
}

fn seq(args: &SeqArgs, cap: u64) -> Usage<Vec<Record>> {
    if args.count == 0 || args.count - 1 > cap {
        return Err(UsageError(format!("--count must be in 1..={}", cap.saturating_add(1))));
    }
    let has_formula = !matches!(args.spec, SequenceSpec::Rec(_));
    let (formula, recurrence) = match args.method {
        Method::Auto => (has_formula, !has_formula),
        Method::Formula => (true, false),
        Method::Recurrence => (false, true),
        Method::Both => (true, true),
    };
    if formula && !has_formula {
        return Err(UsageError(format!("{} has no closed form", args.spec)));
    }
    let rec_terms = if recurrence { Some(terms_by_recurrence(&args.spec, args.count as usize)?) } else { None };
    let spec = args.spec;
    let method = match (formula, recurrence) {
        (true, true) => "both",
        (true, false) => "formula",
        _ => "recurrence",
    };
    (0..args.count)
        .into_par_iter()
        .map(|n| {
            let by_formula = if formula { Some(term_by_formula(&spec, n)?) } else { None };
            let by_rec = rec_terms.as_ref().map(|ts| &ts[n as usize]);
            let (value, integral, agree) = match (&by_formula, by_rec) {
                (Some(f), Some(r)) => (f.to_string(), r.is_integer(), r.is_integer() && r.to_integer() == *f),
                (Some(f), None) => (f.to_string(), true, true),
                (None, Some(r)) => (format_rational(r), r.is_integer(), true),
                (None, None) => unreachable!("at least one method runs"),
            };
            let mut rec = Record::new("seq").field("spec", spec.to_string()).field("n", n).field("value", value);
            if let (Some(_), Some(r)) = (&by_formula, by_rec) {
                rec = rec.field("recurrence_value", format_rational(r));
            }
            Ok(rec.field("integral", integral).field("method", method).finish(Status::from_pass(agree)))
        })
        .collect()
}

fn lemma_ids(spec: &str) -> Usage<Vec<LemmaId>> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(LemmaId::ALL.to_vec());
    }
    spec.split(',').map(|s| s.trim().parse::<LemmaId>().map_err(UsageError::from)).collect()
}

/// Tasks for the requested lemmas: default grids with any given axis
/// replaced.
pub fn lemma_tasks(args: &LemmaArgs) -> Usage<Vec<LemmaTask>> {
    let mut grid = LemmaGrid { shift_samples: args.samples, seed: args.seed, ..LemmaGrid::default() };
    if let Some(List(p)) = &args.p {
        check_primes(p)?;
        grid.primes = p.clone();
        grid.granville_primes = p.clone();
    }
    if let Some(List(m)) = &args.m {
        if m.contains(&0) {
            return Err(UsageError("--m values must be at least 1".into()));
        }
        grid.ms = m.clone();
    }
    if let Some(List(l)) = &args.l {
        grid.ls = l.clone();
    }
    if let Some(List(n)) = &args.n {
        grid.ns = n.clone();
    }
    let mut tasks = Vec::new();
    for id in lemma_ids(&args.id)? {
        if id != LemmaId::GranvilleB1 || (args.n.is_none() && args.k.is_none()) {
            tasks.extend(grid.tasks(id));
            continue;
        }
        let ns: Vec<u64> = match &args.n {
            Some(List(n)) => n.clone(),
            None => (2..=grid.granville_max_n).collect(),
        };
        for &p in &grid.granville_primes {
            for &n in &ns {
                let ks: Vec<u64> = match &args.k {
                    Some(List(k)) => k.clone(),
                    None => (1..n).collect(),
                };
                tasks.extend(ks.into_iter().map(|k| LemmaTask::Granville { n, k, p }));
            }
        }
    }
    Ok(tasks)
}

fn params_object(params: &[(&str, i64)]) -> Value {
    Value::Object(params.iter().map(|(k, v)| (k.to_string(), Value::from(*v))).collect::<Map<_, _>>())
}

fn task_params(task: &LemmaTask) -> Vec<(&'static str, i64)> {
    match *task {
        LemmaTask::Granville { n, k, p } => vec![("n", n as i64), ("k", k as i64), ("p", p as i64)],
        LemmaTask::Shift(a) => vec![
            ("a", a.a as i64),
            ("b", a.b as i64),
            ("c", a.c as i64),
            ("n", a.n as i64),
            ("m", a.m as i64),
            ("p", a.p as i64),
            ("r", a.r as i64),
            ("s", a.s as i64),
            ("t", a.t as i64),
        ],
        LemmaTask::Block { which, p, index, n } => {
            let index_name = if which.index_may_be_zero() { "l" } else { "m" };
            vec![("p", p as i64), (index_name, index as i64), ("n", n as i64)]
        }
    }
}

fn lemma_record(task: &LemmaTask, result: gcl_core::Result<LemmaReport>) -> Record {
    let base = Record::new("verify-lemma").field("lemma", task.lemma().short());
    match result {
        Ok(r) => {
            let modulus = r.sides.working_modulus().map(|m| m.to_string()).unwrap_or_else(|| "exact".into());
            base.field("params", params_object(&r.params))
                .field("modulus", modulus)
                .field("lhs", r.sides.lhs_string())
                .field("rhs", r.sides.rhs_string())
                .field("required_exponent", r.required_exponent)
                .field("achieved_exponent", valuation(r.achieved_exponent))
                .field("provenance", r.provenance.to_string())
                .field("error", Value::Null)
                .finish(Status::from_pass(r.pass))
        }
        Err(e) => {
            let status = if matches!(e, Error::DegenerateArgs(_)) { Status::Skipped } else { Status::Error };
            base.field("params", params_object(&task_params(task)))
                .field("modulus", Value::Null)
                .field("lhs", Value::Null)
                .field("rhs", Value::Null)
                .field("required_exponent", Value::Null)
                .field("achieved_exponent", Value::Null)
                .field("provenance", Value::Null)
                .field("error", e.to_string())
                .finish(status)
        }
    }
}

fn verify_lemma(args: &LemmaArgs) -> Usage<Vec<Record>> {
    let tasks = lemma_tasks(args)?;
    Ok(tasks.par_iter().map(|t| lemma_record(t, t.run())).collect())
}

fn congruence_grid(args: &CongruenceArgs, mode: Mode, cap: u64) -> Usage<Vec<CongruenceTask>> {
    let primes = args.p.as_ref().map_or(theorem::DEFAULT_PRIMES.to_vec(), |l| l.0.clone());
    let ns = args.n.as_ref().map_or(theorem::DEFAULT_NS.to_vec(), |l| l.0.clone());
    let ms = args.m.as_ref().map_or(theorem::DEFAULT_MS.to_vec(), |l| l.0.clone());
    let rsts: Vec<(u32, u32, u32)> = if args.rst.is_empty() {
        theorem::DEFAULT_RST.to_vec()
    } else {
        args.rst.iter().map(|&Rst(r, s, t)| (r, s, t)).collect()
    };
    check_primes(&primes)?;
    let tasks = theorem::grid_tasks(&primes, &ns, &ms, &rsts, mode);
    for t in &tasks {
        t.validate()?;
        match t.indices() {
            Some((upper, _)) if upper <= cap => {}
            _ => return Err(UsageError(format!("n p^m for n = {}, p = {}, m = {} exceeds the index cap {cap}", t.n, t.p, t.m))),
        }
    }
    Ok(tasks)
}

fn congruence_record(task: &CongruenceTask, result: gcl_core::Result<CongruenceReport>) -> Record {
    let (upper, lower) = task.indices().unwrap_or((0, 0));
    let required = match task.mode {
        Mode::Gauss3 => 3 * task.m,
        Mode::Theorem1 => 3 * task.m + 1,
    };
    let base = Record::new(match task.mode {
        Mode::Gauss3 => "verify-gauss",
        Mode::Theorem1 => "verify-theorem1",
    })
    .field("p", task.p)
    .field("n", task.n)
    .field("m", task.m)
    .field("r", task.r)
    .field("s", task.s)
    .field("t", task.t)
    .field("index_upper", upper)
    .field("index_lower", lower)
    .field("modulus", format!("{}^{}", task.p, required));
    match result {
        Ok(r) => base
            .field("term_upper", big(&r.lhs_terms.0))
            .field("term_lower", big(&r.lhs_terms.1))
            .field("difference", big(r.difference()))
            .field("correction", opt(r.correction.as_ref().map(|c| format_rational(c).into())))
            .field("bernoulli_residue", big(r.bernoulli.residue.value()))
            .field("bernoulli_provenance", r.bernoulli.provenance.to_string())
            .field("required_exponent", r.required_exponent)
            .field("achieved_exponent", valuation(r.achieved_exponent))
            .field("error", Value::Null)
            .finish(Status::from_pass(r.pass)),
        Err(e) => base
            .field("term_upper", Value::Null)
            .field("term_lower", Value::Null)
            .field("difference", Value::Null)
            .field("correction", Value::Null)
            .field("bernoulli_residue", Value::Null)
            .field("bernoulli_provenance", Value::Null)
            .field("required_exponent", required)
            .field("achieved_exponent", Value::Null)
            .field("error", e.to_string())
            .finish(Status::Error),
    }
}

fn congruences(args: &CongruenceArgs, mode: Mode, cap: u64) -> Usage<Vec<Record>> {
    let tasks = congruence_grid(args, mode, cap)?;
    Ok(tasks.par_iter().map(|t| congruence_record(t, t.run(cap))).collect())
}

fn consistency(args: &CongruenceArgs, cap: u64) -> Usage<Vec<Record>> {
    let tasks = congruence_grid(args, Mode::Theorem1, cap)?;
    let primes = args.p.as_ref().map_or(theorem::DEFAULT_PRIMES.to_vec(), |l| l.0.clone());
    let ms = args.m.as_ref().map_or(theorem::DEFAULT_MS.to_vec(), |l| l.0.clone());
    let mut rows: Vec<(u64, u32, u32, u32)> = Vec::new();
    for t in &tasks {
        if !rows.contains(&(t.n, t.r, t.s, t.t)) {
            rows.push((t.n, t.r, t.s, t.t));
        }
    }
    let per_row: Vec<Vec<Record>> = rows
        .par_iter()
        .map(|&(n, r, s, t)| {
            let report = match consistency_sweep(n, r, s, t, &primes, &ms, cap) {
                Ok(rep) => rep,
                Err(e) => {
                    let rec = Record::new("consistency")
                        .field("n", n)
                        .field("r", r)
                        .field("s", s)
                        .field("t", t)
                        .field("error", e.to_string())
                        .finish(Status::Error);
                    return vec![rec];
                }
            };
            report
                .entries
                .iter()
                .map(|entry| {
                    let modulus = PrimePowerModulus::new(entry.p, 1).expect("checked prime");
                    let expected = reduce_mod(&report.correction, &modulus).map(|x| big(x.value()));
                    let provenance = b_pm3_mod_p(entry.p).map(|b| b.provenance.to_string());
                    let (outcome, extracted, status) = match &entry.status {
                        ConsistencyStatus::Agree => ("agree", expected.clone().ok(), Status::Pass),
                        ConsistencyStatus::Disagree { extracted, .. } => ("disagree", Some(big(extracted)), Status::Fail),
                        ConsistencyStatus::GaussFailure { .. } => ("gauss-failure", None, Status::Fail),
                        ConsistencyStatus::Skipped => ("bernoulli-vanishes", None, Status::Skipped),
                    };
                    Record::new("consistency")
                        .field("n", n)
                        .field("r", r)
                        .field("s", s)
                        .field("t", t)
                        .field("p", entry.p)
                        .field("m", entry.m)
                        .field("modulus", format!("{}^1", entry.p))
                        .field("correction", format_rational(&report.correction))
                        .field("expected", opt(expected.ok()))
                        .field("extracted", opt(extracted))
                        .field("outcome", outcome)
                        .field("bernoulli_provenance", opt(provenance.ok().map(Value::from)))
                        .field("error", Value::Null)
                        .finish(status)
                })
                .collect()
        })
        .collect();
    Ok(per_row.into_iter().flatten().collect())
}

/// The search box described by `args`, starting from the family default.
pub fn search_box(args: &SearchArgs) -> Usage<SearchBox> {
    let base = match args.family {
        FamilyArg::Zagier => SearchBox::default_zagier(),
        FamilyArg::Cooper => SearchBox::default_cooper(),
    };
    let family = base.family();
    let names = family.param_names();
    let mut ranges = base.ranges().to_vec();
    for NamedRange { name, range } in &args.range {
        let slot = names
            .iter()
            .position(|n| n.eq_ignore_ascii_case(name))
            .ok_or_else(|| UsageError(format!("{family} has no parameter `{name}` (expected one of {})", names.join(", "))))?;
        ranges[slot] = *range;
    }
    Ok(SearchBox::new(family, ranges, args.horizon.unwrap_or(base.horizon()))?)
}

fn hit_record(hit: &SearchHit, horizon: usize) -> Record {
    let names = hit.family.param_names();
    let params: Map<String, Value> = names.iter().zip(&hit.params).map(|(k, v)| (k.to_string(), Value::from(*v))).collect();
    Record::new("search")
        .field("family", hit.family.to_string())
        .field("params", Value::Object(params))
        .field("horizon", horizon)
        .field("classification", hit.classification.to_string())
        .field("first_terms", Value::Array(hit.first_terms.iter().map(big).collect()))
        .field("evidence_only", true)
        .finish(Status::Pass)
}

fn run_search(args: &SearchArgs) -> Usage<Vec<Record>> {
    let b = search_box(args)?;
    let hits = search::run_search(&b, args.budget)?;
    Ok(hits.iter().map(|h| hit_record(h, b.horizon())).collect())
}

