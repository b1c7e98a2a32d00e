mod svg;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use sumradii::bipoint::{build_primal, GuessContext};
use sumradii::combine::Residual;
use sumradii::gen::{generate, Space};
use sumradii::io::{read_doc, InstanceDoc, IoError, Loaded};
use sumradii::lp;
use sumradii::metric::{Ball, Instance, MetricError, Objective};
use sumradii::oracle::{opt_ball_cover, opt_partition_msd, OracleError, MAX_COVER_POINTS, MAX_PARTITION_POINTS};
use sumradii::rat::{self, Rat};
use sumradii::solver::{solve, solve_residual, SolveError, Solved};
use thiserror::Error;

const DECIMAL_DIGITS: usize = 20;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(IoError::Metric(
                MetricError::TriangleViolation { .. } | MetricError::TriangleViolationAfterRounding { .. },
            )) => 3,
            CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::Oracle(_) | CliError::Solve(SolveError::Oracle(_)) => 4,
            CliError::Solve(_) | CliError::Write { .. } => 1,
        }
    }
}

/// Exact clustering with sum-of-radii style objectives.
///
/// Exit codes: 0 success, 1 internal failure, 2 unreadable or invalid
/// instance, 3 triangle inequality violated, 4 instance too large for the
/// exact oracle.
#[derive(Parser)]
#[command(name = "sumradii", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the approximation algorithm on one instance.
    Solve(SolveArgs),
    /// Exact optimum by subset dynamic programming.
    Oracle(OracleArgs),
    /// Ratio of the algorithm against the oracle over a batch.
    Compare(CompareArgs),
    /// Write seeded random instances.
    Gen(GenArgs),
    /// Check that an instance is a valid metric.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "msr")]
    objective: Objective,
    /// Overrides the budget stored in the instance.
    #[arg(long)]
    k: Option<usize>,
    /// Number of guessed balls.
    #[arg(long, default_value_t = 1)]
    guess_size: usize,
    /// Result JSON; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Writes the λ search of the winning guess as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Writes a drawing of the solution (coordinate instances only).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Writes the simplex tableaux of the final LP solve.
    #[arg(long)]
    lp_dump: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "msr")]
    objective: Objective,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Directory of instance JSON files.
    #[arg(long, conflicts_with_all = ["n", "k"])]
    dir: Option<PathBuf>,
    /// Generate the batch instead: points per instance.
    #[arg(long, requires = "k")]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "random-metric")]
    space: Space,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// One objective, or every objective when absent.
    #[arg(long)]
    objective: Option<Objective>,
    #[arg(long, default_value_t = 1)]
    guess_size: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GenSpec {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "random-metric")]
    space: Space,
    #[arg(long, default_value_t = 1)]
    count: usize,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    spec: GenSpec,
    /// Output directory; a single instance goes to standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Write { path: p.display().to_string(), source }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path, k: Option<usize>) -> Result<Loaded, CliError> {
    Ok(read_doc(path)?.load(k)?)
}

fn cost_json(c: &Rat) -> Value {
    json!({ "exact": rat::to_string(c), "decimal": rat::to_decimal(c, DECIMAL_DIGITS) })
}

/// Solution in input indices; colocated points follow their representative.
fn solution_json(inst: &Instance, s: &Residual) -> Value {
    match s {
        Residual::Balls(balls) => Value::Array(balls.iter().map(|b| ball_json(inst, b)).collect()),
        Residual::Clusters(cs) => Value::Array(
            cs.iter()
                .map(|c| {
                    let mut ids: Vec<usize> = c.iter().flat_map(|&i| inst.origin(i).iter().copied()).collect();
                    ids.sort_unstable();
                    json!(ids)
                })
                .collect(),
        ),
    }
}

fn ball_json(inst: &Instance, b: &Ball) -> Value {
    json!({ "center": inst.origin(b.center)[0], "radius": rat::to_string(&b.radius) })
}

fn solved_json(inst: &Instance, s: &Solved) -> Value {
    json!({
        "objective": s.objective,
        "k": s.k,
        "guess_size": s.g,
        "exact": s.exact,
        "cost": cost_json(&s.cost),
        "kind": match s.solution { Residual::Balls(_) => "balls", Residual::Clusters(_) => "clusters" },
        "solution": solution_json(inst, &s.solution),
        "guess": s.guess.iter().map(|b| ball_json(inst, b)).collect::<Vec<_>>(),
        "stats": s.stats,
        "audit": {
            "passed": s.audit.passed(),
            "checks": s.audit.checks,
            "all_guesses": s.checks.iter().map(|(n, (t, f))| (n.clone(), json!({"total": t, "failed": f}))).collect::<serde_json::Map<_, _>>(),
        },
    })
}

fn cmd_solve(a: SolveArgs) -> Result<(), CliError> {
    let loaded = load(&a.input, a.k)?;
    let inst = &loaded.instance;
    if a.guess_size == 0 {
        return Err(CliError::Usage("--guess-size must be at least 1".into()));
    }
    let s = solve(inst, a.objective, a.guess_size)?;
    for c in s.audit.failures() {
        log::warn!("audit check {} failed: {} {:?} {}", c.name, c.lhs, c.relation, c.rhs);
    }
    if a.trace.is_some() || a.lp_dump.is_some() {
        write_diagnostics(inst, &s, a.trace.as_deref(), a.lp_dump.as_deref())?;
    }
    if let Some(p) = &a.svg {
        match &loaded.coords {
            Some(coords) if coords.iter().all(|c| c.len() == 2) => {
                let text = svg::render(inst, coords, &s.solution, &s.guess);
                fs::write(p, text).map_err(|source| CliError::Write { path: p.display().to_string(), source })?;
            }
            _ => eprintln!("warning: --svg needs 2D coordinates; no drawing written"),
        }
    }
    let text = serde_json::to_string_pretty(&solved_json(inst, &s)).expect("json");
    write_out(a.output.as_deref(), &text)
}

fn write_diagnostics(inst: &Instance, s: &Solved, trace: Option<&Path>, dump: Option<&Path>) -> Result<(), CliError> {
    let bp = if s.exact {
        None
    } else {
        let ctx = GuessContext::new(inst, s.guess.clone(), s.k).map_err(SolveError::from)?;
        solve_residual(inst, s.objective, &ctx)?.bipoint.map(|bp| (ctx, bp))
    };
    let Some((ctx, bp)) = bp else {
        eprintln!("warning: the winning guess needed no LP search; nothing traced");
        return Ok(());
    };
    if let Some(p) = trace {
        let doc = json!({
            "guess": ctx.guessed.iter().map(|b| ball_json(inst, b)).collect::<Vec<_>>(),
            "x_prime": ctx.x_prime.iter().map(|&i| inst.origin(i)[0]).collect::<Vec<_>>(),
            "r_m": rat::to_string(&ctx.r_m),
            "k_prime": ctx.k_prime,
            "bipoint": bp,
        });
        write_out(Some(p), &serde_json::to_string_pretty(&doc).expect("json"))?;
    }
    if let Some(p) = dump {
        let (program, _) = build_primal(inst, &ctx, &bp.lambda, s.objective.power()).map_err(SolveError::from)?;
        let mut f = fs::File::create(p).map_err(|source| CliError::Write { path: p.display().to_string(), source })?;
        lp::solve_with_dump(&program, &mut f);
        f.flush().map_err(|source| CliError::Write { path: p.display().to_string(), source })?;
    }
    Ok(())
}

fn oracle_value(inst: &Instance, objective: Objective) -> Result<(Rat, Residual), OracleError> {
    Ok(match objective {
        Objective::Msd => {
            let p = opt_partition_msd(inst, inst.k())?;
            (p.value, Residual::Clusters(p.clusters))
        }
        _ => {
            let c = opt_ball_cover(inst, inst.k(), objective.power())?;
            (c.value, Residual::Balls(c.balls))
        }
    })
}

fn cmd_oracle(a: OracleArgs) -> Result<(), CliError> {
    let loaded = load(&a.input, a.k)?;
    let inst = &loaded.instance;
    let (value, witness) = oracle_value(inst, a.objective)?;
    let doc = json!({
        "objective": a.objective,
        "k": inst.k(),
        "value": cost_json(&value),
        "witness": solution_json(inst, &witness),
    });
    write_out(a.output.as_deref(), &serde_json::to_string_pretty(&doc).expect("json"))
}

#[derive(Debug, Serialize)]
struct Row {
    instance: String,
    objective: Objective,
    k: usize,
    g: usize,
    alg_cost: String,
    opt_cost: String,
    ratio: String,
    audit_pass: String,
}

fn oracle_limit(objective: Objective) -> usize {
    match objective {
        Objective::Msd => MAX_PARTITION_POINTS,
        _ => MAX_COVER_POINTS,
    }
}

fn compare_one(name: &str, inst: &Instance, objective: Objective, g: usize) -> Result<(Row, Option<Rat>), CliError> {
    let mut row = Row {
        instance: name.to_string(),
        objective,
        k: inst.k(),
        g,
        alg_cost: String::new(),
        opt_cost: String::new(),
        ratio: "skipped".into(),
        audit_pass: String::new(),
    };
    if inst.n() > oracle_limit(objective) {
        return Ok((row, None));
    }
    let s = solve(inst, objective, g)?;
    let (opt, _) = oracle_value(inst, objective)?;
    let ratio = if opt == Rat::default() { Rat::from_integer(1.into()) } else { &s.cost / &opt };
    row.alg_cost = rat::to_string(&s.cost);
    row.opt_cost = rat::to_string(&opt);
    row.ratio = rat::to_string(&ratio);
    row.audit_pass = s.checks.values().all(|(_, f)| *f == 0).to_string();
    Ok((row, Some(ratio)))
}

fn gen_docs(spec: &GenSpec) -> Vec<(String, InstanceDoc)> {
    (0..spec.count as u64)
        .map(|i| {
            let seed = spec.seed + i;
            let name = format!("{}-n{}-k{}-s{seed}", spec.space, spec.n, spec.k);
            (name, generate(spec.space, spec.n, spec.k, seed))
        })
        .collect()
}

fn cmd_compare(a: CompareArgs) -> Result<(), CliError> {
    let spec = match (a.n, a.k) {
        (Some(n), Some(k)) => Some(GenSpec { n, k, seed: a.seed, space: a.space, count: a.count }),
        _ => None,
    };
    let mut batch: Vec<(String, Result<Instance, CliError>)> = match (&a.dir, &spec) {
        (Some(dir), _) => {
            let entries = fs::read_dir(dir)
                .map_err(|source| IoError::Read { path: dir.display().to_string(), source })?;
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            paths
                .into_iter()
                .map(|p| {
                    let name = p.file_stem().unwrap().to_string_lossy().into_owned();
                    (name, load(&p, None).map(|l| l.instance))
                })
                .collect()
        }
        (None, Some(spec)) => gen_docs(spec)
            .into_iter()
            .map(|(name, doc)| (name, doc.load(None).map(|l| l.instance).map_err(CliError::from)))
            .collect(),
        (None, None) => return Err(CliError::Usage("compare needs --dir or --n/--k".into())),
    };
    batch.sort_by(|x, y| x.0.cmp(&y.0));
    let objectives: Vec<Objective> = a.objective.map(|o| vec![o]).unwrap_or(Objective::ALL.to_vec());
    let mut jobs = Vec::new();
    for (name, inst) in &batch {
        match inst {
            Ok(inst) => jobs.extend(objectives.iter().map(|&o| (name.as_str(), inst, o))),
            Err(e) => return Err(CliError::Usage(format!("{name}: {e}"))),
        }
    }
    let results: Vec<(Row, Option<Rat>)> = jobs
        .par_iter()
        .map(|(name, inst, o)| compare_one(name, inst, *o, a.guess_size))
        .collect::<Result<_, _>>()?;

    if let Some(p) = &a.csv {
        let err = |e: csv::Error| CliError::Write { path: p.display().to_string(), source: e.into() };
        let mut w = csv::Writer::from_path(p).map_err(err)?;
        for (row, _) in &results {
            w.serialize(row).map_err(err)?;
        }
        w.flush().map_err(|source| CliError::Write { path: p.display().to_string(), source })?;
    }
    println!("{:<32} {:<5} {:>2} {:>2} {:>14} {:>14} {:>10} {:>6}", "instance", "obj", "k", "g", "alg", "opt", "ratio", "audit");
    for (r, ratio) in &results {
        let shown = ratio.as_ref().map(|q| rat::to_decimal(q, 6)).unwrap_or_else(|| r.ratio.clone());
        println!(
            "{:<32} {:<5} {:>2} {:>2} {:>14} {:>14} {:>10} {:>6}",
            r.instance, r.objective.name(), r.k, r.g, r.alg_cost, r.opt_cost, shown, r.audit_pass
        );
    }
    for o in &objectives {
        let mine: Vec<_> = results.iter().filter(|(r, _)| r.objective == *o).collect();
        let rated: Vec<&Rat> = mine.iter().filter_map(|(_, q)| q.as_ref()).collect();
        if rated.is_empty() {
            continue;
        }
        let max = rated.iter().copied().max().unwrap();
        let pass = mine.iter().filter(|(r, _)| r.audit_pass == "true").count();
        println!(
            "{}: max ratio {} ({}), audit passed {}/{}, skipped {}",
            o.name(),
            rat::to_string(max),
            rat::to_decimal(max, 6),
            pass,
            rated.len(),
            mine.len() - rated.len()
        );
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<(), CliError> {
    let docs = gen_docs(&a.spec);
    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.display().to_string(), source })?;
            for (name, doc) in docs {
                write_out(Some(&dir.join(format!("{name}.json"))), &doc.to_json())?;
            }
            Ok(())
        }
        None if docs.len() == 1 => write_out(None, &docs[0].1.to_json()),
        None => Err(CliError::Usage("--count above 1 needs --out".into())),
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<(), CliError> {
    let loaded = load(&a.input, None)?;
    let inst = &loaded.instance;
    println!(
        "valid: {} points ({} distinct), k = {}",
        inst.input_len(),
        inst.n(),
        inst.k()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Oracle(a) => cmd_oracle(a),
        Cmd::Compare(a) => cmd_compare(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
