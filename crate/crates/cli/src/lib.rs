//! Task runner behind the `serrelab` binary.
//!
//! Every task produces one [`TaskResult`]; results are printed as JSON
//! lines or as text, and the process exit code summarises them.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use serrelab_core::constructions::{c_double, fig3_tower, magnus_pair_gog, verify_c_double, verify_magnus_pair};
use serrelab_core::dsl::{self, ConjTarget, ParseError, ResolvedTask, TaskSpec, Workspace};
use serrelab_core::gog::GraphOfGroups;
use serrelab_core::towers::{self, Tower, TowerError};
use serrelab_core::words::are_conjugate;
use serrelab_core::{Alphabet, Word};

#[derive(Debug, Parser)]
#[command(name = "serrelab", version, about = "Free groups, graphs of groups and tower experiments")]
pub struct Cli {
    /// Seed for every random choice; echoed in each report.
    #[arg(long, global = true, env = "SERRELAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for exponent scans and independent tasks.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record wall-clock time in `timing_ms` (otherwise 0, keeping reports
    /// byte-identical across runs).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and elaborate a document without running tasks.
    Check { file: PathBuf },
    /// Decide conjugacy of two words. Without a file the words live in the
    /// free group on the letters they use.
    Conj {
        file: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "task")]
        left: Option<String>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "task")]
        right: Option<String>,
        /// Also accept conjugacy to the inverse.
        #[arg(long)]
        pm: bool,
        /// Alphabet, graph or tower of the file to work in.
        #[arg(long = "in")]
        target: Option<String>,
        /// Run a `conj` task declared in the file.
        #[arg(long, requires = "file", conflicts_with_all = ["left", "right"])]
        task: Option<String>,
    },
    /// Re-check a built-in construction and print its certificates.
    #[command(subcommand)]
    Verify(Verify),
    /// Run `separate` tasks of a document.
    Separate {
        file: PathBuf,
        #[arg(long)]
        task: Option<String>,
    },
    /// Run `discriminate` tasks of a document.
    Discriminate {
        file: PathBuf,
        #[arg(long)]
        task: Option<String>,
    },
    /// Print a built-in fixture as a document.
    Export {
        #[arg(value_enum)]
        fixture: Fixture,
    },
    /// Run every task of a document (or the named ones) in order.
    Report {
        file: PathBuf,
        #[arg(long)]
        task: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    MagnusPair,
    RetractionTower,
    CDouble,
}

/// Document text of a built-in fixture.
pub fn export(fixture: Fixture) -> String {
    let doc = match fixture {
        Fixture::MagnusPair => dsl::export_graph(&magnus_pair_gog().graph),
        Fixture::RetractionTower => dsl::export_graph(&fig3_tower(&magnus_pair_gog()).expect("built-in fixture").graph),
        Fixture::CDouble => {
            let base = Alphabet::new("F", ["x", "y"]).expect("alphabet");
            let w = dsl::parse_word(&base, "[x,y]").expect("word");
            dsl::export_graph(&c_double(&w).expect("built-in fixture").graph)
        }
    };
    dsl::render(&doc)
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Magnus-pair group: non-conjugacy, normal-closure witnesses,
    /// strictness of the frozen map and conjugacy of the images.
    MagnusPair,
    /// C-double: homomorphism family, mirror pairs, centralizer embedding.
    CDouble {
        /// Word over `x, y`, or the name of a word declared in `--file`.
        #[arg(long, default_value = "[x,y]")]
        w: String,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Refuted,
    Error,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskResult {
    pub task: String,
    pub status: Status,
    pub seed: u64,
    pub timing_ms: u64,
    pub detail: Value,
    /// Input problems exit with 2 rather than 1.
    #[serde(skip)]
    pub input_error: bool,
}

impl TaskResult {
    fn new(task: &str, status: Status, seed: u64, detail: Value) -> TaskResult {
        TaskResult { task: task.to_string(), status, seed, timing_ms: 0, detail, input_error: false }
    }

    fn input_error(task: &str, seed: u64, detail: Value) -> TaskResult {
        TaskResult { input_error: true, ..TaskResult::new(task, Status::Error, seed, detail) }
    }
}

fn parse_error_json(e: &ParseError) -> Value {
    json!({ "line": e.line, "column": e.col, "expected": e.expected, "found": e.found })
}

/// 0 when every result is verified, 2 on any input error, 1 otherwise.
pub fn exit_code(results: &[TaskResult]) -> i32 {
    if results.iter().any(|r| r.input_error) {
        2
    } else if results.iter().all(|r| r.status == Status::Verified) {
        0
    } else {
        1
    }
}

pub fn render(results: &[TaskResult], format: Format) -> String {
    let mut out = String::new();
    for r in results {
        match format {
            Format::Json => {
                out.push_str(&serde_json::to_string(r).expect("serializable report"));
                out.push('\n');
            }
            Format::Text => {
                let status = serde_json::to_value(r.status).expect("status");
                let _ = writeln!(out, "{}: {} (seed {}, {} ms)", r.task, status.as_str().unwrap_or("?"), r.seed, r.timing_ms);
                for line in serde_json::to_string_pretty(&r.detail).expect("detail").lines() {
                    let _ = writeln!(out, "  {line}");
                }
            }
        }
    }
    out
}

/// Runs the command and returns its results along with the exit code.
pub fn run(cli: &Cli) -> (Vec<TaskResult>, i32) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build().expect("thread pool");
    let results = pool.install(|| dispatch(cli));
    let code = exit_code(&results);
    (results, code)
}

fn load(path: &Path, seed: u64) -> Result<(dsl::Document, Workspace), TaskResult> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| TaskResult::input_error(&name, seed, json!({ "error": e.to_string() })))?;
    let doc = dsl::parse(&text)
        .map_err(|e| TaskResult::input_error(&name, seed, json!({ "parse_error": parse_error_json(&e) })))?;
    let ws = dsl::elaborate(&doc).map_err(|e| {
        TaskResult::input_error(&name, seed, json!({ "error": e.message, "declaration": e.decl, "line": e.line }))
    })?;
    Ok((doc, ws))
}

fn timed(enabled: bool, f: impl FnOnce() -> TaskResult) -> TaskResult {
    let start = Instant::now();
    let mut r = f();
    if enabled {
        r.timing_ms = start.elapsed().as_millis() as u64;
    }
    r
}

fn dispatch(cli: &Cli) -> Vec<TaskResult> {
    let seed = cli.seed;
    match &cli.command {
        Command::Check { file } => vec![timed(cli.timing, || match load(file, seed) {
            Ok((doc, ws)) => {
                let kinds = json!({
                    "alphabets": ws.alphabets.len(),
                    "words": ws.words.len(),
                    "homs": ws.homs.len(),
                    "graphs": ws.graphs.len(),
                    "towers": ws.towers.len(),
                    "tasks": ws.tasks.iter().map(|t| t.name.clone()).collect::<Vec<_>>(),
                    "round_trip": dsl::parse(&dsl::render(&doc)).map(|d| d == doc).unwrap_or(false),
                });
                TaskResult::new("check", Status::Verified, seed, kinds)
            }
            Err(e) => e,
        })],
        Command::Conj { file, left, right, pm, target, task } => {
            vec![timed(cli.timing, || conj_command(file.as_deref(), left, right, *pm, target, task, seed))]
        }
        Command::Verify(Verify::MagnusPair) => vec![timed(cli.timing, || {
            let f = magnus_pair_gog();
            match verify_magnus_pair(&f) {
                Ok(r) => {
                    let status = if r.verified { Status::Verified } else { Status::Refuted };
                    TaskResult::new("verify_magnus_pair", status, seed, serde_json::to_value(&r).expect("report"))
                }
                Err(e) => TaskResult::new("verify_magnus_pair", Status::Error, seed, json!({ "error": e.to_string() })),
            }
        })],
        Command::Verify(Verify::CDouble { w, file, count, pairs }) => {
            vec![timed(cli.timing, || c_double_command(w, file.as_deref(), *count, *pairs, seed))]
        }
        Command::Separate { file, task } => run_file(cli, file, |t| {
            matches!(t.spec, TaskSpec::Separate { .. }) && task.as_ref().is_none_or(|n| &t.name == n)
        }, task.iter().cloned().collect()),
        Command::Discriminate { file, task } => run_file(cli, file, |t| {
            matches!(t.spec, TaskSpec::Discriminate { .. }) && task.as_ref().is_none_or(|n| &t.name == n)
        }, task.iter().cloned().collect()),
        Command::Export { fixture } => {
            vec![TaskResult::new("export", Status::Verified, seed, json!({ "document": export(*fixture) }))]
        }
        Command::Report { file, task } => {
            run_file(cli, file, |t| task.is_empty() || task.contains(&t.name), task.clone())
        }
    }
}

fn run_file(cli: &Cli, file: &Path, keep: impl Fn(&ResolvedTask) -> bool, requested: Vec<String>) -> Vec<TaskResult> {
    let seed = cli.seed;
    let ws = match load(file, seed) {
        Ok((_, ws)) => ws,
        Err(e) => return vec![e],
    };
    let mut missing: Vec<TaskResult> = requested
        .iter()
        .filter(|n| !ws.tasks.iter().any(|t| &t.name == *n && keep(t)))
        .map(|n| TaskResult::input_error(n, seed, json!({ "error": format!("no matching task `{n}`") })))
        .collect();
    if !missing.is_empty() {
        return missing;
    }
    let selected: Vec<&ResolvedTask> = ws.tasks.iter().filter(|t| keep(t)).collect();
    if selected.is_empty() {
        missing.push(TaskResult::input_error(&file.display().to_string(), seed, json!({ "error": "no tasks to run" })));
        return missing;
    }
    selected.par_iter().map(|t| timed(cli.timing, || run_task(&ws, t, seed))).collect()
}

pub fn run_task(ws: &Workspace, t: &ResolvedTask, seed: u64) -> TaskResult {
    match &t.spec {
        TaskSpec::Separate { tower, set, max, seed: task_seed, indivisible } => {
            separate(&ws.towers[tower], &t.name, set, *max, task_seed.unwrap_or(seed), indivisible)
        }
        TaskSpec::Discriminate { tower, set, max } => discriminate(&ws.towers[tower], &t.name, set, *max, seed),
        TaskSpec::Conj { target, left, right, pm } => conj_in(ws, target, &t.name, left, right, *pm, seed),
    }
}

fn tower_input_error(name: &str, seed: u64, e: TowerError) -> TaskResult {
    let input = matches!(e, TowerError::ConjugateInput { .. } | TowerError::TrivialInput(_));
    let detail = json!({ "error": e.to_string() });
    if input {
        TaskResult::input_error(name, seed, detail)
    } else {
        TaskResult::new(name, Status::Error, seed, detail)
    }
}

fn separate(tower: &Tower, name: &str, set: &[Word], max: u64, seed: u64, indivisible: &[usize]) -> TaskResult {
    let g = tower.top();
    let result = (|| {
        let loops = set.iter().map(|w| g.word_to_loop(w)).collect::<Result<Vec<_>, _>>()?;
        towers::check_pairwise_nonconjugate(g, &loops)?;
        let steps = (1..=max as i64)
            .into_par_iter()
            .map(|n| towers::scan_step(g, &tower.diagonal_retraction(n)?, n, &loops, indivisible))
            .collect::<Result<Vec<_>, TowerError>>()?;
        Ok::<_, TowerError>(towers::assemble_separation(name, &steps, indivisible, seed))
    })();
    match result {
        Ok(rep) => {
            let status = if rep.exhausted() {
                Status::Exhausted
            } else if rep.indivisibility.iter().all(|i| i.indivisible_for_all) {
                Status::Verified
            } else {
                Status::Refuted
            };
            let mut detail = serde_json::to_value(&rep).expect("report");
            detail["set"] = json!(set.iter().map(Word::to_string).collect::<Vec<_>>());
            TaskResult::new(name, status, seed, detail)
        }
        Err(e) => tower_input_error(name, seed, e),
    }
}

fn discriminate(tower: &Tower, name: &str, set: &[Word], max: u64, seed: u64) -> TaskResult {
    let g = tower.top();
    let result = set
        .iter()
        .map(|w| g.word_to_loop(w).map_err(TowerError::from))
        .collect::<Result<Vec<_>, _>>()
        .and_then(|loops| towers::discrimination_experiment(tower, &loops, max as i64, name));
    match result {
        Ok(rep) => {
            let status = if rep.minimal_n.is_some() { Status::Verified } else { Status::Exhausted };
            let mut detail = serde_json::to_value(&rep).expect("report");
            detail["set"] = json!(set.iter().map(Word::to_string).collect::<Vec<_>>());
            TaskResult::new(name, status, seed, detail)
        }
        Err(e) => tower_input_error(name, seed, e),
    }
}

fn conj_free(name: &str, left: &Word, right: &Word, pm: bool, seed: u64) -> TaskResult {
    match are_conjugate(left, right, pm) {
        Ok(Some(c)) => {
            let ok = c.verify(left, right);
            TaskResult::new(
                name,
                if ok { Status::Verified } else { Status::Error },
                seed,
                json!({
                    "left": left.to_string(),
                    "right": right.to_string(),
                    "conjugate": true,
                    "inverse": c.sign < 0,
                    "conjugator": c.conjugator.to_string(),
                    "certificate_verified": ok,
                }),
            )
        }
        Ok(None) => TaskResult::new(
            name,
            Status::Refuted,
            seed,
            json!({ "left": left.to_string(), "right": right.to_string(), "conjugate": false }),
        ),
        Err(e) => TaskResult::new(name, Status::Error, seed, json!({ "error": e.to_string() })),
    }
}

fn conj_graph(g: &GraphOfGroups, name: &str, left: &Word, right: &Word, pm: bool, seed: u64) -> TaskResult {
    let result = (|| {
        let (l, r) = (g.word_to_loop(left)?, g.word_to_loop(right)?);
        let res = g.are_conjugate(&l, &r, pm)?;
        let conjugator = res.certificate.as_ref().map(|c| g.loop_to_word(c)).transpose()?;
        Ok::<_, serrelab_core::gog::GogError>((res, conjugator))
    })();
    match result {
        Ok((res, conjugator)) => TaskResult::new(
            name,
            if res.conjugate { Status::Verified } else { Status::Refuted },
            seed,
            json!({
                "left": left.to_string(),
                "right": right.to_string(),
                "conjugate": res.conjugate,
                "inverse": res.inverse,
                "conjugator": conjugator.map(|w| w.to_string()),
                "left_class": kind(&res.left),
                "right_class": kind(&res.right),
            }),
        ),
        Err(e) => TaskResult::new(name, Status::Error, seed, json!({ "error": e.to_string() })),
    }
}

fn kind(c: &serrelab_core::gog::Classification) -> &'static str {
    match c {
        serrelab_core::gog::Classification::Elliptic { .. } => "elliptic",
        serrelab_core::gog::Classification::Hyperbolic { .. } => "hyperbolic",
    }
}

fn conj_in(ws: &Workspace, target: &ConjTarget, name: &str, left: &Word, right: &Word, pm: bool, seed: u64) -> TaskResult {
    match target {
        ConjTarget::Free(_) => conj_free(name, left, right, pm, seed),
        ConjTarget::Graph(g) => conj_graph(&ws.graphs[g], name, left, right, pm, seed),
        ConjTarget::Tower(t) => conj_graph(ws.towers[t].top(), name, left, right, pm, seed),
    }
}

fn conj_command(
    file: Option<&Path>,
    left: &Option<String>,
    right: &Option<String>,
    pm: bool,
    target: &Option<String>,
    task: &Option<String>,
    seed: u64,
) -> TaskResult {
    let name = "conj";
    let ws = match file {
        Some(f) => match load(f, seed) {
            Ok((_, ws)) => Some(ws),
            Err(e) => return e,
        },
        None => None,
    };
    if let (Some(ws), Some(t)) = (&ws, task) {
        return match ws.task(t) {
            Some(rt) if matches!(rt.spec, TaskSpec::Conj { .. }) => run_task(ws, rt, seed),
            _ => TaskResult::input_error(t, seed, json!({ "error": format!("no conj task `{t}`") })),
        };
    }
    let (Some(left), Some(right)) = (left, right) else {
        return TaskResult::input_error(name, seed, json!({ "error": "--left and --right are required" }));
    };
    let exprs = match (dsl::parse_expr(left), dsl::parse_expr(right)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return TaskResult::input_error(name, seed, json!({ "parse_error": parse_error_json(&e) }))
        }
    };
    let target = match &ws {
        None => {
            let mut names = exprs.0.names();
            for n in exprs.1.names() {
                if !names.contains(&n) {
                    names.push(n);
                }
            }
            names.sort();
            match Alphabet::new("F", names) {
                Ok(a) => ConjTarget::Free(a),
                Err(e) => return TaskResult::input_error(name, seed, json!({ "error": e.to_string() })),
            }
        }
        Some(ws) => match resolve_target(ws, target.as_deref()) {
            Ok(t) => t,
            Err(msg) => return TaskResult::input_error(name, seed, json!({ "error": msg })),
        },
    };
    let empty = Workspace::default();
    let ws = ws.as_ref().unwrap_or(&empty);
    let alphabet = ws.target_alphabet(&target);
    let lookup = |n: &str| ws.words.get(n).cloned();
    let words = dsl::eval_expr(&exprs.0, &alphabet, &lookup).and_then(|l| Ok((l, dsl::eval_expr(&exprs.1, &alphabet, &lookup)?)));
    match words {
        Ok((l, r)) => conj_in(ws, &target, name, &l, &r, pm, seed),
        Err(msg) => TaskResult::input_error(name, seed, json!({ "error": msg })),
    }
}

fn resolve_target(ws: &Workspace, name: Option<&str>) -> Result<ConjTarget, String> {
    let named = |n: &str| {
        if let Some(a) = ws.alphabets.get(n) {
            Some(ConjTarget::Free(a.clone()))
        } else if ws.graphs.contains_key(n) {
            Some(ConjTarget::Graph(n.to_string()))
        } else if ws.towers.contains_key(n) {
            Some(ConjTarget::Tower(n.to_string()))
        } else {
            None
        }
    };
    match name {
        Some(n) => named(n).ok_or(format!("no alphabet, graph or tower named `{n}`")),
        None => {
            let mut candidates: Vec<&String> = ws.graphs.keys().chain(ws.towers.keys()).collect();
            candidates.sort();
            match candidates.as_slice() {
                [one] => Ok(named(one).expect("declared")),
                [] if ws.alphabets.len() == 1 => Ok(ConjTarget::Free(ws.alphabets.values().next().expect("one").clone())),
                _ => Err("several possible targets; pick one with --in".to_string()),
            }
        }
    }
}

fn c_double_command(w: &str, file: Option<&Path>, count: usize, pairs: usize, seed: u64) -> TaskResult {
    let name = "verify_c_double";
    let word = match file {
        Some(f) => match load(f, seed) {
            Ok((_, ws)) => match ws.words.get(w) {
                Some(word) => word.clone(),
                None => return TaskResult::input_error(name, seed, json!({ "error": format!("no word `{w}`") })),
            },
            Err(e) => return e,
        },
        None => {
            let base = Alphabet::new("F", ["x", "y"]).expect("alphabet");
            match dsl::parse_word(&base, w) {
                Ok(word) => word,
                Err(e) => return TaskResult::input_error(name, seed, json!({ "parse_error": parse_error_json(&e) })),
            }
        }
    };
    let report = c_double(&word).and_then(|f| verify_c_double(&f, count, pairs, seed));
    match report {
        Ok(r) => TaskResult::new(
            name,
            if r.verified { Status::Verified } else { Status::Refuted },
            seed,
            serde_json::to_value(&r).expect("report"),
        ),
        Err(e) => TaskResult::input_error(name, seed, json!({ "error": e.to_string() })),
    }
}
