//! The `berknash` command line: thin wrappers over the library that read game documents
//! and write certificates, histories, CSV projections and a run manifest.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bundles::{self, ExampleBundle, Params};
use crate::document::{check_document, document_json, read_document};
use crate::dynamics::{self, AppFConfig, OdeState};
use crate::equilibrium::{solve, verify_berk_nash, EquilibriumConfig, PerturbationFamily, PerturbationStructure, Verdict};
use crate::error::{Error, Result};
use crate::format::round_json;
use crate::game::{validate_game, StrategyProfile};
use crate::learning::{
    default_prior, limit_check, read_jsonl, simulate, stability_report, write_csv, write_jsonl, PlayerBelief, Policy,
    SimulationOptions, StabilityConfig,
};
use crate::manifest::{config_hash, sha256_hex};
use crate::subjective::{minimizer_set, MinimizerConfig, SubjectiveModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "berknash", version, about = "Berk-Nash equilibria and learning dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Check a game document for structural problems.
    Validate(Input),
    /// Search for Berk-Nash equilibria and write certificates.
    Solve(SolveArgs),
    /// Verify a strategy profile as a (perturbed) Berk-Nash equilibrium.
    Verify(VerifyArgs),
    /// Simulate repeated play with Bayesian learning.
    Simulate(SimulateArgs),
    /// Aggregate simulated histories against a candidate profile.
    Stability(StabilityArgs),
    /// Steady state, orbit and Lyapunov scan of the monopoly learning ODE.
    Ode(OdeArgs),
    /// Steady states over perturbation scales, or minimizers over a strategy grid.
    Sweep(SweepArgs),
    /// List bundled examples or export one as a game document.
    Example(ExampleArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Output {
    /// Directory for artifacts and the run manifest; without it the main artifact goes to stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Recompute the artifacts and compare them with the manifest in `--out`.
    #[arg(long, requires = "out")]
    #[serde(skip)]
    pub check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Input {
    /// Game document (JSON); `-` reads stdin.
    #[arg(long)]
    pub game: Option<PathBuf>,
    /// Use a bundled example instead of a document.
    #[arg(long, conflicts_with = "game")]
    pub example: Option<String>,
    /// Example parameters, `name=value`.
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// JSON array of subjective models replacing the document's.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: Input,
    /// Largest tolerated optimality violation.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: Input,
    /// Strategy profile `[player][signal][action]` (JSON).
    #[arg(long)]
    pub strategy: PathBuf,
    /// Verify as an equilibrium of the game perturbed at this logistic scale.
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of seeds, `seed, seed+1, …`.
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    /// Horizon.
    #[arg(long = "T", default_value_t = 1000)]
    pub horizon: usize,
    /// Logistic perturbation scale.
    #[arg(long, default_value_t = 0.05)]
    pub scale: f64,
    /// Only this artifact kind; both by default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON array of priors, one per player; uniform over the parameter space by default.
    #[arg(long)]
    pub prior: Option<PathBuf>,
    /// JSON array of policies, one per player; myopic by default.
    #[arg(long)]
    pub policy: Option<PathBuf>,
    /// Trailing window of the CSV action frequency.
    #[arg(long, default_value_t = 1000)]
    pub window: usize,
    /// Grid weights are recorded every this many periods (0: about a thousand snapshots).
    #[arg(long, default_value_t = 0)]
    pub stride: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub input: Input,
    /// JSONL histories written by `simulate`.
    #[arg(required = true)]
    pub histories: Vec<PathBuf>,
    /// Candidate strategy profile (JSON).
    #[arg(long)]
    pub candidate: PathBuf,
    #[arg(long)]
    pub window: usize,
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    /// Radius around the minimizer set for the concentration statistic.
    #[arg(long, default_value_t = 0.1)]
    pub radius: f64,
    /// Perturbation scale of the runs; enables the limit check when every seed is stable.
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct OdeArgs {
    #[arg(long, default_value_t = 0.05)]
    pub scale: f64,
    /// Use normal rather than logistic shocks.
    #[arg(long)]
    pub normal: bool,
    /// Orbit length.
    #[arg(long = "T", default_value_t = 500.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = dynamics::DEFAULT_DT)]
    pub dt: f64,
    #[arg(long, default_value_t = 3.0)]
    pub m0: f64,
    #[arg(long, default_value_t = 5.0)]
    pub r0: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Scan with the identity weight matrix instead of the certified diagonal weights.
    #[arg(long)]
    pub identity: bool,
    /// Orbit rows written every this many steps.
    #[arg(long, default_value_t = 100)]
    pub every: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Perturbation scales, decreasing, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.01, 0.001])]
    pub scale: Vec<f64>,
    /// Sweep minimizers over the strategy grid of this document's single agent instead.
    #[command(flatten)]
    pub input: Input,
    /// Grid points strictly inside (0, 1) for the strategy sweep.
    #[arg(long, default_value_t = 19)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ExampleArgs {
    /// Example name, or `list`.
    pub name: String,
    #[arg(long = "param")]
    pub params: Vec<String>,
    #[command(flatten)]
    pub output: Output,
}

/// Files produced by a command, in write order; the first one goes to stdout when no
/// output directory is given.
struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    config_hash: String,
    seeds: Vec<u64>,
    status: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub started_unix: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub version: String,
    pub outputs: Vec<ManifestEntry>,
    /// Everything that varies between identical invocations lives here.
    pub timing: RunTiming,
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(&round_json(serde_json::to_value(v)?))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn load_input(input: &Input) -> Result<ExampleBundle> {
    let mut doc = match (&input.game, &input.example) {
        (Some(p), _) if p.as_os_str() == "-" => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            read_document(text.as_bytes())?
        }
        (Some(p), _) => read_document(std::fs::File::open(p)?)?,
        (None, Some(name)) => bundles::build(name, &Params::parse(&input.params)?)?,
        (None, None) => return Err(Error::MissingArgument("--game or --example".into())),
    };
    if let Some(path) = &input.model {
        doc.models = read_json::<Vec<SubjectiveModel>>(path)?;
        check_document(&doc)?;
    }
    Ok(doc)
}

fn hash_of(command: &Command, doc: Option<&ExampleBundle>) -> Result<String> {
    config_hash(&json!({ "command": command, "document": doc }))
}

fn run_validate(cmd: &Command, input: &Input) -> Result<Artifacts> {
    // parse without the full document checks so that every problem gets reported
    let doc: ExampleBundle = match (&input.game, &input.example) {
        (Some(p), _) if p.as_os_str() == "-" => serde_json::from_reader(std::io::stdin())?,
        (Some(p), _) => read_json(p)?,
        _ => load_input(input)?,
    };
    let mut diagnostics: Vec<Value> = validate_game(&doc.game).iter().map(|d| json!(d)).collect();
    if diagnostics.is_empty() {
        if let Err(e) = check_document(&doc) {
            diagnostics.push(json!({ "location": "models", "message": e.to_string() }));
        }
    }
    let ok = diagnostics.is_empty();
    for d in &diagnostics {
        eprintln!("{}: {}", d["location"].as_str().unwrap_or(""), d["message"].as_str().unwrap_or(""));
    }
    eprintln!("{}", if ok { "valid" } else { "invalid" });
    Ok(Artifacts {
        files: vec![("validation.json".into(), json_bytes(&json!({ "valid": ok, "diagnostics": diagnostics }))?)],
        config_hash: hash_of(cmd, Some(&doc))?,
        seeds: vec![],
        status: if ok { EXIT_OK } else { EXIT_INVALID },
    })
}

fn equilibrium_config(tol: Option<f64>) -> EquilibriumConfig {
    let mut cfg = EquilibriumConfig::default();
    if let Some(t) = tol {
        cfg.tol_opt = t;
    }
    cfg
}

fn run_solve(cmd: &Command, a: &SolveArgs) -> Result<Artifacts> {
    let doc = load_input(&a.input)?;
    let out = solve(&doc.game, &doc.models, &equilibrium_config(a.tol))?;
    for c in &out.certificates {
        eprintln!("equilibrium {}", serde_json::to_string(&round_json(json!(c.strategy)))?);
    }
    if out.certificates.is_empty() {
        eprintln!("no equilibrium found ({} candidates checked)", out.candidates_checked);
    }
    let status = if out.certificates.is_empty() { EXIT_EMPTY } else { EXIT_OK };
    let body = json!({
        "game": doc.name,
        "certificates": out.certificates,
        "candidates_checked": out.candidates_checked,
        "rejections": out.rejections,
    });
    Ok(Artifacts {
        files: vec![("certificates.json".into(), json_bytes(&body)?)],
        config_hash: hash_of(cmd, Some(&doc))?,
        seeds: vec![],
        status,
    })
}

fn run_verify(cmd: &Command, a: &VerifyArgs) -> Result<Artifacts> {
    let doc = load_input(&a.input)?;
    let sigma: StrategyProfile = read_json(&a.strategy)?;
    let perturbation = a.scale.map(PerturbationStructure::logistic).transpose()?;
    let verdict = verify_berk_nash(&doc.game, &doc.models, &sigma, perturbation.as_ref(), &equilibrium_config(a.tol))?;
    let status = match &verdict {
        Verdict::Accepted(_) => {
            eprintln!("accepted");
            EXIT_OK
        }
        Verdict::Rejected(r) => {
            eprintln!("rejected: player {} signal {} action {} violation {:e}", r.player, r.signal, r.action, r.violation);
            EXIT_INVALID
        }
    };
    Ok(Artifacts {
        files: vec![("verdict.json".into(), json_bytes(&verdict)?)],
        config_hash: hash_of(cmd, Some(&doc))?,
        seeds: vec![],
        status,
    })
}

fn run_simulate(cmd: &Command, a: &SimulateArgs) -> Result<Artifacts> {
    let doc = load_input(&a.input)?;
    let n = doc.game.n_players();
    let priors: Vec<PlayerBelief> = match &a.prior {
        Some(p) => read_json(p)?,
        None => doc.models.iter().map(default_prior).collect::<Result<_>>()?,
    };
    let policies: Vec<Policy> = match &a.policy {
        Some(p) => read_json(p)?,
        None => vec![Policy::Myopic; n],
    };
    let perturbation = PerturbationStructure::logistic(a.scale)?;
    let opts = SimulationOptions { weight_stride: a.stride, ..Default::default() };
    let seeds: Vec<u64> = (0..a.seeds.max(1) as u64).map(|k| a.seed + k).collect();
    let per_seed = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<(String, Vec<u8>)>> {
            let h = simulate(&doc.game, &doc.models, &priors, &policies, Some(&perturbation), a.horizon, seed, &opts)?;
            let mut files = Vec::new();
            if a.format != Some(Format::Csv) {
                let mut buf = Vec::new();
                write_jsonl(&h, &mut buf)?;
                files.push((format!("history_seed{seed}.jsonl"), buf));
            }
            if a.format != Some(Format::Jsonl) {
                let mut buf = Vec::new();
                let focus = doc.game.actions[0].len() - 1;
                write_csv(&h, 0, focus, a.window, &mut buf)?;
                files.push((format!("history_seed{seed}.csv"), buf));
            }
            let last = h.players.iter().map(|p| p.beliefs.mean_at(h.horizon)).collect::<Vec<_>>();
            eprintln!("seed {seed}: final posterior means {}", serde_json::to_string(&round_json(json!(last)))?);
            Ok(files)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut files: Vec<(String, Vec<u8>)> = per_seed.into_iter().flatten().collect();
    if seeds.len() > 1 {
        let index: Vec<Value> = seeds
            .iter()
            .map(|s| {
                let mine: Vec<&String> =
                    files.iter().map(|(p, _)| p).filter(|p| p.starts_with(&format!("history_seed{s}."))).collect();
                json!({ "seed": s, "files": mine })
            })
            .collect();
        files.push(("index.json".into(), json_bytes(&index)?));
    }
    Ok(Artifacts { files, config_hash: hash_of(cmd, Some(&doc))?, seeds, status: EXIT_OK })
}

fn run_stability(cmd: &Command, a: &StabilityArgs) -> Result<Artifacts> {
    let doc = load_input(&a.input)?;
    let candidate: StrategyProfile = read_json(&a.candidate)?;
    let histories = a
        .histories
        .iter()
        .map(|p| read_jsonl(std::io::BufReader::new(std::fs::File::open(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let cfg = StabilityConfig { window: a.window, tol: a.tol, radius: a.radius };
    let report = stability_report(&doc.game, &doc.models, &histories, &candidate, &cfg, &MinimizerConfig::default())?;
    eprintln!("stable in {} of {} seeds", report.seeds.iter().filter(|s| s.stable).count(), report.seeds.len());
    let limit = match a.scale {
        Some(scale) if report.frequency == 1.0 => {
            let p = PerturbationStructure::logistic(scale)?;
            Some(limit_check(&doc.game, &doc.models, &histories, a.window, &p, &EquilibriumConfig::default())?)
        }
        _ => None,
    };
    let seeds = histories.iter().map(|h| h.seed).collect();
    Ok(Artifacts {
        files: vec![("stability.json".into(), json_bytes(&json!({ "report": report, "limit_check": limit }))?)],
        config_hash: hash_of(cmd, Some(&doc))?,
        seeds,
        status: EXIT_OK,
    })
}

fn run_ode(cmd: &Command, a: &OdeArgs) -> Result<Artifacts> {
    let family = if a.normal { PerturbationFamily::Normal } else { PerturbationFamily::Logistic };
    let cfg = AppFConfig { family, scale: a.scale, ..AppFConfig::default() };
    let steady = dynamics::steady_state(&cfg)?;
    let weights = if a.identity { [1.0, 1.0] } else { dynamics::lyapunov_weights(&cfg)? };
    let scan = dynamics::lyapunov_scan(&cfg, a.samples, weights)?;
    let traj = dynamics::integrate(&cfg, OdeState { m: a.m0, r: a.r0 }, a.t_end, a.dt)?;
    let end = traj.last();
    eprintln!("steady state m* = {} r* = {} sigma* = {}", steady.m, steady.r, steady.sigma);
    eprintln!("lyapunov: {} violations in {} samples", scan.violations, scan.samples);
    let mut csv = Vec::new();
    dynamics::write_trajectory_csv(&cfg, &traj, a.every, &mut csv)?;
    let summary = json!({
        "config": cfg,
        "steady_state": steady,
        "limit": dynamics::vanishing_limit(&cfg),
        "lyapunov": scan,
        "orbit": { "start": { "m": a.m0, "r": a.r0 }, "end": end, "aborted": traj.aborted },
    });
    Ok(Artifacts {
        files: vec![("ode.json".into(), json_bytes(&summary)?), ("trajectory.csv".into(), csv)],
        config_hash: hash_of(cmd, None)?,
        seeds: vec![],
        status: EXIT_OK,
    })
}

fn run_sweep(cmd: &Command, a: &SweepArgs) -> Result<Artifacts> {
    if a.input.game.is_none() && a.input.example.is_none() {
        let report = dynamics::scale_sweep(&AppFConfig::default(), &a.scale)?;
        let mut csv = Vec::new();
        dynamics::write_sweep_csv(&report, &mut csv)?;
        eprintln!("limit m = {} sigma = {}; monotone: {}", report.limit.m, report.limit.sigma, report.monotone);
        return Ok(Artifacts {
            files: vec![("sweep.csv".into(), csv), ("sweep.json".into(), json_bytes(&report)?)],
            config_hash: hash_of(cmd, None)?,
            seeds: vec![],
            status: EXIT_OK,
        });
    }
    let doc = load_input(&a.input)?;
    let g = &doc.game;
    if g.n_players() != 1 || g.signals[0].len() != 1 || g.actions[0].len() != 2 {
        return Err(Error::InvalidParams("a strategy sweep needs a single agent with one signal and two actions".into()));
    }
    let label = &g.actions[0][1];
    let mut csv = format!("sigma_{label},k_min,clusters,segment,theta\n").into_bytes();
    for k in 1..=a.grid {
        let p = k as f64 / (a.grid + 1) as f64;
        let sigma = StrategyProfile::single(vec![1.0 - p, p]);
        let ms = minimizer_set(g, &doc.models[0], &sigma, 0, &MinimizerConfig::default())?;
        let theta: Vec<String> = ms.representative().iter().map(|v| crate::format::sig12(*v)).collect();
        writeln!(
            csv,
            "{},{},{},{},{}",
            crate::format::sig12(p),
            crate::format::sig12(ms.minimum),
            ms.points.len(),
            ms.segment,
            theta.join(" ")
        )?;
    }
    Ok(Artifacts {
        files: vec![("sweep.csv".into(), csv)],
        config_hash: hash_of(cmd, Some(&doc))?,
        seeds: vec![],
        status: EXIT_OK,
    })
}

fn run_example(cmd: &Command, a: &ExampleArgs) -> Result<Artifacts> {
    if a.name == "list" {
        let mut text = String::new();
        for name in bundles::list() {
            let b = bundles::build(name, &Params::default())?;
            let first = b.expected.first().map_or(String::new(), |e| e.statement.clone());
            text.push_str(&format!("{name}\t{first}\n"));
        }
        return Ok(Artifacts {
            files: vec![("examples.txt".into(), text.into_bytes())],
            config_hash: hash_of(cmd, None)?,
            seeds: vec![],
            status: EXIT_OK,
        });
    }
    let doc = bundles::build(&a.name, &Params::parse(&a.params)?)?;
    Ok(Artifacts {
        files: vec![(format!("{}.json", a.name), document_json(&doc)?.into_bytes())],
        config_hash: hash_of(cmd, Some(&doc))?,
        seeds: vec![],
        status: EXIT_OK,
    })
}

fn output_of(cmd: &Command) -> &Output {
    match cmd {
        Command::Validate(i) => &i.output,
        Command::Solve(a) => &a.input.output,
        Command::Verify(a) => &a.input.output,
        Command::Simulate(a) => &a.input.output,
        Command::Stability(a) => &a.input.output,
        Command::Ode(a) => &a.output,
        Command::Sweep(a) => &a.input.output,
        Command::Example(a) => &a.output,
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate(_) => "validate",
        Command::Solve(_) => "solve",
        Command::Verify(_) => "verify",
        Command::Simulate(_) => "simulate",
        Command::Stability(_) => "stability",
        Command::Ode(_) => "ode",
        Command::Sweep(_) => "sweep",
        Command::Example(_) => "example",
    }
}

fn execute(cmd: &Command) -> Result<Artifacts> {
    match cmd {
        Command::Validate(i) => run_validate(cmd, i),
        Command::Solve(a) => run_solve(cmd, a),
        Command::Verify(a) => run_verify(cmd, a),
        Command::Simulate(a) => run_simulate(cmd, a),
        Command::Stability(a) => run_stability(cmd, a),
        Command::Ode(a) => run_ode(cmd, a),
        Command::Sweep(a) => run_sweep(cmd, a),
        Command::Example(a) => run_example(cmd, a),
    }
}

fn error_status(e: &Error) -> i32 {
    match e {
        Error::InvalidGame(_)
        | Error::InvalidProfile(_)
        | Error::InvalidModel(_)
        | Error::InvalidBelief(_)
        | Error::InvalidPerturbation(_)
        | Error::InvalidParams(_)
        | Error::InvalidSchedule(_)
        | Error::InvalidWindow(_)
        | Error::UnknownExample(_)
        | Error::MissingArgument(_)
        | Error::Format(_)
        | Error::Json(_) => EXIT_INVALID,
        _ => EXIT_RUNTIME,
    }
}

fn publish(cmd: &Command, arts: &Artifacts, started: SystemTime, clock: Instant) -> Result<i32> {
    let output = output_of(cmd);
    let Some(dir) = &output.out else {
        if let Some((_, bytes)) = arts.files.first() {
            std::io::stdout().write_all(bytes)?;
        }
        return Ok(arts.status);
    };
    let outputs: Vec<ManifestEntry> =
        arts.files.iter().map(|(p, b)| ManifestEntry { path: p.clone(), sha256: sha256_hex(b) }).collect();
    let manifest_path = dir.join("manifest.json");
    if output.check {
        let old: RunManifest = read_json(&manifest_path)?;
        let mut ok = old.config_hash == arts.config_hash;
        if !ok {
            eprintln!("config hash differs: {} vs {}", old.config_hash, arts.config_hash);
        }
        for e in &outputs {
            match old.outputs.iter().find(|o| o.path == e.path) {
                Some(o) if o.sha256 == e.sha256 => {}
                Some(_) => {
                    ok = false;
                    eprintln!("{}: hash differs", e.path);
                }
                None => {
                    ok = false;
                    eprintln!("{}: not in the manifest", e.path);
                }
            }
        }
        for o in &old.outputs {
            match std::fs::read(dir.join(&o.path)) {
                Ok(bytes) if sha256_hex(&bytes) == o.sha256 => {}
                Ok(_) => {
                    ok = false;
                    eprintln!("{}: file on disk does not match the manifest", o.path);
                }
                Err(_) => {
                    ok = false;
                    eprintln!("{}: missing", o.path);
                }
            }
        }
        if old.outputs.len() != outputs.len() {
            ok = false;
            eprintln!("manifest lists {} outputs, run produced {}", old.outputs.len(), outputs.len());
        }
        eprintln!("{}", if ok { "check passed" } else { "check failed" });
        return Ok(if ok { arts.status } else { EXIT_INVALID });
    }
    std::fs::create_dir_all(dir)?;
    for (p, b) in &arts.files {
        std::fs::write(dir.join(p), b)?;
    }
    let manifest = RunManifest {
        command: command_name(cmd).into(),
        config_hash: arts.config_hash.clone(),
        seeds: arts.seeds.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
        outputs,
        timing: RunTiming {
            started_unix: started.duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64()),
            wall_time_s: clock.elapsed().as_secs_f64(),
        },
    };
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(arts.status)
}

/// Run the command line and return the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (started, clock) = (SystemTime::now(), Instant::now());
    match execute(&cli.command).and_then(|arts| publish(&cli.command, &arts, started, clock)) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            error_status(&e)
        }
    }
}
