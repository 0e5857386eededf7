//! Batch front end: configure, run, and export the simulations and
//! validation reports.
//!
//! Exit codes: 0 all gates pass, 2 statistical gate failure, 3 exact
//! identity failure, 64 usage error, 65 enumeration/work budget exceeded,
//! 1 operational failure (I/O and similar).

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use permgraph::graph::{count_cycles, grow_seeded, Snapshot, WorkBudget};
use permgraph::limitproc::{simulate, InitMode, ReplicaSeed, WordSystem};
use permgraph::report::Report;
use permgraph::stats::{
    empirical_tv, graph_vs_limit, limit_covariance_scan, ou_limit_scan, stationarity_scan,
    yule_occupancy_scan, CompareConfig, CovScanConfig, OuScanConfig, PoissonReference,
    StationarityConfig, YuleConfig,
};
use permgraph::words::{
    enumerate_classes, identities, mu_weight, stationary_mean, EnumLimits, WordError,
};

mod config;

use config::{config_hash, FileConfig};

const EXIT_STAT_FAIL: u8 = 2;
const EXIT_IDENTITY_FAIL: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_BUDGET: u8 = 65;

#[derive(Parser, Debug)]
#[command(
    name = "permgraph",
    version,
    about = "Growing random regular graphs: simulations and validation reports"
)]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for replica fan-out (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Master seed; every replica stream derives from it by counter.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate word classes with their statistics; optionally run the
    /// exact identity checks.
    Words(WordsArgs),
    /// Grow one seeded graph trajectory; emit its cycle-count path and/or a
    /// snapshot.
    Grow(GrowArgs),
    /// Simulate the limiting process and run one of its statistical checks.
    Limit(LimitArgs),
    /// Compare graph cycle statistics against the limit-process laws.
    Compare(CompareArgs),
    /// Total-variation scan against the Poisson reference along an n ladder.
    Tvscan(TvscanArgs),
    /// Chebyshev trace covariances along a degree ladder, with a Monte
    /// Carlo cross-check.
    Oulimit(OulimitArgs),
}

#[derive(Args, Debug)]
struct WordsArgs {
    #[arg(short = 'd')]
    d: Option<u16>,
    #[arg(short = 'k')]
    k: Option<usize>,
    /// Run the doubling/halving, doubling-sum, rate, and mean identities up
    /// to length k; nonzero exit on any violation.
    #[arg(long)]
    identities: bool,
    /// Enumeration budget in words.
    #[arg(long)]
    max_words: Option<u64>,
}

#[derive(Args, Debug)]
struct GrowArgs {
    #[arg(short = 'd')]
    d: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Longest cycle length tracked in the path output.
    #[arg(short = 'K')]
    k_max: Option<usize>,
    /// What to write: `paths`, `snapshot`, or `paths,snapshot`.
    #[arg(long)]
    emit: Option<String>,
    /// Resume from a snapshot written by an earlier run with the same seed.
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[arg(short = 'd')]
    d: Option<u16>,
    /// Truncation: chains die above this length.
    #[arg(short = 'L')]
    trunc: Option<usize>,
    #[arg(short = 'T')]
    horizon: Option<f64>,
    /// stationarity | covariance | yule
    #[arg(long)]
    check: Option<String>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Longest word length read out by the stationarity check.
    #[arg(long)]
    obs_cap: Option<usize>,
    /// Also export one replica's trajectory as CSV.
    #[arg(long)]
    emit_path: bool,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(short = 'd')]
    d: Option<usize>,
    #[arg(short = 'K')]
    k_max: Option<usize>,
    /// Warm-up horizon before statistics are read.
    #[arg(short = 's')]
    warmup: Option<f64>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Read-out offsets after the warm-up, comma separated.
    #[arg(long, value_delimiter = ',')]
    t_offsets: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct TvscanArgs {
    #[arg(short = 'd')]
    d: Option<u64>,
    #[arg(short = 'r')]
    r: Option<usize>,
    /// Graph sizes, comma separated.
    #[arg(long = "n", value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    replicas: Option<u64>,
}

#[derive(Args, Debug)]
struct OulimitArgs {
    #[arg(long, value_delimiter = ',')]
    d_list: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<u32>>,
    #[arg(short = 's')]
    s: Option<f64>,
    #[arg(short = 't')]
    t: Option<f64>,
    /// Degree for the Monte Carlo cross-check (omit to skip it).
    #[arg(long)]
    mc_d: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Relative tolerance for the diagonal at the top of the ladder.
    #[arg(long)]
    diag_tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            // Help and version requests are not usage errors.
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if matches!(e.downcast_ref::<WordError>(), Some(WordError::BudgetExceeded { .. }))
                || matches!(
                    e.downcast_ref::<permgraph::graph::GraphError>(),
                    Some(permgraph::graph::GraphError::WorkBudget { .. })
                )
            {
                eprintln!("budget exceeded: {e}");
                return ExitCode::from(EXIT_BUDGET);
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

struct Env {
    seed: u64,
    out_dir: PathBuf,
    file: FileConfig,
}

impl Env {
    fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn write_report(&self, name: &str, report: &Report) -> anyhow::Result<()> {
        print!("{}", report.render_text());
        let path = self.out_path(name);
        std::fs::write(&path, report.to_json())
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

fn gate_exit(report: &Report) -> ExitCode {
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_STAT_FAIL)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let file = match &cli.config {
        Some(path) => config::load(path)?,
        None => FileConfig::default(),
    };

    // The environment may override only the output directory and thread
    // count; explicit flags still win.
    let threads = cli
        .threads
        .or_else(|| std::env::var("PERMGRAPH_THREADS").ok().and_then(|v| v.parse().ok()))
        .or(file.threads);
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("building worker pool")?;
    }
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var("PERMGRAPH_OUT_DIR").ok().map(PathBuf::from))
        .or_else(|| file.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let env = Env { seed, out_dir, file };

    match cli.command {
        Command::Words(args) => cmd_words(&env, args),
        Command::Grow(args) => cmd_grow(&env, args),
        Command::Limit(args) => cmd_limit(&env, args),
        Command::Compare(args) => cmd_compare(&env, args),
        Command::Tvscan(args) => cmd_tvscan(&env, args),
        Command::Oulimit(args) => cmd_oulimit(&env, args),
    }
}

fn cmd_words(env: &Env, args: WordsArgs) -> anyhow::Result<ExitCode> {
    let sect = &env.file.words;
    let d = args.d.or(sect.u64("d").map(|v| v as u16)).unwrap_or(2);
    let k = args.k.or(sect.usize("k")).unwrap_or(3);
    let limits = EnumLimits {
        max_words: args
            .max_words
            .or(sect.u64("max_words"))
            .map(|v| v as u128)
            .unwrap_or(EnumLimits::default().max_words),
    };

    let classes = enumerate_classes(d, k, limits)?;
    println!("{:<24} {:>3} {:>3} {:>8} {:>8}", "class", "h", "c", "mu", "mean");
    let mut mu_total = permgraph::words::Rational::new(0, 1);
    for cl in &classes {
        let mu = mu_weight(cl);
        mu_total += mu;
        println!(
            "{:<24} {:>3} {:>3} {:>8} {:>8}",
            cl.to_string(),
            cl.h(),
            cl.c(),
            mu.to_string(),
            stationary_mean(cl).to_string()
        );
    }
    println!("-- {} classes, mu total {}", classes.len(), mu_total);

    if args.identities {
        for dd in 1..=d {
            if let Err(e) = identities::check_all(dd, k, limits) {
                eprintln!("identity violation: {e}");
                return Ok(ExitCode::from(EXIT_IDENTITY_FAIL));
            }
        }
        println!("identities: all exact checks pass for d <= {d}, k <= {k}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_grow(env: &Env, args: GrowArgs) -> anyhow::Result<ExitCode> {
    let sect = &env.file.grow;
    let d = args.d.or(sect.usize("d")).unwrap_or(2);
    let t_end = args.t_end.or(sect.f64("t_end")).unwrap_or(5.0);
    let k_max = args.k_max.or(sect.usize("k_max")).unwrap_or(4);
    let emit = args.emit.or(sect.string("emit")).unwrap_or_else(|| "paths".into());
    let budget = WorkBudget::default();

    let (state, events) = match &args.resume {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading snapshot {}", path.display()))?;
            let snap: Snapshot = serde_json::from_str(&text).context("parsing snapshot")?;
            let mut state = snap.restore()?;
            let events = permgraph::graph::grow_seeded_continue(env.seed, 0, &mut state, t_end);
            (state, events)
        }
        None => {
            let (state, _clock, events) = grow_seeded(env.seed, 0, d, t_end);
            (state, events)
        }
    };
    println!("grew to n = {} by t = {t_end} ({} new insertions)", state.n(), events.len());

    for what in emit.split(',') {
        match what.trim() {
            "paths" => {
                let path = env.out_path("grow_path.csv");
                let mut w = csv::Writer::from_path(&path)
                    .with_context(|| format!("opening {}", path.display()))?;
                w.write_record(["t", "k", "c_k"])?;
                // Replay the whole trajectory from scratch so the path file
                // covers [0, t_end] even after a resume.
                let mut replay = permgraph::graph::GraphState::new(d);
                let all_events =
                    permgraph::graph::grow_seeded(env.seed, 0, d, t_end).2;
                let write_counts =
                    |t: f64, st: &permgraph::graph::GraphState, w: &mut csv::Writer<std::fs::File>| -> anyhow::Result<()> {
                        let counts = count_cycles(st, k_max, budget)?.by_length();
                        for k in 1..=k_max {
                            w.write_record(&[
                                format!("{t}"),
                                format!("{k}"),
                                format!("{}", counts.get(&k).copied().unwrap_or(0)),
                            ])?;
                        }
                        Ok(())
                    };
                write_counts(0.0, &replay, &mut w)?;
                for ev in &all_events {
                    permgraph::graph::grow_seeded_continue(env.seed, 0, &mut replay, ev.time);
                    write_counts(ev.time, &replay, &mut w)?;
                }
                w.flush()?;
                println!("wrote {}", path.display());
            }
            "snapshot" => {
                let path = env.out_path("grow_snapshot.json");
                let snap = state.snapshot(t_end);
                std::fs::write(&path, serde_json::to_string_pretty(&snap)?)
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("wrote {}", path.display());
            }
            other => anyhow::bail!("unknown emit target {other:?} (use paths, snapshot)"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_limit(env: &Env, args: LimitArgs) -> anyhow::Result<ExitCode> {
    let sect = &env.file.limit;
    let d = args.d.or(sect.u64("d").map(|v| v as u16)).unwrap_or(2);
    let trunc = args.trunc.or(sect.usize("trunc")).unwrap_or(12);
    let horizon = args.horizon.or(sect.f64("horizon")).unwrap_or(2.0);
    let check = args.check.or(sect.string("check")).unwrap_or_else(|| "stationarity".into());
    let replicas = args.replicas.or(sect.u64("replicas")).unwrap_or(20_000);
    let obs_cap = args.obs_cap.or(sect.usize("obs_cap")).unwrap_or(3).min(trunc);

    if args.emit_path {
        let sys = Arc::new(WordSystem::new(d, obs_cap, EnumLimits::default())?);
        let path =
            simulate(&sys, trunc, horizon, ReplicaSeed::new(env.seed, 0), InitMode::Stationary)?;
        let csv_path = env.out_path("limit_path.csv");
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(["replica", "t", "word", "count"])?;
        let mut times = vec![0.0];
        times.extend(path.jump_times());
        for &t in times.iter().filter(|&&t| t <= horizon) {
            for (class, count) in path.counts_at(t)?.iter() {
                w.write_record(&[
                    "0".to_string(),
                    format!("{t}"),
                    class.to_string(),
                    count.to_string(),
                ])?;
            }
        }
        w.flush()?;
        println!("wrote {}", csv_path.display());
    }

    let hash = config_hash(&(d, trunc, horizon, &check, replicas, obs_cap));
    let mut report = Report::new(format!("limit --check {check}"), env.seed, hash);
    match check.as_str() {
        "stationarity" => {
            let cfg = StationarityConfig {
                d,
                trunc,
                obs_cap,
                times: vec![0.0, horizon.min(1.0)],
                replicas,
                master: env.seed,
            };
            stationarity_scan(&cfg, &mut report)?;
        }
        "covariance" => {
            let cfg = CovScanConfig {
                d,
                k_max: obs_cap.max(4),
                deltas: vec![0.25, horizon.min(1.0)],
                replicas,
                master: env.seed,
                spot_checks: vec![(1, 2, 2f64.ln())],
            };
            limit_covariance_scan(&cfg, &mut report)?;
        }
        "yule" => {
            let cfg = YuleConfig {
                j_list: vec![1, 2, 3],
                k_max: 8,
                deltas: vec![0.5, 1.0],
                chains: replicas,
                master: env.seed,
            };
            yule_occupancy_scan(&cfg, &mut report)?;
        }
        other => anyhow::bail!("unknown check {other:?} (use stationarity, covariance, yule)"),
    }
    env.write_report("limit_report.json", &report)?;
    Ok(gate_exit(&report))
}

fn cmd_compare(env: &Env, args: CompareArgs) -> anyhow::Result<ExitCode> {
    let sect = &env.file.compare;
    let cfg = CompareConfig {
        d: args.d.or(sect.usize("d")).unwrap_or(2),
        k_max: args.k_max.or(sect.usize("k_max")).unwrap_or(3),
        s: args.warmup.or(sect.f64("s")).unwrap_or(8.0),
        t_offsets: args.t_offsets.unwrap_or_else(|| vec![0.0]),
        replicas: args.replicas.or(sect.u64("replicas")).unwrap_or(10_000),
        master: env.seed,
    };
    let hash = config_hash(&(cfg.d, cfg.k_max, cfg.s, &cfg.t_offsets, cfg.replicas));
    let mut report = Report::new("compare graph vs limit", env.seed, hash);
    graph_vs_limit(&cfg, &mut report)?;
    env.write_report("compare_report.json", &report)?;
    Ok(gate_exit(&report))
}

fn cmd_tvscan(env: &Env, args: TvscanArgs) -> anyhow::Result<ExitCode> {
    use rayon::prelude::*;
    use std::collections::BTreeMap;
    let sect = &env.file.tvscan;
    let d = args.d.or(sect.u64("d")).unwrap_or(2);
    let r = args.r.or(sect.usize("r")).unwrap_or(2);
    let sizes = args.sizes.unwrap_or_else(|| vec![50, 100, 200, 400]);
    let replicas = args.replicas.or(sect.u64("replicas")).unwrap_or(100_000);

    let reference = PoissonReference::aggregated(d, r)?;
    let budget = WorkBudget::default();
    let csv_path = env.out_path("tvscan.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["n", "tv", "stderr", "bound_shape", "replicas"])?;
    let mut estimates = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let cells: BTreeMap<Vec<u64>, u64> = (0..replicas)
            .into_par_iter()
            .fold(BTreeMap::new, |mut acc: BTreeMap<Vec<u64>, u64>, rep| {
                let mut rng =
                    permgraph::seed::replica_rng(env.seed ^ ((i as u64) << 32), rep);
                let state =
                    permgraph::graph::GraphState::sample_uniform(n, d as usize, &mut rng);
                let by_len = count_cycles(&state, r, budget).expect("within budget").by_length();
                let cell: Vec<u64> =
                    (1..=r).map(|k| by_len.get(&k).copied().unwrap_or(0)).collect();
                *acc.entry(cell).or_insert(0) += 1;
                acc
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            });
        let mut rng = permgraph::seed::replica_rng(env.seed ^ 0x7553_c4a9, i as u64);
        let (tv, se) = empirical_tv(&cells, replicas, &reference, 10, 200, &mut rng)?;
        let shape = permgraph::stats::bound_shape(d, r, n);
        println!("n={n}: TV {tv:.5} ± {se:.5} (bound shape {shape:.4})");
        w.write_record(&[
            n.to_string(),
            format!("{tv}"),
            format!("{se}"),
            format!("{shape}"),
            replicas.to_string(),
        ])?;
        estimates.push(tv);
    }
    w.flush()?;
    println!("wrote {}", csv_path.display());

    let decreasing = estimates.windows(2).all(|p| p[1] < p[0]);
    println!("decay: {}", if decreasing { "monotone decreasing" } else { "NOT monotone" });
    Ok(if decreasing { ExitCode::SUCCESS } else { ExitCode::from(EXIT_STAT_FAIL) })
}

fn cmd_oulimit(env: &Env, args: OulimitArgs) -> anyhow::Result<ExitCode> {
    let sect = &env.file.oulimit;
    let cfg = OuScanConfig {
        d_list: args.d_list.unwrap_or_else(|| vec![2, 5, 10, 20, 50]),
        k_list: args.k_list.unwrap_or_else(|| vec![1, 2, 3]),
        s: args.s.or(sect.f64("s")).unwrap_or(1.0),
        t: args.t.or(sect.f64("t")).unwrap_or(1.0),
        mc_d: args.mc_d,
        replicas: args.replicas.or(sect.u64("replicas")).unwrap_or(20_000),
        master: env.seed,
        diag_tolerance: args.diag_tol.or(sect.f64("diag_tol")).unwrap_or(0.05),
    };
    anyhow::ensure!(cfg.s <= cfg.t, "need s <= t");
    let hash = config_hash(&(&cfg.d_list, &cfg.k_list, cfg.s, cfg.t, cfg.mc_d, cfg.replicas));
    let mut report = Report::new("oulimit trace covariances", env.seed, hash);
    ou_limit_scan(&cfg, &mut report)?;
    env.write_report("oulimit_report.json", &report)?;
    Ok(gate_exit(&report))
}
