use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use rayon::prelude::*;
use underlay_core::beliefs::trace::write_slot;
use underlay_core::config::{db_to_linear, SuGainSensing};
use underlay_core::engine::{Engine, RunOutput, Tolerances, TraceWriter};
use underlay_core::{selftest, CsiVariant, ScenarioConfig, Scheme};

/// Underlay cognitive-radio resource allocation simulator.
#[derive(Parser)]
#[command(name = "underlay", version)]
struct Cli {
    /// Worker threads for sweeps and oracle suites (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write the metrics trace.
    Simulate(SimulateArgs),
    /// Run a grid of (parameter value, scheme, seed) and write one row per run.
    Sweep(SweepArgs),
    /// Run the oracle suites.
    Selftest {
        /// Reduced sample counts.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args)]
struct Overrides {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Horizon N in slots.
    #[arg(long)]
    horizon: Option<usize>,
    /// CSI variant: optimal, i, ii or iii.
    #[arg(long)]
    csi_variant: Option<CsiVariant>,
}

impl Overrides {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::from_path(&self.config)
            .with_context(|| format!("cannot load config `{}`", self.config.display()))?;
        if let Some(n) = self.horizon {
            cfg.horizon = n;
        }
        if let Some(v) = self.csi_variant {
            cfg.csi_variant = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Overrides,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    seed: Option<u64>,
    /// Metrics trace CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace row period in slots.
    #[arg(long, default_value_t = 100)]
    trace_every: usize,
    /// JSON copy of the summary.
    #[arg(long)]
    summary_json: Option<PathBuf>,
    /// Line-delimited belief dump (large).
    #[arg(long)]
    belief_trace: Option<PathBuf>,
    /// Exit nonzero if any constraint is violated beyond tolerance.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Overrides,
    /// One of h1_avg_db, gamma_db, p_check_1, eps_check, quant_levels.
    #[arg(long)]
    param: SweepParam,
    /// Comma-separated values; `inf` means perfect sensing for quant_levels.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    values: Vec<String>,
    /// Comma-separated schemes.
    #[arg(long, value_delimiter = ',', default_value = "APC")]
    schemes: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    /// Result CSV.
    #[arg(long)]
    out: PathBuf,
    /// JSON copy of the rows.
    #[arg(long)]
    summary_json: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
enum SweepParam {
    H1AvgDb,
    GammaDb,
    PCheck1,
    EpsCheck,
    QuantLevels,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::H1AvgDb => "h1_avg_db",
            SweepParam::GammaDb => "gamma_db",
            SweepParam::PCheck1 => "p_check_1",
            SweepParam::EpsCheck => "eps_check",
            SweepParam::QuantLevels => "quant_levels",
        }
    }

    fn apply(self, cfg: &mut ScenarioConfig, value: &str) -> Result<()> {
        if let SweepParam::QuantLevels = self {
            cfg.sensing.su_gain = if value.eq_ignore_ascii_case("inf") {
                SuGainSensing::Perfect
            } else {
                let levels = value
                    .parse()
                    .with_context(|| format!("bad quantizer level count `{value}`"))?;
                SuGainSensing::Quantized {
                    levels,
                    thresholds: None,
                }
            };
            return Ok(());
        }
        let x: f64 = value
            .parse()
            .with_context(|| format!("bad {} value `{value}`", self.name()))?;
        match self {
            SweepParam::H1AvgDb => cfg.avg_gain_sp.iter_mut().for_each(|h| *h = db_to_linear(x)),
            SweepParam::GammaDb => cfg.pu_snr.iter_mut().for_each(|g| *g = db_to_linear(x)),
            SweepParam::PCheck1 => cfg.max_interference.iter_mut().for_each(|p| *p = x),
            SweepParam::EpsCheck => cfg.max_capacity_loss.iter_mut().for_each(|e| *e = x),
            SweepParam::QuantLevels => unreachable!(),
        }
        Ok(())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create `{}`", path.display()))?;
    Ok(BufWriter::new(f))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into())
}

fn print_summary(out: &RunOutput, tol: &Tolerances) {
    let s = out.summary(tol);
    println!("scheme        {} (csi {})", s.scheme, s.csi_variant);
    println!("seed          {}", s.seed);
    println!("horizon       {} (burn-in {})", s.horizon, s.burn_in);
    println!("c2_avg        {}", fmt_opt(s.c2_avg));
    println!("p1_mean       {}", fmt_opt(s.p1_mean));
    println!("eps1_avg      {}", fmt_opt(s.eps1_avg));
    println!("clamp_hits    {}", s.clamp_hits);
    println!("rate_infeasible_slots {}", s.rate_infeasible_slots);
    println!(
        "{:<16} {:>9} {:>10} {:>10} {:>9} {:>8}",
        "constraint", "targeted", "limit", "realized", "slack", "status"
    );
    for c in &s.feasibility.checks {
        println!(
            "{:<16} {:>9} {:>10.5} {:>10} {:>9} {:>8}",
            c.constraint,
            c.targeted,
            c.limit,
            fmt_opt(c.realized),
            c.slack.map(|v| format!("{v:+.5}")).unwrap_or_else(|| "-".into()),
            if c.violated { "VIOLATED" } else { "ok" }
        );
    }
    println!("feasible      {}", s.feasibility.feasible);
}

fn simulate(args: SimulateArgs) -> Result<ExitCode> {
    let mut cfg = args.common.load()?;
    if let Some(s) = args.scheme {
        cfg.scheme = s;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    info!("running {} seed {} for {} slots", cfg.scheme, cfg.seed, cfg.horizon);

    let mut trace = match &args.out {
        Some(p) => Some(TraceWriter::new(create(p)?, cfg.num_sus, cfg.num_channels)?),
        None => None,
    };
    let mut beliefs = args.belief_trace.as_deref().map(create).transpose()?;
    let every = args.trace_every.max(1);
    let mut engine = Engine::new(&cfg)?;
    engine.run_with(|e, slot| {
        let n = slot.truth.slot;
        if let Some(t) = trace.as_mut() {
            if n % every == 0 || e.finished() {
                t.write(&e.trace_row())?;
            }
        }
        if let Some(b) = beliefs.as_mut() {
            write_slot(b, n, &slot.beliefs, cfg.num_sus)?;
        }
        Ok(())
    })?;
    if let Some(t) = trace {
        t.finish()?;
    }
    if let Some(mut b) = beliefs {
        b.flush()?;
    }

    let out = engine.into_output();
    let tol = Tolerances::default();
    print_summary(&out, &tol);
    if let Some(p) = &args.summary_json {
        let mut w = create(p)?;
        serde_json::to_writer_pretty(&mut w, &out.summary(&tol))?;
        w.flush()?;
    }
    if args.strict && !out.report(&tol).feasible {
        let names: Vec<_> = out.report(&tol).violations().map(|c| c.constraint.clone()).collect();
        eprintln!("error: constraints violated beyond tolerance: {}", names.join(", "));
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(serde::Serialize)]
struct SweepRow {
    parameter: &'static str,
    value: String,
    scheme: String,
    seed: u64,
    c2_avg: Option<f64>,
    p1_mean: Option<f64>,
    eps1_avg: Option<f64>,
    p2_avg_mean: Option<f64>,
    feasible: bool,
}

fn sweep(args: SweepArgs) -> Result<ExitCode> {
    if args.values.is_empty() || args.seeds.is_empty() {
        bail!(Usage("sweep needs at least one value and one seed".into()));
    }
    let schemes: Vec<Scheme> = args
        .schemes
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse())
        .collect::<std::result::Result<_, _>>()?;
    if schemes.is_empty() {
        bail!(Usage("scheme list is empty".into()));
    }
    let base = args.common.load()?;
    let mut jobs = Vec::new();
    for v in &args.values {
        let mut cfg = base.clone();
        args.param.apply(&mut cfg, v.trim())?;
        for &scheme in &schemes {
            for &seed in &args.seeds {
                let mut c = cfg.clone();
                c.scheme = scheme;
                c.seed = seed;
                c.validate()?;
                jobs.push((v.trim().to_string(), c));
            }
        }
    }
    info!("sweep over {} runs", jobs.len());

    let tol = Tolerances::default();
    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|(value, cfg)| -> Result<SweepRow> {
            let out = underlay_core::engine::run(cfg)?;
            let m = &out.reported;
            let p2: Vec<f64> = (0..cfg.num_sus).filter_map(|i| m.p2_avg(i)).collect();
            Ok(SweepRow {
                parameter: args.param.name(),
                value: value.clone(),
                scheme: cfg.scheme.name().into(),
                seed: cfg.seed,
                c2_avg: m.c2_avg(),
                p1_mean: m.p1_mean(),
                eps1_avg: m.eps1_avg(),
                p2_avg_mean: (!p2.is_empty()).then(|| p2.iter().sum::<f64>() / p2.len() as f64),
                feasible: out.report(&tol).feasible,
            })
        })
        .collect::<Result<_>>()?;

    let mut w = csv::Writer::from_writer(create(&args.out)?);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    if let Some(p) = &args.summary_json {
        let mut f = create(p)?;
        serde_json::to_writer_pretty(&mut f, &rows)?;
        f.flush()?;
    }
    for r in &rows {
        println!(
            "{}={} {} seed {}: c2 {}",
            r.parameter,
            r.value,
            r.scheme,
            r.seed,
            fmt_opt(r.c2_avg)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run_selftest(quick: bool) -> ExitCode {
    let reports = selftest::run(quick);
    for r in &reports {
        println!(
            "{} {:<28} cases {:>7} worst {:.3e} tolerance {:.1e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.cases,
            r.worst,
            r.tolerance
        );
    }
    if selftest::all_passed(&reports) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let res = match cli.cmd {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Selftest { quick } => Ok(run_selftest(quick)),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
