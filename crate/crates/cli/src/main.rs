//! `sfsched`: runs scheduler scenarios from a TOML config and writes
//! plot-ready CSVs, a JSON summary and a reproducibility manifest.
//!
//! Exit codes: 0 success, 1 runtime or I/O failure, 2 bad invocation
//! (including refusing to overwrite an output directory), 3 invalid config.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use sfsched::channel::{write_channel_dump, write_channel_dump_header};
use sfsched::scheduling::{write_assignment_header, write_assignment_records};
use sfsched::simulation::{
    complexity_probe, rate_histogram, region_sweep, run_resolved, sweep_users,
    write_complexity_csv, write_histogram_csv, write_region_csv, write_region_upa_csv,
    write_sweep_csv, write_trace_csv, PowerPolicy, Scenario, ScenarioConfig, SlotObserver,
    SlotView, TimingRow,
};

#[derive(Parser, Debug)]
#[command(name = "sfsched", version, about = "OFDMA MIMO broadcast scheduler simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and write its per-slot trace.
    Run {
        #[command(flatten)]
        common: Common,
        /// Use uniform power allocation instead of waterfilling.
        #[arg(long)]
        upa: bool,
    },
    /// Sum rate and class-2 rate versus the number of users.
    Sweep(Common),
    /// Two-user rate region plus the uniform-power point.
    Region(Common),
    /// Per-stage timings across modes, user and antenna counts.
    Complexity(Common),
    /// Parse and validate a config without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if absent.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Allow writing into a non-empty output directory.
    #[arg(long)]
    force: bool,
    /// Worker threads for independent runs (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Only log errors.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<sfsched::Error> for Failure {
    fn from(e: sfsched::Error) -> Self {
        match e {
            sfsched::Error::Config { .. } | sfsched::Error::Parse(_) => Failure::Config(e.into()),
            other => Failure::Runtime(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Config text plus its parsed form, with the seed override applied.
struct Loaded {
    path: PathBuf,
    text: String,
    config: ScenarioConfig,
}

fn load(path: &Path, seed: Option<u64>) -> Outcome<Loaded> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .map_err(Failure::Usage)?;
    let mut config = ScenarioConfig::from_toml_str(&text)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(Loaded {
        path: path.to_path_buf(),
        text,
        config,
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects artifacts and writes them from a single place.
struct Artifacts {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Artifacts {
    fn prepare(dir: &Path, force: bool) -> Outcome<Self> {
        if dir.exists() {
            let nonempty = fs::read_dir(dir)?.next().is_some();
            if nonempty && !force {
                return Err(Failure::Usage(anyhow!(
                    "output directory {} is not empty; pass --force to overwrite",
                    dir.display()
                )));
            }
        } else {
            fs::create_dir_all(dir)?;
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write<F>(&mut self, name: &str, fill: F) -> Outcome<()>
    where
        F: FnOnce(&mut Vec<u8>) -> sfsched::Result<()>,
    {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        fs::write(self.dir.join(name), &buf).with_context(|| format!("writing {name}"))?;
        self.files.push((name.to_string(), sha256_hex(&buf)));
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Outcome<()> {
        let text = serde_json::to_string_pretty(value).map_err(anyhow::Error::from)?;
        self.write(name, |b| {
            b.extend_from_slice(text.as_bytes());
            b.push(b'\n');
            Ok(())
        })
    }

    /// Files listed here are content-hashed in the manifest; anything written
    /// afterwards (timings) is not.
    fn finish(&mut self, command: &str, loaded: &Loaded, threads: Option<usize>) -> Outcome<()> {
        let manifest = json!({
            "tool": "sfsched",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config_path": loaded.path.display().to_string(),
            "config_sha256": sha256_hex(loaded.text.as_bytes()),
            "config": loaded.text,
            "seed": loaded.config.seed,
            "threads": threads,
            "files": self.files.iter().map(|(n, h)| json!({"name": n, "sha256": h})).collect::<Vec<_>>(),
        });
        let text = serde_json::to_string_pretty(&manifest).map_err(anyhow::Error::from)?;
        fs::write(self.dir.join("manifest.json"), text + "\n").context("writing manifest.json")?;
        Ok(())
    }
}

/// Streams channel and assignment dumps for the first few frames.
struct Dumps {
    channel_frames: usize,
    assignment_frames: usize,
    channel: Option<BufWriter<File>>,
    assignments: Option<BufWriter<File>>,
}

impl Dumps {
    fn open(dir: &Path, s: &Scenario, channel_frames: usize, assignment_frames: usize) -> Outcome<Self> {
        let mut channel = None;
        if channel_frames > 0 {
            let mut w = BufWriter::new(File::create(dir.join("channel_dump.csv"))?);
            write_channel_dump_header(&mut w, s.antennas)?;
            channel = Some(w);
        }
        let mut assignments = None;
        if assignment_frames > 0 {
            let mut w = BufWriter::new(File::create(dir.join("assignments.csv"))?);
            write_assignment_header(&mut w)?;
            assignments = Some(w);
        }
        Ok(Self {
            channel_frames,
            assignment_frames,
            channel,
            assignments,
        })
    }

    fn close(self) -> std::io::Result<()> {
        for mut w in [self.channel, self.assignments].into_iter().flatten() {
            w.flush()?;
        }
        Ok(())
    }
}

impl SlotObserver for Dumps {
    fn on_slot(&mut self, view: &SlotView<'_>) -> sfsched::Result<()> {
        if let Some(w) = self.channel.as_mut().filter(|_| view.slot < self.channel_frames) {
            write_channel_dump(w, view.slot as u64, view.channel)?;
        }
        if let Some(w) = self.assignments.as_mut().filter(|_| view.slot < self.assignment_frames) {
            write_assignment_records(w, view.slot as u64, view.assignment)?;
        }
        Ok(())
    }
}

fn cmd_run(common: &Common, upa: bool) -> Outcome<()> {
    let loaded = load(&common.config, common.seed)?;
    let scenario = loaded.config.resolve()?;
    let mut out = Artifacts::prepare(&common.out, common.force)?;
    let o = &loaded.config.output;
    let mut dumps = Dumps::open(&out.dir, &scenario, o.dump_channel_frames, o.dump_assignment_frames)?;
    let policy = if upa { PowerPolicy::Uniform } else { PowerPolicy::Waterfilling };
    let result = run_resolved(&scenario, policy, &mut dumps)?;
    dumps.close()?;
    let hist = rate_histogram(&result, &scenario.classes, o.histogram_bins)?;

    out.write("trace.csv", |b| write_trace_csv(b, &result.series))?;
    out.write("histogram.csv", |b| write_histogram_csv(b, &hist))?;
    out.write_json(
        "summary.json",
        &json!({
            "power_allocation": if upa { "uniform" } else { "waterfilling" },
            "users": scenario.users,
            "slots": scenario.slots,
            "p_bar": scenario.p_bar,
            "phi": scenario.phi,
            "classes": scenario.classes,
            "summary": result.summary,
            "class_stats": hist.classes,
        }),
    )?;
    out.finish("run", &loaded, common.threads)?;
    out.write_json("timings.json", &result.timings)?;
    log::info!(
        "sum rate {:.4}, mean power {:.4} (target {:.4})",
        result.summary.mean_sum_rate,
        result.summary.mean_power,
        scenario.p_bar
    );
    Ok(())
}

fn cmd_sweep(common: &Common) -> Outcome<()> {
    let loaded = load(&common.config, common.seed)?;
    let users = loaded
        .config
        .sweep
        .as_ref()
        .map(|s| s.users.clone())
        .ok_or_else(|| Failure::Config(anyhow!("config field `sweep.users`: required for sweep")))?;
    loaded.config.resolve()?;
    let mut out = Artifacts::prepare(&common.out, common.force)?;
    let rows = sweep_users(&loaded.config, &users)?;
    out.write("sweep.csv", |b| write_sweep_csv(b, &rows))?;
    out.write_json("summary.json", &json!({ "rows": rows }))?;
    out.finish("sweep", &loaded, common.threads)
}

fn cmd_region(common: &Common) -> Outcome<()> {
    let loaded = load(&common.config, common.seed)?;
    loaded.config.resolve()?;
    let points = loaded.config.region.as_ref().map_or(21, |r| r.points);
    let mut out = Artifacts::prepare(&common.out, common.force)?;
    let region = region_sweep(&loaded.config, points)?;
    out.write("region.csv", |b| write_region_csv(b, &region))?;
    out.write("region_upa.csv", |b| write_region_upa_csv(b, &region))?;
    out.write_json("summary.json", &region)?;
    out.finish("region", &loaded, common.threads)
}

/// Scheduling-stage time ratios derived from the timing table.
fn scaling_ratios(rows: &[TimingRow]) -> serde_json::Value {
    let time = |mode: &str, k: usize, n: usize| {
        rows.iter()
            .find(|r| r.mode == mode && r.users == k && r.antennas == n && r.stage == "scheduling")
            .map(|r| r.seconds)
    };
    let mut per_k = Vec::new();
    let mut dynamic_over_full = Vec::new();
    let mut seen = Vec::new();
    for r in rows.iter().filter(|r| r.stage == "scheduling") {
        if seen.contains(&(r.mode.clone(), r.antennas)) {
            continue;
        }
        seen.push((r.mode.clone(), r.antennas));
        let ks: Vec<usize> = rows
            .iter()
            .filter(|x| x.mode == r.mode && x.antennas == r.antennas && x.stage == "scheduling")
            .map(|x| x.users)
            .collect();
        let (lo, hi) = (ks.iter().min().copied(), ks.iter().max().copied());
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if let (Some(a), Some(b)) = (time(&r.mode, lo, r.antennas), time(&r.mode, hi, r.antennas)) {
                per_k.push(json!({"mode": r.mode, "N_T": r.antennas, "K_from": lo, "K_to": hi, "ratio": b / a}));
            }
        }
        if r.mode == "dynamic" {
            if let (Some(d), Some(f)) = (time("dynamic", r.users, r.antennas), time("full", r.users, r.antennas)) {
                dynamic_over_full.push(json!({"K": r.users, "N_T": r.antennas, "ratio": d / f}));
            }
        }
    }
    json!({ "scheduling_k_scaling": per_k, "dynamic_over_full": dynamic_over_full })
}

fn cmd_complexity(common: &Common) -> Outcome<()> {
    let loaded = load(&common.config, common.seed)?;
    let probe = loaded
        .config
        .complexity
        .clone()
        .ok_or_else(|| Failure::Config(anyhow!("config field `complexity`: required for complexity")))?;
    let mut out = Artifacts::prepare(&common.out, common.force)?;
    let rows = complexity_probe(&loaded.config, &probe)?;
    out.finish("complexity", &loaded, common.threads)?;
    // Wall-clock data is not reproducible, so it stays out of the manifest.
    out.write("complexity.csv", |b| write_complexity_csv(b, &rows))?;
    out.write_json("summary.json", &scaling_ratios(&rows))?;
    Ok(())
}

fn cmd_validate(path: &Path) -> Outcome<()> {
    let loaded = load(path, None)?;
    let s = loaded.config.resolve()?;
    println!(
        "{}: ok ({:?}, K={}, M={}, N_T={}, slots={}, p_bar={}, {:?}, feedback {:?})",
        path.display(),
        s.kind,
        s.users,
        s.subcarriers,
        s.antennas,
        s.slots,
        s.p_bar,
        s.mode.q_policy,
        s.feedback
    );
    Ok(())
}

fn init(common: &Common) -> Outcome<()> {
    let level = if common.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init()
        .ok();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Failure::Usage(anyhow!("--threads must be >= 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.into()))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Outcome<()> {
    match &cli.command {
        Command::Run { common, upa } => {
            init(common)?;
            cmd_run(common, *upa)
        }
        Command::Sweep(common) => init(common).and_then(|_| cmd_sweep(common)),
        Command::Region(common) => init(common).and_then(|_| cmd_region(common)),
        Command::Complexity(common) => init(common).and_then(|_| cmd_complexity(common)),
        Command::ValidateConfig { config } => cmd_validate(config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Config(e)) => {
            eprintln!("invalid config: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
