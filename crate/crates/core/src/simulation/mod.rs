//! End-to-end scenarios: per-slot pipeline, baselines, sweeps and probes.

mod config;
mod drivers;
mod output;
mod run;

pub use config::{
    ComplexityConfig, DualConfig, OutputConfig, Placement, QPolicyName, RealisticConfig,
    RealisticSetup, RegionConfig, Scenario, ScenarioConfig, ScenarioKind, SchedulerConfig,
    SweepConfig, WeightsConfig,
};
pub use drivers::{
    complexity_probe, mode_label, rate_histogram, region_grid, region_sweep, sweep_users,
    ClassStats, HistogramBin, RateHistogram, RateRegion, RegionPoint, SweepRow, TimingRow,
    PROBE_STAGES,
};
pub use output::{
    write_complexity_csv, write_histogram_csv, write_region_csv, write_region_upa_csv,
    write_sweep_csv, write_trace_csv,
};
pub use run::{
    run_resolved, run_scenario, run_upa_baseline, ChannelGenerator, PowerPolicy, RunResult,
    RunSeries, RunSummary, SlotObserver, SlotView, StageTimings,
};
