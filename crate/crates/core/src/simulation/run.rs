//! The per-slot pipeline.
//!
//! Powers are handled in units of the per-beam scheduling power `P`: the
//! scheduler and the allocator see `P = 1`, noise `sigma_w2 / P` and power
//! budget `p_bar / P`, which keeps the power price of order one whatever the
//! physical scale. Reported powers are converted back.

use std::time::Instant;

use serde::Serialize;

use super::config::{Placement, Scenario, ScenarioConfig, ScenarioKind};
use crate::allocation::{
    allocate_slot, allocate_uniform, dual_update_stochastic, init_dual, AllocationResult,
    DualState,
};
use crate::channel::{
    equivalent_gains, fixed_ring_positions, gen_orthonormal_beams, gen_rayleigh_iid,
    uniform_disk_positions, ChannelState, EquivalentGains, LargeScaleParams, MultipathChannel,
};
use crate::rng::{derive_seed, rng_from_seed, stream};
use crate::scheduling::{
    make_feedback, schedule_frame, schedule_from_feedback, Assignment, EqualPower, FeedbackMode,
    QPolicy,
};
use crate::{Error, Result};

/// How powers are set once a slot is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerPolicy {
    Waterfilling,
    /// `p_bar` split evenly over the scheduled links.
    Uniform,
}

/// Produces the channel of every frame of a scenario.
#[derive(Debug, Clone)]
pub struct ChannelGenerator {
    kind: ScenarioKind,
    seed: u64,
    users: usize,
    subcarriers: usize,
    antennas: usize,
    multipath: Option<MultipathChannel>,
    amplitudes: Vec<f64>,
}

impl ChannelGenerator {
    pub fn new(s: &Scenario) -> Result<Self> {
        let mut generator = Self {
            kind: s.kind,
            seed: s.seed,
            users: s.users,
            subcarriers: s.subcarriers,
            antennas: s.antennas,
            multipath: None,
            amplitudes: vec![1.0; s.users],
        };
        if let Some(r) = &s.realistic {
            let positions = match r.placement {
                Placement::FixedRing => fixed_ring_positions(s.users, r.distance_m),
                Placement::UniformDisk => {
                    let mut rng = rng_from_seed(derive_seed(s.seed, stream::PLACEMENT, 0));
                    uniform_disk_positions(&mut rng, s.users, r.cell_radius_m, r.min_distance_m)
                }
            };
            let large_scale = LargeScaleParams {
                k0: r.k0,
                k1: r.k1,
                shadow_sigma_db: r.shadow_sigma_db,
                shadow_corr_dist_m: r.shadow_corr_dist_m,
                user_positions: positions,
            };
            let gains =
                large_scale.user_gains(derive_seed(s.seed, stream::SHADOWING, 0), r.shadowing)?;
            generator.amplitudes = gains.iter().map(|g| g.sqrt()).collect();
            generator.multipath = Some(MultipathChannel::new(
                derive_seed(s.seed, stream::MULTIPATH, 0),
                r.fading.clone(),
                s.users,
                s.antennas,
                s.subcarriers,
            )?);
        }
        Ok(generator)
    }

    /// Linear large-scale power gain of each user (all ones for the simple
    /// scenario).
    pub fn user_gains(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a * a).collect()
    }

    pub fn frame(&self, n: usize) -> Result<ChannelState> {
        match (self.kind, &self.multipath) {
            (ScenarioKind::Realistic, Some(mp)) => {
                let mut h = mp.frame(n as u64);
                for (k, &a) in self.amplitudes.iter().enumerate() {
                    h.scale_user(k, a);
                }
                Ok(h)
            }
            _ => gen_rayleigh_iid(
                derive_seed(self.seed, stream::RAYLEIGH, n as u64),
                self.users,
                self.subcarriers,
                self.antennas,
            ),
        }
    }
}

/// Per-slot series. `mu` and `rates` are slot-major with `users` entries
/// per slot; `lambda` and `mu` are the prices in force during the slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSeries {
    pub users: usize,
    /// Sum over users of the reported rates, bit/s/Hz summed over subcarriers.
    pub sum_rate: Vec<f64>,
    /// Total transmit power in config units.
    pub total_power: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub rates: Vec<f64>,
}

impl RunSeries {
    fn with_capacity(users: usize, slots: usize) -> Self {
        Self {
            users,
            sum_rate: Vec::with_capacity(slots),
            total_power: Vec::with_capacity(slots),
            lambda: Vec::with_capacity(slots),
            mu: Vec::with_capacity(slots * users),
            rates: Vec::with_capacity(slots * users),
        }
    }

    pub fn slots(&self) -> usize {
        self.sum_rate.len()
    }

    pub fn mu_at(&self, slot: usize) -> &[f64] {
        &self.mu[slot * self.users..(slot + 1) * self.users]
    }

    pub fn rates_at(&self, slot: usize) -> &[f64] {
        &self.rates[slot * self.users..(slot + 1) * self.users]
    }
}

/// Statistics over the second half of the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub window_start: usize,
    pub window_slots: usize,
    pub mean_rates: Vec<f64>,
    /// `r_k / sum_j r_j` of the window means.
    pub normalized_rates: Vec<f64>,
    pub mean_sum_rate: f64,
    pub mean_power: f64,
    pub mean_lambda: f64,
    /// Fraction of all slots with `lambda == 0`.
    pub lambda_zero_fraction: f64,
}

impl RunSummary {
    pub fn from_series(series: &RunSeries) -> Self {
        let slots = series.slots();
        let window_start = slots / 2;
        let window_slots = slots - window_start;
        let users = series.users;
        let scale = 1.0 / window_slots.max(1) as f64;
        let mut mean_rates = vec![0.0; users];
        for n in window_start..slots {
            for (acc, r) in mean_rates.iter_mut().zip(series.rates_at(n)) {
                *acc += r;
            }
        }
        for r in &mut mean_rates {
            *r *= scale;
        }
        let total: f64 = mean_rates.iter().sum();
        let normalized_rates = mean_rates
            .iter()
            .map(|r| if total > 0.0 { r / total } else { 0.0 })
            .collect();
        let window_mean = |v: &[f64]| v[window_start..].iter().sum::<f64>() * scale;
        let zeros = series.lambda.iter().filter(|&&l| l == 0.0).count();
        Self {
            window_start,
            window_slots,
            mean_rates,
            normalized_rates,
            mean_sum_rate: window_mean(&series.sum_rate),
            mean_power: window_mean(&series.total_power),
            mean_lambda: window_mean(&series.lambda),
            lambda_zero_fraction: zeros as f64 / slots.max(1) as f64,
        }
    }
}

/// Wall-clock seconds spent in each stage over the whole run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub channel: f64,
    pub beams: f64,
    pub feedback: f64,
    pub scheduling: f64,
    pub allocation: f64,
    pub dual_update: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub series: RunSeries,
    pub summary: RunSummary,
    /// Not part of the deterministic outcome.
    pub timings: StageTimings,
}

impl RunResult {
    /// Equality of everything except timings.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        self.series == other.series && self.summary == other.summary
    }
}

/// Everything a slot produced, handed to a [`SlotObserver`].
pub struct SlotView<'a> {
    pub slot: usize,
    pub channel: &'a ChannelState,
    pub gains: &'a EquivalentGains,
    pub assignment: &'a Assignment,
    pub allocation: &'a AllocationResult,
    pub dual: &'a DualState,
}

/// Hook for per-slot side outputs such as channel dumps.
pub trait SlotObserver {
    fn on_slot(&mut self, view: &SlotView<'_>) -> Result<()>;
}

impl SlotObserver for () {
    fn on_slot(&mut self, _: &SlotView<'_>) -> Result<()> {
        Ok(())
    }
}

/// Scheduler step shared by the run loop and the probes.
pub(crate) fn schedule_slot(
    s: &Scenario,
    gains: &EquivalentGains,
    budget: EqualPower,
    mu: &[f64],
    timings: &mut StageTimings,
) -> Result<Assignment> {
    match s.feedback {
        FeedbackMode::A => {
            let t = Instant::now();
            let a = schedule_frame(gains, s.mode, budget, Some(mu));
            timings.scheduling += t.elapsed().as_secs_f64();
            a
        }
        mode => {
            let fixed_q = match s.mode.q_policy {
                QPolicy::Fixed(q) => Some(q),
                _ => None,
            };
            let t = Instant::now();
            let report = make_feedback(gains, mode, budget, fixed_q)?;
            timings.feedback += t.elapsed().as_secs_f64();
            let t = Instant::now();
            let a = schedule_from_feedback(&report, s.mode, budget, Some(mu));
            timings.scheduling += t.elapsed().as_secs_f64();
            a
        }
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<RunResult> {
    run_resolved(&config.resolve()?, PowerPolicy::Waterfilling, &mut ())
}

pub fn run_upa_baseline(config: &ScenarioConfig) -> Result<RunResult> {
    run_resolved(&config.resolve()?, PowerPolicy::Uniform, &mut ())
}

/// Runs a validated scenario, calling `observer` after every slot.
pub fn run_resolved(
    s: &Scenario,
    policy: PowerPolicy,
    observer: &mut dyn SlotObserver,
) -> Result<RunResult> {
    let channels = ChannelGenerator::new(s)?;
    let noise = s.sigma_w2 / s.per_beam_power;
    let p_bar = s.p_bar / s.per_beam_power;
    let budget = EqualPower::new(1.0, noise)?;
    let mut dual = init_dual(&s.phi)?;
    dual.lambda = s.lambda0;
    let mut series = RunSeries::with_capacity(s.users, s.slots);
    let mut timings = StageTimings::default();
    log::info!(
        "running {:?} scenario: K={} M={} N_T={} slots={}",
        s.kind,
        s.users,
        s.subcarriers,
        s.antennas,
        s.slots
    );

    for n in 0..s.slots {
        let t = Instant::now();
        let channel = channels.frame(n)?;
        timings.channel += t.elapsed().as_secs_f64();

        let t = Instant::now();
        let beams = gen_orthonormal_beams(
            derive_seed(s.seed, stream::BEAMS, n as u64),
            s.antennas,
            s.subcarriers,
            s.beam_mode,
        )?;
        let gains = equivalent_gains(&channel, &beams)?;
        timings.beams += t.elapsed().as_secs_f64();

        let assignment = schedule_slot(s, &gains, budget, &dual.mu, &mut timings)?;

        let t = Instant::now();
        let allocation = match policy {
            PowerPolicy::Waterfilling => allocate_slot(&gains, &assignment, &dual, 1.0, noise)?,
            PowerPolicy::Uniform => allocate_uniform(&gains, &assignment, p_bar, noise)?,
        };
        timings.allocation += t.elapsed().as_secs_f64();

        let mut sum_rate = 0.0;
        for &r in &allocation.rates {
            let reported = r * s.rate_scale;
            series.rates.push(reported);
            sum_rate += reported;
        }
        series.sum_rate.push(sum_rate);
        series.total_power.push(allocation.total_power * s.per_beam_power);
        series.lambda.push(dual.lambda);
        series.mu.extend_from_slice(&dual.mu);

        observer.on_slot(&SlotView {
            slot: n,
            channel: &channel,
            gains: &gains,
            assignment: &assignment,
            allocation: &allocation,
            dual: &dual,
        })?;

        let t = Instant::now();
        dual.delta = s.step.step(s.delta, n);
        dual = dual_update_stochastic(&dual, allocation.total_power, &allocation.rates, p_bar);
        if !dual.lambda.is_finite() || dual.mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::Domain(format!("dual prices diverged at slot {n}")));
        }
        timings.dual_update += t.elapsed().as_secs_f64();
    }

    let summary = RunSummary::from_series(&series);
    log::info!(
        "done: mean sum rate {:.4}, mean power {:.4}",
        summary.mean_sum_rate,
        summary.mean_power
    );
    Ok(RunResult {
        series,
        summary,
        timings,
    })
}
