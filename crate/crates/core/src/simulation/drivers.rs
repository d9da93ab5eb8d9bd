//! Multi-run drivers: user-count sweeps, two-user rate regions, complexity
//! probes and per-class rate histograms.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ComplexityConfig, QPolicyName, ScenarioConfig, WeightsConfig};
use super::run::{run_resolved, PowerPolicy, RunResult};
use crate::allocation::{allocate_slot, dual_update_stochastic, init_dual};
use crate::channel::{
    equivalent_gains, gen_orthonormal_beams, gen_rayleigh_iid, BeamMode, EquivalentGains,
};
use crate::rng::{derive_seed, stream};
use crate::scheduling::{schedule_frame, Assignment, EqualPower, QPolicy, SchedulerMode};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub users: usize,
    pub sum_rate: f64,
    /// Mean per-user rate of class 2, or of all users if there is no class 2.
    pub class2_rate: f64,
}

fn class_mean(result: &RunResult, classes: &[usize], class: usize) -> Option<f64> {
    let rates: Vec<f64> = result
        .summary
        .mean_rates
        .iter()
        .zip(classes)
        .filter(|(_, &c)| c == class)
        .map(|(r, _)| *r)
        .collect();
    (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
}

/// Runs `config` once per user count on matched seeds, in parallel.
///
/// Weights must be class based so that they extend to any `K`; classes are
/// assigned round-robin.
pub fn sweep_users(config: &ScenarioConfig, users: &[usize]) -> Result<Vec<SweepRow>> {
    if users.is_empty() {
        return Err(Error::config("sweep.users", "at least one user count is required"));
    }
    if config.weights.phi.is_some() || config.weights.classes.is_some() {
        return Err(Error::config(
            "weights",
            "a user sweep needs class_weights without explicit phi or classes",
        ));
    }
    let scenarios = users
        .iter()
        .map(|&k| {
            let mut c = config.clone();
            c.users = k;
            c.weights = WeightsConfig {
                class_weights: config.weights.class_weights.clone(),
                ..WeightsConfig::default()
            };
            c.resolve()
        })
        .collect::<Result<Vec<_>>>()?;
    scenarios
        .par_iter()
        .map(|s| {
            let result = run_resolved(s, PowerPolicy::Waterfilling, &mut ())?;
            let class2_rate = class_mean(&result, &s.classes, 2).unwrap_or_else(|| {
                result.summary.mean_rates.iter().sum::<f64>() / s.users as f64
            });
            log::debug!("sweep K={} done", s.users);
            Ok(SweepRow {
                users: s.users,
                sum_rate: result.summary.mean_sum_rate,
                class2_rate,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub phi1: f64,
    pub r1: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegion {
    pub points: Vec<RegionPoint>,
    /// Uniform power allocation at `phi = (1/2, 1/2)`.
    pub upa: RegionPoint,
}

/// Grid `phi1 = i / (points + 1)`, `i = 1..=points`.
pub fn region_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|i| i as f64 / (points + 1) as f64).collect()
}

/// Two-user rate region traced by sweeping `phi = (t, 1 - t)` on matched
/// seeds, plus the uniform-power comparison point.
pub fn region_sweep(config: &ScenarioConfig, points: usize) -> Result<RateRegion> {
    if config.users != 2 {
        return Err(Error::config("users", "a rate region needs exactly 2 users"));
    }
    if points == 0 {
        return Err(Error::config("region.points", "must be >= 1"));
    }
    let with_phi = |t: f64| {
        let mut c = config.clone();
        c.weights = WeightsConfig {
            phi: Some(vec![t, 1.0 - t]),
            ..WeightsConfig::default()
        };
        c.resolve()
    };
    let mut jobs = region_grid(points)
        .into_iter()
        .map(|t| Ok((t, with_phi(t)?, PowerPolicy::Waterfilling)))
        .collect::<Result<Vec<_>>>()?;
    jobs.push((0.5, with_phi(0.5)?, PowerPolicy::Uniform));
    let mut results = jobs
        .par_iter()
        .map(|(t, s, policy)| {
            let r = run_resolved(s, *policy, &mut ())?;
            let rates = &r.summary.mean_rates;
            Ok(RegionPoint {
                phi1: *t,
                r1: rates[0],
                r2: rates[1],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let upa = results.pop().expect("uniform point was queued");
    Ok(RateRegion {
        points: results,
        upa,
    })
}

/// Stage names used by [`complexity_probe`].
pub const PROBE_STAGES: [&str; 4] = ["pooling", "scheduling", "waterfilling", "dual_update"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub mode: String,
    pub users: usize,
    pub antennas: usize,
    pub stage: &'static str,
    /// Best-of-repeats wall time per frame.
    pub seconds: f64,
}

pub fn mode_label(policy: QPolicy) -> String {
    match policy {
        QPolicy::Dynamic => "dynamic".into(),
        QPolicy::Fixed(q) => format!("fixed_{q}"),
        QPolicy::Full => "full".into(),
    }
}

fn min_time<F: FnMut() -> Result<()>>(repeats: usize, mut f: F) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..repeats {
        let t = Instant::now();
        f()?;
        best = best.min(t.elapsed().as_secs_f64());
    }
    Ok(best)
}

/// Times each pipeline stage for every (mode, `N_T`, `K`) combination on
/// i.i.d. Rayleigh frames with `config`'s subcarrier count and noise.
///
/// Runs sequentially so that timings do not compete for cores.
pub fn complexity_probe(config: &ScenarioConfig, probe: &ComplexityConfig) -> Result<Vec<TimingRow>> {
    let base = config.resolve()?;
    if probe.frames == 0 || probe.repeats == 0 {
        return Err(Error::config("complexity.frames", "frames and repeats must be >= 1"));
    }
    if probe.users.contains(&0) || probe.antennas.contains(&0) {
        return Err(Error::config("complexity", "user and antenna counts must be >= 1"));
    }
    let noise = base.sigma_w2 / base.per_beam_power;
    let p_bar = base.p_bar / base.per_beam_power;
    let budget = EqualPower::new(1.0, noise)?;
    let frames = probe.frames;
    let mut rows = Vec::new();
    for &antennas in &probe.antennas {
        for &users in &probe.users {
            let channels = (0..frames)
                .map(|n| {
                    gen_rayleigh_iid(
                        derive_seed(base.seed, stream::RAYLEIGH, n as u64),
                        users,
                        base.subcarriers,
                        antennas,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let beam_seed = |n: usize| derive_seed(base.seed, stream::BEAMS, n as u64);
            let mut gains: Vec<EquivalentGains> = Vec::with_capacity(frames);
            let pooling = min_time(probe.repeats, || {
                gains.clear();
                for (n, h) in channels.iter().enumerate() {
                    let b = gen_orthonormal_beams(
                        beam_seed(n),
                        antennas,
                        base.subcarriers,
                        BeamMode::PerFrameShared,
                    )?;
                    gains.push(equivalent_gains(h, &b)?);
                }
                Ok(())
            })?;
            let phi = vec![1.0 / users as f64; users];
            let dual = init_dual(&phi)?;
            for &name in &probe.modes {
                let policy = match name {
                    QPolicyName::Dynamic => QPolicy::Dynamic,
                    QPolicyName::Full => QPolicy::Full,
                    QPolicyName::Fixed => QPolicy::Fixed(
                        probe
                            .q
                            .ok_or_else(|| Error::config("complexity.q", "needed for fixed mode"))?,
                    ),
                };
                let mode = SchedulerMode::new(policy, base.mode.weighted);
                mode.validate(antennas)
                    .map_err(|e| Error::config("complexity.modes", e.to_string()))?;
                let needed = match policy {
                    QPolicy::Fixed(q) => q,
                    QPolicy::Full => antennas,
                    QPolicy::Dynamic => 1,
                };
                if users < needed {
                    return Err(Error::config(
                        "complexity.users",
                        format!("{users} users cannot fill {needed} beams"),
                    ));
                }
                let mut assignments: Vec<Assignment> = Vec::with_capacity(frames);
                let scheduling = min_time(probe.repeats, || {
                    assignments.clear();
                    for g in &gains {
                        assignments.push(schedule_frame(g, mode, budget, Some(&dual.mu))?);
                    }
                    Ok(())
                })?;
                let mut allocations = Vec::with_capacity(frames);
                let waterfilling = min_time(probe.repeats, || {
                    allocations.clear();
                    for (g, a) in gains.iter().zip(&assignments) {
                        allocations.push(allocate_slot(g, a, &dual, 1.0, noise)?);
                    }
                    Ok(())
                })?;
                let dual_update = min_time(probe.repeats, || {
                    let mut d = dual.clone();
                    for a in &allocations {
                        d = dual_update_stochastic(&d, a.total_power, &a.rates, p_bar);
                    }
                    std::hint::black_box(&d);
                    Ok(())
                })?;
                let label = mode_label(policy);
                for (stage, total) in PROBE_STAGES
                    .iter()
                    .zip([pooling, scheduling, waterfilling, dual_update])
                {
                    rows.push(TimingRow {
                        mode: label.clone(),
                        users,
                        antennas,
                        stage,
                        seconds: total / frames as f64,
                    });
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassStats {
    pub class: usize,
    pub users: usize,
    pub mean: f64,
    /// Population standard deviation of the users' average rates.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub class: usize,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateHistogram {
    pub classes: Vec<ClassStats>,
    /// `bins` equal-width bins over the range of all users' average rates,
    /// repeated for every class.
    pub bins: Vec<HistogramBin>,
}

/// Groups the users' window-average rates by class (1-based labels).
pub fn rate_histogram(result: &RunResult, classes: &[usize], bins: usize) -> Result<RateHistogram> {
    let rates = &result.summary.mean_rates;
    if classes.len() != rates.len() {
        return Err(Error::config(
            "weights.classes",
            format!("{} users but {} class labels", rates.len(), classes.len()),
        ));
    }
    if let Some(k) = classes.iter().position(|&c| c == 0) {
        return Err(Error::config("weights.classes", format!("user {k} has no class")));
    }
    if bins == 0 {
        return Err(Error::config("output.histogram_bins", "must be >= 1"));
    }
    let lo = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let bin_of = |r: f64| {
        if width > 0.0 {
            (((r - lo) / width) as usize).min(bins - 1)
        } else {
            0
        }
    };
    let class_count = classes.iter().copied().max().unwrap_or(0);
    let mut stats = Vec::new();
    let mut out_bins = Vec::new();
    for class in 1..=class_count {
        let members: Vec<f64> = rates
            .iter()
            .zip(classes)
            .filter(|(_, &c)| c == class)
            .map(|(r, _)| *r)
            .collect();
        if members.is_empty() {
            continue;
        }
        let n = members.len() as f64;
        let mean = members.iter().sum::<f64>() / n;
        let var = members.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
        stats.push(ClassStats {
            class,
            users: members.len(),
            mean,
            std: var.sqrt(),
            min: members.iter().copied().fold(f64::INFINITY, f64::min),
            max: members.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
        let mut counts = vec![0; bins];
        for &r in &members {
            counts[bin_of(r)] += 1;
        }
        out_bins.extend(counts.into_iter().enumerate().map(|(b, count)| HistogramBin {
            class,
            lo: lo + width * b as f64,
            hi: if b + 1 == bins { hi } else { lo + width * (b + 1) as f64 },
            count,
        }));
    }
    Ok(RateHistogram {
        classes: stats,
        bins: out_bins,
    })
}
