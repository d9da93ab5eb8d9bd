//! Scenario configuration.
//!
//! Config files are TOML. Top-level keys describe the system, optional
//! tables tune the scheduler, the price dynamics, the realistic channel and
//! the sweep/region/complexity drivers:
//!
//! ```toml
//! scenario = "simple"        # or "realistic"
//! users = 5
//! subcarriers = 64
//! antennas = 4
//! slots = 2000
//! seed = 1
//! p_bar_db = 10.0            # or p_bar = 10.0 (linear); exactly one
//! sigma_w2 = 1.0             # noise power per subcarrier
//! per_beam_power = 1.0       # equal-power P used for scheduling SINRs
//! beams = "per_frame_shared" # or "per_subcarrier"
//!
//! [weights]                  # phi = [...] | class_weights (+ classes) | nothing (equal)
//! class_weights = [0.5, 1.0, 1.5]
//!
//! [scheduler]
//! q_policy = "dynamic"       # "fixed" (with q = ...) | "full"
//! weighted = true
//! feedback = "A"             # "B" needs q_policy = "fixed", "C" needs "full"
//!
//! [dual]
//! lambda0 = 1.0
//! delta = 0.01
//! # step_decay_slots = 500.0
//! ```
//!
//! Realistic-only settings live under `[realistic]`; see [`RealisticConfig`].

use serde::{Deserialize, Serialize};

use crate::allocation::StepSchedule;
use crate::channel::{pedestrian_profile, BeamMode, FastFadingParams, Tap};
use crate::scheduling::{FeedbackMode, QPolicy, SchedulerMode};
use crate::{Error, Result};

/// Boltzmann constant times 290 K, W/Hz.
const THERMAL_NOISE_W_PER_HZ: f64 = 1.380_649e-23 * 290.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Normalized i.i.d. Rayleigh fading, no path loss.
    Simple,
    /// Path loss, shadowing and time/frequency-correlated multipath.
    Realistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// All users at `distance_m`, evenly spread in angle.
    FixedRing,
    /// Uniform over the cell between `min_distance_m` and `cell_radius_m`.
    UniformDisk,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    /// Explicit rate weights, one per user.
    pub phi: Option<Vec<f64>>,
    /// Relative weight of each user class.
    pub class_weights: Option<Vec<f64>>,
    /// 1-based class of each user; defaults to round-robin over the classes.
    pub classes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QPolicyName {
    Dynamic,
    Fixed,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulerConfig {
    #[serde(default = "default_q_policy")]
    pub q_policy: QPolicyName,
    pub q: Option<usize>,
    #[serde(default)]
    pub weighted: bool,
    #[serde(default = "default_feedback")]
    pub feedback: FeedbackMode,
}

fn default_q_policy() -> QPolicyName {
    QPolicyName::Dynamic
}

fn default_feedback() -> FeedbackMode {
    FeedbackMode::A
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            q_policy: default_q_policy(),
            q: None,
            weighted: false,
            feedback: default_feedback(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualConfig {
    #[serde(default = "default_lambda0")]
    pub lambda0: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Enables `delta_n = delta / (1 + n / step_decay_slots)`.
    pub step_decay_slots: Option<f64>,
}

fn default_lambda0() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    0.01
}

impl Default for DualConfig {
    fn default() -> Self {
        Self {
            lambda0: default_lambda0(),
            delta: default_delta(),
            step_decay_slots: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealisticConfig {
    #[serde(default = "default_bandwidth")]
    pub bandwidth_hz: f64,
    #[serde(default = "default_placement")]
    pub placement: Placement,
    #[serde(default = "default_distance")]
    pub distance_m: f64,
    #[serde(default = "default_radius")]
    pub cell_radius_m: f64,
    #[serde(default = "default_min_distance")]
    pub min_distance_m: f64,
    #[serde(default = "default_k0")]
    pub k0: f64,
    #[serde(default = "default_k1")]
    pub k1: f64,
    /// Defaults to on for `uniform_disk` and off for `fixed_ring`.
    pub shadowing: Option<bool>,
    #[serde(default = "default_shadow_sigma")]
    pub shadow_sigma_db: f64,
    #[serde(default = "default_corr_dist")]
    pub shadow_corr_dist_m: f64,
    #[serde(default = "default_doppler")]
    pub doppler_hz: f64,
    /// Scheduling/CSI update interval.
    #[serde(default = "default_frame_interval")]
    pub frame_interval_s: f64,
    /// Fraction of each frame used for downlink; scales reported rates.
    #[serde(default = "default_downlink_fraction")]
    pub downlink_fraction: f64,
    /// Used to derive `sigma_w2` when it is not given.
    #[serde(default = "default_noise_figure")]
    pub noise_figure_db: f64,
    /// Multipath profile; defaults to [`pedestrian_profile`].
    pub taps: Option<Vec<Tap>>,
}

fn default_bandwidth() -> f64 {
    1.25e6
}
fn default_placement() -> Placement {
    Placement::FixedRing
}
fn default_distance() -> f64 {
    250.0
}
fn default_radius() -> f64 {
    500.0
}
fn default_min_distance() -> f64 {
    35.0
}
fn default_k0() -> f64 {
    15.2
}
fn default_k1() -> f64 {
    40.0
}
fn default_shadow_sigma() -> f64 {
    6.0
}
fn default_corr_dist() -> f64 {
    20.0
}
fn default_doppler() -> f64 {
    6.0
}
fn default_frame_interval() -> f64 {
    0.01
}
fn default_downlink_fraction() -> f64 {
    0.4
}
fn default_noise_figure() -> f64 {
    7.0
}

impl Default for RealisticConfig {
    fn default() -> Self {
        Self {
            bandwidth_hz: default_bandwidth(),
            placement: default_placement(),
            distance_m: default_distance(),
            cell_radius_m: default_radius(),
            min_distance_m: default_min_distance(),
            k0: default_k0(),
            k1: default_k1(),
            shadowing: None,
            shadow_sigma_db: default_shadow_sigma(),
            shadow_corr_dist_m: default_corr_dist(),
            doppler_hz: default_doppler(),
            frame_interval_s: default_frame_interval(),
            downlink_fraction: default_downlink_fraction(),
            noise_figure_db: default_noise_figure(),
            taps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub users: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    #[serde(default = "default_region_points")]
    pub points: usize,
}

fn default_region_points() -> usize {
    21
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexityConfig {
    pub users: Vec<usize>,
    pub antennas: Vec<usize>,
    pub modes: Vec<QPolicyName>,
    /// Fixed `Q` used when `modes` contains `fixed`.
    pub q: Option<usize>,
    #[serde(default = "default_probe_frames")]
    pub frames: usize,
    #[serde(default = "default_probe_repeats")]
    pub repeats: usize,
}

fn default_probe_frames() -> usize {
    50
}
fn default_probe_repeats() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write a channel dump for the first this-many frames.
    #[serde(default)]
    pub dump_channel_frames: usize,
    /// Write assignment records for the first this-many frames.
    #[serde(default)]
    pub dump_assignment_frames: usize,
    #[serde(default = "default_histogram_bins")]
    pub histogram_bins: usize,
}

fn default_histogram_bins() -> usize {
    10
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dump_channel_frames: 0,
            dump_assignment_frames: 0,
            histogram_bins: default_histogram_bins(),
        }
    }
}

/// Scenario as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub users: usize,
    pub subcarriers: usize,
    pub antennas: usize,
    pub slots: usize,
    #[serde(default)]
    pub seed: u64,
    /// Average power constraint, linear.
    pub p_bar: Option<f64>,
    /// Average power constraint in dB (relative to 1).
    pub p_bar_db: Option<f64>,
    pub sigma_w2: Option<f64>,
    pub per_beam_power: Option<f64>,
    #[serde(default)]
    pub beams: BeamMode,
    #[serde(default)]
    pub weights: WeightsConfig,
    #[serde(default)]
    pub scheduler: SchedulerConfig,
    #[serde(default)]
    pub dual: DualConfig,
    pub realistic: Option<RealisticConfig>,
    pub sweep: Option<SweepConfig>,
    pub region: Option<RegionConfig>,
    pub complexity: Option<ComplexityConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Realistic-channel settings after validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RealisticSetup {
    pub placement: Placement,
    pub distance_m: f64,
    pub cell_radius_m: f64,
    pub min_distance_m: f64,
    pub k0: f64,
    pub k1: f64,
    pub shadowing: bool,
    pub shadow_sigma_db: f64,
    pub shadow_corr_dist_m: f64,
    pub fading: FastFadingParams,
}

/// Fully resolved and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub users: usize,
    pub subcarriers: usize,
    pub antennas: usize,
    pub slots: usize,
    pub seed: u64,
    pub p_bar: f64,
    pub sigma_w2: f64,
    pub per_beam_power: f64,
    pub beam_mode: BeamMode,
    pub phi: Vec<f64>,
    /// 1-based class per user.
    pub classes: Vec<usize>,
    pub mode: SchedulerMode,
    pub feedback: FeedbackMode,
    pub lambda0: f64,
    pub delta: f64,
    pub step: StepSchedule,
    /// Multiplies reported rates (TDD downlink share).
    pub rate_scale: f64,
    pub realistic: Option<RealisticSetup>,
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be a positive finite number, got {v}")))
    }
}

fn at_least_one(field: &str, v: usize) -> Result<usize> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(Error::config(field, "must be >= 1"))
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Checks every field and resolves defaults.
    pub fn resolve(&self) -> Result<Scenario> {
        let users = at_least_one("users", self.users)?;
        let subcarriers = at_least_one("subcarriers", self.subcarriers)?;
        let antennas = at_least_one("antennas", self.antennas)?;
        let slots = at_least_one("slots", self.slots)?;

        let p_bar = match (self.p_bar, self.p_bar_db) {
            (Some(p), None) => positive("p_bar", p)?,
            (None, Some(db)) => positive("p_bar_db", 10f64.powf(db / 10.0))?,
            (Some(_), Some(_)) => {
                return Err(Error::config("p_bar", "give either p_bar or p_bar_db, not both"))
            }
            (None, None) => return Err(Error::config("p_bar", "average power constraint is required")),
        };

        let (phi, classes) = self.resolve_weights(users)?;
        let (mode, feedback) = self.resolve_scheduler(users, antennas)?;

        let lambda0 = self.dual.lambda0;
        if !(lambda0 >= 0.0) || !lambda0.is_finite() {
            return Err(Error::config("dual.lambda0", "must be finite and >= 0"));
        }
        let delta = positive("dual.delta", self.dual.delta)?;
        let step = match self.dual.step_decay_slots {
            None => StepSchedule::Constant,
            Some(s) => StepSchedule::Decaying {
                slots: positive("dual.step_decay_slots", s)?,
            },
        };

        let (sigma_w2, per_beam_power, rate_scale, realistic) = match self.scenario {
            ScenarioKind::Simple => {
                if self.realistic.is_some() {
                    return Err(Error::config(
                        "realistic",
                        "only allowed with scenario = \"realistic\"",
                    ));
                }
                let sigma = positive("sigma_w2", self.sigma_w2.unwrap_or(1.0))?;
                let p = positive("per_beam_power", self.per_beam_power.unwrap_or(1.0))?;
                (sigma, p, 1.0, None)
            }
            ScenarioKind::Realistic => {
                let r = self.realistic.clone().unwrap_or_default();
                let setup = resolve_realistic(&r, subcarriers)?;
                let sigma = match self.sigma_w2 {
                    Some(s) => positive("sigma_w2", s)?,
                    None => {
                        THERMAL_NOISE_W_PER_HZ
                            * setup.fading.subcarrier_spacing_hz
                            * 10f64.powf(r.noise_figure_db / 10.0)
                    }
                };
                let p = match self.per_beam_power {
                    Some(p) => positive("per_beam_power", p)?,
                    None => p_bar / (subcarriers * antennas) as f64,
                };
                let duty = r.downlink_fraction;
                if !(duty > 0.0 && duty <= 1.0) {
                    return Err(Error::config("realistic.downlink_fraction", "must be in (0, 1]"));
                }
                (sigma, p, duty, Some(setup))
            }
        };

        if self.output.histogram_bins == 0 {
            return Err(Error::config("output.histogram_bins", "must be >= 1"));
        }

        Ok(Scenario {
            kind: self.scenario,
            users,
            subcarriers,
            antennas,
            slots,
            seed: self.seed,
            p_bar,
            sigma_w2,
            per_beam_power,
            beam_mode: self.beams,
            phi,
            classes,
            mode,
            feedback,
            lambda0,
            delta,
            step,
            rate_scale,
            realistic,
        })
    }

    fn resolve_weights(&self, users: usize) -> Result<(Vec<f64>, Vec<usize>)> {
        let w = &self.weights;
        if let Some(phi) = &w.phi {
            if w.class_weights.is_some() {
                return Err(Error::config("weights", "give either phi or class_weights, not both"));
            }
            if phi.len() != users {
                return Err(Error::config(
                    "weights.phi",
                    format!("expected {users} weights, got {}", phi.len()),
                ));
            }
            if phi.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
                return Err(Error::config("weights.phi", "weights must be positive"));
            }
            let total: f64 = phi.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::config(
                    "weights.phi",
                    format!("weights must sum to 1 (sum is {total})"),
                ));
            }
            let classes = w.classes.clone().unwrap_or_else(|| vec![1; users]);
            check_classes(&classes, users, usize::MAX)?;
            return Ok((phi.iter().map(|p| p / total).collect(), classes));
        }
        let class_weights = w.class_weights.clone().unwrap_or_else(|| vec![1.0]);
        if class_weights.is_empty() || class_weights.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
            return Err(Error::config("weights.class_weights", "class weights must be positive"));
        }
        let classes = match &w.classes {
            Some(c) => c.clone(),
            None => (0..users).map(|k| k % class_weights.len() + 1).collect(),
        };
        check_classes(&classes, users, class_weights.len())?;
        let raw: Vec<f64> = classes.iter().map(|&c| class_weights[c - 1]).collect();
        let total: f64 = raw.iter().sum();
        Ok((raw.iter().map(|r| r / total).collect(), classes))
    }

    fn resolve_scheduler(&self, users: usize, antennas: usize) -> Result<(SchedulerMode, FeedbackMode)> {
        let s = &self.scheduler;
        let policy = match s.q_policy {
            QPolicyName::Dynamic => QPolicy::Dynamic,
            QPolicyName::Full => QPolicy::Full,
            QPolicyName::Fixed => {
                let q = s
                    .q
                    .ok_or_else(|| Error::config("scheduler.q", "required when q_policy = \"fixed\""))?;
                if q == 0 || q > antennas {
                    return Err(Error::config("scheduler.q", format!("must be in 1..={antennas}")));
                }
                QPolicy::Fixed(q)
            }
        };
        match (s.feedback, policy) {
            (FeedbackMode::B, QPolicy::Fixed(_)) | (FeedbackMode::C, QPolicy::Full) | (FeedbackMode::A, _) => {}
            (FeedbackMode::B, _) => {
                return Err(Error::config(
                    "scheduler.feedback",
                    "feedback mode B requires q_policy = \"fixed\" (users must know Q)",
                ))
            }
            (FeedbackMode::C, _) => {
                return Err(Error::config(
                    "scheduler.feedback",
                    "feedback mode C requires q_policy = \"full\"",
                ))
            }
        }
        // Greedy full-gain scheduling needs Q distinct users; the reported-best
        // rule of modes B/C can leave beams idle instead.
        if s.feedback == FeedbackMode::A {
            let needed = match policy {
                QPolicy::Fixed(q) => q,
                QPolicy::Full => antennas,
                QPolicy::Dynamic => 1,
            };
            if users < needed {
                return Err(Error::config(
                    "scheduler.q_policy",
                    format!("{users} users cannot fill {needed} beams without repetition"),
                ));
            }
        }
        Ok((SchedulerMode::new(policy, s.weighted), s.feedback))
    }
}

fn check_classes(classes: &[usize], users: usize, class_count: usize) -> Result<()> {
    if classes.len() != users {
        return Err(Error::config(
            "weights.classes",
            format!("expected {users} class labels, got {}", classes.len()),
        ));
    }
    if classes.iter().any(|&c| c == 0 || c > class_count) {
        return Err(Error::config("weights.classes", "class labels must be 1-based and in range"));
    }
    Ok(())
}

fn resolve_realistic(r: &RealisticConfig, subcarriers: usize) -> Result<RealisticSetup> {
    let bandwidth = positive("realistic.bandwidth_hz", r.bandwidth_hz)?;
    let fading = FastFadingParams {
        taps: r.taps.clone().unwrap_or_else(pedestrian_profile),
        doppler_hz: r.doppler_hz,
        subcarrier_spacing_hz: bandwidth / subcarriers as f64,
        frame_interval_s: r.frame_interval_s,
    };
    fading.validate().map_err(|e| match e {
        Error::Config { field, message } => Error::config(format!("realistic.{field}"), message),
        other => other,
    })?;
    let shadowing = r.shadowing.unwrap_or(r.placement == Placement::UniformDisk);
    if !(r.shadow_sigma_db >= 0.0) {
        return Err(Error::config("realistic.shadow_sigma_db", "must be >= 0"));
    }
    positive("realistic.shadow_corr_dist_m", r.shadow_corr_dist_m)?;
    match r.placement {
        Placement::FixedRing => {
            positive("realistic.distance_m", r.distance_m)?;
        }
        Placement::UniformDisk => {
            positive("realistic.min_distance_m", r.min_distance_m)?;
            if !(r.cell_radius_m > r.min_distance_m) {
                return Err(Error::config(
                    "realistic.cell_radius_m",
                    "must exceed min_distance_m",
                ));
            }
        }
    }
    if !r.k0.is_finite() || !r.k1.is_finite() {
        return Err(Error::config("realistic.k0", "path-loss constants must be finite"));
    }
    Ok(RealisticSetup {
        placement: r.placement,
        distance_m: r.distance_m,
        cell_radius_m: r.cell_radius_m,
        min_distance_m: r.min_distance_m,
        k0: r.k0,
        k1: r.k1,
        shadowing,
        shadow_sigma_db: r.shadow_sigma_db,
        shadow_corr_dist_m: r.shadow_corr_dist_m,
        fading,
    })
}

impl Scenario {
    /// Number of distinct classes (largest 1-based label).
    pub fn class_count(&self) -> usize {
        self.classes.iter().copied().max().unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIMPLE: &str = r#"
scenario = "simple"
users = 5
subcarriers = 64
antennas = 4
slots = 100
p_bar_db = 10.0
"#;

    fn field_of(err: Error) -> String {
        match err {
            Error::Config { field, .. } => field,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn simple_defaults() {
        let s = ScenarioConfig::from_toml_str(SIMPLE).unwrap().resolve().unwrap();
        assert!((s.p_bar - 10.0).abs() < 1e-12);
        assert_eq!(s.phi, vec![0.2; 5]);
        assert_eq!((s.sigma_w2, s.per_beam_power, s.rate_scale), (1.0, 1.0, 1.0));
        assert_eq!(s.mode, SchedulerMode::new(QPolicy::Dynamic, false));
        assert_eq!(s.feedback, FeedbackMode::A);
        assert_eq!((s.lambda0, s.delta), (1.0, 0.01));
    }

    #[test]
    fn weights_must_sum_to_one() {
        let text = format!("{SIMPLE}\n[weights]\nphi = [0.6, 0.6, 0.1, 0.1, 0.1]\n");
        let err = ScenarioConfig::from_toml_str(&text).unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("weights must sum to 1"), "{err}");
        assert_eq!(field_of(err), "weights.phi");
    }

    #[test]
    fn feedback_b_needs_fixed_q() {
        let text = format!("{SIMPLE}\n[scheduler]\nfeedback = \"B\"\n");
        let err = ScenarioConfig::from_toml_str(&text).unwrap().resolve().unwrap_err();
        assert_eq!(field_of(err), "scheduler.feedback");
        let ok = format!("{SIMPLE}\n[scheduler]\nfeedback = \"B\"\nq_policy = \"fixed\"\nq = 2\n");
        ScenarioConfig::from_toml_str(&ok).unwrap().resolve().unwrap();
    }

    #[test]
    fn class_weights_round_robin() {
        let text = SIMPLE.replace("users = 5", "users = 9")
            + "\n[weights]\nclass_weights = [0.5, 1.0, 1.5]\n";
        let s = ScenarioConfig::from_toml_str(&text).unwrap().resolve().unwrap();
        assert_eq!(s.classes, vec![1, 2, 3, 1, 2, 3, 1, 2, 3]);
        for (phi, class) in s.phi.iter().zip(&s.classes) {
            let expected = [0.5, 1.0, 1.5][class - 1] / 9.0;
            assert!((phi - expected).abs() < 1e-15);
        }
        assert_eq!(s.class_count(), 3);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = format!("{SIMPLE}\nbogus = 3\n");
        assert!(matches!(ScenarioConfig::from_toml_str(&text), Err(Error::Parse(_))));
    }

    #[test]
    fn zero_users_rejected() {
        let text = SIMPLE.replace("users = 5", "users = 0");
        let err = ScenarioConfig::from_toml_str(&text).unwrap().resolve().unwrap_err();
        assert_eq!(field_of(err), "users");
    }

    #[test]
    fn both_power_forms_rejected() {
        let text = format!("{SIMPLE}\np_bar = 10.0\n");
        let err = ScenarioConfig::from_toml_str(&text).unwrap().resolve().unwrap_err();
        assert_eq!(field_of(err), "p_bar");
    }

    #[test]
    fn realistic_defaults_derive_noise_and_beam_power() {
        let text = r#"
scenario = "realistic"
users = 10
subcarriers = 128
antennas = 3
slots = 10
p_bar = 1.0
"#;
        let s = ScenarioConfig::from_toml_str(text).unwrap().resolve().unwrap();
        let spacing = 1.25e6 / 128.0;
        let expected = 1.380_649e-23 * 290.0 * spacing * 10f64.powf(0.7);
        assert!((s.sigma_w2 - expected).abs() < 1e-30);
        assert!((s.per_beam_power - 1.0 / 384.0).abs() < 1e-15);
        assert_eq!(s.rate_scale, 0.4);
        let r = s.realistic.unwrap();
        assert!(!r.shadowing);
        assert_eq!(r.fading.taps.len(), 4);
    }
}
