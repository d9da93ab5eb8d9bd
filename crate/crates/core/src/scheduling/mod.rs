//! Per-subcarrier opportunistic spatial scheduling.
//!
//! For each subcarrier the scheduler picks the number of active beams `Q`,
//! one of the `C(N_T, Q)` beam combinations, and one user per active beam.
//! SINRs are evaluated under equal per-beam power. Users are assigned beam by
//! beam in increasing beam index, each beam taking the best user not already
//! chosen for an earlier beam, so no user is served twice on one subcarrier.

mod assignment;
mod feedback;
mod oracle;
mod record;

pub use assignment::{Assignment, Link, SubcarrierDecision};
pub use feedback::{
    make_feedback, schedule_from_feedback, schedule_reported_best, BestPair, FeedbackMode,
    FeedbackReport, UserReport,
};
pub use oracle::{brute_force_schedule, BRUTE_FORCE_LIMIT};
pub use record::{write_assignment_header, write_assignment_records};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::channel::EquivalentGains;
use crate::{Error, Result};

/// Equal per-beam transmit power and noise power used for scheduling SINRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualPower {
    pub power: f64,
    pub noise: f64,
}

impl EqualPower {
    pub fn new(power: f64, noise: f64) -> Result<Self> {
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::Argument(format!("per-beam power must be > 0, got {power}")));
        }
        if !(noise > 0.0) || !noise.is_finite() {
            return Err(Error::Argument(format!("noise power must be > 0, got {noise}")));
        }
        Ok(Self { power, noise })
    }

    /// SINR on beam `q` when the beams in `active` all transmit with equal
    /// power. `row` holds the user's gains on every beam.
    #[inline]
    pub fn sinr(&self, row: &[f64], q: usize, active: &[usize]) -> f64 {
        let interference: f64 = active.iter().filter(|&&s| s != q).map(|&s| row[s]).sum();
        self.power * row[q] / (self.noise + self.power * interference)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant", content = "q")]
pub enum QPolicy {
    /// Search every `Q` in `1..=min(N_T, K)`.
    Dynamic,
    /// Always `Q` beams.
    Fixed(usize),
    /// All `N_T` beams, single combination.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchedulerMode {
    pub q_policy: QPolicy,
    /// Weight per-beam utilities by the rate prices `mu`.
    pub weighted: bool,
}

impl SchedulerMode {
    pub fn new(q_policy: QPolicy, weighted: bool) -> Self {
        Self { q_policy, weighted }
    }

    pub fn validate(&self, antennas: usize) -> Result<()> {
        if let QPolicy::Fixed(q) = self.q_policy {
            if q == 0 || q > antennas {
                return Err(Error::Argument(format!(
                    "fixed Q must be in 1..={antennas}, got {q}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-link utility: `mu_k log2(1 + sinr)` when weighted, else `log2(1 + sinr)`.
#[inline]
pub(crate) fn utility(weights: Option<&[f64]>, k: usize, sinr: f64) -> f64 {
    let rate = sinr.ln_1p() / std::f64::consts::LN_2;
    match weights {
        Some(mu) => mu[k] * rate,
        None => rate,
    }
}

/// Selection score for one beam: plain SINR unweighted, weighted rate otherwise.
#[inline]
fn beam_score(weights: Option<&[f64]>, k: usize, sinr: f64) -> f64 {
    match weights {
        Some(_) => utility(weights, k, sinr),
        None => sinr,
    }
}

/// All `q`-subsets of `0..n` in lexicographic order; index in this list is
/// the combination index `j`.
pub fn beam_combinations(n: usize, q: usize) -> Vec<SmallVec<[usize; 8]>> {
    let mut out = Vec::new();
    if q == 0 || q > n {
        return out;
    }
    let mut idx: SmallVec<[usize; 8]> = (0..q).collect();
    loop {
        out.push(idx.clone());
        let mut i = q;
        while i > 0 && idx[i - 1] == n - q + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for t in i..q {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Equal-power SINR of user `k` on beam `q` of subcarrier `m` with active
/// beam set `active`.
pub fn sinr_equal_power(
    gains: &EquivalentGains,
    k: usize,
    m: usize,
    q: usize,
    active: &[usize],
    power: f64,
    noise: f64,
) -> Result<f64> {
    if !active.contains(&q) {
        return Err(Error::Argument(format!("beam {q} is not in the active set {active:?}")));
    }
    Ok(EqualPower::new(power, noise)?.sinr(gains.row(k, m), q, active))
}

/// Best user for beam `q` among those with `available[k] == true`, given
/// active beams `active`. Ties go to the lowest user index.
pub fn select_user_for_beam(
    gains: &EquivalentGains,
    m: usize,
    active: &[usize],
    q: usize,
    available: &[bool],
    budget: EqualPower,
    weights: Option<&[f64]>,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (k, _) in available.iter().enumerate().filter(|(_, a)| **a) {
        let sinr = budget.sinr(gains.row(k, m), q, active);
        let score = beam_score(weights, k, sinr);
        if best.is_none_or(|(_, _, s)| score > s) {
            best = Some((k, sinr, score));
        }
    }
    best.map(|(k, sinr, _)| (k, sinr))
}

/// Greedy user assignment for one beam combination.
fn assign_combination(
    gains: &EquivalentGains,
    m: usize,
    combination: &[usize],
    budget: EqualPower,
    weights: Option<&[f64]>,
    taken: &mut [bool],
) -> (SmallVec<[Link; 4]>, f64) {
    taken.fill(false);
    let mut links = SmallVec::new();
    let mut objective = 0.0;
    for &q in combination {
        let (mut user, mut sinr, mut score) = (usize::MAX, 0.0, f64::NEG_INFINITY);
        for (k, &t) in taken.iter().enumerate() {
            if t {
                continue;
            }
            let s = budget.sinr(gains.row(k, m), q, combination);
            let v = beam_score(weights, k, s);
            if v > score || user == usize::MAX {
                (user, sinr, score) = (k, s, v);
            }
        }
        assert!(user != usize::MAX, "caller guarantees K >= Q");
        taken[user] = true;
        objective += match weights {
            Some(_) => score,
            None => utility(None, user, sinr),
        };
        links.push(Link { beam: q, user, sinr });
    }
    (links, objective)
}

fn check_subcarrier(gains: &EquivalentGains, m: usize, weights: Option<&[f64]>) -> Result<()> {
    if m >= gains.subcarriers() {
        return Err(Error::Argument(format!(
            "subcarrier {m} out of range (M = {})",
            gains.subcarriers()
        )));
    }
    if let Some(mu) = weights {
        if mu.len() != gains.users() {
            return Err(Error::Dimension(format!(
                "expected {} weights, got {}",
                gains.users(),
                mu.len()
            )));
        }
    }
    Ok(())
}

/// Reusable per-frame search state.
struct Searcher {
    tables: Vec<Vec<SmallVec<[usize; 8]>>>,
    taken: Vec<bool>,
}

impl Searcher {
    fn new(antennas: usize, users: usize) -> Self {
        Self {
            tables: (0..=antennas).map(|q| beam_combinations(antennas, q)).collect(),
            taken: vec![false; users],
        }
    }

    fn decide(
        &mut self,
        gains: &EquivalentGains,
        m: usize,
        policy: QPolicy,
        budget: EqualPower,
        weights: Option<&[f64]>,
    ) -> Result<SubcarrierDecision> {
        let (users, antennas) = (gains.users(), gains.beams());
        let q_range = match policy {
            QPolicy::Dynamic => 1..=antennas.min(users),
            QPolicy::Fixed(q) => q..=q,
            QPolicy::Full => antennas..=antennas,
        };
        let &q_max = q_range.end();
        if q_max == 0 || q_max > antennas {
            return Err(Error::Argument(format!("Q = {q_max} outside 1..={antennas}")));
        }
        if users < *q_range.start() {
            return Err(Error::Infeasible(format!(
                "{users} users cannot fill {} beams without repetition",
                q_range.start()
            )));
        }
        // Strict improvement keeps the earliest candidate, i.e. the smallest
        // Q and then the lowest combination index.
        let mut best: Option<SubcarrierDecision> = None;
        for q in q_range {
            for (j, combination) in self.tables[q].iter().enumerate() {
                let (links, objective) =
                    assign_combination(gains, m, combination, budget, weights, &mut self.taken);
                if best.as_ref().is_none_or(|b| objective > b.objective) {
                    best = Some(SubcarrierDecision {
                        combination_size: q,
                        combination: j,
                        links,
                        objective,
                    });
                }
            }
        }
        Ok(best.expect("nonempty Q range"))
    }
}

/// Best beam combination with exactly `q` beams on subcarrier `m`. Ties go
/// to the lowest combination index.
pub fn select_beam_combination(
    gains: &EquivalentGains,
    m: usize,
    q: usize,
    budget: EqualPower,
    weights: Option<&[f64]>,
) -> Result<SubcarrierDecision> {
    check_subcarrier(gains, m, weights)?;
    Searcher::new(gains.beams(), gains.users()).decide(gains, m, QPolicy::Fixed(q), budget, weights)
}

/// Scheduling decision for subcarrier `m` under `policy`. Ties between
/// different `Q` go to the smaller `Q`.
pub fn select_q(
    gains: &EquivalentGains,
    m: usize,
    policy: QPolicy,
    budget: EqualPower,
    weights: Option<&[f64]>,
) -> Result<SubcarrierDecision> {
    check_subcarrier(gains, m, weights)?;
    Searcher::new(gains.beams(), gains.users()).decide(gains, m, policy, budget, weights)
}

/// Schedules every subcarrier independently.
///
/// `weights` are the current rate prices; they are used only when
/// `mode.weighted` is set.
pub fn schedule_frame(
    gains: &EquivalentGains,
    mode: SchedulerMode,
    budget: EqualPower,
    weights: Option<&[f64]>,
) -> Result<Assignment> {
    mode.validate(gains.beams())?;
    let weights = if mode.weighted {
        Some(weights.ok_or_else(|| {
            Error::Argument("weighted scheduling needs rate prices".into())
        })?)
    } else {
        None
    };
    check_subcarrier(gains, 0, weights)?;
    let mut searcher = Searcher::new(gains.beams(), gains.users());
    let decisions = (0..gains.subcarriers())
        .map(|m| searcher.decide(gains, m, mode.q_policy, budget, weights))
        .collect::<Result<Vec<_>>>()?;
    Ok(Assignment::new(gains.users(), gains.beams(), decisions))
}
