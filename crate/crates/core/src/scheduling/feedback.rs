//! Feedback payloads and feedback-driven scheduling.
//!
//! * Mode A: every user returns all `N_T * M` equivalent gains and the base
//!   station runs the full search.
//! * Mode B: `Q` is fixed and known to the users. Each user returns, per
//!   subcarrier, its best beam, the combination that beam belongs to and the
//!   SINR under that combination (`3 * M` values).
//! * Mode C: `Q = N_T`, one combination; each user returns its best beam and
//!   SINR (`2 * M` values).
//!
//! In modes B and C the base station only learns one (combination, beam)
//! pair per user and subcarrier, so each beam goes to the best user among
//! those that reported it, and beams nobody reported stay idle.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::{
    beam_combinations, beam_score, schedule_frame, utility, Assignment, EqualPower, Link,
    SchedulerMode, SubcarrierDecision,
};
use crate::channel::EquivalentGains;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeedbackMode {
    A,
    B,
    C,
}

/// A user's best (combination, beam) pair on one subcarrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestPair {
    pub beam: usize,
    pub combination: usize,
    pub sinr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UserReport {
    /// `N_T * M` gains, subcarrier-major.
    Gains(Vec<f64>),
    /// Per subcarrier `(q*, j*, sinr)`.
    FixedQ(Vec<BestPair>),
    /// Per subcarrier `(q*, sinr)`; the combination is always the full set.
    FullQ(Vec<BestPair>),
}

impl UserReport {
    /// Number of scalar values this report puts on the feedback link.
    pub fn value_count(&self) -> usize {
        match self {
            UserReport::Gains(g) => g.len(),
            UserReport::FixedQ(p) => 3 * p.len(),
            UserReport::FullQ(p) => 2 * p.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackReport {
    pub mode: FeedbackMode,
    pub antennas: usize,
    pub subcarriers: usize,
    /// Beams per combination the users assumed (`N_T` in modes A and C).
    pub q: usize,
    pub users: Vec<UserReport>,
}

impl FeedbackReport {
    pub fn value_count(&self, k: usize) -> usize {
        self.users[k].value_count()
    }
}

/// Best pair of one user by SINR; ties go to the lower combination, then
/// the lower beam.
fn best_pair(row: &[f64], combinations: &[SmallVec<[usize; 8]>], budget: EqualPower) -> BestPair {
    let mut best = BestPair {
        beam: combinations[0][0],
        combination: 0,
        sinr: f64::NEG_INFINITY,
    };
    for (j, combination) in combinations.iter().enumerate() {
        for &q in combination {
            let sinr = budget.sinr(row, q, combination);
            if sinr > best.sinr {
                best = BestPair {
                    beam: q,
                    combination: j,
                    sinr,
                };
            }
        }
    }
    best
}

/// Builds the per-user feedback for one frame.
pub fn make_feedback(
    gains: &EquivalentGains,
    mode: FeedbackMode,
    budget: EqualPower,
    fixed_q: Option<usize>,
) -> Result<FeedbackReport> {
    let (users, subcarriers, antennas) = (gains.users(), gains.subcarriers(), gains.beams());
    let q = match mode {
        FeedbackMode::A | FeedbackMode::C => antennas,
        FeedbackMode::B => {
            let q = fixed_q.ok_or_else(|| {
                Error::Argument("feedback mode B needs the fixed number of beams Q".into())
            })?;
            if q == 0 || q > antennas {
                return Err(Error::Argument(format!("fixed Q must be in 1..={antennas}, got {q}")));
            }
            q
        }
    };
    let combinations = beam_combinations(antennas, q);
    let reports = (0..users)
        .map(|k| match mode {
            FeedbackMode::A => UserReport::Gains(
                (0..subcarriers).flat_map(|m| gains.row(k, m).iter().copied()).collect(),
            ),
            FeedbackMode::B => UserReport::FixedQ(
                (0..subcarriers)
                    .map(|m| best_pair(gains.row(k, m), &combinations, budget))
                    .collect(),
            ),
            FeedbackMode::C => UserReport::FullQ(
                (0..subcarriers)
                    .map(|m| best_pair(gains.row(k, m), &combinations, budget))
                    .collect(),
            ),
        })
        .collect();
    Ok(FeedbackReport {
        mode,
        antennas,
        subcarriers,
        q,
        users: reports,
    })
}

/// Per subcarrier: for each combination, each beam takes the best user among
/// those that reported (combination, beam); the combination with the largest
/// objective wins, ties to the lowest index.
fn assign_reported(
    pairs: &[&[BestPair]],
    m: usize,
    q: usize,
    combinations: &[SmallVec<[usize; 8]>],
    weights: Option<&[f64]>,
) -> SubcarrierDecision {
    let mut best: Option<SubcarrierDecision> = None;
    for (j, combination) in combinations.iter().enumerate() {
        let mut links = SmallVec::new();
        let mut objective = 0.0;
        for &beam in combination {
            let mut chosen: Option<(usize, f64, f64)> = None;
            for (k, reports) in pairs.iter().enumerate() {
                let p = reports[m];
                if p.combination != j || p.beam != beam {
                    continue;
                }
                let score = beam_score(weights, k, p.sinr);
                if chosen.is_none_or(|(_, _, s)| score > s) {
                    chosen = Some((k, p.sinr, score));
                }
            }
            if let Some((user, sinr, _)) = chosen {
                objective += utility(weights, user, sinr);
                links.push(Link { beam, user, sinr });
            }
        }
        if best.as_ref().is_none_or(|b| objective > b.objective) {
            best = Some(SubcarrierDecision {
                combination_size: q,
                combination: j,
                links,
                objective,
            });
        }
    }
    best.expect("at least one combination")
}

/// Schedules a frame from feedback alone.
///
/// Mode A reconstructs the gains and runs [`schedule_frame`] with `mode`;
/// modes B and C use the reported pairs. `weights` are the base station's
/// rate prices and are applied when `mode.weighted` is set.
pub fn schedule_from_feedback(
    report: &FeedbackReport,
    mode: SchedulerMode,
    budget: EqualPower,
    weights: Option<&[f64]>,
) -> Result<Assignment> {
    let users = report.users.len();
    let weights = if mode.weighted {
        let mu = weights
            .ok_or_else(|| Error::Argument("weighted scheduling needs rate prices".into()))?;
        if mu.len() != users {
            return Err(Error::Dimension(format!("expected {users} weights, got {}", mu.len())));
        }
        Some(mu)
    } else {
        None
    };
    if report.mode == FeedbackMode::A {
        let values = report
            .users
            .iter()
            .map(|r| match r {
                UserReport::Gains(g) => Ok(g.as_slice()),
                _ => Err(Error::Argument("mode A report carries non-gain payload".into())),
            })
            .collect::<Result<Vec<_>>>()?
            .concat();
        let gains = EquivalentGains::new(users, report.subcarriers, report.antennas, values)?;
        return schedule_frame(&gains, mode, budget, weights);
    }
    let pairs = report
        .users
        .iter()
        .map(|r| match r {
            UserReport::FixedQ(p) | UserReport::FullQ(p) if p.len() == report.subcarriers => {
                Ok(p.as_slice())
            }
            _ => Err(Error::Argument("inconsistent feedback payload".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    let combinations = beam_combinations(report.antennas, report.q);
    let decisions = (0..report.subcarriers)
        .map(|m| assign_reported(&pairs, m, report.q, &combinations, weights))
        .collect();
    Ok(Assignment::new(users, report.antennas, decisions))
}

/// Full-information version of the mode B/C rule: the base station sees all
/// gains but still lets every user compete only on its own best pair.
pub fn schedule_reported_best(
    gains: &EquivalentGains,
    q: usize,
    budget: EqualPower,
    weights: Option<&[f64]>,
) -> Result<Assignment> {
    let (users, antennas) = (gains.users(), gains.beams());
    if q == 0 || q > antennas {
        return Err(Error::Argument(format!("Q must be in 1..={antennas}, got {q}")));
    }
    if let Some(mu) = weights {
        if mu.len() != users {
            return Err(Error::Dimension(format!("expected {users} weights, got {}", mu.len())));
        }
    }
    let combinations = beam_combinations(antennas, q);
    let mut decisions = Vec::with_capacity(gains.subcarriers());
    for m in 0..gains.subcarriers() {
        // each user's favourite (j, beam) from the raw gains
        let favourite: Vec<(usize, usize, f64)> = (0..users)
            .map(|k| {
                let row = gains.row(k, m);
                let mut fav = (0, combinations[0][0], f64::NEG_INFINITY);
                for (j, combination) in combinations.iter().enumerate() {
                    for &beam in combination {
                        let sinr = budget.sinr(row, beam, combination);
                        if sinr > fav.2 {
                            fav = (j, beam, sinr);
                        }
                    }
                }
                fav
            })
            .collect();
        let mut best: Option<SubcarrierDecision> = None;
        for (j, combination) in combinations.iter().enumerate() {
            let mut links: SmallVec<[Link; 4]> = SmallVec::new();
            for &beam in combination {
                let winner = (0..users)
                    .filter(|&k| favourite[k].0 == j && favourite[k].1 == beam)
                    .fold(None::<(usize, f64)>, |acc, k| {
                        let s = beam_score(weights, k, favourite[k].2);
                        match acc {
                            Some((_, best_s)) if best_s >= s => acc,
                            _ => Some((k, s)),
                        }
                    });
                if let Some((user, _)) = winner {
                    links.push(Link {
                        beam,
                        user,
                        sinr: favourite[user].2,
                    });
                }
            }
            let objective = links.iter().map(|l| utility(weights, l.user, l.sinr)).sum();
            if best.as_ref().is_none_or(|b| objective > b.objective) {
                best = Some(SubcarrierDecision {
                    combination_size: q,
                    combination: j,
                    links,
                    objective,
                });
            }
        }
        decisions.push(best.expect("at least one combination"));
    }
    Ok(Assignment::new(users, antennas, decisions))
}
