//! Exhaustive search over beam subsets and injective user assignments.

use smallvec::SmallVec;

use super::{beam_combinations, utility, EqualPower, Link, SubcarrierDecision};
use crate::channel::EquivalentGains;
use crate::{Error, Result};

/// Upper bound on the number of (subset, assignment) candidates.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

fn candidate_count(users: usize, antennas: usize) -> u128 {
    let mut total: u128 = 0;
    for q in 1..=antennas.min(users) {
        let subsets = beam_combinations(antennas, q).len() as u128;
        let arrangements: u128 = ((users - q + 1)..=users).map(|x| x as u128).product();
        total = total.saturating_add(subsets.saturating_mul(arrangements));
    }
    total
}

/// Best (weighted) sum-log-rate decision on subcarrier `m` over every
/// `Q`, every beam subset and every injective beam-to-user map. Ties go to
/// the first candidate in (Q, combination, user tuple) lexicographic order.
pub fn brute_force_schedule(
    gains: &EquivalentGains,
    m: usize,
    power: f64,
    noise: f64,
    weights: Option<&[f64]>,
) -> Result<SubcarrierDecision> {
    let budget = EqualPower::new(power, noise)?;
    let (users, antennas) = (gains.users(), gains.beams());
    if m >= gains.subcarriers() {
        return Err(Error::Argument(format!("subcarrier {m} out of range")));
    }
    if let Some(mu) = weights {
        if mu.len() != users {
            return Err(Error::Dimension(format!("expected {users} weights, got {}", mu.len())));
        }
    }
    let count = candidate_count(users, antennas);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::Size(format!(
            "{count} candidates for K={users}, N_T={antennas} (limit {BRUTE_FORCE_LIMIT})"
        )));
    }

    let mut best: Option<SubcarrierDecision> = None;
    for q in 1..=antennas.min(users) {
        for (j, combination) in beam_combinations(antennas, q).iter().enumerate() {
            let mut chosen: SmallVec<[usize; 8]> = SmallVec::new();
            let mut used = vec![false; users];
            visit(
                gains,
                m,
                combination,
                budget,
                weights,
                &mut chosen,
                &mut used,
                &mut |assignment, objective| {
                    if best.as_ref().is_none_or(|b| objective > b.objective) {
                        let links = combination
                            .iter()
                            .zip(assignment)
                            .map(|(&beam, &user)| Link {
                                beam,
                                user,
                                sinr: budget.sinr(gains.row(user, m), beam, combination),
                            })
                            .collect();
                        best = Some(SubcarrierDecision {
                            combination_size: q,
                            combination: j,
                            links,
                            objective,
                        });
                    }
                },
            );
        }
    }
    best.ok_or_else(|| Error::Infeasible("no users to schedule".into()))
}

#[allow(clippy::too_many_arguments)]
fn visit(
    gains: &EquivalentGains,
    m: usize,
    combination: &[usize],
    budget: EqualPower,
    weights: Option<&[f64]>,
    chosen: &mut SmallVec<[usize; 8]>,
    used: &mut [bool],
    emit: &mut dyn FnMut(&[usize], f64),
) {
    if chosen.len() == combination.len() {
        let objective = combination
            .iter()
            .zip(chosen.iter())
            .map(|(&beam, &user)| {
                utility(weights, user, budget.sinr(gains.row(user, m), beam, combination))
            })
            .sum();
        emit(chosen, objective);
        return;
    }
    for k in 0..gains.users() {
        if used[k] {
            continue;
        }
        used[k] = true;
        chosen.push(k);
        visit(gains, m, combination, budget, weights, chosen, used, emit);
        chosen.pop();
        used[k] = false;
    }
}
