//! Power allocation over scheduled links and dual price adaptation.
//!
//! Given a schedule, each link `(k, m, q)` gets
//!
//! ```text
//! p = [ mu_k / (lambda ln 2) - 1 / gamma1 ]^+
//! gamma1 = c[k, m, q] / (noise + P * sum_{s active, s != q} c[k, m, s])
//! ```
//!
//! i.e. waterfilling against a slope computed with the co-scheduled beams at
//! the fixed per-beam power `P`. Reported rates then use the powers actually
//! allocated to the co-scheduled beams.

mod dual;
mod projection;

pub use dual::{
    dual_update_batch, dual_update_stochastic, init_dual, DualState, SlotSample, StepSchedule,
};
pub use projection::project_onto_d;

use std::f64::consts::LN_2;

use crate::channel::EquivalentGains;
use crate::scheduling::Assignment;
use crate::{Error, Result};

/// Smallest power price used when forming water levels.
pub const LAMBDA_FLOOR: f64 = 1e-12;

/// Powers and rates for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    users: usize,
    subcarriers: usize,
    /// `p[k * M + m]`, zero where user `k` is not scheduled on `m`.
    pub powers: Vec<f64>,
    /// Waterfilling slopes, same layout as `powers`, zero where unscheduled.
    pub gamma1: Vec<f64>,
    /// `R_k[n] = sum_m log2(1 + sinr)` with the allocated powers.
    pub rates: Vec<f64>,
    pub total_power: f64,
}

impl AllocationResult {
    fn zeros(users: usize, subcarriers: usize) -> Self {
        Self {
            users,
            subcarriers,
            powers: vec![0.0; users * subcarriers],
            gamma1: vec![0.0; users * subcarriers],
            rates: vec![0.0; users],
            total_power: 0.0,
        }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn power(&self, k: usize, m: usize) -> f64 {
        self.powers[k * self.subcarriers + m]
    }

    pub fn sum_rate(&self) -> f64 {
        self.rates.iter().sum()
    }
}

fn check_shapes(gains: &EquivalentGains, assignment: &Assignment) -> Result<()> {
    if gains.users() != assignment.users()
        || gains.subcarriers() != assignment.subcarriers()
        || gains.beams() != assignment.antennas()
    {
        return Err(Error::Dimension(format!(
            "gains are {}x{}x{} but the assignment is {}x{}x{}",
            gains.users(),
            gains.subcarriers(),
            gains.beams(),
            assignment.users(),
            assignment.subcarriers(),
            assignment.antennas()
        )));
    }
    Ok(())
}

/// Interference-fixed SINR slope of the scheduled link `(k, q)` on `m`.
pub fn gamma1_slope(
    gains: &EquivalentGains,
    assignment: &Assignment,
    m: usize,
    k: usize,
    q: usize,
    power: f64,
    noise: f64,
) -> Result<f64> {
    check_shapes(gains, assignment)?;
    let decision = assignment.decision(m);
    if !decision.links.iter().any(|l| l.user == k && l.beam == q) {
        return Err(Error::Argument(format!(
            "user {k} is not scheduled on beam {q} of subcarrier {m}"
        )));
    }
    let row = gains.row(k, m);
    let interference: f64 = decision
        .links
        .iter()
        .filter(|l| l.beam != q)
        .map(|l| power * row[l.beam])
        .sum();
    Ok(row[q] / (noise + interference))
}

/// Waterfilling power for one link.
pub fn waterfill(gamma1: f64, lambda: f64, mu_k: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::PriceDegenerate(lambda));
    }
    if !(mu_k >= 0.0) {
        return Err(Error::Argument(format!("rate price must be >= 0, got {mu_k}")));
    }
    if !(gamma1 >= 0.0) {
        return Err(Error::Argument(format!("SINR slope must be >= 0, got {gamma1}")));
    }
    Ok((mu_k / (lambda * LN_2) - 1.0 / gamma1).max(0.0))
}

/// Realized rates for given per-link powers, interference taken from the
/// powers actually allocated to co-scheduled beams.
fn realized_rates(
    gains: &EquivalentGains,
    assignment: &Assignment,
    noise: f64,
    result: &mut AllocationResult,
) {
    let subcarriers = gains.subcarriers();
    for (m, d) in assignment.decisions().iter().enumerate() {
        for link in &d.links {
            let p = result.powers[link.user * subcarriers + m];
            if p <= 0.0 {
                continue;
            }
            let row = gains.row(link.user, m);
            let interference: f64 = d
                .links
                .iter()
                .filter(|other| other.beam != link.beam)
                .map(|other| result.powers[other.user * subcarriers + m] * row[other.beam])
                .sum();
            let sinr = p * row[link.beam] / (noise + interference);
            result.rates[link.user] += sinr.ln_1p() / LN_2;
        }
    }
}

/// Waterfilling allocation for one slot under the current prices.
pub fn allocate_slot(
    gains: &EquivalentGains,
    assignment: &Assignment,
    dual: &DualState,
    power: f64,
    noise: f64,
) -> Result<AllocationResult> {
    check_shapes(gains, assignment)?;
    if dual.mu.len() != gains.users() {
        return Err(Error::Dimension(format!(
            "expected {} rate prices, got {}",
            gains.users(),
            dual.mu.len()
        )));
    }
    let subcarriers = gains.subcarriers();
    let lambda = dual.lambda.max(LAMBDA_FLOOR);
    let mut result = AllocationResult::zeros(gains.users(), subcarriers);
    for (m, d) in assignment.decisions().iter().enumerate() {
        for link in &d.links {
            let row = gains.row(link.user, m);
            let interference: f64 = d
                .links
                .iter()
                .filter(|l| l.beam != link.beam)
                .map(|l| power * row[l.beam])
                .sum();
            let g1 = row[link.beam] / (noise + interference);
            let p = waterfill(g1, lambda, dual.mu[link.user])?;
            let idx = link.user * subcarriers + m;
            result.gamma1[idx] = g1;
            result.powers[idx] = p;
            result.total_power += p;
        }
    }
    realized_rates(gains, assignment, noise, &mut result);
    Ok(result)
}

/// Uniform power allocation: `total_power / sum_m Q_m` on every scheduled
/// link.
pub fn allocate_uniform(
    gains: &EquivalentGains,
    assignment: &Assignment,
    total_power: f64,
    noise: f64,
) -> Result<AllocationResult> {
    check_shapes(gains, assignment)?;
    let subcarriers = gains.subcarriers();
    let mut result = AllocationResult::zeros(gains.users(), subcarriers);
    let links = assignment.scheduled_links();
    if links == 0 {
        return Ok(result);
    }
    let p = total_power / links as f64;
    for (m, d) in assignment.decisions().iter().enumerate() {
        for link in &d.links {
            result.powers[link.user * subcarriers + m] = p;
        }
    }
    result.total_power = total_power;
    realized_rates(gains, assignment, noise, &mut result);
    Ok(result)
}
