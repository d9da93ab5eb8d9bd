use serde::{Deserialize, Serialize};

use super::project_onto_d;
use crate::{Error, Result};

/// Power price `lambda`, rate prices `mu`, rate weights `phi` and step size.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub lambda: f64,
    pub mu: Vec<f64>,
    pub phi: Vec<f64>,
    pub delta: f64,
}

/// One slot's outcome as seen by the price update.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotSample {
    pub total_power: f64,
    pub rates: Vec<f64>,
}

/// Step size as a function of the slot index.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StepSchedule {
    #[default]
    Constant,
    /// `delta_n = delta_0 / (1 + n / slots)`.
    Decaying { slots: f64 },
}

impl StepSchedule {
    pub fn step(&self, delta0: f64, slot: usize) -> f64 {
        match *self {
            StepSchedule::Constant => delta0,
            StepSchedule::Decaying { slots } => delta0 / (1.0 + slot as f64 / slots),
        }
    }
}

pub(crate) fn validate_phi(phi: &[f64]) -> Result<()> {
    if phi.is_empty() {
        return Err(Error::config("phi", "at least one weight is required"));
    }
    if phi.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(Error::config("phi", "weights must be positive"));
    }
    let total: f64 = phi.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::config("phi", format!("weights must sum to 1 (sum is {total})")));
    }
    Ok(())
}

/// `lambda = 1`, `mu = phi / (phi^T phi)`, `delta = 0.01`.
pub fn init_dual(phi: &[f64]) -> Result<DualState> {
    validate_phi(phi)?;
    let norm: f64 = phi.iter().map(|p| p * p).sum();
    Ok(DualState {
        lambda: 1.0,
        mu: phi.iter().map(|p| p / norm).collect(),
        phi: phi.to_vec(),
        delta: 0.01,
    })
}

fn apply_step(state: &DualState, power_gap: f64, rate_gap: &[f64], step: f64) -> DualState {
    let lambda = (state.lambda - step * power_gap).max(0.0);
    let raw: Vec<f64> = state
        .mu
        .iter()
        .zip(rate_gap)
        .map(|(mu, g)| mu - step * g)
        .collect();
    DualState {
        lambda,
        mu: project_onto_d(&raw, &state.phi),
        phi: state.phi.clone(),
        delta: state.delta,
    }
}

fn rate_gap(rates: &[f64], phi: &[f64]) -> Vec<f64> {
    let total: f64 = rates.iter().sum();
    rates.iter().zip(phi).map(|(r, p)| r - p * total).collect()
}

/// One stochastic subgradient step driven by a single slot:
///
/// ```text
/// lambda <- [lambda - delta (p_bar - P[n])]^+
/// mu     <- Proj_D(mu - delta (R[n] - phi * sum_k R_k[n]))
/// ```
pub fn dual_update_stochastic(
    state: &DualState,
    total_power: f64,
    rates: &[f64],
    p_bar: f64,
) -> DualState {
    assert_eq!(rates.len(), state.mu.len(), "one rate per user");
    apply_step(
        state,
        p_bar - total_power,
        &rate_gap(rates, &state.phi),
        state.delta,
    )
}

/// Sample-average subgradient step: draws `batch_size` slots under the
/// current prices, averages power and per-user rates, then steps once with
/// `step`.
pub fn dual_update_batch<F>(
    state: &DualState,
    mut sampler: F,
    batch_size: usize,
    step: f64,
    p_bar: f64,
) -> Result<DualState>
where
    F: FnMut(&DualState) -> Result<SlotSample>,
{
    if batch_size == 0 {
        return Err(Error::Argument("batch size must be >= 1".into()));
    }
    let users = state.mu.len();
    let mut mean_power = 0.0;
    let mut mean_rates = vec![0.0; users];
    for _ in 0..batch_size {
        let sample = sampler(state)?;
        if sample.rates.len() != users {
            return Err(Error::Dimension(format!(
                "sampler returned {} rates for {users} users",
                sample.rates.len()
            )));
        }
        mean_power += sample.total_power;
        for (acc, r) in mean_rates.iter_mut().zip(&sample.rates) {
            *acc += r;
        }
    }
    let n = batch_size as f64;
    mean_power /= n;
    mean_rates.iter_mut().for_each(|r| *r /= n);
    Ok(apply_step(
        state,
        p_bar - mean_power,
        &rate_gap(&mean_rates, &state.phi),
        step,
    ))
}
