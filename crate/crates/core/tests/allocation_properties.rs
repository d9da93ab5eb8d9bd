mod common;

use std::f64::consts::LN_2;

use proptest::prelude::*;
use sfsched::allocation::*;
use sfsched::channel::*;
use sfsched::rng::rng_from_seed;
use sfsched::scheduling::*;
use rand::Rng;

use common::project_qp_oracle;

fn phi_strategy(max_k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, 1..=max_k).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        raw.iter().map(|r| r / total).collect()
    })
}

fn in_d(mu: &[f64], phi: &[f64]) -> bool {
    let dot: f64 = mu.iter().zip(phi).map(|(m, p)| m * p).sum();
    mu.iter().all(|&m| m >= 0.0) && (dot - 1.0).abs() <= 1e-9
}

/// A random point of D: nonnegative direction rescaled onto the hyperplane.
fn random_feasible<R: Rng>(rng: &mut R, phi: &[f64]) -> Vec<f64> {
    let raw: Vec<f64> = phi
        .iter()
        .map(|_| if rng.random::<f64>() < 0.3 { 0.0 } else { rng.random::<f64>() })
        .collect();
    let dot: f64 = raw.iter().zip(phi).map(|(r, p)| r * p).sum();
    if dot == 0.0 {
        let mut v = vec![0.0; phi.len()];
        v[0] = 1.0 / phi[0];
        return v;
    }
    raw.iter().map(|r| r / dot).collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

proptest! {
    #[test]
    fn waterfilling_satisfies_kkt(gamma1 in 1e-4f64..1e4, lambda in 1e-3f64..1e3, mu in 0.0f64..10.0) {
        let p = waterfill(gamma1, lambda, mu).unwrap();
        let level = mu / (lambda * LN_2);
        prop_assert!(p >= 0.0);
        if p > 0.0 {
            prop_assert_eq!(p, level - 1.0 / gamma1);
        } else {
            prop_assert!(level <= 1.0 / gamma1);
        }
    }

    #[test]
    fn higher_power_price_never_raises_power(gamma1 in 1e-4f64..1e4, lambda in 1e-3f64..1e3, bump in 0.0f64..10.0, mu in 0.0f64..10.0) {
        let low = waterfill(gamma1, lambda, mu).unwrap();
        let high = waterfill(gamma1, lambda + bump, mu).unwrap();
        prop_assert!(high <= low);
    }

    #[test]
    fn projection_is_closest_feasible_point(phi in phi_strategy(8), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let x: Vec<f64> = phi.iter().map(|_| rng.random_range(-3.0..6.0)).collect();
        let p = project_onto_d(&x, &phi);
        prop_assert!(in_d(&p, &phi));
        let d = dist2(&p, &x);
        for _ in 0..1000 {
            let y = random_feasible(&mut rng, &phi);
            prop_assert!(d <= dist2(&y, &x) + 1e-12);
        }
    }

    #[test]
    fn projection_matches_active_set_oracle(phi in phi_strategy(8), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let x: Vec<f64> = phi.iter().map(|_| rng.random_range(-5.0..10.0)).collect();
        let p = project_onto_d(&x, &phi);
        let o = project_qp_oracle(&x, &phi);
        for (a, b) in p.iter().zip(&o) {
            prop_assert!((a - b).abs() < 1e-6, "{:?} vs {:?}", p, o);
        }
    }

    #[test]
    fn dual_updates_stay_feasible(phi in phi_strategy(6), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let mut state = init_dual(&phi).unwrap();
        for _ in 0..50 {
            let power = rng.random_range(0.0..30.0);
            let rates: Vec<f64> = phi.iter().map(|_| rng.random_range(0.0..20.0)).collect();
            state = dual_update_stochastic(&state, power, &rates, 10.0);
            prop_assert!(state.lambda >= 0.0);
            prop_assert!(in_d(&state.mu, &phi));
        }
    }
}

#[test]
fn init_dual_examples() {
    let s = init_dual(&[0.5, 0.5]).unwrap();
    assert_eq!((s.lambda, s.delta), (1.0, 0.01));
    assert_eq!(s.mu, vec![1.0, 1.0]);
    assert_eq!(init_dual(&[1.0]).unwrap().mu, vec![1.0]);
}

/// Single user, single subcarrier, two channel states with gains 1 and 4.
/// The batch step over exactly one draw of each state must equal the step
/// taken with the exact expectation.
#[test]
fn batch_update_over_both_states_matches_the_expectation() {
    let noise = 1.0;
    let states = [1.0f64, 4.0];
    let mut draw = 0usize;
    let mut sampler = |dual: &DualState| -> sfsched::Result<SlotSample> {
        let c = states[draw % 2];
        draw += 1;
        let gains = EquivalentGains::new(1, 1, 1, vec![c]).unwrap();
        let a = schedule_frame(&gains, SchedulerMode::new(QPolicy::Full, false), EqualPower::new(1.0, noise).unwrap(), None).unwrap();
        let r = allocate_slot(&gains, &a, dual, 1.0, noise).unwrap();
        Ok(SlotSample { total_power: r.total_power, rates: r.rates })
    };
    let mut state = init_dual(&[1.0]).unwrap();
    state.lambda = 0.5;
    let next = dual_update_batch(&state, &mut sampler, 2, 0.1, 3.0).unwrap();

    // Exact expectation: p(c) = [1/(lambda ln 2) - noise/c]^+, equiprobable states.
    let level = 1.0 / (0.5 * LN_2);
    let powers: Vec<f64> = states.iter().map(|c| (level - noise / c).max(0.0)).collect();
    let mean_power = powers.iter().sum::<f64>() / 2.0;
    let expected_lambda = (0.5 - 0.1 * (3.0 - mean_power)).max(0.0);
    assert!((next.lambda - expected_lambda).abs() < 1e-12, "{} vs {expected_lambda}", next.lambda);
    assert_eq!(next.mu, vec![1.0]);
}

/// Long batches and long stochastic runs settle near the same power price.
#[test]
fn batch_and_stochastic_prices_agree() {
    let noise = 1.0;
    let phi = [0.5, 0.5];
    let budget = EqualPower::new(1.0, noise).unwrap();
    let mode = SchedulerMode::new(QPolicy::Dynamic, true);
    let mut n = 0u64;
    let mut slot = |dual: &DualState| -> sfsched::Result<SlotSample> {
        n += 1;
        let h = gen_rayleigh_iid(n, 2, 16, 2)?;
        let b = gen_orthonormal_beams(n + 1_000_000, 2, 16, BeamMode::PerFrameShared)?;
        let g = equivalent_gains(&h, &b)?;
        let a = schedule_frame(&g, mode, budget, Some(&dual.mu))?;
        let r = allocate_slot(&g, &a, dual, 1.0, noise)?;
        Ok(SlotSample { total_power: r.total_power, rates: r.rates })
    };
    let p_bar = 8.0;

    let mut stochastic = init_dual(&phi).unwrap();
    let mut tail = Vec::new();
    for i in 0..3000 {
        let s = slot(&stochastic).unwrap();
        stochastic = dual_update_stochastic(&stochastic, s.total_power, &s.rates, p_bar);
        if i >= 1500 {
            tail.push(stochastic.lambda);
        }
    }
    let stochastic_lambda = tail.iter().sum::<f64>() / tail.len() as f64;

    let mut batch = init_dual(&phi).unwrap();
    for _ in 0..60 {
        batch = dual_update_batch(&batch, &mut slot, 50, 0.05, p_bar).unwrap();
    }
    let rel = (batch.lambda - stochastic_lambda).abs() / stochastic_lambda;
    assert!(rel < 0.1, "batch {} vs stochastic {stochastic_lambda}", batch.lambda);
}

#[test]
fn allocation_invariants_on_random_slots() {
    let mut rng = rng_from_seed(8);
    for n in 0..200u64 {
        let (users, antennas) = (rng.random_range(1..6), rng.random_range(1..4));
        let g = equivalent_gains(
            &gen_rayleigh_iid(n, users, 8, antennas).unwrap(),
            &gen_orthonormal_beams(n + 77, antennas, 8, BeamMode::PerSubcarrier).unwrap(),
        )
        .unwrap();
        let phi = vec![1.0 / users as f64; users];
        let mut dual = init_dual(&phi).unwrap();
        dual.lambda = rng.random_range(0.05..5.0);
        let a = schedule_frame(&g, SchedulerMode::new(QPolicy::Dynamic, true), EqualPower::new(1.0, 0.5).unwrap(), Some(&dual.mu)).unwrap();
        let r = allocate_slot(&g, &a, &dual, 1.0, 0.5).unwrap();
        let total: f64 = r.powers.iter().sum();
        assert!((total - r.total_power).abs() < 1e-9);
        assert!(r.rates.iter().all(|&x| x >= 0.0));
        for k in 0..users {
            for m in 0..8 {
                let p = r.power(k, m);
                assert!(p >= 0.0);
                if !a.is_scheduled(k, m) {
                    assert_eq!(p, 0.0);
                }
            }
        }
    }
}
