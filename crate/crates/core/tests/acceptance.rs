//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails. Run with `--nocapture` to see the report.
//!
//! Everything runs inside a single test so that the wall-clock checks do
//! not compete with other tests for the CPU.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use sfsched::allocation::*;
use sfsched::channel::*;
use sfsched::rng::rng_from_seed;
use sfsched::scheduling::*;
use sfsched::simulation::*;

use common::{bessel_j0, correlation, greedy_oracle, jakes_autocorrelation, project_qp_oracle, shipped};

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn check(&mut self, id: &str, name: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {id} {name}: {detail}");
        if !ok {
            self.failures.push(format!("{id} {name}"));
        }
    }
}

fn random_gains(seed: u64, users: usize, subcarriers: usize, antennas: usize) -> EquivalentGains {
    let h = gen_rayleigh_iid(seed, users, subcarriers, antennas).unwrap();
    let b = gen_orthonormal_beams(seed ^ 0xacce, antennas, subcarriers, BeamMode::PerSubcarrier).unwrap();
    equivalent_gains(&h, &b).unwrap()
}

fn proportional_rates_and_power(r: &mut Report) {
    let config = shipped("simple_fig2.cfg");
    let t = Instant::now();
    let run = run_scenario(&config).unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    let s = &run.summary;
    let worst = s
        .normalized_rates
        .iter()
        .map(|x| (x - 0.2).abs() / 0.2)
        .fold(0.0, f64::max);
    r.check(
        "1",
        "proportional rates",
        worst <= 0.10 && elapsed < 60.0,
        format!(
            "normalized {:?}, worst deviation {:.2}% (tol 10%), runtime {elapsed:.2} s (limit 60 s)",
            s.normalized_rates.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>(),
            100.0 * worst
        ),
    );

    let p_bar = config.resolve().unwrap().p_bar;
    let gap = (s.mean_power - p_bar).abs() / p_bar;
    let lambda_max = run.series.lambda.iter().copied().fold(0.0, f64::max);
    let finite = run.series.lambda.iter().all(|l| l.is_finite());
    r.check(
        "2",
        "average power tracking",
        gap <= 0.05 && s.lambda_zero_fraction <= 0.9 && finite,
        format!(
            "mean P {:.4} vs {p_bar:.4} ({:.2}%, tol 5%), lambda zero in {:.1}% of slots (limit 90%), max lambda {lambda_max:.4}",
            s.mean_power,
            100.0 * gap,
            100.0 * s.lambda_zero_fraction
        ),
    );
}

fn class_differentiation(r: &mut Report) {
    let mut config = shipped("simple_fig2.cfg");
    config.users = 9;
    config.weights.class_weights = Some(vec![0.5, 1.0, 1.5]);
    let scenario = config.resolve().unwrap();
    let run = run_scenario(&config).unwrap();
    let rates = &run.summary.mean_rates;
    let total: f64 = rates.iter().sum();
    let mut means = [0.0; 3];
    let mut shares = [0.0; 3];
    for (k, &c) in scenario.classes.iter().enumerate() {
        means[c - 1] += rates[k] / 3.0;
        shares[c - 1] += rates[k] / total;
    }
    let targets = [0.5 / 3.0, 1.0 / 3.0, 1.5 / 3.0];
    let worst = shares
        .iter()
        .zip(&targets)
        .map(|(s, t)| (s - t).abs() / t)
        .fold(0.0, f64::max);
    let ordered = means[0] < means[1] && means[1] < means[2];
    r.check(
        "3",
        "class differentiation",
        ordered && worst <= 0.15,
        format!(
            "class means {:.3?}, shares {:.4?} vs {:.4?}, worst {:.2}% (tol 15%)",
            means,
            shares,
            targets,
            100.0 * worst
        ),
    );
}

fn multiuser_diversity(r: &mut Report) {
    let config = shipped("sweep_fig11.cfg");
    let users = config.sweep.as_ref().unwrap().users.clone();
    let rows = sweep_users(&config, &users).unwrap();
    let sum_up = rows.windows(2).all(|w| w[1].sum_rate >= w[0].sum_rate);
    let class2_down = rows.windows(2).all(|w| w[1].class2_rate <= w[0].class2_rate);
    r.check(
        "4",
        "multiuser diversity trend",
        sum_up && class2_down,
        format!(
            "K {:?}: sum rate {:.2?}, class-2 rate {:.2?}",
            users,
            rows.iter().map(|x| x.sum_rate).collect::<Vec<_>>(),
            rows.iter().map(|x| x.class2_rate).collect::<Vec<_>>()
        ),
    );
}

fn scheduler_oracle(r: &mut Report) {
    let (mut bounded, mut matched) = (0, 0);
    let instances = 500;
    let mut rng = rng_from_seed(500);
    for i in 0..instances {
        let gains = random_gains(10_000 + i, 3, 1, 2);
        let noise = rng.random_range(0.05..2.0);
        let mu: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..3.0)).collect();
        let weights = (i % 2 == 0).then_some(&mu[..]);
        let budget = EqualPower::new(1.0, noise).unwrap();
        let fast = select_q(&gains, 0, QPolicy::Dynamic, budget, weights).unwrap();
        let brute = brute_force_schedule(&gains, 0, 1.0, noise, weights).unwrap();
        let oracle = greedy_oracle(&gains, 0, &[1, 2], 1.0, noise, weights);
        if brute.objective >= fast.objective {
            bounded += 1;
        }
        let links: Vec<(usize, usize)> = fast.links.iter().map(|l| (l.beam, l.user)).collect();
        if (fast.combination_size, fast.combination, &links) == (oracle.q, oracle.combination, &oracle.links)
            && fast.objective.to_bits() == oracle.objective.to_bits()
        {
            matched += 1;
        }
    }
    r.check(
        "5",
        "scheduler oracle",
        bounded == instances && matched == instances,
        format!("brute >= fast in {bounded}/{instances}, bitwise greedy match in {matched}/{instances}"),
    );
}

fn waterfilling_kkt(r: &mut Report) {
    let mut rng = rng_from_seed(6);
    let triples = 10_000;
    let mut ok = 0;
    let mut active = 0;
    for _ in 0..triples {
        let gamma1 = 10f64.powf(rng.random_range(-4.0..4.0));
        let lambda = 10f64.powf(rng.random_range(-3.0..3.0));
        let mu = rng.random_range(0.0..10.0);
        let p = waterfill(gamma1, lambda, mu).unwrap();
        let level = mu / (lambda * std::f64::consts::LN_2);
        let holds = if p > 0.0 {
            active += 1;
            p == level - 1.0 / gamma1
        } else {
            p == 0.0 && level <= 1.0 / gamma1
        };
        if holds {
            ok += 1;
        }
    }
    r.check(
        "6",
        "waterfilling KKT",
        ok == triples,
        format!("{ok}/{triples} triples exact ({active} with positive power)"),
    );
}

fn projection_oracle(r: &mut Report) {
    let mut rng = rng_from_seed(7);
    let (mut worst_dist, mut worst_constraint) = (0.0f64, 0.0f64);
    let mut points = 0;
    for &k in &[2usize, 5, 10] {
        for _ in 0..1000 {
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let phi: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let x: Vec<f64> = (0..k).map(|_| rng.random_range(-5.0..10.0)).collect();
            let p = project_onto_d(&x, &phi);
            let o = project_qp_oracle(&x, &phi);
            for (a, b) in p.iter().zip(&o) {
                worst_dist = worst_dist.max((a - b).abs());
            }
            let dot: f64 = p.iter().zip(&phi).map(|(a, b)| a * b).sum();
            let negative = p.iter().copied().fold(0.0, f64::min).abs();
            worst_constraint = worst_constraint.max((dot - 1.0).abs()).max(negative);
            points += 1;
        }
    }
    r.check(
        "7",
        "projection oracle",
        worst_dist <= 1e-6 && worst_constraint <= 1e-9,
        format!("{points} points, max |proj - oracle| {worst_dist:.2e} (tol 1e-6), max constraint violation {worst_constraint:.2e} (tol 1e-9)"),
    );
}

fn feedback_accounting(r: &mut Report) {
    let (users, subcarriers, antennas) = (6, 64, 4);
    let budget = EqualPower::new(1.0, 0.5).unwrap();
    let mut counts_ok = true;
    let mut equal = 0;
    let frames = 100;
    for f in 0..frames {
        let gains = random_gains(20_000 + f, users, subcarriers, antennas);
        let a = make_feedback(&gains, FeedbackMode::A, budget, None).unwrap();
        let b = make_feedback(&gains, FeedbackMode::B, budget, Some(2)).unwrap();
        let c = make_feedback(&gains, FeedbackMode::C, budget, None).unwrap();
        for k in 0..users {
            counts_ok &= a.value_count(k) == antennas * subcarriers
                && b.value_count(k) == 3 * subcarriers
                && c.value_count(k) == 2 * subcarriers;
        }
        let mu: Vec<f64> = (0..users).map(|k| 0.5 + k as f64 * 0.2).collect();
        let from_report = schedule_from_feedback(&c, SchedulerMode::new(QPolicy::Full, true), budget, Some(&mu)).unwrap();
        let full = schedule_reported_best(&gains, antennas, budget, Some(&mu)).unwrap();
        if from_report == full {
            equal += 1;
        }
    }
    r.check(
        "8",
        "feedback accounting",
        counts_ok && equal == frames,
        format!(
            "payloads {}/{}/{} per user (A/B/C), mode-C reproduction {equal}/{frames} frames",
            antennas * subcarriers,
            3 * subcarriers,
            2 * subcarriers
        ),
    );
}

fn stage_time(rows: &[TimingRow], mode: &str, users: usize, antennas: usize) -> f64 {
    rows.iter()
        .find(|r| r.mode == mode && r.users == users && r.antennas == antennas && r.stage == "scheduling")
        .map(|r| r.seconds)
        .expect("probe row")
}

fn complexity_trends(r: &mut Report) {
    let mut base = shipped("complexity.cfg");
    let scaling = ComplexityConfig {
        users: vec![8, 32],
        antennas: vec![2],
        modes: vec![QPolicyName::Full],
        q: None,
        frames: 200,
        repeats: 7,
    };
    let rows = complexity_probe(&base, &scaling).unwrap();
    let ratio = stage_time(&rows, "full", 32, 2) / stage_time(&rows, "full", 8, 2);

    let dynamic = ComplexityConfig {
        users: vec![16],
        antennas: vec![2, 3, 4],
        modes: vec![QPolicyName::Full, QPolicyName::Dynamic],
        q: None,
        frames: 100,
        repeats: 5,
    };
    let rows = complexity_probe(&base, &dynamic).unwrap();
    let over: Vec<f64> = [2, 3, 4]
        .iter()
        .map(|&n| stage_time(&rows, "dynamic", 16, n) / stage_time(&rows, "full", 16, n))
        .collect();
    let increasing = over.windows(2).all(|w| w[1] > w[0]);
    r.check(
        "9",
        "complexity trends",
        (3.0..=5.0).contains(&ratio) && increasing,
        format!("weighted FullQ K 8->32 ratio {ratio:.2} (window [3, 5]), DynamicQ/FullQ at K=16 for N_T 2,3,4: {over:.2?}"),
    );

    base.scheduler.weighted = false;
    let rows = complexity_probe(&base, &scaling).unwrap();
    let unweighted = stage_time(&rows, "full", 32, 2) / stage_time(&rows, "full", 8, 2);
    println!("       info: unweighted FullQ K 8->32 ratio {unweighted:.2}");
}

fn channel_statistics(r: &mut Report) {
    let lags = jakes_autocorrelation(10_000, 5);
    let jakes_worst = lags
        .iter()
        .enumerate()
        .map(|(lag, v)| (v - bessel_j0(2.0 * PI * 6.0 * 0.01 * lag as f64)).abs())
        .fold(0.0, f64::max);

    let positions = [Position::new(0.0, 0.0), Position::new(10.0, 0.0), Position::new(10.0, 30.0)];
    let samples: Vec<Vec<f64>> = (0..10_000)
        .map(|s| gen_shadowing(s, &positions, 6.0, 20.0).unwrap())
        .collect();
    let column = |i: usize| samples.iter().map(|v| v[i]).collect::<Vec<f64>>();
    let mut shadow_worst = 0.0f64;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let expected = (-positions[i].distance_to(&positions[j]) / 20.0).exp();
            shadow_worst = shadow_worst.max((correlation(&column(i), &column(j)) - expected).abs());
        }
    }

    let mut ortho_worst = 0.0f64;
    for seed in 0..200 {
        for mode in [BeamMode::PerSubcarrier, BeamMode::PerFrameShared] {
            let b = gen_orthonormal_beams(seed, 1 + (seed as usize % 6), 16, mode).unwrap();
            ortho_worst = ortho_worst.max(b.orthonormality_error());
        }
    }
    r.check(
        "10",
        "channel statistics",
        jakes_worst <= 0.05 && shadow_worst <= 0.03 && ortho_worst <= 1e-10,
        format!(
            "Jakes max |r - J0| {jakes_worst:.4} (tol 0.05), shadowing max |rho - exp(-d/20)| {shadow_worst:.4} (tol 0.03), orthonormality {ortho_worst:.1e} (tol 1e-10)"
        ),
    );
}

fn region_dominates_uniform_power(r: &mut Report) {
    let config = shipped("region_fig4.cfg");
    let region = region_sweep(&config, config.region.as_ref().map_or(21, |g| g.points)).unwrap();
    let equal = region
        .points
        .iter()
        .find(|p| (p.phi1 - 0.5).abs() < 1e-12)
        .expect("grid contains 1/2");
    let margin = (equal.r1 + equal.r2) - (region.upa.r1 + region.upa.r2);
    r.check(
        "R",
        "rate region vs uniform power",
        margin > 0.0,
        format!(
            "sum rate at phi=(1/2,1/2): {:.3} vs UPA {:.3}, margin {margin:.3} (must be > 0)",
            equal.r1 + equal.r2,
            region.upa.r1 + region.upa.r2
        ),
    );
}

#[test]
fn acceptance() {
    let mut report = Report { failures: Vec::new() };
    proportional_rates_and_power(&mut report);
    class_differentiation(&mut report);
    multiuser_diversity(&mut report);
    scheduler_oracle(&mut report);
    waterfilling_kkt(&mut report);
    projection_oracle(&mut report);
    feedback_accounting(&mut report);
    complexity_trends(&mut report);
    channel_statistics(&mut report);
    region_dominates_uniform_power(&mut report);
    assert!(report.failures.is_empty(), "failed criteria: {:?}", report.failures);
}
