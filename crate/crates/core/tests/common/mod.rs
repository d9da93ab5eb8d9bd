//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use sfsched::channel::{EquivalentGains, FastFadingParams, MultipathChannel, Tap};
use sfsched::simulation::ScenarioConfig;

/// `J0(x) = (1/pi) * int_0^pi cos(x sin t) dt` by composite Simpson.
pub fn bessel_j0(x: f64) -> f64 {
    let n = 4000;
    let h = PI / n as f64;
    let f = |t: f64| (x * t.sin()).cos();
    let mut acc = f(0.0) + f(PI);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0 / PI
}

/// Time-averaged autocorrelation of a 6 Hz Doppler tap sampled every
/// 10 ms, averaged over 8 links.
pub fn jakes_autocorrelation(frames: usize, max_lag: usize) -> Vec<f64> {
    let params = FastFadingParams {
        taps: vec![Tap { delay_s: 0.0, power: 1.0 }],
        doppler_hz: 6.0,
        subcarrier_spacing_hz: 15e3,
        frame_interval_s: 0.01,
    };
    let (users, antennas) = (4, 2);
    let channel = MultipathChannel::new(99, params, users, antennas, 1).unwrap();
    let mut acc = vec![0.0; max_lag + 1];
    for k in 0..users {
        for a in 0..antennas {
            let g: Vec<Complex64> = (0..frames + max_lag)
                .map(|n| channel.tap_value(k, a, 0, n as u64))
                .collect();
            for (lag, out) in acc.iter_mut().enumerate() {
                let r: Complex64 = (0..frames).map(|n| g[n + lag] * g[n].conj()).sum();
                *out += r.re / frames as f64;
            }
        }
    }
    acc.iter().map(|v| v / (users * antennas) as f64).collect()
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Projection onto `{mu >= 0, phi^T mu = 1}` by trying every support set:
/// on support `S` the KKT point is `x_S - theta phi_S` with
/// `theta = (phi_S . x_S - 1) / |phi_S|^2`; keep the closest nonnegative one.
pub fn project_qp_oracle(x: &[f64], phi: &[f64]) -> Vec<f64> {
    let k = x.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let dot: f64 = members.iter().map(|&i| phi[i] * x[i]).sum();
        let norm: f64 = members.iter().map(|&i| phi[i] * phi[i]).sum();
        let theta = (dot - 1.0) / norm;
        let mut mu = vec![0.0; k];
        let mut feasible = true;
        for &i in &members {
            mu[i] = x[i] - theta * phi[i];
            if mu[i] < -1e-12 {
                feasible = false;
            }
        }
        if !feasible {
            continue;
        }
        for v in &mut mu {
            *v = v.max(0.0);
        }
        let dist: f64 = mu.iter().zip(x).map(|(m, xi)| (m - xi) * (m - xi)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, mu));
        }
    }
    best.expect("the set is never empty").1
}

/// Lexicographic `q`-subsets of `0..n`, built recursively.
pub fn subsets(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for s in start..n {
            cur.push(s);
            go(s + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, q, &mut Vec::new(), &mut out);
    out
}

fn sinr(gains: &EquivalentGains, k: usize, m: usize, beam: usize, active: &[usize], p: f64, noise: f64) -> f64 {
    let mut interference = 0.0;
    for &s in active {
        if s != beam {
            interference += gains.get(k, m, s);
        }
    }
    p * gains.get(k, m, beam) / (noise + p * interference)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleDecision {
    pub q: usize,
    pub combination: usize,
    /// `(beam, user)` in increasing beam order.
    pub links: Vec<(usize, usize)>,
    pub objective: f64,
}

/// Greedy-restricted search: every Q in `qs`, every subset, users assigned
/// beam by beam (increasing index) to the best remaining user; first strict
/// maximum wins.
pub fn greedy_oracle(
    gains: &EquivalentGains,
    m: usize,
    qs: &[usize],
    p: f64,
    noise: f64,
    weights: Option<&[f64]>,
) -> OracleDecision {
    let mut best: Option<OracleDecision> = None;
    for &q in qs {
        for (j, set) in subsets(gains.beams(), q).into_iter().enumerate() {
            let mut used = vec![false; gains.users()];
            let mut links = Vec::new();
            let mut objective = 0.0;
            for &beam in &set {
                let mut pick: Option<(usize, f64, f64)> = None;
                for k in 0..gains.users() {
                    if used[k] {
                        continue;
                    }
                    let g = sinr(gains, k, m, beam, &set, p, noise);
                    let score = match weights {
                        Some(mu) => mu[k] * (g.ln_1p() / LN_2),
                        None => g,
                    };
                    if pick.is_none() || score > pick.unwrap().2 {
                        pick = Some((k, g, score));
                    }
                }
                let (k, g, _) = pick.unwrap();
                used[k] = true;
                links.push((beam, k));
                let rate = g.ln_1p() / LN_2;
                objective += match weights {
                    Some(mu) => mu[k] * rate,
                    None => rate,
                };
            }
            if best.as_ref().is_none_or(|b| objective > b.objective) {
                best = Some(OracleDecision { q, combination: j, links, objective });
            }
        }
    }
    best.unwrap()
}

pub const SIMPLE: &str = r#"
scenario = "simple"
users = 5
subcarriers = 64
antennas = 4
slots = 2000
seed = 1
p_bar_db = 10.0
"#;

pub fn config(text: &str) -> ScenarioConfig {
    ScenarioConfig::from_toml_str(text).expect("test config parses")
}

pub fn shipped(name: &str) -> ScenarioConfig {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    ScenarioConfig::from_path(&path).expect("shipped config parses")
}
