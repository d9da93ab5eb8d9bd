//! Tapped-delay-line fading with Jakes time correlation.
//!
//! Each (user, antenna) link owns one process per tap. A tap process is a
//! sum of [`SINUSOIDS_PER_TAP`] unit complex exponentials whose Doppler
//! shifts come from equally spaced arrival angles with a random offset,
//! each with its own random phase:
//!
//! ```text
//! g(t) = N^(-1/2) * sum_n exp(j (2 pi f_D cos(alpha_n) t + phi_n))
//! alpha_n = (2 pi n + theta) / N
//! ```
//!
//! which has unit power and autocorrelation close to `J0(2 pi f_D tau)`.
//! The response on subcarrier `m` is `sum_l sqrt(P_l) g_l(t) exp(-j 2 pi m df tau_l)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_dims, ChannelState};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

pub const SINUSOIDS_PER_TAP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub delay_s: f64,
    /// Average power, linear.
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastFadingParams {
    pub taps: Vec<Tap>,
    pub doppler_hz: f64,
    pub subcarrier_spacing_hz: f64,
    pub frame_interval_s: f64,
}

impl FastFadingParams {
    pub fn validate(&self) -> Result<()> {
        if self.taps.is_empty() {
            return Err(Error::config("taps", "at least one tap is required"));
        }
        if self
            .taps
            .iter()
            .any(|t| !(t.power >= 0.0) || !(t.delay_s >= 0.0) || !t.delay_s.is_finite())
        {
            return Err(Error::config("taps", "tap delays and powers must be finite and >= 0"));
        }
        let total: f64 = self.taps.iter().map(|t| t.power).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::config(
                "taps",
                format!("tap powers must sum to 1, got {total}"),
            ));
        }
        if !(self.doppler_hz >= 0.0) || !self.doppler_hz.is_finite() {
            return Err(Error::config("doppler_hz", "must be finite and >= 0"));
        }
        if !(self.subcarrier_spacing_hz > 0.0) {
            return Err(Error::config("subcarrier_spacing_hz", "must be > 0"));
        }
        if !(self.frame_interval_s > 0.0) {
            return Err(Error::config("frame_interval_s", "must be > 0"));
        }
        Ok(())
    }
}

/// Four-tap pedestrian-like profile spanning 2.5 us, powers normalized to 1.
///
/// Relative powers 0, -0.9, -4.9 and -8 dB at 0, 0.2, 0.8 and 2.5 us. This
/// is a stand-in with a 2-3 us delay span, not a reproduction of any
/// standardized table.
pub fn pedestrian_profile() -> Vec<Tap> {
    let raw = [(0.0, 0.0), (0.2e-6, -0.9), (0.8e-6, -4.9), (2.5e-6, -8.0)];
    let total: f64 = raw.iter().map(|(_, db)| 10f64.powf(db / 10.0)).sum();
    raw.iter()
        .map(|&(delay_s, db)| Tap {
            delay_s,
            power: 10f64.powf(db / 10.0) / total,
        })
        .collect()
}

/// Sum-of-sinusoids Rayleigh process with Jakes Doppler spectrum.
#[derive(Debug, Clone)]
pub struct JakesProcess {
    omegas: [f64; SINUSOIDS_PER_TAP],
    phases: [f64; SINUSOIDS_PER_TAP],
}

impl JakesProcess {
    pub fn new<R: Rng + ?Sized>(rng: &mut R, doppler_hz: f64) -> Self {
        let n = SINUSOIDS_PER_TAP as f64;
        let offset = 2.0 * PI * rng.random::<f64>();
        let mut omegas = [0.0; SINUSOIDS_PER_TAP];
        let mut phases = [0.0; SINUSOIDS_PER_TAP];
        for (i, (w, p)) in omegas.iter_mut().zip(phases.iter_mut()).enumerate() {
            let alpha = (2.0 * PI * i as f64 + offset) / n;
            *w = 2.0 * PI * doppler_hz * alpha.cos();
            *p = 2.0 * PI * rng.random::<f64>();
        }
        Self { omegas, phases }
    }

    pub fn value(&self, t: f64) -> Complex64 {
        let sum: Complex64 = self
            .omegas
            .iter()
            .zip(&self.phases)
            .map(|(w, p)| Complex64::from_polar(1.0, w * t + p))
            .sum();
        sum / (SINUSOIDS_PER_TAP as f64).sqrt()
    }
}

/// Time-evolving frequency-selective channel for `users x antennas` links.
#[derive(Debug, Clone)]
pub struct MultipathChannel {
    params: FastFadingParams,
    users: usize,
    antennas: usize,
    subcarriers: usize,
    // [(k * N_T + antenna) * L + tap]
    processes: Vec<JakesProcess>,
    // [tap * M + m] = sqrt(P_l) exp(-j 2 pi m df tau_l)
    steering: Vec<Complex64>,
}

impl MultipathChannel {
    /// Link `(k, antenna)` is seeded from `(seed, k, antenna)` only, so user
    /// `k` sees the same fading whatever the total user count.
    pub fn new(
        seed: u64,
        params: FastFadingParams,
        users: usize,
        antennas: usize,
        subcarriers: usize,
    ) -> Result<Self> {
        check_dims(users, subcarriers, antennas)?;
        params.validate()?;
        let taps = params.taps.len();
        let mut processes = Vec::with_capacity(users * antennas * taps);
        for k in 0..users {
            for a in 0..antennas {
                let mut rng = rng_from_seed(derive_seed(seed, k as u64, a as u64));
                for _ in 0..taps {
                    processes.push(JakesProcess::new(&mut rng, params.doppler_hz));
                }
            }
        }
        let mut steering = Vec::with_capacity(taps * subcarriers);
        for tap in &params.taps {
            let amp = tap.power.sqrt();
            for m in 0..subcarriers {
                let phase = -2.0 * PI * m as f64 * params.subcarrier_spacing_hz * tap.delay_s;
                steering.push(Complex64::from_polar(amp, phase));
            }
        }
        Ok(Self {
            params,
            users,
            antennas,
            subcarriers,
            processes,
            steering,
        })
    }

    pub fn params(&self) -> &FastFadingParams {
        &self.params
    }

    /// Complex gain of tap `tap` on link `(k, antenna)` at frame `frame`.
    pub fn tap_value(&self, k: usize, antenna: usize, tap: usize, frame: u64) -> Complex64 {
        let taps = self.params.taps.len();
        let t = frame as f64 * self.params.frame_interval_s;
        self.processes[(k * self.antennas + antenna) * taps + tap].value(t)
    }

    /// Channel state at frame `frame` (time `frame * frame_interval`).
    pub fn frame(&self, frame: u64) -> ChannelState {
        let taps = self.params.taps.len();
        let t = frame as f64 * self.params.frame_interval_s;
        let mut state = ChannelState::zeros(self.users, self.subcarriers, self.antennas)
            .expect("dimensions checked at construction");
        let mut tap_values = vec![Complex64::new(0.0, 0.0); taps];
        for k in 0..self.users {
            for a in 0..self.antennas {
                let base = (k * self.antennas + a) * taps;
                for (l, v) in tap_values.iter_mut().enumerate() {
                    *v = self.processes[base + l].value(t);
                }
                for m in 0..self.subcarriers {
                    let h: Complex64 = tap_values
                        .iter()
                        .enumerate()
                        .map(|(l, g)| g * self.steering[l * self.subcarriers + m])
                        .sum();
                    state.vector_mut(k, m)[a] = h;
                }
            }
        }
        state
    }
}

/// Materializes `num_frames` consecutive frames.
pub fn gen_multipath_series(
    seed: u64,
    params: &FastFadingParams,
    users: usize,
    antennas: usize,
    subcarriers: usize,
    num_frames: usize,
) -> Result<Vec<ChannelState>> {
    if num_frames == 0 {
        return Err(Error::Dimension("num_frames must be >= 1".into()));
    }
    let channel = MultipathChannel::new(seed, params.clone(), users, antennas, subcarriers)?;
    Ok((0..num_frames as u64).map(|n| channel.frame(n)).collect())
}
