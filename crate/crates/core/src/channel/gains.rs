use num_complex::Complex64;

use super::{check_dims, BeamSet, ChannelState};
use crate::{Error, Result};

/// Per-beam equivalent power gains `c[k, m, q] = |h[k, m]^T b[m, q]|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentGains {
    users: usize,
    subcarriers: usize,
    beams: usize,
    // (k * M + m) * N_T + q
    values: Vec<f64>,
}

impl EquivalentGains {
    pub fn new(users: usize, subcarriers: usize, beams: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(users, subcarriers, beams)?;
        if values.len() != users * subcarriers * beams {
            return Err(Error::Dimension(format!(
                "expected {} gains, got {}",
                users * subcarriers * beams,
                values.len()
            )));
        }
        if values.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Domain("gains must be finite and nonnegative".into()));
        }
        Ok(Self {
            users,
            subcarriers,
            beams,
            values,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn beams(&self) -> usize {
        self.beams
    }

    #[inline]
    pub fn get(&self, k: usize, m: usize, q: usize) -> f64 {
        self.values[(k * self.subcarriers + m) * self.beams + q]
    }

    /// Gains of user `k` on every beam of subcarrier `m`.
    #[inline]
    pub fn row(&self, k: usize, m: usize) -> &[f64] {
        let start = (k * self.subcarriers + m) * self.beams;
        &self.values[start..start + self.beams]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Restriction to a single subcarrier.
    pub fn subcarrier(&self, m: usize) -> EquivalentGains {
        let values = (0..self.users)
            .flat_map(|k| self.row(k, m).iter().copied())
            .collect();
        EquivalentGains {
            users: self.users,
            subcarriers: 1,
            beams: self.beams,
            values,
        }
    }

    /// Keeps only the first `users` users.
    pub fn first_users(&self, users: usize) -> EquivalentGains {
        let users = users.min(self.users);
        EquivalentGains {
            users,
            subcarriers: self.subcarriers,
            beams: self.beams,
            values: self.values[..users * self.subcarriers * self.beams].to_vec(),
        }
    }
}

pub fn equivalent_gains(channel: &ChannelState, beams: &BeamSet) -> Result<EquivalentGains> {
    if channel.subcarriers() != beams.subcarriers() || channel.antennas() != beams.antennas() {
        return Err(Error::Dimension(format!(
            "channel is {}x{} (M x N_T) but beams are {}x{}",
            channel.subcarriers(),
            channel.antennas(),
            beams.subcarriers(),
            beams.antennas()
        )));
    }
    let (users, subcarriers, n) = (channel.users(), channel.subcarriers(), channel.antennas());
    let mut values = Vec::with_capacity(users * subcarriers * n);
    for k in 0..users {
        for m in 0..subcarriers {
            let h = channel.vector(k, m);
            for q in 0..n {
                // plain transpose, no conjugate on h
                let inner: Complex64 = h.iter().zip(beams.beam(m, q)).map(|(a, b)| a * b).sum();
                values.push(inner.norm_sqr());
            }
        }
    }
    Ok(EquivalentGains {
        users,
        subcarriers,
        beams: n,
        values,
    })
}
