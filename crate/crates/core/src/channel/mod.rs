//! Channel realizations, random orthonormal beams and equivalent gains.

mod beams;
mod dump;
mod gains;
mod large_scale;
mod multipath;
mod rayleigh;

pub use beams::{gen_orthonormal_beams, random_unitary, BeamMode, BeamSet};
pub use dump::{write_channel_dump, write_channel_dump_header};
pub use gains::{equivalent_gains, EquivalentGains};
pub use large_scale::{
    fixed_ring_positions, gen_shadowing, path_loss_db, uniform_disk_positions, LargeScaleParams,
    Position,
};
pub use multipath::{
    gen_multipath_series, pedestrian_profile, FastFadingParams, JakesProcess, MultipathChannel,
    Tap, SINUSOIDS_PER_TAP,
};
pub use rayleigh::{gen_rayleigh_iid, gen_rayleigh_with};

use num_complex::Complex64;

use crate::{Error, Result};

/// Complex channel vectors `h[k, m]` of length `N_T` for every user and
/// subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    users: usize,
    subcarriers: usize,
    antennas: usize,
    // (k * M + m) * N_T + antenna
    values: Vec<Complex64>,
}

pub(crate) fn check_dims(users: usize, subcarriers: usize, antennas: usize) -> Result<()> {
    if users == 0 || subcarriers == 0 || antennas == 0 {
        return Err(Error::Dimension(format!(
            "users, subcarriers and antennas must be >= 1 (got K={users}, M={subcarriers}, N_T={antennas})"
        )));
    }
    Ok(())
}

impl ChannelState {
    pub fn new(
        users: usize,
        subcarriers: usize,
        antennas: usize,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        check_dims(users, subcarriers, antennas)?;
        if values.len() != users * subcarriers * antennas {
            return Err(Error::Dimension(format!(
                "expected {} channel entries, got {}",
                users * subcarriers * antennas,
                values.len()
            )));
        }
        if values.iter().any(|h| !h.re.is_finite() || !h.im.is_finite()) {
            return Err(Error::Domain("channel entries must be finite".into()));
        }
        Ok(Self {
            users,
            subcarriers,
            antennas,
            values,
        })
    }

    pub fn zeros(users: usize, subcarriers: usize, antennas: usize) -> Result<Self> {
        check_dims(users, subcarriers, antennas)?;
        Ok(Self {
            users,
            subcarriers,
            antennas,
            values: vec![Complex64::new(0.0, 0.0); users * subcarriers * antennas],
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    /// The channel vector of user `k` on subcarrier `m`.
    pub fn vector(&self, k: usize, m: usize) -> &[Complex64] {
        let start = (k * self.subcarriers + m) * self.antennas;
        &self.values[start..start + self.antennas]
    }

    pub fn vector_mut(&mut self, k: usize, m: usize) -> &mut [Complex64] {
        let start = (k * self.subcarriers + m) * self.antennas;
        &mut self.values[start..start + self.antennas]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Multiplies every entry of user `k` by `amplitude`.
    pub fn scale_user(&mut self, k: usize, amplitude: f64) {
        let len = self.subcarriers * self.antennas;
        for h in &mut self.values[k * len..(k + 1) * len] {
            *h *= amplitude;
        }
    }
}
