use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{check_dims, ChannelState};
use crate::rng::rng_from_seed;
use crate::Result;

/// Draws i.i.d. circularly-symmetric complex Gaussian entries with unit
/// variance for every (user, subcarrier, antenna).
pub fn gen_rayleigh_iid(
    seed: u64,
    users: usize,
    subcarriers: usize,
    antennas: usize,
) -> Result<ChannelState> {
    let mut rng = rng_from_seed(seed);
    gen_rayleigh_with(&mut rng, users, subcarriers, antennas)
}

pub fn gen_rayleigh_with<R: Rng + ?Sized>(
    rng: &mut R,
    users: usize,
    subcarriers: usize,
    antennas: usize,
) -> Result<ChannelState> {
    check_dims(users, subcarriers, antennas)?;
    let n = users * subcarriers * antennas;
    let values = (0..n).map(|_| complex_gaussian(rng)).collect();
    ChannelState::new(users, subcarriers, antennas, values)
}

/// Unit-variance CN(0, 1) sample.
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
