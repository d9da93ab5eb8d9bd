use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Planar position in meters, base station at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_to_origin(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Path loss and correlated shadowing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeScaleParams {
    /// Intercept in dB.
    pub k0: f64,
    /// Slope in dB per decade of distance.
    pub k1: f64,
    pub shadow_sigma_db: f64,
    pub shadow_corr_dist_m: f64,
    pub user_positions: Vec<Position>,
}

impl LargeScaleParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.shadow_sigma_db >= 0.0) {
            return Err(Error::config("shadow_sigma_db", "must be >= 0"));
        }
        if !(self.shadow_corr_dist_m > 0.0) {
            return Err(Error::config("shadow_corr_dist_m", "must be > 0"));
        }
        Ok(())
    }

    /// Linear power gain per user: `10^(-(L(d) + shadowing) / 10)`.
    pub fn user_gains(&self, seed: u64, with_shadowing: bool) -> Result<Vec<f64>> {
        self.validate()?;
        let shadow = if with_shadowing {
            gen_shadowing(
                seed,
                &self.user_positions,
                self.shadow_sigma_db,
                self.shadow_corr_dist_m,
            )?
        } else {
            vec![0.0; self.user_positions.len()]
        };
        self.user_positions
            .iter()
            .zip(shadow)
            .map(|(p, s)| {
                let loss = path_loss_db(p.distance_to_origin(), self.k0, self.k1)?;
                Ok(10f64.powf(-(loss + s) / 10.0))
            })
            .collect()
    }
}

/// `k0 + k1 * log10(d)` in dB.
pub fn path_loss_db(distance_m: f64, k0: f64, k1: f64) -> Result<f64> {
    if !(distance_m > 0.0) || !distance_m.is_finite() {
        return Err(Error::Domain(format!(
            "distance must be positive and finite, got {distance_m}"
        )));
    }
    Ok(k0 + k1 * distance_m.log10())
}

/// Spatially correlated log-normal shadowing in dB.
///
/// The covariance between users `i` and `j` is
/// `sigma^2 * exp(-dist(i, j) / corr_dist)`.
pub fn gen_shadowing(
    seed: u64,
    positions: &[Position],
    sigma_db: f64,
    corr_dist_m: f64,
) -> Result<Vec<f64>> {
    if !(sigma_db >= 0.0) {
        return Err(Error::Domain(format!("shadow sigma must be >= 0, got {sigma_db}")));
    }
    if !(corr_dist_m > 0.0) {
        return Err(Error::Domain(format!(
            "correlation distance must be > 0, got {corr_dist_m}"
        )));
    }
    let n = positions.len();
    if n == 0 || sigma_db == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let corr: Vec<f64> = positions
        .iter()
        .flat_map(|a| positions.iter().map(move |b| (-a.distance_to(b) / corr_dist_m).exp()))
        .collect();
    let factor = psd_cholesky(&corr, n)?;
    let mut rng = rng_from_seed(seed);
    let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    Ok((0..n)
        .map(|i| sigma_db * (0..=i).map(|j| factor[i * n + j] * z[j]).sum::<f64>())
        .collect())
}

/// Lower-triangular `L` with `L L^T = a` for a positive semidefinite `a`.
///
/// Pivots within a relative tolerance of zero are treated as exact rank
/// deficiency and their column is zeroed, so co-located users get bitwise
/// identical draws.
fn psd_cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    const TOL: f64 = 1e-10;
    let scale = (0..n).map(|i| a[i * n + i]).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let pivot = a[j * n + j] - (0..j).map(|p| l[j * n + p] * l[j * n + p]).sum::<f64>();
        if pivot < -TOL * scale * n as f64 {
            return Err(Error::Generation(format!(
                "shadowing covariance is not positive semidefinite (pivot {pivot:e} at row {j})"
            )));
        }
        if pivot <= TOL * scale {
            continue;
        }
        let d = pivot.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let s = a[i * n + j] - (0..j).map(|p| l[i * n + p] * l[j * n + p]).sum::<f64>();
            l[i * n + j] = s / d;
        }
    }
    Ok(l)
}

/// `users` positions evenly spaced on a circle of radius `distance_m`.
pub fn fixed_ring_positions(users: usize, distance_m: f64) -> Vec<Position> {
    (0..users)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / users as f64;
            Position::new(distance_m * angle.cos(), distance_m * angle.sin())
        })
        .collect()
}

/// Positions uniform over the annulus `min_distance_m <= r <= radius_m`.
pub fn uniform_disk_positions<R: Rng + ?Sized>(
    rng: &mut R,
    users: usize,
    radius_m: f64,
    min_distance_m: f64,
) -> Vec<Position> {
    let (r0, r1) = (min_distance_m * min_distance_m, radius_m * radius_m);
    (0..users)
        .map(|_| {
            let r = (r0 + (r1 - r0) * rng.random::<f64>()).sqrt();
            let angle = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            Position::new(r * angle.cos(), r * angle.sin())
        })
        .collect()
}
