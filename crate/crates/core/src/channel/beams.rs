use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rayleigh::complex_gaussian;
use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Whether all subcarriers share one random unitary per frame or each
/// subcarrier draws its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamMode {
    PerSubcarrier,
    #[default]
    PerFrameShared,
}

/// One `N_T x N_T` unitary precoder per subcarrier; column `q` is beam `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSet {
    antennas: usize,
    subcarriers: usize,
    // m * N_T^2 + q * N_T + antenna (columns contiguous)
    values: Vec<Complex64>,
}

impl BeamSet {
    /// Builds a beam set from one column-major matrix per subcarrier.
    pub fn from_matrices(antennas: usize, matrices: &[DMatrix<Complex64>]) -> Result<Self> {
        if antennas == 0 || matrices.is_empty() {
            return Err(Error::Dimension("beam set needs N_T >= 1 and M >= 1".into()));
        }
        let mut values = Vec::with_capacity(matrices.len() * antennas * antennas);
        for mat in matrices {
            if mat.nrows() != antennas || mat.ncols() != antennas {
                return Err(Error::Dimension(format!(
                    "beam matrix must be {antennas}x{antennas}, got {}x{}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
            // nalgebra storage is column-major already
            values.extend_from_slice(mat.as_slice());
        }
        Ok(Self {
            antennas,
            subcarriers: matrices.len(),
            values,
        })
    }

    /// Identity precoder on every subcarrier.
    pub fn identity(antennas: usize, subcarriers: usize) -> Result<Self> {
        let eye = DMatrix::<Complex64>::identity(antennas, antennas);
        Self::from_matrices(antennas, &vec![eye; subcarriers])
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    /// Beam `q` on subcarrier `m`.
    pub fn beam(&self, m: usize, q: usize) -> &[Complex64] {
        let n = self.antennas;
        let start = m * n * n + q * n;
        &self.values[start..start + n]
    }

    pub fn matrix(&self, m: usize) -> DMatrix<Complex64> {
        let n = self.antennas;
        DMatrix::from_column_slice(n, n, &self.values[m * n * n..(m + 1) * n * n])
    }

    /// Largest elementwise deviation of `B^H B` from the identity over all
    /// subcarriers.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.antennas;
        let mut worst = 0.0f64;
        for m in 0..self.subcarriers {
            for a in 0..n {
                for b in 0..n {
                    let dot: Complex64 = self
                        .beam(m, a)
                        .iter()
                        .zip(self.beam(m, b))
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    let target = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((dot - target).norm());
                }
            }
        }
        worst
    }
}

/// Haar-distributed `n x n` unitary: QR of an i.i.d. complex Gaussian matrix
/// with the phases of `diag(R)` folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Draws a random orthonormal beam set for `subcarriers` subcarriers.
pub fn gen_orthonormal_beams(
    seed: u64,
    antennas: usize,
    subcarriers: usize,
    mode: BeamMode,
) -> Result<BeamSet> {
    if antennas == 0 || subcarriers == 0 {
        return Err(Error::Dimension(format!(
            "beam set needs N_T >= 1 and M >= 1 (got N_T={antennas}, M={subcarriers})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let matrices: Vec<_> = match mode {
        BeamMode::PerFrameShared => vec![random_unitary(&mut rng, antennas); subcarriers],
        BeamMode::PerSubcarrier => (0..subcarriers)
            .map(|_| random_unitary(&mut rng, antennas))
            .collect(),
    };
    BeamSet::from_matrices(antennas, &matrices)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_antenna_beams_have_unit_modulus() {
        let b = gen_orthonormal_beams(3, 1, 16, BeamMode::PerSubcarrier).unwrap();
        for m in 0..16 {
            assert!((b.beam(m, 0)[0].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shared_mode_repeats_one_matrix() {
        let b = gen_orthonormal_beams(11, 3, 128, BeamMode::PerFrameShared).unwrap();
        let first = b.matrix(0);
        for m in 1..128 {
            assert_eq!(b.matrix(m), first);
        }
        assert!(b.orthonormality_error() < 1e-10);
    }

    #[test]
    fn per_subcarrier_mode_draws_distinct_matrices() {
        let b = gen_orthonormal_beams(11, 2, 4, BeamMode::PerSubcarrier).unwrap();
        assert_ne!(b.matrix(0), b.matrix(1));
        assert!(b.orthonormality_error() < 1e-10);
    }

    #[test]
    fn deterministic_under_seed() {
        let a = gen_orthonormal_beams(5, 4, 8, BeamMode::PerSubcarrier).unwrap();
        let b = gen_orthonormal_beams(5, 4, 8, BeamMode::PerSubcarrier).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_antennas_rejected() {
        assert!(gen_orthonormal_beams(5, 0, 8, BeamMode::PerSubcarrier).is_err());
    }
}
