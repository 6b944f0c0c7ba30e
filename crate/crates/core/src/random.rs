//! Seeded band-limited random fields.
//!
//! Coefficients are drawn in a fixed wavenumber order that does not depend on
//! the grid size, so one seed describes the same continuum function on every
//! grid that resolves the band. This is what makes refinement comparisons
//! meaningful.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{lq_norm, partial_derivative, ScalarField, SpectralGrid, VectorField};

/// Spectrum of a random field: Gaussian coefficients with amplitude
/// `(1 + |k|^2)^(-decay/2)` on the square band `max(|k1|, |k2|) <= kmax`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct BandLimited {
    pub kmax: usize,
    pub decay: f64,
    pub zero_mean: bool,
}

impl Default for BandLimited {
    fn default() -> Self {
        Self {
            kmax: 8,
            decay: 2.0,
            zero_mean: true,
        }
    }
}

impl BandLimited {
    pub fn new(kmax: usize, decay: f64) -> Self {
        Self {
            kmax,
            decay,
            ..Self::default()
        }
    }

    pub fn with_mean(mut self) -> Self {
        self.zero_mean = false;
        self
    }
}

pub fn random_field(grid: &SpectralGrid, spec: &BandLimited, seed: u64) -> Result<ScalarField> {
    let n = grid.n();
    if spec.kmax == 0 || 2 * spec.kmax >= n {
        return Err(Error::InvalidParameter {
            name: "kmax",
            value: spec.kmax as f64,
            reason: "band must satisfy 1 <= kmax < n/2",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || -> f64 { StandardNormal.sample(&mut rng) };
    let scale = grid.len() as f64;
    let mut coeffs = vec![Complex64::default(); grid.len()];
    let mean = gauss();
    if !spec.zero_mean {
        coeffs[0] = Complex64::new(mean * scale, 0.0);
    }
    let kmax = spec.kmax as i64;
    for k2 in 0..=kmax {
        for k1 in -kmax..=kmax {
            if k2 == 0 && k1 <= 0 {
                continue;
            }
            let amp = (1.0 + (k1 * k1 + k2 * k2) as f64).powf(-0.5 * spec.decay)
                * std::f64::consts::FRAC_1_SQRT_2;
            let c = Complex64::new(gauss(), gauss()) * (amp * scale);
            coeffs[grid.flat_mode_index(k1, k2).unwrap()] = c;
            coeffs[grid.flat_mode_index(-k1, -k2).unwrap()] = c.conj();
        }
    }
    ScalarField::from_spectral(grid, coeffs)
}

/// Divergence-free velocity `u = (-d2 psi, d1 psi)` from a random stream function.
pub fn random_divergence_free(
    grid: &SpectralGrid,
    spec: &BandLimited,
    seed: u64,
) -> Result<VectorField> {
    let psi = random_field(grid, spec, seed)?;
    VectorField::new(partial_derivative(&psi, 2).scaled(-1.0), partial_derivative(&psi, 1))
}

/// Rescales `f` so that `||f||_q = target`. Zero fields are returned unchanged.
pub fn normalize_lq(f: &ScalarField, q: f64, target: f64) -> Result<ScalarField> {
    let norm = lq_norm(f, q)?;
    if norm == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.scaled(target / norm))
}
