use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::grid::{ensure_same_grid, SpectralGrid};
use crate::error::{Error, Result};

/// A real scalar field on a [`SpectralGrid`].
///
/// Holds a physical representation, a spectral one, or both. Whichever is
/// missing is computed on first access and cached, so a field is immutable
/// from the outside but never transforms twice.
///
/// Layout of both arrays is row-major with `j * n + i`, where `i` runs along
/// `x1` and `j` along `x2`. The spectral array uses the unscaled forward DFT,
/// so a constant field `c` has `c * n^2` in the zero mode.
#[derive(Clone)]
pub struct ScalarField {
    grid: SpectralGrid,
    physical: OnceLock<Vec<f64>>,
    spectral: OnceLock<Vec<Complex64>>,
}

impl ScalarField {
    pub fn from_physical(grid: &SpectralGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            physical: OnceLock::from(values),
            spectral: OnceLock::new(),
        })
    }

    /// Spectral coefficients are trusted to be Hermitian; the physical
    /// representation keeps only the real part of the inverse transform.
    pub fn from_spectral(grid: &SpectralGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            physical: OnceLock::new(),
            spectral: OnceLock::from(coeffs),
        })
    }

    /// Samples `f(x1, x2)` at the grid points.
    pub fn from_fn(grid: &SpectralGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..n {
            let x2 = grid.coordinate(j);
            for i in 0..n {
                values.push(f(grid.coordinate(i), x2));
            }
        }
        Self {
            grid: grid.clone(),
            physical: OnceLock::from(values),
            spectral: OnceLock::new(),
        }
    }

    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self {
            grid: grid.clone(),
            physical: OnceLock::from(vec![0.0; grid.len()]),
            spectral: OnceLock::from(vec![Complex64::default(); grid.len()]),
        }
    }

    pub fn constant(grid: &SpectralGrid, c: f64) -> Self {
        let mut spec = vec![Complex64::default(); grid.len()];
        spec[0] = Complex64::new(c * grid.len() as f64, 0.0);
        Self {
            grid: grid.clone(),
            physical: OnceLock::from(vec![c; grid.len()]),
            spectral: OnceLock::from(spec),
        }
    }

    #[inline]
    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn has_physical(&self) -> bool {
        self.physical.get().is_some()
    }

    pub fn has_spectral(&self) -> bool {
        self.spectral.get().is_some()
    }

    pub fn physical(&self) -> &[f64] {
        self.physical.get_or_init(|| {
            let mut data = self.spectral.get().expect("field has no representation").clone();
            self.grid.fft2_inverse(&mut data);
            data.into_iter().map(|c| c.re).collect()
        })
    }

    pub fn spectral(&self) -> &[Complex64] {
        self.spectral.get_or_init(|| {
            let mut data: Vec<Complex64> = self
                .physical
                .get()
                .expect("field has no representation")
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            self.grid.fft2_forward(&mut data);
            data
        })
    }

    pub fn into_physical(self) -> Vec<f64> {
        self.physical();
        self.physical.into_inner().unwrap()
    }

    pub fn into_spectral(self) -> Vec<Complex64> {
        self.spectral();
        self.spectral.into_inner().unwrap()
    }

    /// Spatial mean, read from the zero mode when available.
    pub fn mean(&self) -> f64 {
        match self.spectral.get() {
            Some(s) => s[0].re / self.grid.len() as f64,
            None => self.physical().iter().sum::<f64>() / self.grid.len() as f64,
        }
    }

    /// Same field with the zero mode removed.
    pub fn without_mean(&self) -> Self {
        let mut s = self.spectral().to_vec();
        s[0] = Complex64::default();
        Self::from_spectral(&self.grid, s).unwrap()
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map_reps(|v| v * a, |c| c * a)
    }

    /// Largest absolute grid value.
    pub fn max_abs(&self) -> f64 {
        self.physical().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        match (self.physical.get(), self.spectral.get()) {
            (Some(p), _) => p.iter().all(|v| v.is_finite()),
            (None, Some(s)) => s.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
            (None, None) => unreachable!(),
        }
    }

    fn map_reps(&self, fp: impl Fn(f64) -> f64, fs: impl Fn(Complex64) -> Complex64) -> Self {
        let physical = match self.physical.get() {
            Some(p) => OnceLock::from(p.iter().map(|&v| fp(v)).collect::<Vec<_>>()),
            None => OnceLock::new(),
        };
        let spectral = match self.spectral.get() {
            Some(s) => OnceLock::from(s.iter().map(|&c| fs(c)).collect::<Vec<_>>()),
            None => OnceLock::new(),
        };
        Self {
            grid: self.grid.clone(),
            physical,
            spectral,
        }
    }

    /// `a * self + b * other`, computed in whichever representation both
    /// fields already share (spectral preferred).
    pub fn lin_comb(&self, a: f64, other: &ScalarField, b: f64) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        if self.has_spectral() && other.has_spectral() || !(self.has_physical() && other.has_physical()) {
            let s: Vec<Complex64> = self
                .spectral()
                .iter()
                .zip(other.spectral())
                .map(|(x, y)| x * a + y * b)
                .collect();
            Self::from_spectral(&self.grid, s)
        } else {
            let p: Vec<f64> = self
                .physical()
                .iter()
                .zip(other.physical())
                .map(|(x, y)| a * x + b * y)
                .collect();
            Self::from_physical(&self.grid, p)
        }
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.lin_comb(1.0, other, -1.0)
    }

    /// Pointwise product on the grid (not dealiased).
    pub fn pointwise_mul(&self, other: &ScalarField) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let p = self
            .physical()
            .iter()
            .zip(other.physical())
            .map(|(x, y)| x * y)
            .collect();
        Self::from_physical(&self.grid, p)
    }

    /// Applies `f` to every grid value.
    pub fn map_physical(&self, f: impl Fn(f64) -> f64) -> Self {
        let p = self.physical().iter().map(|&v| f(v)).collect();
        Self::from_physical(&self.grid, p).unwrap()
    }

    /// Multiplies every spectral coefficient by `table[idx]`.
    pub fn map_spectral_table(&self, table: &[Complex64]) -> Self {
        debug_assert_eq!(table.len(), self.grid.len());
        let s = self
            .spectral()
            .iter()
            .zip(table)
            .map(|(c, m)| c * m)
            .collect();
        Self::from_spectral(&self.grid, s).unwrap()
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("physical", &self.has_physical())
            .field("spectral", &self.has_spectral())
            .finish()
    }
}

/// Two scalar components on one grid.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: [ScalarField; 2],
}

impl VectorField {
    pub fn new(u1: ScalarField, u2: ScalarField) -> Result<Self> {
        ensure_same_grid(u1.grid(), u2.grid())?;
        Ok(Self {
            components: [u1, u2],
        })
    }

    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self {
            components: [ScalarField::zeros(grid), ScalarField::zeros(grid)],
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.components[0].grid()
    }

    /// Component `axis` in `{1, 2}`.
    pub fn component(&self, axis: usize) -> &ScalarField {
        &self.components[axis - 1]
    }

    pub fn components(&self) -> &[ScalarField; 2] {
        &self.components
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            components: [self.components[0].scaled(a), self.components[1].scaled(a)],
        }
    }

    pub fn lin_comb(&self, a: f64, other: &VectorField, b: f64) -> Result<Self> {
        Ok(Self {
            components: [
                self.components[0].lin_comb(a, &other.components[0], b)?,
                self.components[1].lin_comb(a, &other.components[1], b)?,
            ],
        })
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let p = self.components[0]
            .physical()
            .iter()
            .zip(self.components[1].physical())
            .map(|(a, b)| a.hypot(*b))
            .collect();
        ScalarField::from_physical(self.grid(), p).unwrap()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.components[0]
            .physical()
            .iter()
            .zip(self.components[1].physical())
            .fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
    }
}
