use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic `n x n` grid on the torus `[0, length)^2`.
///
/// Cheap to clone: the wavenumber tables and FFT plans are shared.
#[derive(Clone)]
pub struct SpectralGrid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    length: f64,
    /// Signed integer wavenumber per index: 0, 1, ..., n/2, -n/2+1, ..., -1.
    index_k: Vec<i64>,
    /// `index_k` scaled by `2 pi / length`.
    k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralGrid {
    /// Grid on the standard torus of period `2 pi`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_length(n, 2.0 * std::f64::consts::PI)
    }

    pub fn with_length(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n must be even and >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive, got {length}"
            )));
        }
        let index_k: Vec<i64> = (0..n)
            .map(|i| {
                let i = i as i64;
                if i <= n as i64 / 2 {
                    i
                } else {
                    i - n as i64
                }
            })
            .collect();
        let scale = 2.0 * std::f64::consts::PI / length;
        let k = index_k.iter().map(|&m| m as f64 * scale).collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                length,
                index_k,
                k,
                forward,
                inverse,
            }),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    /// Grid spacing `h = length / n`.
    pub fn spacing(&self) -> f64 {
        self.inner.length / self.inner.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn area(&self) -> f64 {
        self.inner.length * self.inner.length
    }

    /// Physical wavenumber for a 1-D index.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.inner.k[i]
    }

    /// Signed integer wavenumber for a 1-D index.
    #[inline]
    pub fn index_wavenumber(&self, i: usize) -> i64 {
        self.inner.index_k[i]
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.k
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.inner.n / 2
    }

    /// Array index of the signed integer wavenumber `k`, if it lies on the lattice.
    pub fn mode_index(&self, k: i64) -> Option<usize> {
        let n = self.inner.n as i64;
        if k > -n / 2 && k <= n / 2 {
            Some(k.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    /// Flat index of mode `(k1, k2)`; layout is `j * n + i` with `i` along x1.
    pub fn flat_mode_index(&self, k1: i64, k2: i64) -> Option<usize> {
        Some(self.mode_index(k2)? * self.n() + self.mode_index(k1)?)
    }

    /// Physical coordinate of a 1-D grid index.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Integer dealiasing cutoff: modes with `max(|k1|, |k2|) > n/3` are removed.
    pub fn dealias_cutoff(&self) -> f64 {
        self.inner.n as f64 / 3.0
    }

    /// True if the mode at flat index lies inside the 2/3-rule band.
    #[inline]
    pub fn in_band(&self, idx: usize) -> bool {
        let n = self.inner.n;
        let a = self.inner.index_k[idx % n].abs();
        let b = self.inner.index_k[idx / n].abs();
        (a.max(b) as f64) <= self.dealias_cutoff()
    }

    /// Unscaled forward 2-D DFT in place.
    pub fn fft2_forward(&self, data: &mut [Complex64]) {
        self.fft2(data, &self.inner.forward);
    }

    /// Inverse 2-D DFT in place, divided by `n^2`.
    pub fn fft2_inverse(&self, data: &mut [Complex64]) {
        self.fft2(data, &self.inner.inverse);
        let scale = 1.0 / (self.len() as f64);
        data.par_iter_mut().for_each(|c| *c *= scale);
    }

    fn fft2(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n();
        assert_eq!(data.len(), n * n);
        let rows = |data: &mut [Complex64]| {
            data.par_chunks_mut(n).for_each_init(
                || vec![Complex64::default(); plan.get_inplace_scratch_len()],
                |scratch, row| plan.process_with_scratch(row, scratch),
            );
        };
        rows(data);
        transpose(data, n);
        rows(data);
        transpose(data, n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for j in 0..n {
        for i in (j + 1)..n {
            data.swap(j * n + i, i * n + j);
        }
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.length == other.inner.length)
    }
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.inner.n)
            .field("length", &self.inner.length)
            .finish()
    }
}

impl fmt::Display for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} (L = {})", self.inner.n, self.inner.n, self.inner.length)
    }
}

pub(crate) fn ensure_same_grid(a: &SpectralGrid, b: &SpectralGrid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            left: a.to_string(),
            right: b.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(SpectralGrid::new(6).is_err());
        assert!(SpectralGrid::new(9).is_err());
        assert!(SpectralGrid::with_length(16, 0.0).is_err());
        assert!(SpectralGrid::new(8).is_ok());
    }

    #[test]
    fn wavenumber_lattice() {
        let g = SpectralGrid::new(16).unwrap();
        assert_eq!(g.index_wavenumber(0), 0);
        assert_eq!(g.index_wavenumber(8), 8);
        assert_eq!(g.index_wavenumber(9), -7);
        assert_eq!(g.index_wavenumber(15), -1);
        // closed under negation except the Nyquist index
        for i in 0..16 {
            let k = g.index_wavenumber(i);
            if g.is_nyquist(i) {
                assert_eq!(g.mode_index(-k), None);
            } else {
                let j = g.mode_index(-k).unwrap();
                assert_eq!(g.index_wavenumber(j), -k);
            }
        }
        let g2 = SpectralGrid::with_length(16, 1.0).unwrap();
        assert!((g2.wavenumber(1) - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    }
}
