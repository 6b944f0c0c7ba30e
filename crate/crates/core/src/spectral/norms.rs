//! Quadrature-based Lebesgue and Bessel-potential Sobolev norms.
//!
//! All integrals use the equispaced rectangle rule, which is spectrally
//! accurate for smooth periodic integrands.

use num_complex::Complex64;

use super::field::{ScalarField, VectorField};
use super::grid::{ensure_same_grid, SpectralGrid};
use crate::error::{Error, Result};

/// `(sum |f|^q * h^2)^(1/q)` for finite `q`, grid maximum for `q = inf`.
pub fn lq_norm(f: &ScalarField, q: f64) -> Result<f64> {
    lq_norm_of_values(f.grid(), f.physical(), q)
}

/// Same as [`lq_norm`] with an optional 2x spectral oversampling for `q = inf`.
pub fn lq_norm_with(f: &ScalarField, q: f64, oversample: bool) -> Result<f64> {
    if q == f64::INFINITY && oversample {
        return Ok(oversampled(f).max_abs());
    }
    lq_norm(f, q)
}

/// L^q norm of the pointwise magnitude of a vector field.
pub fn lq_norm_vector(u: &VectorField, q: f64) -> Result<f64> {
    lq_norm(&u.magnitude(), q)
}

pub(crate) fn lq_norm_of_values(grid: &SpectralGrid, values: &[f64], q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "Lebesgue exponent must be >= 1",
        });
    }
    if q == f64::INFINITY {
        return Ok(values.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    }
    // Scale by the max first so large q cannot overflow.
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = if q == 2.0 {
        values.iter().map(|v| (v / scale) * (v / scale)).sum()
    } else {
        values.iter().map(|v| (v.abs() / scale).powf(q)).sum()
    };
    Ok(scale * (sum * grid.cell_area()).powf(1.0 / q))
}

/// Rectangle-rule integral over the torus.
pub fn integrate(f: &ScalarField) -> f64 {
    f.physical().iter().sum::<f64>() * f.grid().cell_area()
}

/// `int f g dx` by the rectangle rule.
pub fn inner_product(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    ensure_same_grid(f.grid(), g.grid())?;
    Ok(f.physical()
        .iter()
        .zip(g.physical())
        .map(|(a, b)| a * b)
        .sum::<f64>()
        * f.grid().cell_area())
}

/// `h^2 / n^2 * sum |f_hat|^2`, equal to `lq_norm(f, 2)^2` by discrete Parseval.
pub fn spectral_energy(f: &ScalarField) -> f64 {
    let grid = f.grid();
    f.spectral().iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.cell_area() / grid.len() as f64
}

/// Tabulated Bessel symbol `(1 + |k|^2)^(s/2)`.
pub fn bessel_table(grid: &SpectralGrid, s: f64) -> Vec<Complex64> {
    let n = grid.n();
    let mut t = Vec::with_capacity(grid.len());
    for j in 0..n {
        let k2 = grid.wavenumber(j);
        for i in 0..n {
            let k1 = grid.wavenumber(i);
            t.push(Complex64::new((1.0 + k1 * k1 + k2 * k2).powf(0.5 * s), 0.0));
        }
    }
    t
}

/// Bessel-potential norm `||(I - Delta)^(s/2) f||_{L^q}`.
pub fn sobolev_norm(f: &ScalarField, s: f64, q: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "smoothness index must be >= 0",
        });
    }
    if s == 0.0 {
        return lq_norm(f, q);
    }
    let lifted = f.map_spectral_table(&bessel_table(f.grid(), s));
    lq_norm(&lifted, q)
}

/// Trigonometric interpolant of `f` on a grid twice as fine.
pub fn oversampled(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let n = grid.n();
    let fine = SpectralGrid::with_length(2 * n, grid.length()).unwrap();
    let mut big = vec![Complex64::default(); fine.len()];
    let scale = (fine.len() / grid.len()) as f64;
    let spread = |i: usize| -> Vec<(i64, f64)> {
        let k = grid.index_wavenumber(i);
        if grid.is_nyquist(i) {
            vec![(k, 0.5), (-k, 0.5)]
        } else {
            vec![(k, 1.0)]
        }
    };
    let s = f.spectral();
    for j in 0..n {
        for (k2, w2) in spread(j) {
            for i in 0..n {
                for (k1, w1) in spread(i) {
                    let idx = fine.flat_mode_index(k1, k2).unwrap();
                    big[idx] += s[j * n + i] * (scale * w1 * w2);
                }
            }
        }
    }
    ScalarField::from_spectral(&fine, big).unwrap()
}
