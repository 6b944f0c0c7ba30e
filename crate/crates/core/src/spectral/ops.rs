//! Transforms, derivatives and the 2/3-rule dealiasing filter.

use num_complex::Complex64;

use super::field::{ScalarField, VectorField};
use super::grid::{ensure_same_grid, SpectralGrid};
use crate::error::Result;

/// Returns `f` with its spectral representation filled.
pub fn forward_transform(f: &ScalarField) -> ScalarField {
    f.spectral();
    f.clone()
}

/// Returns `f` with its physical representation filled.
pub fn inverse_transform(f: &ScalarField) -> ScalarField {
    f.physical();
    f.clone()
}

/// Spectral symbol `i k_axis` tabulated on the lattice, Nyquist index zeroed.
pub fn derivative_table(grid: &SpectralGrid, axis: usize) -> Vec<Complex64> {
    assert!(axis == 1 || axis == 2, "axis must be 1 or 2");
    let n = grid.n();
    let mut table = Vec::with_capacity(grid.len());
    for j in 0..n {
        for i in 0..n {
            let idx = if axis == 1 { i } else { j };
            let k = if grid.is_nyquist(idx) { 0.0 } else { grid.wavenumber(idx) };
            table.push(Complex64::new(0.0, k));
        }
    }
    table
}

pub fn partial_derivative(f: &ScalarField, axis: usize) -> ScalarField {
    assert!(axis == 1 || axis == 2, "axis must be 1 or 2");
    let grid = f.grid();
    let n = grid.n();
    let s: Vec<Complex64> = f
        .spectral()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let i = if axis == 1 { idx % n } else { idx / n };
            if grid.is_nyquist(i) {
                Complex64::default()
            } else {
                c * Complex64::new(0.0, grid.wavenumber(i))
            }
        })
        .collect();
    ScalarField::from_spectral(grid, s).unwrap()
}

pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField::new(partial_derivative(f, 1), partial_derivative(f, 2)).unwrap()
}

pub fn divergence(u: &VectorField) -> ScalarField {
    partial_derivative(u.component(1), 1)
        .add(&partial_derivative(u.component(2), 2))
        .unwrap()
}

/// Scalar curl `d1 u2 - d2 u1`.
pub fn curl(u: &VectorField) -> ScalarField {
    partial_derivative(u.component(2), 1)
        .sub(&partial_derivative(u.component(1), 2))
        .unwrap()
}

/// Zeroes every mode with `max(|k1|, |k2|) > n/3`.
pub fn dealias(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let s: Vec<Complex64> = f
        .spectral()
        .iter()
        .enumerate()
        .map(|(idx, &c)| if grid.in_band(idx) { c } else { Complex64::default() })
        .collect();
    ScalarField::from_spectral(grid, s).unwrap()
}

pub(crate) fn dealias_in_place(grid: &SpectralGrid, s: &mut [Complex64]) {
    for (idx, c) in s.iter_mut().enumerate() {
        if !grid.in_band(idx) {
            *c = Complex64::default();
        }
    }
}

/// Pointwise product followed by the 2/3-rule filter.
///
/// Equals the band truncation of the exact product whenever both factors are
/// band-limited to `n/3`.
pub fn dealiased_product(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    Ok(dealias(&f.pointwise_mul(g)?))
}

/// Dealiased advection term `P(u . grad f)`.
pub fn advect(u: &VectorField, f: &ScalarField) -> Result<ScalarField> {
    ensure_same_grid(u.grid(), f.grid())?;
    let grid = f.grid();
    let d1 = partial_derivative(f, 1);
    let d2 = partial_derivative(f, 2);
    let u1 = u.component(1).physical();
    let u2 = u.component(2).physical();
    let p: Vec<f64> = d1
        .physical()
        .iter()
        .zip(d2.physical())
        .zip(u1.iter().zip(u2))
        .map(|((a, b), (v1, v2))| v1 * a + v2 * b)
        .collect();
    Ok(dealias(&ScalarField::from_physical(grid, p)?))
}

/// Fraction of spectral energy (zero mode excluded) sitting in the outer third
/// of the dealiased band, i.e. modes with `max(|k1|, |k2|) > 2n/9`. Modes past
/// the band are counted too. Returns 0 for a constant field.
pub fn tail_energy_fraction(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let n = grid.n();
    let threshold = 2.0 * grid.dealias_cutoff() / 3.0;
    let mut total = 0.0;
    let mut tail = 0.0;
    for (idx, c) in f.spectral().iter().enumerate().skip(1) {
        let e = c.norm_sqr();
        total += e;
        let a = grid.index_wavenumber(idx % n).abs();
        let b = grid.index_wavenumber(idx / n).abs();
        if a.max(b) as f64 > threshold {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        a.physical()
            .iter()
            .zip(b.physical())
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Direct O(n^4) DFT with the same (unscaled forward) convention.
    fn direct_dft(grid: &SpectralGrid, values: &[f64]) -> Vec<Complex64> {
        let n = grid.n();
        let mut out = vec![Complex64::default(); n * n];
        for q in 0..n {
            for p in 0..n {
                let mut acc = Complex64::default();
                for j in 0..n {
                    for i in 0..n {
                        let phase = -2.0 * PI * ((p * i + q * j) % n) as f64 / n as f64;
                        acc += values[j * n + i] * Complex64::from_polar(1.0, phase);
                    }
                }
                out[q * n + p] = acc;
            }
        }
        out
    }

    #[test]
    fn zero_field_transforms_to_zero() {
        let g = SpectralGrid::new(16).unwrap();
        let z = ScalarField::from_physical(&g, vec![0.0; 256]).unwrap();
        assert!(forward_transform(&z).spectral().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn cosine_has_two_modes() {
        let g = SpectralGrid::new(16).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| x.cos());
        let fast = forward_transform(&f);
        let oracle = direct_dft(&g, f.physical());
        for (idx, (a, b)) in fast.spectral().iter().zip(&oracle).enumerate() {
            assert!((a - b).norm() < 1e-10, "mode {idx}");
        }
        let plus = g.flat_mode_index(1, 0).unwrap();
        let minus = g.flat_mode_index(-1, 0).unwrap();
        for (idx, c) in oracle.iter().enumerate() {
            if idx == plus || idx == minus {
                assert!((c.re - 128.0).abs() < 1e-10 && c.im.abs() < 1e-10);
            } else {
                assert!(c.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn derivative_of_cosine() {
        let g = SpectralGrid::new(16).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| x.cos());
        let d1 = partial_derivative(&f, 1);
        let d2 = partial_derivative(&f, 2);
        assert!(max_diff(&d1, &ScalarField::from_fn(&g, |x, _| -x.sin())) < 1e-13);
        assert!(d2.max_abs() < 1e-13);
    }

    #[test]
    fn derivative_converges_like_finite_differences() {
        // Oracle: second-order centered differences, evaluated on a sequence of
        // grids; the spectral derivative of a band-limited function is exact, so
        // the FD error must shrink by ~4 per refinement.
        let f = |x: f64, y: f64| (x + 0.3).sin() * (2.0 * y).cos() + 0.5 * (3.0 * x - y).cos();
        let mut errs = vec![];
        for &n in &[32usize, 64, 128] {
            let g = SpectralGrid::new(n).unwrap();
            let h = g.spacing();
            let field = ScalarField::from_fn(&g, f);
            let spec = partial_derivative(&field, 1);
            let fd = ScalarField::from_fn(&g, |x, y| (f(x + h, y) - f(x - h, y)) / (2.0 * h));
            errs.push(max_diff(&spec, &fd));
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..4.5).contains(&ratio), "ratio {ratio}, errs {errs:?}");
        }
    }

    #[test]
    fn nyquist_is_zeroed_by_derivatives() {
        let g = SpectralGrid::new(8).unwrap();
        let f = ScalarField::from_fn(&g, |x, y| (4.0 * x).cos() + (4.0 * y).cos());
        assert!(partial_derivative(&f, 1).max_abs() < 1e-13);
        assert!(partial_derivative(&f, 2).max_abs() < 1e-13);
    }

    #[test]
    fn dealias_keeps_band_and_drops_outside() {
        let g = SpectralGrid::new(24).unwrap();
        let inside = ScalarField::from_fn(&g, |x, y| (8.0 * x).sin() + (3.0 * y - 8.0 * x).cos());
        assert!(max_diff(&dealias(&inside), &inside) < 1e-13);
        let outside = ScalarField::from_fn(&g, |x, y| (11.0 * x).cos() + (12.0 * y).cos());
        assert!(dealias(&outside).max_abs() < 1e-13);
    }

    #[test]
    fn dealiased_square_matches_exact_band() {
        // sin^2(m x) = 1/2 - cos(2 m x)/2
        let n = 48;
        let g = SpectralGrid::new(n).unwrap();
        // 2m falls just outside the band: only the mean survives.
        let m = 9.0;
        let f = ScalarField::from_fn(&g, |x, _| (m * x).sin());
        let p = dealiased_product(&f, &f).unwrap();
        assert!(max_diff(&p, &ScalarField::constant(&g, 0.5)) < 1e-13);
        // 2m aliases onto -(n - 2m) = -20, which is outside the band as well.
        let m = 14.0;
        let f = ScalarField::from_fn(&g, |x, _| (m * x).sin());
        let p = dealiased_product(&f, &f).unwrap();
        assert!(max_diff(&p, &ScalarField::constant(&g, 0.5)) < 1e-13);
        // 2m inside the band: product kept intact.
        let m = 7.0;
        let f = ScalarField::from_fn(&g, |x, _| (m * x).sin());
        let p = dealiased_product(&f, &f).unwrap();
        let exact = ScalarField::from_fn(&g, |x, _| 0.5 - 0.5 * (2.0 * m * x).cos());
        assert!(max_diff(&p, &exact) < 1e-13);
    }

    #[test]
    fn tail_fraction() {
        let g = SpectralGrid::new(36).unwrap();
        assert_eq!(tail_energy_fraction(&ScalarField::constant(&g, 3.0)), 0.0);
        let low = ScalarField::from_fn(&g, |x, _| x.cos());
        assert!(tail_energy_fraction(&low) < 1e-28);
        // cutoff 12, tail shell is max|k| > 8
        let mix = ScalarField::from_fn(&g, |x, _| x.cos() + (10.0 * x).cos());
        assert!((tail_energy_fraction(&mix) - 0.5).abs() < 1e-12);
    }
}
