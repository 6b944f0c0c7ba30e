//! Fourier multipliers used by the Boussinesq system and its analysis.
//!
//! Odd symbols carry their factor `i` explicitly: the operator `N` has symbol
//! `i m(xi)` where `m` is the real function returned by [`m_function`].

mod hm;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::random::{random_field, BandLimited};
use crate::spectral::{gradient, lq_norm, lq_norm_vector, ScalarField, SpectralGrid};

pub use hm::{hm_decay_check, HmEntry, HmFailure, HmReport};

type SymbolFn = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

/// A symbol `xi -> sigma(xi)` together with its declared growth order.
///
/// The symbol must be finite at `xi = 0`; negative homogeneous powers are not
/// representable.
#[derive(Clone)]
pub struct MultiplierSpec {
    name: String,
    order: f64,
    symbol: Arc<SymbolFn>,
}

impl MultiplierSpec {
    pub fn new(
        name: impl Into<String>,
        order: f64,
        symbol: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let name = name.into();
        let at_zero = symbol(0.0, 0.0);
        if !(at_zero.re.is_finite() && at_zero.im.is_finite()) {
            return Err(Error::NonFiniteSymbol {
                name,
                xi1: 0.0,
                xi2: 0.0,
            });
        }
        Ok(Self {
            name,
            order,
            symbol: Arc::new(symbol),
        })
    }

    /// Real-valued symbol.
    pub fn real(
        name: impl Into<String>,
        order: f64,
        symbol: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(name, order, move |a, b| Complex64::new(symbol(a, b), 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    #[inline]
    pub fn eval(&self, xi1: f64, xi2: f64) -> Complex64 {
        (self.symbol)(xi1, xi2)
    }

    /// Symbol of `self` applied after `other`; orders add.
    pub fn compose(&self, other: &MultiplierSpec) -> MultiplierSpec {
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        MultiplierSpec {
            name: format!("{} {}", self.name, other.name),
            order: self.order + other.order,
            symbol: Arc::new(move |x, y| a(x, y) * b(x, y)),
        }
    }

    /// Symbol values on the lattice of `grid`.
    ///
    /// At a Nyquist index the lattice point stands for both `+n/2` and `-n/2`,
    /// so the symbol is averaged over both signs of that component. This keeps
    /// outputs real and zeroes odd symbols (such as `i xi_1`) there.
    pub fn tabulate(&self, grid: &SpectralGrid) -> Result<Vec<Complex64>> {
        let n = grid.n();
        let mut table = Vec::with_capacity(grid.len());
        for j in 0..n {
            let k2 = grid.wavenumber(j);
            let signs2: &[f64] = if grid.is_nyquist(j) { &[1.0, -1.0] } else { &[1.0] };
            for i in 0..n {
                let k1 = grid.wavenumber(i);
                let signs1: &[f64] = if grid.is_nyquist(i) { &[1.0, -1.0] } else { &[1.0] };
                let mut acc = Complex64::default();
                for &s2 in signs2 {
                    for &s1 in signs1 {
                        acc += self.eval(s1 * k1, s2 * k2);
                    }
                }
                let v = acc / (signs1.len() * signs2.len()) as f64;
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFiniteSymbol {
                        name: self.name.clone(),
                        xi1: k1,
                        xi2: k2,
                    });
                }
                table.push(v);
            }
        }
        Ok(table)
    }

    /// `sup |sigma(xi)| / |xi|^order` over a log-spaced radial and angular
    /// sample of `|xi|` in `[1, 1e3]`. Bounded iff the declared order is not
    /// smaller than the true growth.
    pub fn growth_bound(&self) -> f64 {
        let mut sup = 0.0_f64;
        for a in 0..=60 {
            let r = 10f64.powf(3.0 * a as f64 / 60.0);
            for b in 0..16 {
                let th = (b as f64 + 0.5) * std::f64::consts::TAU / 16.0;
                let v = self.eval(r * th.cos(), r * th.sin()).norm() / r.powf(self.order);
                sup = sup.max(v);
            }
        }
        sup
    }
}

impl fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSpec")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

fn check_nonneg(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "must be finite and >= 0",
        })
    }
}

pub fn identity() -> MultiplierSpec {
    MultiplierSpec::real("I", 0.0, |_, _| 1.0).unwrap()
}

/// `Lambda^gamma = (-Delta)^(gamma/2)`, symbol `|xi|^gamma`, `gamma >= 0`.
pub fn fractional_laplacian(gamma: f64) -> Result<MultiplierSpec> {
    check_nonneg("gamma", gamma)?;
    MultiplierSpec::real(format!("Lambda^{gamma}"), gamma, move |a, b| {
        if gamma == 0.0 {
            1.0
        } else {
            (a * a + b * b).powf(0.5 * gamma)
        }
    })
}

/// `(I - Delta)^(s/2)`, symbol `(1 + |xi|^2)^(s/2)`; any real `s`.
pub fn bessel_potential(s: f64) -> MultiplierSpec {
    MultiplierSpec::real(format!("(I-Delta)^({s}/2)"), s, move |a, b| {
        (1.0 + a * a + b * b).powf(0.5 * s)
    })
    .unwrap()
}

/// `d/dx_axis`, symbol `i xi_axis`.
pub fn partial(axis: usize) -> MultiplierSpec {
    assert!(axis == 1 || axis == 2, "axis must be 1 or 2");
    MultiplierSpec::new(format!("d{axis}"), 1.0, move |a, b| {
        Complex64::new(0.0, if axis == 1 { a } else { b })
    })
    .unwrap()
}

/// `S = d1 (I - Delta)^(-alpha/2)`, symbol `i xi_1 (1 + |xi|^2)^(-alpha/2)`.
pub fn s_symbol(alpha: f64) -> MultiplierSpec {
    MultiplierSpec::new("S", 1.0 - alpha, move |a, b| {
        Complex64::new(0.0, a * (1.0 + a * a + b * b).powf(-0.5 * alpha))
    })
    .unwrap()
}

/// `S_bar = |grad| (I - Delta)^(-alpha/2)`, symbol `|xi| (1 + |xi|^2)^(-alpha/2)`.
pub fn sbar_symbol(alpha: f64) -> MultiplierSpec {
    MultiplierSpec::real("Sbar", 1.0 - alpha, move |a, b| {
        let r2 = a * a + b * b;
        r2.sqrt() * (1.0 + r2).powf(-0.5 * alpha)
    })
    .unwrap()
}

/// `m(xi) = |xi|^alpha xi_1 / (1 + |xi|^2)^(alpha/2) - xi_1`, evaluated without
/// the cancellation at large `|xi|`.
pub fn m_function(alpha: f64, xi1: f64, xi2: f64) -> f64 {
    let r2 = xi1 * xi1 + xi2 * xi2;
    if r2 == 0.0 {
        return 0.0;
    }
    // (r^2 / (1 + r^2))^(alpha/2) - 1
    xi1 * (-0.5 * alpha * (1.0 / r2).ln_1p()).exp_m1()
}

/// `N = (tilde_Lambda^(-alpha) Lambda^alpha - I) d1`, symbol `i m(xi)`.
pub fn n_symbol(alpha: f64) -> MultiplierSpec {
    MultiplierSpec::new("N", 0.0, move |a, b| Complex64::new(0.0, m_function(alpha, a, b)))
        .unwrap()
}

/// `m_tilde(xi) = (1 + |xi|^2)^(1/2) m(xi)`; bounded, of Hörmander-Mikhlin type.
pub fn m_tilde(alpha: f64) -> MultiplierSpec {
    MultiplierSpec::real("m_tilde", 0.0, move |a, b| {
        (1.0 + a * a + b * b).sqrt() * m_function(alpha, a, b)
    })
    .unwrap()
}

/// Riesz-like symbol `xi_1 / (1 + |xi|^2)^(1/2)`.
pub fn riesz_bessel() -> MultiplierSpec {
    MultiplierSpec::real("xi1/<xi>", 0.0, |a, b| a / (1.0 + a * a + b * b).sqrt()).unwrap()
}

pub fn apply_multiplier(f: &ScalarField, m: &MultiplierSpec) -> Result<ScalarField> {
    Ok(f.map_spectral_table(&m.tabulate(f.grid())?))
}

/// Applies a pre-tabulated symbol.
pub fn apply_table(f: &ScalarField, table: &[Complex64]) -> ScalarField {
    f.map_spectral_table(table)
}

pub fn s_operator(f: &ScalarField, alpha: f64) -> ScalarField {
    apply_multiplier(f, &s_symbol(alpha)).expect("S symbol is finite")
}

pub fn sbar_operator(f: &ScalarField, alpha: f64) -> ScalarField {
    apply_multiplier(f, &sbar_symbol(alpha)).expect("Sbar symbol is finite")
}

pub fn n_operator(f: &ScalarField, alpha: f64) -> ScalarField {
    apply_multiplier(f, &n_symbol(alpha)).expect("N symbol is finite")
}

/// `(||N f||_q + ||grad N f||_q) / ||f||_q`, with `0/0 = 0`.
pub fn n_smoothing_ratio_of(f: &ScalarField, alpha: f64, q: f64) -> Result<f64> {
    let nf = n_operator(f, alpha);
    let num = lq_norm(&nf, q)? + lq_norm_vector(&gradient(&nf), q)?;
    let den = lq_norm(f, q)?;
    Ok(if num == 0.0 { 0.0 } else { num / den })
}

/// Largest value of some per-trial quantity and the seed that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialMax {
    pub value: f64,
    pub seed: u64,
    pub trials: usize,
    pub all_finite: bool,
}

impl TrialMax {
    /// Deterministic reduction in seed order; NaN values mark the run non-finite.
    pub fn from_values(values: impl IntoIterator<Item = (u64, f64)>) -> Self {
        let mut out = TrialMax {
            value: f64::NEG_INFINITY,
            seed: 0,
            trials: 0,
            all_finite: true,
        };
        for (seed, v) in values {
            out.trials += 1;
            if !v.is_finite() {
                if out.all_finite {
                    out.value = v;
                    out.seed = seed;
                }
                out.all_finite = false;
            } else if out.all_finite && (out.trials == 1 || v > out.value) {
                out.value = v;
                out.seed = seed;
            }
        }
        if out.trials == 0 {
            out.value = 0.0;
        }
        out
    }
}

/// Empirical supremum of the smoothing ratio over seeded random fields.
pub fn n_smoothing_ratio(
    grid: &SpectralGrid,
    band: &BandLimited,
    alpha: f64,
    q: f64,
    trials: usize,
    seed: u64,
) -> Result<TrialMax> {
    let values: Vec<(u64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let f = random_field(grid, band, s)?;
            Ok((s, n_smoothing_ratio_of(&f, alpha, q)?))
        })
        .collect::<Result<_>>()?;
    Ok(TrialMax::from_values(values))
}
