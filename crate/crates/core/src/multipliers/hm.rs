//! Numerical Hörmander-Mikhlin certificate for a symbol.
//!
//! For each multi-index `beta` with `|beta| <= max_order` the report gives
//! `sup |xi|^|beta| |d^beta sigma(xi)|` over a log-spaced radial times angular
//! sample of `|xi|` in `[1e-3, 1e3]`. Derivatives are central differences with
//! step `h = 1e-4 * max(|xi|, 1)`.

use num_complex::Complex64;
use serde::Serialize;

use super::MultiplierSpec;
use crate::error::{Error, Result};

const RADIAL_SAMPLES: usize = 241;
const ANGULAR_SAMPLES: usize = 32;
const R_MIN_LOG10: f64 = -3.0;
const R_MAX_LOG10: f64 = 3.0;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HmEntry {
    pub beta: [u8; 2],
    pub sup: f64,
    /// Sample point where the supremum was attained.
    pub at: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HmFailure {
    pub beta: [u8; 2],
    pub xi: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HmReport {
    pub symbol: String,
    pub max_order: u8,
    pub entries: Vec<HmEntry>,
    pub failures: Vec<HmFailure>,
}

impl HmReport {
    pub fn all_finite(&self) -> bool {
        self.failures.is_empty() && self.entries.iter().all(|e| e.sup.is_finite())
    }

    pub fn sup(&self, beta: [u8; 2]) -> Option<f64> {
        self.entries.iter().find(|e| e.beta == beta).map(|e| e.sup)
    }

    pub fn max_sup(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, e| m.max(e.sup))
    }
}

fn multi_indices(max_order: u8) -> Vec<[u8; 2]> {
    let mut out = vec![];
    for total in 0..=max_order {
        for a in (0..=total).rev() {
            out.push([a, total - a]);
        }
    }
    out
}

fn derivative(m: &MultiplierSpec, beta: [u8; 2], x: f64, y: f64, h: f64) -> Complex64 {
    let f = |a: f64, b: f64| m.eval(a, b);
    match beta {
        [0, 0] => f(x, y),
        [1, 0] => (f(x + h, y) - f(x - h, y)) / (2.0 * h),
        [0, 1] => (f(x, y + h) - f(x, y - h)) / (2.0 * h),
        [2, 0] => (f(x + h, y) - f(x, y) * 2.0 + f(x - h, y)) / (h * h),
        [0, 2] => (f(x, y + h) - f(x, y) * 2.0 + f(x, y - h)) / (h * h),
        [1, 1] => {
            (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h)
        }
        _ => unreachable!("orders above 2 are rejected"),
    }
}

pub fn hm_decay_check(m: &MultiplierSpec, max_order: u8) -> Result<HmReport> {
    if max_order > 2 {
        return Err(Error::InvalidParameter {
            name: "max_order",
            value: max_order as f64,
            reason: "at most 2",
        });
    }
    let betas = multi_indices(max_order);
    let mut entries: Vec<HmEntry> = betas
        .iter()
        .map(|&beta| HmEntry {
            beta,
            sup: 0.0,
            at: [0.0, 0.0],
        })
        .collect();
    let mut failures = vec![];
    for a in 0..RADIAL_SAMPLES {
        let t = a as f64 / (RADIAL_SAMPLES - 1) as f64;
        let r = 10f64.powf(R_MIN_LOG10 + t * (R_MAX_LOG10 - R_MIN_LOG10));
        let h = 1e-4 * r.max(1.0);
        for b in 0..ANGULAR_SAMPLES {
            let th = (b as f64 + 0.5) * std::f64::consts::TAU / ANGULAR_SAMPLES as f64;
            let (x, y) = (r * th.cos(), r * th.sin());
            for entry in entries.iter_mut() {
                let order = (entry.beta[0] + entry.beta[1]) as i32;
                let d = derivative(m, entry.beta, x, y, h);
                let v = r.powi(order) * d.norm();
                if !v.is_finite() {
                    failures.push(HmFailure {
                        beta: entry.beta,
                        xi: [x, y],
                    });
                } else if v > entry.sup {
                    entry.sup = v;
                    entry.at = [x, y];
                }
            }
        }
    }
    Ok(HmReport {
        symbol: m.name().to_string(),
        max_order,
        entries,
        failures,
    })
}
