//! Numerical forms of the commutator identity and of the Córdoba–Córdoba,
//! Gagliardo–Nirenberg and Kato–Ponce type inequalities.
//!
//! The inequality checks return raw quantities (margins or ratios). Trial
//! loops and pass/fail reduction live in [`crate::suites`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multipliers::{
    apply_multiplier, fractional_laplacian, partial, s_operator, s_symbol, sbar_symbol,
    MultiplierSpec,
};
use crate::spectral::{
    advect, dealias, dealiased_product, divergence, ensure_same_grid, gradient, integrate,
    lq_norm, lq_norm_vector, spectral_energy, ScalarField, VectorField,
};

/// Outcome of a trial suite. `passed` iff `worst_margin >= -tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InequalityReport {
    pub name: String,
    pub trials: usize,
    pub worst_margin: f64,
    pub worst_seed: u64,
    pub passed: bool,
    pub tolerance: f64,
    #[serde(default)]
    pub detail: serde_json::Value,
}

impl InequalityReport {
    pub fn new(
        name: impl Into<String>,
        trials: usize,
        worst_margin: f64,
        worst_seed: u64,
        tolerance: f64,
        detail: serde_json::Value,
    ) -> Self {
        Self {
            name: name.into(),
            trials,
            worst_margin,
            worst_seed,
            passed: worst_margin >= -tolerance,
            tolerance,
            detail,
        }
    }
}

const DIVERGENCE_TOLERANCE: f64 = 1e-10;

fn ensure_divergence_free(u: &VectorField) -> Result<()> {
    let residual = crate::spectral::lq_norm(&dealias(&divergence(u)), 2.0)?;
    if residual > DIVERGENCE_TOLERANCE * lq_norm_vector(u, 2.0)?.max(1.0) {
        return Err(Error::DivergenceViolation { residual });
    }
    Ok(())
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn is_constant(f: &ScalarField) -> bool {
    let m = f.mean();
    let tol = 1e-14 * m.abs().max(1.0);
    f.physical().iter().all(|v| (v - m).abs() <= tol)
}

/// `[S, u . grad] rho = S(u . grad rho) - u . grad (S rho)`, both products dealiased.
pub fn commutator_s_advection(u: &VectorField, rho: &ScalarField, alpha: f64) -> Result<ScalarField> {
    ensure_same_grid(u.grid(), rho.grid())?;
    ensure_divergence_free(u)?;
    let a = s_operator(&advect(u, rho)?, alpha);
    let b = advect(u, &s_operator(rho, alpha))?;
    a.sub(&b)
}

/// Relative residual of the splitting
///
/// ```text
/// T [S, u . grad] rho = [T S d_j, u_j] rho - [T d_j, u_j] S rho
/// ```
///
/// with `T = Lambda^(s-1)`. Zero when both sides vanish.
pub fn commutator_identity_residual(
    u: &VectorField,
    rho: &ScalarField,
    s: f64,
    alpha: f64,
) -> Result<f64> {
    commutator_identity_residual_with(u, rho, &fractional_laplacian(s - 1.0)?, alpha)
}

/// The same identity for an arbitrary outer multiplier `T`.
pub fn commutator_identity_residual_with(
    u: &VectorField,
    rho: &ScalarField,
    t: &MultiplierSpec,
    alpha: f64,
) -> Result<f64> {
    let lhs = apply_multiplier(&commutator_s_advection(u, rho, alpha)?, t)?;
    let ts = t.compose(&s_symbol(alpha));
    let srho = s_operator(rho, alpha);
    let mut rhs = ScalarField::zeros(rho.grid());
    for j in 1..=2 {
        let uj = u.component(j);
        let outer = ts.compose(&partial(j));
        let inner = t.compose(&partial(j));
        let first = apply_multiplier(&dealiased_product(uj, rho)?, &outer)?
            .sub(&dealiased_product(uj, &apply_multiplier(rho, &outer)?)?)?;
        let second = apply_multiplier(&dealiased_product(uj, &srho)?, &inner)?
            .sub(&dealiased_product(uj, &apply_multiplier(&srho, &inner)?)?)?;
        rhs = rhs.add(&first.sub(&second)?)?;
    }
    let num = lq_norm(&lhs.sub(&rhs)?, 2.0)?;
    Ok(ratio(num, lq_norm(&lhs, 2.0)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CordobaValue {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// `int |theta|^(p-2) theta Lambda^s theta - (2/p) ||Lambda^(s/2) |theta|^(p/2)||_2^2`.
///
/// `|theta|^(p/2)` is formed pointwise on the grid without dealiasing, so for
/// non-polynomial powers this is a quadrature approximation.
pub fn cordoba_check(theta: &ScalarField, p: f64, s: f64) -> Result<CordobaValue> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "exponent must be at least 2",
        });
    }
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "order must lie in (0, 2)",
        });
    }
    let lam = apply_multiplier(theta, &fractional_laplacian(s)?)?;
    let weighted = theta.map_physical(|v| v.abs().powf(p - 2.0) * v);
    let lhs = integrate(&weighted.pointwise_mul(&lam)?);
    let power = theta.map_physical(|v| v.abs().powf(p / 2.0));
    let rhs = 2.0 / p * spectral_energy(&apply_multiplier(&power, &fractional_laplacian(s / 2.0)?)?);
    Ok(CordobaValue {
        lhs,
        rhs,
        margin: lhs - rhs,
    })
}

/// `(a, b)` in `||z||_r <= ||z||_q^a ||Lambda^(alpha/2) |z|^(q/2)||_2^b`.
pub fn gn_exponents(q: f64, r: f64, alpha: f64) -> (f64, f64) {
    (
        (r * alpha - 2.0 * r + 2.0 * q) / (alpha * r),
        4.0 * (r - q) / (alpha * r * q),
    )
}

/// Largest admissible `r` for given `q` and `alpha`.
pub fn gn_r_max(q: f64, alpha: f64) -> f64 {
    2.0 * q / (2.0 - alpha)
}

/// Left over right side of the fractional Gagliardo–Nirenberg bound.
pub fn gn_ratio(zeta: &ScalarField, q: f64, r: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "order must lie in (0, 2)",
        });
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "exponent must be finite and at least 1",
        });
    }
    let r_max = gn_r_max(q, alpha);
    if !(r >= q && r <= r_max * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "exponent must lie in [q, 2q/(2-alpha)]",
        });
    }
    let zq = lq_norm(zeta, q)?;
    if zq == 0.0 {
        return Err(Error::Degenerate("zero field in Gagliardo-Nirenberg ratio".into()));
    }
    let (a, b) = gn_exponents(q, r, alpha);
    let power = zeta.map_physical(|v| v.abs().powf(q / 2.0));
    let diss = spectral_energy(&apply_multiplier(&power, &fractional_laplacian(alpha / 2.0)?)?).sqrt();
    let rhs = if b == 0.0 { zq.powf(a) } else { zq.powf(a) * diss.powf(b) };
    Ok(lq_norm(zeta, r)? / rhs)
}

/// Hölder exponents `1/q = 1/q1 + 1/qt1 = 1/q2 + 1/qt2`. Infinite entries are
/// allowed except for `q2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HolderExponents {
    pub q: f64,
    pub q1: f64,
    pub qt1: f64,
    pub q2: f64,
    pub qt2: f64,
}

impl HolderExponents {
    /// `q` with all four inner exponents equal to `2q`.
    pub fn balanced(q: f64) -> Self {
        Self {
            q,
            q1: 2.0 * q,
            qt1: 2.0 * q,
            q2: 2.0 * q,
            qt2: 2.0 * q,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
        let Self { q, q1, qt1, q2, qt2 } = *self;
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::HolderMismatch(format!("q = {q} must be finite and at least 1")));
        }
        for (name, v) in [("q1", q1), ("qt1", qt1), ("q2", q2), ("qt2", qt2)] {
            if !(v >= q) {
                return Err(Error::HolderMismatch(format!("{name} = {v} is below q = {q}")));
            }
        }
        if q2.is_infinite() {
            return Err(Error::HolderMismatch("q2 must be finite".into()));
        }
        for (a, b) in [(q1, qt1), (q2, qt2)] {
            let gap = 1.0 / q - inv(a) - inv(b);
            if gap.abs() > 1e-12 {
                return Err(Error::HolderMismatch(format!(
                    "1/{q} != 1/{a} + 1/{b} (gap {gap:e})"
                )));
            }
        }
        Ok(())
    }
}

fn check_axis(j: usize) -> Result<()> {
    if j == 1 || j == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "j",
            value: j as f64,
            reason: "axis must be 1 or 2",
        })
    }
}

/// `||[L, g] f||_q` with both products dealiased.
fn commutator_norm(l: &MultiplierSpec, g: &ScalarField, f: &ScalarField, q: f64) -> Result<f64> {
    let a = apply_multiplier(&dealiased_product(g, f)?, l)?;
    let b = dealiased_product(g, &apply_multiplier(f, l)?)?;
    lq_norm(&a.sub(&b)?, q)
}

/// `||[Lambda^s d_j, g] f||_q` over
/// `||f||_q1 ||Lambda^(1+s) g||_qt1 + ||Lambda^s f||_q2 ||Lambda g||_qt2`.
pub fn kato_ponce_ratio(
    g: &ScalarField,
    f: &ScalarField,
    s: f64,
    j: usize,
    e: &HolderExponents,
) -> Result<f64> {
    ensure_same_grid(g.grid(), f.grid())?;
    check_axis(j)?;
    e.validate()?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "order must lie in (0, 1)",
        });
    }
    if is_constant(g) {
        return Ok(0.0);
    }
    let l = fractional_laplacian(s)?.compose(&partial(j));
    let num = commutator_norm(&l, g, f, e.q)?;
    let den = lq_norm(f, e.q1)? * lq_norm(&apply_multiplier(g, &fractional_laplacian(1.0 + s)?)?, e.qt1)?
        + lq_norm(&apply_multiplier(f, &fractional_laplacian(s)?)?, e.q2)?
            * lq_norm(&apply_multiplier(g, &fractional_laplacian(1.0)?)?, e.qt2)?;
    Ok(ratio(num, den))
}

/// `||[Lambda^mu S d_j, g] f||_q` over
/// `||grad g||_r1 ||Lambda^mu Sbar f||_rt1 + ||Lambda^(mu+1) Sbar g||_r2 ||f||_rt2`,
/// with `(q1, qt1, q2, qt2)` of `e` playing `(r1, rt1, r2, rt2)`.
pub fn inhom_kp_ratio(
    g: &ScalarField,
    f: &ScalarField,
    mu: f64,
    j: usize,
    alpha: f64,
    e: &HolderExponents,
) -> Result<f64> {
    ensure_same_grid(g.grid(), f.grid())?;
    check_axis(j)?;
    e.validate()?;
    if !(mu >= 0.0 && mu <= alpha) {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "order must lie in [0, alpha]",
        });
    }
    if is_constant(g) {
        return Ok(0.0);
    }
    let lam_mu = fractional_laplacian(mu)?;
    let l = lam_mu.compose(&s_symbol(alpha)).compose(&partial(j));
    let num = commutator_norm(&l, g, f, e.q)?;
    let sbar = sbar_symbol(alpha);
    let den = lq_norm_vector(&gradient(g), e.q1)?
        * lq_norm(&apply_multiplier(f, &lam_mu.compose(&sbar))?, e.qt1)?
        + lq_norm(&apply_multiplier(g, &fractional_laplacian(mu + 1.0)?.compose(&sbar))?, e.q2)?
            * lq_norm(f, e.qt2)?;
    Ok(ratio(num, den))
}
