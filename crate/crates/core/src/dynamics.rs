//! Right-hand sides of the fractional Boussinesq system and the
//! integrating-factor RK4 time stepper.
//!
//! Both formulations share the density equation `rho_t + u . grad rho = 0`.
//! The vorticity one evolves
//!
//! ```text
//! omega_t = -Lambda^alpha omega - u . grad omega + d1 rho
//! ```
//!
//! and the modified one evolves `zeta = omega - S rho`:
//!
//! ```text
//! zeta_t = -Lambda^alpha zeta - u . grad zeta + [S, u . grad] rho - N rho
//! ```
//!
//! Every advection product is dealiased with the 2/3 rule.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multipliers::{fractional_laplacian, n_symbol, s_symbol};
use crate::spectral::{
    dealias, derivative_table, ensure_same_grid, ScalarField, SpectralGrid, VectorField,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Vorticity,
    Zeta,
}

impl Formulation {
    pub fn as_str(self) -> &'static str {
        match self {
            Formulation::Vorticity => "vorticity",
            Formulation::Zeta => "zeta",
        }
    }
}

impl std::str::FromStr for Formulation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "vorticity" | "omega" => Ok(Formulation::Vorticity),
            "zeta" => Ok(Formulation::Zeta),
            other => Err(format!("unknown formulation `{other}`")),
        }
    }
}

/// Density plus the vorticity-like field, tagged with its formulation.
#[derive(Clone, Debug)]
pub struct SolverState {
    rho: ScalarField,
    vort: ScalarField,
    formulation: Formulation,
    t: f64,
    alpha: f64,
}

fn mean_tolerance(f: &ScalarField) -> f64 {
    1e-12 * f.max_abs().max(1.0)
}

impl SolverState {
    /// State at `t = 0`. In the vorticity formulation `vort` must be mean-free.
    pub fn new(
        rho: ScalarField,
        vort: ScalarField,
        formulation: Formulation,
        alpha: f64,
    ) -> Result<Self> {
        ensure_same_grid(rho.grid(), vort.grid())?;
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "dissipation order must lie in (1, 2)",
            });
        }
        if formulation == Formulation::Vorticity {
            let mean = vort.mean();
            if mean.abs() > mean_tolerance(&vort) {
                return Err(Error::NonzeroMean { mean });
            }
        }
        Ok(Self {
            rho,
            vort,
            formulation,
            t: 0.0,
            alpha,
        })
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn rho(&self) -> &ScalarField {
        &self.rho
    }

    /// `omega` or `zeta` depending on [`Self::formulation`].
    pub fn vort(&self) -> &ScalarField {
        &self.vort
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.rho.grid()
    }

    /// The vorticity `omega`, converting if needed.
    pub fn omega(&self) -> ScalarField {
        match self.formulation {
            Formulation::Vorticity => self.vort.clone(),
            Formulation::Zeta => convert(self, Formulation::Vorticity).vort,
        }
    }

    /// The modified vorticity `zeta`, converting if needed.
    pub fn zeta(&self) -> ScalarField {
        match self.formulation {
            Formulation::Zeta => self.vort.clone(),
            Formulation::Vorticity => convert(self, Formulation::Zeta).vort,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.vort.is_finite() && self.t.is_finite()
    }
}

/// `zeta = omega - S rho` or back, `omega = zeta + S rho`.
pub fn convert(state: &SolverState, to: Formulation) -> SolverState {
    if state.formulation == to {
        return state.clone();
    }
    let srho = crate::multipliers::s_operator(&state.rho, state.alpha);
    let sign = match to {
        Formulation::Zeta => -1.0,
        Formulation::Vorticity => 1.0,
    };
    SolverState {
        rho: state.rho.clone(),
        vort: state.vort.lin_comb(1.0, &srho, sign).unwrap(),
        formulation: to,
        t: state.t,
        alpha: state.alpha,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scheme {
    /// Integrating-factor RK4: the dissipation is integrated exactly.
    #[default]
    #[serde(rename = "ifrk4")]
    Ifrk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepperConfig {
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    pub cfl_safety: f64,
}

impl StepperConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            scheme: Scheme::Ifrk4,
            cfl_safety: 0.5,
        }
    }
}

/// Spectral tables for one `(grid, alpha)` pair, shared by every step.
pub struct Stepper {
    grid: SpectralGrid,
    alpha: f64,
    dissipation: Vec<f64>,
    d1: Vec<Complex64>,
    d2: Vec<Complex64>,
    s: Vec<Complex64>,
    n: Vec<Complex64>,
    bs1: Vec<Complex64>,
    bs2: Vec<Complex64>,
}

type Spectrum = Vec<Complex64>;

impl Stepper {
    pub fn new(grid: &SpectralGrid, alpha: f64) -> Result<Self> {
        let dissipation = fractional_laplacian(alpha)?
            .tabulate(grid)?
            .into_iter()
            .map(|c| c.re)
            .collect();
        let d1 = derivative_table(grid, 1);
        let d2 = derivative_table(grid, 2);
        let (bs1, bs2) = biot_savart_tables(grid);
        Ok(Self {
            grid: grid.clone(),
            alpha,
            dissipation,
            s: s_symbol(alpha).tabulate(grid)?,
            n: n_symbol(alpha).tabulate(grid)?,
            d1,
            d2,
            bs1,
            bs2,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn physical(&self, hat: &[Complex64], table: Option<&[Complex64]>) -> Vec<f64> {
        let mut data: Spectrum = match table {
            Some(t) => hat.iter().zip(t).map(|(a, b)| a * b).collect(),
            None => hat.to_vec(),
        };
        self.grid.fft2_inverse(&mut data);
        data.into_iter().map(|c| c.re).collect()
    }

    fn velocity(&self, omega_hat: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        (
            self.physical(omega_hat, Some(&self.bs1)),
            self.physical(omega_hat, Some(&self.bs2)),
        )
    }

    /// `P(u . grad f)` in spectral space.
    fn advect(&self, u1: &[f64], u2: &[f64], f_hat: &[Complex64]) -> Spectrum {
        let fx = self.physical(f_hat, Some(&self.d1));
        let fy = self.physical(f_hat, Some(&self.d2));
        let mut prod: Spectrum = (0..fx.len())
            .map(|i| Complex64::new(u1[i] * fx[i] + u2[i] * fy[i], 0.0))
            .collect();
        self.grid.fft2_forward(&mut prod);
        crate::spectral::dealias_in_place(&self.grid, &mut prod);
        prod
    }

    /// Everything but the `-Lambda^alpha` term, plus the max speed at this stage.
    fn nonlinear(
        &self,
        form: Formulation,
        vort: &[Complex64],
        rho: &[Complex64],
    ) -> (Spectrum, Spectrum, f64) {
        match form {
            Formulation::Vorticity => {
                let (u1, u2) = self.velocity(vort);
                let adv_w = self.advect(&u1, &u2, vort);
                let adv_r = self.advect(&u1, &u2, rho);
                let dw = (0..vort.len())
                    .map(|i| self.d1[i] * rho[i] - adv_w[i])
                    .collect();
                let dr = adv_r.into_iter().map(|c| -c).collect();
                (dw, dr, max_speed(&u1, &u2))
            }
            Formulation::Zeta => {
                let srho: Spectrum = rho.iter().zip(&self.s).map(|(a, b)| a * b).collect();
                let mut omega: Spectrum = vort.iter().zip(&srho).map(|(a, b)| a + b).collect();
                omega[0] = Complex64::default();
                let (u1, u2) = self.velocity(&omega);
                let adv_z = self.advect(&u1, &u2, vort);
                let adv_r = self.advect(&u1, &u2, rho);
                let adv_sr = self.advect(&u1, &u2, &srho);
                let dz = (0..vort.len())
                    .map(|i| {
                        let commutator = self.s[i] * adv_r[i] - adv_sr[i];
                        commutator - self.n[i] * rho[i] - adv_z[i]
                    })
                    .collect();
                let dr = adv_r.into_iter().map(|c| -c).collect();
                (dz, dr, max_speed(&u1, &u2))
            }
        }
    }

    /// Full right-hand side `(d vort/dt, d rho/dt)` including dissipation.
    pub fn rhs(&self, state: &SolverState) -> Result<(ScalarField, ScalarField)> {
        self.check_state(state)?;
        let (mut dv, dr, _) =
            self.nonlinear(state.formulation, state.vort.spectral(), state.rho.spectral());
        for ((d, v), lam) in dv.iter_mut().zip(state.vort.spectral()).zip(&self.dissipation) {
            *d -= v * lam;
        }
        Ok((
            ScalarField::from_spectral(&self.grid, dv)?,
            ScalarField::from_spectral(&self.grid, dr)?,
        ))
    }

    fn check_state(&self, state: &SolverState) -> Result<()> {
        ensure_same_grid(&self.grid, state.grid())?;
        if state.alpha != self.alpha {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: state.alpha,
                reason: "state and stepper disagree on alpha",
            });
        }
        Ok(())
    }

    /// One integrating-factor RK4 step.
    ///
    /// With `E = exp(-|k|^alpha dt)` acting on the vorticity-like field only
    /// (the density has no dissipation):
    ///
    /// ```text
    /// a = F(v)
    /// b = F(E^1/2 (v + dt/2 a))
    /// c = F(E^1/2 v + dt/2 b)
    /// d = F(E v + dt E^1/2 c)
    /// v' = E v + dt/6 (E a + 2 E^1/2 (b + c) + d)
    /// ```
    pub fn step(&self, state: &SolverState, cfg: &StepperConfig) -> Result<SolverState> {
        self.check_state(state)?;
        let dt = cfg.dt;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                reason: "time step must be positive",
            });
        }
        let form = state.formulation;
        let v0 = state.vort.spectral();
        let r0 = state.rho.spectral();
        let len = v0.len();
        let e_half: Vec<f64> = self.dissipation.iter().map(|l| (-0.5 * dt * l).exp()).collect();
        let e_full: Vec<f64> = e_half.iter().map(|e| e * e).collect();

        let (ka, ra, umax) = self.nonlinear(form, v0, r0);
        let limit = cfl_limit(&self.grid, umax, cfg.cfl_safety);
        if dt > limit {
            return Err(Error::CflViolation {
                dt,
                limit,
                max_velocity: umax,
            });
        }

        let h = 0.5 * dt;
        let v2: Spectrum = (0..len).map(|i| (v0[i] + ka[i] * h) * e_half[i]).collect();
        let r2: Spectrum = (0..len).map(|i| r0[i] + ra[i] * h).collect();
        let (kb, rb, _) = self.nonlinear(form, &v2, &r2);

        let v3: Spectrum = (0..len).map(|i| v0[i] * e_half[i] + kb[i] * h).collect();
        let r3: Spectrum = (0..len).map(|i| r0[i] + rb[i] * h).collect();
        let (kc, rc, _) = self.nonlinear(form, &v3, &r3);

        let v4: Spectrum = (0..len)
            .map(|i| v0[i] * e_full[i] + kc[i] * (dt * e_half[i]))
            .collect();
        let r4: Spectrum = (0..len).map(|i| r0[i] + rc[i] * dt).collect();
        let (kd, rd, _) = self.nonlinear(form, &v4, &r4);

        let w = dt / 6.0;
        let mut v_next: Spectrum = (0..len)
            .map(|i| {
                v0[i] * e_full[i]
                    + (ka[i] * e_full[i] + (kb[i] + kc[i]) * (2.0 * e_half[i]) + kd[i]) * w
            })
            .collect();
        let r_next: Spectrum = (0..len)
            .map(|i| r0[i] + (ra[i] + (rb[i] + rc[i]) * 2.0 + rd[i]) * w)
            .collect();
        // omega is a curl and zeta = omega - S rho; both are mean-free.
        v_next[0] = Complex64::default();

        Ok(SolverState {
            rho: ScalarField::from_spectral(&self.grid, r_next)?,
            vort: ScalarField::from_spectral(&self.grid, v_next)?,
            formulation: form,
            t: state.t + dt,
            alpha: state.alpha,
        })
    }

    /// Largest grid speed `max |u|` of the state.
    pub fn max_velocity(&self, state: &SolverState) -> f64 {
        let omega = state.omega();
        let mut hat = omega.spectral().to_vec();
        hat[0] = Complex64::default();
        let (u1, u2) = self.velocity(&hat);
        max_speed(&u1, &u2)
    }
}

fn max_speed(u1: &[f64], u2: &[f64]) -> f64 {
    u1.iter()
        .zip(u2)
        .fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
}

/// `safety * h / max|u|`, infinite for a fluid at rest.
pub fn cfl_limit(grid: &SpectralGrid, max_velocity: f64, safety: f64) -> f64 {
    if max_velocity > 0.0 {
        safety * grid.spacing() / max_velocity
    } else {
        f64::INFINITY
    }
}

/// `u_hat = i (xi_2, -xi_1) omega_hat / |xi|^2`, i.e. `u = grad_perp psi` with
/// `Delta psi = omega`. Nyquist components follow the derivative convention.
fn biot_savart_tables(grid: &SpectralGrid) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = grid.n();
    let mut t1 = Vec::with_capacity(grid.len());
    let mut t2 = Vec::with_capacity(grid.len());
    for j in 0..n {
        let k2 = grid.wavenumber(j);
        for i in 0..n {
            let k1 = grid.wavenumber(i);
            let r2 = k1 * k1 + k2 * k2;
            if r2 == 0.0 {
                t1.push(Complex64::default());
                t2.push(Complex64::default());
                continue;
            }
            let a = if grid.is_nyquist(j) { 0.0 } else { k2 / r2 };
            let b = if grid.is_nyquist(i) { 0.0 } else { -k1 / r2 };
            t1.push(Complex64::new(0.0, a));
            t2.push(Complex64::new(0.0, b));
        }
    }
    (t1, t2)
}

/// Divergence-free velocity with curl `omega`. The input must be mean-free.
pub fn biot_savart(omega: &ScalarField) -> Result<VectorField> {
    let mean = omega.mean();
    if mean.abs() > mean_tolerance(omega) {
        return Err(Error::NonzeroMean { mean });
    }
    let grid = omega.grid();
    let (t1, t2) = biot_savart_tables(grid);
    VectorField::new(omega.map_spectral_table(&t1), omega.map_spectral_table(&t2))
}

pub fn rhs_vorticity(state: &SolverState) -> Result<(ScalarField, ScalarField)> {
    if state.formulation != Formulation::Vorticity {
        return Err(Error::FormulationMismatch {
            expected: "vorticity",
        });
    }
    biot_savart(&state.vort)?;
    Stepper::new(state.grid(), state.alpha)?.rhs(state)
}

pub fn rhs_zeta(state: &SolverState) -> Result<(ScalarField, ScalarField)> {
    if state.formulation != Formulation::Zeta {
        return Err(Error::FormulationMismatch { expected: "zeta" });
    }
    Stepper::new(state.grid(), state.alpha)?.rhs(state)
}

/// Single step with freshly tabulated operators. Runs should hold on to a
/// [`Stepper`] instead.
pub fn step(state: &SolverState, cfg: &StepperConfig) -> Result<SolverState> {
    Stepper::new(state.grid(), state.alpha)?.step(state, cfg)
}

/// Dealiased velocity of a state, for diagnostics.
pub fn velocity(state: &SolverState) -> Result<VectorField> {
    biot_savart(&dealias(&state.omega()).without_mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_field, BandLimited};
    use crate::spectral::{curl, divergence, lq_norm};

    fn grid(n: usize) -> SpectralGrid {
        SpectralGrid::new(n).unwrap()
    }

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        a.physical()
            .iter()
            .zip(b.physical())
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }

    fn rel_l2(a: &ScalarField, b: &ScalarField) -> f64 {
        lq_norm(&a.sub(b).unwrap(), 2.0).unwrap() / lq_norm(b, 2.0).unwrap()
    }

    #[test]
    fn biot_savart_examples() {
        let g = grid(32);
        let u = biot_savart(&ScalarField::zeros(&g)).unwrap();
        assert_eq!(u.max_magnitude(), 0.0);

        let w = ScalarField::from_fn(&g, |x, _| x.cos());
        let u = biot_savart(&w).unwrap();
        assert!(u.component(1).max_abs() < 1e-14);
        assert!(max_diff(u.component(2), &ScalarField::from_fn(&g, |x, _| x.sin())) < 1e-14);
        assert!(max_diff(&curl(&u), &w) < 1e-14);

        assert!(matches!(
            biot_savart(&ScalarField::constant(&g, 0.1)),
            Err(Error::NonzeroMean { .. })
        ));
    }

    #[test]
    fn biot_savart_random_self_consistency() {
        let g = grid(64);
        let w = random_field(&g, &BandLimited::new(20, 1.0), 4).unwrap();
        let u = biot_savart(&w).unwrap();
        assert!(lq_norm(&divergence(&u), 2.0).unwrap() < 1e-12);
        assert!(lq_norm(&curl(&u).sub(&w).unwrap(), 2.0).unwrap() < 1e-12 * lq_norm(&w, 2.0).unwrap());
    }

    #[test]
    fn state_rejects_mean_vorticity() {
        let g = grid(16);
        let r = ScalarField::zeros(&g);
        assert!(SolverState::new(r.clone(), ScalarField::constant(&g, 1.0), Formulation::Vorticity, 1.5).is_err());
        assert!(SolverState::new(r.clone(), ScalarField::zeros(&g), Formulation::Vorticity, 0.0).is_err());
        assert!(SolverState::new(r, ScalarField::zeros(&grid(8)), Formulation::Zeta, 1.5).is_err());
    }

    #[test]
    fn rhs_vorticity_examples() {
        let g = grid(32);
        let cos = ScalarField::from_fn(&g, |x, _| x.cos());
        let st = SolverState::new(ScalarField::zeros(&g), cos.clone(), Formulation::Vorticity, 1.5).unwrap();
        let (dw, dr) = rhs_vorticity(&st).unwrap();
        assert!(max_diff(&dw, &cos.scaled(-1.0)) < 1e-13);
        assert!(dr.max_abs() < 1e-14);

        let st = SolverState::new(ScalarField::constant(&g, 2.0), ScalarField::zeros(&g), Formulation::Vorticity, 1.5).unwrap();
        let (dw, dr) = rhs_vorticity(&st).unwrap();
        assert!(dw.max_abs() < 1e-13 && dr.max_abs() < 1e-13);

        let sin = ScalarField::from_fn(&g, |x, _| x.sin());
        let st = SolverState::new(sin, ScalarField::zeros(&g), Formulation::Vorticity, 1.5).unwrap();
        let (dw, dr) = rhs_vorticity(&st).unwrap();
        assert!(max_diff(&dw, &cos) < 1e-13);
        assert!(dr.max_abs() < 1e-14);

        let zst = convert(&st, Formulation::Zeta);
        assert!(rhs_vorticity(&zst).is_err());
        assert!(rhs_zeta(&st).is_err());
    }

    #[test]
    fn rhs_zeta_degenerates_without_density() {
        let g = grid(32);
        let w = random_field(&g, &BandLimited::new(6, 2.0), 8).unwrap();
        let z = SolverState::new(ScalarField::zeros(&g), w.clone(), Formulation::Zeta, 1.5).unwrap();
        let v = SolverState::new(ScalarField::zeros(&g), w, Formulation::Vorticity, 1.5).unwrap();
        let (a, _) = rhs_zeta(&z).unwrap();
        let (b, _) = rhs_vorticity(&v).unwrap();
        assert!(max_diff(&a, &b) < 1e-13);

        let eq = SolverState::new(ScalarField::constant(&g, 3.0), ScalarField::zeros(&g), Formulation::Zeta, 1.5).unwrap();
        let (dz, dr) = rhs_zeta(&eq).unwrap();
        assert!(dz.max_abs() < 1e-13 && dr.max_abs() < 1e-13);
    }

    #[test]
    fn formulations_agree_on_the_vorticity_tendency() {
        // d omega/dt = d zeta/dt + S d rho/dt must equal the vorticity RHS.
        let g = grid(64);
        let band = BandLimited::new(8, 2.0);
        let w = random_field(&g, &band, 21).unwrap();
        let r = random_field(&g, &band.with_mean(), 22).unwrap();
        let alpha = 1.5;
        let vs = SolverState::new(r, w, Formulation::Vorticity, alpha).unwrap();
        let zs = convert(&vs, Formulation::Zeta);
        let (dw, dr) = rhs_vorticity(&vs).unwrap();
        let (dz, dr2) = rhs_zeta(&zs).unwrap();
        let rebuilt = dz.add(&crate::multipliers::s_operator(&dr2, alpha)).unwrap();
        assert!(rel_l2(&rebuilt, &dw) < 1e-10, "{}", rel_l2(&rebuilt, &dw));
        assert!(rel_l2(&dr2, &dr) < 1e-12);
    }

    #[test]
    fn convert_examples() {
        let g = grid(16);
        let cos = ScalarField::from_fn(&g, |x, _| x.cos());
        let st = SolverState::new(ScalarField::zeros(&g), cos.clone(), Formulation::Vorticity, 1.5).unwrap();
        assert!(max_diff(convert(&st, Formulation::Zeta).vort(), &cos) < 1e-15);

        let st = SolverState::new(cos.clone(), cos.clone(), Formulation::Vorticity, 1.5).unwrap();
        let z = convert(&st, Formulation::Zeta);
        let expect = ScalarField::from_fn(&g, |x, _| x.cos() + 0.5946035575013605 * x.sin());
        assert!(max_diff(z.vort(), &expect) < 1e-14);

        let g = grid(32);
        let band = BandLimited::default();
        let st = SolverState::new(
            random_field(&g, &band.with_mean(), 1).unwrap(),
            random_field(&g, &band, 2).unwrap(),
            Formulation::Vorticity,
            1.3,
        )
        .unwrap();
        let back = convert(&convert(&st, Formulation::Zeta), Formulation::Vorticity);
        assert!(max_diff(back.vort(), st.vort()) <= 1e-13 * st.vort().max_abs().max(1.0));
    }

    #[test]
    fn shear_mode_step_is_exact() {
        let g = grid(32);
        for &alpha in &[1.2, 1.5, 1.9] {
            let w = ScalarField::from_fn(&g, |x, _| x.cos());
            let st = SolverState::new(ScalarField::zeros(&g), w, Formulation::Vorticity, alpha).unwrap();
            let next = step(&st, &StepperConfig::new(0.01)).unwrap();
            let plus = g.flat_mode_index(1, 0).unwrap();
            let coeff = next.vort().spectral()[plus].re / (g.len() as f64 / 2.0);
            assert!((coeff - (-0.01f64).exp()).abs() < 1e-12);
            assert!((next.t() - 0.01).abs() < 1e-16);
        }
    }

    #[test]
    fn equilibrium_is_preserved() {
        let g = grid(16);
        let st = SolverState::new(ScalarField::constant(&g, 1.25), ScalarField::zeros(&g), Formulation::Vorticity, 1.5).unwrap();
        let next = step(&st, &StepperConfig::new(0.1)).unwrap();
        assert!(max_diff(next.rho(), st.rho()) < 1e-14);
        assert!(next.vort().max_abs() < 1e-14);
        assert!((next.t() - 0.1).abs() < 1e-16);
    }

    #[test]
    fn cfl_violation_reports_velocity() {
        let g = grid(16);
        let w = ScalarField::from_fn(&g, |x, _| 10.0 * x.cos());
        let st = SolverState::new(ScalarField::zeros(&g), w, Formulation::Vorticity, 1.5).unwrap();
        match step(&st, &StepperConfig::new(1.0)) {
            Err(Error::CflViolation { max_velocity, .. }) => assert!((max_velocity - 10.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_is_deterministic_and_mean_free() {
        let g = grid(32);
        let band = BandLimited::new(5, 2.0);
        let st = SolverState::new(
            random_field(&g, &band.with_mean(), 3).unwrap(),
            random_field(&g, &band, 4).unwrap(),
            Formulation::Vorticity,
            1.5,
        )
        .unwrap();
        let cfg = StepperConfig::new(0.01);
        let a = step(&st, &cfg).unwrap();
        let b = step(&st, &cfg).unwrap();
        assert_eq!(a.vort().spectral(), b.vort().spectral());
        assert_eq!(a.rho().spectral(), b.rho().spectral());
        assert_eq!(a.vort().spectral()[0], Complex64::default());
        assert!((a.rho().mean() - st.rho().mean()).abs() < 1e-13);
    }
}
