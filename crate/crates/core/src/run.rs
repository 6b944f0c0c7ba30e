//! Run configuration, initial-condition presets and the time loop.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    persistence_verdict, sample, DiagnosticsConfig, DiagnosticsRecord, PersistenceConfig,
    PersistenceReport,
};
use crate::dynamics::{cfl_limit, convert, Formulation, SolverState, Stepper, StepperConfig};
use crate::error::{Error, Result};
use crate::random::{normalize_lq, random_field, BandLimited};
use crate::spectral::snapshot::load_snapshot;
use crate::spectral::{ScalarField, SpectralGrid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `omega = amplitude cos(x1)`, `rho = 0`.
    ShearMode {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Band-limited random `omega` (mean-free) and `rho`, optionally rescaled
    /// to a prescribed `L^q` norm with `q` from the run.
    #[serde(alias = "random", rename_all = "camelCase")]
    RandomBandLimited {
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_kmax")]
        kmax: usize,
        #[serde(default = "default_decay")]
        decay: f64,
        #[serde(default = "some_one")]
        omega_norm: Option<f64>,
        #[serde(default = "some_one")]
        rho_norm: Option<f64>,
    },
    /// Fields read from binary snapshots; `omega` has its mean removed.
    Snapshot { rho: PathBuf, omega: PathBuf },
}

fn one() -> f64 {
    1.0
}

fn some_one() -> Option<f64> {
    Some(1.0)
}

fn default_kmax() -> usize {
    8
}

fn default_decay() -> f64 {
    2.0
}

impl InitialCondition {
    pub fn random(seed: u64) -> Self {
        InitialCondition::RandomBandLimited {
            seed,
            kmax: default_kmax(),
            decay: default_decay(),
            omega_norm: Some(1.0),
            rho_norm: Some(1.0),
        }
    }
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::random(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: usize,
    pub alpha: f64,
    pub s: f64,
    pub q: f64,
    pub formulation: Formulation,
    #[serde(rename = "T")]
    pub t_final: f64,
    /// Fixed step; `None` picks each step from the CFL limit.
    pub dt: Option<f64>,
    /// Upper bound on adaptive steps.
    pub dt_max: f64,
    pub cfl_safety: f64,
    /// Diagnostic samples per unit time.
    pub sample_rate: f64,
    pub lq_rho: Vec<f64>,
    pub initial: InitialCondition,
    pub persistence: PersistenceConfig,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: 128,
            alpha: 1.5,
            s: 1.5,
            q: 4.0,
            formulation: Formulation::Vorticity,
            t_final: 1.0,
            dt: None,
            dt_max: 0.01,
            cfl_safety: 0.5,
            sample_rate: 20.0,
            lq_rho: vec![2.0, 4.0, 8.0],
            initial: InitialCondition::default(),
            persistence: PersistenceConfig::default(),
            out: PathBuf::from("out"),
        }
    }
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter { name, value, reason }
}

impl RunConfig {
    /// Named configurations. `shear-mode` and `persistence` mirror the
    /// acceptance experiments; `under-resolved` is their negative control.
    pub fn preset(name: &str) -> Option<Self> {
        let base = Self::default();
        match name {
            "shear-mode" => Some(Self {
                grid: 64,
                dt: Some(1e-3),
                initial: InitialCondition::ShearMode { amplitude: 1.0 },
                ..base
            }),
            "random" => Some(base),
            "persistence" => Some(Self {
                grid: 256,
                t_final: 5.0,
                initial: InitialCondition::random(7),
                ..base
            }),
            "under-resolved" => Some(Self {
                grid: 32,
                t_final: 1.0,
                initial: InitialCondition::RandomBandLimited {
                    seed: 7,
                    kmax: 15,
                    decay: 0.0,
                    omega_norm: Some(1.0),
                    rho_norm: Some(1.0),
                },
                ..base
            }),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["shear-mode", "random", "persistence", "under-resolved"]
    }

    /// Hard errors for unusable values; warnings for parameters outside the
    /// range covered by the persistence theorem (`s > 1`, `2 < q < inf`).
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.grid < 8 || !self.grid.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n = {} must be even and >= 8", self.grid)));
        }
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(invalid("alpha", self.alpha, "dissipation order must lie in (1, 2)"));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(invalid("T", self.t_final, "final time must be finite and nonnegative"));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid("dt", dt, "time step must be positive"));
            }
        }
        if !(self.dt_max > 0.0) {
            return Err(invalid("dtMax", self.dt_max, "time step bound must be positive"));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(invalid("cflSafety", self.cfl_safety, "safety factor must lie in (0, 1]"));
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(invalid("sampleRate", self.sample_rate, "sample rate must be positive"));
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(invalid("s", self.s, "Sobolev order must be finite and nonnegative"));
        }
        if !(self.q >= 1.0) {
            return Err(invalid("q", self.q, "exponent must be at least 1"));
        }
        if let Some(&bad) = self.lq_rho.iter().find(|q| !(**q >= 1.0)) {
            return Err(invalid("lqRho", bad, "exponent must be at least 1"));
        }
        if let InitialCondition::RandomBandLimited { kmax, .. } = self.initial {
            if kmax == 0 || 2 * kmax >= self.grid {
                return Err(invalid("kmax", kmax as f64, "band must satisfy 1 <= kmax < n/2"));
            }
        }
        let mut warnings = Vec::new();
        if self.s <= 1.0 {
            warnings.push(format!("s = {} is outside s > 1", self.s));
        }
        if !(self.q > 2.0 && self.q.is_finite()) {
            warnings.push(format!("q = {} is outside (2, inf)", self.q));
        }
        Ok(warnings)
    }

    pub fn diagnostics(&self) -> DiagnosticsConfig {
        DiagnosticsConfig {
            lq_rho: self.lq_rho.clone(),
            q: self.q,
            s: self.s,
        }
    }

    /// Sample times `k / sampleRate` up to `T`, with `T` always included.
    pub fn sample_times(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut k = 1u64;
        loop {
            let t = k as f64 / self.sample_rate;
            if t >= self.t_final * (1.0 - 1e-12) {
                break;
            }
            out.push(t);
            k += 1;
        }
        if self.t_final > 0.0 {
            out.push(self.t_final);
        }
        out
    }
}

/// Builds the initial state in the configured formulation.
pub fn initial_state(cfg: &RunConfig) -> Result<SolverState> {
    let grid = SpectralGrid::new(cfg.grid)?;
    let (rho, omega) = match &cfg.initial {
        InitialCondition::ShearMode { amplitude } => {
            let a = *amplitude;
            (ScalarField::zeros(&grid), ScalarField::from_fn(&grid, |x, _| a * x.cos()))
        }
        InitialCondition::RandomBandLimited {
            seed,
            kmax,
            decay,
            omega_norm,
            rho_norm,
        } => {
            let band = BandLimited::new(*kmax, *decay);
            let omega = random_field(&grid, &band, seed.wrapping_mul(2))?;
            let rho = random_field(&grid, &band.with_mean(), seed.wrapping_mul(2).wrapping_add(1))?;
            let omega = match omega_norm {
                Some(target) => normalize_lq(&omega, cfg.q, *target)?,
                None => omega,
            };
            let rho = match rho_norm {
                Some(target) => normalize_lq(&rho, cfg.q, *target)?,
                None => rho,
            };
            (rho, omega)
        }
        InitialCondition::Snapshot { rho, omega } => {
            let rho = load_snapshot(rho)?;
            let omega = load_snapshot(omega)?;
            if rho.grid().n() != cfg.grid || omega.grid().n() != cfg.grid {
                return Err(Error::GridMismatch {
                    left: format!("snapshot n = {}", rho.grid().n().max(omega.grid().n())),
                    right: format!("configured n = {}", cfg.grid),
                });
            }
            (
                ScalarField::from_physical(&grid, rho.into_physical())?,
                ScalarField::from_physical(&grid, omega.into_physical())?.without_mean(),
            )
        }
    };
    let state = SolverState::new(rho, omega, Formulation::Vorticity, cfg.alpha)?;
    Ok(convert(&state, cfg.formulation))
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub state: SolverState,
    pub records: Vec<DiagnosticsRecord>,
    pub report: PersistenceReport,
    pub steps: usize,
}

/// Advances `state` to time `t_end`, choosing steps so that `t_end` is hit
/// exactly. Returns the new state and the number of steps taken.
pub fn advance(
    stepper: &Stepper,
    state: SolverState,
    t_end: f64,
    cfg: &RunConfig,
) -> Result<(SolverState, usize)> {
    let mut state = state;
    let mut steps = 0;
    if let Some(dt) = cfg.dt {
        let span = t_end - state.t();
        if span <= 0.0 {
            return Ok((state, 0));
        }
        let m = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
        let step_cfg = StepperConfig {
            dt: span / m as f64,
            scheme: Default::default(),
            cfl_safety: cfg.cfl_safety,
        };
        let t0 = state.t();
        for i in 1..=m {
            let next = stepper.step(&state, &step_cfg)?;
            state = next.with_time(if i == m { t_end } else { t0 + i as f64 * step_cfg.dt });
            steps += 1;
        }
        return Ok((state, steps));
    }
    while state.t() < t_end {
        let remaining = t_end - state.t();
        let limit = cfl_limit(stepper.grid(), stepper.max_velocity(&state), cfg.cfl_safety);
        let mut dt = cfg.dt_max.min(limit * (1.0 - 1e-6));
        let last = dt >= remaining * (1.0 - 1e-12);
        if last {
            dt = remaining;
        } else if 2.0 * dt > remaining {
            dt = 0.5 * remaining;
        }
        let step_cfg = StepperConfig {
            dt,
            scheme: Default::default(),
            cfl_safety: cfg.cfl_safety,
        };
        let next = stepper.step(&state, &step_cfg)?;
        state = if last { next.with_time(t_end) } else { next };
        steps += 1;
    }
    Ok((state, steps))
}

/// Integrates from `state` to `T`, sampling on the configured cadence.
/// `on_record` sees each record as soon as it exists.
pub fn integrate(
    cfg: &RunConfig,
    state: SolverState,
    mut on_record: impl FnMut(&DiagnosticsRecord) -> Result<()>,
) -> Result<RunOutcome> {
    let stepper = Stepper::new(state.grid(), cfg.alpha)?;
    let diag = cfg.diagnostics();
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let mut state = state;
    let mut steps = 0;
    for t in cfg.sample_times() {
        let (next, taken) = advance(&stepper, state, t, cfg)?;
        state = next;
        steps += taken;
        if !state.is_finite() {
            return Err(Error::NonFinite("state"));
        }
        let rec = sample(&state, &diag, records.last())?;
        on_record(&rec)?;
        records.push(rec);
    }
    let report = persistence_verdict(&records, &cfg.persistence);
    Ok(RunOutcome {
        state,
        records,
        report,
        steps,
    })
}

/// [`initial_state`] followed by [`integrate`].
pub fn run(
    cfg: &RunConfig,
    on_record: impl FnMut(&DiagnosticsRecord) -> Result<()>,
) -> Result<RunOutcome> {
    cfg.validate()?;
    integrate(cfg, initial_state(cfg)?, on_record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in RunConfig::preset_names() {
            let cfg = RunConfig::preset(name).unwrap();
            assert!(cfg.validate().unwrap().is_empty(), "{name}");
        }
        assert!(RunConfig::preset("nope").is_none());
    }

    #[test]
    fn validation_errors_and_warnings() {
        let bad = RunConfig { grid: 30 + 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = RunConfig { alpha: 2.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = RunConfig { dt: Some(0.0), ..Default::default() };
        assert!(bad.validate().is_err());
        let warn = RunConfig { s: 0.5, q: 2.0, ..Default::default() };
        assert_eq!(warn.validate().unwrap().len(), 2);
    }

    #[test]
    fn sample_times_end_at_t() {
        let cfg = RunConfig { t_final: 0.12, sample_rate: 20.0, ..Default::default() };
        assert_eq!(cfg.sample_times(), vec![0.0, 0.05, 0.1, 0.12]);
        let cfg = RunConfig { t_final: 0.1, sample_rate: 20.0, ..Default::default() };
        assert_eq!(cfg.sample_times(), vec![0.0, 0.05, 0.1]);
        let cfg = RunConfig { t_final: 0.0, ..Default::default() };
        assert_eq!(cfg.sample_times(), vec![0.0]);
    }

    #[test]
    fn zero_time_run_passes_with_one_record() {
        let cfg = RunConfig { grid: 64, t_final: 0.0, ..Default::default() };
        let out = run(&cfg, |_| Ok(())).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.steps, 0);
        assert!(out.report.passed, "{:?}", out.report);
    }

    #[test]
    fn random_initial_state_is_normalized() {
        let cfg = RunConfig { grid: 32, ..Default::default() };
        let st = initial_state(&cfg).unwrap();
        let w = crate::spectral::lq_norm(st.vort(), cfg.q).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
        assert!(st.vort().mean().abs() < 1e-15);
    }

    #[test]
    fn adaptive_run_lands_on_sample_times() {
        let cfg = RunConfig { grid: 32, t_final: 0.2, ..Default::default() };
        let mut seen = Vec::new();
        let out = run(&cfg, |r| {
            seen.push(r.t);
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, cfg.sample_times());
        assert_eq!(out.state.t(), 0.2);
        assert!(out.steps >= 20);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = RunConfig::preset("under-resolved").unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let partial: RunConfig = serde_json::from_str(r#"{"grid": 64, "T": 2.0, "initial": {"preset": "shear-mode"}}"#).unwrap();
        assert_eq!(partial.grid, 64);
        assert_eq!(partial.initial, InitialCondition::ShearMode { amplitude: 1.0 });
    }
}
