//! Norm time series of a run, Gronwall envelope fits and the persistence
//! verdict built from them.

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dynamics::{biot_savart, SolverState};
use crate::error::{Error, Result};
use crate::multipliers::{apply_multiplier, fractional_laplacian};
use crate::spectral::{
    lq_norm, lq_norm_vector, partial_derivative, sobolev_norm, spectral_energy,
    tail_energy_fraction, ScalarField,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct DiagnosticsConfig {
    /// Exponents at which the density is measured.
    pub lq_rho: Vec<f64>,
    /// Exponent for vorticity, velocity, Sobolev and dissipation quantities.
    pub q: f64,
    /// Sobolev order; `zeta` is measured at order `s - 1`.
    pub s: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            lq_rho: vec![2.0, 4.0, 8.0],
            q: 4.0,
            s: 1.5,
        }
    }
}

/// `q -> ||rho||_q`, serialized as a JSON object in insertion order with keys
/// like `"2"` or `"2.5"`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExponentMap(pub Vec<(f64, f64)>);

impl ExponentMap {
    pub fn get(&self, q: f64) -> Option<f64> {
        self.0.iter().find(|(k, _)| *k == q).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.0.iter().copied()
    }
}

pub fn exponent_key(q: f64) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        format!("{q}")
    }
}

impl Serialize for ExponentMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (q, v) in &self.0 {
            map.serialize_entry(&exponent_key(*q), v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ExponentMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ExponentMap;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from exponent to value")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<ExponentMap, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, f64>()? {
                    let q = if k == "inf" {
                        f64::INFINITY
                    } else {
                        k.parse().map_err(serde::de::Error::custom)?
                    };
                    out.push((q, v));
                }
                Ok(ExponentMap(out))
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// One sample of the tracked quantities. Field order is the NDJSON key order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    #[serde(rename = "lqRho")]
    pub lq_rho: ExponentMap,
    #[serde(rename = "lqZeta")]
    pub lq_zeta: f64,
    #[serde(rename = "lqOmega")]
    pub lq_omega: f64,
    /// `||rho||_{W^{s,q}}`.
    #[serde(rename = "sobolevRhoSQ")]
    pub sobolev_rho: f64,
    /// `||zeta||_{W^{s-1,q}}`.
    #[serde(rename = "sobolevZeta")]
    pub sobolev_zeta: f64,
    #[serde(rename = "lqU")]
    pub lq_u: f64,
    /// Grid max over the four entries of `grad u`.
    #[serde(rename = "lipU")]
    pub lip_u: f64,
    /// `||Lambda^(alpha/2) |zeta|^(q/2)||_2^2` at this instant.
    #[serde(rename = "dissRate")]
    pub diss_rate: f64,
    /// Trapezoid-rule integral of `dissRate` from the first sample.
    #[serde(rename = "dissIntegral")]
    pub diss_integral: f64,
    /// Larger of the tail fractions of `rho` and `omega`.
    #[serde(rename = "tailEnergy")]
    pub tail_energy: f64,
}

impl DiagnosticsRecord {
    /// `(key, value)` of every scalar series, `lqRho` expanded as `lqRho[q]`.
    pub fn series(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = self
            .lq_rho
            .iter()
            .map(|(q, v)| (format!("lqRho[{}]", exponent_key(q)), v))
            .collect();
        out.extend([
            ("lqZeta".to_string(), self.lq_zeta),
            ("lqOmega".to_string(), self.lq_omega),
            ("sobolevRhoSQ".to_string(), self.sobolev_rho),
            ("sobolevZeta".to_string(), self.sobolev_zeta),
            ("lqU".to_string(), self.lq_u),
            ("lipU".to_string(), self.lip_u),
            ("dissRate".to_string(), self.diss_rate),
            ("dissIntegral".to_string(), self.diss_integral),
            ("tailEnergy".to_string(), self.tail_energy),
        ]);
        out
    }
}

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(name))
    }
}

/// `||Lambda^(alpha/2) |zeta|^(q/2)||_2^2`, with the power taken pointwise.
pub fn dissipation_rate(zeta: &ScalarField, alpha: f64, q: f64) -> Result<f64> {
    let power = zeta.map_physical(|v| v.abs().powf(q / 2.0));
    Ok(spectral_energy(&apply_multiplier(&power, &fractional_laplacian(alpha / 2.0)?)?))
}

/// Measures `state`. With `previous` the dissipation integral is continued by
/// the trapezoid rule; otherwise it starts at 0.
pub fn sample(
    state: &SolverState,
    cfg: &DiagnosticsConfig,
    previous: Option<&DiagnosticsRecord>,
) -> Result<DiagnosticsRecord> {
    if !state.rho().is_finite() {
        return Err(Error::NonFinite("rho"));
    }
    if !state.vort().is_finite() {
        return Err(Error::NonFinite(match state.formulation() {
            crate::dynamics::Formulation::Vorticity => "omega",
            crate::dynamics::Formulation::Zeta => "zeta",
        }));
    }
    let rho = state.rho();
    let zeta = state.zeta();
    let omega = state.omega().without_mean();
    let q = cfg.q;

    let mut lq_rho = Vec::with_capacity(cfg.lq_rho.len());
    for &p in &cfg.lq_rho {
        lq_rho.push((p, finite("lqRho", lq_norm(rho, p)?)?));
    }
    let u = biot_savart(&omega)?;
    let mut lip_u = 0.0_f64;
    for c in u.components() {
        for axis in 1..=2 {
            lip_u = lip_u.max(partial_derivative(c, axis).max_abs());
        }
    }
    let diss_rate = finite("dissRate", dissipation_rate(&zeta, state.alpha(), q)?)?;
    let diss_integral = match previous {
        Some(p) => p.diss_integral + 0.5 * (state.t() - p.t) * (p.diss_rate + diss_rate),
        None => 0.0,
    };
    Ok(DiagnosticsRecord {
        t: state.t(),
        lq_rho: ExponentMap(lq_rho),
        lq_zeta: finite("lqZeta", lq_norm(&zeta, q)?)?,
        lq_omega: finite("lqOmega", lq_norm(&omega, q)?)?,
        sobolev_rho: finite("sobolevRhoSQ", sobolev_norm(rho, cfg.s, q)?)?,
        sobolev_zeta: finite("sobolevZeta", sobolev_norm(&zeta, (cfg.s - 1.0).max(0.0), q)?)?,
        lq_u: finite("lqU", lq_norm_vector(&u, q)?)?,
        lip_u: finite("lipU", lip_u)?,
        diss_rate,
        diss_integral: finite("dissIntegral", diss_integral)?,
        tail_energy: finite(
            "tailEnergy",
            tail_energy_fraction(rho).max(tail_energy_fraction(&omega)),
        )?,
    })
}

pub const DEFAULT_FLOOR: f64 = 1e-14;

/// Pointwise bound `value(t) <= A exp(B t)` over a series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    pub quantity: String,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "maxRelExcess")]
    pub max_rel_excess: f64,
    /// Every value sat at or below the floor.
    pub degenerate: bool,
}

impl EnvelopeFit {
    pub fn bound(&self, t: f64) -> f64 {
        self.a * (self.b * t).exp()
    }
}

/// Least-squares fit of `log(max(value, floor))` against `t` for the rate `B`,
/// then `A` raised just enough that the envelope dominates every sample.
pub fn fit_envelope(quantity: &str, series: &[(f64, f64)], floor: f64) -> Result<EnvelopeFit> {
    if series.is_empty() {
        return Err(Error::Degenerate(format!("empty series for {quantity}")));
    }
    if !(floor > 0.0) {
        return Err(Error::InvalidParameter {
            name: "floor",
            value: floor,
            reason: "log floor must be positive",
        });
    }
    for &(t, v) in series {
        if !(t.is_finite() && v.is_finite()) {
            return Err(Error::NonFinite("envelope series"));
        }
        if v < 0.0 {
            return Err(Error::InvalidParameter {
                name: "value",
                value: v,
                reason: "envelope series must be nonnegative",
            });
        }
    }
    let degenerate = series.iter().all(|&(_, v)| v <= floor);
    let pts: Vec<(f64, f64)> = series.iter().map(|&(t, v)| (t, v.max(floor))).collect();
    let m = pts.len() as f64;
    let t_mean = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let y_mean = pts.iter().map(|p| p.1.ln()).sum::<f64>() / m;
    let (mut stt, mut sty) = (0.0, 0.0);
    for &(t, v) in &pts {
        let dt = t - t_mean;
        stt += dt * dt;
        sty += dt * (v.ln() - y_mean);
    }
    let b = if stt > 0.0 { sty / stt } else { 0.0 };
    let raw_a = pts
        .iter()
        .map(|&(t, v)| v * (-b * t).exp())
        .fold(0.0_f64, f64::max);
    let a = raw_a * (1.0 + 8.0 * f64::EPSILON);
    let max_rel_excess = pts
        .iter()
        .map(|&(t, v)| v / (a * (b * t).exp()) - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EnvelopeFit {
        quantity: quantity.to_string(),
        a,
        b,
        max_rel_excess,
        degenerate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct PersistenceConfig {
    /// Largest admissible fitted rate `B` of a norm. The dissipation integral
    /// starts at 0 and grows linearly at first, so its fit is reported but only
    /// required to be finite.
    pub growth_ceiling: f64,
    /// Relative drift allowed in every `||rho||_q`.
    pub drift_tolerance: f64,
    /// `tailEnergy` must stay strictly below this.
    pub tail_threshold: f64,
    pub floor: f64,
}

impl Default for PersistenceConfig {
    fn default() -> Self {
        Self {
            growth_ceiling: 5.0,
            drift_tolerance: 1e-6,
            tail_threshold: 1e-6,
            floor: DEFAULT_FLOOR,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Clause {
    /// Some tracked norm has no finite envelope below the growth ceiling.
    Envelope,
    /// Density norms drifted.
    Conservation,
    /// Energy reached the spectral tail: the run is under-resolved.
    TailEnergy,
    /// The dissipation integral is not finite.
    Dissipation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PersistenceReport {
    pub verdict: String,
    pub passed: bool,
    pub violated: Vec<Clause>,
    pub reasons: Vec<String>,
    pub records: usize,
    pub final_time: f64,
    pub rho_drift: f64,
    pub max_tail_energy: f64,
    pub fits: Vec<EnvelopeFit>,
}

/// Largest relative change of any `||rho||_q` from the first record.
pub fn rho_drift(records: &[DiagnosticsRecord]) -> f64 {
    let Some(first) = records.first() else {
        return 0.0;
    };
    let mut worst = 0.0_f64;
    for rec in records {
        for (q, v) in rec.lq_rho.iter() {
            let v0 = first.lq_rho.get(q).unwrap_or(f64::NAN);
            let d = if v0 == 0.0 { v.abs() } else { (v - v0).abs() / v0 };
            worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
        }
    }
    worst
}

pub fn persistence_verdict(records: &[DiagnosticsRecord], cfg: &PersistenceConfig) -> PersistenceReport {
    let mut violated = Vec::new();
    let mut reasons = Vec::new();
    let mut fits = Vec::new();
    let mut fail = |clause: Clause, reason: String, violated: &mut Vec<Clause>| {
        if !violated.contains(&clause) {
            violated.push(clause);
        }
        reasons.push(reason);
    };

    if records.is_empty() {
        fail(Clause::Envelope, "no diagnostics records".into(), &mut violated);
    }

    let keys: Vec<String> = records
        .first()
        .map(|r| r.series().into_iter().map(|(k, _)| k).collect())
        .unwrap_or_default();
    for key in keys {
        if key == "dissRate" || key == "tailEnergy" {
            continue;
        }
        // The integral starts at exactly 0, so only later samples enter its fit.
        let series: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| key != "dissIntegral" || r.t > records[0].t)
            .map(|r| {
                let v = r.series().into_iter().find(|(k, _)| *k == key).map_or(f64::NAN, |p| p.1);
                (r.t, v)
            })
            .collect();
        if series.is_empty() {
            continue;
        }
        let integral = key == "dissIntegral";
        match fit_envelope(&key, &series, cfg.floor) {
            Ok(fit) if integral => {
                if !(fit.b.is_finite() && fit.a.is_finite()) {
                    fail(Clause::Dissipation, format!("{key}: no finite envelope"), &mut violated);
                }
                fits.push(fit);
            }
            Ok(fit) => {
                if !(fit.b.is_finite() && fit.b <= cfg.growth_ceiling && fit.a.is_finite()) {
                    fail(
                        Clause::Envelope,
                        format!("{key}: growth rate {} exceeds {}", fit.b, cfg.growth_ceiling),
                        &mut violated,
                    );
                }
                fits.push(fit);
            }
            Err(e) if integral => fail(Clause::Dissipation, format!("{key}: {e}"), &mut violated),
            Err(e) => fail(Clause::Envelope, format!("{key}: {e}"), &mut violated),
        }
    }

    let drift = rho_drift(records);
    if !(drift <= cfg.drift_tolerance) {
        fail(
            Clause::Conservation,
            format!("density norm drift {drift:e} exceeds {:e}", cfg.drift_tolerance),
            &mut violated,
        );
    }

    let max_tail = records.iter().map(|r| r.tail_energy).fold(0.0_f64, |m, v| {
        if v.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(v)
        }
    });
    if !(max_tail < cfg.tail_threshold) {
        fail(
            Clause::TailEnergy,
            format!("tail energy {max_tail:e} reached threshold {:e}", cfg.tail_threshold),
            &mut violated,
        );
    }

    if records.iter().any(|r| !r.diss_integral.is_finite()) {
        fail(Clause::Dissipation, "dissipation integral is not finite".into(), &mut violated);
    }

    let passed = violated.is_empty();
    PersistenceReport {
        verdict: if passed { "PASS" } else { "FAIL" }.into(),
        passed,
        violated,
        reasons,
        records: records.len(),
        final_time: records.last().map_or(0.0, |r| r.t),
        rho_drift: drift,
        max_tail_energy: max_tail,
        fits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{convert, Formulation};
    use crate::multipliers::s_operator;
    use crate::random::{random_field, BandLimited};
    use crate::spectral::SpectralGrid;
    use std::f64::consts::PI;

    fn state(rho: ScalarField, vort: ScalarField) -> SolverState {
        SolverState::new(rho, vort, Formulation::Vorticity, 1.5).unwrap()
    }

    #[test]
    fn zero_state_gives_zero_record() {
        let g = SpectralGrid::new(16).unwrap();
        let r = sample(&state(ScalarField::zeros(&g), ScalarField::zeros(&g)), &DiagnosticsConfig::default(), None).unwrap();
        assert!(r.series().iter().all(|(_, v)| *v == 0.0), "{r:?}");
    }

    #[test]
    fn sine_density_closed_form() {
        let g = SpectralGrid::new(32).unwrap();
        let cfg = DiagnosticsConfig {
            lq_rho: vec![2.0],
            ..Default::default()
        };
        let st = state(ScalarField::from_fn(&g, |x, _| x.sin()), ScalarField::zeros(&g));
        let r = sample(&st, &cfg, None).unwrap();
        assert!((r.lq_rho.get(2.0).unwrap() - PI * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_of_constant_rate() {
        let g = SpectralGrid::new(32).unwrap();
        let z = random_field(&g, &BandLimited::new(4, 1.0), 5).unwrap();
        let cfg = DiagnosticsConfig::default();
        let st = state(ScalarField::zeros(&g), z);
        let a = sample(&st, &cfg, None).unwrap();
        let b = sample(&st.clone().with_time(0.25), &cfg, Some(&a)).unwrap();
        assert_eq!(a.diss_integral, 0.0);
        assert!((b.diss_integral - 0.25 * a.diss_rate).abs() <= 1e-14 * a.diss_rate);
        assert!(a.diss_rate > 0.0);
    }

    #[test]
    fn omega_triangle_inequality() {
        let g = SpectralGrid::new(32).unwrap();
        let band = BandLimited::default().with_mean();
        let st = state(random_field(&g, &band, 1).unwrap(), random_field(&g, &BandLimited::default(), 2).unwrap());
        let st = convert(&st, Formulation::Zeta);
        let cfg = DiagnosticsConfig::default();
        let r = sample(&st, &cfg, None).unwrap();
        let srho = lq_norm(&s_operator(st.rho(), 1.5), cfg.q).unwrap();
        assert!(r.lq_omega <= r.lq_zeta + srho + 1e-12);
    }

    #[test]
    fn record_serializes_in_documented_order() {
        let g = SpectralGrid::new(16).unwrap();
        let st = state(ScalarField::from_fn(&g, |x, _| x.sin()), ScalarField::zeros(&g));
        let r = sample(&st, &DiagnosticsConfig::default(), None).unwrap();
        let line = serde_json::to_string(&r).unwrap();
        let order = [
            "\"t\"", "\"lqRho\"", "\"lqZeta\"", "\"lqOmega\"", "\"sobolevRhoSQ\"", "\"sobolevZeta\"",
            "\"lqU\"", "\"lipU\"", "\"dissRate\"", "\"dissIntegral\"", "\"tailEnergy\"",
        ];
        let pos: Vec<usize> = order.iter().map(|k| line.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{line}");
        assert!(line.contains("\"lqRho\":{\"2\":"));
        let back: DiagnosticsRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn non_finite_state_names_the_field() {
        let g = SpectralGrid::new(8).unwrap();
        let mut v = vec![0.0; 64];
        v[3] = f64::NAN;
        let bad = ScalarField::from_physical(&g, v).unwrap();
        let st = SolverState::new(bad, ScalarField::zeros(&g), Formulation::Zeta, 1.5).unwrap();
        assert!(matches!(sample(&st, &DiagnosticsConfig::default(), None), Err(Error::NonFinite("rho"))));
    }

    #[test]
    fn envelope_recovers_exact_model() {
        let series: Vec<(f64, f64)> = (0..40).map(|i| {
            let t = i as f64 * 0.1;
            (t, 2.5 * (0.7 * t).exp())
        }).collect();
        let fit = fit_envelope("x", &series, DEFAULT_FLOOR).unwrap();
        assert!((fit.a - 2.5).abs() < 1e-9 * 2.5);
        assert!((fit.b - 0.7).abs() < 1e-9 * 0.7);
        assert!(fit.max_rel_excess <= 0.0 && fit.max_rel_excess > -1e-12);
        assert!(series.iter().all(|&(t, v)| v <= fit.bound(t)));
    }

    #[test]
    fn envelope_edge_cases() {
        let c: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0)).collect();
        let fit = fit_envelope("c", &c, DEFAULT_FLOOR).unwrap();
        assert!(fit.b.abs() < 1e-15 && (fit.a - 3.0).abs() < 1e-14);
        let z: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 0.0)).collect();
        let fit = fit_envelope("z", &z, DEFAULT_FLOOR).unwrap();
        assert!(fit.degenerate && fit.a > 0.0);
        assert_eq!(fit_envelope("one", &[(0.0, 4.0)], DEFAULT_FLOOR).unwrap().b, 0.0);
        assert!(fit_envelope("e", &[], DEFAULT_FLOOR).is_err());
        assert!(fit_envelope("n", &[(0.0, -1.0)], DEFAULT_FLOOR).is_err());
    }

    fn record(t: f64, rho: f64, growth: f64, tail: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            lq_rho: ExponentMap(vec![(2.0, rho), (4.0, rho)]),
            lq_zeta: (growth * t).exp(),
            lq_omega: 1.0,
            sobolev_rho: 1.0,
            sobolev_zeta: 1.0,
            lq_u: 1.0,
            lip_u: 1.0,
            diss_rate: 1.0,
            diss_integral: t,
            tail_energy: tail,
        }
    }

    #[test]
    fn verdict_clauses() {
        let cfg = PersistenceConfig::default();
        let good: Vec<_> = (0..10).map(|i| record(i as f64 * 0.1, 1.0, 0.3, 1e-9)).collect();
        let rep = persistence_verdict(&good, &cfg);
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.verdict, "PASS");

        let fast: Vec<_> = (0..10).map(|i| record(i as f64 * 0.1, 1.0, 9.0, 1e-9)).collect();
        assert_eq!(persistence_verdict(&fast, &cfg).violated, vec![Clause::Envelope]);

        let drift: Vec<_> = (0..10).map(|i| record(i as f64 * 0.1, 1.0 + i as f64 * 1e-5, 0.3, 1e-9)).collect();
        assert_eq!(persistence_verdict(&drift, &cfg).violated, vec![Clause::Conservation]);

        let rough: Vec<_> = (0..10).map(|i| record(i as f64 * 0.1, 1.0, 0.3, 1e-3)).collect();
        let rep = persistence_verdict(&rough, &cfg);
        assert_eq!(rep.violated, vec![Clause::TailEnergy]);
        assert_eq!(rep.verdict, "FAIL");

        let fast_integral: Vec<_> = (0..10)
            .map(|i| DiagnosticsRecord { diss_integral: (9.0 * i as f64 * 0.1).exp() - 1.0, ..record(i as f64 * 0.1, 1.0, 0.3, 1e-9) })
            .collect();
        assert!(persistence_verdict(&fast_integral, &cfg).passed);

        let mut nan = good.clone();
        nan[4].diss_integral = f64::NAN;
        assert!(persistence_verdict(&nan, &cfg).violated.contains(&Clause::Dissipation));
    }

    #[test]
    fn zero_data_verdict_passes() {
        let g = SpectralGrid::new(16).unwrap();
        let st = state(ScalarField::zeros(&g), ScalarField::zeros(&g));
        let cfg = DiagnosticsConfig::default();
        let a = sample(&st, &cfg, None).unwrap();
        let b = sample(&st.clone().with_time(1.0), &cfg, Some(&a)).unwrap();
        let rep = persistence_verdict(&[a, b], &PersistenceConfig::default());
        assert!(rep.passed, "{rep:?}");
    }
}
