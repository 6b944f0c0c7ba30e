//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Runs with `cargo test -p fracbous --test acceptance`. The persistence run
//! at n = 256 takes a minute or so; everything else is seconds.

use std::process::ExitCode;
use std::time::Instant;

use fracbous::diagnostics::Clause;
use fracbous::dynamics::{Formulation, SolverState};
use fracbous::multipliers::{hm_decay_check, m_tilde};
use fracbous::run::{initial_state, integrate, run, InitialCondition, RunConfig};
use fracbous::spectral::{lq_norm, ScalarField};
use fracbous::suites::{run_suite, Suite, SuiteConfig};
use fracbous::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn rel_l2(a: &ScalarField, b: &ScalarField) -> f64 {
    lq_norm(&a.sub(b).unwrap(), 2.0).unwrap() / lq_norm(b, 2.0).unwrap()
}

fn final_state(cfg: &RunConfig) -> Result<SolverState> {
    Ok(run(cfg, |_| Ok(()))?.state)
}

fn shear_mode() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for alpha in [1.2, 1.5, 1.9] {
        let cfg = RunConfig {
            alpha,
            t_final: 1.0,
            ..RunConfig::preset("shear-mode").unwrap()
        };
        let omega = final_state(&cfg)?.omega();
        let exact = ScalarField::from_fn(omega.grid(), |x, _| (-1.0f64).exp() * x.cos());
        worst = worst.max(rel_l2(&omega, &exact));
    }
    Ok(outcome(worst <= 1e-8, format!("max relative L2 error {worst:.3e} (bound 1e-8)")))
}

fn density_conservation() -> Result<Outcome> {
    let cfg = RunConfig {
        grid: 128,
        t_final: 1.0,
        ..RunConfig::preset("random").unwrap()
    };
    let start = initial_state(&cfg)?;
    let end = integrate(&cfg, start.clone(), |_| Ok(()))?.state;
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for q in [2.0, 4.0, 8.0] {
        let a = lq_norm(start.rho(), q)?;
        let d = (lq_norm(end.rho(), q)? - a).abs() / a;
        parts.push(format!("q={q}: {d:.2e}"));
        worst = worst.max(d);
    }
    Ok(outcome(worst <= 1e-6, format!("relative drift {} (bound 1e-6)", parts.join(", "))))
}

fn formulation_gap(n: usize) -> Result<f64> {
    let base = RunConfig {
        grid: n,
        alpha: 1.5,
        t_final: 1.0,
        // dt proportional to h, so refinement shrinks the time error too.
        dt: Some(1.28 / n as f64),
        sample_rate: 1.0,
        ..RunConfig::preset("random").unwrap()
    };
    let w = final_state(&RunConfig { formulation: Formulation::Vorticity, ..base.clone() })?.omega();
    let z = final_state(&RunConfig { formulation: Formulation::Zeta, ..base })?.omega();
    Ok(rel_l2(&z, &w))
}

fn formulation_equivalence() -> Result<Outcome> {
    let coarse = formulation_gap(128)?;
    let fine = formulation_gap(256)?;
    Ok(outcome(
        coarse <= 1e-6 && fine < coarse,
        format!("relative L2 gap n=128: {coarse:.3e} (bound 1e-6), n=256: {fine:.3e}"),
    ))
}

fn suite(s: Suite, grid: usize) -> Result<fracbous::checks::InequalityReport> {
    run_suite(
        s,
        &SuiteConfig {
            trials: 64,
            seed: 7,
            grid,
            alpha: 1.5,
            ..Default::default()
        },
    )
}

fn commutator_identity() -> Result<Outcome> {
    let r = suite(Suite::Identity, 128)?;
    Ok(outcome(
        r.passed,
        format!("max residual {:.3e} over {} trials (bound 1e-10)", -r.worst_margin, r.trials),
    ))
}

fn cordoba() -> Result<Outcome> {
    let r = suite(Suite::Cordoba, 128)?;
    Ok(outcome(
        r.passed,
        format!(
            "min margin/LHS {:.3e}, equality-case deviation {:.3e} (tolerance 1e-10)",
            r.detail["minRelativeMargin"].as_f64().unwrap_or(f64::NAN),
            r.detail["equalityMaxRelativeDeviation"].as_f64().unwrap_or(f64::NAN),
        ),
    ))
}

fn n_smoothing() -> Result<Outcome> {
    let r = suite(Suite::Nsmooth, 64)?;
    let hm = hm_decay_check(&m_tilde(1.5), 2)?;
    let hm_ok = hm.all_finite() && hm.max_sup() < fracbous::suites::HM_CEILING;
    Ok(outcome(
        r.passed && hm_ok,
        format!(
            "ratio n=64: {:.6}, n=256: {:.6}, change {:.2e} (bound 0.10); m-tilde max sup {:.4}",
            r.detail["coarseMax"].as_f64().unwrap_or(f64::NAN),
            r.detail["fineMax"].as_f64().unwrap_or(f64::NAN),
            r.detail["growth"].as_f64().unwrap_or(f64::NAN),
            hm.max_sup(),
        ),
    ))
}

fn inequality_ratios() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for s in [Suite::Kp, Suite::Gn, Suite::Ikp] {
        let r = suite(s, 128)?;
        passed &= r.passed;
        parts.push(format!(
            "{} growth {:.2e}",
            r.name,
            r.detail["growth"].as_f64().unwrap_or(f64::NAN)
        ));
        if s == Suite::Gn {
            parts.push(format!(
                "gn endpoint |ratio-1| {:.1e}",
                r.detail["endpointDeviation"].as_f64().unwrap_or(f64::NAN)
            ));
        }
    }
    Ok(outcome(passed, format!("{} (bound 0.15)", parts.join(", "))))
}

fn persistence() -> Result<Outcome> {
    let cfg = RunConfig::preset("persistence").unwrap();
    let out = run(&cfg, |_| Ok(()))?;
    let max_rate = out.report.fits.iter().map(|f| f.b).fold(f64::NEG_INFINITY, f64::max);
    let control = run(&RunConfig::preset("under-resolved").unwrap(), |_| Ok(()))?;
    let control_fails = !control.report.passed && control.report.violated.contains(&Clause::TailEnergy);
    Ok(outcome(
        out.report.passed && out.report.max_tail_energy < 1e-6 && control_fails,
        format!(
            "n=256 T=5 verdict {} (max tail {:.2e}, largest fitted rate {:.3}); n=32 control verdict {} on {:?}",
            out.report.verdict, out.report.max_tail_energy, max_rate, control.report.verdict, control.report.violated
        ),
    ))
}

fn richardson() -> Result<Outcome> {
    let base = RunConfig {
        grid: 64,
        t_final: 1.0,
        cfl_safety: 1.0,
        sample_rate: 1.0,
        initial: InitialCondition::RandomBandLimited {
            seed: 3,
            kmax: 6,
            decay: 2.0,
            omega_norm: Some(1.0),
            rho_norm: Some(1.0),
        },
        ..RunConfig::default()
    };
    let omega = |dt: f64| -> Result<ScalarField> {
        Ok(final_state(&RunConfig { dt: Some(dt), ..base.clone() })?.omega())
    };
    let dt = 0.1;
    let (a, b, c) = (omega(dt)?, omega(dt / 2.0)?, omega(dt / 4.0)?);
    let e1 = lq_norm(&a.sub(&b)?, 2.0)?;
    let e2 = lq_norm(&b.sub(&c)?, 2.0)?;
    let order = (e1 / e2).log2();
    Ok(outcome(
        order >= 3.7,
        format!("observed order {order:.3} from dt = {dt}, {}, {} (bound 3.7)", dt / 2.0, dt / 4.0),
    ))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("shear-mode exactness", shear_mode),
        ("density conservation", density_conservation),
        ("formulation equivalence", formulation_equivalence),
        ("commutator identity", commutator_identity),
        ("cordoba-cordoba", cordoba),
        ("N smoothing and m-tilde decay", n_smoothing),
        ("inequality ratio stability", inequality_ratios),
        ("persistence witness", persistence),
        ("time-integrator order", richardson),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let (passed, detail) = match check() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} {name}: {detail} [{:.1}s]",
            if passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
