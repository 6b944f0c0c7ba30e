//! `fracbous run | check | norms`.
//!
//! Exit codes: 0 success or PASS, 1 FAIL verdict, 2 configuration error,
//! 3 numerical failure.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracbous::dynamics::Formulation;
use fracbous::random::BandLimited;
use fracbous::run::{initial_state, integrate, InitialCondition, RunConfig};
use fracbous::spectral::snapshot::{load_snapshot, save_snapshot};
use fracbous::spectral::{lq_norm, sobolev_norm};
use fracbous::suites::{run_suite, Suite, SuiteConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "fracbous", version, about = "Fractional Boussinesq solver and analysis checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and certify the norm envelopes.
    Run(RunArgs),
    /// Run one inequality or identity suite and print its report.
    Check(CheckArgs),
    /// Lebesgue and Sobolev norms of a snapshot.
    Norms(NormsArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML (or .json) run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named configuration: shear-mode, random, persistence, under-resolved.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// Fixed time step; otherwise chosen from the CFL limit.
    #[arg(long)]
    dt: Option<f64>,
    /// Seed of the random initial condition.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    formulation: Option<Formulation>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// identity, cordoba, gn, kp, ikp, nsmooth or hm.
    #[arg(long)]
    suite: Suite,
    #[arg(long, default_value_t = 64)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Base grid; defaults to 64 for nsmooth and 128 otherwise.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    /// Suite-specific order (identity s, Córdoba s, Kato–Ponce s, or mu).
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    q: f64,
    /// Band of the random fields.
    #[arg(long, default_value_t = 8)]
    kmax: usize,
    #[arg(long, default_value_t = 2.0)]
    decay: f64,
}

#[derive(Args)]
struct NormsArgs {
    snapshot: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Lebesgue exponent; `inf` is accepted.
    #[arg(long, default_value_t = 2.0)]
    q: f64,
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<fracbous::Error> for Failure {
    fn from(e: fracbous::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

type Outcome = Result<bool, Failure>;

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Numerical(format!("{}: {e}", path.display()))
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|x| x == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn resolve_config(args: &RunArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => load_config(path)?,
        (None, Some(name)) => RunConfig::preset(name).ok_or_else(|| {
            Failure::Config(format!(
                "unknown preset `{name}` (expected one of {})",
                RunConfig::preset_names().join(", ")
            ))
        })?,
        (None, None) => RunConfig::default(),
    };
    if let Some(v) = args.grid {
        cfg.grid = v;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.s {
        cfg.s = v;
    }
    if let Some(v) = args.q {
        cfg.q = v;
    }
    if let Some(v) = args.t_final {
        cfg.t_final = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = Some(v);
    }
    if let Some(v) = args.formulation {
        cfg.formulation = v;
    }
    if let Some(v) = &args.out {
        cfg.out = v.clone();
    }
    if let Some(v) = args.seed {
        match &mut cfg.initial {
            InitialCondition::RandomBandLimited { seed, .. } => *seed = v,
            _ => eprintln!("warning: --seed has no effect on a deterministic initial condition"),
        }
    }
    Ok(cfg)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| io_failure(path, e))
}

fn run_command(args: &RunArgs) -> Outcome {
    let cfg = resolve_config(args)?;
    for w in cfg.validate()? {
        eprintln!("warning: {w}");
    }
    fs::create_dir_all(&cfg.out).map_err(|e| io_failure(&cfg.out, e))?;
    write_json(&cfg.out.join("config.json"), &cfg)?;

    let ndjson = cfg.out.join("diagnostics.ndjson");
    let mut sink = BufWriter::new(File::create(&ndjson).map_err(|e| io_failure(&ndjson, e))?);
    let state = initial_state(&cfg)?;
    let result = integrate(&cfg, state, |rec| {
        serde_json::to_writer(&mut sink, rec).expect("serializable");
        sink.write_all(b"\n")?;
        Ok(())
    });
    sink.flush().map_err(|e| io_failure(&ndjson, e))?;
    let outcome = result?;

    save_snapshot(cfg.out.join("rho.snap"), outcome.state.rho())?;
    save_snapshot(cfg.out.join("omega.snap"), &outcome.state.omega())?;
    write_json(&cfg.out.join("envelope.json"), &json!({ "fits": outcome.report.fits }))?;
    write_json(&cfg.out.join("verdict.json"), &outcome.report)?;
    println!(
        "{}",
        serde_json::to_string(&json!({
            "verdict": outcome.report.verdict,
            "violated": outcome.report.violated,
            "reasons": outcome.report.reasons,
            "steps": outcome.steps,
            "finalTime": outcome.report.final_time,
            "out": cfg.out,
        }))
        .expect("serializable")
    );
    Ok(outcome.report.passed)
}

fn check_command(args: &CheckArgs) -> Outcome {
    let cfg = SuiteConfig {
        trials: args.trials,
        seed: args.seed,
        grid: args
            .grid
            .unwrap_or(if args.suite == Suite::Nsmooth { 64 } else { 128 }),
        alpha: args.alpha,
        s: args.s,
        q: args.q,
        band: BandLimited::new(args.kmax, args.decay),
    };
    let report = run_suite(args.suite, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    Ok(report.passed)
}

fn norms_command(args: &NormsArgs) -> Outcome {
    let f = load_snapshot(&args.snapshot)?;
    let value = json!({
        "n": f.grid().n(),
        "length": f.grid().length(),
        "q": args.q,
        "s": args.s,
        "lq": lq_norm(&f, args.q)?,
        "sobolev": sobolev_norm(&f, args.s, args.q)?,
    });
    println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    Ok(true)
}

fn main() -> ExitCode {
    // Exit quietly when stdout is closed early, e.g. piped into `head`.
    let default_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        let broken_pipe = info
            .payload()
            .downcast_ref::<String>()
            .is_some_and(|m| m.contains("Broken pipe"));
        if broken_pipe {
            std::process::exit(0);
        }
        default_hook(info);
    }));
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run_command(a),
        Command::Check(a) => check_command(a),
        Command::Norms(a) => norms_command(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(failure) => {
            let (kind, message, code) = match failure {
                Failure::Config(m) => ("config", m, 2),
                Failure::Numerical(m) => ("numerical", m, 3),
            };
            println!("{}", json!({ "error": { "kind": kind, "message": message } }));
            ExitCode::from(code)
        }
    }
}
