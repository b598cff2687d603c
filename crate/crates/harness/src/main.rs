use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use pta_core::channels::{gamma_lambda, split_gate_error};
use pta_core::protocol::SimMode;
use pta_core::twirl::{pstep_of, pta_cz, pta_decoherence};
use pta_harness::checks::run_checks;
use pta_harness::config::SweepConfig;
use pta_harness::{decoherence_for, emit_csv, emit_plot, invert_pstep, run_sweep, write_csv};

/// Exact versus Pauli-twirled simulation of a two-qubit Bell-state
/// preservation circuit under decoherence and CZ gate errors.
///
/// Settings are layered: built-in defaults, then --config, then flags.
/// TWIRL_THREADS caps the number of worker threads.
#[derive(Parser, Debug)]
#[command(name = "ptasim", version)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// key = value file overlaying the defaults
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed for Monte Carlo sampling [default: 1]
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Simulation modes, comma separated: exact, pta, bound, mc [default: exact,pta]
    #[arg(long, global = true, value_name = "MODE")]
    mode: Option<String>,
    /// T2/T1 held fixed while T1 varies [default: 1]
    #[arg(long, global = true, value_name = "R")]
    t2_ratio: Option<String>,
    /// CZ error phase in radians; accepts forms like pi/4 [default: 0]
    #[arg(long, global = true, value_name = "RAD")]
    phi: Option<String>,
    /// Non-Markovian dephasing exponent [default: 0]
    #[arg(long, global = true, value_name = "A")]
    alpha: Option<String>,
    /// Monte Carlo trials per point [default: 10000]
    #[arg(long, global = true, value_name = "N")]
    trials: Option<String>,
    /// Cycle cap per trial or branch [default: 100]
    #[arg(long, global = true, value_name = "N")]
    max_cycles: Option<String>,
    /// Step time in seconds [default: 25e-9]
    #[arg(long, global = true, value_name = "SECONDS")]
    t_step: Option<String>,
    /// Write sweep rows as CSV (stdout if omitted)
    #[arg(long, global = true, value_name = "PATH")]
    out_csv: Option<PathBuf>,
    /// Write a log-log plot of P versus p_step
    #[arg(long, global = true, value_name = "PATH")]
    out_svg: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep p_step and gate error, comparing the selected modes
    Sweep {
        /// p_step grid, comma separated [default: 13 log-spaced points in 1e-4..1e-1]
        #[arg(long, value_name = "LIST")]
        p_steps: Option<String>,
        /// Total CZ gate errors, comma separated [default: 0,1e-4,1e-3,1e-2,0.1]
        #[arg(long, value_name = "LIST")]
        gate_errors: Option<String>,
        /// Record per-row wall time (makes the CSV non-reproducible)
        #[arg(long)]
        timing: bool,
    },
    /// Print the twirled decoherence and CZ channels
    Twirl {
        /// Per-step decoherence error probability; T1 is solved for
        #[arg(long, value_name = "P", conflicts_with = "t1")]
        p_step: Option<f64>,
        /// T1 in seconds
        #[arg(long, value_name = "SECONDS")]
        t1: Option<f64>,
        /// Total CZ gate error E
        #[arg(long, value_name = "E", default_value_t = 0.0)]
        gate_error: f64,
    },
    /// Run the invariant and oracle self-checks
    Check,
}

fn build_config(opts: &GlobalOpts) -> anyhow::Result<SweepConfig> {
    let mut cfg = match &opts.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let overrides = [
        ("modes", &opts.mode),
        ("t2_ratio", &opts.t2_ratio),
        ("phi", &opts.phi),
        ("alpha", &opts.alpha),
        ("trials", &opts.trials),
        ("max_cycles", &opts.max_cycles),
        ("t_step", &opts.t_step),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, v)
                .with_context(|| format!("--{}", key.replace('_', "-")))?;
        }
    }
    Ok(cfg)
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("TWIRL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("TWIRL_THREADS={raw:?} is not a thread count"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn sweep(cfg: SweepConfig, opts: &GlobalOpts) -> anyhow::Result<()> {
    let res = run_sweep(&cfg)?;
    match &opts.out_csv {
        Some(path) => emit_csv(&res, path)?,
        None => write_csv(&res, io::stdout().lock())?,
    }
    if let Some(path) = &opts.out_svg {
        emit_plot(&res, path)?;
    }
    if opts.out_csv.is_some() {
        print_comparison(&res, &cfg);
    }
    Ok(())
}

/// Human-readable exact-versus-PTA table on stdout.
fn print_comparison(res: &pta_harness::SweepResult, cfg: &SweepConfig) {
    println!("phi={} T2/T1={} alpha={}", cfg.phi, cfg.t2_ratio, cfg.alpha);
    print!("{:>10} {:>8}", "p_step", "E");
    for m in &cfg.modes {
        print!(" {:>12}", m.as_str());
    }
    println!();
    for chunk in res.rows.chunks(cfg.modes.len()) {
        print!("{:>10.3e} {:>8.1e}", chunk[0].p_step, chunk[0].gate_error);
        for r in chunk {
            print!(" {:>12.5e}", r.p);
        }
        println!();
    }
}

fn twirl(cfg: &SweepConfig, p_step: Option<f64>, t1: Option<f64>, e: f64) -> anyhow::Result<()> {
    let t1 = match (p_step, t1) {
        (Some(p), _) => invert_pstep(p, cfg.t2_ratio, cfg.alpha, cfg.t_step)?,
        (None, Some(t1)) => t1,
        (None, None) => bail!("give --p-step or --t1"),
    };
    let dec = decoherence_for(t1, cfg.t2_ratio, cfg.alpha, cfg.t_step)?;
    let (gamma, lambda) = gamma_lambda(&dec);
    let (px, py, pz) = pta_decoherence(&dec).xyz();
    println!(
        "decoherence: T1={:e} s  Tphi={:e} s  alpha={}  t_step={:e} s",
        dec.t1, dec.t_phi, dec.alpha, dec.t_step
    );
    println!(
        "  gamma={gamma:e}  lambda={lambda:e}  p_step={:e}",
        pstep_of(&dec)
    );
    println!("  {:<4} {:>14}", "P", "prob");
    for (label, p) in [("I", 1.0 - px - py - pz), ("X", px), ("Y", py), ("Z", pz)] {
        println!("  {label:<4} {p:>14.6e}");
    }
    let cz = split_gate_error(e, cfg.phi)?;
    println!(
        "CZ: E={e}  E1={:e}  delta={:e}  phi={}",
        cz.e1, cz.delta, cz.phi
    );
    println!("  {:<4} {:>14}", "P", "prob");
    for (s, p) in pta_cz(&cz).iter() {
        if p != 0.0 {
            println!("  {:<4} {p:>14.6e}", s.to_string());
        }
    }
    Ok(())
}

fn check() -> bool {
    let results = run_checks();
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag}  {}  ({})", r.name, r.detail);
    }
    results.iter().all(|r| r.passed)
}

fn run() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    init_threads()?;
    let mut cfg = build_config(&cli.opts)?;
    match cli.command {
        Command::Sweep {
            p_steps,
            gate_errors,
            timing,
        } => {
            if let Some(v) = p_steps {
                cfg.set("p_steps", &v).context("--p-steps")?;
            }
            if let Some(v) = gate_errors {
                cfg.set("gate_errors", &v).context("--gate-errors")?;
            }
            cfg.timing |= timing;
            if cfg.modes.contains(&SimMode::MonteCarloPta) && cfg.trials == 0 {
                bail!("Monte Carlo mode needs --trials > 0");
            }
            sweep(cfg, &cli.opts)?;
            Ok(true)
        }
        Command::Twirl {
            p_step,
            t1,
            gate_error,
        } => {
            twirl(&cfg, p_step, t1, gate_error)?;
            Ok(true)
        }
        Command::Check => Ok(check()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
